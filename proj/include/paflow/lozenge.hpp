#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "paflow/blueprint.hpp"

namespace paflow {

struct LozengeError : std::runtime_error {
    explicit LozengeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Side type of a vertex sector (and of a shared lozenge side). Sectors around
// a vertex alternate stable/unstable; the type is read off the polarity of the
// boundary cycle owning the corner (incoming -> stable, outgoing -> unstable).
enum class SideType { stable, unstable, none };

inline const char* to_string(SideType s) {
    switch (s) {
        case SideType::stable: return "s";
        case SideType::unstable: return "u";
        default: return "none";
    }
}

// One vertex of the unfolded tree: a base vertex plus the reduced word of
// outgoing half-edge labels walked from the root ("" at the root). Slots
// mirror the base cyclic order; slot_edge[s] is the patch edge occupying slot
// s, or -1 past the patch radius.
struct PatchVertex {
    int base = -1;
    std::string word;
    int depth = 0;
    int parent = -1;       // patch vertex this one was unfolded from
    int parent_slot = -1;  // slot here holding the edge back to the parent
    std::vector<int> slot_edge;
};

struct PatchEdge {
    int v[2];     // patch endpoints; v[0] is nearer the root
    int slot[2];  // cyclic slot occupied at v[0] / v[1]
    int base_edge = -1;
};

// Radius-R ball of the universal cover of the blueprint graph, carrying the
// inherited cyclic orders and the alternating stable/unstable sector types.
struct FatTreePatch {
    FatGraphBlueprint bp;
    int radius = 0;
    std::vector<PatchVertex> vertices;
    std::vector<PatchEdge> edges;
    // [base vertex][sector s] with sector s between cyclic slots s and s+1
    std::vector<std::vector<SideType>> sector_type;

    int prongs(int pv) const { return bp.valence(vertices[pv].base) / 2; }
};

// Breadth-first unfolding to combinatorial radius R; requires the blueprint
// to pass both closure conditions (sector types need the polarity coloring).
FatTreePatch build_fat_tree(const FatGraphBlueprint& bp, int radius);

// Deterministic edge-list dump with cyclic-order annotations.
std::string export_fat_tree(const FatTreePatch& patch);

struct LozengeCorner {
    int vertex = -1;  // patch vertex
    int p = 2;        // prong count of the underlying orbit
};

// adjacent_to_previous marks that this lozenge and its predecessor are glued
// along a side of type `shared` (the sector between their two tree edges).
struct Lozenge {
    LozengeCorner corner1, corner2;
    bool adjacent_to_previous = false;
    SideType shared = SideType::none;
};

struct LozengeChain {
    std::vector<Lozenge> lozenges;
};

// Turn a simple vertex path into a chain, one lozenge per edge. Consecutive
// lozenges share the middle vertex as a corner and are flagged adjacent when
// their edges are cyclically consecutive there. At a one-prong corner
// (valence 2) the two edges bound a sector on both sides; the sector
// counterclockwise of the earlier edge is reported.
LozengeChain chain_along_path(const FatTreePatch& patch, const std::vector<int>& path);

// True iff every corner is 2-prong and no consecutive pair is adjacent.
bool is_string(const LozengeChain& chain);

enum class ScallopClass { s_scalloped, u_scalloped, neither };

inline const char* to_string(ScallopClass c) {
    switch (c) {
        case ScallopClass::s_scalloped: return "s-scalloped";
        case ScallopClass::u_scalloped: return "u-scalloped";
        default: return "neither";
    }
}

// s-scalloped chains are glued along unstable sides throughout (and
// u-scalloped along stable sides); anything else is neither.
ScallopClass is_scalloped(const LozengeChain& chain);

}  // namespace paflow
