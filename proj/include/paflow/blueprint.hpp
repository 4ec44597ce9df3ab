#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace paflow {

// Parse/validation failure with the offending input line (1-based, 0 = n/a).
struct ParseError : std::runtime_error {
    ParseError(int line_, const std::string& msg)
        : std::runtime_error(line_ > 0 ? "line " + std::to_string(line_) + ": " + msg : msg),
          line(line_) {}
    int line;
};

enum class Polarity { incoming, outgoing };

inline const char* to_string(Polarity p) {
    return p == Polarity::incoming ? "incoming" : "outgoing";
}

// Fat graph: vertices carry a cyclic order of half-edges, edges pair them up.
// A twisted edge flips the ribbon side when crossed (non-orientable support).
struct FatVertex {
    std::string id;
    std::vector<int> order;  // half-edge indices in cyclic order
};

struct FatEdge {
    std::string id;
    int he[2];  // half-edge indices; he[0] is the "first" end (fixes side naming)
    bool twist = false;
};

struct HalfEdge {
    std::string id;
    int vertex = -1;  // owning vertex
    int slot = -1;    // position in the vertex cyclic order
    int edge = -1;    // owning edge
    int end = -1;     // 0 or 1 within the edge
};

struct FatGraphBlueprint {
    std::vector<FatVertex> vertices;
    std::vector<FatEdge> edges;
    std::vector<HalfEdge> half_edges;
    // polarity directives from the input file: (cycle index, polarity)
    std::vector<std::pair<int, Polarity>> polarity_directives;

    int valence(int v) const { return static_cast<int>(vertices[v].order.size()); }
    int partner(int he) const {
        const FatEdge& e = edges[half_edges[he].edge];
        return e.he[0] == he ? e.he[1] : e.he[0];
    }
    int next_at_vertex(int he, int step) const {  // step = +1 / -1 in cyclic order
        const auto& ord = vertices[half_edges[he].vertex].order;
        int n = static_cast<int>(ord.size());
        return ord[((half_edges[he].slot + step) % n + n) % n];
    }
};

// One arc of a boundary cycle: a full traversal of one ribbon side of `edge`.
// side 0 is the ribbon side on the left flank of the edge's first half-edge.
// dir is +1 when the traversal runs from the first half-edge end to the second.
// corner_vertex/corner_sector identify the vertex corner crossed immediately
// before this arc (sector s sits between cyclic slots s and s+1 mod valence).
struct CycleStep {
    int edge;
    int side;
    int dir;
    int corner_vertex;
    int corner_sector;
};

struct BoundaryCycle {
    std::vector<CycleStep> steps;
    std::optional<Polarity> polarity;
    int length() const { return static_cast<int>(steps.size()); }
};

// Cycles in canonical order plus reverse-lookup tables used by assembly and
// the fat tree (every edge side and every vertex corner belongs to exactly
// one cycle).
struct BoundaryData {
    std::vector<BoundaryCycle> cycles;
    std::vector<int> side_cycle;                 // [edge*2+side] -> cycle index
    std::vector<int> side_pos;                   // [edge*2+side] -> step index in its cycle
    std::vector<std::vector<int>> corner_cycle;  // [vertex][sector] -> cycle index

    std::string side_id(const FatGraphBlueprint& bp, int edge, int side) const {
        return bp.edges[edge].id + ":" + std::to_string(side);
    }
};

struct ConditionReport {
    bool pass = false;
    bool condition1 = false;            // all valences even
    bool condition2 = false;            // assignment separates the sides of every edge
    bool polarity_assignable = false;   // a valid 2-coloring exists at all
    std::vector<std::string> violations;
};

enum class ProngClass { one_prong, regular, singular };

inline const char* to_string(ProngClass c) {
    switch (c) {
        case ProngClass::one_prong: return "one-prong";
        case ProngClass::regular: return "regular";
        default: return "singular";
    }
}

struct ProngRecord {
    int vertex;
    int p;  // valence / 2
    ProngClass cls;
};

FatGraphBlueprint parse_blueprint(const std::string& text);

BoundaryData trace_boundary_cycles(const FatGraphBlueprint& bp);

// Auto 2-coloring of cycles honoring any user directives already present in
// `bd.cycles[i].polarity`; returns false when no valid coloring exists (the
// assignment is left partially filled in that case).
bool derive_polarity(const FatGraphBlueprint& bp, BoundaryData& bd);

ConditionReport validate_conditions(const FatGraphBlueprint& bp, const BoundaryData& bd);

std::vector<ProngRecord> prong_census(const FatGraphBlueprint& bp);

// chi(Sigma) = V - E for the ribbon surface the blueprint spans.
inline int euler_characteristic(const FatGraphBlueprint& bp) {
    return static_cast<int>(bp.vertices.size()) - static_cast<int>(bp.edges.size());
}

// Convenience: parse + trace + apply/derive polarity, throwing on failure.
struct TracedBlueprint {
    FatGraphBlueprint bp;
    BoundaryData boundary;
};
TracedBlueprint load_blueprint(const std::string& text);

}  // namespace paflow
