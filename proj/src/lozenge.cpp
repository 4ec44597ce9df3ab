#include "paflow/lozenge.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace paflow {

namespace {

// Slot the patch edge occupies at patch vertex pv.
int slot_at(const FatTreePatch& patch, int edge, int pv) {
    const PatchEdge& pe = patch.edges[edge];
    if (pe.v[0] == pv) return pe.slot[0];
    if (pe.v[1] == pv) return pe.slot[1];
    throw LozengeError("edge " + std::to_string(edge) + " does not touch patch vertex " +
                       std::to_string(pv));
}

int other_end(const PatchEdge& pe, int pv) { return pe.v[0] == pv ? pe.v[1] : pe.v[0]; }

}  // namespace

FatTreePatch build_fat_tree(const FatGraphBlueprint& bp, int radius) {
    if (radius < 0) throw LozengeError("fat tree radius must be nonnegative");
    if (bp.vertices.empty()) throw LozengeError("fat tree needs a nonempty blueprint");

    BoundaryData bd = trace_boundary_cycles(bp);
    for (const auto& [cycle, pol] : bp.polarity_directives) bd.cycles[cycle].polarity = pol;
    derive_polarity(bp, bd);
    ConditionReport rep = validate_conditions(bp, bd);
    if (!rep.pass) {
        std::string msg = "blueprint rejected:";
        for (const std::string& v : rep.violations) msg += "\n  - " + v;
        throw LozengeError(msg);
    }

    FatTreePatch patch;
    patch.bp = bp;
    patch.radius = radius;
    patch.sector_type.resize(bp.vertices.size());
    for (int v = 0; v < static_cast<int>(bp.vertices.size()); ++v) {
        int m = bp.valence(v);
        patch.sector_type[v].resize(m);
        for (int s = 0; s < m; ++s) {
            const BoundaryCycle& cyc = bd.cycles[bd.corner_cycle[v][s]];
            patch.sector_type[v][s] = cyc.polarity == Polarity::outgoing ? SideType::unstable
                                                                         : SideType::stable;
        }
    }

    auto add_vertex = [&patch, &bp](int base, std::string word, int depth, int parent,
                                    int parent_slot) {
        PatchVertex pv;
        pv.base = base;
        pv.word = std::move(word);
        pv.depth = depth;
        pv.parent = parent;
        pv.parent_slot = parent_slot;
        pv.slot_edge.assign(bp.valence(base), -1);
        patch.vertices.push_back(std::move(pv));
        return static_cast<int>(patch.vertices.size()) - 1;
    };

    add_vertex(0, "", 0, -1, -1);
    std::deque<int> frontier{0};
    while (!frontier.empty()) {
        int vi = frontier.front();
        frontier.pop_front();
        int depth = patch.vertices[vi].depth;
        if (depth == radius) continue;
        int base = patch.vertices[vi].base;
        int skip = patch.vertices[vi].parent_slot;
        std::string stem = patch.vertices[vi].word;
        if (!stem.empty()) stem += ".";
        const std::vector<int>& order = bp.vertices[base].order;
        for (int s = 0; s < static_cast<int>(order.size()); ++s) {
            if (s == skip) continue;  // never backtrack: words stay reduced
            int he = order[s];
            const HalfEdge& far = bp.half_edges[bp.partner(he)];
            int child = add_vertex(far.vertex, stem + bp.half_edges[he].id, depth + 1, vi,
                                   far.slot);
            PatchEdge pe;
            pe.v[0] = vi;
            pe.v[1] = child;
            pe.slot[0] = s;
            pe.slot[1] = far.slot;
            pe.base_edge = bp.half_edges[he].edge;
            patch.edges.push_back(pe);
            int ei = static_cast<int>(patch.edges.size()) - 1;
            patch.vertices[vi].slot_edge[s] = ei;
            patch.vertices[child].slot_edge[far.slot] = ei;
            frontier.push_back(child);
        }
    }
    return patch;
}

std::string export_fat_tree(const FatTreePatch& patch) {
    std::ostringstream out;
    out << "fat tree ball: radius " << patch.radius << ", " << patch.vertices.size()
        << " vertices, " << patch.edges.size() << " edges\n";
    for (size_t i = 0; i < patch.vertices.size(); ++i) {
        const PatchVertex& pv = patch.vertices[i];
        out << "vertex " << i << ": base " << patch.bp.vertices[pv.base].id << " word \""
            << pv.word << "\" order [";
        for (size_t s = 0; s < pv.slot_edge.size(); ++s) {
            if (s) out << ' ';
            if (pv.slot_edge[s] < 0)
                out << '-';
            else
                out << pv.slot_edge[s];
        }
        out << "] sectors [";
        for (size_t s = 0; s < pv.slot_edge.size(); ++s) {
            if (s) out << ' ';
            out << to_string(patch.sector_type[pv.base][s]);
        }
        out << "]\n";
    }
    for (size_t i = 0; i < patch.edges.size(); ++i) {
        const PatchEdge& pe = patch.edges[i];
        out << "edge " << i << ": " << pe.v[0] << " -- " << pe.v[1] << " base "
            << patch.bp.edges[pe.base_edge].id << " slots " << pe.slot[0] << "," << pe.slot[1]
            << "\n";
    }
    return out.str();
}

LozengeChain chain_along_path(const FatTreePatch& patch, const std::vector<int>& path) {
    if (path.size() < 2) throw LozengeError("path must visit at least two vertices");
    for (int pv : path)
        if (pv < 0 || pv >= static_cast<int>(patch.vertices.size()))
            throw LozengeError("path vertex " + std::to_string(pv) + " is outside the patch");
    std::vector<int> sorted = path;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw LozengeError("path revisits a vertex; only simple paths define chains");

    // locate the patch edge joining each consecutive pair
    std::vector<int> step_edge(path.size() - 1, -1);
    for (size_t i = 0; i + 1 < path.size(); ++i) {
        for (int e : patch.vertices[path[i]].slot_edge) {
            if (e >= 0 && other_end(patch.edges[e], path[i]) == path[i + 1]) {
                step_edge[i] = e;
                break;
            }
        }
        if (step_edge[i] < 0)
            throw LozengeError("vertices " + std::to_string(path[i]) + " and " +
                               std::to_string(path[i + 1]) + " are not joined by a patch edge");
    }

    LozengeChain chain;
    for (size_t i = 0; i + 1 < path.size(); ++i) {
        Lozenge lz;
        lz.corner1 = {path[i], patch.prongs(path[i])};
        lz.corner2 = {path[i + 1], patch.prongs(path[i + 1])};
        if (i > 0) {
            int w = path[i];
            int m = patch.bp.valence(patch.vertices[w].base);
            int a = slot_at(patch, step_edge[i - 1], w);
            int b = slot_at(patch, step_edge[i], w);
            int sector = -1;
            if ((a + 1) % m == b)
                sector = a;
            else if ((b + 1) % m == a)
                sector = b;
            if (sector >= 0) {
                lz.adjacent_to_previous = true;
                lz.shared = patch.sector_type[patch.vertices[w].base][sector];
            }
        }
        chain.lozenges.push_back(lz);
    }
    return chain;
}

bool is_string(const LozengeChain& chain) {
    if (chain.lozenges.empty()) return false;
    for (const Lozenge& lz : chain.lozenges) {
        if (lz.corner1.p != 2 || lz.corner2.p != 2) return false;
        if (lz.adjacent_to_previous) return false;
    }
    return true;
}

ScallopClass is_scalloped(const LozengeChain& chain) {
    if (chain.lozenges.size() < 2) return ScallopClass::neither;
    SideType shared = chain.lozenges[1].shared;
    for (size_t i = 1; i < chain.lozenges.size(); ++i) {
        const Lozenge& lz = chain.lozenges[i];
        if (!lz.adjacent_to_previous || lz.shared != shared) return ScallopClass::neither;
    }
    if (shared == SideType::unstable) return ScallopClass::s_scalloped;
    if (shared == SideType::stable) return ScallopClass::u_scalloped;
    return ScallopClass::neither;
}

}  // namespace paflow
