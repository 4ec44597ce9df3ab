#include "paflow/nhtree.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

namespace paflow {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> toks;
    std::string t;
    while (in >> t) toks.push_back(t);
    return toks;
}

std::string strip_colon(const std::string& tok, int line) {
    if (tok.size() < 2 || tok.back() != ':')
        throw TreeError("line " + std::to_string(line) + ": expected '<name>:' but got '" + tok +
                        "'");
    return tok.substr(0, tok.size() - 1);
}

// "x" -> (x, 0), "x+2" -> (x, 2), "x-1" -> (x, -1).
std::pair<std::string, long long> split_ref(const std::string& tok, int line) {
    auto pos = tok.find_first_of("+-");
    if (pos == std::string::npos) return {tok, 0};
    if (pos == 0 || pos + 1 == tok.size())
        throw TreeError("line " + std::to_string(line) + ": malformed point reference '" + tok +
                        "'");
    long long off = 0;
    try {
        off = std::stoll(tok.substr(pos));
    } catch (const std::exception&) {
        throw TreeError("line " + std::to_string(line) + ": malformed cell offset in '" + tok +
                        "'");
    }
    return {tok.substr(0, pos), off};
}

struct Dsu {
    std::vector<int> parent;
    explicit Dsu(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a) { return parent[a] == a ? a : parent[a] = find(parent[a]); }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

bool has_run(const std::vector<int>& seg, const std::vector<int>& pat) {
    if (pat.empty() || seg.size() < pat.size()) return false;
    for (std::size_t s = 0; s + pat.size() <= seg.size(); ++s) {
        bool ok = true;
        for (std::size_t k = 0; k < pat.size(); ++k)
            if (seg[s + k] != pat[k]) {
                ok = false;
                break;
            }
        if (ok) return true;
    }
    return false;
}

// pattern occurs as a consecutive run of some instantiated segment, in
// either direction.
bool run_in_window(const TreeWindow& w, std::vector<int> pat) {
    for (const auto& seg : w.seg_instances)
        if (has_run(seg, pat)) return true;
    std::reverse(pat.begin(), pat.end());
    for (const auto& seg : w.seg_instances)
        if (has_run(seg, pat)) return true;
    return false;
}

// Components of the window minus `removed`, using segment adjacency plus the
// witness wires whose tips both survive. comp[removed] stays -1.
std::vector<int> wired_components(const TreeWindow& w, int removed) {
    int n = static_cast<int>(w.pts.size());
    Dsu dsu(n);
    for (int p = 0; p < n; ++p) {
        if (p == removed) continue;
        for (int q : w.adj[p])
            if (q != removed) dsu.unite(p, q);
    }
    for (const auto& wire : w.wires)
        if (wire[0] != removed && wire[1] != removed) dsu.unite(wire[0], wire[1]);
    std::vector<int> comp(n, -1);
    std::map<int, int> seen;
    for (int p = 0; p < n; ++p) {
        if (p == removed) continue;
        int r = dsu.find(p);
        auto it = seen.find(r);
        if (it == seen.end()) it = seen.emplace(r, static_cast<int>(seen.size())).first;
        comp[p] = it->second;
    }
    return comp;
}

bool separates(const TreeWindow& w, int z, int x, int y) {
    if (z == x || z == y) return false;
    auto comp = wired_components(w, z);
    return comp[x] != comp[y];
}

// {x, y} together with every point separating them.
std::vector<int> block_points(const TreeWindow& w, int x, int y) {
    std::vector<int> out;
    for (int z = 0; z < static_cast<int>(w.pts.size()); ++z)
        if (z == x || z == y || separates(w, z, x, y)) out.push_back(z);
    return out;
}

void validate_window(const TreeWindow& w) {
    int n = static_cast<int>(w.pts.size());

    // Segment overlap consistency: shared points form a contiguous run in
    // both segments, traversed in the same or opposite order.
    for (std::size_t i = 0; i < w.seg_instances.size(); ++i) {
        for (std::size_t j = i + 1; j < w.seg_instances.size(); ++j) {
            const auto& s = w.seg_instances[i];
            const auto& t = w.seg_instances[j];
            std::map<int, int> pos_s;
            for (std::size_t k = 0; k < s.size(); ++k) pos_s[s[k]] = static_cast<int>(k);
            std::vector<std::array<int, 2>> shared;  // (pos in t, pos in s)
            for (std::size_t k = 0; k < t.size(); ++k) {
                auto it = pos_s.find(t[k]);
                if (it != pos_s.end()) shared.push_back({static_cast<int>(k), it->second});
            }
            if (shared.size() < 2) continue;
            bool bad = shared.back()[0] - shared.front()[0] !=
                       static_cast<int>(shared.size()) - 1;
            int lo = shared[0][1], hi = shared[0][1];
            bool inc = true, dec = true;
            for (std::size_t k = 1; k < shared.size(); ++k) {
                lo = std::min(lo, shared[k][1]);
                hi = std::max(hi, shared[k][1]);
                if (shared[k][1] <= shared[k - 1][1]) inc = false;
                if (shared[k][1] >= shared[k - 1][1]) dec = false;
            }
            if (hi - lo != static_cast<int>(shared.size()) - 1) bad = true;
            if (!inc && !dec) bad = true;
            if (bad)
                throw TreeError("segments '" + w.tree.segments[w.seg_instance_base[i]].id +
                                "' and '" + w.tree.segments[w.seg_instance_base[j]].id +
                                "' overlap inconsistently");
        }
    }

    // Arcwise connectivity.
    if (n > 1) {
        std::vector<char> seen(n, 0);
        std::queue<int> q;
        q.push(0);
        seen[0] = 1;
        int reached = 1;
        while (!q.empty()) {
            int p = q.front();
            q.pop();
            for (int r : w.adj[p])
                if (!seen[r]) {
                    seen[r] = 1;
                    ++reached;
                    q.push(r);
                }
        }
        if (reached < n) throw TreeError("presentation is not connected");
    }

    // Separation axiom, checked through germ classes: at every point the
    // adjacent points split into prong classes (witness tips at the shared
    // end of their prong count as one class); distinct classes must fall in
    // distinct components of the complement, and the witness wiring must
    // reproduce exactly one component per class.
    for (int z = 0; z < n; ++z) {
        const auto& nbrs = w.adj[z];
        if (nbrs.empty()) continue;
        std::map<int, int> slot;
        for (std::size_t k = 0; k < nbrs.size(); ++k) slot[nbrs[k]] = static_cast<int>(k);
        Dsu germ(static_cast<int>(nbrs.size()));
        for (std::size_t k = 0; k < w.wires.size(); ++k) {
            if (w.wire_merge_at[k] != z) continue;
            auto a = slot.find(w.wires[k][0]);
            auto b = slot.find(w.wires[k][1]);
            if (a == slot.end() || b == slot.end())
                throw TreeError("witness tips do not adjoin their shared prong at '" +
                                w.labels[z] + "'");
            germ.unite(a->second, b->second);
        }

        // Pure components (no wires) of the complement.
        std::vector<int> comp(n, -1);
        int ncomp = 0;
        for (int start = 0; start < n; ++start) {
            if (start == z || comp[start] >= 0) continue;
            std::queue<int> q;
            q.push(start);
            comp[start] = ncomp;
            while (!q.empty()) {
                int p = q.front();
                q.pop();
                for (int r : w.adj[p])
                    if (r != z && comp[r] < 0) {
                        comp[r] = ncomp;
                        q.push(r);
                    }
            }
            ++ncomp;
        }
        std::map<int, int> comp_class;
        std::set<int> classes;
        for (std::size_t k = 0; k < nbrs.size(); ++k) {
            int cls = germ.find(static_cast<int>(k));
            classes.insert(cls);
            auto [it, fresh] = comp_class.emplace(comp[nbrs[k]], cls);
            if (!fresh && it->second != cls)
                throw TreeError("separation axiom violated at '" + w.labels[z] +
                                "': distinct prongs reconnect around it");
        }

        // Wired components of the complement must count the prongs.
        Dsu wired(ncomp);
        for (std::size_t k = 0; k < w.wires.size(); ++k) {
            int a = w.wires[k][0], b = w.wires[k][1];
            if (a == z || b == z) continue;
            wired.unite(comp[a], comp[b]);
        }
        std::set<int> wired_roots;
        for (int c = 0; c < ncomp; ++c) wired_roots.insert(wired.find(c));
        if (wired_roots.size() != classes.size())
            throw TreeError("prong structure inconsistent at '" + w.labels[z] +
                            "': witness wiring disagrees with the prong classes");
    }
}

}  // namespace

int NHTree::point_index(const std::string& id) const {
    for (std::size_t i = 0; i < points.size(); ++i)
        if (points[i] == id) return static_cast<int>(i);
    return -1;
}

int TreeWindow::index_of(const PointRef& p) const {
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (pts[i] == p) return static_cast<int>(i);
    return -1;
}

int TreeWindow::find(const std::string& label) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == label) return static_cast<int>(i);
    return -1;
}

NHTree parse_tree(const std::string& text) {
    NHTree tree;
    std::map<std::string, int> point_ix, seg_ix;
    bool saw_offsets = false;

    struct RawWitness {
        int line;
        std::vector<std::string> toks;
    };
    std::vector<RawWitness> witness_lines;
    std::vector<std::pair<int, std::vector<std::string>>> shift_lines;

    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto parse_ref = [&](const std::string& tok, int ln) {
        auto [id, off] = split_ref(tok, ln);
        auto it = point_ix.find(id);
        if (it == point_ix.end())
            throw TreeError("line " + std::to_string(ln) + ": undefined point '" + id + "'");
        if (off != 0) saw_offsets = true;
        return PointRef{it->second, off};
    };

    std::vector<std::pair<int, std::vector<std::string>>> seg_lines;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
        auto toks = tokenize(line);
        if (toks.empty()) continue;
        if (toks[0] == "point") {
            if (toks.size() != 2)
                throw TreeError("line " + std::to_string(lineno) + ": point line needs one id");
            if (point_ix.count(toks[1]))
                throw TreeError("line " + std::to_string(lineno) + ": duplicate point '" +
                                toks[1] + "'");
            point_ix[toks[1]] = static_cast<int>(tree.points.size());
            tree.points.push_back(toks[1]);
        } else if (toks[0] == "segment") {
            seg_lines.emplace_back(lineno, toks);
        } else if (toks[0] == "nonsep") {
            witness_lines.push_back({lineno, toks});
        } else if (toks[0] == "periodic") {
            shift_lines.emplace_back(lineno, toks);
        } else {
            throw TreeError("line " + std::to_string(lineno) + ": unknown directive '" + toks[0] +
                            "'");
        }
    }

    for (const auto& [ln, toks] : seg_lines) {
        if (toks.size() < 4)
            throw TreeError("line " + std::to_string(ln) +
                            ": segment line needs a name and at least two points");
        TreeSegment seg;
        seg.id = strip_colon(toks[1], ln);
        if (seg_ix.count(seg.id))
            throw TreeError("line " + std::to_string(ln) + ": duplicate segment '" + seg.id + "'");
        for (std::size_t i = 2; i < toks.size(); ++i) {
            PointRef r = parse_ref(toks[i], ln);
            for (const auto& prev : seg.points)
                if (prev == r)
                    throw TreeError("line " + std::to_string(ln) + ": repeated point '" + toks[i] +
                                    "' in segment '" + seg.id + "'");
            seg.points.push_back(r);
        }
        seg_ix[seg.id] = static_cast<int>(tree.segments.size());
        tree.segments.push_back(std::move(seg));
    }

    for (const auto& [ln, toks] : witness_lines) {
        if (toks.size() != 5 || toks[3] != "via")
            throw TreeError("line " + std::to_string(ln) +
                            ": expected 'nonsep <a> <b> via <segment>'");
        NonsepWitness wit;
        wit.a = parse_ref(toks[1], ln);
        wit.b = parse_ref(toks[2], ln);
        if (wit.a == wit.b)
            throw TreeError("line " + std::to_string(ln) + ": witness tips must be distinct");
        auto it = seg_ix.find(toks[4]);
        if (it == seg_ix.end())
            throw TreeError("line " + std::to_string(ln) + ": undefined segment '" + toks[4] +
                            "'");
        wit.via_segment = it->second;
        for (const auto& p : tree.segments[wit.via_segment].points)
            if (p == wit.a || p == wit.b)
                throw TreeError("line " + std::to_string(ln) +
                                ": witness tip lies on the shared prong itself");
        tree.witnesses.push_back(wit);
    }

    for (const auto& [ln, toks] : shift_lines) {
        if (tree.periodic)
            throw TreeError("line " + std::to_string(ln) + ": duplicate periodic directive");
        if (toks.size() < 3 || toks[1] != "shift:")
            throw TreeError("line " + std::to_string(ln) +
                            ": expected 'periodic shift: <a>><b>+1 ...'");
        tree.periodic = true;
        tree.shift_map.assign(tree.points.size(), -1);
        for (std::size_t i = 2; i < toks.size(); ++i) {
            auto gt = toks[i].find('>');
            if (gt == std::string::npos || gt == 0 || gt + 1 >= toks[i].size())
                throw TreeError("line " + std::to_string(ln) + ": malformed map entry '" +
                                toks[i] + "'");
            std::string src = toks[i].substr(0, gt);
            auto [dst, off] = split_ref(toks[i].substr(gt + 1), ln);
            auto sit = point_ix.find(src), dit = point_ix.find(dst);
            if (sit == point_ix.end() || dit == point_ix.end())
                throw TreeError("line " + std::to_string(ln) + ": undefined point in '" +
                                toks[i] + "'");
            if (off != 1)
                throw TreeError("line " + std::to_string(ln) +
                                ": the shift must advance every point one cell");
            if (tree.shift_map[sit->second] >= 0)
                throw TreeError("line " + std::to_string(ln) + ": point '" + src +
                                "' mapped twice");
            tree.shift_map[sit->second] = dit->second;
        }
        std::vector<char> hit(tree.points.size(), 0);
        for (std::size_t p = 0; p < tree.points.size(); ++p) {
            if (tree.shift_map[p] < 0)
                throw TreeError("line " + std::to_string(ln) + ": point '" + tree.points[p] +
                                "' missing from the shift map");
            hit[tree.shift_map[p]] = 1;
        }
        for (std::size_t p = 0; p < tree.points.size(); ++p)
            if (!hit[p])
                throw TreeError("line " + std::to_string(ln) + ": shift map is not a bijection");
    }

    if (saw_offsets && !tree.periodic)
        throw TreeError("cell offsets need a 'periodic shift' directive");
    if (tree.points.empty()) throw TreeError("presentation declares no points");

    // Mandatory validation; the window radius covers every cross-cell
    // reference with slack so each local configuration appears in full.
    long long maxoff = 0;
    for (const auto& seg : tree.segments)
        for (const auto& r : seg.points) maxoff = std::max(maxoff, std::llabs(r.cell));
    for (const auto& wit : tree.witnesses) {
        maxoff = std::max(maxoff, std::llabs(wit.a.cell));
        maxoff = std::max(maxoff, std::llabs(wit.b.cell));
    }
    TreeWindow probe = make_window(tree, tree.periodic ? maxoff + 2 : 0);

    if (tree.periodic) {
        TreeAutomorphism shift{tree.shift_map, 1};
        validate_automorphism(probe, shift);
    }
    return tree;
}

TreeWindow make_window(const NHTree& tree, long long radius) {
    if (radius < 0) throw TreeError("window radius must be non-negative");
    if (!tree.periodic) radius = 0;
    TreeWindow w;
    w.tree = tree;
    w.radius = radius;

    int nbase = static_cast<int>(tree.points.size());
    long long cells = 2 * radius + 1;
    auto raw_index = [&](int base, long long cell) -> long long {
        if (cell < -radius || cell > radius) return -1;
        return (cell + radius) * nbase + base;
    };

    std::vector<std::vector<long long>> raw_segs;
    std::vector<int> raw_seg_base;
    for (long long cell = -radius; cell <= radius; ++cell) {
        for (std::size_t s = 0; s < tree.segments.size(); ++s) {
            std::vector<long long> inst;
            bool ok = true;
            for (const auto& r : tree.segments[s].points) {
                long long ix = raw_index(r.base, cell + r.cell);
                if (ix < 0) {
                    ok = false;
                    break;
                }
                inst.push_back(ix);
            }
            if (ok) {
                raw_segs.push_back(std::move(inst));
                raw_seg_base.push_back(static_cast<int>(s));
            }
        }
    }

    // Periodic boundary cells can leave points with no incident segment;
    // those are unrolling artifacts, not tree points, so drop them.
    std::vector<char> used(static_cast<std::size_t>(cells) * nbase, 0);
    for (const auto& seg : raw_segs)
        for (long long ix : seg) used[ix] = 1;
    if (!tree.periodic)
        std::fill(used.begin(), used.end(), 1);

    std::vector<int> remap(used.size(), -1);
    for (std::size_t ix = 0; ix < used.size(); ++ix) {
        if (!used[ix]) continue;
        int base = static_cast<int>(ix % nbase);
        long long cell = static_cast<long long>(ix / nbase) - radius;
        remap[ix] = static_cast<int>(w.pts.size());
        w.pts.push_back({base, cell});
        w.labels.push_back(tree.periodic ? tree.points[base] + "@" + std::to_string(cell)
                                         : tree.points[base]);
    }

    w.adj.assign(w.pts.size(), {});
    std::set<std::array<int, 2>> edges;
    for (std::size_t s = 0; s < raw_segs.size(); ++s) {
        std::vector<int> inst;
        for (long long ix : raw_segs[s]) inst.push_back(remap[ix]);
        for (std::size_t k = 1; k < inst.size(); ++k) {
            std::array<int, 2> e{std::min(inst[k - 1], inst[k]), std::max(inst[k - 1], inst[k])};
            if (edges.insert(e).second) {
                w.adj[e[0]].push_back(e[1]);
                w.adj[e[1]].push_back(e[0]);
            }
        }
        w.seg_instances.push_back(std::move(inst));
        w.seg_instance_base.push_back(raw_seg_base[s]);
    }

    for (long long cell = -radius; cell <= radius; ++cell) {
        for (std::size_t k = 0; k < tree.witnesses.size(); ++k) {
            const auto& wit = tree.witnesses[k];
            long long a_raw = raw_index(wit.a.base, cell + wit.a.cell);
            long long b_raw = raw_index(wit.b.base, cell + wit.b.cell);
            if (a_raw < 0 || b_raw < 0) continue;
            std::vector<int> sigma;
            bool ok = true;
            for (const auto& r : tree.segments[wit.via_segment].points) {
                long long ix = raw_index(r.base, cell + r.cell);
                if (ix < 0 || remap[ix] < 0) {
                    ok = false;
                    break;
                }
                sigma.push_back(remap[ix]);
            }
            if (!ok || remap[a_raw] < 0 || remap[b_raw] < 0) continue;
            int a = remap[a_raw], b = remap[b_raw];

            // Both tips must close off the same end of the shared prong.
            auto adjoins = [&](int tip, bool back) {
                std::vector<int> pat = sigma;
                if (!back) std::reverse(pat.begin(), pat.end());
                pat.push_back(tip);
                return run_in_window(w, pat);
            };
            int merge_at = -1;
            if (adjoins(a, true) && adjoins(b, true))
                merge_at = sigma.back();
            else if (adjoins(a, false) && adjoins(b, false))
                merge_at = sigma.front();
            else
                throw TreeError("witness for '" + w.labels[a] + "' ~ '" + w.labels[b] +
                                "' does not exhibit a shared prong via segment '" +
                                tree.segments[wit.via_segment].id + "'");
            w.wires.push_back({a, b});
            w.wire_merge_at.push_back(merge_at);
        }
    }

    validate_window(w);
    return w;
}

ComponentsResult components_minus_point(const TreeWindow& w, int point) {
    if (point < 0 || point >= static_cast<int>(w.pts.size()))
        throw TreeError("point index out of range");
    auto comp = wired_components(w, point);
    int ncomp = 0;
    for (int c : comp) ncomp = std::max(ncomp, c + 1);
    ComponentsResult res;
    res.components.assign(ncomp, {});
    for (int p = 0; p < static_cast<int>(comp.size()); ++p)
        if (comp[p] >= 0) res.components[comp[p]].push_back(p);
    res.prongs = ncomp;
    return res;
}

BlockResult block(const TreeWindow& w, int x, int y) {
    int n = static_cast<int>(w.pts.size());
    if (x < 0 || x >= n || y < 0 || y >= n) throw TreeError("point index out of range");
    BlockResult res;
    if (x == y) {
        res.segments.push_back({x});
        res.d = 0;
        return res;
    }
    std::vector<int> pts = block_points(w, x, y);

    // Arc order: |[x, z]| grows strictly along the block, so rank by the
    // number of block points separating x from z.
    std::vector<std::pair<int, int>> ranked;
    for (int z : pts) {
        int rank = 0;
        for (int v : pts)
            if (v == x || v == z || separates(w, v, x, z)) ++rank;
        ranked.emplace_back(rank, z);
    }
    std::sort(ranked.begin(), ranked.end());
    for (std::size_t k = 1; k < ranked.size(); ++k)
        if (ranked[k].first == ranked[k - 1].first)
            throw TreeError("block points of '" + w.labels[x] + "' and '" + w.labels[y] +
                            "' do not fall on a single arc");

    std::set<std::array<int, 2>> edges;
    for (int p = 0; p < n; ++p)
        for (int q : w.adj[p]) edges.insert({std::min(p, q), std::max(p, q)});
    std::vector<int> run{ranked[0].second};
    for (std::size_t k = 1; k < ranked.size(); ++k) {
        int prev = ranked[k - 1].second, cur = ranked[k].second;
        if (edges.count({std::min(prev, cur), std::max(prev, cur)})) {
            run.push_back(cur);
        } else {
            res.segments.push_back(run);
            run = {cur};
        }
    }
    res.segments.push_back(run);
    res.d = static_cast<int>(res.segments.size()) - 1;
    return res;
}

TreeAutomorphism parse_automorphism(const std::string& text, const NHTree& tree) {
    TreeAutomorphism g;
    g.base_map.assign(tree.points.size(), -1);
    bool saw_offset = false;

    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
        auto toks = tokenize(line);
        if (toks.empty()) continue;
        if (toks[0] == "offset") {
            if (toks.size() != 2)
                throw TreeError("line " + std::to_string(lineno) + ": expected 'offset <n>'");
            if (saw_offset)
                throw TreeError("line " + std::to_string(lineno) + ": duplicate offset");
            try {
                g.offset = std::stoll(toks[1]);
            } catch (const std::exception&) {
                throw TreeError("line " + std::to_string(lineno) + ": malformed offset '" +
                                toks[1] + "'");
            }
            saw_offset = true;
        } else if (toks[0] == "map") {
            std::string body;
            for (std::size_t i = 1; i < toks.size(); ++i) body += toks[i];
            auto gt = body.find('>');
            if (gt == std::string::npos || gt == 0 || gt + 1 >= body.size())
                throw TreeError("line " + std::to_string(lineno) +
                                ": expected 'map <a> > <b>'");
            int src = tree.point_index(body.substr(0, gt));
            int dst = tree.point_index(body.substr(gt + 1));
            if (src < 0 || dst < 0)
                throw TreeError("line " + std::to_string(lineno) + ": undefined point in '" +
                                body + "'");
            if (g.base_map[src] >= 0)
                throw TreeError("line " + std::to_string(lineno) + ": point '" +
                                tree.points[src] + "' mapped twice");
            g.base_map[src] = dst;
        } else {
            throw TreeError("line " + std::to_string(lineno) + ": unknown directive '" + toks[0] +
                            "'");
        }
    }

    std::vector<char> hit(tree.points.size(), 0);
    for (std::size_t p = 0; p < tree.points.size(); ++p) {
        if (g.base_map[p] < 0)
            throw TreeError("point '" + tree.points[p] + "' missing from the map");
        hit[g.base_map[p]] = 1;
    }
    for (std::size_t p = 0; p < tree.points.size(); ++p)
        if (!hit[p]) throw TreeError("map is not a bijection");
    if (!tree.periodic && g.offset != 0)
        throw TreeError("offset must be 0 on an aperiodic presentation");
    return g;
}

TreeAutomorphism inverse(const TreeAutomorphism& g) {
    TreeAutomorphism inv;
    inv.base_map.assign(g.base_map.size(), -1);
    for (std::size_t p = 0; p < g.base_map.size(); ++p)
        inv.base_map[g.base_map[p]] = static_cast<int>(p);
    inv.offset = -g.offset;
    return inv;
}

int apply(const TreeWindow& w, const TreeAutomorphism& g, int point, int power) {
    if (point < 0 || point >= static_cast<int>(w.pts.size()))
        throw TreeError("point index out of range");
    TreeAutomorphism step = power >= 0 ? g : inverse(g);
    int reps = std::abs(power);
    PointRef ref = w.pts[point];
    for (int k = 0; k < reps; ++k) {
        ref.base = step.base_map[ref.base];
        ref.cell += step.offset;
    }
    return w.index_of(ref);
}

void validate_automorphism(const TreeWindow& w, const TreeAutomorphism& g) {
    if (g.base_map.size() != w.tree.points.size())
        throw TreeError("map size does not match the presentation");

    std::set<std::vector<int>> seg_set;
    for (const auto& seg : w.seg_instances) {
        seg_set.insert(seg);
        std::vector<int> rev(seg.rbegin(), seg.rend());
        seg_set.insert(rev);
    }
    for (const auto& seg : w.seg_instances) {
        std::vector<int> img;
        bool inside = true;
        for (int p : seg) {
            int q = apply(w, g, p);
            if (q < 0) {
                inside = false;
                break;
            }
            img.push_back(q);
        }
        if (inside && !seg_set.count(img))
            throw TreeError("map does not carry segments to segments");
    }

    std::set<std::array<int, 2>> wire_set;
    for (const auto& wire : w.wires) {
        wire_set.insert({std::min(wire[0], wire[1]), std::max(wire[0], wire[1])});
    }
    for (const auto& wire : w.wires) {
        int a = apply(w, g, wire[0]);
        int b = apply(w, g, wire[1]);
        if (a < 0 || b < 0) continue;
        if (!wire_set.count({std::min(a, b), std::max(a, b)}))
            throw TreeError("map does not preserve the non-separation witnesses");
    }
}

FixSets fix_sets(const TreeWindow& w, const TreeAutomorphism& g) {
    FixSets res;
    std::set<std::array<int, 2>> wire_set;
    for (const auto& wire : w.wires)
        wire_set.insert({std::min(wire[0], wire[1]), std::max(wire[0], wire[1])});
    for (int p = 0; p < static_cast<int>(w.pts.size()); ++p) {
        int q = apply(w, g, p);
        if (q < 0) continue;
        if (q == p) {
            res.fix.push_back(p);
            res.fix_approx.push_back(p);
        } else if (wire_set.count({std::min(p, q), std::max(p, q)})) {
            res.fix_approx.push_back(p);
        }
    }
    return res;
}

AxisResult axis(const TreeWindow& w, const TreeAutomorphism& g) {
    int n = static_cast<int>(w.pts.size());
    for (int p = 0; p < n; ++p)
        if (apply(w, g, p) == p)
            throw TreeError("axis needs a fixed-point-free map, but '" + w.labels[p] +
                            "' is fixed");

    auto member = [&](const TreeAutomorphism& h, int p, int& decidable) -> bool {
        int q1 = apply(w, h, p, 1);
        int q2 = apply(w, h, p, 2);
        if (q1 < 0 || q2 < 0) {
            decidable = 0;
            return false;
        }
        decidable = 1;
        if (q1 == p || q1 == q2) return true;
        if (p == q2) return false;  // block [p, p] is just p itself
        return separates(w, q1, p, q2);
    };

    AxisResult res;
    std::vector<int> in_axis(n, 0), decidable(n, 0);
    for (int p = 0; p < n; ++p) {
        in_axis[p] = member(g, p, decidable[p]) ? 1 : 0;
        if (!decidable[p])
            res.undecidable.push_back(p);
        else if (in_axis[p])
            res.points.push_back(p);
    }
    res.inconclusive = res.points.empty() && !res.undecidable.empty();

    TreeAutomorphism ginv = inverse(g);
    res.matches_inverse = true;
    for (int p = 0; p < n; ++p) {
        int dec_inv = 0;
        bool inv_member = member(ginv, p, dec_inv);
        if (decidable[p] && dec_inv && in_axis[p] != (inv_member ? 1 : 0))
            res.matches_inverse = false;
    }

    res.gamma_invariant = true;
    for (int p : res.points) {
        int q = apply(w, g, p);
        if (q >= 0 && decidable[q] && !in_axis[q]) res.gamma_invariant = false;
    }

    res.union_formula_ok = true;
    for (int p : res.points) {
        for (int i = -2; i <= 1; ++i) {
            int u = apply(w, g, p, i);
            int v = apply(w, g, p, i + 1);
            if (u < 0 || v < 0) continue;
            for (int z : block_points(w, u, v))
                if (decidable[z] && !in_axis[z]) res.union_formula_ok = false;
        }
    }
    return res;
}

}  // namespace paflow
