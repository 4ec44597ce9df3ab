#include "paflow/blueprint.hpp"

#include <algorithm>
#include <cassert>
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

// "v0:" -> "v0"; the colon after the name is mandatory.
std::string strip_colon(const std::string& tok, int line) {
    if (tok.size() < 2 || tok.back() != ':')
        throw ParseError(line, "expected '<name>:' but got '" + tok + "'");
    return tok.substr(0, tok.size() - 1);
}

}  // namespace

FatGraphBlueprint parse_blueprint(const std::string& text) {
    FatGraphBlueprint bp;
    std::map<std::string, int> vertex_ix, edge_ix, he_ix;
    std::vector<int> he_decl_line;

    struct RawLine {
        int number;
        std::vector<std::string> toks;
    };
    std::vector<RawLine> vertex_lines, edge_lines, polarity_lines;

    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
        auto toks = tokenize(line);
        if (toks.empty()) continue;
        if (toks[0] == "vertex")
            vertex_lines.push_back({lineno, toks});
        else if (toks[0] == "edge")
            edge_lines.push_back({lineno, toks});
        else if (toks[0] == "polarity")
            polarity_lines.push_back({lineno, toks});
        else
            throw ParseError(lineno, "unknown directive '" + toks[0] + "'");
    }

    // Pass 1: vertices declare the half-edges via their cyclic orders.
    for (const auto& [ln, toks] : vertex_lines) {
        if (toks.size() < 2) throw ParseError(ln, "vertex line needs a name");
        std::string name = strip_colon(toks[1], ln);
        if (vertex_ix.count(name)) throw ParseError(ln, "duplicate vertex '" + name + "'");
        int v = static_cast<int>(bp.vertices.size());
        vertex_ix[name] = v;
        FatVertex vert;
        vert.id = name;
        for (std::size_t i = 2; i < toks.size(); ++i) {
            const std::string& h = toks[i];
            if (he_ix.count(h))
                throw ParseError(ln, "half-edge '" + h + "' already used at vertex '" +
                                         bp.vertices[bp.half_edges[he_ix[h]].vertex].id + "'");
            int hid = static_cast<int>(bp.half_edges.size());
            he_ix[h] = hid;
            he_decl_line.push_back(ln);
            HalfEdge he;
            he.id = h;
            he.vertex = v;
            he.slot = static_cast<int>(vert.order.size());
            bp.half_edges.push_back(he);
            vert.order.push_back(hid);
        }
        if (vert.order.size() < 2)
            throw ParseError(ln, "vertex '" + name + "' has valence " +
                                     std::to_string(vert.order.size()) + " (minimum is 2)");
        bp.vertices.push_back(std::move(vert));
    }

    // Pass 2: edges pair declared half-edges.
    for (const auto& [ln, toks] : edge_lines) {
        if (toks.size() < 4) throw ParseError(ln, "edge line needs a name and two half-edges");
        std::string name = strip_colon(toks[1], ln);
        if (edge_ix.count(name)) throw ParseError(ln, "duplicate edge '" + name + "'");
        FatEdge e;
        e.id = name;
        for (int k = 0; k < 2; ++k) {
            const std::string& h = toks[2 + k];
            auto it = he_ix.find(h);
            if (it == he_ix.end())
                throw ParseError(ln, "undefined half-edge '" + h + "'");
            e.he[k] = it->second;
        }
        if (e.he[0] == e.he[1])
            throw ParseError(ln, "edge '" + name + "' pairs half-edge '" + toks[2] +
                                     "' with itself");
        if (toks.size() > 4) {
            if (toks.size() == 5 && toks[4] == "twist")
                e.twist = true;
            else
                throw ParseError(ln, "trailing tokens on edge line (only 'twist' is allowed)");
        }
        int eid = static_cast<int>(bp.edges.size());
        edge_ix[name] = eid;
        for (int k = 0; k < 2; ++k) {
            HalfEdge& he = bp.half_edges[e.he[k]];
            if (he.edge >= 0)
                throw ParseError(ln, "half-edge '" + he.id + "' already paired by edge '" +
                                         bp.edges[he.edge].id + "'");
            he.edge = eid;
            he.end = k;
        }
        bp.edges.push_back(e);
    }

    for (std::size_t h = 0; h < bp.half_edges.size(); ++h)
        if (bp.half_edges[h].edge < 0)
            throw ParseError(he_decl_line[h],
                             "dangling half-edge '" + bp.half_edges[h].id + "' (never paired)");

    for (const auto& [ln, toks] : polarity_lines) {
        if (toks.size() != 3) throw ParseError(ln, "polarity line needs '<index>: incoming|outgoing'");
        std::string ix = strip_colon(toks[1], ln);
        int cyc = -1;
        try {
            cyc = std::stoi(ix);
        } catch (...) {
            throw ParseError(ln, "polarity index '" + ix + "' is not an integer");
        }
        if (cyc < 0) throw ParseError(ln, "polarity index must be non-negative");
        Polarity p;
        if (toks[2] == "incoming")
            p = Polarity::incoming;
        else if (toks[2] == "outgoing")
            p = Polarity::outgoing;
        else
            throw ParseError(ln, "polarity must be 'incoming' or 'outgoing'");
        for (auto& [c, q] : bp.polarity_directives)
            if (c == cyc) throw ParseError(ln, "duplicate polarity for cycle " + ix);
        bp.polarity_directives.emplace_back(cyc, p);
    }

    return bp;
}

namespace {

// Boundary tracing walks states (half-edge h, flank s): "moving away from
// vertex(h) along ribbon flank s of h", with flank 0 = left, 1 = right as
// seen from the vertex looking outward along h. Crossing the edge lands on
// the inward flank t at the partner; an untwisted ribbon swaps the flank
// label (left seen from one end is right from the other), a twisted one
// keeps it. Arrivals on the left flank continue counterclockwise around the
// vertex (next slot), arrivals on the right continue clockwise.
struct State {
    int he;
    int flank;
};

struct Transition {
    State next;
    int corner_vertex;
    int corner_sector;
};

Transition advance(const FatGraphBlueprint& bp, State st) {
    const FatEdge& e = bp.edges[bp.half_edges[st.he].edge];
    int h2 = bp.partner(st.he);
    int t = e.twist ? st.flank : 1 - st.flank;
    const HalfEdge& arr = bp.half_edges[h2];
    int val = bp.valence(arr.vertex);
    Transition tr;
    tr.corner_vertex = arr.vertex;
    if (t == 0) {  // left arrival: corner between h2 and its ccw successor
        tr.corner_sector = arr.slot;
        tr.next = {bp.next_at_vertex(h2, +1), 1};
    } else {  // right arrival: corner between the cw predecessor and h2
        tr.corner_sector = (arr.slot + val - 1) % val;
        tr.next = {bp.next_at_vertex(h2, -1), 0};
    }
    return tr;
}

State reverse_state(const FatGraphBlueprint& bp, State st) {
    const FatEdge& e = bp.edges[bp.half_edges[st.he].edge];
    return {bp.partner(st.he), e.twist ? st.flank : 1 - st.flank};
}

CycleStep arc_of(const FatGraphBlueprint& bp, State st) {
    const HalfEdge& he = bp.half_edges[st.he];
    const FatEdge& e = bp.edges[he.edge];
    CycleStep cs;
    cs.edge = he.edge;
    cs.dir = he.end == 0 ? +1 : -1;
    if (he.end == 0)
        cs.side = st.flank;
    else
        cs.side = e.twist ? st.flank : 1 - st.flank;
    cs.corner_vertex = -1;
    cs.corner_sector = -1;
    return cs;
}

}  // namespace

BoundaryData trace_boundary_cycles(const FatGraphBlueprint& bp) {
    const int nhe = static_cast<int>(bp.half_edges.size());
    auto state_key = [](State s) { return s.he * 2 + s.flank; };

    std::vector<int> orbit_of(2 * nhe, -1);
    std::vector<std::vector<State>> orbits;
    for (int h = 0; h < nhe; ++h) {
        for (int f = 0; f < 2; ++f) {
            State st{h, f};
            if (orbit_of[state_key(st)] >= 0) continue;
            int id = static_cast<int>(orbits.size());
            std::vector<State> orbit;
            State cur = st;
            do {
                orbit_of[state_key(cur)] = id;
                orbit.push_back(cur);
                cur = advance(bp, cur).next;
            } while (!(cur.he == st.he && cur.flank == st.flank));
            orbits.push_back(std::move(orbit));
        }
    }

    // Each boundary circle appears as two orbits (the two traversal
    // directions); keep the lexicographically smaller of each pair.
    auto cycle_of_orbit = [&](const std::vector<State>& orbit) {
        BoundaryCycle cyc;
        for (std::size_t i = 0; i < orbit.size(); ++i) {
            CycleStep cs = arc_of(bp, orbit[i]);
            // corner crossed before step i = transition out of step i-1
            const State& prev = orbit[(i + orbit.size() - 1) % orbit.size()];
            Transition tr = advance(bp, prev);
            cs.corner_vertex = tr.corner_vertex;
            cs.corner_sector = tr.corner_sector;
            cyc.steps.push_back(cs);
        }
        // rotate to start at the smallest (edge id, side)
        auto key = [&](const CycleStep& cs) {
            return std::make_pair(bp.edges[cs.edge].id, cs.side);
        };
        std::size_t best = 0;
        for (std::size_t i = 1; i < cyc.steps.size(); ++i)
            if (key(cyc.steps[i]) < key(cyc.steps[best])) best = i;
        std::rotate(cyc.steps.begin(), cyc.steps.begin() + best, cyc.steps.end());
        return cyc;
    };

    auto seq_key = [&](const BoundaryCycle& c) {
        std::vector<std::pair<std::string, int>> k;
        for (const auto& s : c.steps) k.emplace_back(bp.edges[s.edge].id, s.side);
        return k;
    };

    BoundaryData bd;
    std::vector<bool> done(orbits.size(), false);
    for (std::size_t i = 0; i < orbits.size(); ++i) {
        if (done[i]) continue;
        int rev = orbit_of[state_key(reverse_state(bp, orbits[i][0]))];
        assert(rev >= 0 && !done[rev] && static_cast<std::size_t>(rev) != i);
        done[i] = done[rev] = true;
        BoundaryCycle a = cycle_of_orbit(orbits[i]);
        BoundaryCycle b = cycle_of_orbit(orbits[rev]);
        bd.cycles.push_back(seq_key(a) <= seq_key(b) ? std::move(a) : std::move(b));
    }
    std::sort(bd.cycles.begin(), bd.cycles.end(),
              [&](const BoundaryCycle& a, const BoundaryCycle& b) {
                  return seq_key(a) < seq_key(b);
              });

    bd.side_cycle.assign(bp.edges.size() * 2, -1);
    bd.side_pos.assign(bp.edges.size() * 2, -1);
    bd.corner_cycle.resize(bp.vertices.size());
    for (std::size_t v = 0; v < bp.vertices.size(); ++v)
        bd.corner_cycle[v].assign(bp.vertices[v].order.size(), -1);
    for (std::size_t c = 0; c < bd.cycles.size(); ++c) {
        const auto& cyc = bd.cycles[c];
        for (std::size_t i = 0; i < cyc.steps.size(); ++i) {
            const CycleStep& cs = cyc.steps[i];
            int sk = cs.edge * 2 + cs.side;
            assert(bd.side_cycle[sk] == -1);
            bd.side_cycle[sk] = static_cast<int>(c);
            bd.side_pos[sk] = static_cast<int>(i);
            assert(bd.corner_cycle[cs.corner_vertex][cs.corner_sector] == -1);
            bd.corner_cycle[cs.corner_vertex][cs.corner_sector] = static_cast<int>(c);
        }
    }
    return bd;
}

bool derive_polarity(const FatGraphBlueprint& bp, BoundaryData& bd) {
    const int n = static_cast<int>(bd.cycles.size());
    // side-adjacency: one link per edge between the cycles holding its sides
    std::vector<std::vector<int>> adj(n);
    bool ok = true;
    for (std::size_t e = 0; e < bp.edges.size(); ++e) {
        int c0 = bd.side_cycle[e * 2];
        int c1 = bd.side_cycle[e * 2 + 1];
        if (c0 == c1) ok = false;  // both sides on one cycle: no coloring exists
        adj[c0].push_back(c1);
        adj[c1].push_back(c0);
    }

    std::vector<int> color(n, -1);  // 0 = incoming, 1 = outgoing
    for (int c = 0; c < n; ++c)
        if (bd.cycles[c].polarity)
            color[c] = *bd.cycles[c].polarity == Polarity::incoming ? 0 : 1;

    // component by component; seed from user labels when present, otherwise
    // make the cycle with the smallest side id (== smallest index, cycles are
    // sorted by it) incoming
    std::vector<int> comp(n, -1);
    for (int c = 0; c < n; ++c) {
        if (comp[c] >= 0) continue;
        std::vector<int> members, stack{c};
        comp[c] = c;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            members.push_back(u);
            for (int w : adj[u])
                if (comp[w] < 0) {
                    comp[w] = c;
                    stack.push_back(w);
                }
        }
        std::sort(members.begin(), members.end());
        bool seeded = false;
        for (int m : members)
            if (color[m] >= 0) seeded = true;
        if (!seeded) color[members[0]] = 0;
        // propagate (BFS); conflicts mean no consistent assignment
        std::vector<int> queue;
        for (int m : members)
            if (color[m] >= 0) queue.push_back(m);
        while (!queue.empty()) {
            int u = queue.back();
            queue.pop_back();
            for (int w : adj[u]) {
                if (color[w] < 0) {
                    color[w] = 1 - color[u];
                    queue.push_back(w);
                } else if (color[w] == color[u]) {
                    ok = false;
                }
            }
        }
    }

    for (int c = 0; c < n; ++c)
        if (color[c] >= 0)
            bd.cycles[c].polarity = color[c] == 0 ? Polarity::incoming : Polarity::outgoing;
    for (int c = 0; c < n; ++c)
        if (!bd.cycles[c].polarity) ok = false;
    return ok;
}

ConditionReport validate_conditions(const FatGraphBlueprint& bp, const BoundaryData& bd) {
    ConditionReport rep;
    rep.condition1 = true;
    for (std::size_t v = 0; v < bp.vertices.size(); ++v) {
        if (bp.valence(static_cast<int>(v)) % 2 != 0) {
            rep.condition1 = false;
            rep.violations.push_back("condition (I): vertex '" + bp.vertices[v].id +
                                     "' has odd valence " +
                                     std::to_string(bp.valence(static_cast<int>(v))));
        }
    }

    // does any valid 2-coloring exist, independent of the given assignment?
    {
        BoundaryData scratch = bd;
        for (auto& c : scratch.cycles) c.polarity.reset();
        rep.polarity_assignable = derive_polarity(bp, scratch);
        if (!rep.polarity_assignable)
            rep.violations.push_back(
                "condition (II): no incoming/outgoing partition separates the sides of every "
                "edge");
    }

    rep.condition2 = true;
    for (std::size_t e = 0; e < bp.edges.size(); ++e) {
        int c0 = bd.side_cycle[e * 2];
        int c1 = bd.side_cycle[e * 2 + 1];
        auto p0 = bd.cycles[c0].polarity;
        auto p1 = bd.cycles[c1].polarity;
        if (!p0 || !p1) {
            rep.condition2 = false;
            rep.violations.push_back("condition (II): edge '" + bp.edges[e].id +
                                     "' has a side on an unlabelled cycle");
        } else if (*p0 == *p1) {
            rep.condition2 = false;
            rep.violations.push_back("condition (II): edge '" + bp.edges[e].id +
                                     "' has both sides labelled " + to_string(*p0));
        }
    }

    rep.pass = rep.condition1 && rep.condition2;
    return rep;
}

std::vector<ProngRecord> prong_census(const FatGraphBlueprint& bp) {
    std::vector<ProngRecord> out;
    for (std::size_t v = 0; v < bp.vertices.size(); ++v) {
        int val = bp.valence(static_cast<int>(v));
        if (val % 2 != 0)
            throw ParseError(0, "prong census requires even valence; vertex '" +
                                    bp.vertices[v].id + "' has valence " + std::to_string(val));
        ProngRecord r;
        r.vertex = static_cast<int>(v);
        r.p = val / 2;
        r.cls = r.p == 1   ? ProngClass::one_prong
                : r.p == 2 ? ProngClass::regular
                           : ProngClass::singular;
        out.push_back(r);
    }
    return out;
}

TracedBlueprint load_blueprint(const std::string& text) {
    TracedBlueprint tb;
    tb.bp = parse_blueprint(text);
    tb.boundary = trace_boundary_cycles(tb.bp);
    for (auto& [cyc, pol] : tb.bp.polarity_directives) {
        if (cyc >= static_cast<int>(tb.boundary.cycles.size()))
            throw ParseError(0, "polarity directive references cycle " + std::to_string(cyc) +
                                    " but only " + std::to_string(tb.boundary.cycles.size()) +
                                    " cycles exist");
        tb.boundary.cycles[cyc].polarity = pol;
    }
    derive_polarity(tb.bp, tb.boundary);
    return tb;
}

}  // namespace paflow
