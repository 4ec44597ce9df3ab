#include "paflow/assembly.hpp"

#include "paflow/block_flow.hpp"

#include <cassert>
#include <cmath>
#include <numbers>

namespace paflow {

namespace {
constexpr double kPi = std::numbers::pi;

int head_end(const CycleStep& s) { return s.dir > 0 ? 1 : 0; }
int tail_end(const CycleStep& s) { return s.dir > 0 ? 0 : 1; }
}  // namespace

AssembledManifold assemble(const FatGraphBlueprint& bp, const BoundaryData& bd) {
    ConditionReport rep = validate_conditions(bp, bd);
    if (!rep.pass) {
        std::string msg = "blueprint rejected:";
        for (const auto& v : rep.violations) msg += "\n  - " + v;
        if (rep.violations.empty()) msg += " conditions failed";
        throw AssemblyError(msg);
    }

    AssembledManifold m;
    m.bp = bp;
    m.boundary = bd;

    for (std::size_t c = 0; c < bd.cycles.size(); ++c) {
        const BoundaryCycle& cyc = bd.cycles[c];
        TransverseComponent tc;
        tc.cycle = static_cast<int>(c);
        tc.polarity = *cyc.polarity;
        tc.k = cyc.length();
        tc.torus = tc.k % 2 == 0;
        tc.charts = cyc.steps;
        m.components.push_back(std::move(tc));

        for (int j = 0; j < cyc.length(); ++j) {
            const CycleStep& after = cyc.steps[j];
            const CycleStep& before = cyc.steps[(j - 1 + cyc.length()) % cyc.length()];
            Seam s;
            s.component = static_cast<int>(c);
            s.u_index = j;
            s.chart_before = (j - 1 + cyc.length()) % cyc.length();
            s.chart_after = j;
            s.vertex = after.corner_vertex;
            s.sector = after.corner_sector;
            s.edge_before = before.edge;
            s.end_before = head_end(before);
            s.edge_after = after.edge;
            s.end_after = tail_end(after);
            // the walls being glued really meet over the recorded vertex
            assert(bp.half_edges[bp.edges[s.edge_before].he[s.end_before]].vertex == s.vertex);
            assert(bp.half_edges[bp.edges[s.edge_after].he[s.end_after]].vertex == s.vertex);
            m.seams.push_back(s);
        }
    }

    // half-wall bookkeeping: every (edge, end) wall donates its stable half to
    // exactly one incoming seam side and its unstable half to one outgoing
    std::vector<int> stable_uses(bp.edges.size() * 2, 0), unstable_uses(bp.edges.size() * 2, 0);
    for (const Seam& s : m.seams) {
        auto& uses =
            m.components[s.component].polarity == Polarity::incoming ? stable_uses : unstable_uses;
        uses[s.edge_before * 2 + s.end_before]++;
        uses[s.edge_after * 2 + s.end_after]++;
    }
    for (std::size_t i = 0; i < stable_uses.size(); ++i) {
        if (stable_uses[i] != 1 || unstable_uses[i] != 1)
            throw AssemblyError("half-wall bookkeeping failed at edge '" +
                                bp.edges[i / 2].id + "' end " + std::to_string(i % 2));
        m.stable_half_walls_used += stable_uses[i];
        m.unstable_half_walls_used += unstable_uses[i];
    }

    m.orientable = true;
    for (const auto& tc : m.components)
        if (!tc.torus) m.orientable = false;

    for (const ProngRecord& r : prong_census(bp))
        m.vertical_orbits.push_back({r.vertex, r.p});

    return m;
}

GlobalPoint chart_to_global(const TransverseComponent& comp, int j, double x, double y) {
    if (!comp.torus)
        throw AssemblyError("component is a Klein bottle: no global linear structure");
    if (j < 0 || j >= comp.k) throw AssemblyError("chart index out of range");
    double u = x + j * kPi + kPi / 2;
    double v = wrap01(j % 2 == 0 ? y : -y);
    return {u, v};
}

ChartResolution global_to_chart(const TransverseComponent& comp, double u, double v) {
    if (!comp.torus)
        throw AssemblyError("component is a Klein bottle: no global linear structure");
    double period = comp.k * kPi;
    double ur = u - period * std::floor(u / period);  // [0, k pi)
    if (ur >= period) ur = 0;

    ChartResolution res;
    double jr = ur / kPi;
    double nearest = std::round(jr);
    if (std::fabs(jr - nearest) * kPi < 1e-9) {  // on a seam circle u = j pi
        res.on_seam = true;
        int j = static_cast<int>(nearest) % comp.k;
        int jb = (j - 1 + comp.k) % comp.k;
        res.primary = {j, -kPi / 2, wrap01(j % 2 == 0 ? v : -v)};
        res.secondary = ChartPoint{jb, kPi / 2, wrap01(jb % 2 == 0 ? v : -v)};
        return res;
    }
    int j = static_cast<int>(std::floor(jr));
    res.primary = {j, ur - j * kPi - kPi / 2, wrap01(j % 2 == 0 ? v : -v)};
    return res;
}

std::vector<TangentCircle> tangent_circles(const TransverseComponent& comp,
                                           const AssembledManifold& m) {
    std::vector<TangentCircle> out;
    for (const Seam& s : m.seams)
        if (s.component == comp.cycle) out.push_back({s.u_index * kPi, s.vertex});
    return out;
}

}  // namespace paflow
