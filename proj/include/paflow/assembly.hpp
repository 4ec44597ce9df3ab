#pragma once

#include "paflow/blueprint.hpp"

#include <optional>

namespace paflow {

struct AssemblyError : std::runtime_error {
    explicit AssemblyError(const std::string& msg) : std::runtime_error(msg) {}
};

// One transverse boundary component per boundary cycle. Chart j covers the
// entry (incoming) or exit (outgoing) annulus of the block of steps[j].edge,
// with u in [j pi, (j+1) pi] and
//     x_chart = u - j pi - pi/2,   y_chart = (-1)^j v  (mod 1).
// Block coordinates see the chart through the traversal direction:
//     x_block = dir * x_chart,     y_block = dir * y_chart,
// which is a flow map by the (x,y,z) -> (-x,-y,z) symmetry.
struct TransverseComponent {
    int cycle = -1;
    Polarity polarity = Polarity::incoming;
    int k = 0;
    bool torus = false;  // k even
    std::vector<CycleStep> charts;
};

// Tangential identification at u = j pi of a component: the half-walls of the
// two adjacent blocks meet along the vertical orbit over `vertex`.
struct Seam {
    int component;
    int u_index;       // seam sits at u = u_index * pi
    int chart_before;  // (u_index - 1 + k) % k
    int chart_after;   // u_index % k
    int vertex;
    int sector;
    int edge_before, end_before;  // (edge, end) wall consumed on each side
    int edge_after, end_after;
};

struct VerticalOrbit {
    int vertex;
    int p;
};

struct AssembledManifold {
    FatGraphBlueprint bp;
    BoundaryData boundary;
    std::vector<TransverseComponent> components;  // indexed by cycle
    std::vector<Seam> seams;
    std::vector<VerticalOrbit> vertical_orbits;
    bool orientable = false;
    int stable_half_walls_used = 0;
    int unstable_half_walls_used = 0;
};

// Chain the blocks along every boundary cycle. Throws AssemblyError listing
// the violations when conditions (I)/(II) fail or polarity is missing.
AssembledManifold assemble(const FatGraphBlueprint& bp, const BoundaryData& bd);

struct GlobalPoint {
    double u, v;
};

struct ChartPoint {
    int j;
    double x, y;
};

// Seam points (u on pi Z) resolve to both adjacent charts.
struct ChartResolution {
    bool on_seam = false;
    ChartPoint primary;
    std::optional<ChartPoint> secondary;
};

// Universal-cover coordinates; torus components only (Klein components carry
// charts but no global linear structure and these throw on them).
GlobalPoint chart_to_global(const TransverseComponent& comp, int j, double x, double y);
ChartResolution global_to_chart(const TransverseComponent& comp, double u, double v);

struct TangentCircle {
    double u;    // j * pi
    int vertex;  // vertical orbit the circle belongs to
};

// l^s_0 circles of an incoming component / l^u_0 of an outgoing one.
std::vector<TangentCircle> tangent_circles(const TransverseComponent& comp,
                                           const AssembledManifold& m);

}  // namespace paflow
