#include "paflow/return_map.hpp"

#include "paflow/block_flow.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace paflow {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2 * kPi;
constexpr double kStableTol = 1e-12;    // termination tolerance at l^s_0
constexpr double kSingularBand = 1e-8;  // a' divergence warning band
constexpr double kCollar = 1e-3;        // grid exclusion collar (radians)
// pullback sampling increment (turns); kept irrational relative to the pi
// lattice so image samples precess across annuli instead of aliasing
constexpr double kShearStep = 0.25 / kPi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double dist_to_pi_grid(double u) { return std::fabs(std::remainder(u, kPi)); }

[[noreturn]] void reject(const std::vector<std::string>& failures) {
    std::ostringstream os;
    os << "gluing spec rejected:";
    for (const std::string& f : failures) os << "\n  - " << f;
    throw ClosureError(os.str());
}

// Resolved per-step geometry: the chart the A-image lands in and the exit
// chart of the traversed block.
struct StepCharts {
    const TransverseComponent* in_comp;
    const TransverseComponent* out_comp;
    int in_comp_idx, out_comp_idx;
    const CycleStep* st_in;
    const CycleStep* st_out;
    int j_in, j_out;
    double x_block, y_block;  // entry block coordinates
};

StepCharts resolve_charts(const AssembledManifold& m, int in_component, const ChartPoint& cp) {
    StepCharts sc;
    sc.in_comp_idx = in_component;
    sc.in_comp = &m.components[in_component];
    sc.j_in = cp.j;
    sc.st_in = &sc.in_comp->charts[cp.j];
    sc.x_block = sc.st_in->dir > 0 ? cp.x : -cp.x;
    sc.y_block = wrap01(sc.st_in->dir > 0 ? cp.y : -cp.y);
    int side_out = 1 - sc.st_in->side;
    sc.out_comp_idx = m.boundary.side_cycle[sc.st_in->edge * 2 + side_out];
    sc.j_out = m.boundary.side_pos[sc.st_in->edge * 2 + side_out];
    sc.out_comp = &m.components[sc.out_comp_idx];
    sc.st_out = &sc.out_comp->charts[sc.j_out];
    return sc;
}

const TransverseComponent& outgoing_component(const AssembledManifold& m, int component,
                                              const char* op) {
    if (component < 0 || component >= static_cast<int>(m.components.size()))
        throw ClosureError(std::string(op) + ": unknown component index " +
                           std::to_string(component));
    const TransverseComponent& co = m.components[component];
    if (co.polarity != Polarity::outgoing)
        throw ClosureError(std::string(op) + ": " + component_name(component) +
                           " is not an outgoing component");
    return co;
}

// Per-point cone statistics for a radianized Jacobian: angular gap of the
// image of the cone boundary, and minimal image norm over cone directions.
void cone_stats(const Mat2& J, double kappa, double& margin, double& expansion) {
    double theta = std::atan(kappa);
    margin = kInf;
    for (double sgn : {1.0, -1.0}) {
        double wx = J.a * sgn * kappa + J.b;
        double wy = J.c * sgn * kappa + J.d;
        margin = std::min(margin, theta - std::atan2(std::fabs(wx), std::fabs(wy)));
    }
    double nb = std::hypot(kappa, 1.0);
    const double dirs[3][2] = {{kappa / nb, 1 / nb}, {-kappa / nb, 1 / nb}, {0, 1}};
    expansion = kInf;
    for (const auto& d : dirs)
        expansion = std::min(expansion, std::hypot(J.a * d[0] + J.b * d[1],
                                                   J.c * d[0] + J.d * d[1]));
}

}  // namespace

double kappa_max(const AssembledManifold& m, const GluingSpec& spec) {
    double best = kInf;
    for (const GluingMatch& gm : spec.matches) {
        if (gm.a == 0) continue;  // A(C0) can never swing onto the fiber
        double k = m.components[gm.out_component].k;
        best = std::min(best, std::fabs(static_cast<double>(gm.b)) * k /
                                  (2.0 * std::fabs(static_cast<double>(gm.a))));
    }
    return best;
}

ReturnMapSystem make_system(AssembledManifold m, GluingSpec spec, double lambda, double kappa) {
    GluingValidation gv = validate_gluing(m, spec);
    if (!gv.pass) reject(gv.failures);
    if (!(lambda > 0)) throw ClosureError("lambda must be positive");
    double kmax = kappa_max(m, spec);
    if (!(kappa > 0) || !(kappa < kmax)) {
        std::ostringstream os;
        os << "kappa = " << kappa << " out of range: need 0 < kappa < " << kmax;
        throw ClosureError(os.str());
    }
    return {std::move(m), std::move(spec), lambda, kappa};
}

StepResult return_step(const ReturnMapSystem& sys, const TPoint& pt) {
    const AssembledManifold& m = sys.m;
    outgoing_component(m, pt.component, "return_step");
    const GluingMatch& gm = match_of_outgoing(sys.spec, pt.component);
    GlobalPoint q = apply_gluing(m, gm, pt.p);
    const TransverseComponent& ci = m.components[gm.in_component];

    StepResult res;
    if (dist_to_pi_grid(q.u) <= kStableTol) {
        res.terminated = true;
        int idx = static_cast<int>(std::llround(q.u / kPi)) % ci.k;
        if (idx < 0) idx += ci.k;
        for (const Seam& s : m.seams) {
            if (s.component == gm.in_component && s.u_index == idx) {
                res.vertex = s.vertex;
                break;
            }
        }
        return res;
    }

    ChartResolution cr = global_to_chart(ci, q.u, q.v);
    StepCharts sc = resolve_charts(m, gm.in_component, cr.primary);
    BlockPoint exit = exit_map(sc.x_block, sc.y_block, sys.lambda);
    double x_c = sc.st_out->dir > 0 ? exit.x : -exit.x;
    double y_c = wrap01(sc.st_out->dir > 0 ? exit.y : -exit.y);
    res.out.component = sc.out_comp_idx;
    res.out.p = chart_to_global(*sc.out_comp, sc.j_out, x_c, y_c);
    res.edge = sc.st_in->edge;
    res.x_block = sc.x_block;
    return res;
}

JacobianResult return_jacobian(const ReturnMapSystem& sys, const TPoint& pt) {
    const AssembledManifold& m = sys.m;
    const TransverseComponent& co = outgoing_component(m, pt.component, "return_jacobian");
    const GluingMatch& gm = match_of_outgoing(sys.spec, pt.component);
    GlobalPoint q = apply_gluing(m, gm, pt.p);
    const TransverseComponent& ci = m.components[gm.in_component];

    JacobianResult res;
    ChartPoint cp = global_to_chart(ci, q.u, q.v).primary;
    if (dist_to_pi_grid(q.u) <= kSingularBand) {
        res.near_singular = true;
        double lim = kPi / 2 - kSingularBand;
        cp.x = std::clamp(cp.x, -lim, lim);
    }
    StepCharts sc = resolve_charts(m, gm.in_component, cp);
    double ap = exit_shear_deriv(sc.x_block, sys.lambda);

    double kin = ci.k, kout = co.k;
    Mat2 A{gm.a * kin / kout, gm.b * kin / 2.0, 2.0 * gm.c / kout, static_cast<double>(gm.d)};
    Mat2 Sin{static_cast<double>(sc.st_in->dir), 0, 0,
             sc.st_in->dir * (sc.j_in % 2 == 0 ? 1.0 : -1.0)};
    Mat2 shear{1, 0, kTwoPi * ap, 1};
    Mat2 Sout{static_cast<double>(sc.st_out->dir), 0, 0,
              sc.st_out->dir * (sc.j_out % 2 == 0 ? 1.0 : -1.0)};
    res.J = Sout * (shear * (Sin * A));
    res.x_block = sc.x_block;
    return res;
}

ConeReport verify_cones(const ReturnMapSystem& sys, int grid, bool collect) {
    const AssembledManifold& m = sys.m;
    ConeReport rep;
    rep.margin = kInf;
    rep.min_expansion = kInf;
    for (int c = 0; c < static_cast<int>(m.components.size()); ++c) {
        const TransverseComponent& co = m.components[c];
        if (co.polarity != Polarity::outgoing) continue;
        const GluingMatch& gm = match_of_outgoing(sys.spec, c);
        for (int j = 0; j < co.k; ++j) {
            for (int iu = 0; iu < grid; ++iu) {
                double u = (j + (iu + 0.5) / grid) * kPi;
                if (dist_to_pi_grid(u) <= kCollar) continue;  // tangent circles
                for (int iv = 0; iv < grid; ++iv) {
                    double v = (iv + 0.5) / grid;
                    if (dist_to_pi_grid(apply_gluing(m, gm, {u, v}).u) <= kCollar)
                        continue;  // collar around mu^s_0
                    JacobianResult jr = return_jacobian(sys, {c, {u, v}});
                    double pm, pe;
                    cone_stats(jr.J, sys.kappa, pm, pe);
                    rep.margin = std::min(rep.margin, pm);
                    rep.min_expansion = std::min(rep.min_expansion, pe);
                    ++rep.checked;
                    if (collect) rep.samples.push_back({c, u, v, pm, pe});
                }
            }
        }
    }
    rep.contained = rep.checked > 0 && rep.margin > 0;
    rep.pass = rep.contained && rep.min_expansion >= 2.0;
    return rep;
}

Lambda0Result estimate_lambda0(const AssembledManifold& m, const GluingSpec& spec, double kappa,
                               int grid) {
    GluingValidation gv = validate_gluing(m, spec);
    if (!gv.pass) reject(gv.failures);
    double kmax = kappa_max(m, spec);
    if (!(kappa > 0) || !(kappa < kmax)) {
        std::ostringstream os;
        os << "kappa = " << kappa << " out of range: need 0 < kappa < " << kmax;
        throw ClosureError(os.str());
    }
    auto pass_at = [&](double lam) {
        ReturnMapSystem sys{m, spec, lam, kappa};
        return verify_cones(sys, grid).pass;
    };
    double lo = 1e-3, hi = 1e4;
    if (!pass_at(hi)) return {false, 0};
    if (pass_at(lo)) return {true, lo};
    while (hi / lo > 1.01) {
        double mid = std::sqrt(lo * hi);
        (pass_at(mid) ? hi : lo) = mid;
    }
    return {true, hi};
}

namespace {

// Appends `piece` to the family if it has at least two samples and the cap
// allows, normalizing to ascending u; counts it either way.
void flush_piece(StableCurveFamily& fam, CurvePiece&& piece, int max_pieces, int& next_id) {
    if (piece.pts.size() < 2) {
        piece.pts.clear();
        return;
    }
    ++fam.pieces_generated;
    if (static_cast<int>(fam.pieces.size()) >= max_pieces) {
        piece.pts.clear();
        return;
    }
    if (piece.pts.front().u > piece.pts.back().u)
        std::reverse(piece.pts.begin(), piece.pts.end());
    piece.curve_id = next_id++;
    fam.pieces.push_back(std::move(piece));
}

// Linear interpolation of a sampled graph v = g(u) at u (clamped to range).
double interp_curve(const std::vector<GlobalPoint>& pts, double u) {
    if (u <= pts.front().u) return pts.front().v;
    if (u >= pts.back().u) return pts.back().v;
    auto it = std::lower_bound(pts.begin(), pts.end(), u,
                               [](const GlobalPoint& p, double uu) { return p.u < uu; });
    const GlobalPoint& b = *it;
    const GlobalPoint& a = *(it - 1);
    double w = (u - a.u) / (b.u - a.u);
    double dv = b.v - a.v;
    return a.v + w * dv;
}

// Splitting accumulator for sampled image curves: starts a new piece whenever
// the annulus changes, v wraps, or u stops being strictly monotone (the last
// is a hard failure: the image must stay a graph).
struct PieceBuilder {
    StableCurveFamily* fam;
    int component, k, max_pieces, generation;
    int* next_id;
    CurvePiece cur;
    int cur_ann = -1, dir = 0;

    void add(GlobalPoint p) {
        int ann = std::min(k - 1, static_cast<int>(std::floor(p.u / kPi)));
        if (!cur.pts.empty()) {
            double du = p.u - cur.pts.back().u;
            bool wrap = std::fabs(p.v - cur.pts.back().v) > 0.5;
            if (ann != cur_ann || wrap) {
                flush();
            } else if (du == 0 || (dir != 0 && (du > 0) != (dir > 0))) {
                throw ClosureError(
                    "stable curve pullback is not a graph at generation " +
                    std::to_string(generation) + " (lambda too small or tolerance issue)");
            } else {
                dir = du > 0 ? 1 : -1;
            }
        }
        if (cur.pts.empty()) {
            cur.component = component;
            cur.chart = ann;
            cur_ann = ann;
            dir = 0;
        }
        cur.pts.push_back(p);
    }

    void flush() {
        flush_piece(*fam, std::move(cur), max_pieces, *next_id);
        cur = CurvePiece{};
        dir = 0;
    }
};

// exact affine preimages A^{-1}(l^s_0), sampled per annulus
StableCurveFamily generation_zero(const ReturnMapSystem& sys, int max_pieces) {
    const AssembledManifold& m = sys.m;
    StableCurveFamily fam;
    fam.generation = 0;
    int next_id = 0;
    const int samples = 200;
    for (const GluingMatch& gm : sys.spec.matches) {
        const TransverseComponent& co = m.components[gm.out_component];
        const TransverseComponent& ci = m.components[gm.in_component];
        double slope_u = -static_cast<double>(gm.a) / (co.k * static_cast<double>(gm.b) * kPi);
        for (int circle = 0; circle < ci.k; ++circle) {
            double v0 = (circle * kPi - gm.s) / (static_cast<double>(gm.b) * ci.k * kPi);
            for (int j = 0; j < co.k; ++j) {
                CurvePiece piece;
                for (int i = 0; i <= samples; ++i) {
                    double u = (j + static_cast<double>(i) / samples) * kPi;
                    double v = wrap01(v0 + slope_u * u);
                    if (!piece.pts.empty() && std::fabs(v - piece.pts.back().v) > 0.5) {
                        flush_piece(fam, std::move(piece), max_pieces, next_id);
                        piece = CurvePiece{};
                    }
                    if (piece.pts.empty()) {
                        piece.component = gm.out_component;
                        piece.chart = j;
                    }
                    piece.pts.push_back({u, v});
                }
                flush_piece(fam, std::move(piece), max_pieces, next_id);
            }
        }
    }
    return fam;
}

// one pullback step: phi^{-1} = A^{-1} o f^{-1} applied to every kept piece
StableCurveFamily pull_back(const ReturnMapSystem& sys, const StableCurveFamily& src, int gen,
                            int max_pieces) {
    const AssembledManifold& m = sys.m;
    StableCurveFamily fam;
    fam.generation = gen;
    int next_id = 0;
    const double clip = kPi / 2 - 1e-3;
    for (const CurvePiece& piece : src.pieces) {
        if (static_cast<int>(fam.pieces.size()) >= max_pieces) break;
        ++fam.sources_processed;
        const TransverseComponent& co = m.components[piece.component];
        const CycleStep& st = co.charts[piece.chart];
        int side_in = 1 - st.side;
        int in_comp = m.boundary.side_cycle[st.edge * 2 + side_in];
        int j_in = m.boundary.side_pos[st.edge * 2 + side_in];
        const TransverseComponent& ci = m.components[in_comp];
        const CycleStep& st_in = ci.charts[j_in];
        const GluingMatch& gm = match_of_incoming(sys.spec, in_comp);

        // block-x extent of the source piece, intersected with the clip window
        double xc0 = piece.pts.front().u - piece.chart * kPi - kPi / 2;
        double xc1 = piece.pts.back().u - piece.chart * kPi - kPi / 2;
        double xa = st.dir > 0 ? xc0 : -xc1;
        double xb = st.dir > 0 ? xc1 : -xc0;
        double x0 = std::max(xa, -clip), x1 = std::min(xb, clip);
        if (!(x0 < x1)) continue;

        PieceBuilder pb{&fam,
                        gm.out_component,
                        m.components[gm.out_component].k,
                        max_pieces,
                        gen,
                        &next_id,
                        {},
                        -1,
                        0};
        // step caps so one sample never crosses a full annulus of the image:
        // |du| ~ |b| k_out pi per unit of shear and |d| k_out/k_in per unit of x
        int k_img = m.components[gm.out_component].k;
        double da_step = std::min(
            kShearStep, 1.0 / (kPi * std::max(1.0, std::fabs(static_cast<double>(gm.b)) * k_img)));
        double max_dx = std::min((x1 - x0) / 16,
                                 kPi * ci.k / (3.0 * std::max(1.0, std::fabs(static_cast<double>(
                                                                       gm.d))) * k_img));
        double x = x0;
        while (true) {
            double x_chart = st.dir > 0 ? x : -x;
            double u_src = x_chart + piece.chart * kPi + kPi / 2;
            double v_src = interp_curve(piece.pts, u_src);
            double y_chart = piece.chart % 2 == 0 ? v_src : wrap01(-v_src);
            double y_b = wrap01(st.dir > 0 ? y_chart : -y_chart);
            double y_entry = wrap01(y_b - exit_shear(x, sys.lambda));
            double x_in = st_in.dir > 0 ? x : -x;
            double y_in = wrap01(st_in.dir > 0 ? y_entry : -y_entry);
            GlobalPoint ge = chart_to_global(ci, j_in, x_in, y_in);
            pb.add(apply_gluing_inverse(m, gm, ge));
            if (x >= x1) break;
            double dx = std::min(da_step / exit_shear_deriv(x, sys.lambda), max_dx);
            x = std::min(x + dx, x1);
        }
        pb.flush();
    }
    return fam;
}

void audit_family(StableCurveFamily& fam) {
    fam.all_graphs = true;
    fam.max_slope = 0;
    for (const CurvePiece& piece : fam.pieces) {
        for (size_t i = 1; i < piece.pts.size(); ++i) {
            double du = piece.pts[i].u - piece.pts[i - 1].u;
            double dv = piece.pts[i].v - piece.pts[i - 1].v;
            if (du <= 0) fam.all_graphs = false;
            if (du > 0) fam.max_slope = std::max(fam.max_slope, std::fabs(kTwoPi * dv / du));
        }
    }
}

}  // namespace

std::vector<StableCurveFamily> stable_curves(const ReturnMapSystem& sys, int n, int max_pieces) {
    GluingValidation gv = validate_gluing(sys.m, sys.spec);
    if (!gv.pass) reject(gv.failures);
    if (n < 0 || n > 8) throw ClosureError("stable curve generations are capped at 8");
    if (max_pieces < 1) throw ClosureError("stable curve piece cap must be positive");
    std::vector<StableCurveFamily> fams;
    fams.push_back(generation_zero(sys, max_pieces));
    for (int g = 1; g <= n; ++g) fams.push_back(pull_back(sys, fams.back(), g, max_pieces));
    for (StableCurveFamily& fam : fams) audit_family(fam);
    return fams;
}

DensityReport density_probe(const ReturnMapSystem& sys, double delta, int n, int max_pieces) {
    if (!(delta > 0)) throw ClosureError("density_probe: delta must be positive");
    std::vector<StableCurveFamily> fams = stable_curves(sys, n, max_pieces);
    const AssembledManifold& m = sys.m;
    std::vector<std::vector<char>> hit(m.components.size());
    std::vector<int> nu(m.components.size()), nv(m.components.size());
    long long total = 0;
    for (size_t c = 0; c < m.components.size(); ++c) {
        if (m.components[c].polarity != Polarity::outgoing) continue;
        nu[c] = static_cast<int>(std::ceil(m.components[c].k * kPi / delta));
        nv[c] = static_cast<int>(std::ceil(1.0 / delta));
        hit[c].assign(static_cast<size_t>(nu[c]) * nv[c], 0);
        total += nu[c] * nv[c];
    }
    DensityReport rep;
    rep.delta = delta;
    long long count = 0;
    for (const StableCurveFamily& fam : fams) {
        for (const CurvePiece& piece : fam.pieces) {
            for (const GlobalPoint& p : piece.pts) {
                int c = piece.component;
                int iu = std::min(nu[c] - 1, static_cast<int>(std::floor(p.u / delta)));
                int iv = std::min(nv[c] - 1, static_cast<int>(std::floor(p.v / delta)));
                char& cell = hit[c][static_cast<size_t>(iu) * nv[c] + iv];
                if (!cell) {
                    cell = 1;
                    ++count;
                }
            }
        }
        rep.fraction.push_back(total > 0 ? static_cast<double>(count) / total : 0.0);
    }
    return rep;
}

}  // namespace paflow
