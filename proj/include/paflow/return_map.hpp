#pragma once

#include "paflow/closure.hpp"

namespace paflow {

// 2x2 real matrix, row-major [[a, b], [c, d]].
struct Mat2 {
    double a = 1, b = 0, c = 0, d = 1;

    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    double det() const { return a * d - b * c; }
};

// First-return system: assembled manifold + validated gluing + shear strength
// + cone half-slope. Tangent vectors are measured in "radianized" units
// (du, 2 pi dv) so both coordinates are radians; the cone C0 is
// |xi| <= kappa |eta| around the fiber direction, constant in chart
// coordinates, and expansion is Euclidean norm in these units.
struct ReturnMapSystem {
    AssembledManifold m;
    GluingSpec spec;
    double lambda = 1;
    double kappa = 0.2;
};

// Largest cone half-slope for which the closure of A(C0) stays clear of the
// fiber line field on every match: min over matches of |b| k / (2 |a|).
double kappa_max(const AssembledManifold& m, const GluingSpec& spec);

// Validates the gluing, lambda > 0 and 0 < kappa < kappa_max; throws
// ClosureError otherwise.
ReturnMapSystem make_system(AssembledManifold m, GluingSpec spec, double lambda,
                            double kappa = 0.2);

// point of T: universal-cover coordinates on an outgoing component
struct TPoint {
    int component = -1;
    GlobalPoint p{0, 0};
};

struct StepResult {
    bool terminated = false;  // A-image hit the stable set l^s_0 (1e-12 tol)
    int vertex = -1;          // owning vertical orbit when terminated
    TPoint out;
    int edge = -1;       // block traversed
    double x_block = 0;  // block x (preserved exactly through the block)
};

StepResult return_step(const ReturnMapSystem& sys, const TPoint& pt);

struct JacobianResult {
    Mat2 J;                     // radianized d(phi) at the point
    bool near_singular = false; // A-image within 1e-8 of a stable circle
    double x_block = 0;
};

// Chain rule S_out * shear(a'(x)) * S_in * A; throws on terminating points.
JacobianResult return_jacobian(const ReturnMapSystem& sys, const TPoint& pt);

struct ConeSample {
    int component;
    double u, v;
    double margin;     // angular gap to the cone boundary (radians)
    double expansion;  // min image norm over cone directions
};

struct ConeReport {
    bool contained = false;
    double margin = 0;         // min over grid
    double min_expansion = 0;  // min over grid
    bool pass = false;         // contained && min_expansion >= 2
    long long checked = 0;
    std::vector<ConeSample> samples;  // filled when collect = true
};

// Grid x grid cells per annulus of every outgoing component, cell-center
// samples, skipping a 1e-3 collar around the tangent circles and around the
// A-preimage of the stable set.
ConeReport verify_cones(const ReturnMapSystem& sys, int grid = 200, bool collect = false);

struct Lambda0Result {
    bool certifiable = false;
    double lambda0 = 0;  // smallest passing lambda (1% relative), when certifiable
};

// Log-bisection of verify_cones over lambda in [1e-3, 1e4].
Lambda0Result estimate_lambda0(const AssembledManifold& m, const GluingSpec& spec, double kappa,
                               int grid = 200);

// Sampled piece of a stable curve: a graph v = g(u) inside one annulus of an
// outgoing component, u strictly monotone along the samples.
struct CurvePiece {
    int component = -1;
    int chart = -1;
    int curve_id = -1;
    std::vector<GlobalPoint> pts;
};

struct StableCurveFamily {
    int generation = 0;
    std::vector<CurvePiece> pieces;  // up to the per-generation cap
    long long pieces_generated = 0;  // pieces emitted by the processed sources
    int sources_processed = 0;       // sources pulled back before the cap closed
    bool all_graphs = true;
    double max_slope = 0;  // max |d(2 pi v)/du| over samples
};

// Generations 0..n (n <= 8): generation 0 is the exact affine preimage
// A^{-1}(l^s_0); each next generation pulls kept pieces back through
// phi^{-1} = A^{-1} f^{-1}, sampling in equal shear increments (~0.1 turn)
// with the |x| <= pi/2 - 1e-3 clip, splitting at annulus boundaries and
// v-wraps. Deterministic pruning: sources are processed in stored order and
// no new source is started once `max_pieces` pieces are kept; the counters
// let callers extrapolate uncapped family sizes.
std::vector<StableCurveFamily> stable_curves(const ReturnMapSystem& sys, int n,
                                             int max_pieces = 400);

struct DensityReport {
    double delta = 0;
    std::vector<double> fraction;  // fraction[g] = boxes hit by generations <= g
};

DensityReport density_probe(const ReturnMapSystem& sys, double delta, int n,
                            int max_pieces = 400);

}  // namespace paflow
