#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace paflow {

// Coordinates of the model block: x in [-pi/2, pi/2], z in [-pi/2, pi/2]
// (radians), y on the circle R/Z with representative in [0,1). The same
// struct doubles as a velocity triple.
struct BlockPoint {
    double x = 0;
    double y = 0;
    double z = 0;
};

inline double wrap01(double y) {
    double r = y - std::floor(y);
    return r >= 1.0 ? 0.0 : r;
}

inline double circle_dist(double a, double b) {
    double d = std::fabs(wrap01(a - b));
    return std::min(d, 1.0 - d);
}

// |x| beyond this bound counts as "on the wall": the transit time and the
// shear both diverge there, so the closed-form operations refuse it.
inline constexpr double kWallGuard = 1.5707963267948966 - 1e-8;  // pi/2 - 1e-8

// field at p for shear strength lambda:
//   xdot = 0, ydot = lambda sin(x) cos^2(z), zdot = cos^2(x) + sin^2(z) sin^2(x)
BlockPoint vector_field(const BlockPoint& p, double lambda);

// time from the entry face z=-pi/2 to the exit face z=pi/2 at fixed x
double transit_time(double x);  // = pi / |cos x|; throws off the open interval

// accumulated y-shear across one transit and its derivative
double exit_shear(double x, double lambda);        // a(x) = lambda pi (tan x - tan(x/2))
double exit_shear_deriv(double x, double lambda);  // a'(x) >= lambda pi / 2

// F0 -> F1 landing map f(x,y) = (x, y + a(x) mod 1)
BlockPoint exit_map(double x, double y, double lambda);

struct OrbitSample {
    double t;
    BlockPoint p;
};

enum class OrbitOutcome { exited, non_exiting };

struct OrbitTrace {
    OrbitOutcome outcome = OrbitOutcome::non_exiting;
    BlockPoint exit;     // valid when outcome == exited (z pinned to pi/2)
    double exit_time = 0;
    std::vector<OrbitSample> samples;  // includes start; includes exit point when it exits
};

// Classical fixed-step 4th-order integration of (y,z) with x held exactly
// constant; the F1 crossing is localized by bisecting the final step. Orbits
// that fail to exit within `time_budget` (wall orbits with z <= 0) come back
// non_exiting. `sample_stride` > 0 records every that-many steps.
OrbitTrace integrate_orbit(const BlockPoint& p0, double lambda, double step,
                           double time_budget = 50.0, int sample_stride = 0);

// velocity field signature for symmetry checks (tests can inject a broken one)
using FieldFn = std::function<BlockPoint(const BlockPoint&, double)>;

struct SymmetryReport {
    double rotation = 0;   // invariance under y-translation
    double flip = 0;       // equivariance under (x,y,z) -> (-x,-y,z)
    double exit_flip = 0;  // exit map equivariance under the same flip
};

SymmetryReport check_symmetries(double lambda, int nsamples, unsigned long long seed,
                                const FieldFn& field = {});

}  // namespace paflow
