#include "paflow/block_flow.hpp"

#include "paflow/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace paflow {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = kPi / 2;

void require_off_wall(double x, const char* what) {
    if (std::fabs(x) > kWallGuard)
        throw std::domain_error(std::string(what) + " diverges at the wall |x| = pi/2");
}
}  // namespace

BlockPoint vector_field(const BlockPoint& p, double lambda) {
    double cz = std::cos(p.z), sz = std::sin(p.z);
    double cx = std::cos(p.x), sx = std::sin(p.x);
    return {0.0, lambda * sx * cz * cz, cx * cx + sz * sz * sx * sx};
}

double transit_time(double x) {
    require_off_wall(x, "transit time");
    return kPi / std::fabs(std::cos(x));
}

double exit_shear(double x, double lambda) {
    require_off_wall(x, "exit shear");
    return lambda * kPi * (std::tan(x) - std::tan(x / 2));
}

double exit_shear_deriv(double x, double lambda) {
    require_off_wall(x, "exit shear");
    double tx = std::tan(x), th = std::tan(x / 2);
    return lambda * kPi * (0.5 + tx * tx - 0.5 * th * th);
}

BlockPoint exit_map(double x, double y, double lambda) {
    return {x, wrap01(y + exit_shear(x, lambda)), kHalfPi};
}

namespace {

// one RK4 step of size h for (y,z) at fixed x; y accumulates unwrapped
void rk4_step(double x, double lambda, double h, double& y, double& z) {
    auto f = [&](double zz, double& dy, double& dz) {
        BlockPoint v = vector_field({x, 0.0, zz}, lambda);
        dy = v.y;
        dz = v.z;
    };
    double k1y, k1z, k2y, k2z, k3y, k3z, k4y, k4z;
    f(z, k1y, k1z);
    f(z + 0.5 * h * k1z, k2y, k2z);
    f(z + 0.5 * h * k2z, k3y, k3z);
    f(z + h * k3z, k4y, k4z);
    y += h / 6 * (k1y + 2 * k2y + 2 * k3y + k4y);
    z += h / 6 * (k1z + 2 * k2z + 2 * k3z + k4z);
}

}  // namespace

OrbitTrace integrate_orbit(const BlockPoint& p0, double lambda, double step,
                           double time_budget, int sample_stride) {
    if (step <= 0) throw std::invalid_argument("integration step must be positive");
    OrbitTrace tr;
    double t = 0, y = p0.y, z = p0.z;
    tr.samples.push_back({0.0, {p0.x, wrap01(y), z}});

    long long nstep = 0;
    while (t < time_budget) {
        double yn = y, zn = z;
        rk4_step(p0.x, lambda, step, yn, zn);
        if (zn >= kHalfPi) {
            // bracket the crossing inside this step by bisecting the step size
            double lo = 0, hi = step;
            for (int it = 0; it < 60 && hi - lo > 0; ++it) {
                double mid = 0.5 * (lo + hi);
                double ym = y, zm = z;
                rk4_step(p0.x, lambda, mid, ym, zm);
                (zm >= kHalfPi ? hi : lo) = mid;
            }
            double ye = y, ze = z;
            rk4_step(p0.x, lambda, hi, ye, ze);
            tr.outcome = OrbitOutcome::exited;
            tr.exit = {p0.x, wrap01(ye), kHalfPi};
            tr.exit_time = t + hi;
            tr.samples.push_back({tr.exit_time, tr.exit});
            return tr;
        }
        y = yn;
        z = zn;
        t += step;
        ++nstep;
        if (sample_stride > 0 && nstep % sample_stride == 0)
            tr.samples.push_back({t, {p0.x, wrap01(y), z}});
    }
    tr.outcome = OrbitOutcome::non_exiting;
    tr.samples.push_back({t, {p0.x, wrap01(y), z}});
    return tr;
}

SymmetryReport check_symmetries(double lambda, int nsamples, unsigned long long seed,
                                const FieldFn& field) {
    FieldFn X = field ? field : FieldFn(
        [](const BlockPoint& p, double l) { return vector_field(p, l); });
    Rng rng(seed);
    SymmetryReport rep;
    for (int i = 0; i < nsamples; ++i) {
        BlockPoint p{rng.uniform(-kHalfPi, kHalfPi), rng.uniform(), rng.uniform(-kHalfPi, kHalfPi)};

        // y-translation invariance
        BlockPoint v = X(p, lambda);
        BlockPoint vr = X({p.x, wrap01(p.y + rng.uniform()), p.z}, lambda);
        rep.rotation = std::max({rep.rotation, std::fabs(v.x - vr.x), std::fabs(v.y - vr.y),
                                 std::fabs(v.z - vr.z)});

        // flip (x,y,z) -> (-x,-y,z): field must transform as (-vx,-vy,vz)
        BlockPoint vf = X({-p.x, wrap01(-p.y), p.z}, lambda);
        rep.flip = std::max({rep.flip, std::fabs(vf.x + v.x), std::fabs(vf.y + v.y),
                             std::fabs(vf.z - v.z)});

        // exit map equivariance f(-x,-y) = flip(f(x,y)) on the safe interior
        double x = rng.uniform(-1.5, 1.5);
        BlockPoint a = exit_map(x, p.y, lambda);
        BlockPoint b = exit_map(-x, wrap01(-p.y), lambda);
        rep.exit_flip = std::max(rep.exit_flip, circle_dist(b.y, wrap01(-a.y)));
    }
    return rep;
}

}  // namespace paflow
