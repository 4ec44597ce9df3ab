#include "doctest.h"
#include "paflow/block_flow.hpp"

#include <cmath>
#include <numbers>

using namespace paflow;

namespace {

constexpr double kPi = std::numbers::pi;

// Independent oracle: Simpson quadrature of dt/dz and dy/dz across the block.
// dz/dt = cos^2 x + sin^2 z sin^2 x, dy/dt = lambda sin x cos^2 z.
double simpson(double a, double b, int n, const std::function<double(double)>& f) {
    double h = (b - a) / n, s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4 : 2);
    return s * h / 3;
}

double transit_by_quadrature(double x) {
    double cx2 = std::cos(x) * std::cos(x), sx2 = std::sin(x) * std::sin(x);
    return simpson(-kPi / 2, kPi / 2, 20000, [&](double z) {
        double sz = std::sin(z);
        return 1.0 / (cx2 + sz * sz * sx2);
    });
}

double shear_by_quadrature(double x, double lambda) {
    double cx2 = std::cos(x) * std::cos(x), sx2 = std::sin(x) * std::sin(x);
    double sx = std::sin(x);
    return simpson(-kPi / 2, kPi / 2, 20000, [&](double z) {
        double sz = std::sin(z), cz = std::cos(z);
        return lambda * sx * cz * cz / (cx2 + sz * sz * sx2);
    });
}

}  // namespace

TEST_CASE("vector field closed forms at pinned points") {
    auto v = vector_field({0, 0.7, 0}, 1);
    CHECK(v.x == 0);
    CHECK(v.y == doctest::Approx(0).epsilon(1e-15));
    CHECK(v.z == doctest::Approx(1));

    v = vector_field({-kPi / 2, 0.1, 0}, 3);  // on alpha_1: y strictly decreasing
    CHECK(v.y == doctest::Approx(-3));
    CHECK(v.z == doctest::Approx(0).epsilon(1e-15));

    v = vector_field({kPi / 2, 0.9, kPi / 2}, 1);
    CHECK(v.y == doctest::Approx(0).epsilon(1e-15));
    CHECK(v.z == doctest::Approx(1));
}

TEST_CASE("transit time closed form vs quadrature") {
    CHECK(transit_time(0) == doctest::Approx(kPi));
    CHECK(transit_time(kPi / 3) == doctest::Approx(2 * kPi));
    CHECK_THROWS_AS(transit_time(kPi / 2), std::domain_error);
    CHECK_THROWS_AS(transit_time(-kPi / 2), std::domain_error);

    for (double x : {0.0, 0.3, -0.6, 1.0, -1.3, 1.45}) {
        double q = transit_by_quadrature(x);
        CHECK(std::fabs(q - transit_time(x)) <= 1e-8 * (1 + q));
        CHECK(transit_time(x) == transit_time(-x));  // even in x
    }
}

TEST_CASE("exit shear closed form vs quadrature, oddness, pinned value") {
    CHECK(exit_shear(0, 7.0) == 0);
    CHECK(exit_shear(0.7, 2) == doctest::Approx(-exit_shear(-0.7, 2)).epsilon(1e-14));
    // a(pi/3, 1) = pi (sqrt 3 - 1/sqrt 3)
    CHECK(exit_shear(kPi / 3, 1) ==
          doctest::Approx(kPi * (std::sqrt(3.0) - 1 / std::sqrt(3.0))).epsilon(1e-14));
    CHECK_THROWS_AS(exit_shear(kPi / 2, 1), std::domain_error);

    for (double lambda : {0.5, 1.0, 5.0})
        for (double x : {0.0, 0.2, -0.45, 0.9, -1.2, 1.4}) {
            double q = shear_by_quadrature(x, lambda);
            CHECK(std::fabs(q - exit_shear(x, lambda)) <= 1e-8 * (1 + std::fabs(q)));
        }
}

TEST_CASE("shear derivative: finite differences, lower bound, monotonicity") {
    for (double lambda : {0.5, 1.0, 5.0, 20.0}) {
        double prev = -1e300;
        for (int i = -40; i <= 40; ++i) {
            double x = i * (kPi / 2 - 1e-3) / 40;
            double d = exit_shear_deriv(x, lambda);
            CHECK(d >= lambda * kPi / 2 - 1e-9);
            double h = 1e-6;
            double fd = (exit_shear(x + h, lambda) - exit_shear(x - h, lambda)) / (2 * h);
            CHECK(d == doctest::Approx(fd).epsilon(1e-6));
            double a = exit_shear(x, lambda);
            CHECK(a > prev);  // strictly increasing
            prev = a;
        }
    }
}

TEST_CASE("exit map basics") {
    auto p = exit_map(0, 0.25, 5);
    CHECK(p.x == 0);
    CHECK(p.y == doctest::Approx(0.25));

    auto q1 = exit_map(0.8, 0.1, 2);
    auto q2 = exit_map(0.8, 0.6, 2);
    CHECK(circle_dist(q2.y, wrap01(q1.y + 0.5)) <= 1e-12);

    auto r = exit_map(kPi / 3, 0, 1);
    CHECK(r.y == doctest::Approx(wrap01(kPi * (std::sqrt(3.0) - 1 / std::sqrt(3.0)))));
}

TEST_CASE("orbit integration matches the closed forms to 1e-6") {
    for (double lambda : {0.5, 1.0, 5.0})
        for (double x : {0.0, 0.3, -0.6, 0.9, -1.2, 1.4}) {
            CAPTURE(lambda);
            CAPTURE(x);
            BlockPoint p0{x, 0.35, -kPi / 2};
            auto tr = integrate_orbit(p0, lambda, 1e-3);
            REQUIRE(tr.outcome == OrbitOutcome::exited);
            CHECK(std::fabs(tr.exit_time - transit_time(x)) <= 1e-6);
            auto f = exit_map(x, p0.y, lambda);
            CHECK(circle_dist(tr.exit.y, f.y) <= 1e-6);
            CHECK(tr.exit.x == x);  // x conserved exactly
        }
}

TEST_CASE("wall orbits with z <= 0 never exit") {
    auto tr = integrate_orbit({-kPi / 2, 0.3, -kPi / 2}, 1, 1e-3, 5.0);
    CHECK(tr.outcome == OrbitOutcome::non_exiting);
    tr = integrate_orbit({kPi / 2, 0.0, -0.2}, 2, 1e-3, 5.0);
    CHECK(tr.outcome == OrbitOutcome::non_exiting);
    // z stays below the fixed point z = 0 while spiraling
    for (const auto& s : tr.samples) CHECK(s.p.z <= 1e-12);
}

TEST_CASE("z is nondecreasing along trajectories and x is pinned") {
    BlockPoint p0{0.9, 0.1, -kPi / 2};
    auto tr = integrate_orbit(p0, 2, 1e-3, 50, 100);
    REQUIRE(tr.outcome == OrbitOutcome::exited);
    REQUIRE(tr.samples.size() > 3);
    for (std::size_t i = 1; i < tr.samples.size(); ++i) {
        CHECK(tr.samples[i].p.z >= tr.samples[i - 1].p.z - 1e-12);
        CHECK(tr.samples[i].p.x == p0.x);
        CHECK(tr.samples[i].t > tr.samples[i - 1].t);
    }
}

TEST_CASE("symmetry residuals: rotation exact, flip within 1e-12") {
    auto rep = check_symmetries(2.0, 100, 1234);
    CHECK(rep.rotation == 0);
    CHECK(rep.flip <= 1e-12);
    CHECK(rep.exit_flip <= 1e-12);
}

TEST_CASE("negative control: perturbed field trips the symmetry check") {
    FieldFn bad = [](const BlockPoint& p, double l) {
        BlockPoint v = vector_field(p, l);
        v.y += 1e-3 * (p.x + 0.3);          // breaks the flip
        v.z += 1e-3 * std::sin(2 * kPi * p.y);  // breaks rotation invariance
        return v;
    };
    auto rep = check_symmetries(2.0, 100, 1234, bad);
    CHECK(rep.rotation > 1e-6);
    CHECK(rep.flip > 1e-6);
}

TEST_CASE("circle arithmetic helpers") {
    CHECK(wrap01(-0.25) == doctest::Approx(0.75));
    CHECK(wrap01(1.0) == 0.0);
    CHECK(wrap01(2.5) == doctest::Approx(0.5));
    CHECK(circle_dist(0.9, 0.1) == doctest::Approx(0.2));
    CHECK(circle_dist(0.0, 0.5) == doctest::Approx(0.5));
}
