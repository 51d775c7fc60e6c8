#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rwrs/grid.hpp"
#include "rwrs/rng.hpp"
#include "rwrs/special.hpp"

using namespace rwrs;

namespace {

GridFunction cosine_ground_state(double R, int m, BC bc) {
    GridFunction psi = GridFunction::zeros(1, R, m, bc);
    psi.fill([R](const double* x) { return std::cos(0.5 * kPi * x[0] / R); });
    normalize_l2(psi);
    return psi;
}

}  // namespace

TEST_CASE("constant function has zero periodic energy") {
    GridFunction psi = GridFunction::zeros(2, 3.0, 32, BC::periodic);
    for (double& v : psi.v) v = 0.37;
    Eigen::MatrixXd G = Eigen::MatrixXd::Identity(2, 2);
    CHECK(energy(psi, G) == 0.0);
}

TEST_CASE("cosine energy matches the closed-form integral") {
    const double R = 4.0;
    Eigen::MatrixXd G = Eigen::MatrixXd::Identity(1, 1);
    const double expect = 0.5 * (0.5 * kPi / R) * (0.5 * kPi / R);
    GridFunction psi256 = cosine_ground_state(R, 256, BC::dirichlet);
    CHECK(energy(psi256, G) == doctest::Approx(expect).epsilon(0.01));

    // refinement on a smooth interior profile (no boundary kink)
    auto bump = [R](int m) {
        GridFunction psi = GridFunction::zeros(1, R, m, BC::dirichlet);
        psi.fill([](const double* x) { return std::exp(-x[0] * x[0]); });
        normalize_l2(psi);
        return psi;
    };
    const double e256 = energy(bump(256), G), e512 = energy(bump(512), G);
    CHECK(std::fabs(e256 - e512) <= 1e-3 * e512);
}

TEST_CASE("energy gradient is the exact differential") {
    CounterRng rng(3);
    for (int d : {1, 2}) {
        Eigen::MatrixXd G(d, d);
        if (d == 1) {
            G << 1.5;
        } else {
            G << 1.2, 0.3, 0.3, 0.9;  // anisotropic with cross terms
        }
        for (BC bc : {BC::dirichlet, BC::periodic}) {
            GridFunction psi = GridFunction::zeros(d, 2.0, d == 1 ? 64 : 16, bc);
            for (double& v : psi.v) v = rng.next_unit() - 0.3;
            GridFunction grad = psi;
            energy_gradient(psi, G, grad);
            // quadratic form identity <psi, grad>_h = 2 E
            CHECK(grid_dot(psi, grad) == doctest::Approx(2.0 * energy(psi, G)).epsilon(1e-12));
            // directional finite differences
            for (int trial = 0; trial < 5; ++trial) {
                GridFunction dir = psi;
                for (double& v : dir.v) v = rng.next_unit() - 0.5;
                const double eps = 1e-6;
                GridFunction up = psi, dn = psi;
                for (std::size_t i = 0; i < psi.v.size(); ++i) {
                    up.v[i] += eps * dir.v[i];
                    dn.v[i] -= eps * dir.v[i];
                }
                const double fd = (energy(up, G) - energy(dn, G)) / (2.0 * eps);
                CHECK(grid_dot(grad, dir) == doctest::Approx(fd).epsilon(1e-7));
            }
        }
    }
}

TEST_CASE("mollifier: normalization, support, delta-likeness") {
    for (int d : {1, 2}) {
        const double h = 2.0 * 4.0 / 128;
        Mollifier k = make_mollifier(d, 0.5, h);
        CHECK(!k.under_resolved);
        double mass = 0.0;
        for (double w : k.w) mass += w;
        CHECK(mass * std::pow(h, d) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(k.radius_cells * h < 0.5);  // support strictly inside Q_delta
    }
    Mollifier tiny = make_mollifier(1, 0.001, 0.0625);
    CHECK(tiny.under_resolved);
}

TEST_CASE("mollify conserves interior mass and nonnegativity") {
    GridFunction f = GridFunction::zeros(1, 4.0, 128, BC::dirichlet);
    f.fill([](const double* x) { return std::exp(-4.0 * x[0] * x[0]); });
    const double mass0 = grid_lp_norm(f, 1.0);
    for (double delta : {0.5, 0.25, 0.125}) {
        Mollifier k = make_mollifier(1, delta, f.h());
        GridFunction g = mollify(f, k);
        double mass = 0.0, mn = 0.0;
        for (double v : g.v) {
            mass += v;
            mn = std::min(mn, v);
        }
        CHECK(mass * f.cell_volume() == doctest::Approx(mass0).epsilon(1e-12));
        CHECK(mn >= 0.0);
    }
    // under-resolved kernel: unchanged
    Mollifier k0 = make_mollifier(1, 1e-4, f.h());
    GridFunction same = mollify(f, k0);
    CHECK(same.v == f.v);
}

TEST_CASE("mollified delta spike reproduces the kernel profile") {
    GridFunction f = GridFunction::zeros(1, 2.0, 64, BC::periodic);
    const std::size_t center = 32;
    f.v[center] = 1.0 / f.cell_volume();  // unit-mass spike
    Mollifier k = make_mollifier(1, 0.5, f.h());
    GridFunction g = mollify(f, k);
    for (int off = -k.radius_cells; off <= k.radius_cells; ++off) {
        CHECK(g.v[center + static_cast<std::size_t>(off)] ==
              doctest::Approx(k.w[static_cast<std::size_t>(off + k.radius_cells)]).epsilon(1e-12));
    }
}

TEST_CASE("L1 distance to the mollified function shrinks with delta") {
    GridFunction f = GridFunction::zeros(1, 4.0, 256, BC::dirichlet);
    f.fill([](const double* x) { return std::exp(-x[0] * x[0]); });
    double prev = 1e300;
    for (double delta : {0.5, 0.25, 0.125}) {
        Mollifier k = make_mollifier(1, delta, f.h());
        const double dist = grid_l1_distance(mollify(f, k), f);
        CHECK(dist < prev);
        prev = dist;
    }
}
