#include <doctest.h>

#include <cmath>
#include <numbers>

#include "heatmv/solvers.hpp"
#include "heatmv/transference.hpp"
#include "heatmv/verify.hpp"
#include "oracles.hpp"

using namespace heatmv;

namespace {

ScalarField zero(std::size_t n) {
    return make_field("zero", n, Equation::none, [](const SpaceTimePoint&) { return 0.0; });
}

ScalarField gaussian() {
    return make_field("gauss", 1, Equation::none,
                      [](const SpaceTimePoint& p) { return std::exp(-4 * p.x[0] * p.x[0]); });
}

GridSolution bump_solve(Equation eq, double theta = 0.5) {
    return solve_fd(eq, DomainBox::cube(1, 3, 0, 0.5), gaussian(), zero(1), {theta, 0.05, 0.0125});
}

/// Slab of K points below the point mass P: 9 x 5 points, `gap` under P.
std::vector<SpaceTimePoint> slab(const SpaceTimePoint& P, double gap) {
    std::vector<SpaceTimePoint> K;
    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 5; ++j) {
            SpatialVector x = P.x;
            x[0] += -0.4 + 0.1 * i;
            K.push_back({x, gap > 0 ? P.t - Time{gap} - Time{0.1} + Time{0.025} * j : P.t});
        }
    return K;
}

}  // namespace

TEST_CASE("weak maximum principle on solver output") {
    const auto g = bump_solve(Equation::heat);
    const auto rep = check_weak_max(g);
    CHECK_FALSE(rep.violation);
    CHECK_FALSE(rep.not_applicable);
    CHECK(rep.parabolic_boundary_max == 1.0);
    CHECK(rep.interior_max < 1.0);
    CHECK(rep.tolerance == doctest::Approx(10 * g.truncation_estimate));

    const auto lin = catalog("ou.linear");
    const auto gl = solve_fd(Equation::ou, DomainBox::cube(1, 2, 0, 0.5), lin, lin, {0.5, 0.05, 0.0125});
    const auto rl = check_weak_max(gl);
    CHECK_FALSE(rl.violation);
    CHECK(rl.parabolic_boundary_max == doctest::Approx(2.0));
    CHECK(rl.interior_max <= rl.parabolic_boundary_max);

    const auto mid = check_weak_max(g, Time{0.25});
    CHECK(mid.t0 == Time{0.25});
    CHECK(mid.interior_location.t <= Time{0.25});
    CHECK_THROWS_AS((void)check_weak_max(g, Time{0.7}), PreconditionError);
}

TEST_CASE("weak maximum principle: Hermite caveat and corruption") {
    const auto neg = catalog("hermite.neg-ground");
    const auto gh = solve_fd(Equation::hermite, DomainBox::cube(1, 4, 0, 0.5), neg, neg, {0.5, 0.05, 0.0125});
    CHECK(check_weak_max(gh).not_applicable);
    CHECK_FALSE(check_weak_max(gh).violation);

    auto g = bump_solve(Equation::heat);
    g.values[10 * g.nodes_per_slice() + g.nodes[0] / 2] += 1 + 2 * check_weak_max(g).tolerance;
    CHECK(check_weak_max(g).violation);
}

TEST_CASE("strong maximum principle") {
    const auto one = make_field("one", 1, Equation::heat, [](const SpaceTimePoint&) { return 1.0; });
    const auto gc = solve_fd(Equation::heat, DomainBox::cube(1, 1, 0, 0.2), one, one, {0.5, 0.1, 0.05});
    const auto rc = check_strong_max(gc);
    CHECK(rc.attaining == rc.checked);
    CHECK(rc.checked > 0);
    CHECK_FALSE(rc.violation());

    const auto k0 = catalog("hermite.eig.k0");
    const auto gk = solve_fd(Equation::hermite, DomainBox::cube(1, 4, 0, 0.5), k0, k0, {0.5, 0.05, 0.0125});
    const auto rk = check_strong_max(gk);
    CHECK(rk.attaining == 0);
    CHECK_FALSE(rk.violation());

    auto gb = bump_solve(Equation::heat);
    const std::size_t k = gb.steps / 2, f = gb.nodes[0] / 2;
    gb.values[k * gb.nodes_per_slice() + f] = 5.0;
    const auto rb = check_strong_max(gb);
    REQUIRE(rb.violation());
    CHECK(rb.flagged.front().t == gb.time_at(k));
    CHECK(rb.witnesses.front().t < rb.flagged.front().t);
    CHECK_FALSE(check_strong_max(bump_solve(Equation::heat)).violation());
}

TEST_CASE("infinite propagation") {
    for (auto eq : {Equation::heat, Equation::ou, Equation::hermite}) {
        const auto rep = check_infinite_propagation(bump_solve(eq, 1.0));
        CHECK(rep.positive());
        CHECK(rep.interior_min > 0);
        CHECK(rep.t_probe == doctest::Approx(0.0125));
    }
    const auto z = solve_fd(Equation::heat, DomainBox::cube(1, 1, 0, 0.2), zero(1), zero(1), {1.0, 0.1, 0.05});
    const auto rz = check_infinite_propagation(z);
    CHECK(rz.degenerate);
    CHECK_FALSE(rz.positive());
    const auto neg = make_field("neg", 1, Equation::none, [](const SpaceTimePoint& p) { return -1 + p.x[0] * p.x[0]; });
    const auto gn = solve_fd(Equation::heat, DomainBox::cube(1, 1, 0, 0.2), neg, zero(1), {1.0, 0.1, 0.05});
    CHECK_THROWS_AS((void)check_infinite_propagation(gn), PreconditionError);
}

TEST_CASE("Harnack ratio with a point mass") {
    const auto box = DomainBox::cube(1, 3, -0.25, 0.5);
    const RasterDomain E(box, 32.0);
    const SpaceTimePoint P{SpatialVector{0.0}, Time{0.3}};
    const auto K = slab(P, 0.1);
    const auto one = make_field("one", 1, Equation::ou, box, [](const SpaceTimePoint&) { return 1.0; });
    const auto r1 = harnack_ratio(one, K, {P}, &E);
    CHECK(r1.ratio == 1.0);
    CHECK(r1.lambda_validated);
    CHECK(r1.samples == K.size());

    // K above the point mass is not in its Lambda set.
    std::vector<SpaceTimePoint> above{{SpatialVector{0.0}, Time{0.4}}};
    CHECK_THROWS_AS((void)harnack_ratio(one, above, {P}, &E), PreconditionError);

    const auto bump = make_field("b", 1, Equation::none, box, [](const SpaceTimePoint& p) {
        return p.t < 0.25 ? 1.0 : 0.0;
    });
    const auto ru = harnack_ratio(bump, K, {P});
    CHECK(ru.unbounded);
    CHECK(std::isinf(ru.ratio));
    const auto neg = make_field("n", 1, Equation::none, box, [](const SpaceTimePoint&) { return -1.0; });
    CHECK_THROWS_AS((void)harnack_ratio(neg, K, {P}), PreconditionError);
    CHECK_THROWS_AS((void)harnack_ratio(one, {}, {P}), PreconditionError);

    // Uniform measure on several points.
    const auto lin = make_field("lin", 1, Equation::none, box, [](const SpaceTimePoint& p) { return 2 + p.x[0]; });
    const auto ravg = harnack_ratio(lin, {{SpatialVector{1.0}, 0}}, {{SpatialVector{-1.0}, 0}, {SpatialVector{1.0}, 0}});
    CHECK(ravg.ratio == doctest::Approx(1.5));
}

TEST_CASE("pullback family") {
    const auto box = DomainBox::cube(1, 3, -0.25, 0.5);
    const auto small = pullback_family(1, 5, box);
    const auto big = pullback_family(1, 9, box);
    const SpaceTimePoint p{SpatialVector{0.3}, Time{0.1}};
    for (std::size_t i = 0; i < small.size(); ++i) CHECK(small[i](p) == big[i + 2](p));
    for (const auto& U : big) {
        CHECK(U(p) > 0);
        CHECK(std::fabs(operator_residual(U, Operator::ou, p, 1e-3)) < 1e-5);
    }
    CHECK_THROWS_AS((void)pullback_family(1, 0, box), PreconditionError);
    CHECK_THROWS_AS((void)pullback_family(1, 3, DomainBox::cube(1, 3, -2, 0.5), 0.25, 0.5), PreconditionError);
}

TEST_CASE("empirical kappa: stable below t0, degenerate on t0") {
    const auto box = DomainBox::cube(1, 3, -0.25, 0.5);
    const RasterDomain E(box, 32.0);
    const SpaceTimePoint P{SpatialVector{0.0}, Time{0.3}};
    const auto K = slab(P, 0.1);
    const auto k41 = empirical_kappa(pullback_family(1, 41, box), K, {P}, &E);
    const auto k81 = empirical_kappa(pullback_family(1, 81, box), K, {P}, &E);
    CHECK(std::isfinite(k81.kappa_hat));
    CHECK(k81.kappa_hat >= k41.kappa_hat);
    CHECK(std::fabs(k81.kappa_hat / k41.kappa_hat - 1) <= 0.1);
    CHECK(k81.ratios.size() == 81);

    const auto on = slab(P, 0);
    const auto d41 = empirical_kappa(pullback_family(1, 41, box), on, {P});
    const auto d81 = empirical_kappa(pullback_family(1, 81, box), on, {P});
    CHECK(d81.kappa_hat > k81.kappa_hat);
    CHECK(d81.kappa_hat / d41.kappa_hat - 1 > 0.1);
}

TEST_CASE("Harnack over Gamma cylinders") {
    const auto one = make_field("one", 2, Equation::ou, [](const SpaceTimePoint&) { return 1.0; });
    const SpatialVector x0{0.2, -0.1};
    for (double R : {0.125, 0.5})
        for (double q : {0.5, 1.0, 2.0}) {
            const auto rep = harnack_mintq(one, x0, Time{0.5}, R, q, 1 << 15);
            CHECK(rep.lhs == 1.0);
            CHECK(std::fabs(rep.ratio - 1) <= 3 * rep.ratio_se + 1e-12);
        }
    // Power means grow with q, so the ratio does not increase.
    const auto U = pullback_family(1, 1, DomainBox::cube(1, 6, -0.6, 1), 0.25, 3.0).front();
    double prev = std::numeric_limits<double>::infinity();
    for (double q : {0.5, 1.0, 2.0, 4.0}) {
        const auto rep = harnack_mintq(U, SpatialVector{0.3}, Time{0.5}, 0.25, q, 1 << 15, 9);
        CHECK(std::isfinite(rep.ratio));
        CHECK(rep.ratio <= prev * (1 + 1e-12));
        prev = rep.ratio;
    }
    CHECK_THROWS_AS((void)harnack_mintq(one, x0, Time{0.5}, 1.5, 1.0), PreconditionError);
    CHECK_THROWS_AS((void)harnack_mintq(one, x0, Time{0.5}, 0.5, 0.0), PreconditionError);
    const auto tiny = make_field("tiny", 2, Equation::ou, DomainBox::cube(2, 1, 0, 1), [](const SpaceTimePoint&) { return 1.0; });
    CHECK_THROWS_AS((void)harnack_mintq(tiny, x0, Time{0.5}, 0.5, 1.0), DomainError);
}

TEST_CASE("Gamma measure") {
    const double pi = std::numbers::pi;
    CHECK(gamma_measure(1, 0, 0.5) == doctest::Approx(2 * 0.5 * std::expm1(1.0) / 4));
    CHECK(gamma_measure(2, Time{0.25}, 1.0) == doctest::Approx(pi * std::exp(-1.0) * std::exp(-1.0) * std::expm1(4.0) / 4));
    for (std::size_t n : {1, 2}) {
        const SpatialVector x0(n, 0.3);
        const auto [m, se] = gamma_measure_mc(x0, Time{0.4}, 0.6, 200000, 5);
        CHECK(std::fabs(m - gamma_measure(n, Time{0.4}, 0.6)) <= 3 * se);
        const auto fit = gamma_measure_fit(x0, Time{0.4});
        CHECK(std::fabs(fit.slope / static_cast<double>(n + 2) - 1) <= 0.05);
        CHECK(fit.radii.size() == 8);
    }
}

TEST_CASE("Gamma sandwich") {
    CHECK(gamma_sandwich_lambda() == doctest::Approx(std::sqrt(std::expm1(4.0) / 4)));
    for (double R : {0.125, 0.5, 1.0}) {
        const auto rep = gamma_sandwich(SpatialVector{0.4, 0.2}, Time{0.3}, R, 4.0, 100000, 3);
        CHECK(rep.holds());
        CHECK(rep.r == doctest::Approx(R * std::exp(-0.6)));
    }
    const auto bad = gamma_sandwich(SpatialVector{0.4}, Time{0.3}, 1.0, 3.0, 100000, 3);
    CHECK(bad.outer_violations > 0);
    CHECK(bad.inner_violations == 0);
}

TEST_CASE("radial bounds on Gamma_1") {
    const auto rep = gamma_radial_bounds(SpatialVector{2.0, 0.0}, Time{0.5}, 1.0, 100000, 4);
    CHECK(rep.c1_reference == doctest::Approx(std::exp(-2.0) * 0.5));
    CHECK(rep.min_ratio >= rep.c1_reference);
    CHECK(rep.max_ratio <= 1.5);
    CHECK(rep.max_ratio <= 2.0);
    CHECK_THROWS_AS((void)gamma_radial_bounds(SpatialVector{0.0}, Time{0.5}, 1.0, 100), PreconditionError);
}
