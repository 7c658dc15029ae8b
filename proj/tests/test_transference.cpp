#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "heatmv/field.hpp"
#include "heatmv/kernels.hpp"
#include "heatmv/transference.hpp"
#include "oracles.hpp"

using namespace heatmv;

namespace {
const double ln2 = std::numbers::ln2;

ScalarField ou_linear() {
    return make_field("xe", 1, Equation::ou,
                      [](const SpaceTimePoint& p) { return p.x[0] * static_cast<double>(std::exp(-2 * p.t)); });
}
}  // namespace

TEST_CASE("phi fixed points and hand values") {
    auto q = phi({SpatialVector{0.0}, 0});
    CHECK(q.x[0] == 0.0);
    CHECK(q.t == 0);
    q = phi({SpatialVector{-3.5}, 0});
    CHECK(q.x[0] == doctest::Approx(-3.5).epsilon(1e-15));
    CHECK(q.t == 0);
    q = phi({SpatialVector{2.0}, Time{ln2 / 2}});
    CHECK(q.x[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(static_cast<double>(q.t) == doctest::Approx(3.0 / 16).epsilon(1e-15));
}

TEST_CASE("phi_inverse values, roundtrip, and rejection at s >= 1/4") {
    auto p = phi_inverse({SpatialVector{1.0}, Time{3} / 16});
    CHECK(p.x[0] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(static_cast<double>(p.t) == doctest::Approx(ln2 / 2).epsilon(1e-15));
    p = phi_inverse({SpatialVector{0.0}, 0});
    CHECK(p.x[0] == 0.0);
    CHECK(p.t == 0);
    CHECK_THROWS_AS((void)phi_inverse({SpatialVector{0.0}, Time{0.25}}), DomainError);
    CHECK_THROWS_AS((void)phi_inverse({SpatialVector{0.0}, Time{1}}), DomainError);

    std::mt19937_64 rng(11);
    for (std::size_t n : {1, 2}) {
        for (int i = 0; i < 1000; ++i) {
            const auto a = oracle::random_point(rng, n, 5, 3);
            const auto b = phi_inverse(phi(a));
            for (std::size_t k = 0; k < n; ++k) CHECK(std::fabs(b.x[k] - a.x[k]) <= 1e-12 * std::fabs(a.x[k]));
            CHECK(std::fabs(static_cast<double>(b.t - a.t)) <= 1e-12 * std::fabs(static_cast<double>(a.t)));
        }
    }
}

TEST_CASE("phi image lies below 1/4 and is increasing in t") {
    Time prev = -1e9L;
    for (int i = -400; i <= 400; ++i) {
        const Time t = static_cast<Time>(i) / 100;
        const Time s = phi_time(t);
        CHECK(s < Time{0.25});
        CHECK(s > prev);
        prev = s;
    }
}

TEST_CASE("heat_to_ou on closed forms") {
    const auto one = make_field("one", 1, Equation::heat, [](const SpaceTimePoint&) { return 1.0; });
    const auto lin = make_field("y", 1, Equation::heat, [](const SpaceTimePoint& p) { return p.x[0]; });
    const auto poly = make_field("y2+2s", 1, Equation::heat,
                                 [](const SpaceTimePoint& p) { return p.x[0] * p.x[0] + 2 * static_cast<double>(p.t); });
    const auto U1 = heat_to_ou(one), U2 = heat_to_ou(lin), U3 = heat_to_ou(poly);
    CHECK(U2.equation() == Equation::ou);
    CHECK(U2.id() == "T(y)");
    std::mt19937_64 rng(3);
    for (int i = 0; i < 100; ++i) {
        const auto p = oracle::random_point(rng, 1, 1.5, 0.6);
        const double e2 = std::exp(-2 * static_cast<double>(p.t)), e4 = e2 * e2;
        CHECK(U1(p) == 1.0);
        CHECK(U2(p) == doctest::Approx(p.x[0] * e2).epsilon(1e-13));
        CHECK(U3(p) == doctest::Approx(p.x[0] * p.x[0] * e4 + (1 - e4) / 2).epsilon(1e-12));
    }
    // The pulled-back heat polynomial solves the OU equation.
    CHECK(std::fabs(operator_residual(U3, Operator::ou, {SpatialVector{0.7}, Time{0.2}})) < 1e-5);
    // A target whose image leaves u's domain is rejected.
    const auto small = make_field("s", 1, Equation::heat, DomainBox::cube(1, 1, -0.1, 0.1),
                                  [](const SpaceTimePoint&) { return 0.0; });
    CHECK_THROWS_AS((void)heat_to_ou(small, DomainBox::cube(1, 1, -1, 1)), DomainError);
}

TEST_CASE("ou_from_heat_inverse inverts heat_to_ou") {
    const auto c = make_field("c", 1, Equation::ou, [](const SpaceTimePoint&) { return 2.5; });
    const auto target = DomainBox::cube(1, 2, -0.5, 0.2);
    const auto u0 = ou_from_heat_inverse(c, target);
    const auto u = ou_from_heat_inverse(ou_linear(), target);
    const auto back = heat_to_ou(u, DomainBox::cube(1, 1, -0.1, 0.1));
    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i) {
        SpaceTimePoint q{SpatialVector{std::uniform_real_distribution<double>(-2, 2)(rng)},
                         std::uniform_real_distribution<double>(-0.5, 0.2)(rng)};
        CHECK(u0(q) == 2.5);
        CHECK(u(q) == doctest::Approx(q.x[0]).epsilon(1e-12));
        SpaceTimePoint p{SpatialVector{std::uniform_real_distribution<double>(-1, 1)(rng)},
                         std::uniform_real_distribution<double>(-0.1, 0.1)(rng)};
        CHECK(std::fabs(back(p) - ou_linear()(p)) <= 1e-12 * (1 + std::fabs(ou_linear()(p))));
    }
    CHECK_THROWS_AS((void)ou_from_heat_inverse(c, DomainBox::cube(1, 1, 0, 0.3)), DomainError);
}

TEST_CASE("Gaussian weight transform") {
    const auto one = make_field("one", 1, Equation::ou, [](const SpaceTimePoint&) { return 1.0; });
    const auto V1 = ou_to_hermite(one);
    CHECK(V1.equation() == Equation::hermite);
    CHECK(V1({SpatialVector{0.0}, 0}) == 1.0);
    const auto V = ou_to_hermite(ou_linear());
    const auto zero = make_field("zero", 2, Equation::hermite, [](const SpaceTimePoint&) { return 0.0; });
    const auto w2 = make_field("w", 2, Equation::hermite, [](const SpaceTimePoint& p) { return hermite_weight(p); });
    std::mt19937_64 rng(7);
    for (int i = 0; i < 100; ++i) {
        const auto p = oracle::random_point(rng, 1, 3, 2);
        const double x = p.x[0], t = static_cast<double>(p.t);
        CHECK(V1(p) == doctest::Approx(std::exp(-t - x * x / 2)).epsilon(1e-14));
        CHECK(V(p) == doctest::Approx(x * std::exp(-3 * t - x * x / 2)).epsilon(1e-13));
        const double U = ou_linear()(p);
        CHECK(std::fabs(hermite_to_ou(V)(p) - U) <= 1e-12 * std::fabs(U));
        const auto q = oracle::random_point(rng, 2, 3, 2);
        CHECK(hermite_to_ou(zero)(q) == 0.0);
        CHECK(hermite_to_ou(w2)(q) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("operator_residual") {
    const SpaceTimePoint p{SpatialVector{0.4}, Time{0.3}};
    CHECK(std::fabs(operator_residual(ou_linear(), Operator::ou, p, 1e-3)) <= 1e-6);

    // Fundamental solution: residual decays like h^2.
    const auto Phi = make_field("Phi", 1, Equation::heat, [](const SpaceTimePoint& q) {
        return fundamental_solution(SpatialVector{q.x[0] - 0.2}, q.t + 0.5);
    });
    const double e1 = std::fabs(operator_residual(Phi, Operator::heat, p, 0.02));
    const double e2 = std::fabs(operator_residual(Phi, Operator::heat, p, 0.01));
    CHECK(e1 > 1e-8);
    CHECK(oracle::order(e1, e2) >= 1.9);

    // H_2 e^{-x^2/2} e^{-5t}: eigenvalue 5 of -d^2 + x^2.
    const auto H2 = make_field("H2", 1, Equation::hermite, [](const SpaceTimePoint& q) {
        const double x = q.x[0];
        return (4 * x * x - 2) * std::exp(-x * x / 2 - 5 * static_cast<double>(q.t));
    });
    for (double h : {0.02, 0.01, 0.005}) {
        const double r = std::fabs(operator_residual(H2, Operator::hermite, p, h));
        CHECK(r <= 40 * h * h);
    }
    CHECK_THROWS_AS((void)operator_residual(ou_linear(), Operator::ou, {SpatialVector{7.999}, 0}, 1e-3), DomainError);
    CHECK_THROWS_AS((void)operator_for(Equation::none), PreconditionError);
}

TEST_CASE("transference identities") {
    const auto one = make_field("one", 1, Equation::ou, [](const SpaceTimePoint&) { return 1.0; });
    const SpaceTimePoint p{SpatialVector{0.5}, Time{0.1}};
    auto c = transference_identity_check(one, p);
    CHECK(std::fabs(c.ou_lhs) < 1e-9);
    CHECK(std::fabs(c.ou_rhs) < 1e-9);
    CHECK(std::fabs(c.hermite_lhs) < 1e-6);
    CHECK(std::fabs(c.hermite_rhs) < 1e-9);

    // x^2 is not an OU temperature: (d_t - L) x^2 = -2 + 4x^2.
    const auto sq = make_field("x2", 1, Equation::none, [](const SpaceTimePoint& q) { return q.x[0] * q.x[0]; });
    std::vector<double> gaps_ou, gaps_h;
    for (double h : {0.02, 0.01}) {
        c = transference_identity_check(sq, p, h);
        CHECK(c.ou_lhs == doctest::Approx(-2 + 4 * 0.25).epsilon(1e-6));
        CHECK(std::fabs(c.ou_rhs) > 0.1);
        gaps_ou.push_back(std::fabs(c.ou_lhs - c.ou_rhs));
        gaps_h.push_back(std::fabs(c.hermite_lhs - c.hermite_rhs));
    }
    CHECK(gaps_ou[1] < 1e-2);
    CHECK(oracle::order(gaps_ou[0], gaps_ou[1]) >= 1.9);
    CHECK(oracle::order(gaps_h[0], gaps_h[1]) >= 1.9);
}

TEST_CASE("Jacobian of phi") {
    for (std::size_t n : {1, 2}) {
        SpaceTimePoint p{SpatialVector(n, 0.3), Time{0.4}};
        const double exact = std::exp(-2.0 * (static_cast<double>(n) + 2) * 0.4);
        const double e1 = std::fabs(phi_jacobian_fd(p, 0.02) - exact);
        const double e2 = std::fabs(phi_jacobian_fd(p, 0.01) - exact);
        CHECK(e2 < 1e-3 * exact);
        CHECK(oracle::order(e1, e2) >= 1.9);
    }
}
