#include <doctest.h>

#include <cmath>
#include <random>

#include "heatmv/growth.hpp"
#include "heatmv/types.hpp"

using namespace heatmv;

namespace {

const std::vector<std::string> kTen = {"const:1", "pow:0.5", "pow:1",   "pow:1.5",     "rlog:1",
                                       "rlog:2",  "iterlog", "osc:1",   "osc-bounded", "rsin"};

double horizon(const std::string& spec) {
    for (const auto& e : growth_catalog())
        if (e.spec == spec) return e.default_r_max;
    return 1 << 12;
}

}  // namespace

TEST_CASE("dyadic grid") {
    const auto g = dyadic_grid(1 << 20);
    CHECK(g.size() == 20 * 64 + 1);
    CHECK(g.front() == 1.0);
    CHECK(g.back() == 1 << 20);
    for (std::size_t k = 0; k <= 20; ++k) CHECK(g[k * 64] == std::ldexp(1.0, static_cast<int>(k)));
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
    CHECK(dyadic_grid(1000, 4).back() <= 1000);
    CHECK(dyadic_grid(1000, 4).back() == doctest::Approx(std::exp2(39.0 / 4)));
    CHECK_THROWS_AS((void)dyadic_grid(0.5), PreconditionError);
}

TEST_CASE("minorant is a non-decreasing idempotent minorant") {
    for (const auto& spec : kTen) {
        const auto p = growth_from_spec(spec, horizon(spec));
        const auto grid = dyadic_grid(p.r_max());
        const auto pb = minorant(p, grid);
        INFO(spec);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            CHECK(pb[i] <= p(grid[i]));
            if (i) CHECK(pb[i] >= pb[i - 1]);
        }
        CHECK(suffix_minimum(pb) == pb);
    }
    CHECK_THROWS_AS((void)suffix_minimum({}), PreconditionError);
}

TEST_CASE("minorant equals p for non-decreasing p") {
    for (const char* spec : {"const:1", "pow:1", "pow:2", "rlog:1", "iterlog"}) {
        const auto p = growth_from_spec(spec, 1 << 16);
        const auto grid = dyadic_grid(p.r_max());
        const auto pb = minorant(p, grid);
        for (std::size_t i = 0; i < grid.size(); ++i) CHECK(pb[i] == p(grid[i]));
    }
}

TEST_CASE("minorant of r(2 + sin r) matches a brute-force tail minimum") {
    const auto p = growth_from_spec("rsin", 256);
    const auto grid = dyadic_grid(256);
    const auto pb = minorant(p, grid);
    std::mt19937_64 rng(41);
    std::uniform_int_distribution<std::size_t> pick(0, grid.size() - 1);
    for (int k = 0; k < 50; ++k) {
        const std::size_t i = pick(rng);
        double m = p(grid[i]);
        for (std::size_t j = i; j < grid.size(); ++j) m = std::min(m, p(grid[j]));
        CHECK(pb[i] == m);
    }
}

TEST_CASE("ell_j = 2^j for non-decreasing p") {
    for (const char* spec : {"pow:1", "pow:1.5", "rlog:2", "const:3"}) {
        const auto seq = tacklind_sequence(growth_from_spec(spec, 1 << 20), 20);
        CHECK_FALSE(seq.truncated);
        REQUIRE(seq.ell.size() == 21);
        for (std::size_t j = 0; j <= 20; ++j) CHECK(seq.ell[j] == std::ldexp(1.0, static_cast<int>(j)));
    }
    const auto partial = tacklind_sequence(growth_from_spec("pow:1", 1 << 10), 20);
    CHECK(partial.truncated);
    CHECK(partial.ell.size() == 11);
}

TEST_CASE("ell_j defining conditions on oscillating p") {
    for (const char* spec : {"osc:1", "osc-bounded", "rsin"}) {
        const auto p = growth_from_spec(spec, horizon(spec));
        const auto grid = dyadic_grid(p.r_max());
        const auto pb = minorant(p, grid);
        const auto seq = tacklind_sequence(p, 40);
        INFO(spec);
        REQUIRE(seq.ell.size() >= 3);
        for (std::size_t j = 1; j < seq.ell.size(); ++j) {
            CHECK(seq.ell[j] >= 2 * seq.ell[j - 1]);
            const std::size_t i = std::lower_bound(grid.begin(), grid.end(), seq.ell[j]) - grid.begin();
            CHECK(std::fabs(pb[i] - p(grid[i])) <= kMinorantEqualityTol * p(grid[i]));
            // Smallest such point: no earlier grid point at or above 2 ell_{j-1} qualifies.
            for (std::size_t q = 0; q < i; ++q)
                if (grid[q] >= 2 * seq.ell[j - 1]) CHECK(std::fabs(pb[q] - p(grid[q])) > kMinorantEqualityTol * p(grid[q]));
        }
    }
}

TEST_CASE("closed-form partial sums for p = r") {
    const auto rep = divergence_diagnostic(growth_from_spec("pow:1", 1 << 20));
    CHECK(rep.r_max == 1 << 20);
    CHECK(rep.ell.size() == 21);
    CHECK(rep.ell_sum == doctest::Approx(20.0).epsilon(1e-15));
    CHECK(rep.integral_p == doctest::Approx(20 * std::log(2.0)).epsilon(1e-12));
    CHECK(rep.integral_pbar == rep.integral_p);
    CHECK(rep.verdict == GrowthVerdict::diverging);
    CHECK(rep.octave_increments.size() == 20);
}

TEST_CASE("integrals against closed forms") {
    const double R = 1 << 20;
    const auto a = divergence_diagnostic(growth_from_spec("pow:1.2", R));
    CHECK(a.integral_p == doctest::Approx((1 - std::pow(R, -0.2)) / 0.2).epsilon(1e-5));
    CHECK(a.verdict == GrowthVerdict::converging);
    // int_1^R dr / (r ln(e + r)) is close to ln ln R; compare to a fine Simpson sum in u = ln r.
    const auto b = divergence_diagnostic(growth_from_spec("rlog:1", R));
    const double U = std::log(R);
    double ref = 0;
    const int n = 200000;
    for (int i = 0; i <= n; ++i) {
        const double u = U * i / n;
        const double w = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
        ref += w / std::log(std::exp(1.0) + std::exp(u));
    }
    ref *= U / n / 3;
    CHECK(b.integral_p == doctest::Approx(ref).epsilon(1e-5));
    CHECK(b.verdict == GrowthVerdict::diverging);
}

TEST_CASE("sandwich bounds hold on every ell interval") {
    for (const auto& e : growth_catalog()) {
        const auto rep = divergence_diagnostic(growth_from_spec(e.spec, e.default_r_max));
        INFO(e.spec);
        CHECK(rep.sandwich.size() + 1 == rep.ell.size());
        for (const auto& row : rep.sandwich) CHECK(row.holds());
    }
}

TEST_CASE("monotone p with gamma 0 has identical integrals") {
    for (const char* spec : {"pow:0.5", "pow:2", "rlog:1", "iterlog", "const:2"}) {
        const auto p = growth_from_spec(spec, 1 << 18);
        CHECK(p.gamma() == 0);
        const auto rep = divergence_diagnostic(p);
        CHECK(rep.integral_p == rep.integral_pbar);
    }
}

TEST_CASE("catalog verdicts match the analytic class") {
    for (const auto& e : growth_catalog()) {
        if (!e.analytic) continue;
        const auto rep = divergence_diagnostic(growth_from_spec(e.spec, e.default_r_max));
        INFO(e.spec << " slope " << rep.tail_slope);
        CHECK(rep.verdict == *e.analytic);
    }
}

TEST_CASE("shift by lambda r") {
    const double R = 1 << 20;
    const auto lin = shift_compare(growth_from_spec("pow:1", R), 1.0);
    CHECK(lin.base.verdict == GrowthVerdict::diverging);
    CHECK(lin.shifted.verdict == GrowthVerdict::diverging);
    for (double q : lin.increment_ratio) CHECK(q == doctest::Approx(0.5).epsilon(1e-12));

    const auto p15 = shift_compare(growth_from_spec("pow:1.5", R), 1.0);
    const double oracle = 2 * (std::log(std::sqrt(R) / (std::sqrt(R) + 1)) + std::log(2.0));
    CHECK(p15.shifted.integral_p == doctest::Approx(oracle).epsilon(1e-5));
    CHECK(p15.base.verdict == GrowthVerdict::converging);
    CHECK(p15.shifted.verdict == GrowthVerdict::converging);
    CHECK_THROWS_AS((void)shift_compare(growth_from_spec("pow:1", R), 0.0), PreconditionError);
}

TEST_CASE("bounded lim inf keeps the ell sum growing") {
    const auto p = growth_from_spec("osc-bounded", 1 << 20);
    const auto lo = divergence_diagnostic(p, double(1 << 10));
    const auto hi = divergence_diagnostic(p);
    CHECK(hi.verdict == GrowthVerdict::diverging);
    CHECK(hi.ell_sum > lo.ell_sum);
    CHECK(hi.integral_pbar > 2 * lo.integral_pbar);
}

TEST_CASE("verdict rule") {
    std::vector<double> flat(20, 1.0), geo, harm;
    for (int k = 1; k <= 20; ++k) {
        geo.push_back(std::pow(0.8, k));
        harm.push_back(1.0 / k);
    }
    double s = 0;
    CHECK(verdict_from_increments(flat, &s) == GrowthVerdict::diverging);
    CHECK(s == doctest::Approx(1.0));
    CHECK(verdict_from_increments(geo) == GrowthVerdict::converging);
    CHECK(verdict_from_increments(harm) == GrowthVerdict::diverging);
    CHECK(verdict_from_increments({1, 1, 1}) == GrowthVerdict::inconclusive);
    CHECK(to_string(GrowthVerdict::diverging) == "diverging-trend");
    CHECK(to_string(GrowthVerdict::converging) == "converging-trend");
}

TEST_CASE("growth function validation") {
    CHECK_THROWS_AS(GrowthFunction("neg", [](double r) { return 1 - r; }, 0, 16), PreconditionError);
    CHECK_THROWS_AS(GrowthFunction("dec", [](double r) { return 1 / r; }, 0.5, 16), PreconditionError);
    CHECK_NOTHROW(GrowthFunction("dec", [](double r) { return 1 / r; }, 1.0, 16));
    CHECK_THROWS_AS(GrowthFunction("short", [](double) { return 1.0; }, 0, 1.5), PreconditionError);
    CHECK_THROWS_AS(GrowthFunction("rsin", [](double r) { return r * (2 + std::sin(r)); }, 0, 256), PreconditionError);
    CHECK_THROWS_AS((void)growth_from_spec("exp:1", 16), PreconditionError);
    CHECK_THROWS_AS((void)growth_from_spec("pow:x", 16), PreconditionError);
    const auto rs = growth_from_spec("rsin", 256);
    CHECK(rs.gamma() > 0);
    CHECK_THROWS_AS((void)divergence_diagnostic(rs, 1024.0), PreconditionError);
}
