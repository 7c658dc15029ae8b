#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace heatmv {

/// p : [1, r_max] -> (0, inf) with r^gamma p(r) non-decreasing.
class GrowthFunction {
public:
    using Evaluator = std::function<double(double)>;

    /// Validates positivity and the gamma-monotonicity on the dyadic sample grid;
    /// throws PreconditionError on failure.
    GrowthFunction(std::string id, Evaluator p, double gamma, double r_max);

    double operator()(double r) const { return p_(r); }
    [[nodiscard]] const std::string& id() const noexcept { return id_; }
    [[nodiscard]] double gamma() const noexcept { return gamma_; }
    [[nodiscard]] double r_max() const noexcept { return r_max_; }
    [[nodiscard]] const Evaluator& evaluator() const noexcept { return p_; }

private:
    std::string id_;
    Evaluator p_;
    double gamma_;
    double r_max_;
};

/// Geometric grid on [1, r_max]: `per_octave` points per doubling, powers of two exact.
/// r_max is rounded down to the grid.
[[nodiscard]] std::vector<double> dyadic_grid(double r_max, std::size_t per_octave = 64);

/// Suffix minimum of p over the grid: the largest non-decreasing minorant on the samples.
[[nodiscard]] std::vector<double> minorant(const GrowthFunction& p, const std::vector<double>& grid);
/// Same on raw samples.
[[nodiscard]] std::vector<double> suffix_minimum(const std::vector<double>& values);

struct TacklindSequence {
    std::vector<double> ell;
    /// Fewer than the requested terms fit below r_max.
    bool truncated = false;
};

/// Relative tolerance for p-bar(l) = p(l) on closed-form evaluators.
inline constexpr double kMinorantEqualityTol = 1e-9;

/// ell_0 = 1; ell_j = smallest grid point >= 2 ell_{j-1} where p-bar equals p.
[[nodiscard]] TacklindSequence tacklind_sequence(const GrowthFunction& p, std::size_t count,
                                                 std::size_t per_octave = 64);

enum class GrowthVerdict { diverging, converging, inconclusive };

[[nodiscard]] std::string to_string(GrowthVerdict v);

struct SandwichRow {
    double ell_prev, ell;
    double lower, integral, upper;
    [[nodiscard]] bool holds(double rel = 1e-9) const {
        return integral >= lower * (1 - rel) && integral <= upper * (1 + rel);
    }
};

struct DivergenceReport {
    double r_max = 0.0;
    double integral_p = 0.0;     // int_1^R dr / p
    double integral_pbar = 0.0;  // int_1^R dr / p-bar
    double ell_sum = 0.0;        // sum_{j >= 1, ell_j <= R} ell_j / p(ell_j)
    std::vector<double> ell;
    /// int dr / p-bar over [2^{k-1}, 2^k], k = 1..K.
    std::vector<double> octave_increments;
    /// Least-squares slope of ln(k Delta_k) against ln k over the upper half of octaves.
    double tail_slope = 0.0;
    GrowthVerdict verdict = GrowthVerdict::inconclusive;
    std::vector<SandwichRow> sandwich;
};

/// Finite-range quantities and a trend verdict. The verdict is a heuristic:
/// diverging if the slope is >= -0.6 or the upper half's max k Delta_k is at least the lower
/// half's, converging if the slope is <= -0.8, inconclusive in between.
[[nodiscard]] DivergenceReport divergence_diagnostic(const GrowthFunction& p, std::optional<double> r_max = {},
                                                     std::size_t per_octave = 64);

[[nodiscard]] GrowthVerdict verdict_from_increments(const std::vector<double>& increments, double* slope = nullptr);

struct ShiftReport {
    double lambda = 0.0;
    DivergenceReport base;
    DivergenceReport shifted;
    /// Delta_k(p + lambda r) / Delta_k(p).
    std::vector<double> increment_ratio;
};

/// Diagnostic of p and of p + lambda r.
[[nodiscard]] ShiftReport shift_compare(const GrowthFunction& p, double lambda, std::optional<double> r_max = {});

/// Built-in growth catalog. Specs:
///   pow:a       r^a
///   rlog:k      r ln^k(e + r)
///   iterlog     r ln(e + r) ln(e + ln(e + r))
///   const:c     c
///   osc:k       r (2 + sin(k ln r))
///   osc-bounded 1 + r (1 + sin(ln r))        (bounded lim inf)
///   rsin        r (2 + sin r)
/// Oscillating specs get gamma from a sampled sup of -r p'/p, padded by 10%.
[[nodiscard]] GrowthFunction growth_from_spec(const std::string& spec, double r_max);

struct GrowthCatalogEntry {
    std::string spec;
    double default_r_max;
    /// Known divergence of int_1^inf dr / p-bar when the class is decidable in closed form.
    std::optional<GrowthVerdict> analytic;
    std::string note;
};
[[nodiscard]] const std::vector<GrowthCatalogEntry>& growth_catalog();

}  // namespace heatmv
