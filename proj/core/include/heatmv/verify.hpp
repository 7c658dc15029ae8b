#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "heatmv/field.hpp"
#include "heatmv/geometry.hpp"
#include "heatmv/solvers.hpp"

namespace heatmv {

struct MaxPrincipleReport {
    double interior_max = 0.0;
    SpaceTimePoint interior_location;
    double parabolic_boundary_max = 0.0;
    bool violation = false;
    double tolerance = 0.0;
    /// Hermite solution with a negative interior sup: the weak maximum principle says nothing.
    bool not_applicable = false;
    Time t0 = 0;
};

/// Interior nodes with 0 < t <= t0 against the initial slice and the lateral boundary up to t0.
/// Tolerance is 10x the scheme truncation estimate (floored at 1e-12 times the data scale).
/// t0 defaults to the final time. Throws PreconditionError when t0 is outside the grid.
[[nodiscard]] MaxPrincipleReport check_weak_max(const GridSolution& g, std::optional<Time> t0 = std::nullopt);

struct StrongMaxReport {
    double tolerance = 0.0;
    std::size_t checked = 0;
    /// Interior nodes whose value reaches the sup over their lower set.
    std::size_t attaining = 0;
    /// Attaining nodes whose lower set is not constant within tolerance.
    std::vector<SpaceTimePoint> flagged;
    /// Earlier node realizing the sup for each flagged node, confirmed Lambda-reachable.
    std::vector<SpaceTimePoint> witnesses;
    [[nodiscard]] bool violation() const noexcept { return !flagged.empty(); }
};

/// Default strong-max tolerance, relative to the data scale. Attaining is a discrete event: a
/// truncation-sized tolerance would count every node near an early peak as attaining.
inline constexpr double kStrongMaxRelTol = 1e-9;

/// For an interior node P at layer k, the lower set is every node at layers < k (closure of the
/// Lambda set of P in the open grid box). P attains when g(P) >= sup - tol.
[[nodiscard]] StrongMaxReport check_strong_max(const GridSolution& g, std::optional<double> tol = std::nullopt);

struct PropagationReport {
    /// Parabolic-boundary data identically zero.
    bool degenerate = false;
    Time t_probe = 0;
    double interior_min = 0.0;
    SpaceTimePoint location;
    [[nodiscard]] bool positive() const noexcept { return !degenerate && interior_min > 0; }
};

/// Min over interior nodes with t >= t_probe (default: first step). Throws PreconditionError when
/// the parabolic-boundary data has a negative value.
[[nodiscard]] PropagationReport check_infinite_propagation(const GridSolution& g,
                                                           std::optional<Time> t_probe = std::nullopt);

struct HarnackReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
    /// rhs == 0 with lhs > 0.
    bool unbounded = false;
    /// Standard error of the ratio (Monte Carlo rhs only).
    double ratio_se = 0.0;
    std::size_t samples = 0;
    /// Every K point checked Lambda-reachable from the point mass.
    bool lambda_validated = false;
    std::string configuration;
};

/// max_K U against the mean of U over the support of mu (a point mass when mu has one point).
/// With `E` and a point mass, every K point must be Lambda-reachable from it (PreconditionError
/// otherwise). Throws PreconditionError for a negative sample of U.
[[nodiscard]] HarnackReport harnack_ratio(const ScalarField& U, const std::vector<SpaceTimePoint>& K,
                                          const std::vector<SpaceTimePoint>& mu, const RasterDomain* E = nullptr);

/// Positive OU temperatures U_a(x, t) = Phi(y - a e_1, s + shift) with (y, s) = phi(x, t), centres
/// a = (i - (count - 1)/2) spacing. Larger families contain smaller ones when count keeps its parity.
[[nodiscard]] std::vector<ScalarField> pullback_family(std::size_t n, std::size_t count, const DomainBox& box,
                                                       double spacing = 0.25, double shift = 1.0);

struct KappaReport {
    std::size_t family_size = 0;
    double kappa_hat = 0.0;
    std::string argmax;
    std::vector<double> ratios;
};

/// Empirical sup of the Harnack ratio over a field family.
[[nodiscard]] KappaReport empirical_kappa(const std::vector<ScalarField>& family,
                                          const std::vector<SpaceTimePoint>& K,
                                          const std::vector<SpaceTimePoint>& mu, const RasterDomain* E = nullptr);

/// sup over Gamma_R against the q-mean over Gamma_{4R} for d nu = e^{-2(n+2)t} dx dt, by Monte Carlo.
/// Throws PreconditionError unless 0 < R <= 1 and q > 0, DomainError unless U's domain holds the
/// closure of Gamma_{4R}.
[[nodiscard]] HarnackReport harnack_mintq(const ScalarField& U, const SpatialVector& x0, Time t0, double R, double q,
                                          std::size_t samples = 1 << 17, std::uint64_t seed = 1);

/// nu(Gamma_R(x0, t0)) = |B_R| e^{-2n t0} e^{-4 t0} (e^{4R^2} - 1) / 4.
[[nodiscard]] double gamma_measure(std::size_t n, Time t0, double R);

/// Hit-or-miss estimate of nu(Gamma_R) from the bounding box, with its standard error.
[[nodiscard]] std::pair<double, double> gamma_measure_mc(const SpatialVector& x0, Time t0, double R,
                                                         std::size_t samples, std::uint64_t seed = 1);

struct MeasureFit {
    std::vector<double> radii;
    std::vector<double> measure;  // Monte Carlo
    std::vector<double> standard_error;
    std::vector<double> exact;
    double slope = 0.0;
};

/// Log-log slope of the Monte Carlo nu(Gamma_R) over geometric radii in [R_lo, R_hi].
[[nodiscard]] MeasureFit gamma_measure_fit(const SpatialVector& x0, Time t0, double R_lo = 0.01, double R_hi = 0.1,
                                           std::size_t points = 8, std::size_t samples = 100000,
                                           std::uint64_t seed = 1);

/// lambda^2 = (e^4 - 1) / 4, the smallest constant for the outer inclusion at R = 1.
[[nodiscard]] double gamma_sandwich_lambda();

struct SandwichReport {
    double R = 0.0;
    double r = 0.0;  // R e^{-2 t0}
    double lambda = 0.0;
    std::size_t inner_samples = 0, inner_violations = 0;
    std::size_t outer_samples = 0, outer_violations = 0;
    [[nodiscard]] bool holds() const noexcept { return inner_violations == 0 && outer_violations == 0; }
};

/// C_r(phi(x0, t0)) inside phi(Gamma_R) inside C_{lambda r}: uniform samples of C_r pulled back
/// must land in Gamma_R, uniform samples of Gamma_R pushed forward must land in C_{lambda r}.
[[nodiscard]] SandwichReport gamma_sandwich(const SpatialVector& x0, Time t0, double R, double lambda,
                                            std::size_t samples, std::uint64_t seed = 1);

struct RadialBoundReport {
    std::size_t samples = 0;
    double min_ratio = 0.0;  // min |x| / |x0| over the samples
    double max_ratio = 0.0;
    /// e^{-2R^2} (1 - R/|x0|): the lower bound implied by the parametrization.
    double c1_reference = 0.0;
};

/// Empirical two-sided |x| bounds on Gamma_R(x0, t0). Requires x0 != 0.
[[nodiscard]] RadialBoundReport gamma_radial_bounds(const SpatialVector& x0, Time t0, double R, std::size_t samples,
                                                    std::uint64_t seed = 1);

}  // namespace heatmv
