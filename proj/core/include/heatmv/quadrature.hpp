#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "heatmv/field.hpp"
#include "heatmv/kernels.hpp"

namespace heatmv {

enum class QuadMethod { automatic, tensor, montecarlo };

[[nodiscard]] std::string to_string(QuadMethod m);
[[nodiscard]] QuadMethod quad_method_from_string(const std::string& s);

struct MVConfig {
    QuadMethod method = QuadMethod::automatic;
    /// Deterministic tolerance on |I_L - I_{L+1}|; 0 selects 1e-6 (n = 1) or 1e-5 (n = 2).
    double tol = 0.0;
    /// Gauss-Legendre nodes per time panel and per angular-radial coordinate at level 0.
    std::size_t base_nodes = 4;
    std::size_t base_slice_nodes = 8;
    /// At least 1: the error estimate compares two levels.
    std::size_t max_level = 5;
    /// Throw ConvergenceError when the estimate stays above tol (otherwise just report it).
    bool require_convergence = true;

    double mc_target_se = 1e-3;
    std::size_t mc_min_samples = 1 << 16;
    std::size_t mc_max_samples = 10'000'000;
    std::uint64_t seed = 1;

    [[nodiscard]] double tolerance_for(std::size_t n) const { return tol > 0 ? tol : (n == 1 ? 1e-6 : 1e-5); }
};

struct MVResult {
    double value = 0.0;
    /// Refinement difference (tensor) or standard error (Monte Carlo).
    double error_estimate = 0.0;
    QuadMethod method = QuadMethod::tensor;
    std::size_t nodes_or_samples = 0;
    std::size_t level = 0;
};

/// (4 pi r)^{-n/2} times the integral of f K over the ball.
/// Throws DomainError if the closed ball is not inside f's domain, PreconditionError for a
/// kernel that does not belong to the ball, ConvergenceError when refinement stalls.
[[nodiscard]] MVResult mv_integral(const ScalarField& f, const HeatBall& ball, const KernelSpec& kernel,
                                   const MVConfig& cfg = {});

/// Ball and kernel the mean-value theorem pairs with each equation.
[[nodiscard]] HeatBall mv_ball(const SpaceTimePoint& center, double r, Equation eq);
[[nodiscard]] KernelSpec mv_kernel(const SpaceTimePoint& center, double r, Equation eq);

struct ResidualResult {
    double residual = 0.0;
    MVResult integral;
};

/// f(center) - mean value over the matching ball.
[[nodiscard]] ResidualResult mv_residual(const ScalarField& f, const SpaceTimePoint& center, double r, Equation eq,
                                         const MVConfig& cfg = {});

enum class PointClass { temperature, sub, super, neither };

[[nodiscard]] std::string to_string(PointClass c);
[[nodiscard]] PointClass point_class_from_string(const std::string& s);

struct Classification {
    PointClass label = PointClass::neither;
    double tol = 0.0;
    std::vector<double> radii;
    std::vector<double> residuals;
    std::vector<double> errors;
};

/// temperature if every |residual| <= tol; sub if all residuals <= tol and one < -tol;
/// super mirrored; neither otherwise.
[[nodiscard]] Classification classify_point(const ScalarField& f, const SpaceTimePoint& center,
                                            const std::vector<double>& radii, Equation eq, double tol,
                                            const MVConfig& cfg = {});

/// Label from a residual sequence (the rule used by classify_point).
[[nodiscard]] PointClass classify_residuals(const std::vector<double>& residuals, double tol);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
[[nodiscard]] const GaussRule& gauss_legendre(std::size_t q);

}  // namespace heatmv
