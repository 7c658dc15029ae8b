#pragma once

#include <cstdint>
#include <vector>

#include "heatmv/geometry.hpp"

namespace heatmv {

enum class KernelFamily { classical, ou, hermite, descent_classical, descent_ou, descent_hermite };

[[nodiscard]] std::string to_string(KernelFamily f);
[[nodiscard]] KernelFamily kernel_family_from_string(const std::string& s);
[[nodiscard]] bool is_descent(KernelFamily f) noexcept;

/// Which kernel, in which dimension, on which ball. `anchor` is the ball's top point (x, t).
struct KernelSpec {
    KernelFamily family = KernelFamily::classical;
    std::size_t n = 1;
    std::size_t m = 0;
    double r = 1.0;
    SpaceTimePoint anchor;

    /// Checks n/m/r consistency; throws PreconditionError.
    void validate() const;
};

/// Spec for the kernel that belongs to `ball` (Omega -> classical, Xi -> OU, ...).
/// Hermite variants must be requested explicitly through `hermite = true`.
[[nodiscard]] KernelSpec kernel_for_ball(const HeatBall& ball, bool hermite = false);
/// Ball on which `spec` integrates to one.
[[nodiscard]] HeatBall matching_ball(const KernelSpec& spec);

/// Heat kernel (4 pi t)^{-n/2} e^{-|x|^2/4t} for t > 0, zero otherwise.
[[nodiscard]] double fundamental_solution(const SpatialVector& x, Time t);

/// |x - y|^2 / (4 (t - s)^2). Requires s < t.
[[nodiscard]] double k_classical(const SpaceTimePoint& anchor, const SpaceTimePoint& p);
/// OU kernel 4 e^{-2(n+2)s} |x e^{-2t} - y e^{-2s}|^2 / (e^{-4t} - e^{-4s})^2. Requires s != t.
[[nodiscard]] double k_ou(const SpaceTimePoint& anchor, const SpaceTimePoint& p);
/// e^{(s-t)n + (|y|^2 - |x|^2)/2} k_ou.
[[nodiscard]] double k_hermite(const SpaceTimePoint& anchor, const SpaceTimePoint& p);

struct DescentConstants {
    double c_m;
    double a_nm;
};

/// c_m = |B_1^m| / (2(m+2)(4 pi)^{m/2}),  a_{n,m} = m(n+m).
[[nodiscard]] DescentConstants descent_constants(std::size_t n, std::size_t m);

/// c_m (|x-y|^2/tau^2 + a ln(r/tau)/tau) R^m with R^2 = (2(n+m) tau ln(r/tau) - |x-y|^2)/r.
/// Throws DomainError outside Omega_m(anchor; r).
[[nodiscard]] double k_descent_classical(std::size_t m, double r, const SpaceTimePoint& anchor,
                                         const SpaceTimePoint& p);
/// e^{-2(n+2)s} k_descent_classical(phi(anchor), phi(p)).
[[nodiscard]] double k_descent_ou(std::size_t m, double r, const SpaceTimePoint& anchor, const SpaceTimePoint& p);
/// Hermite weight ratio times k_descent_ou.
[[nodiscard]] double k_descent_hermite(std::size_t m, double r, const SpaceTimePoint& anchor,
                                       const SpaceTimePoint& p);

/// Evaluates `spec` at p.
[[nodiscard]] double evaluate_kernel(const KernelSpec& spec, const SpaceTimePoint& p);

/// Sampled sup of the scale-free descent kernel (r K for the classical family,
/// r e^{2(n+2)s} K for the OU/Hermite pullbacks) over the matching ball.
struct KernelBoundReport {
    double estimate = 0.0;
    std::size_t samples = 0;
    std::size_t accepted = 0;
    /// (sample count, running sup) at every doubling of the sample count.
    std::vector<std::pair<std::size_t, double>> history;
    /// |estimate(N) - estimate(N/2)| / estimate(N).
    double last_relative_change = 0.0;
};

/// Throws PreconditionError for plain families (unbounded near the anchor) and for m < 3.
[[nodiscard]] KernelBoundReport kernel_bound_estimate(const KernelSpec& spec, std::size_t sample_count,
                                                      std::uint64_t seed = 1);

/// Log-log slope fit of the plain kernel along the parabolic approach
/// |x~ - y~|^2 = alpha tau~ to the anchor, tau~ over [tau_min, tau_max].
/// The returned exponent is -slope (1 for the heat-type singularity).
struct DivergenceFit {
    double exponent = 0.0;
    double r_squared = 0.0;
    std::vector<std::pair<double, double>> samples;  // (tau, K)
};
[[nodiscard]] DivergenceFit plain_kernel_divergence(const KernelSpec& spec, double alpha = 1.0,
                                                    double tau_min = 1e-8, double tau_max = 1e-3,
                                                    std::size_t points = 40);

/// Kernel values on a regular (first spatial coordinate, time) grid through the matching ball.
/// For n = 2 the second coordinate is held at the slice's axis. Points outside the ball are skipped.
struct KernelSample {
    double y;
    Time s;
    double k;
};
[[nodiscard]] std::vector<KernelSample> kernel_profile(const KernelSpec& spec, std::size_t ny, std::size_t ns);

}  // namespace heatmv
