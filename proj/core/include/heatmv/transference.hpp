#pragma once

#include <optional>
#include <utility>

#include "heatmv/field.hpp"

namespace heatmv {

/// The diffeomorphism phi(x, t) = (x e^{-2t}, (1 - e^{-4t})/4) of R^{n+1} onto R^n x (-inf, 1/4).
[[nodiscard]] SpaceTimePoint phi(const SpaceTimePoint& p);

/// Time component of phi alone.
[[nodiscard]] Time phi_time(Time t);

/// Inverse of phi. Throws DomainError when q.t >= 1/4.
[[nodiscard]] SpaceTimePoint phi_inverse(const SpaceTimePoint& q);

/// Inverse of phi_time. Throws DomainError when s >= 1/4.
[[nodiscard]] Time phi_time_inverse(Time s);

/// Gaussian-in-space, exponential-in-time weight e^{-nt - |x|^2/2} linking OU and Hermite temperatures.
[[nodiscard]] double hermite_weight(const SpaceTimePoint& p);

/// Smallest box inside phi(box) (for heat-side domains of pulled-back fields).
[[nodiscard]] DomainBox phi_inscribed_image(const DomainBox& box);
/// Smallest box containing phi(box).
[[nodiscard]] DomainBox phi_bounding_image(const DomainBox& box);
/// Largest box inside phi^{-1}(box ∩ {s < 1/4}), clipped to `clip`.
[[nodiscard]] DomainBox phi_inscribed_preimage(const DomainBox& box, const DomainBox& clip);

/// U = u o phi. The result lives on `target` (default: default_field_box ∩ inscribed preimage
/// of u's domain); throws DomainError if phi(target) is not inside u's domain.
[[nodiscard]] ScalarField heat_to_ou(const ScalarField& u, std::optional<DomainBox> target = std::nullopt);

/// u = U o phi^{-1}; exact inverse of heat_to_ou.
[[nodiscard]] ScalarField ou_from_heat_inverse(const ScalarField& U,
                                               std::optional<DomainBox> target = std::nullopt);

/// V = e^{-nt - |x|^2/2} U.
[[nodiscard]] ScalarField ou_to_hermite(const ScalarField& U);

/// U = e^{nt + |x|^2/2} V.
[[nodiscard]] ScalarField hermite_to_ou(const ScalarField& V);

enum class Operator { heat, ou, hermite };

[[nodiscard]] Operator operator_for(Equation e);

/// Centered second-order finite-difference value of (d_t - L) f at p, where L is
/// Delta, Delta - 2x.grad or Delta - |x|^2. Requires a margin of 2h inside f's domain.
[[nodiscard]] double operator_residual(const ScalarField& f, Operator op, const SpaceTimePoint& p,
                                       double h = 1e-3);

/// Both sides of the two transference identities at p, evaluated by finite differences.
struct TransferenceCheck {
    /// Hermite residual of V = ou_to_hermite(U) at p.
    double hermite_lhs;
    /// e^{-nt - |x|^2/2} times the OU residual of U at p.
    double hermite_rhs;
    /// OU residual of U at p.
    double ou_lhs;
    /// e^{-4t} times the heat residual of u = U o phi^{-1} at phi(p).
    double ou_rhs;
};

[[nodiscard]] TransferenceCheck transference_identity_check(const ScalarField& U, const SpaceTimePoint& p,
                                                           double h = 1e-3);

/// Jacobian determinant of phi at p by centered differences on the (n+1)x(n+1) derivative matrix.
[[nodiscard]] double phi_jacobian_fd(const SpaceTimePoint& p, double h);

}  // namespace heatmv
