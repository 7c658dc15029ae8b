#include "heatmv/transference.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace heatmv {

namespace {

// Spatial interval of {x e^{-2t} : x in [a, b]} for all t in [t0, t1]:
// inscribed (intersection over t) or bounding (union over t).
std::pair<double, double> scaled_interval(double a, double b, Time t0, Time t1, double sign, bool inscribed) {
    const double e0 = static_cast<double>(std::exp(sign * 2 * t0));
    const double e1 = static_cast<double>(std::exp(sign * 2 * t1));
    if (inscribed) return {std::max(a * e0, a * e1), std::min(b * e0, b * e1)};
    return {std::min(a * e0, a * e1), std::max(b * e0, b * e1)};
}

DomainBox map_box_spatially(const DomainBox& box, Time t0, Time t1, Time out_t0, Time out_t1, double sign,
                            bool inscribed) {
    DomainBox r;
    r.lo = SpatialVector(box.dim());
    r.hi = SpatialVector(box.dim());
    for (std::size_t i = 0; i < box.dim(); ++i) {
        auto [lo, hi] = scaled_interval(box.lo[i], box.hi[i], t0, t1, sign, inscribed);
        r.lo[i] = lo;
        r.hi[i] = hi;
    }
    r.t_lo = out_t0;
    r.t_hi = out_t1;
    return r;
}

// Smallest box containing phi^{-1}(box), box.t_hi < 1/4.
DomainBox phi_bounding_preimage(const DomainBox& box) {
    const Time t0 = phi_time_inverse(box.t_lo);
    const Time t1 = phi_time_inverse(box.t_hi);
    return map_box_spatially(box, t0, t1, t0, t1, +1.0, false);
}

}  // namespace

Time phi_time(Time t) { return -std::expm1(-4 * t) / 4; }

Time phi_time_inverse(Time s) {
    if (!(s < Time{0.25})) throw DomainError("phi_inverse: time must be < 1/4");
    return -std::log1p(-4 * s) / 4;
}

SpaceTimePoint phi(const SpaceTimePoint& p) {
    const auto scale = static_cast<double>(std::exp(-2 * p.t));
    return {p.x * scale, phi_time(p.t)};
}

SpaceTimePoint phi_inverse(const SpaceTimePoint& q) {
    if (!(q.t < Time{0.25})) throw DomainError("phi_inverse: time must be < 1/4");
    const Time one_minus = 1 - 4 * q.t;
    SpaceTimePoint p;
    p.x = SpatialVector(q.dim());
    const Time inv_sqrt = 1 / std::sqrt(one_minus);
    for (std::size_t i = 0; i < q.dim(); ++i) p.x[i] = static_cast<double>(q.x[i] * inv_sqrt);
    p.t = -std::log(one_minus) / 4;
    return p;
}

double hermite_weight(const SpaceTimePoint& p) {
    const auto n = static_cast<Time>(p.dim());
    return static_cast<double>(std::exp(-n * p.t - Time{0.5} * p.x.squared_norm()));
}

DomainBox phi_inscribed_image(const DomainBox& box) {
    return map_box_spatially(box, box.t_lo, box.t_hi, phi_time(box.t_lo), phi_time(box.t_hi), -1.0, true);
}

DomainBox phi_bounding_image(const DomainBox& box) {
    return map_box_spatially(box, box.t_lo, box.t_hi, phi_time(box.t_lo), phi_time(box.t_hi), -1.0, false);
}

DomainBox phi_inscribed_preimage(const DomainBox& box, const DomainBox& clip) {
    if (!(box.t_lo < Time{0.25})) throw DomainError("phi_inscribed_preimage: box lies above s = 1/4");
    Time t0 = phi_time_inverse(box.t_lo);
    Time t1 = box.t_hi >= Time{0.25} ? clip.t_hi : phi_time_inverse(box.t_hi);
    t0 = std::max(t0, clip.t_lo);
    t1 = std::min(t1, clip.t_hi);
    if (!(t0 < t1)) throw DomainError("phi_inscribed_preimage: empty time range");
    DomainBox r = map_box_spatially(box, t0, t1, t0, t1, +1.0, true);
    r = intersect(r, clip);
    if (r.empty()) throw DomainError("phi_inscribed_preimage: empty preimage");
    return r;
}

ScalarField heat_to_ou(const ScalarField& u, std::optional<DomainBox> target) {
    DomainBox box;
    if (target) {
        if (target->dim() != u.dim()) throw PreconditionError("heat_to_ou: dimension mismatch");
        if (!u.domain().contains(phi_bounding_image(*target)))
            throw DomainError("heat_to_ou: phi(target) is not inside the heat field's domain");
        box = *target;
    } else {
        box = phi_inscribed_preimage(u.domain(), default_field_box(u.dim()));
    }
    const Equation eq = u.equation() == Equation::heat ? Equation::ou : Equation::none;
    return ScalarField("T(" + u.id() + ")", u.dim(), eq, u.kind(), box,
                       [u](const SpaceTimePoint& p) { return u.evaluate_unchecked(phi(p)); });
}

ScalarField ou_from_heat_inverse(const ScalarField& U, std::optional<DomainBox> target) {
    DomainBox box;
    if (target) {
        if (target->dim() != U.dim()) throw PreconditionError("ou_from_heat_inverse: dimension mismatch");
        if (!(target->t_hi < Time{0.25}))
            throw DomainError("ou_from_heat_inverse: target reaches s >= 1/4");
        if (!U.domain().contains(phi_bounding_preimage(*target)))
            throw DomainError("ou_from_heat_inverse: phi^{-1}(target) is not inside the OU field's domain");
        box = *target;
    } else {
        box = phi_inscribed_image(U.domain());
    }
    const Equation eq = U.equation() == Equation::ou ? Equation::heat : Equation::none;
    return ScalarField("Tinv(" + U.id() + ")", U.dim(), eq, U.kind(), box,
                       [U](const SpaceTimePoint& q) { return U.evaluate_unchecked(phi_inverse(q)); });
}

ScalarField ou_to_hermite(const ScalarField& U) {
    const Equation eq = U.equation() == Equation::ou ? Equation::hermite : Equation::none;
    return ScalarField("W(" + U.id() + ")", U.dim(), eq, U.kind(), U.domain(),
                       [U](const SpaceTimePoint& p) { return hermite_weight(p) * U.evaluate_unchecked(p); });
}

ScalarField hermite_to_ou(const ScalarField& V) {
    const Equation eq = V.equation() == Equation::hermite ? Equation::ou : Equation::none;
    return ScalarField("Winv(" + V.id() + ")", V.dim(), eq, V.kind(), V.domain(),
                       [V](const SpaceTimePoint& p) { return V.evaluate_unchecked(p) / hermite_weight(p); });
}

Operator operator_for(Equation e) {
    switch (e) {
        case Equation::heat: return Operator::heat;
        case Equation::ou: return Operator::ou;
        case Equation::hermite: return Operator::hermite;
        case Equation::none: break;
    }
    throw PreconditionError("operator_for: equation 'none' has no operator");
}

double operator_residual(const ScalarField& f, Operator op, const SpaceTimePoint& p, double h) {
    if (!(h > 0)) throw PreconditionError("operator_residual: step must be positive");
    if (!f.domain().contains_with_margin(p, 2 * h))
        throw DomainError("operator_residual: point closer than 2h to the domain boundary");
    const double center = f.evaluate_unchecked(p);
    SpaceTimePoint q = p;
    q.t = p.t + h;
    const double fp = f.evaluate_unchecked(q);
    q.t = p.t - h;
    const double fm = f.evaluate_unchecked(q);
    const double dt = (fp - fm) / (2 * h);

    double laplacian = 0.0;
    double drift = 0.0;
    q = p;
    for (std::size_t i = 0; i < p.dim(); ++i) {
        q.x[i] = p.x[i] + h;
        const double up = f.evaluate_unchecked(q);
        q.x[i] = p.x[i] - h;
        const double dn = f.evaluate_unchecked(q);
        q.x[i] = p.x[i];
        laplacian += (up - 2 * center + dn) / (h * h);
        drift += p.x[i] * (up - dn) / (2 * h);
    }
    switch (op) {
        case Operator::heat: return dt - laplacian;
        case Operator::ou: return dt - laplacian + 2 * drift;
        case Operator::hermite: return dt - laplacian + p.x.squared_norm() * center;
    }
    return 0.0;
}

TransferenceCheck transference_identity_check(const ScalarField& U, const SpaceTimePoint& p, double h) {
    TransferenceCheck c{};
    const ScalarField V = ou_to_hermite(U);
    const double ou_res = operator_residual(U, Operator::ou, p, h);
    c.hermite_lhs = operator_residual(V, Operator::hermite, p, h);
    c.hermite_rhs = hermite_weight(p) * ou_res;
    // Heat-side field on a small box around phi(p): just enough room for the stencil.
    const SpaceTimePoint q = phi(p);
    SpatialVector lo = q.x, hi = q.x;
    for (std::size_t i = 0; i < q.dim(); ++i) {
        lo[i] -= 3 * h;
        hi[i] += 3 * h;
    }
    const ScalarField u = ou_from_heat_inverse(U, DomainBox(lo, hi, q.t - 3 * h, q.t + 3 * h));
    c.ou_lhs = ou_res;
    c.ou_rhs = static_cast<double>(std::exp(-4 * p.t)) * operator_residual(u, Operator::heat, q, h);
    return c;
}

double phi_jacobian_fd(const SpaceTimePoint& p, double h) {
    const std::size_t n = p.dim();
    const std::size_t m = n + 1;
    std::vector<long double> J(m * m);
    auto column = [&](std::size_t j) {
        SpaceTimePoint a = p, b = p;
        if (j < n) {
            a.x[j] += h;
            b.x[j] -= h;
        } else {
            a.t += h;
            b.t -= h;
        }
        const SpaceTimePoint fa = phi(a), fb = phi(b);
        for (std::size_t i = 0; i < n; ++i) J[i * m + j] = (static_cast<long double>(fa.x[i]) - fb.x[i]) / (2 * h);
        J[n * m + j] = (fa.t - fb.t) / (2 * h);
    };
    for (std::size_t j = 0; j < m; ++j) column(j);
    // Gaussian elimination with partial pivoting.
    long double det = 1;
    for (std::size_t k = 0; k < m; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < m; ++i)
            if (std::fabs(J[i * m + k]) > std::fabs(J[piv * m + k])) piv = i;
        if (J[piv * m + k] == 0) return 0.0;
        if (piv != k) {
            for (std::size_t j = 0; j < m; ++j) std::swap(J[k * m + j], J[piv * m + j]);
            det = -det;
        }
        det *= J[k * m + k];
        for (std::size_t i = k + 1; i < m; ++i) {
            const long double f = J[i * m + k] / J[k * m + k];
            for (std::size_t j = k; j < m; ++j) J[i * m + j] -= f * J[k * m + j];
        }
    }
    return static_cast<double>(det);
}

}  // namespace heatmv
