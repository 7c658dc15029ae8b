#include "heatmv/types.hpp"

#include <algorithm>

namespace heatmv {

DomainBox::DomainBox(SpatialVector lower, SpatialVector upper, Time t_lower, Time t_upper)
    : lo(lower), hi(upper), t_lo(t_lower), t_hi(t_upper) {
    if (lo.size() != hi.size() || lo.size() == 0)
        throw PreconditionError("DomainBox: corner dimensions differ or are zero");
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (!(lo[i] < hi[i])) throw PreconditionError("DomainBox: lower corner must be below upper corner");
    if (!(t_lo < t_hi)) throw PreconditionError("DomainBox: empty time range");
}

DomainBox DomainBox::cube(std::size_t n, double half_width, Time t_lower, Time t_upper) {
    return DomainBox(SpatialVector(n, -half_width), SpatialVector(n, half_width), t_lower, t_upper);
}

bool DomainBox::contains(const SpaceTimePoint& p) const noexcept {
    if (p.dim() != dim() || !(p.t >= t_lo && p.t <= t_hi)) return false;
    for (std::size_t i = 0; i < dim(); ++i)
        if (!(p.x[i] >= lo[i] && p.x[i] <= hi[i])) return false;
    return true;
}

bool DomainBox::contains(const DomainBox& inner) const noexcept {
    if (inner.dim() != dim() || inner.t_lo < t_lo || inner.t_hi > t_hi) return false;
    for (std::size_t i = 0; i < dim(); ++i)
        if (inner.lo[i] < lo[i] || inner.hi[i] > hi[i]) return false;
    return true;
}

bool DomainBox::contains_with_margin(const SpaceTimePoint& p, double margin) const noexcept {
    if (p.dim() != dim() || !(p.t - margin >= t_lo && p.t + margin <= t_hi)) return false;
    for (std::size_t i = 0; i < dim(); ++i)
        if (!(p.x[i] - margin >= lo[i] && p.x[i] + margin <= hi[i])) return false;
    return true;
}

DomainBox DomainBox::dilated(double space, double time) const {
    DomainBox b = *this;
    for (std::size_t i = 0; i < dim(); ++i) {
        b.lo[i] -= space;
        b.hi[i] += space;
    }
    b.t_lo -= time;
    b.t_hi += time;
    return b;
}

bool DomainBox::empty() const noexcept {
    if (dim() == 0 || !(t_lo < t_hi)) return true;
    for (std::size_t i = 0; i < dim(); ++i)
        if (!(lo[i] < hi[i])) return true;
    return false;
}

DomainBox intersect(const DomainBox& a, const DomainBox& b) {
    if (a.dim() != b.dim()) throw PreconditionError("intersect: dimension mismatch");
    DomainBox r;
    r.lo = SpatialVector(a.dim());
    r.hi = SpatialVector(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) {
        r.lo[i] = std::max(a.lo[i], b.lo[i]);
        r.hi[i] = std::min(a.hi[i], b.hi[i]);
    }
    r.t_lo = std::max(a.t_lo, b.t_lo);
    r.t_hi = std::min(a.t_hi, b.t_hi);
    return r;
}

DomainBox default_field_box(std::size_t n) { return DomainBox::cube(n, 8.0, -4, 4); }

std::string to_string(Equation e) {
    switch (e) {
        case Equation::heat: return "heat";
        case Equation::ou: return "ou";
        case Equation::hermite: return "hermite";
        case Equation::none: return "none";
    }
    return "none";
}

Equation equation_from_string(const std::string& s) {
    if (s == "heat") return Equation::heat;
    if (s == "ou") return Equation::ou;
    if (s == "hermite") return Equation::hermite;
    if (s == "none") return Equation::none;
    throw PreconditionError("unknown equation '" + s + "' (expected heat|ou|hermite)");
}

}  // namespace heatmv
