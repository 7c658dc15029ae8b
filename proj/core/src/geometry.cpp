#include "heatmv/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>

#include "heatmv/transference.hpp"

namespace heatmv {

std::string to_string(BallFamily f) {
    switch (f) {
        case BallFamily::omega: return "omega";
        case BallFamily::xi: return "xi";
        case BallFamily::omega_m: return "omega_m";
        case BallFamily::gamma_cyl: return "gamma_cyl";
    }
    return "?";
}

HeatBall::HeatBall(BallFamily f, SpaceTimePoint c, double r, std::size_t mm)
    : family(f), center(std::move(c)), radius(r), m(mm) {
    if (!(radius > 0) || !std::isfinite(radius)) throw PreconditionError("HeatBall: radius must be positive");
    if (center.dim() == 0 || !center.finite()) throw PreconditionError("HeatBall: invalid center");
    if (family == BallFamily::omega_m && m == 0) throw PreconditionError("HeatBall: omega_m needs m >= 1");
    if (m != 0 && family != BallFamily::omega_m && family != BallFamily::xi)
        throw PreconditionError("HeatBall: m is only meaningful for omega_m and xi");
}

namespace {

/// s0 - s for s = phi_time(t), s0 = phi_time(t0), without cancellation.
Time phi_time_gap(Time t, Time t0) { return std::exp(-4 * t0) * std::expm1(4 * (t0 - t)) / 4; }

HeatBall classical_image(const HeatBall& xi) {
    const SpaceTimePoint c = phi(xi.center);
    return xi.m == 0 ? HeatBall::omega(c, xi.radius) : HeatBall::omega_m(c, xi.radius, xi.m);
}

void require(bool ok, const char* what) {
    if (!ok) throw PreconditionError(what);
}

/// Squared slice radius 2(n+m) tau ln(r/tau) for tau in (0, r); negative outside.
long double heat_slice_sq(std::size_t n, std::size_t m, double r, Time tau) {
    if (!(tau > 0) || !(tau < r)) return -1;
    return 2.0L * static_cast<long double>(n + m) * tau * std::log(static_cast<long double>(r) / tau);
}

}  // namespace

std::pair<Time, Time> HeatBall::time_extent() const {
    const Time t0 = center.t;
    switch (family) {
        case BallFamily::omega:
        case BallFamily::omega_m: return {t0 - radius, t0};
        case BallFamily::xi: return {phi_time_inverse(phi_time(t0) - radius), t0};
        case BallFamily::gamma_cyl: return {t0 - static_cast<Time>(radius) * radius, t0};
    }
    return {t0, t0};
}

bool omega_contains(const HeatBall& ball, const SpaceTimePoint& p) {
    require(ball.family == BallFamily::omega || ball.family == BallFamily::omega_m,
            "omega_contains: ball family must be omega or omega_m");
    require(p.dim() == ball.dim(), "omega_contains: dimension mismatch");
    const Time tau = ball.center.t - p.t;
    const long double bound = heat_slice_sq(ball.dim(), ball.m, ball.radius, tau);
    if (bound <= 0) return false;
    return squared_distance(p.x, ball.center.x) < bound;
}

DomainBox omega_bounds(const HeatBall& ball) {
    require(ball.family == BallFamily::omega || ball.family == BallFamily::omega_m,
            "omega_bounds: ball family must be omega or omega_m");
    const double hw = std::sqrt(2.0 * static_cast<double>(ball.dim() + ball.m) * ball.radius / std::numbers::e);
    SpatialVector lo = ball.center.x, hi = ball.center.x;
    for (std::size_t i = 0; i < ball.dim(); ++i) {
        lo[i] -= hw;
        hi[i] += hw;
    }
    return DomainBox(lo, hi, ball.center.t - ball.radius, ball.center.t);
}

bool xi_contains(const HeatBall& ball, const SpaceTimePoint& p) {
    require(ball.family == BallFamily::xi, "xi_contains: ball family must be xi");
    require(p.dim() == ball.dim(), "xi_contains: dimension mismatch");
    if (!(p.t < ball.center.t)) return false;
    return omega_contains(classical_image(ball), phi(p));
}

DomainBox xi_bounds(const HeatBall& ball) {
    require(ball.family == BallFamily::xi, "xi_bounds: ball family must be xi");
    const DomainBox cb = omega_bounds(classical_image(ball));
    const Time t0 = ball.center.t;
    const Time t_lo = phi_time_inverse(cb.t_lo);
    SpatialVector lo(ball.dim()), hi(ball.dim());
    const double e_lo = static_cast<double>(std::exp(2 * t_lo));
    const double e_hi = static_cast<double>(std::exp(2 * t0));
    for (std::size_t i = 0; i < ball.dim(); ++i) {
        const double a = cb.lo[i], b = cb.hi[i];
        lo[i] = std::min(a * e_lo, a * e_hi);
        hi[i] = std::max(b * e_lo, b * e_hi);
        const double pad = 0.01 * (hi[i] - lo[i]);
        lo[i] -= pad;
        hi[i] += pad;
    }
    return DomainBox(lo, hi, t_lo - (t0 - t_lo) / 100, t0);
}

bool gamma_contains(const SpatialVector& x0, Time t0, double R, const SpaceTimePoint& p) {
    require(R > 0, "gamma_contains: R must be positive");
    require(p.dim() == x0.size(), "gamma_contains: dimension mismatch");
    if (!(p.t < t0) || !(p.t > t0 - static_cast<Time>(R) * R)) return false;
    const double g = static_cast<double>(std::exp(2 * (t0 - p.t)));
    return squared_distance(p.x * g, x0) < R * R;
}

DomainBox gamma_bounds(const SpatialVector& x0, Time t0, double R) {
    require(R > 0, "gamma_bounds: R must be positive");
    const Time tb = t0 - static_cast<Time>(R) * R;
    const double shrink = static_cast<double>(std::exp(2 * (tb - t0)));
    SpatialVector lo(x0.size()), hi(x0.size());
    for (std::size_t i = 0; i < x0.size(); ++i) {
        const double a = x0[i] - R, b = x0[i] + R;
        lo[i] = std::min(a, a * shrink);
        hi[i] = std::max(b, b * shrink);
    }
    return DomainBox(lo, hi, tb, t0);
}

bool cylinder_contains(const SpaceTimePoint& top, double r, const SpaceTimePoint& p) {
    if (!(p.t < top.t) || !(p.t > top.t - static_cast<Time>(r) * r)) return false;
    return squared_distance(p.x, top.x) < r * r;
}

bool contains(const HeatBall& ball, const SpaceTimePoint& p) {
    switch (ball.family) {
        case BallFamily::omega:
        case BallFamily::omega_m: return omega_contains(ball, p);
        case BallFamily::xi: return xi_contains(ball, p);
        case BallFamily::gamma_cyl: return gamma_contains(ball.center.x, ball.center.t, ball.radius, p);
    }
    return false;
}

DomainBox bounds(const HeatBall& ball) {
    switch (ball.family) {
        case BallFamily::omega:
        case BallFamily::omega_m: return omega_bounds(ball);
        case BallFamily::xi: return xi_bounds(ball);
        case BallFamily::gamma_cyl: return gamma_bounds(ball.center.x, ball.center.t, ball.radius);
    }
    throw PreconditionError("bounds: unknown family");
}

std::optional<Slice> slice_at(const HeatBall& ball, Time t) {
    const Time t0 = ball.center.t;
    if (!(t < t0)) return std::nullopt;
    switch (ball.family) {
        case BallFamily::omega:
        case BallFamily::omega_m: {
            const long double sq = heat_slice_sq(ball.dim(), ball.m, ball.radius, t0 - t);
            if (sq <= 0) return std::nullopt;
            return Slice{ball.center.x, static_cast<double>(std::sqrt(sq))};
        }
        case BallFamily::xi: {
            const long double sq = heat_slice_sq(ball.dim(), ball.m, ball.radius, phi_time_gap(t, t0));
            if (sq <= 0) return std::nullopt;
            const long double e2t = std::exp(2 * t);
            return Slice{axis_curve(ball.center.x, t0, t), static_cast<double>(std::sqrt(sq) * e2t)};
        }
        case BallFamily::gamma_cyl: {
            if (!(t > t0 - static_cast<Time>(ball.radius) * ball.radius)) return std::nullopt;
            const double g = static_cast<double>(std::exp(2 * (t - t0)));
            return Slice{ball.center.x * g, ball.radius * g};
        }
    }
    return std::nullopt;
}

SpatialVector axis_curve(const SpatialVector& x0, Time t0, Time t) {
    return x0 * static_cast<double>(std::exp(2 * (t - t0)));
}

// ---------------------------------------------------------------------------------------
// Raster

RasterDomain::RasterDomain(DomainBox box, double cells_per_unit, const Predicate& inside)
    : box_(std::move(box)), h_(1.0 / cells_per_unit) {
    if (!(cells_per_unit > 0)) throw PreconditionError("RasterDomain: resolution must be positive");
    if (box_.dim() == 0 || box_.dim() > 2) throw PreconditionError("RasterDomain: only n = 1, 2 are supported");
    if (box_.empty()) throw PreconditionError("RasterDomain: empty box");
    auto count = [&](double len) { return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / h_ - 1e-9))); };
    nt_ = count(static_cast<double>(box_.t_hi - box_.t_lo));
    per_layer_ = 1;
    for (std::size_t i = 0; i < box_.dim(); ++i) {
        nx_.push_back(count(box_.hi[i] - box_.lo[i]));
        per_layer_ *= nx_.back();
    }
    mask_.assign(nt_ * per_layer_, 1);
    if (inside) {
        for (std::size_t k = 0; k < nt_; ++k)
            for (std::size_t c = 0; c < per_layer_; ++c) mask_[k * per_layer_ + c] = inside(cell_center(k, c)) ? 1 : 0;
    }
}

std::pair<std::size_t, std::size_t> RasterDomain::locate(const SpaceTimePoint& p) const {
    auto index = [](double v, double lo, double hi, std::size_t cells) {
        const double u = (v - lo) / (hi - lo) * static_cast<double>(cells);
        return std::min(cells - 1, static_cast<std::size_t>(std::max(0.0, std::floor(u))));
    };
    const std::size_t k =
        index(static_cast<double>(p.t - box_.t_lo), 0.0, static_cast<double>(box_.t_hi - box_.t_lo), nt_);
    std::size_t c = 0;
    for (std::size_t i = box_.dim(); i-- > 0;) c = c * nx_[i] + index(p.x[i], box_.lo[i], box_.hi[i], nx_[i]);
    return {k, c};
}

SpaceTimePoint RasterDomain::cell_center(std::size_t layer, std::size_t cell) const {
    SpaceTimePoint p;
    p.x = SpatialVector(box_.dim());
    for (std::size_t i = 0; i < box_.dim(); ++i) {
        const std::size_t j = cell % nx_[i];
        cell /= nx_[i];
        p.x[i] = box_.lo[i] + (box_.hi[i] - box_.lo[i]) * (static_cast<double>(j) + 0.5) / static_cast<double>(nx_[i]);
    }
    p.t = box_.t_lo + (box_.t_hi - box_.t_lo) * (static_cast<Time>(layer) + Time{0.5}) / static_cast<Time>(nt_);
    return p;
}

bool RasterDomain::contains(const SpaceTimePoint& p) const {
    if (p.dim() != box_.dim()) return false;
    for (std::size_t i = 0; i < box_.dim(); ++i)
        if (!(p.x[i] > box_.lo[i] && p.x[i] < box_.hi[i])) return false;
    if (!(p.t > box_.t_lo && p.t < box_.t_hi)) return false;
    const auto [k, c] = locate(p);
    return cell_inside(k, c);
}

void RasterDomain::neighbours(std::size_t cell, std::vector<std::size_t>& out) const {
    out.clear();
    if (box_.dim() == 1) {
        if (cell > 0) out.push_back(cell - 1);
        if (cell + 1 < nx_[0]) out.push_back(cell + 1);
        return;
    }
    const auto i = static_cast<long>(cell % nx_[0]);
    const auto j = static_cast<long>(cell / nx_[0]);
    for (long dj = -1; dj <= 1; ++dj)
        for (long di = -1; di <= 1; ++di) {
            if (di == 0 && dj == 0) continue;
            const long a = i + di, b = j + dj;
            if (a < 0 || b < 0 || a >= static_cast<long>(nx_[0]) || b >= static_cast<long>(nx_[1])) continue;
            out.push_back(static_cast<std::size_t>(b) * nx_[0] + static_cast<std::size_t>(a));
        }
}

namespace {

std::vector<std::uint8_t> lambda_set_until(const RasterDomain& E, const SpaceTimePoint& from, double step,
                                           std::size_t stop_layer) {
    const std::size_t per = E.cells_per_layer();
    std::vector<std::uint8_t> reach(E.layers() * per, 0);
    const auto [kf, cf] = E.locate(from);
    reach[kf * per + cf] = 1;
    const double depth_f = step / E.cell_size();
    const std::size_t max_depth =
        std::isfinite(depth_f) ? static_cast<std::size_t>(std::floor(depth_f + 1e-9)) : per;

    std::vector<std::size_t> depth(per);
    std::deque<std::size_t> queue;
    std::vector<std::size_t> nb;
    for (std::size_t k = kf; k-- > stop_layer;) {
        std::uint8_t* cur = &reach[k * per];
        const std::uint8_t* above = &reach[(k + 1) * per];
        queue.clear();
        for (std::size_t c = 0; c < per; ++c)
            if (above[c] && E.cell_inside(k, c)) {
                cur[c] = 1;
                depth[c] = 0;
                queue.push_back(c);
            }
        while (!queue.empty()) {
            const std::size_t c = queue.front();
            queue.pop_front();
            if (depth[c] >= max_depth) continue;
            E.neighbours(c, nb);
            for (std::size_t d : nb)
                if (!cur[d] && E.cell_inside(k, d)) {
                    cur[d] = 1;
                    depth[d] = depth[c] + 1;
                    queue.push_back(d);
                }
        }
    }
    return reach;
}

}  // namespace

std::vector<std::uint8_t> lambda_set(const RasterDomain& E, const SpaceTimePoint& from, double step) {
    if (!E.contains(from)) throw DomainError("lambda_set: start point outside E");
    return lambda_set_until(E, from, step, 0);
}

bool lambda_reachable(const RasterDomain& E, const SpaceTimePoint& from, const SpaceTimePoint& to, double step) {
    if (!E.contains(from) || !E.contains(to)) throw DomainError("lambda_reachable: point outside E");
    if (!(to.t < from.t)) return false;
    const auto [kf, cf] = E.locate(from);
    const auto [kt, ct] = E.locate(to);
    if (kt == kf) return ct == cf;
    const auto reach = lambda_set_until(E, from, step, kt);
    return reach[kt * E.cells_per_layer() + ct] != 0;
}

bool ball_closure_in_domain(const HeatBall& ball, const DomainBox& E, double cell) {
    const DomainBox b = bounds(ball).dilated(cell, cell);
    return E.contains(b);
}

bool ball_closure_in_domain(const HeatBall& ball, const RasterDomain& E) {
    const DomainBox b = bounds(ball).dilated(E.cell_size(), E.cell_size());
    if (!E.box().contains(b)) return false;
    SpaceTimePoint lo{b.lo, b.t_lo}, hi{b.hi, b.t_hi};
    const auto [k0, c0] = E.locate(lo);
    const auto [k1, c1] = E.locate(hi);
    const auto& nx = E.shape();
    const std::size_t i0 = c0 % nx[0], i1 = c1 % nx[0];
    const std::size_t j0 = E.dim() == 2 ? c0 / nx[0] : 0, j1 = E.dim() == 2 ? c1 / nx[0] : 0;
    for (std::size_t k = k0; k <= k1; ++k)
        for (std::size_t j = j0; j <= j1; ++j)
            for (std::size_t i = i0; i <= i1; ++i)
                if (!E.cell_inside(k, j * nx[0] + i)) return false;
    return true;
}

std::vector<BoundarySample> ball_boundary(const HeatBall& ball, std::size_t slices, std::size_t angular) {
    if (ball.dim() > 2) throw PreconditionError("ball_boundary: only n = 1, 2 are supported");
    if (slices == 0) throw PreconditionError("ball_boundary: need at least one slice");
    const auto [t_lo, t_hi] = ball.time_extent();
    std::vector<BoundarySample> out;
    for (std::size_t i = 0; i < slices; ++i) {
        const Time t = t_lo + (t_hi - t_lo) * (static_cast<Time>(i) + Time{0.5}) / static_cast<Time>(slices);
        const auto s = slice_at(ball, t);
        if (!s) continue;
        if (ball.dim() == 1) {
            out.push_back({t, SpatialVector{s->center[0] - s->radius}});
            out.push_back({t, SpatialVector{s->center[0] + s->radius}});
        } else {
            for (std::size_t a = 0; a < angular; ++a) {
                const double th = 2 * std::numbers::pi * static_cast<double>(a) / static_cast<double>(angular);
                out.push_back({t, SpatialVector{s->center[0] + s->radius * std::cos(th),
                                                s->center[1] + s->radius * std::sin(th)}});
            }
        }
    }
    return out;
}

}  // namespace heatmv
