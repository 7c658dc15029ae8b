#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "heatmv/types.hpp"

namespace heatmv {

enum class BallFamily { omega, xi, omega_m, gamma_cyl };

[[nodiscard]] std::string to_string(BallFamily f);

/// Tagged ball descriptor. `radius` is r for the heat-ball families and R for gamma_cyl.
///
/// `m` is the descent dimension. It is nonzero for omega_m, and may also be set on a xi
/// ball to describe the pullback of Omega_m through phi.
struct HeatBall {
    BallFamily family = BallFamily::omega;
    SpaceTimePoint center;
    double radius = 1.0;
    std::size_t m = 0;

    HeatBall() = default;
    HeatBall(BallFamily family, SpaceTimePoint center, double radius, std::size_t m = 0);

    static HeatBall omega(SpaceTimePoint center, double r) { return {BallFamily::omega, std::move(center), r}; }
    static HeatBall omega_m(SpaceTimePoint center, double r, std::size_t m) {
        return {BallFamily::omega_m, std::move(center), r, m};
    }
    static HeatBall xi(SpaceTimePoint center, double r, std::size_t m = 0) {
        return {BallFamily::xi, std::move(center), r, m};
    }
    static HeatBall gamma(SpaceTimePoint center, double R) { return {BallFamily::gamma_cyl, std::move(center), R}; }

    [[nodiscard]] std::size_t dim() const noexcept { return center.dim(); }
    /// Time extent (t_lo, t_hi) of the open ball.
    [[nodiscard]] std::pair<Time, Time> time_extent() const;
};

/// Cross-section of a ball at a fixed time: an open spatial ball.
struct Slice {
    SpatialVector center;
    double radius = 0.0;
};

[[nodiscard]] bool omega_contains(const HeatBall& ball, const SpaceTimePoint& p);
[[nodiscard]] DomainBox omega_bounds(const HeatBall& ball);

[[nodiscard]] bool xi_contains(const HeatBall& ball, const SpaceTimePoint& p);
[[nodiscard]] DomainBox xi_bounds(const HeatBall& ball);

[[nodiscard]] bool gamma_contains(const SpatialVector& x0, Time t0, double R, const SpaceTimePoint& p);
[[nodiscard]] DomainBox gamma_bounds(const SpatialVector& x0, Time t0, double R);

/// Parabolic cylinder C_r(y0, s0) = {|y - y0| < r, s0 - r^2 < s < s0}.
[[nodiscard]] bool cylinder_contains(const SpaceTimePoint& top, double r, const SpaceTimePoint& p);

/// Family dispatch.
[[nodiscard]] bool contains(const HeatBall& ball, const SpaceTimePoint& p);
[[nodiscard]] DomainBox bounds(const HeatBall& ball);

/// Section of the ball at time t, or nullopt when t is outside the open time extent.
[[nodiscard]] std::optional<Slice> slice_at(const HeatBall& ball, Time t);

/// x0 e^{2(t - t0)}.
[[nodiscard]] SpatialVector axis_curve(const SpatialVector& x0, Time t0, Time t);

/// Rasterized open set E: a box cut into cells (the same resolution in space and time),
/// with an optional mask predicate evaluated at cell centers.
class RasterDomain {
public:
    using Predicate = std::function<bool(const SpaceTimePoint&)>;

    explicit RasterDomain(DomainBox box, double cells_per_unit = 64.0, const Predicate& inside = {});

    [[nodiscard]] const DomainBox& box() const noexcept { return box_; }
    [[nodiscard]] double cell_size() const noexcept { return h_; }
    [[nodiscard]] std::size_t dim() const noexcept { return box_.dim(); }
    [[nodiscard]] std::size_t layers() const noexcept { return nt_; }
    [[nodiscard]] std::size_t cells_per_layer() const noexcept { return per_layer_; }
    [[nodiscard]] const std::vector<std::size_t>& shape() const noexcept { return nx_; }

    /// Open-box test plus the mask at p's cell.
    [[nodiscard]] bool contains(const SpaceTimePoint& p) const;
    [[nodiscard]] bool cell_inside(std::size_t layer, std::size_t cell) const noexcept {
        return mask_[layer * per_layer_ + cell] != 0;
    }
    /// (layer, cell) of a point inside the box.
    [[nodiscard]] std::pair<std::size_t, std::size_t> locate(const SpaceTimePoint& p) const;
    [[nodiscard]] SpaceTimePoint cell_center(std::size_t layer, std::size_t cell) const;

    /// Spatial neighbours of a cell (2 in 1-d, 8 in 2-d; fewer at the edge).
    void neighbours(std::size_t cell, std::vector<std::size_t>& out) const;

private:
    DomainBox box_;
    double h_;
    std::size_t nt_ = 0;
    std::vector<std::size_t> nx_;
    std::size_t per_layer_ = 1;
    std::vector<std::uint8_t> mask_;
};

/// Cells of the raster reachable from `from` by paths with strictly decreasing time,
/// indexed [layer * cells_per_layer + cell]. Lateral moves within a layer are limited to
/// `step` length units (infinite by default) and stay inside the mask.
[[nodiscard]] std::vector<std::uint8_t> lambda_set(const RasterDomain& E, const SpaceTimePoint& from,
                                                   double step = std::numeric_limits<double>::infinity());

/// Lambda-reachability of `to` from `from`. Throws DomainError if either point is outside E.
[[nodiscard]] bool lambda_reachable(const RasterDomain& E, const SpaceTimePoint& from, const SpaceTimePoint& to,
                                    double step = std::numeric_limits<double>::infinity());

/// Bounding box of the ball dilated by one raster cell lies inside E (mask included).
[[nodiscard]] bool ball_closure_in_domain(const HeatBall& ball, const RasterDomain& E);
/// Same test against a plain box, dilating by `cell`.
[[nodiscard]] bool ball_closure_in_domain(const HeatBall& ball, const DomainBox& E, double cell = 1.0 / 64.0);

/// One boundary sample of a ball: the point (x, t) on the lateral boundary.
struct BoundarySample {
    Time t;
    SpatialVector x;
};

/// Boundary polylines: `slices` time levels across the ball, and per level the two interval
/// endpoints (n = 1) or `angular` points on the circle (n = 2).
[[nodiscard]] std::vector<BoundarySample> ball_boundary(const HeatBall& ball, std::size_t slices,
                                                        std::size_t angular = 64);

}  // namespace heatmv
