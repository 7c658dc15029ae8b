#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

namespace heatmv {

/// Largest spatial dimension supported by the inline point storage.
inline constexpr std::size_t kMaxDim = 8;

/// Time coordinate.
///
/// The map t -> (1 - e^{-4t})/4 squeezes [0, inf) into [0, 1/4); in binary64 a
/// point at t = 3 keeps only ~5 significant digits of distance to 1/4, so time
/// is carried in extended precision.
using Time = long double;

// Error types. Everything thrown by the library derives from Error.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
/// Point or ball outside the set where an object is defined.
struct DomainError : Error {
    using Error::Error;
};
/// Caller violated an operation precondition (bad parameters, wrong family...).
struct PreconditionError : Error {
    using Error::Error;
};
/// Iterative procedure failed to meet its tolerance.
struct ConvergenceError : Error {
    using Error::Error;
};

/// Fixed-capacity n-vector of spatial coordinates.
class SpatialVector {
public:
    SpatialVector() = default;
    explicit SpatialVector(std::size_t n, double fill = 0.0) : n_(n) {
        if (n > kMaxDim) throw PreconditionError("spatial dimension exceeds kMaxDim");
        for (std::size_t i = 0; i < n; ++i) v_[i] = fill;
    }
    SpatialVector(std::initializer_list<double> values) : n_(values.size()) {
        if (n_ > kMaxDim) throw PreconditionError("spatial dimension exceeds kMaxDim");
        std::size_t i = 0;
        for (double v : values) v_[i++] = v;
    }
    explicit SpatialVector(std::span<const double> values) : n_(values.size()) {
        if (n_ > kMaxDim) throw PreconditionError("spatial dimension exceeds kMaxDim");
        for (std::size_t i = 0; i < n_; ++i) v_[i] = values[i];
    }

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    double& operator[](std::size_t i) noexcept { return v_[i]; }
    double operator[](std::size_t i) const noexcept { return v_[i]; }
    [[nodiscard]] const double* begin() const noexcept { return v_.data(); }
    [[nodiscard]] const double* end() const noexcept { return v_.data() + n_; }
    double* begin() noexcept { return v_.data(); }
    double* end() noexcept { return v_.data() + n_; }
    [[nodiscard]] std::span<const double> span() const noexcept { return {v_.data(), n_}; }

    [[nodiscard]] double squared_norm() const noexcept {
        double s = 0.0;
        for (std::size_t i = 0; i < n_; ++i) s += v_[i] * v_[i];
        return s;
    }
    [[nodiscard]] double norm() const noexcept { return std::sqrt(squared_norm()); }
    [[nodiscard]] bool all_finite() const noexcept {
        for (std::size_t i = 0; i < n_; ++i)
            if (!std::isfinite(v_[i])) return false;
        return true;
    }

    SpatialVector& operator+=(const SpatialVector& o) noexcept {
        for (std::size_t i = 0; i < n_; ++i) v_[i] += o.v_[i];
        return *this;
    }
    SpatialVector& operator-=(const SpatialVector& o) noexcept {
        for (std::size_t i = 0; i < n_; ++i) v_[i] -= o.v_[i];
        return *this;
    }
    SpatialVector& operator*=(double a) noexcept {
        for (std::size_t i = 0; i < n_; ++i) v_[i] *= a;
        return *this;
    }
    friend SpatialVector operator+(SpatialVector a, const SpatialVector& b) noexcept { return a += b; }
    friend SpatialVector operator-(SpatialVector a, const SpatialVector& b) noexcept { return a -= b; }
    friend SpatialVector operator*(SpatialVector a, double s) noexcept { return a *= s; }
    friend SpatialVector operator*(double s, SpatialVector a) noexcept { return a *= s; }
    friend bool operator==(const SpatialVector& a, const SpatialVector& b) noexcept {
        if (a.n_ != b.n_) return false;
        for (std::size_t i = 0; i < a.n_; ++i)
            if (a.v_[i] != b.v_[i]) return false;
        return true;
    }

private:
    std::array<double, kMaxDim> v_{};
    std::size_t n_ = 0;
};

[[nodiscard]] inline double squared_distance(const SpatialVector& a, const SpatialVector& b) noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

/// A point (x, t) of space-time.
struct SpaceTimePoint {
    SpatialVector x;
    Time t = 0;

    [[nodiscard]] std::size_t dim() const noexcept { return x.size(); }
    [[nodiscard]] bool finite() const noexcept { return x.all_finite() && std::isfinite(t); }
    friend bool operator==(const SpaceTimePoint&, const SpaceTimePoint&) = default;
};

/// Axis-aligned closed space-time box [lo, hi] x [t_lo, t_hi].
struct DomainBox {
    SpatialVector lo;
    SpatialVector hi;
    Time t_lo = 0;
    Time t_hi = 0;

    DomainBox() = default;
    DomainBox(SpatialVector lower, SpatialVector upper, Time t_lower, Time t_upper);

    /// Cube |x_i| <= half_width in n dimensions, t in [t_lower, t_upper].
    static DomainBox cube(std::size_t n, double half_width, Time t_lower, Time t_upper);

    [[nodiscard]] std::size_t dim() const noexcept { return lo.size(); }
    [[nodiscard]] bool contains(const SpaceTimePoint& p) const noexcept;
    [[nodiscard]] bool contains(const DomainBox& inner) const noexcept;
    /// True if every coordinate of p is at least `margin` inside the box.
    [[nodiscard]] bool contains_with_margin(const SpaceTimePoint& p, double margin) const noexcept;
    [[nodiscard]] DomainBox dilated(double space, double time) const;
    [[nodiscard]] bool empty() const noexcept;
};

/// Intersection of two boxes; may be empty (check `empty()`).
[[nodiscard]] DomainBox intersect(const DomainBox& a, const DomainBox& b);

/// Default evaluation box of closed-form fields: |x_i| <= 8, |t| <= 4.
[[nodiscard]] DomainBox default_field_box(std::size_t n);

enum class Equation { heat, ou, hermite, none };

[[nodiscard]] std::string to_string(Equation e);
[[nodiscard]] Equation equation_from_string(const std::string& s);

}  // namespace heatmv
