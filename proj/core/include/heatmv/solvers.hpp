#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "heatmv/field.hpp"
#include "heatmv/quadrature.hpp"

namespace heatmv {

/// Where classify_point should look for a catalog entry, and what it should find there.
struct CatalogProbe {
    SpaceTimePoint center;
    std::vector<double> radii;
    PointClass expected = PointClass::temperature;
};

struct CatalogEntry {
    std::string id;
    std::size_t n = 1;
    Equation equation = Equation::heat;
    /// True for exact solutions of `equation`; false for test fixtures.
    bool solution = true;
    std::string formula;
    CatalogProbe probe;
};

/// Every catalog entry, in a stable order.
[[nodiscard]] const std::vector<CatalogEntry>& catalog_listing();
[[nodiscard]] const CatalogEntry& catalog_entry(const std::string& id);
/// Closed-form field for `id`; throws PreconditionError for unknown ids.
[[nodiscard]] ScalarField catalog(const std::string& id);

/// Hermite polynomial H_k (physicists'), k <= 4 in closed form, recurrence beyond.
[[nodiscard]] double hermite_polynomial(std::size_t k, double x);

struct Scheme {
    double theta = 0.5;
    double h = 0.05;
    double dt = 0.01;
};

/// Mass bookkeeping for heat solves: change of the box integral against the integrated boundary flux.
struct MassBalance {
    double mass_change = 0.0;
    double boundary_flux = 0.0;
    double imbalance = 0.0;
};

/// Uniform space-time grid solution of a Cauchy-Dirichlet problem on a box.
struct GridSolution {
    Equation equation = Equation::heat;
    DomainBox box;
    std::vector<std::size_t> nodes;  // per spatial axis, boundary included
    std::vector<double> h;           // per spatial axis
    std::size_t steps = 0;           // time steps; time nodes = steps + 1
    double dt = 0.0;
    Scheme scheme;
    std::string initial_id;
    std::string boundary_id;
    /// values[k * nodes_per_slice() + flat(i, j)], i along axis 0.
    std::vector<double> values;
    /// Scheme truncation estimate (time horizon times max local truncation error).
    double truncation_estimate = 0.0;
    std::optional<MassBalance> mass;
    std::size_t linear_iterations = 0;

    [[nodiscard]] std::size_t dim() const noexcept { return nodes.size(); }
    [[nodiscard]] std::size_t nodes_per_slice() const noexcept;
    /// Node times; the last one is exactly box.t_hi.
    [[nodiscard]] Time time_at(std::size_t k) const noexcept {
        if (k >= steps) return box.t_hi;
        return box.t_lo + (box.t_hi - box.t_lo) * static_cast<Time>(k) / static_cast<Time>(steps);
    }
    [[nodiscard]] double coord(std::size_t axis, std::size_t i) const noexcept {
        return box.lo[axis] + static_cast<double>(i) * h[axis];
    }
    [[nodiscard]] double at(std::size_t k, std::size_t flat) const noexcept {
        return values[k * nodes_per_slice() + flat];
    }
    /// Spatial point of a flat node index.
    [[nodiscard]] SpatialVector node_point(std::size_t flat) const;
    /// True if the flat node index lies on the spatial boundary.
    [[nodiscard]] bool on_boundary(std::size_t flat) const noexcept;
};

/// theta-scheme on the box with initial data at box.t_lo and Dirichlet data from `boundary`.
/// Throws PreconditionError for n > 2 or an explicit step that violates the stability guard,
/// ConvergenceError when the sparse solve misses its residual target.
[[nodiscard]] GridSolution solve_fd(Equation eq, const DomainBox& box, const ScalarField& initial,
                                    const ScalarField& boundary, const Scheme& scheme);

/// Largest explicit step dt <= h^2 / (2n(1 + kappa)) for the operator on the box.
[[nodiscard]] double explicit_step_limit(Equation eq, const DomainBox& box, double h);

/// Multilinear in space, linear in time. Throws DomainError outside the grid hull.
[[nodiscard]] double sample(const GridSolution& g, const SpaceTimePoint& p);

/// Grid-backed field sharing ownership of the solution.
[[nodiscard]] ScalarField as_field(std::shared_ptr<const GridSolution> g, std::string id = "grid");

/// Default solver box |x_i| <= 6 over [t_lo, t_hi].
[[nodiscard]] DomainBox default_solver_box(std::size_t n, Time t_lo, Time t_hi);

/// L-infinity error of g against an exact field over all grid nodes.
[[nodiscard]] double max_error(const GridSolution& g, const ScalarField& exact);

}  // namespace heatmv
