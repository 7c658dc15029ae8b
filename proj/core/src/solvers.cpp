#include "heatmv/solvers.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>

#include "heatmv/kernels.hpp"
#include "heatmv/transference.hpp"

namespace heatmv {

double hermite_polynomial(std::size_t k, double x) {
    switch (k) {
        case 0: return 1.0;
        case 1: return 2 * x;
        case 2: return 4 * x * x - 2;
        case 3: return 8 * x * x * x - 12 * x;
        case 4: return 16 * x * x * x * x - 48 * x * x + 12;
        default: break;
    }
    double h0 = 16 * x * x * x * x - 48 * x * x + 12, hm = 8 * x * x * x - 12 * x;
    for (std::size_t j = 4; j < k; ++j) {
        const double next = 2 * x * h0 - 2 * static_cast<double>(j) * hm;
        hm = h0;
        h0 = next;
    }
    return h0;
}

// ---------------------------------------------------------------------------------------
// Catalog

namespace {

using Builder = std::function<ScalarField()>;

struct Registry {
    std::vector<CatalogEntry> entries;
    std::map<std::string, Builder> builders;
    std::map<std::string, std::size_t> index;

    void add(CatalogEntry e, Builder b) {
        index[e.id] = entries.size();
        builders[e.id] = std::move(b);
        entries.push_back(std::move(e));
    }
};

SpaceTimePoint probe_center(std::size_t n) {
    SpaceTimePoint c;
    c.x = n == 1 ? SpatialVector{0.3} : SpatialVector{0.3, -0.2};
    c.t = 0.5;
    return c;
}

CatalogProbe solution_probe(std::size_t n) { return {probe_center(n), {0.2, 0.1, 0.05}, PointClass::temperature}; }

CatalogProbe fixture_probe(SpaceTimePoint c, std::vector<double> radii, PointClass expected) {
    return {std::move(c), std::move(radii), expected};
}

/// Heat solutions, buildable on any box; `t_floor` is where the formula stops being valid.
struct HeatSolution {
    std::string id;
    std::size_t n;
    std::string formula;
    Time t_floor;
    ScalarField::Evaluator f;
};

std::vector<HeatSolution> heat_solutions() {
    const Time none = -std::numeric_limits<Time>::infinity();
    auto fundamental = [](const SpaceTimePoint& p) {
        SpaceTimePoint q = p;
        return fundamental_solution(q.x, p.t + 1);
    };
    return {
        {"heat.const", 1, "1", none, [](const SpaceTimePoint&) { return 1.0; }},
        {"heat.linear", 1, "x", none, [](const SpaceTimePoint& p) { return p.x[0]; }},
        {"heat.linear2", 2, "x_2", none, [](const SpaceTimePoint& p) { return p.x[1]; }},
        {"heat.poly2", 1, "x^2 + 2t", none,
         [](const SpaceTimePoint& p) { return p.x[0] * p.x[0] + 2 * static_cast<double>(p.t); }},
        {"heat.radial2", 2, "|x|^2 + 4t", none,
         [](const SpaceTimePoint& p) { return p.x.squared_norm() + 4 * static_cast<double>(p.t); }},
        {"heat.fundamental", 1, "Phi(x - 0, t + 1)", Time{-0.75}, fundamental},
        {"heat.fundamental2", 2, "Phi(x - 0, t + 1)", Time{-0.75}, fundamental},
    };
}

/// Domain of a heat solution in the catalog: default box, floored in time.
DomainBox heat_box(const HeatSolution& h) {
    DomainBox b = default_field_box(h.n);
    b.t_lo = std::max(b.t_lo, h.t_floor);
    return b;
}

/// OU box for the pullback of a heat solution: |x_i| <= 8, t from the floor's preimage to 4.
DomainBox ou_pull_box(const HeatSolution& h) {
    DomainBox b = default_field_box(h.n);
    b.t_lo = std::isfinite(h.t_floor) ? phi_time_inverse(h.t_floor) + Time{0.05} : Time{-1};
    return b;
}

const Registry& registry() {
    static const Registry reg = [] {
        Registry r;
        const auto heat = heat_solutions();

        for (const auto& h : heat) {
            r.add({h.id, h.n, Equation::heat, true, h.formula, solution_probe(h.n)},
                  [h] { return make_field(h.id, h.n, Equation::heat, heat_box(h), h.f); });
        }

        auto scalar = [](double (*g)(double, double)) {
            return [g](const SpaceTimePoint& p) { return g(p.x[0], static_cast<double>(p.t)); };
        };
        auto heat_fixture = [&](std::string id, std::string formula, double (*g)(double, double), CatalogProbe probe) {
            r.add({id, 1, Equation::heat, false, formula, probe},
                  [id, g, scalar] { return make_field(id, 1, Equation::none, scalar(g)); });
        };
        heat_fixture("heat.quadratic-bad", "x^2", [](double x, double) { return x * x; },
                     fixture_probe({SpatialVector{0.5}, 0}, {0.2, 0.1, 0.05}, PointClass::sub));
        heat_fixture("heat.neg-t", "-t", [](double, double t) { return -t; },
                     fixture_probe({SpatialVector{0.0}, 0}, {0.2, 0.1, 0.05}, PointClass::sub));
        heat_fixture("heat.pos-t", "t", [](double, double t) { return t; },
                     fixture_probe({SpatialVector{0.0}, 0}, {0.2, 0.1, 0.05}, PointClass::super));
        heat_fixture("heat.sin", "sin(x)", [](double x, double) { return std::sin(x); },
                     fixture_probe({SpatialVector{1.0}, 0}, {0.2, 0.1, 0.05}, PointClass::super));
        heat_fixture("heat.tsq", "-t - t^2", [](double, double t) { return -t - t * t; },
                     fixture_probe({SpatialVector{0.0}, Time{-0.45}}, {1.0, 0.1}, PointClass::neither));

        // Compactly supported C^2 bumps (initial data for solver experiments).
        r.add({"fixture.bump", 1, Equation::none, false, "(1 - x^2)^3_+", {}}, [] {
            return make_field("fixture.bump", 1, Equation::none, [](const SpaceTimePoint& p) {
                const double s = 1 - p.x[0] * p.x[0];
                return s > 0 ? s * s * s : 0.0;
            });
        });
        r.add({"fixture.bump2", 2, Equation::none, false, "(1 - |x|^2)^3_+", {}}, [] {
            return make_field("fixture.bump2", 2, Equation::none, [](const SpaceTimePoint& p) {
                const double s = 1 - p.x.squared_norm();
                return s > 0 ? s * s * s : 0.0;
            });
        });

        // OU temperatures.
        std::vector<std::string> ou_solutions;
        auto add_ou = [&](std::string id, std::size_t n, std::string formula, Builder b) {
            ou_solutions.push_back(id);
            r.add({id, n, Equation::ou, true, std::move(formula), solution_probe(n)}, std::move(b));
        };
        add_ou("ou.const", 1, "1", [] { return make_field("ou.const", 1, Equation::ou, [](const SpaceTimePoint&) {
                   return 1.0;
               }); });
        add_ou("ou.linear", 1, "x e^{-2t}", [] {
            return make_field("ou.linear", 1, Equation::ou, [](const SpaceTimePoint& p) {
                return p.x[0] * static_cast<double>(std::exp(-2 * p.t));
            });
        });
        add_ou("ou.quad", 1, "x^2 e^{-4t} + (1 - e^{-4t})/2", [] {
            return make_field("ou.quad", 1, Equation::ou, [](const SpaceTimePoint& p) {
                const double e = static_cast<double>(std::exp(-4 * p.t));
                return p.x[0] * p.x[0] * e + static_cast<double>(-std::expm1(-4 * p.t)) / 2;
            });
        });
        for (const auto& h : heat) {
            const std::string id = "ou.pull." + h.id;
            add_ou(id, h.n, "T(" + h.formula + ")", [h, id] {
                const DomainBox ob = ou_pull_box(h);
                const ScalarField u = make_field(h.id, h.n, Equation::heat, phi_bounding_image(ob), h.f);
                return heat_to_ou(u, ob).relabeled(id, Equation::ou);
            });
        }
        auto ou_fixture = [&](std::string id, std::string formula, double (*g)(double, double), CatalogProbe probe) {
            r.add({id, 1, Equation::ou, false, formula, probe},
                  [id, g, scalar] { return make_field(id, 1, Equation::none, scalar(g)); });
        };
        ou_fixture("ou.square-linear", "(x e^{-2t})^2",
                   [](double x, double t) {
                       const double u = x * std::exp(-2 * t);
                       return u * u;
                   },
                   fixture_probe({SpatialVector{1.0}, 0}, {0.2, 0.1, 0.05}, PointClass::sub));
        ou_fixture("ou.x2", "x^2", [](double x, double) { return x * x; },
                   fixture_probe({SpatialVector{1.0}, 0}, {0.2, 0.1, 0.05}, PointClass::super));
        ou_fixture("ou.neg-t", "-t", [](double, double t) { return -t; },
                   fixture_probe({SpatialVector{0.5}, 0}, {0.2, 0.1, 0.05}, PointClass::sub));

        // Hermite temperatures.
        auto add_hermite = [&](std::string id, std::size_t n, std::string formula, Builder b) {
            r.add({id, n, Equation::hermite, true, std::move(formula), solution_probe(n)}, std::move(b));
        };
        add_hermite("hermite.ground", 1, "e^{-t - x^2/2}", [] {
            return make_field("hermite.ground", 1, Equation::hermite, [](const SpaceTimePoint& p) {
                return hermite_weight(p);
            });
        });
        add_hermite("hermite.ground2", 2, "e^{-2t - |x|^2/2}", [] {
            return make_field("hermite.ground2", 2, Equation::hermite, [](const SpaceTimePoint& p) {
                return hermite_weight(p);
            });
        });
        add_hermite("hermite.neg-ground", 1, "-e^{-t - x^2/2}", [] {
            return make_field("hermite.neg-ground", 1, Equation::hermite, [](const SpaceTimePoint& p) {
                return -hermite_weight(p);
            });
        });
        for (std::size_t k = 0; k <= 4; ++k) {
            const std::string id = "hermite.eig.k" + std::to_string(k);
            add_hermite(id, 1, "H_" + std::to_string(k) + "(x) e^{-x^2/2} e^{-" + std::to_string(2 * k + 1) + "t}",
                        [id, k] {
                            return make_field(id, 1, Equation::hermite, [k](const SpaceTimePoint& p) {
                                const long double lam = 2.0L * static_cast<long double>(k) + 1;
                                return hermite_polynomial(k, p.x[0]) *
                                       static_cast<double>(std::exp(-0.5L * p.x[0] * p.x[0] - lam * p.t));
                            });
                        });
        }
        for (auto [a, b] : {std::pair<std::size_t, std::size_t>{0, 1}, {1, 0}, {1, 1}, {2, 0}}) {
            const std::string id = "hermite.eig.k" + std::to_string(a) + ".k" + std::to_string(b);
            add_hermite(id, 2,
                        "H_" + std::to_string(a) + "(x_1) H_" + std::to_string(b) + "(x_2) e^{-|x|^2/2} e^{-" +
                            std::to_string(2 * (a + b) + 2) + "t}",
                        [id, a, b] {
                            return make_field(id, 2, Equation::hermite, [a, b](const SpaceTimePoint& p) {
                                const long double lam = 2.0L * static_cast<long double>(a + b) + 2;
                                return hermite_polynomial(a, p.x[0]) * hermite_polynomial(b, p.x[1]) *
                                       static_cast<double>(std::exp(-0.5L * p.x.squared_norm() - lam * p.t));
                            });
                        });
        }
        for (const auto& ou_id : ou_solutions) {
            const std::string id = "hermite.weight." + ou_id;
            const std::size_t n = r.entries[r.index.at(ou_id)].n;
            const Builder base = r.builders.at(ou_id);
            add_hermite(id, n, "W(" + r.entries[r.index.at(ou_id)].formula + ")",
                        [id, base] { return ou_to_hermite(base()).relabeled(id, Equation::hermite); });
        }
        return r;
    }();
    return reg;
}

}  // namespace

const std::vector<CatalogEntry>& catalog_listing() { return registry().entries; }

const CatalogEntry& catalog_entry(const std::string& id) {
    const auto& reg = registry();
    const auto it = reg.index.find(id);
    if (it == reg.index.end()) throw PreconditionError("unknown catalog id '" + id + "'");
    return reg.entries[it->second];
}

ScalarField catalog(const std::string& id) {
    const auto& reg = registry();
    const auto it = reg.builders.find(id);
    if (it == reg.builders.end()) throw PreconditionError("unknown catalog id '" + id + "'");
    return it->second();
}

// ---------------------------------------------------------------------------------------
// Finite differences

std::size_t GridSolution::nodes_per_slice() const noexcept {
    std::size_t p = 1;
    for (auto c : nodes) p *= c;
    return p;
}

SpatialVector GridSolution::node_point(std::size_t flat) const {
    SpatialVector x(dim());
    for (std::size_t a = 0; a < dim(); ++a) {
        x[a] = coord(a, flat % nodes[a]);
        flat /= nodes[a];
    }
    return x;
}

bool GridSolution::on_boundary(std::size_t flat) const noexcept {
    for (std::size_t a = 0; a < dim(); ++a) {
        const std::size_t i = flat % nodes[a];
        if (i == 0 || i + 1 == nodes[a]) return true;
        flat /= nodes[a];
    }
    return false;
}

DomainBox default_solver_box(std::size_t n, Time t_lo, Time t_hi) { return DomainBox::cube(n, 6.0, t_lo, t_hi); }

namespace {

struct Stencil {
    std::size_t col;
    double coef;
};

double drift_speed(Equation eq, double x) { return eq == Equation::ou ? 2 * x : 0.0; }
double potential(Equation eq, const SpatialVector& x) { return eq == Equation::hermite ? x.squared_norm() : 0.0; }

/// Rows of the discrete operator L for every interior node (empty rows on the boundary).
std::vector<std::vector<Stencil>> build_operator(const GridSolution& g) {
    const std::size_t total = g.nodes_per_slice();
    std::vector<std::vector<Stencil>> rows(total);
    std::vector<std::size_t> stride(g.dim(), 1);
    for (std::size_t a = 1; a < g.dim(); ++a) stride[a] = stride[a - 1] * g.nodes[a - 1];
    for (std::size_t flat = 0; flat < total; ++flat) {
        if (g.on_boundary(flat)) continue;
        const SpatialVector x = g.node_point(flat);
        double diag = -potential(g.equation, x);
        auto& row = rows[flat];
        for (std::size_t a = 0; a < g.dim(); ++a) {
            const double h = g.h[a];
            double lo = 1 / (h * h), hi = 1 / (h * h);
            diag -= 2 / (h * h);
            const double v = drift_speed(g.equation, x[a]);  // term -v d_a u
            if (std::fabs(v) * h <= 2) {
                lo += v / (2 * h);
                hi -= v / (2 * h);
            } else if (v > 0) {
                diag -= v / h;
                lo += v / h;
            } else {
                diag += v / h;
                hi -= v / h;
            }
            row.push_back({flat - stride[a], lo});
            row.push_back({flat + stride[a], hi});
        }
        row.push_back({flat, diag});
    }
    return rows;
}

void fill_slice(const GridSolution& g, std::size_t k, const ScalarField& f, bool boundary_only, double* out) {
    SpaceTimePoint p;
    p.t = g.time_at(k);
    for (std::size_t flat = 0; flat < g.nodes_per_slice(); ++flat) {
        if (boundary_only && !g.on_boundary(flat)) continue;
        p.x = g.node_point(flat);
        out[flat] = f(p);
    }
}

/// Thomas algorithm on an M-matrix tridiagonal system (no pivoting needed).
void thomas(std::vector<double>& a, std::vector<double>& b, std::vector<double>& c, std::vector<double>& d) {
    const std::size_t n = d.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double w = a[i] / b[i - 1];
        b[i] -= w * c[i - 1];
        d[i] -= w * d[i - 1];
    }
    d[n - 1] /= b[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) d[i] = (d[i] - c[i] * d[i + 1]) / b[i];
}

double kappa(Equation eq, const DomainBox& box, double h) {
    double xmax = 0, r2 = 0;
    for (std::size_t a = 0; a < box.dim(); ++a) {
        const double m = std::max(std::fabs(box.lo[a]), std::fabs(box.hi[a]));
        xmax = std::max(xmax, m);
        r2 += m * m;
    }
    const double n = static_cast<double>(box.dim());
    const double drift = eq == Equation::ou ? 2 * xmax : 0.0;
    const double pot = eq == Equation::hermite ? r2 : 0.0;
    return (h * h * pot + h * drift) / (2 * n);
}

/// Time horizon times the largest local truncation error, with derivatives from grid differences.
double truncation_estimate(const GridSolution& g) {
    const std::size_t per = g.nodes_per_slice();
    const std::size_t K = g.steps + 1;
    double space = 0, time = 0;
    std::vector<std::size_t> stride(g.dim(), 1);
    for (std::size_t a = 1; a < g.dim(); ++a) stride[a] = stride[a - 1] * g.nodes[a - 1];
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t flat = 0; flat < per; ++flat) {
            std::size_t rem = flat;
            for (std::size_t a = 0; a < g.dim(); ++a) {
                const std::size_t i = rem % g.nodes[a];
                rem /= g.nodes[a];
                if (i < 2 || i + 2 >= g.nodes[a]) continue;
                const std::size_t s = stride[a];
                const double d4 = (g.at(k, flat - 2 * s) - 4 * g.at(k, flat - s) + 6 * g.at(k, flat) -
                                   4 * g.at(k, flat + s) + g.at(k, flat + 2 * s));
                space = std::max(space, std::fabs(d4) / (12 * g.h[a] * g.h[a]));
            }
        }
    }
    const bool crank_nicolson = std::fabs(g.scheme.theta - 0.5) < 1e-12;
    for (std::size_t k = 0; k + 3 < K; ++k) {
        for (std::size_t flat = 0; flat < per; ++flat) {
            if (crank_nicolson) {
                const double d3 = -g.at(k, flat) + 3 * g.at(k + 1, flat) - 3 * g.at(k + 2, flat) + g.at(k + 3, flat);
                time = std::max(time, std::fabs(d3) / (12 * g.dt));
            } else {
                const double d2 = g.at(k, flat) - 2 * g.at(k + 1, flat) + g.at(k + 2, flat);
                time = std::max(time, std::fabs(g.scheme.theta - 0.5) * std::fabs(d2) / g.dt);
            }
        }
    }
    return static_cast<double>(g.box.t_hi - g.box.t_lo) * (space + time);
}

double slice_mass(const GridSolution& g, std::size_t k) {
    double total = 0;
    for (std::size_t flat = 0; flat < g.nodes_per_slice(); ++flat) {
        double w = 1;
        std::size_t rem = flat;
        for (std::size_t a = 0; a < g.dim(); ++a) {
            const std::size_t i = rem % g.nodes[a];
            rem /= g.nodes[a];
            w *= (i == 0 || i + 1 == g.nodes[a]) ? 0.5 * g.h[a] : g.h[a];
        }
        total += w * g.at(k, flat);
    }
    return total;
}

/// Outward normal-derivative flux through the box boundary at time level k.
double boundary_flux(const GridSolution& g, std::size_t k) {
    std::vector<std::size_t> stride(g.dim(), 1);
    for (std::size_t a = 1; a < g.dim(); ++a) stride[a] = stride[a - 1] * g.nodes[a - 1];
    double flux = 0;
    for (std::size_t flat = 0; flat < g.nodes_per_slice(); ++flat) {
        std::size_t rem = flat;
        std::vector<std::size_t> idx(g.dim());
        for (std::size_t a = 0; a < g.dim(); ++a) {
            idx[a] = rem % g.nodes[a];
            rem /= g.nodes[a];
        }
        for (std::size_t a = 0; a < g.dim(); ++a) {
            const bool low = idx[a] == 0, high = idx[a] + 1 == g.nodes[a];
            if (!low && !high) continue;
            double w = 1;
            for (std::size_t b = 0; b < g.dim(); ++b) {
                if (b == a) continue;
                w *= (idx[b] == 0 || idx[b] + 1 == g.nodes[b]) ? 0.5 * g.h[b] : g.h[b];
            }
            const std::size_t s = stride[a];
            const double h = g.h[a];
            if (high)
                flux += w * (3 * g.at(k, flat) - 4 * g.at(k, flat - s) + g.at(k, flat - 2 * s)) / (2 * h);
            if (low)
                flux += w * (3 * g.at(k, flat) - 4 * g.at(k, flat + s) + g.at(k, flat + 2 * s)) / (2 * h);
        }
    }
    return flux;
}

}  // namespace

double explicit_step_limit(Equation eq, const DomainBox& box, double h) {
    const double n = static_cast<double>(box.dim());
    return h * h / (2 * n * (1 + kappa(eq, box, h)));
}

GridSolution solve_fd(Equation eq, const DomainBox& box, const ScalarField& initial, const ScalarField& boundary,
                      const Scheme& scheme) {
    const std::size_t n = box.dim();
    if (n == 0 || n > 2) throw PreconditionError("solve_fd: only n = 1, 2 are supported");
    if (eq == Equation::none) throw PreconditionError("solve_fd: equation must be heat, ou or hermite");
    if (!(scheme.theta >= 0 && scheme.theta <= 1)) throw PreconditionError("solve_fd: theta must lie in [0, 1]");
    if (!(scheme.h > 0) || !(scheme.dt > 0)) throw PreconditionError("solve_fd: steps must be positive");
    if (initial.dim() != n || boundary.dim() != n) throw PreconditionError("solve_fd: field dimension mismatch");

    GridSolution g;
    g.equation = eq;
    g.box = box;
    g.scheme = scheme;
    g.initial_id = initial.id();
    g.boundary_id = boundary.id();
    for (std::size_t a = 0; a < n; ++a) {
        const double len = box.hi[a] - box.lo[a];
        const auto cells = static_cast<std::size_t>(std::max(2.0, std::round(len / scheme.h)));
        g.nodes.push_back(cells + 1);
        g.h.push_back(len / static_cast<double>(cells));
    }
    const double T = static_cast<double>(box.t_hi - box.t_lo);
    g.steps = static_cast<std::size_t>(std::max(1.0, std::ceil(T / scheme.dt - 1e-9)));
    g.dt = T / static_cast<double>(g.steps);
    g.scheme.dt = g.dt;
    const double hmin = *std::min_element(g.h.begin(), g.h.end());
    g.scheme.h = hmin;
    if (scheme.theta == 0 && g.dt > explicit_step_limit(eq, box, hmin) * (1 + 1e-12))
        throw PreconditionError("solve_fd: explicit step violates dt <= h^2/(2n(1+kappa))");

    const std::size_t per = g.nodes_per_slice();
    g.values.assign((g.steps + 1) * per, 0.0);
    fill_slice(g, 0, initial, false, g.values.data());

    const auto L = build_operator(g);
    const double th = scheme.theta;
    std::vector<std::size_t> interior;
    std::vector<long> unknown(per, -1);
    for (std::size_t flat = 0; flat < per; ++flat)
        if (!g.on_boundary(flat)) {
            unknown[flat] = static_cast<long>(interior.size());
            interior.push_back(flat);
        }
    const std::size_t m = interior.size();

    using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;
    SpMat A;
    Eigen::BiCGSTAB<SpMat, Eigen::IncompleteLUT<double>> bicg;
    if (n == 2 && th > 0) {
        std::vector<Eigen::Triplet<double>> trip;
        for (std::size_t r = 0; r < m; ++r) {
            trip.emplace_back(r, r, 1.0);
            for (const auto& s : L[interior[r]])
                if (unknown[s.col] >= 0) trip.emplace_back(r, unknown[s.col], -th * g.dt * s.coef);
        }
        A.resize(static_cast<long>(m), static_cast<long>(m));
        A.setFromTriplets(trip.begin(), trip.end());
        bicg.setTolerance(1e-13);
        bicg.setMaxIterations(1000);
        bicg.compute(A);
    }

    std::vector<double> rhs(m);
    std::vector<double> a(m), b(m), c(m);
    Eigen::VectorXd x(static_cast<long>(m)), bvec(static_cast<long>(m));
    for (std::size_t k = 0; k < g.steps; ++k) {
        const double* cur = &g.values[k * per];
        double* nxt = &g.values[(k + 1) * per];
        fill_slice(g, k + 1, boundary, true, nxt);
        for (std::size_t r = 0; r < m; ++r) {
            const std::size_t flat = interior[r];
            double lu = 0;
            for (const auto& s : L[flat]) lu += s.coef * cur[s.col];
            double v = cur[flat] + (1 - th) * g.dt * lu;
            for (const auto& s : L[flat])
                if (unknown[s.col] < 0) v += th * g.dt * s.coef * nxt[s.col];
            rhs[r] = v;
        }
        if (th == 0) {
            for (std::size_t r = 0; r < m; ++r) nxt[interior[r]] = rhs[r];
            continue;
        }
        if (n == 1) {
            for (std::size_t r = 0; r < m; ++r) {
                a[r] = c[r] = 0;
                b[r] = 1;
                for (const auto& s : L[interior[r]]) {
                    const long u = unknown[s.col];
                    if (u < 0) continue;
                    const double coef = -th * g.dt * s.coef;
                    if (static_cast<std::size_t>(u) + 1 == r) a[r] = coef;
                    else if (static_cast<std::size_t>(u) == r) b[r] += coef;
                    else c[r] = coef;
                }
            }
            thomas(a, b, c, rhs);
            for (std::size_t r = 0; r < m; ++r) nxt[interior[r]] = rhs[r];
        } else {
            for (std::size_t r = 0; r < m; ++r) {
                bvec[static_cast<long>(r)] = rhs[r];
                x[static_cast<long>(r)] = cur[interior[r]];
            }
            x = bicg.solveWithGuess(bvec, x);
            g.linear_iterations += static_cast<std::size_t>(bicg.iterations());
            const double res = (A * x - bvec).lpNorm<Eigen::Infinity>();
            if (!(res <= 1e-10 * std::max(1.0, bvec.lpNorm<Eigen::Infinity>())))
                throw ConvergenceError("solve_fd: sparse solve residual " + std::to_string(res) + " above 1e-10");
            for (std::size_t r = 0; r < m; ++r) nxt[interior[r]] = x[static_cast<long>(r)];
        }
    }

    for (double v : g.values)
        if (!std::isfinite(v)) throw ConvergenceError("solve_fd: non-finite values in the solution");
    g.truncation_estimate = truncation_estimate(g);
    if (eq == Equation::heat) {
        MassBalance mb;
        mb.mass_change = slice_mass(g, g.steps) - slice_mass(g, 0);
        for (std::size_t k = 0; k < g.steps; ++k)
            mb.boundary_flux += 0.5 * g.dt * (boundary_flux(g, k) + boundary_flux(g, k + 1));
        mb.imbalance = std::fabs(mb.mass_change - mb.boundary_flux);
        g.mass = mb;
    }
    return g;
}

double sample(const GridSolution& g, const SpaceTimePoint& p) {
    if (p.dim() != g.dim()) throw PreconditionError("sample: dimension mismatch");
    constexpr double slack = 1e-12;
    // Coordinates within rounding of a node snap to it, so node samples return stored values.
    auto snap = [](double u) {
        const double r = std::round(u);
        return std::fabs(u - r) < 1e-9 ? r : u;
    };
    const double T = static_cast<double>(g.box.t_hi - g.box.t_lo);
    const double tt = snap(static_cast<double>(p.t - g.box.t_lo) / g.dt);
    if (tt < -slack * g.steps || tt > static_cast<double>(g.steps) * (1 + slack) + slack || !(T > 0))
        throw DomainError("sample: time outside the grid hull");
    std::size_t base[kMaxDim];
    double frac[kMaxDim];
    for (std::size_t a = 0; a < g.dim(); ++a) {
        const double u = snap((p.x[a] - g.box.lo[a]) / g.h[a]);
        const double cells = static_cast<double>(g.nodes[a] - 1);
        if (u < -slack * cells || u > cells * (1 + slack) + slack) throw DomainError("sample: point outside the grid hull");
        const double uc = std::clamp(u, 0.0, cells);
        base[a] = std::min(g.nodes[a] - 2, static_cast<std::size_t>(uc));
        frac[a] = uc - static_cast<double>(base[a]);
    }
    const double tc = std::clamp(tt, 0.0, static_cast<double>(g.steps));
    const std::size_t k0 = std::min(g.steps - 1, static_cast<std::size_t>(tc));
    const double ft = tc - static_cast<double>(k0);

    auto spatial = [&](std::size_t k) {
        double acc = 0;
        const std::size_t corners = std::size_t{1} << g.dim();
        for (std::size_t c = 0; c < corners; ++c) {
            double w = 1;
            std::size_t flat = 0, stride = 1;
            for (std::size_t a = 0; a < g.dim(); ++a) {
                const bool up = (c >> a) & 1;
                w *= up ? frac[a] : 1 - frac[a];
                flat += (base[a] + (up ? 1 : 0)) * stride;
                stride *= g.nodes[a];
            }
            if (w != 0) acc += w * g.at(k, flat);
        }
        return acc;
    };
    const double v0 = spatial(k0);
    return ft == 0 ? v0 : (1 - ft) * v0 + ft * spatial(k0 + 1);
}

ScalarField as_field(std::shared_ptr<const GridSolution> g, std::string id) {
    const std::size_t n = g->dim();
    const Equation eq = g->equation;
    const DomainBox box = g->box;
    return ScalarField(std::move(id), n, eq, FieldKind::grid, box,
                       [g = std::move(g)](const SpaceTimePoint& p) { return sample(*g, p); });
}

double max_error(const GridSolution& g, const ScalarField& exact) {
    double err = 0;
    SpaceTimePoint p;
    for (std::size_t k = 0; k <= g.steps; ++k) {
        p.t = g.time_at(k);
        for (std::size_t flat = 0; flat < g.nodes_per_slice(); ++flat) {
            p.x = g.node_point(flat);
            err = std::max(err, std::fabs(g.at(k, flat) - exact(p)));
        }
    }
    return err;
}

}  // namespace heatmv
