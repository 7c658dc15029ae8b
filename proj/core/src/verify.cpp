#include "heatmv/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "heatmv/kernels.hpp"
#include "heatmv/parallel.hpp"
#include "heatmv/transference.hpp"

namespace heatmv {

namespace {

std::size_t last_layer_at_or_before(const GridSolution& g, Time t0) {
    if (t0 < g.box.t_lo || t0 > g.box.t_hi) throw PreconditionError("t0 outside the grid's time range");
    std::size_t k = g.steps;
    while (k > 0 && g.time_at(k) > t0 + 1e-12L * (1 + std::fabs(t0))) --k;
    return k;
}

double data_scale(const GridSolution& g) {
    double s = 0;
    for (double v : g.values) s = std::max(s, std::fabs(v));
    return s;
}

std::string describe(const SpaceTimePoint& p) {
    std::ostringstream os;
    os.precision(6);
    os << "(";
    for (std::size_t i = 0; i < p.dim(); ++i) os << (i ? "," : "") << p.x[i];
    os << ";" << static_cast<double>(p.t) << ")";
    return os.str();
}

/// Uniform point in the unit n-ball.
template <class Rng>
SpatialVector unit_ball_point(std::size_t n, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    SpatialVector w(n);
    double norm2 = 0;
    do {
        norm2 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            w[i] = gauss(rng);
            norm2 += w[i] * w[i];
        }
    } while (norm2 == 0);
    const double rad = std::pow(u01(rng), 1.0 / static_cast<double>(n)) / std::sqrt(norm2);
    return w * rad;
}

double unit_ball_volume(std::size_t n) {
    const double nd = static_cast<double>(n);
    return std::pow(std::numbers::pi, nd / 2) / std::tgamma(nd / 2 + 1);
}

/// Gamma_R point from (w in the unit ball, t): x = e^{-2(t0 - t)} (x0 + R w).
SpaceTimePoint gamma_point(const SpatialVector& x0, Time t0, double R, const SpatialVector& w, Time t) {
    return {(x0 + w * R) * static_cast<double>(std::exp(-2 * (t0 - t))), t};
}

constexpr std::size_t kShard = 1 << 14;

}  // namespace

MaxPrincipleReport check_weak_max(const GridSolution& g, std::optional<Time> t0) {
    MaxPrincipleReport rep;
    rep.t0 = t0.value_or(g.box.t_hi);
    const std::size_t kmax = last_layer_at_or_before(g, rep.t0);
    const std::size_t per = g.nodes_per_slice();
    rep.interior_max = -std::numeric_limits<double>::infinity();
    rep.parabolic_boundary_max = -std::numeric_limits<double>::infinity();
    std::size_t arg_k = 0, arg_f = 0;
    for (std::size_t k = 0; k <= kmax; ++k) {
        for (std::size_t f = 0; f < per; ++f) {
            const double v = g.at(k, f);
            if (k == 0 || g.on_boundary(f)) {
                rep.parabolic_boundary_max = std::max(rep.parabolic_boundary_max, v);
            } else if (v > rep.interior_max) {
                rep.interior_max = v;
                arg_k = k;
                arg_f = f;
            }
        }
    }
    rep.interior_location = {g.node_point(arg_f), g.time_at(arg_k)};
    rep.tolerance = std::max(10 * g.truncation_estimate, 1e-12 * std::max(1.0, data_scale(g)));
    if (g.equation == Equation::hermite && rep.interior_max < 0) {
        rep.not_applicable = true;
        return rep;
    }
    rep.violation = rep.interior_max > rep.parabolic_boundary_max + rep.tolerance;
    return rep;
}

StrongMaxReport check_strong_max(const GridSolution& g, std::optional<double> tol) {
    StrongMaxReport rep;
    rep.tolerance = tol.value_or(kStrongMaxRelTol * std::max(1.0, data_scale(g)));
    const std::size_t per = g.nodes_per_slice();
    // Running sup / inf over layers < k, with the sup's location.
    double sup = -std::numeric_limits<double>::infinity();
    double inf = std::numeric_limits<double>::infinity();
    std::size_t sup_k = 0, sup_f = 0;

    // Raster of the open grid box for witness confirmation.
    std::optional<RasterDomain> raster;
    auto ensure_raster = [&] {
        if (raster) return;
        double hmin = *std::min_element(g.h.begin(), g.h.end());
        raster.emplace(g.box, 1.0 / std::min(hmin, static_cast<double>(g.dt)));
    };

    for (std::size_t k = 0; k <= g.steps; ++k) {
        if (k > 0) {
            for (std::size_t f = 0; f < per; ++f) {
                if (g.on_boundary(f) || k == g.steps) continue;
                ++rep.checked;
                const double v = g.at(k, f);
                if (v < sup - rep.tolerance) continue;
                ++rep.attaining;
                if (std::max(sup, v) - std::min(inf, v) <= rep.tolerance) continue;
                const SpaceTimePoint P{g.node_point(f), g.time_at(k)};
                // The sup location may be on the closure; nudge it inside before the reachability query.
                SpaceTimePoint W{g.node_point(sup_f), g.time_at(sup_k)};
                ensure_raster();
                const double nudge = raster->cell_size();
                for (std::size_t i = 0; i < W.dim(); ++i)
                    W.x[i] = std::clamp(W.x[i], g.box.lo[i] + nudge, g.box.hi[i] - nudge);
                W.t = std::max<Time>(W.t, g.box.t_lo + nudge);
                if (W.t < P.t && raster->contains(P) && raster->contains(W) && lambda_reachable(*raster, P, W)) {
                    rep.flagged.push_back(P);
                    rep.witnesses.push_back({g.node_point(sup_f), g.time_at(sup_k)});
                }
            }
        }
        for (std::size_t f = 0; f < per; ++f) {
            const double v = g.at(k, f);
            if (v > sup) {
                sup = v;
                sup_k = k;
                sup_f = f;
            }
            inf = std::min(inf, v);
        }
    }
    return rep;
}

PropagationReport check_infinite_propagation(const GridSolution& g, std::optional<Time> t_probe) {
    PropagationReport rep;
    const std::size_t per = g.nodes_per_slice();
    double data_max = 0;
    for (std::size_t k = 0; k <= g.steps; ++k) {
        for (std::size_t f = 0; f < per; ++f) {
            if (k != 0 && !g.on_boundary(f)) continue;
            const double v = g.at(k, f);
            if (v < 0) throw PreconditionError("check_infinite_propagation: negative parabolic-boundary data");
            data_max = std::max(data_max, v);
        }
    }
    if (g.steps == 0) throw PreconditionError("check_infinite_propagation: grid has no time steps");
    rep.t_probe = t_probe.value_or(g.time_at(1));
    if (data_max == 0) {
        rep.degenerate = true;
        return rep;
    }
    rep.interior_min = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= g.steps; ++k) {
        if (g.time_at(k) < rep.t_probe) continue;
        for (std::size_t f = 0; f < per; ++f) {
            if (g.on_boundary(f)) continue;
            const double v = g.at(k, f);
            if (v < rep.interior_min) {
                rep.interior_min = v;
                rep.location = {g.node_point(f), g.time_at(k)};
            }
        }
    }
    return rep;
}

HarnackReport harnack_ratio(const ScalarField& U, const std::vector<SpaceTimePoint>& K,
                            const std::vector<SpaceTimePoint>& mu, const RasterDomain* E) {
    if (K.empty() || mu.empty()) throw PreconditionError("harnack_ratio: empty K or mu");
    HarnackReport rep;
    if (E && mu.size() == 1) {
        for (const auto& p : K)
            if (!lambda_reachable(*E, mu.front(), p))
                throw PreconditionError("harnack_ratio: K point " + describe(p) + " is not in Lambda" +
                                        describe(mu.front()));
        rep.lambda_validated = true;
    }
    for (const auto& p : K) {
        const double v = U(p);
        if (v < 0) throw PreconditionError("harnack_ratio: U is negative at " + describe(p));
        rep.lhs = std::max(rep.lhs, v);
    }
    for (const auto& p : mu) {
        const double v = U(p);
        if (v < 0) throw PreconditionError("harnack_ratio: U is negative at " + describe(p));
        rep.rhs += v;
    }
    rep.rhs /= static_cast<double>(mu.size());
    rep.samples = K.size();
    if (rep.rhs > 0) {
        rep.ratio = rep.lhs / rep.rhs;
    } else if (rep.lhs > 0) {
        rep.unbounded = true;
        rep.ratio = std::numeric_limits<double>::infinity();
    }
    std::ostringstream os;
    os << "field=" << U.id() << " K=" << K.size() << " points, mu=";
    if (mu.size() == 1)
        os << "delta" << describe(mu.front());
    else
        os << "uniform on " << mu.size() << " points";
    rep.configuration = os.str();
    return rep;
}

std::vector<ScalarField> pullback_family(std::size_t n, std::size_t count, const DomainBox& box, double spacing,
                                         double shift) {
    if (count == 0) throw PreconditionError("pullback_family: empty family");
    if (!(phi_time(box.t_lo) + shift > 0))
        throw PreconditionError("pullback_family: shift leaves the heat time non-positive on the box");
    std::vector<ScalarField> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double a = (static_cast<double>(i) - 0.5 * static_cast<double>(count - 1)) * spacing;
        std::ostringstream id;
        id << "pullback.a=" << a;
        out.push_back(make_field(id.str(), n, Equation::ou, box, [a, shift](const SpaceTimePoint& p) {
            SpaceTimePoint q = phi(p);
            q.x[0] -= a;
            return fundamental_solution(q.x, q.t + shift);
        }));
    }
    return out;
}

KappaReport empirical_kappa(const std::vector<ScalarField>& family, const std::vector<SpaceTimePoint>& K,
                            const std::vector<SpaceTimePoint>& mu, const RasterDomain* E) {
    KappaReport rep;
    rep.family_size = family.size();
    for (const auto& U : family) {
        const auto r = harnack_ratio(U, K, mu, E);
        rep.ratios.push_back(r.ratio);
        if (r.ratio > rep.kappa_hat) {
            rep.kappa_hat = r.ratio;
            rep.argmax = U.id();
        }
        E = nullptr;  // reachability is a property of K and mu, checked once
    }
    return rep;
}

HarnackReport harnack_mintq(const ScalarField& U, const SpatialVector& x0, Time t0, double R, double q,
                            std::size_t samples, std::uint64_t seed) {
    if (!(R > 0 && R <= 1)) throw PreconditionError("harnack_mintq: R must be in (0, 1]");
    if (!(q > 0)) throw PreconditionError("harnack_mintq: q must be positive");
    if (x0.size() != U.dim()) throw PreconditionError("harnack_mintq: dimension mismatch");
    if (!U.domain().contains(gamma_bounds(x0, t0, 4 * R)))
        throw DomainError("harnack_mintq: closure of Gamma_4R is not inside the field's domain");
    const std::size_t n = x0.size();
    HarnackReport rep;

    // lhs: lattice over Gamma_R, open in t, w on a 1/16 grid of the unit ball.
    constexpr int kT = 64, kW = 16;
    std::vector<SpatialVector> ws;
    if (n == 1) {
        for (int i = -kW + 1; i < kW; ++i) ws.push_back(SpatialVector{static_cast<double>(i) / kW});
    } else {
        SpatialVector w(n, 0.0);
        std::vector<int> idx(n, -kW + 1);
        for (;;) {
            double r2 = 0;
            for (std::size_t i = 0; i < n; ++i) {
                w[i] = static_cast<double>(idx[i]) / kW;
                r2 += w[i] * w[i];
            }
            if (r2 < 1) ws.push_back(w);
            std::size_t d = 0;
            while (d < n && ++idx[d] >= kW) idx[d++] = -kW + 1;
            if (d == n) break;
        }
    }
    for (int it = 1; it < kT; ++it) {
        const Time t = t0 - static_cast<Time>(R) * R * static_cast<Time>(kT - it) / kT;
        for (const auto& w : ws) rep.lhs = std::max(rep.lhs, U(gamma_point(x0, t0, R, w, t)));
    }

    // rhs: uniform (w, t) over Gamma_4R; nu-density relative to dw dt is proportional to e^{-4t}.
    const double R4 = 4 * R;
    const std::size_t shards = std::max<std::size_t>(1, (samples + kShard - 1) / kShard);
    struct Acc {
        double sw = 0, swf = 0, sw2 = 0, sw2f = 0, sw2f2 = 0;
    };
    std::vector<Acc> acc(shards);
    parallel_for(shards, [&](std::size_t s) {
        std::mt19937_64 rng(shard_seed(seed, s));
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        const std::size_t count = std::min(kShard, samples - s * kShard);
        Acc a;
        for (std::size_t i = 0; i < count; ++i) {
            const auto w = unit_ball_point(n, rng);
            const Time t = t0 - static_cast<Time>(R4) * R4 * static_cast<Time>(1 - u01(rng));
            const double f = std::pow(U.evaluate_unchecked(gamma_point(x0, t0, R4, w, t)), q);
            const double wt = static_cast<double>(std::exp(-4 * (t - t0)));
            a.sw += wt;
            a.swf += wt * f;
            a.sw2 += wt * wt;
            a.sw2f += wt * wt * f;
            a.sw2f2 += wt * wt * f * f;
        }
        acc[s] = a;
    });
    Acc tot;
    for (const auto& a : acc) {
        tot.sw += a.sw;
        tot.swf += a.swf;
        tot.sw2 += a.sw2;
        tot.sw2f += a.sw2f;
        tot.sw2f2 += a.sw2f2;
    }
    const double mean = tot.swf / tot.sw;
    // Delta method for the self-normalized mean: sum w^2 (f - mean)^2 / (sum w)^2.
    const double var = std::max(0.0, tot.sw2f2 - 2 * mean * tot.sw2f + mean * mean * tot.sw2) / (tot.sw * tot.sw);
    const double se_mean = std::sqrt(var);
    rep.rhs = std::pow(mean, 1 / q);
    rep.samples = samples;
    if (rep.rhs > 0) {
        rep.ratio = rep.lhs / rep.rhs;
        const double se_rhs = rep.rhs * se_mean / (q * mean);
        rep.ratio_se = rep.ratio * se_rhs / rep.rhs;
    } else if (rep.lhs > 0) {
        rep.unbounded = true;
        rep.ratio = std::numeric_limits<double>::infinity();
    }
    std::ostringstream os;
    os << "field=" << U.id() << " Gamma_R center=" << describe({x0, t0}) << " R=" << R << " q=" << q;
    rep.configuration = os.str();
    return rep;
}

double gamma_measure(std::size_t n, Time t0, double R) {
    const double nd = static_cast<double>(n);
    return unit_ball_volume(n) * std::pow(R, nd) * static_cast<double>(std::exp(-(2 * nd + 4) * t0)) *
           std::expm1(4 * R * R) / 4;
}

std::pair<double, double> gamma_measure_mc(const SpatialVector& x0, Time t0, double R, std::size_t samples,
                                           std::uint64_t seed) {
    const std::size_t n = x0.size();
    const DomainBox bb = gamma_bounds(x0, t0, R);
    double vol = static_cast<double>(bb.t_hi - bb.t_lo);
    for (std::size_t i = 0; i < n; ++i) vol *= bb.hi[i] - bb.lo[i];
    const std::size_t shards = std::max<std::size_t>(1, (samples + kShard - 1) / kShard);
    std::vector<std::pair<double, double>> acc(shards);
    parallel_for(shards, [&](std::size_t s) {
        std::mt19937_64 rng(shard_seed(seed, s));
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        const std::size_t count = std::min(kShard, samples - s * kShard);
        double s1 = 0, s2 = 0;
        SpaceTimePoint p{SpatialVector(n), 0};
        for (std::size_t i = 0; i < count; ++i) {
            for (std::size_t d = 0; d < n; ++d) p.x[d] = bb.lo[d] + (bb.hi[d] - bb.lo[d]) * u01(rng);
            p.t = bb.t_lo + (bb.t_hi - bb.t_lo) * static_cast<Time>(u01(rng));
            if (!gamma_contains(x0, t0, R, p)) continue;
            const double v = static_cast<double>(std::exp(-(2 * static_cast<Time>(n) + 4) * p.t));
            s1 += v;
            s2 += v * v;
        }
        acc[s] = {s1, s2};
    });
    double s1 = 0, s2 = 0;
    for (const auto& [a, b] : acc) {
        s1 += a;
        s2 += b;
    }
    const double N = static_cast<double>(samples);
    const double mean = s1 / N;
    const double var = std::max(0.0, s2 / N - mean * mean) / N;
    return {vol * mean, vol * std::sqrt(var)};
}

MeasureFit gamma_measure_fit(const SpatialVector& x0, Time t0, double R_lo, double R_hi, std::size_t points,
                             std::size_t samples, std::uint64_t seed) {
    if (!(R_lo > 0 && R_hi > R_lo) || points < 2) throw PreconditionError("gamma_measure_fit: bad radius range");
    MeasureFit fit;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < points; ++i) {
        const double R = R_lo * std::pow(R_hi / R_lo, static_cast<double>(i) / static_cast<double>(points - 1));
        const auto [m, se] = gamma_measure_mc(x0, t0, R, samples, shard_seed(seed, 1000 + i));
        fit.radii.push_back(R);
        fit.measure.push_back(m);
        fit.standard_error.push_back(se);
        fit.exact.push_back(gamma_measure(x0.size(), t0, R));
        const double x = std::log(R), y = std::log(m);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double np = static_cast<double>(points);
    fit.slope = (sxy - sx * sy / np) / (sxx - sx * sx / np);
    return fit;
}

double gamma_sandwich_lambda() { return std::sqrt(std::expm1(4.0) / 4); }

SandwichReport gamma_sandwich(const SpatialVector& x0, Time t0, double R, double lambda, std::size_t samples,
                              std::uint64_t seed) {
    if (!(R > 0) || !(lambda > 0)) throw PreconditionError("gamma_sandwich: R and lambda must be positive");
    const std::size_t n = x0.size();
    SandwichReport rep;
    rep.R = R;
    rep.r = R * static_cast<double>(std::exp(-2 * t0));
    rep.lambda = lambda;
    const SpaceTimePoint top = phi({x0, t0});
    const std::size_t half = samples / 2;
    const std::size_t shards = std::max<std::size_t>(1, (half + kShard - 1) / kShard);
    std::vector<std::pair<std::size_t, std::size_t>> bad(shards);
    parallel_for(shards, [&](std::size_t s) {
        std::mt19937_64 rng(shard_seed(seed, s));
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        const std::size_t count = std::min(kShard, half - s * kShard);
        std::size_t inner = 0, outer = 0;
        for (std::size_t i = 0; i < count; ++i) {
            // Inner: C_r pulled back.
            const auto w = unit_ball_point(n, rng);
            const SpaceTimePoint q{top.x + w * rep.r,
                                   top.t - static_cast<Time>(rep.r) * rep.r * static_cast<Time>(1 - u01(rng))};
            if (!gamma_contains(x0, t0, R, phi_inverse(q))) ++inner;
            // Outer: Gamma_R pushed forward.
            const auto v = unit_ball_point(n, rng);
            const Time t = t0 - static_cast<Time>(R) * R * static_cast<Time>(1 - u01(rng));
            if (!cylinder_contains(top, lambda * rep.r, phi(gamma_point(x0, t0, R, v, t)))) ++outer;
        }
        bad[s] = {inner, outer};
    });
    rep.inner_samples = rep.outer_samples = half;
    for (const auto& [a, b] : bad) {
        rep.inner_violations += a;
        rep.outer_violations += b;
    }
    return rep;
}

RadialBoundReport gamma_radial_bounds(const SpatialVector& x0, Time t0, double R, std::size_t samples,
                                      std::uint64_t seed) {
    const double r0 = x0.norm();
    if (!(r0 > 0)) throw PreconditionError("gamma_radial_bounds: x0 must be nonzero");
    const std::size_t n = x0.size();
    RadialBoundReport rep;
    rep.samples = samples;
    rep.c1_reference = std::exp(-2 * R * R) * (1 - R / r0);
    std::mt19937_64 rng(shard_seed(seed, 0));
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    rep.min_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < samples; ++i) {
        const auto w = unit_ball_point(n, rng);
        const Time t = t0 - static_cast<Time>(R) * R * static_cast<Time>(1 - u01(rng));
        const double ratio = gamma_point(x0, t0, R, w, t).x.norm() / r0;
        rep.min_ratio = std::min(rep.min_ratio, ratio);
        rep.max_ratio = std::max(rep.max_ratio, ratio);
    }
    return rep;
}

}  // namespace heatmv
