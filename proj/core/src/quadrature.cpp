#include "heatmv/quadrature.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <random>

#include "heatmv/parallel.hpp"
#include "heatmv/transference.hpp"

namespace heatmv {

std::string to_string(QuadMethod m) {
    switch (m) {
        case QuadMethod::automatic: return "auto";
        case QuadMethod::tensor: return "tensor";
        case QuadMethod::montecarlo: return "montecarlo";
    }
    return "?";
}

QuadMethod quad_method_from_string(const std::string& s) {
    if (s == "auto") return QuadMethod::automatic;
    if (s == "tensor" || s == "deterministic") return QuadMethod::tensor;
    if (s == "montecarlo" || s == "mc") return QuadMethod::montecarlo;
    throw PreconditionError("unknown quadrature method '" + s + "'");
}

std::string to_string(PointClass c) {
    switch (c) {
        case PointClass::temperature: return "temperature";
        case PointClass::sub: return "sub";
        case PointClass::super: return "super";
        case PointClass::neither: return "neither";
    }
    return "?";
}

PointClass point_class_from_string(const std::string& s) {
    for (auto c : {PointClass::temperature, PointClass::sub, PointClass::super, PointClass::neither})
        if (to_string(c) == s) return c;
    throw PreconditionError("unknown classification '" + s + "'");
}

const GaussRule& gauss_legendre(std::size_t q) {
    static std::mutex mutex;
    static std::map<std::size_t, GaussRule> cache;
    if (q == 0) throw PreconditionError("gauss_legendre: need at least one node");
    std::lock_guard lock(mutex);
    auto it = cache.find(q);
    if (it != cache.end()) return it->second;
    GaussRule rule;
    rule.nodes.resize(q);
    rule.weights.resize(q);
    for (std::size_t i = 0; i < (q + 1) / 2; ++i) {
        long double x = std::cos(std::numbers::pi_v<long double> * (static_cast<long double>(i) + 0.75L) /
                                 (static_cast<long double>(q) + 0.5L));
        long double dp = 0;
        for (int iter = 0; iter < 100; ++iter) {
            long double p0 = 1, p1 = x;
            for (std::size_t k = 2; k <= q; ++k) {
                const long double p2 = ((2.0L * k - 1) * x * p1 - (k - 1.0L) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (q == 1) p0 = 1;
            dp = static_cast<long double>(q) * (x * p1 - p0) / (x * x - 1);
            const long double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-19L) break;
        }
        const double w = static_cast<double>(2 / ((1 - x * x) * dp * dp));
        rule.nodes[i] = -static_cast<double>(x);
        rule.nodes[q - 1 - i] = static_cast<double>(x);
        rule.weights[i] = rule.weights[q - 1 - i] = w;
    }
    return cache.emplace(q, std::move(rule)).first->second;
}

namespace {

constexpr long double kPi = std::numbers::pi_v<long double>;

/// Everything an integrand evaluation needs. Integration runs on the classical side:
/// v = ln(r / tau) and w in the unit n-ball with z = rho(tau) w, rho^2 = 2 N tau v.
struct Problem {
    const ScalarField* f = nullptr;
    KernelSpec spec;
    std::size_t n = 1, m = 0, N = 1;
    double r = 1.0;
    bool pulled = false;
    bool hermite = false;
    SpaceTimePoint top;
    DescentConstants dc{0, 0};
    long double norm = 0;  // (4 pi)^{-n/2}, times c_m for descent

    Problem(const ScalarField& field, const KernelSpec& k) : f(&field), spec(k) {
        n = k.n;
        m = k.m;
        N = n + m;
        r = k.r;
        pulled = k.family != KernelFamily::classical && k.family != KernelFamily::descent_classical;
        hermite = k.family == KernelFamily::hermite || k.family == KernelFamily::descent_hermite;
        top = pulled ? phi(k.anchor) : k.anchor;
        norm = std::pow(4 * kPi, -static_cast<long double>(n) / 2);
        if (m > 0) {
            dc = descent_constants(n, m);
            norm *= dc.c_m;
        }
    }

    /// Normalized measure density in (v, w).
    [[nodiscard]] long double mu(long double v, long double w2) const {
        const long double NN = static_cast<long double>(N);
        if (m == 0) {
            const long double nn = static_cast<long double>(n);
            return norm * std::pow(2 * nn * v, nn / 2 + 1) * std::exp(-nn * v / 2) * w2 / 4;
        }
        return norm * std::pow(2 * NN * v * std::exp(-v), NN / 2) * v * (2 * NN * w2 + dc.a_nm) *
               std::pow(std::max(0.0L, 1 - w2), static_cast<long double>(m) / 2);
    }

    [[nodiscard]] SpaceTimePoint classical_point(long double v, const double* w, long double& tau,
                                                 long double& rho) const {
        tau = r * std::exp(-v);
        rho = std::sqrt(2 * static_cast<long double>(N) * tau * v);
        SpaceTimePoint q = top;
        for (std::size_t i = 0; i < n; ++i) q.x[i] = static_cast<double>(q.x[i] + rho * w[i]);
        q.t = top.t - tau;
        return q;
    }

    /// f transported to the classical side, including the Hermite weight ratio.
    [[nodiscard]] long double F(const SpaceTimePoint& q) const {
        if (!pulled) return f->evaluate_unchecked(q);
        const SpaceTimePoint p = phi_inverse(q);
        const long double val = f->evaluate_unchecked(p);
        if (!hermite) return val;
        const long double lr = (p.t - spec.anchor.t) * static_cast<long double>(n) +
                               0.5L * (static_cast<long double>(p.x.squared_norm()) - spec.anchor.x.squared_norm());
        return val * std::exp(lr);
    }
};

std::vector<std::pair<double, double>> time_panels() {
    std::vector<std::pair<double, double>> panels;
    constexpr int kLevels = 12;
    constexpr double kGrade = 0.15;
    double a = 0.0;
    for (int l = kLevels; l >= 0; --l) {
        const double b = std::pow(kGrade, l);
        panels.emplace_back(a, b);
        a = b;
    }
    for (double b = 2.0; b <= 16.0; b += 1.0) panels.emplace_back(b - 1.0, b);
    for (double b = 20.0; b <= 80.0; b += 4.0) panels.emplace_back(b - 4.0, b);
    return panels;
}

long double tensor_sum(const Problem& pb, std::size_t q, std::size_t Q) {
    static const auto panels = time_panels();
    const GaussRule& gv = gauss_legendre(q);
    const GaussRule& gt = gauss_legendre(Q);
    const std::size_t nv = panels.size() * q;
    std::vector<long double> partial(nv, 0.0L);
    const std::size_t A = 2 * Q;

    parallel_for(nv, [&](std::size_t idx) {
        const auto& [a, b] = panels[idx / q];
        const std::size_t i = idx % q;
        const long double half = 0.5L * (b - a);
        const long double v = a + half * (1 + gv.nodes[i]);
        const long double wv = half * gv.weights[i];
        long double acc = 0;
        double w[kMaxDim] = {};
        long double tau, rho;
        if (pb.n == 1) {
            for (std::size_t j = 0; j < Q; ++j) {
                const long double th = kPi / 2 * gt.nodes[j];
                const long double wt = kPi / 2 * gt.weights[j];
                w[0] = static_cast<double>(std::sin(th));
                const long double jac = std::cos(th);
                const SpaceTimePoint qp = pb.classical_point(v, w, tau, rho);
                acc += wt * jac * pb.mu(v, static_cast<long double>(w[0]) * w[0]) * pb.F(qp);
            }
        } else {
            for (std::size_t j = 0; j < Q; ++j) {
                const long double th = kPi / 4 * (1 + gt.nodes[j]);
                const long double wt = kPi / 4 * gt.weights[j];
                const long double rw = std::sin(th);
                const long double jac = rw * std::cos(th);
                const long double m_here = pb.mu(v, rw * rw);
                long double ring = 0;
                for (std::size_t k = 0; k < A; ++k) {
                    const long double al = 2 * kPi * static_cast<long double>(k) / static_cast<long double>(A);
                    w[0] = static_cast<double>(rw * std::cos(al));
                    w[1] = static_cast<double>(rw * std::sin(al));
                    ring += pb.F(pb.classical_point(v, w, tau, rho));
                }
                acc += wt * jac * m_here * ring * (2 * kPi / static_cast<long double>(A));
            }
        }
        partial[idx] = wv * acc;
    });
    long double total = 0;
    for (long double p : partial) total += p;
    return total;
}

MVResult integrate_tensor(const Problem& pb, const MVConfig& cfg) {
    if (pb.n > 2) throw PreconditionError("mv_integral: deterministic quadrature supports n <= 2 only");
    if (cfg.max_level == 0 || cfg.base_nodes == 0 || cfg.base_slice_nodes == 0)
        throw PreconditionError("mv_integral: tensor path needs max_level >= 1 and nonzero node counts");
    const double tol = cfg.tolerance_for(pb.n);
    static const std::size_t panel_count = time_panels().size();
    auto nodes_at = [&](std::size_t level) {
        const std::size_t q = cfg.base_nodes << level, Q = cfg.base_slice_nodes << level;
        return panel_count * q * (pb.n == 1 ? Q : 2 * Q * Q);
    };
    MVResult res;
    res.method = QuadMethod::tensor;
    long double prev = tensor_sum(pb, cfg.base_nodes, cfg.base_slice_nodes);
    std::size_t total_nodes = nodes_at(0);
    for (std::size_t level = 1; level <= cfg.max_level; ++level) {
        const long double cur = tensor_sum(pb, cfg.base_nodes << level, cfg.base_slice_nodes << level);
        total_nodes += nodes_at(level);
        res.value = static_cast<double>(cur);
        res.error_estimate = static_cast<double>(std::fabs(cur - prev));
        res.level = level;
        res.nodes_or_samples = total_nodes;
        if (res.error_estimate <= tol) return res;
        prev = cur;
    }
    if (cfg.require_convergence)
        throw ConvergenceError("mv_integral: refinement estimate " + std::to_string(res.error_estimate) +
                               " above tolerance " + std::to_string(tol));
    return res;
}

/// Direct-coordinate Monte Carlo: (v, w) drawn from a Gamma-in-v, uniform-in-w density,
/// each sample mapped to the ball and weighted by the kernel evaluated where it lies.
MVResult integrate_montecarlo(const Problem& pb, const MVConfig& cfg) {
    const long double NN = static_cast<long double>(pb.N);
    const long double shape = pb.m == 0 ? (static_cast<long double>(pb.n) + 4) / 2 : NN / 2 + 1;
    const long double rate = NN / 2;
    const long double nn = static_cast<long double>(pb.n);
    const long double log_ball = nn / 2 * std::log(kPi) - std::lgamma(nn / 2 + 1);
    const long double log_gamma_norm = shape * std::log(rate) - std::lgamma(shape);
    const long double prefactor = std::pow(4 * kPi * pb.r, -nn / 2);

    // Inverse CDF of the v density tabulated at equal-probability knots; between knots v is
    // sampled uniformly and weighted by that piecewise-constant density, so the table
    // introduces no bias. The last cell uses the exact inverse.
    constexpr std::size_t kCells = 4096;
    std::vector<long double> knots(kCells);
    for (std::size_t i = 0; i < kCells; ++i)
        knots[i] = boost::math::gamma_p_inv(static_cast<double>(shape),
                                            static_cast<double>(i) / static_cast<double>(kCells)) /
                   rate;

    constexpr std::size_t kShard = 1 << 14;
    struct Moments {
        long double sum = 0, sumsq = 0;
    };

    auto run_shard = [&](std::size_t k) {
        std::mt19937_64 rng(shard_seed(cfg.seed, k));
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        std::normal_distribution<double> gauss(0.0, 1.0);
        Moments mom;
        double w[kMaxDim] = {};
        for (std::size_t j = 0; j < kShard; ++j) {
            const double u = (static_cast<double>(j) + u01(rng)) / static_cast<double>(kShard);
            const double uk = u * static_cast<double>(kCells);
            const auto cell = std::min(kCells - 1, static_cast<std::size_t>(uk));
            long double v, log_pv;
            if (cell + 1 < kCells) {
                const long double width = knots[cell + 1] - knots[cell];
                v = knots[cell] + (uk - static_cast<double>(cell)) * width;
                log_pv = -std::log(static_cast<long double>(kCells) * width);
            } else {
                v = boost::math::gamma_p_inv(static_cast<double>(shape), std::min(u, 1.0 - 1e-16)) / rate;
                log_pv = log_gamma_norm + (shape - 1) * std::log(v) - rate * v;
            }
            double g2 = 0;
            for (std::size_t d = 0; d < pb.n; ++d) {
                w[d] = gauss(rng);
                g2 += w[d] * w[d];
            }
            const double radial = std::pow(u01(rng), 1.0 / static_cast<double>(pb.n)) / std::sqrt(g2);
            for (std::size_t d = 0; d < pb.n; ++d) w[d] *= radial;
            long double w2 = 0;
            for (std::size_t d = 0; d < pb.n; ++d) w2 += static_cast<long double>(w[d]) * w[d];

            const long double log_p = log_pv - log_ball;
            long double tau, rho;
            const SpaceTimePoint q = pb.classical_point(v, w, tau, rho);
            long double val;
            if (tau > 1e-12L * pb.r) {
                const SpaceTimePoint p = pb.pulled ? phi_inverse(q) : q;
                long double kern = 0;
                try {
                    kern = evaluate_kernel(pb.spec, p);
                } catch (const DomainError&) {
                    kern = 0;  // rounding put a boundary sample just outside Omega_m
                }
                long double jac = prefactor * tau * std::pow(rho, nn);
                if (pb.pulled) jac *= std::exp(2 * (nn + 2) * p.t);
                val = pb.f->evaluate_unchecked(p) * kern * jac * std::exp(-log_p);
            } else {
                val = pb.mu(v, w2) * std::exp(-log_p) * pb.F(q);
            }
            mom.sum += val;
            mom.sumsq += val * val;
        }
        return mom;
    };

    std::vector<Moments> shards;
    auto extend = [&](std::size_t target_shards) {
        const std::size_t first = shards.size();
        if (target_shards <= first) return;
        shards.resize(target_shards);
        parallel_for(target_shards - first, [&](std::size_t i) { shards[first + i] = run_shard(first + i); });
    };
    auto summarize = [&](MVResult& res) {
        long double s = 0, ss = 0;
        for (const auto& m : shards) {
            s += m.sum;
            ss += m.sumsq;
        }
        const long double N = static_cast<long double>(shards.size() * kShard);
        const long double mean = s / N;
        const long double var = std::max(0.0L, ss / N - mean * mean);
        res.value = static_cast<double>(mean);
        res.error_estimate = static_cast<double>(std::sqrt(var / N));
        res.nodes_or_samples = shards.size() * kShard;
    };

    const std::size_t min_shards = std::max<std::size_t>(1, (cfg.mc_min_samples + kShard - 1) / kShard);
    const std::size_t max_shards = std::max(min_shards, (cfg.mc_max_samples + kShard - 1) / kShard);
    MVResult res;
    res.method = QuadMethod::montecarlo;
    extend(min_shards);
    summarize(res);
    while (res.error_estimate > cfg.mc_target_se && shards.size() < max_shards) {
        const double grow = std::pow(res.error_estimate / cfg.mc_target_se, 2.0) * 1.1;
        const auto want = static_cast<std::size_t>(std::ceil(static_cast<double>(shards.size()) * grow));
        extend(std::min(max_shards, std::max(want, shards.size() + 1)));
        summarize(res);
    }
    return res;
}

bool same_ball(const HeatBall& a, const HeatBall& b) {
    return a.family == b.family && a.m == b.m && a.radius == b.radius && a.center == b.center;
}

}  // namespace

MVResult mv_integral(const ScalarField& f, const HeatBall& ball, const KernelSpec& kernel, const MVConfig& cfg) {
    kernel.validate();
    if (f.dim() != ball.dim()) throw PreconditionError("mv_integral: field and ball dimensions differ");
    if (!same_ball(matching_ball(kernel), ball))
        throw PreconditionError("mv_integral: kernel " + to_string(kernel.family) + " does not belong to a " +
                                to_string(ball.family) + " ball with these parameters");
    if (!f.domain().contains(bounds(ball)))
        throw DomainError("mv_integral: closed ball is not inside the field's domain");
    const Problem pb(f, kernel);
    QuadMethod method = cfg.method;
    if (method == QuadMethod::automatic) method = ball.dim() <= 2 ? QuadMethod::tensor : QuadMethod::montecarlo;
    return method == QuadMethod::tensor ? integrate_tensor(pb, cfg) : integrate_montecarlo(pb, cfg);
}

HeatBall mv_ball(const SpaceTimePoint& center, double r, Equation eq) {
    switch (eq) {
        case Equation::heat: return HeatBall::omega(center, r);
        case Equation::ou:
        case Equation::hermite: return HeatBall::xi(center, r);
        case Equation::none: break;
    }
    throw PreconditionError("mv_ball: equation must be heat, ou or hermite");
}

KernelSpec mv_kernel(const SpaceTimePoint& center, double r, Equation eq) {
    return kernel_for_ball(mv_ball(center, r, eq), eq == Equation::hermite);
}

ResidualResult mv_residual(const ScalarField& f, const SpaceTimePoint& center, double r, Equation eq,
                           const MVConfig& cfg) {
    ResidualResult out;
    out.integral = mv_integral(f, mv_ball(center, r, eq), mv_kernel(center, r, eq), cfg);
    out.residual = f(center) - out.integral.value;
    return out;
}

PointClass classify_residuals(const std::vector<double>& residuals, double tol) {
    bool all_small = true, all_le = true, all_ge = true, any_below = false, any_above = false;
    for (double r : residuals) {
        all_small = all_small && std::fabs(r) <= tol;
        all_le = all_le && r <= tol;
        all_ge = all_ge && r >= -tol;
        any_below = any_below || r < -tol;
        any_above = any_above || r > tol;
    }
    if (all_small) return PointClass::temperature;
    if (all_le && any_below) return PointClass::sub;
    if (all_ge && any_above) return PointClass::super;
    return PointClass::neither;
}

Classification classify_point(const ScalarField& f, const SpaceTimePoint& center, const std::vector<double>& radii,
                              Equation eq, double tol, const MVConfig& cfg) {
    if (radii.empty()) throw PreconditionError("classify_point: need at least one radius");
    if (!(tol > 0)) throw PreconditionError("classify_point: tolerance must be positive");
    Classification c;
    c.tol = tol;
    c.radii = radii;
    for (double r : radii) {
        const auto res = mv_residual(f, center, r, eq, cfg);
        c.residuals.push_back(res.residual);
        c.errors.push_back(res.integral.error_estimate);
    }
    c.label = classify_residuals(c.residuals, tol);
    return c;
}

}  // namespace heatmv
