#include "heatmv/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "heatmv/parallel.hpp"
#include "heatmv/transference.hpp"

namespace heatmv {

namespace {

constexpr long double kAnchorGap = 1e-14L;
constexpr long double kLogSpaceThreshold = 20.0L;

void require(bool ok, const char* what) {
    if (!ok) throw PreconditionError(what);
}

void require_same_dim(const SpaceTimePoint& a, const SpaceTimePoint& p) {
    require(a.dim() == p.dim() && a.dim() > 0, "kernel: anchor/point dimension mismatch");
}

/// |x e^{-2d} - y|^2 for d = t - s.
long double drift_gap_sq(const SpaceTimePoint& a, const SpaceTimePoint& p, Time d) {
    const long double decay = std::exp(-2 * d);
    long double s = 0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        const long double v = a.x[i] * decay - p.x[i];
        s += v * v;
    }
    return s;
}

/// ln K^OU(anchor, p) with K^OU = 4 e^{-2ns} |x e^{-2d} - y|^2 / expm1(-4d)^2; -inf on the axis.
long double log_k_ou(const SpaceTimePoint& a, const SpaceTimePoint& p) {
    const Time d = a.t - p.t;
    if (std::fabs(d) < kAnchorGap) throw DomainError("k_ou: point too close to the anchor time");
    const long double num = drift_gap_sq(a, p, d);
    if (num == 0) return -std::numeric_limits<long double>::infinity();
    const long double den = std::expm1(-4 * d);
    const auto n = static_cast<long double>(a.dim());
    return std::log(4.0L) - 2 * n * p.t + std::log(num) - 2 * std::log(std::fabs(den));
}

/// ln of the Hermite/OU ratio e^{(s-t)n + (|y|^2 - |x|^2)/2}.
long double log_hermite_ratio(const SpaceTimePoint& a, const SpaceTimePoint& p) {
    const auto n = static_cast<long double>(a.dim());
    return (p.t - a.t) * n + 0.5L * (static_cast<long double>(p.x.squared_norm()) - a.x.squared_norm());
}

long double descent_classical_ld(std::size_t m, double r, const SpaceTimePoint& a, const SpaceTimePoint& p) {
    require_same_dim(a, p);
    require(m >= 1, "descent kernel: m must be >= 1");
    require(r > 0, "descent kernel: r must be positive");
    const Time tau = a.t - p.t;
    if (!(tau > 0) || !(tau < r)) throw DomainError("descent kernel: point outside the ball's time extent");
    const std::size_t n = a.dim();
    const long double d2 = squared_distance(a.x, p.x);
    const long double lg = std::log(static_cast<long double>(r) / tau);
    const long double R2 = (2.0L * static_cast<long double>(n + m) * tau * lg - d2) / r;
    if (R2 < 0) throw DomainError("descent kernel: point outside Omega_m");
    const auto c = descent_constants(n, m);
    const long double bracket = d2 / (tau * tau) + c.a_nm * lg / tau;
    return c.c_m * bracket * std::pow(R2, 0.5L * static_cast<long double>(m));
}

}  // namespace

std::string to_string(KernelFamily f) {
    switch (f) {
        case KernelFamily::classical: return "classical";
        case KernelFamily::ou: return "ou";
        case KernelFamily::hermite: return "hermite";
        case KernelFamily::descent_classical: return "descent_classical";
        case KernelFamily::descent_ou: return "descent_ou";
        case KernelFamily::descent_hermite: return "descent_hermite";
    }
    return "?";
}

KernelFamily kernel_family_from_string(const std::string& name) {
    std::string s = name;
    std::replace(s.begin(), s.end(), '-', '_');
    for (auto f : {KernelFamily::classical, KernelFamily::ou, KernelFamily::hermite, KernelFamily::descent_classical,
                   KernelFamily::descent_ou, KernelFamily::descent_hermite})
        if (to_string(f) == s) return f;
    throw PreconditionError("unknown kernel family '" + name + "'");
}

bool is_descent(KernelFamily f) noexcept {
    return f == KernelFamily::descent_classical || f == KernelFamily::descent_ou ||
           f == KernelFamily::descent_hermite;
}

void KernelSpec::validate() const {
    require(n >= 1 && n <= kMaxDim, "KernelSpec: invalid n");
    require(anchor.dim() == n, "KernelSpec: anchor dimension differs from n");
    require(r > 0 && std::isfinite(r), "KernelSpec: r must be positive");
    if (is_descent(family))
        require(m >= 1, "KernelSpec: descent families need m >= 1");
    else
        require(m == 0, "KernelSpec: m must be 0 for plain families");
}

KernelSpec kernel_for_ball(const HeatBall& ball, bool hermite) {
    KernelSpec s;
    s.n = ball.dim();
    s.m = ball.m;
    s.r = ball.radius;
    s.anchor = ball.center;
    switch (ball.family) {
        case BallFamily::omega: s.family = KernelFamily::classical; break;
        case BallFamily::omega_m: s.family = KernelFamily::descent_classical; break;
        case BallFamily::xi:
            if (ball.m == 0)
                s.family = hermite ? KernelFamily::hermite : KernelFamily::ou;
            else
                s.family = hermite ? KernelFamily::descent_hermite : KernelFamily::descent_ou;
            break;
        case BallFamily::gamma_cyl: throw PreconditionError("kernel_for_ball: cylinders carry no mean-value kernel");
    }
    return s;
}

HeatBall matching_ball(const KernelSpec& spec) {
    spec.validate();
    switch (spec.family) {
        case KernelFamily::classical: return HeatBall::omega(spec.anchor, spec.r);
        case KernelFamily::descent_classical: return HeatBall::omega_m(spec.anchor, spec.r, spec.m);
        case KernelFamily::ou:
        case KernelFamily::hermite: return HeatBall::xi(spec.anchor, spec.r);
        case KernelFamily::descent_ou:
        case KernelFamily::descent_hermite: return HeatBall::xi(spec.anchor, spec.r, spec.m);
    }
    throw PreconditionError("matching_ball: unknown family");
}

double fundamental_solution(const SpatialVector& x, Time t) {
    if (!(t > 0)) return 0.0;
    const auto n = static_cast<long double>(x.size());
    return static_cast<double>(std::exp(-static_cast<long double>(x.squared_norm()) / (4 * t)) /
                               std::pow(4 * std::numbers::pi_v<long double> * t, n / 2));
}

double k_classical(const SpaceTimePoint& a, const SpaceTimePoint& p) {
    require_same_dim(a, p);
    const Time tau = a.t - p.t;
    if (!(tau > 0)) throw DomainError("k_classical: requires s < t");
    if (tau < kAnchorGap) throw DomainError("k_classical: point too close to the anchor time");
    return static_cast<double>(squared_distance(a.x, p.x) / (4 * tau * tau));
}

double k_ou(const SpaceTimePoint& a, const SpaceTimePoint& p) {
    require_same_dim(a, p);
    const Time d = a.t - p.t;
    if (d == 0) throw DomainError("k_ou: requires s != t");
    if (std::fabs(p.t) > kLogSpaceThreshold || std::fabs(a.t) > kLogSpaceThreshold)
        return static_cast<double>(std::exp(log_k_ou(a, p)));
    if (std::fabs(d) < kAnchorGap) throw DomainError("k_ou: point too close to the anchor time");
    const auto n = static_cast<long double>(a.dim());
    const long double den = std::expm1(-4 * d);
    return static_cast<double>(4 * std::exp(-2 * n * p.t) * drift_gap_sq(a, p, d) / (den * den));
}

double k_hermite(const SpaceTimePoint& a, const SpaceTimePoint& p) {
    require_same_dim(a, p);
    if (a.t == p.t) throw DomainError("k_hermite: requires s != t");
    return static_cast<double>(std::exp(log_k_ou(a, p) + log_hermite_ratio(a, p)));
}

DescentConstants descent_constants(std::size_t n, std::size_t m) {
    require(m >= 1, "descent_constants: m must be >= 1");
    const double mm = static_cast<double>(m);
    const double ball_volume = std::pow(std::numbers::pi, mm / 2) / std::tgamma(mm / 2 + 1);
    return {ball_volume / (2 * (mm + 2) * std::pow(4 * std::numbers::pi, mm / 2)),
            mm * static_cast<double>(n + m)};
}

double k_descent_classical(std::size_t m, double r, const SpaceTimePoint& a, const SpaceTimePoint& p) {
    return static_cast<double>(descent_classical_ld(m, r, a, p));
}

double k_descent_ou(std::size_t m, double r, const SpaceTimePoint& a, const SpaceTimePoint& p) {
    const long double kc = descent_classical_ld(m, r, phi(a), phi(p));
    const auto n = static_cast<long double>(a.dim());
    return static_cast<double>(std::exp(-2 * (n + 2) * p.t) * kc);
}

double k_descent_hermite(std::size_t m, double r, const SpaceTimePoint& a, const SpaceTimePoint& p) {
    const long double kc = descent_classical_ld(m, r, phi(a), phi(p));
    if (kc == 0) return 0.0;
    const auto n = static_cast<long double>(a.dim());
    return static_cast<double>(std::exp(-2 * (n + 2) * p.t + log_hermite_ratio(a, p) + std::log(kc)));
}

double evaluate_kernel(const KernelSpec& spec, const SpaceTimePoint& p) {
    switch (spec.family) {
        case KernelFamily::classical: return k_classical(spec.anchor, p);
        case KernelFamily::ou: return k_ou(spec.anchor, p);
        case KernelFamily::hermite: return k_hermite(spec.anchor, p);
        case KernelFamily::descent_classical: return k_descent_classical(spec.m, spec.r, spec.anchor, p);
        case KernelFamily::descent_ou: return k_descent_ou(spec.m, spec.r, spec.anchor, p);
        case KernelFamily::descent_hermite: return k_descent_hermite(spec.m, spec.r, spec.anchor, p);
    }
    throw PreconditionError("evaluate_kernel: unknown family");
}

KernelBoundReport kernel_bound_estimate(const KernelSpec& spec, std::size_t sample_count, std::uint64_t seed) {
    spec.validate();
    if (!is_descent(spec.family))
        throw PreconditionError("kernel_bound_estimate: plain kernels are unbounded near the anchor");
    require(spec.m >= 3, "kernel_bound_estimate: boundedness needs m >= 3");
    require(sample_count > 0, "kernel_bound_estimate: need samples");

    const HeatBall ball = matching_ball(spec);
    const DomainBox box = bounds(ball);
    const bool pulled_back = spec.family != KernelFamily::descent_classical;
    const SpaceTimePoint anchor_img = pulled_back ? phi(spec.anchor) : spec.anchor;

    constexpr std::size_t kShard = 1 << 13;
    const std::size_t shards = (sample_count + kShard - 1) / kShard;
    std::vector<double> shard_max(shards, 0.0);
    std::vector<std::size_t> shard_hits(shards, 0);
    parallel_for(shards, [&](std::size_t k) {
        std::mt19937_64 rng(shard_seed(seed, k));
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const std::size_t count = std::min(kShard, sample_count - k * kShard);
        double best = 0.0;
        std::size_t hits = 0;
        SpaceTimePoint p;
        p.x = SpatialVector(spec.n);
        for (std::size_t i = 0; i < count; ++i) {
            for (std::size_t d = 0; d < spec.n; ++d) p.x[d] = box.lo[d] + (box.hi[d] - box.lo[d]) * u(rng);
            p.t = box.t_lo + (box.t_hi - box.t_lo) * static_cast<Time>(u(rng));
            if (!contains(ball, p)) continue;
            ++hits;
            // Scale-free value: r K^m on the classical side; the OU weight e^{-2(n+2)s} cancels.
            const double v = spec.r * (pulled_back ? k_descent_classical(spec.m, spec.r, anchor_img, phi(p))
                                                   : k_descent_classical(spec.m, spec.r, spec.anchor, p));
            best = std::max(best, v);
        }
        shard_max[k] = best;
        shard_hits[k] = hits;
    });

    KernelBoundReport rep;
    rep.samples = sample_count;
    double running = 0.0;
    std::size_t next_checkpoint = kShard;
    for (std::size_t k = 0; k < shards; ++k) {
        running = std::max(running, shard_max[k]);
        rep.accepted += shard_hits[k];
        const std::size_t seen = std::min(sample_count, (k + 1) * kShard);
        if (seen >= next_checkpoint || k + 1 == shards) {
            rep.history.emplace_back(seen, running);
            while (next_checkpoint <= seen) next_checkpoint *= 2;
        }
    }
    rep.estimate = running;
    if (rep.history.size() >= 2) {
        const double prev = rep.history[rep.history.size() - 2].second;
        rep.last_relative_change = running > 0 ? std::fabs(running - prev) / running : 0.0;
    }
    return rep;
}

DivergenceFit plain_kernel_divergence(const KernelSpec& spec, double alpha, double tau_min, double tau_max,
                                      std::size_t points) {
    spec.validate();
    if (is_descent(spec.family)) throw PreconditionError("plain_kernel_divergence: descent kernels are bounded");
    require(alpha > 0 && tau_min > 0 && tau_max > tau_min && points >= 2, "plain_kernel_divergence: bad range");
    const bool pulled_back = spec.family != KernelFamily::classical;
    const SpaceTimePoint top = pulled_back ? phi(spec.anchor) : spec.anchor;
    DivergenceFit fit;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < points; ++i) {
        const double tau =
            tau_min * std::pow(tau_max / tau_min, static_cast<double>(i) / static_cast<double>(points - 1));
        SpaceTimePoint q = top;
        q.x[0] += std::sqrt(alpha * tau);
        q.t -= tau;
        const SpaceTimePoint p = pulled_back ? phi_inverse(q) : q;
        const double k = evaluate_kernel(spec, p);
        fit.samples.emplace_back(tau, k);
        const double lx = std::log(tau), ly = std::log(k);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        syy += ly * ly;
    }
    const double np = static_cast<double>(points);
    const double cov = sxy - sx * sy / np, vx = sxx - sx * sx / np, vy = syy - sy * sy / np;
    fit.exponent = -cov / vx;
    fit.r_squared = vy > 0 ? cov * cov / (vx * vy) : 1.0;
    return fit;
}

std::vector<KernelSample> kernel_profile(const KernelSpec& spec, std::size_t ny, std::size_t ns) {
    spec.validate();
    require(spec.n <= 2, "kernel_profile: n must be 1 or 2");
    require(ny >= 2 && ns >= 2, "kernel_profile: grid too small");
    const HeatBall ball = matching_ball(spec);
    const DomainBox box = bounds(ball);
    std::vector<KernelSample> out;
    for (std::size_t j = 0; j < ns; ++j) {
        const Time s = box.t_lo + (box.t_hi - box.t_lo) * static_cast<Time>(j) / static_cast<Time>(ns - 1);
        const auto sl = slice_at(ball, s);
        if (!sl) continue;
        for (std::size_t i = 0; i < ny; ++i) {
            SpaceTimePoint p{sl->center, s};
            p.x[0] = box.lo[0] + (box.hi[0] - box.lo[0]) * static_cast<double>(i) / static_cast<double>(ny - 1);
            if (!contains(ball, p) || spec.anchor.t - s < kAnchorGap) continue;
            out.push_back({p.x[0], s, evaluate_kernel(spec, p)});
        }
    }
    return out;
}

}  // namespace heatmv
