#include "heatmv/growth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "heatmv/types.hpp"

namespace heatmv {

std::string to_string(GrowthVerdict v) {
    switch (v) {
        case GrowthVerdict::diverging: return "diverging-trend";
        case GrowthVerdict::converging: return "converging-trend";
        case GrowthVerdict::inconclusive: return "inconclusive";
    }
    return "?";
}

std::vector<double> dyadic_grid(double r_max, std::size_t per_octave) {
    if (!(r_max >= 1)) throw PreconditionError("dyadic_grid: r_max must be >= 1");
    if (per_octave == 0) throw PreconditionError("dyadic_grid: per_octave must be positive");
    const auto last = static_cast<std::size_t>(std::floor(std::log2(r_max) * static_cast<double>(per_octave) + 1e-9));
    std::vector<double> grid(last + 1);
    std::vector<double> mantissa(per_octave);
    for (std::size_t i = 0; i < per_octave; ++i)
        mantissa[i] = std::exp2(static_cast<double>(i) / static_cast<double>(per_octave));
    for (std::size_t i = 0; i <= last; ++i)
        grid[i] = std::ldexp(mantissa[i % per_octave], static_cast<int>(i / per_octave));
    return grid;
}

GrowthFunction::GrowthFunction(std::string id, Evaluator p, double gamma, double r_max)
    : id_(std::move(id)), p_(std::move(p)), gamma_(gamma), r_max_(r_max) {
    if (!p_) throw PreconditionError("GrowthFunction: missing evaluator");
    if (!(gamma_ >= 0)) throw PreconditionError("GrowthFunction: gamma must be >= 0");
    if (!(r_max_ >= 2)) throw PreconditionError("GrowthFunction: r_max must be >= 2");
    const auto grid = dyadic_grid(r_max_);
    double prev = -std::numeric_limits<double>::infinity();
    for (double r : grid) {
        const double v = p_(r);
        if (!(v > 0) || !std::isfinite(v))
            throw PreconditionError("GrowthFunction '" + id_ + "': p must be positive and finite");
        const double lg = gamma_ * std::log(r) + std::log(v);
        if (lg < prev - 1e-12 * (1 + std::fabs(prev)))
            throw PreconditionError("GrowthFunction '" + id_ + "': r^gamma p(r) decreases near r = " +
                                    std::to_string(r));
        prev = std::max(prev, lg);
    }
}

std::vector<double> suffix_minimum(const std::vector<double>& values) {
    if (values.empty()) throw PreconditionError("minorant: empty grid");
    std::vector<double> out(values.size());
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = values.size(); i-- > 0;) {
        m = std::min(m, values[i]);
        out[i] = m;
    }
    return out;
}

std::vector<double> minorant(const GrowthFunction& p, const std::vector<double>& grid) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = p(grid[i]);
    return suffix_minimum(v);
}

namespace {

struct Sampled {
    std::vector<double> grid, p, pbar;
};

Sampled sample_growth(const GrowthFunction& p, double r_max, std::size_t per_octave) {
    Sampled s;
    s.grid = dyadic_grid(r_max, per_octave);
    s.p.resize(s.grid.size());
    for (std::size_t i = 0; i < s.grid.size(); ++i) s.p[i] = p(s.grid[i]);
    s.pbar = suffix_minimum(s.p);
    return s;
}

/// Indices of ell_0.. on the sampled grid.
std::vector<std::size_t> ell_indices(const Sampled& s, std::size_t count, std::size_t per_octave, bool& truncated) {
    std::vector<std::size_t> idx{0};
    truncated = false;
    while (idx.size() < count + 1) {
        std::size_t i = idx.back() + per_octave;  // 2 ell_{j-1} is a grid point
        while (i < s.grid.size() && std::fabs(s.pbar[i] - s.p[i]) > kMinorantEqualityTol * s.p[i]) ++i;
        if (i >= s.grid.size()) {
            truncated = true;
            break;
        }
        idx.push_back(i);
    }
    return idx;
}

/// Cumulative trapezoid of int dr / q = int r / q d(ln r) on the grid.
std::vector<double> cumulative(const Sampled& s, const std::vector<double>& q, std::size_t per_octave) {
    const double h = std::numbers::ln2 / static_cast<double>(per_octave);
    std::vector<double> c(q.size(), 0.0);
    for (std::size_t i = 1; i < q.size(); ++i)
        c[i] = c[i - 1] + 0.5 * h * (s.grid[i - 1] / q[i - 1] + s.grid[i] / q[i]);
    return c;
}

}  // namespace

TacklindSequence tacklind_sequence(const GrowthFunction& p, std::size_t count, std::size_t per_octave) {
    const Sampled s = sample_growth(p, p.r_max(), per_octave);
    TacklindSequence out;
    for (std::size_t i : ell_indices(s, count, per_octave, out.truncated)) out.ell.push_back(s.grid[i]);
    return out;
}

GrowthVerdict verdict_from_increments(const std::vector<double>& inc, double* slope) {
    const std::size_t K = inc.size();
    if (slope) *slope = std::numeric_limits<double>::quiet_NaN();
    if (K < 4) return GrowthVerdict::inconclusive;
    const std::size_t half = K / 2;
    double lower_max = 0, upper_max = 0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t cnt = 0;
    for (std::size_t i = 0; i < K; ++i) {
        const double k = static_cast<double>(i + 1);
        const double kd = k * inc[i];
        if (i < half) {
            lower_max = std::max(lower_max, kd);
            continue;
        }
        upper_max = std::max(upper_max, kd);
        const double x = std::log(k), y = std::log(kd);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++cnt;
    }
    const double nn = static_cast<double>(cnt);
    const double sigma = (sxy - sx * sy / nn) / (sxx - sx * sx / nn);
    if (slope) *slope = sigma;
    if (sigma >= -0.6 || upper_max >= lower_max) return GrowthVerdict::diverging;
    if (sigma <= -0.8) return GrowthVerdict::converging;
    return GrowthVerdict::inconclusive;
}

DivergenceReport divergence_diagnostic(const GrowthFunction& p, std::optional<double> r_max, std::size_t per_octave) {
    DivergenceReport rep;
    const double R = r_max.value_or(p.r_max());
    if (!(R >= 2) || R > p.r_max() * (1 + 1e-12))
        throw PreconditionError("divergence_diagnostic: horizon outside [2, p.r_max]");
    const Sampled s = sample_growth(p, R, per_octave);
    rep.r_max = s.grid.back();
    const auto cp = cumulative(s, s.p, per_octave);
    const auto cb = cumulative(s, s.pbar, per_octave);
    rep.integral_p = cp.back();
    rep.integral_pbar = cb.back();

    bool truncated = false;
    const auto idx = ell_indices(s, s.grid.size(), per_octave, truncated);
    for (std::size_t j = 0; j < idx.size(); ++j) {
        rep.ell.push_back(s.grid[idx[j]]);
        if (j == 0) continue;
        rep.ell_sum += s.grid[idx[j]] / s.p[idx[j]];
        const double lp = s.grid[idx[j - 1]], l = s.grid[idx[j]];
        const double pp = s.p[idx[j - 1]], pl = s.p[idx[j]];
        rep.sandwich.push_back({lp, l, l / (2 * pl), cb[idx[j]] - cb[idx[j - 1]], lp / pp + l / pl});
    }

    const std::size_t octaves = (s.grid.size() - 1) / per_octave;
    for (std::size_t k = 1; k <= octaves; ++k)
        rep.octave_increments.push_back(cb[k * per_octave] - cb[(k - 1) * per_octave]);
    rep.verdict = verdict_from_increments(rep.octave_increments, &rep.tail_slope);
    return rep;
}

ShiftReport shift_compare(const GrowthFunction& p, double lambda, std::optional<double> r_max) {
    if (!(lambda > 0)) throw PreconditionError("shift_compare: lambda must be positive");
    const GrowthFunction shifted(
        p.id() + "+" + std::to_string(lambda) + "r",
        [f = p.evaluator(), lambda](double r) { return f(r) + lambda * r; }, p.gamma(), p.r_max());
    ShiftReport rep;
    rep.lambda = lambda;
    rep.base = divergence_diagnostic(p, r_max);
    rep.shifted = divergence_diagnostic(shifted, r_max);
    for (std::size_t k = 0; k < rep.base.octave_increments.size(); ++k)
        rep.increment_ratio.push_back(rep.shifted.octave_increments[k] / rep.base.octave_increments[k]);
    return rep;
}

namespace {

/// Smallest gamma making r^gamma p non-decreasing, from sup(-r p'/p) on a fine grid, padded.
double gamma_for(const std::function<double(double)>& p, const std::function<double(double)>& dp, double r_max) {
    double worst = 0;
    for (double r : dyadic_grid(r_max, 1024)) worst = std::max(worst, -r * dp(r) / p(r));
    return worst > 0 ? 1.1 * worst + 0.1 : 0.0;
}

double arg_value(const std::string& spec, std::size_t colon) {
    try {
        return std::stod(spec.substr(colon + 1));
    } catch (...) {
        throw PreconditionError("growth spec '" + spec + "': bad numeric argument");
    }
}

}  // namespace

GrowthFunction growth_from_spec(const std::string& spec, double r_max) {
    const auto colon = spec.find(':');
    const std::string head = spec.substr(0, colon);
    const bool has_arg = colon != std::string::npos;
    using F = std::function<double(double)>;
    if (head == "pow" && has_arg) {
        const double a = arg_value(spec, colon);
        const double g = a < 0 ? -a : 0.0;
        return {spec, [a](double r) { return std::pow(r, a); }, g, r_max};
    }
    if (head == "rlog" && has_arg) {
        const double k = arg_value(spec, colon);
        return {spec, [k](double r) { return r * std::pow(std::log(std::numbers::e + r), k); }, k < 0 ? -k : 0.0,
                r_max};
    }
    if (head == "iterlog" && !has_arg) {
        return {spec,
                [](double r) {
                    const double l1 = std::log(std::numbers::e + r);
                    return r * l1 * std::log(std::numbers::e + l1);
                },
                0.0, r_max};
    }
    if (head == "const" && has_arg) {
        const double c = arg_value(spec, colon);
        return {spec, [c](double) { return c; }, 0.0, r_max};
    }
    if (head == "osc" && has_arg) {
        const double k = arg_value(spec, colon);
        F p = [k](double r) { return r * (2 + std::sin(k * std::log(r))); };
        F dp = [k](double r) { return 2 + std::sin(k * std::log(r)) + k * std::cos(k * std::log(r)); };
        return {spec, p, gamma_for(p, dp, r_max), r_max};
    }
    if (head == "osc-bounded" && !has_arg) {
        F p = [](double r) { return 1 + r * (1 + std::sin(std::log(r))); };
        F dp = [](double r) { return 1 + std::sin(std::log(r)) + std::cos(std::log(r)); };
        return {spec, p, gamma_for(p, dp, r_max), r_max};
    }
    if (head == "rsin" && !has_arg) {
        F p = [](double r) { return r * (2 + std::sin(r)); };
        F dp = [](double r) { return 2 + std::sin(r) + r * std::cos(r); };
        return {spec, p, gamma_for(p, dp, r_max), r_max};
    }
    throw PreconditionError("unknown growth spec '" + spec + "'");
}

const std::vector<GrowthCatalogEntry>& growth_catalog() {
    using V = GrowthVerdict;
    static const std::vector<GrowthCatalogEntry> cat = {
        {"const:1", 1 << 20, V::diverging, "bounded p"},
        {"pow:0.5", 1 << 20, V::diverging, "int r^{-1/2} dr"},
        {"pow:1", 1 << 20, V::diverging, "int dr / r = ln R"},
        {"pow:1.2", 1 << 20, V::converging, "int r^{-1.2} dr"},
        {"pow:1.5", 1 << 20, V::converging, "int r^{-1.5} dr"},
        {"pow:2", 1 << 20, V::converging, "int r^{-2} dr"},
        {"rlog:1", 1 << 20, V::diverging, "ln ln growth"},
        {"rlog:2", 1 << 20, V::converging, "int dr / (r ln^2 r)"},
        {"iterlog", 1 << 20, V::diverging, "ln ln ln growth"},
        {"osc:1", 1 << 20, V::diverging, "int du / (2 + sin u) with u = ln r"},
        {"osc-bounded", 1 << 20, V::diverging, "bounded lim inf: p-bar stays <= 1 up to each minimum"},
        {"rsin", 256, V::diverging, "r(2 + sin r) >= r; short horizon keeps the oscillation resolved"},
    };
    return cat;
}

}  // namespace heatmv
