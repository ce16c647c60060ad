#pragma once
// Ultrametric hierarchy data: the radial skeleton (d_i, N_i) of a countable
// ultrametric space around a designated center, plus the transition kernel
// and the regularity certificates used by the spectral machinery.
//
// A hierarchy is the pair of sequences
//     d_1 < d_2 < ...        sphere radii around the center (d_0 = 0),
//     1 = N_0 < N_1 < ...    ball populations (integers, stored as doubles),
// with sphere populations M_i = N_i - N_{i-1} (M_0 = 1).
//
// The jump kernel between points at ultrametric distance d is
//     K(d) = exp(-alpha d) / N(d),
// where N(d) is the population of the smallest ball containing the pair;
// time is measured in units of the attempt period (set to 1).

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace ultradiff {

// ───────────────────────── asymptotic parameters ─────────────────────────
//
// Regular hierarchies have  d_i = xi*i + delta_i  and  N_i ~ C^{-1} e^{theta i},
// either with bounded perturbations (bounded scenario) or with
// delta_i -> D, eps_i -> 0 (limit scenario).  theta = ln p for p-adic trees.

struct AsymptoticParams {
    double theta = 0.0;   // exponential growth rate of N_i
    double xi    = 0.0;   // linear growth rate of d_i
    double C     = 1.0;   // lim N_i^{-1} e^{theta i}, when it exists
    double D     = 0.0;   // lim (d_i - xi i), when it exists
    bool   limit_known = false;  // constructor guarantees the limit scenario
    bool   present() const { return theta > 0.0 && xi > 0.0; }
};

// ───────────────────────────── hierarchy ─────────────────────────────────

class UltrametricHierarchy {
public:
    // Generator-backed (unbounded) hierarchy.
    UltrametricHierarchy(std::function<double(std::size_t)> d_fn,
                         std::function<double(std::size_t)> N_fn,
                         std::function<double(std::size_t)> pop_ratio_fn,
                         AsymptoticParams asym)
        : d_fn_(std::move(d_fn)), N_fn_(std::move(N_fn)),
          ratio_fn_(std::move(pop_ratio_fn)), asym_(asym),
          max_level_(unbounded()) {}

    // Tabulated hierarchy with max_level = d.size(); errors past the end.
    UltrametricHierarchy(std::vector<double> d, std::vector<double> N,
                         AsymptoticParams asym, bool finite_space = false)
        : d_tab_(std::move(d)), N_tab_(std::move(N)), asym_(asym),
          max_level_(d_tab_.size()), finite_space_(finite_space) {
        if (d_tab_.size() != N_tab_.size())
            throw std::invalid_argument("hierarchy: d and N tables differ in length");
        if (d_tab_.empty())
            throw std::invalid_argument("hierarchy: empty tables");
        double prev_d = 0.0, prev_N = 1.0;
        for (std::size_t i = 0; i < d_tab_.size(); ++i) {
            if (!(d_tab_[i] > prev_d))
                throw std::invalid_argument(
                    "hierarchy: d not strictly increasing at level " + std::to_string(i + 1));
            if (!(N_tab_[i] >= prev_N + 1.0))
                throw std::invalid_argument(
                    "hierarchy: N not strictly increasing at level " + std::to_string(i + 1));
            prev_d = d_tab_[i];
            prev_N = N_tab_[i];
        }
    }

    static constexpr std::size_t unbounded() {
        return std::numeric_limits<std::size_t>::max();
    }

    // d_i; d_0 = 0 by convention.
    double d(std::size_t i) const {
        if (i == 0) return 0.0;
        check_level(i);
        return d_fn_ ? d_fn_(i) : d_tab_[i - 1];
    }
    // N_i; N_0 = 1 (the center alone).
    double N(std::size_t i) const {
        if (i == 0) return 1.0;
        check_level(i);
        return N_fn_ ? N_fn_(i) : N_tab_[i - 1];
    }
    // Sphere population M_i = N_i - N_{i-1}; M_0 = 1.
    double M(std::size_t i) const {
        if (i == 0) return 1.0;
        return N(i) - N(i - 1);
    }
    // N_i / N_{i+1}, computed without forming huge N when generator-backed.
    double population_ratio(std::size_t i) const {
        if (ratio_fn_) return ratio_fn_(i);
        return N(i) / N(i + 1);
    }

    std::size_t max_level() const { return max_level_; }
    bool is_tabulated() const { return !d_fn_; }
    bool finite_space() const { return finite_space_; }
    const AsymptoticParams& asym() const { return asym_; }

private:
    void check_level(std::size_t i) const {
        if (i > max_level_)
            throw std::out_of_range("hierarchy: level " + std::to_string(i) +
                                    " beyond tabulated max_level " +
                                    std::to_string(max_level_));
    }

    std::function<double(std::size_t)> d_fn_, N_fn_, ratio_fn_;
    std::vector<double> d_tab_, N_tab_;
    AsymptoticParams asym_;
    std::size_t max_level_;
    bool finite_space_ = false;
};

// ─────────────────────────────── kernel ──────────────────────────────────

class Kernel {
public:
    explicit Kernel(double alpha) : alpha_(alpha) {
        if (!(alpha > 0.0))
            throw std::invalid_argument("kernel: alpha must be > 0");
    }
    double alpha() const { return alpha_; }
    // K(d) for a pair whose minimal enclosing ball holds pair_population points.
    double rate(double dist, double pair_population) const {
        return std::exp(-alpha_ * dist) / pair_population;
    }
private:
    double alpha_;
};

// ─────────────────────────── constructors ────────────────────────────────

// Self-similar (p-adic style) hierarchy: every ball splits into p subballs.
//     d_i = xi * i,   N_i = p^i.
inline UltrametricHierarchy make_self_similar(long p, double xi) {
    if (p < 2)
        throw std::invalid_argument("make_self_similar: p must be >= 2 "
                                    "(p = 1 degenerates the radial basis)");
    if (!(xi > 0.0))
        throw std::invalid_argument("make_self_similar: xi must be > 0");
    const double pd = static_cast<double>(p);
    AsymptoticParams asym;
    asym.theta = std::log(pd);
    asym.xi    = xi;
    asym.C     = 1.0;
    asym.D     = 0.0;
    asym.limit_known = true;
    return UltrametricHierarchy(
        [xi](std::size_t i) { return xi * static_cast<double>(i); },
        [pd](std::size_t i) { return std::pow(pd, static_cast<double>(i)); },
        [pd](std::size_t) { return 1.0 / pd; },
        asym);
}

// Perturbed regular hierarchy:
//     d_i = xi*i + delta_i,
//     N_i = round(p^i (1 + eps_i)) bumped to N_{i-1}+1 when needed.
// The d sequence must come out strictly increasing (rejected otherwise,
// naming the offending index); the N rounding repair is always applied.
// Tabulated: valid for levels 1..max(delta.size(), epsilon.size()), with the
// shorter perturbation list zero-padded.
inline UltrametricHierarchy make_perturbed(long p, double xi,
                                           const std::vector<double>& delta,
                                           const std::vector<double>& epsilon) {
    if (p < 2) throw std::invalid_argument("make_perturbed: p must be >= 2");
    if (!(xi > 0.0)) throw std::invalid_argument("make_perturbed: xi must be > 0");
    const std::size_t L = std::max(delta.size(), epsilon.size());
    if (L == 0)
        throw std::invalid_argument("make_perturbed: no perturbation levels given");
    const double pd = static_cast<double>(p);
    std::vector<double> d(L), N(L);
    double prev_d = 0.0, prev_N = 1.0;
    for (std::size_t i = 1; i <= L; ++i) {
        const double del = (i <= delta.size())   ? delta[i - 1]   : 0.0;
        const double eps = (i <= epsilon.size()) ? epsilon[i - 1] : 0.0;
        if (!(eps > -1.0))
            throw std::invalid_argument("make_perturbed: epsilon_" + std::to_string(i) +
                                        " must be > -1");
        const double di = xi * static_cast<double>(i) + del;
        if (!(di > prev_d))
            throw std::invalid_argument(
                "make_perturbed: d not strictly increasing at index " + std::to_string(i));
        double Ni = std::round(std::pow(pd, static_cast<double>(i)) * (1.0 + eps));
        if (!std::isfinite(Ni))
            throw std::invalid_argument("make_perturbed: N overflow at index " +
                                        std::to_string(i));
        if (Ni < prev_N + 1.0) Ni = prev_N + 1.0;  // strict-monotonicity repair
        d[i - 1] = di;
        N[i - 1] = Ni;
        prev_d = di;
        prev_N = Ni;
    }
    AsymptoticParams asym;
    asym.theta = std::log(pd);
    asym.xi    = xi;
    asym.C     = 1.0;
    asym.D     = 0.0;
    asym.limit_known = false;  // perturbations need not vanish
    return UltrametricHierarchy(std::move(d), std::move(N), asym);
}

// ─────────────────────── pairwise sphere distance ────────────────────────
//
// Distance between a point on sphere S_i and one on S_j (i != j) is
// max(d_i, d_j).  Within one sphere the pairwise distance is not determined
// by radial data alone.

inline double pair_sphere_distance(const UltrametricHierarchy& h,
                                   std::size_t i, std::size_t j,
                                   bool* degenerate = nullptr) {
    if (degenerate) *degenerate = false;
    if (i == 0 && j == 0) {
        if (degenerate) *degenerate = true;  // center to itself
        return 0.0;
    }
    if (i == j)
        throw std::invalid_argument("pair_sphere_distance: intra-sphere distance "
                                    "not sphere-determined (i = j = " +
                                    std::to_string(i) + ")");
    return h.d(std::max(i, j));
}

// ───────────────────────── condition report ──────────────────────────────
//
// Certificates for the three nested regularity classes:
//   summability      sum 1/N_i < inf   and   sum e^{-alpha d_j} < inf,
//   bounded scenario A < N_i^{-1} e^{theta i} < A'  and  |d_i - xi i| < B,
//   limit scenario   N_i^{-1} e^{theta i} -> C      and  d_i - xi i -> D.
// The limit scenario implies the bounded one; the report enforces that.

struct ConditionReport {
    bool restr_N_ok = false;       // sum 1/N_i certified finite
    bool restr_d_ok = false;       // sum e^{-alpha d_j} certified finite
    double sum_inv_N = 0.0;        // partial sum over i = 0..probe (+ tail est.)
    double sum_exp_ad = 0.0;       // partial sum over j = 1..probe (+ tail est.)

    bool bounded_N_ok = false;     // witnessed window on N_i^{-1} e^{theta i}
    bool bounded_d_ok = false;     // witnessed bound on |d_i - xi i|
    double A_lo = 0.0, A_hi = 0.0; // window on N_i^{-1} e^{theta i}
    double B = 0.0;                // max |d_i - xi i| over the probe

    bool limit_N_ok = false;       // tail of N_i^{-1} e^{theta i} settles
    bool limit_d_ok = false;       // tail of d_i - xi i settles
    double C_hat = 0.0, D_hat = 0.0;   // limit estimates (last-quarter means)

    double theta_hat = 0.0, xi_hat = 0.0;
    std::vector<double> delta_res;  // d_i - xi_hat * i over the probe window
    std::vector<double> eps_res;    // N_i * C_hat * e^{-theta_hat i} - 1

    bool finite_space = false;
    bool undetermined = false;      // no asym record and too little data
    std::size_t probe_depth = 0;
    std::string detail;

    bool restr_ok() const { return restr_N_ok && restr_d_ok; }
    bool bounded_ok() const { return bounded_N_ok && bounded_d_ok; }
    bool limit_ok() const { return limit_N_ok && limit_d_ok; }
};

namespace detail {
// Least-squares slope of y against x (used for theta/xi estimation).
inline double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) { mx += x[i]; my += y[i]; }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    return sxy / sxx;
}
inline double spread(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
    double mn = v[lo], mx = v[lo];
    for (std::size_t i = lo; i < hi; ++i) { mn = std::min(mn, v[i]); mx = std::max(mx, v[i]); }
    return mx - mn;
}
}  // namespace detail

// Probe the first `probe_depth` levels and certify what can be certified.
inline ConditionReport validate(const UltrametricHierarchy& h, const Kernel& kernel,
                                std::size_t probe_depth) {
    if (probe_depth < 8)
        throw std::invalid_argument("validate: probe_depth must be >= 8");
    ConditionReport r;
    std::size_t P = probe_depth;
    if (h.is_tabulated()) P = std::min(P, h.max_level());
    r.probe_depth = P;
    r.finite_space = h.finite_space();

    // --- collect the probe window -------------------------------------------
    std::vector<double> idx(P), logN(P), dvals(P);
    for (std::size_t i = 1; i <= P; ++i) {
        idx[i - 1]  = static_cast<double>(i);
        logN[i - 1] = std::log(h.N(i));
        dvals[i - 1] = h.d(i);
    }

    // growth-rate estimates; exact asym parameters take precedence when known
    const AsymptoticParams& a = h.asym();
    r.theta_hat = a.present() ? a.theta : detail::ols_slope(idx, logN);
    r.xi_hat    = a.present() ? a.xi    : detail::ols_slope(idx, dvals);

    // --- partial sums of the summability conditions -------------------------
    double sumN = 1.0;  // i = 0 term, N_0 = 1
    double sumd = 0.0;
    for (std::size_t i = 1; i <= P; ++i) {
        sumN += 1.0 / h.N(i);
        sumd += std::exp(-kernel.alpha() * h.d(i));
    }
    r.sum_inv_N = sumN;
    r.sum_exp_ad = sumd;

    // residual sequences around the fitted growth laws (log-space for N)
    std::vector<double> aN(P);   // log(e^{theta i} / N_i)  ->  log C
    std::vector<double> dd(P);   // d_i - xi i              ->  D
    for (std::size_t i = 0; i < P; ++i) {
        aN[i] = r.theta_hat * idx[i] - logN[i];
        dd[i] = dvals[i] - r.xi_hat * idx[i];
    }
    r.delta_res = dd;

    double aN_min = aN[0], aN_max = aN[0], B = 0.0;
    for (std::size_t i = 0; i < P; ++i) {
        aN_min = std::min(aN_min, aN[i]);
        aN_max = std::max(aN_max, aN[i]);
        B = std::max(B, std::abs(dd[i]));
    }
    r.A_lo = std::exp(aN_min);
    r.A_hi = std::exp(aN_max);
    r.B = B;

    // --- certification ------------------------------------------------------
    if (h.finite_space()) {
        // Finite point set: both sums are finite trivially; asymptotic
        // scenarios are not applicable and the limit flags stay false.
        r.restr_N_ok = r.restr_d_ok = true;
        r.bounded_N_ok = r.bounded_d_ok = true;
        r.detail = "finite space (depth " + std::to_string(h.max_level()) +
                   "): summability trivial, asymptotic scenario not applicable";
        r.C_hat = std::exp(aN[P - 1]);
        r.D_hat = dd[P - 1];
        return r;
    }

    const bool growth_ok = r.theta_hat > 1e-6 && r.xi_hat * kernel.alpha() > 1e-6;
    if (!a.present() && h.is_tabulated() && P < 8) {
        r.undetermined = true;
        r.detail = "probe window too small and no asymptotic record";
        return r;
    }

    // boundedness: the residuals must not grow between window halves
    const std::size_t half = P / 2;
    const double aN_h1 = detail::spread(aN, 0, half), aN_h2 = detail::spread(aN, half, P);
    const double dd_h1 = detail::spread(dd, 0, half), dd_h2 = detail::spread(dd, half, P);
    r.bounded_N_ok = growth_ok && (aN_h2 <= std::max(2.0 * aN_h1, 1e-9));
    r.bounded_d_ok = growth_ok && (dd_h2 <= std::max(2.0 * dd_h1, 1e-9));

    // summability follows from the witnessed geometric domination
    r.restr_N_ok = r.bounded_N_ok;
    r.restr_d_ok = r.bounded_d_ok;
    if (r.restr_N_ok) {
        // tail estimate: sum_{i>P} 1/N_i <= A_hi e^{-theta(P+1)} / (1 - e^{-theta})
        r.sum_inv_N += r.A_hi * std::exp(-r.theta_hat * static_cast<double>(P + 1)) /
                       (1.0 - std::exp(-r.theta_hat));
    }
    if (r.restr_d_ok) {
        const double axi = kernel.alpha() * r.xi_hat;
        r.sum_exp_ad += std::exp(kernel.alpha() * B) *
                        std::exp(-axi * static_cast<double>(P + 1)) / (1.0 - std::exp(-axi));
    }

    // limit scenario: quarter spreads of the residuals must shrink
    const std::size_t q = P / 4;
    const double aN_q2 = detail::spread(aN, q, 2 * q);
    const double aN_q4 = detail::spread(aN, 3 * q, P);
    const double dd_q2 = detail::spread(dd, q, 2 * q);
    const double dd_q4 = detail::spread(dd, 3 * q, P);
    r.limit_N_ok = r.bounded_N_ok && (aN_q4 <= std::max(0.5 * aN_q2, 1e-10));
    r.limit_d_ok = r.bounded_d_ok && (dd_q4 <= std::max(0.5 * dd_q2, 1e-10));

    // limit estimates: mean of the last quarter
    double Cm = 0.0, Dm = 0.0;
    for (std::size_t i = 3 * q; i < P; ++i) { Cm += std::exp(aN[i]); Dm += dd[i]; }
    const double cnt = static_cast<double>(P - 3 * q);
    r.C_hat = Cm / cnt;
    r.D_hat = Dm / cnt;

    r.eps_res.resize(P);
    for (std::size_t i = 0; i < P; ++i)
        r.eps_res[i] = std::exp(logN[i] - r.theta_hat * idx[i]) * r.C_hat - 1.0;

    if (a.limit_known) { r.limit_N_ok = r.limit_d_ok = true; }
    return r;
}

}  // namespace ultradiff
