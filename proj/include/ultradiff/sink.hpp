#pragma once
// Diffusion with a point reaction sink of rate k at the center.
//
// In the Laplace domain the survival probability and the sphere profiles are
// rational in the resolvent sum
//     J(s) = sum_j c_j^2 / (s + lambda_j)            (+ zero mode on finite spaces)
// via  S~(s) = (1/s) / (1 + k J(s))  and  f~(x0, s) = J(s) / (1 + k J(s)).
// The poles -nu_i of 1/(1 + k J) interlace the spectrum,
//     lambda_1 < nu_1,   lambda_j < nu_j < lambda_{j-1},
// and carry residues b_i = 1 / (k^2 |J'(-nu_i)|), giving the exact expansions
//     f(x0, t) = sum_i b_i e^{-nu_i t},   S(t) = k sum_i (b_i / nu_i) e^{-nu_i t},
// with the sum rule k sum_i b_i / nu_i = 1.

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "spectrum.hpp"

namespace ultradiff {

// A finite description of the spectral measure entering J: listed modes, an
// aggregate closure weight for the untracked tail (acting from lambda = 0,
// which is exact to first order in lambda_tail/|s|), and an optional exact
// zero mode for finite spaces.
struct ModeSet {
    std::vector<double> lambda;  // strictly decreasing
    std::vector<double> weight;  // same length; all positive
    double tail_coeff = 0.0;     // total weight beyond the listed modes
    bool has_zero_mode = false;
    double zero_weight = 0.0;    // 1/N_L on a depth-L space

    std::size_t size() const { return lambda.size(); }
};

// Spectral measure of the point source: weights c_j^2, closure 1/N_n.
inline ModeSet point_source_modes(const Spectrum& spec, std::size_t n = 0) {
    if (n == 0 || n > spec.size()) n = spec.size();
    ModeSet m;
    m.lambda.resize(n);
    m.weight.resize(n);
    for (std::size_t i = 1; i <= n; ++i) {
        m.lambda[i - 1] = spec.lambda(i);
        m.weight[i - 1] = spec.c2(i);
    }
    if (spec.finite_space() && n == spec.size()) {
        m.has_zero_mode = true;
        m.zero_weight = spec.uniform_weight();
    } else {
        m.tail_coeff = spec.coefficient_tail(n);
    }
    return m;
}

// J(s) for complex s off the negative real axis.  Throws on near-pole
// evaluation (relative window 1e-13) rather than returning garbage.
inline std::complex<double> j_function(const ModeSet& m, std::complex<double> s) {
    std::complex<double> sum = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const std::complex<double> den = s + m.lambda[i];
        if (std::abs(den) <= 1e-13 * m.lambda[i])
            throw std::domain_error("j_function: evaluation within 1e-13 of the "
                                    "spectral pole at -lambda_" + std::to_string(i + 1));
        sum += m.weight[i] / den;
    }
    const double closure = m.tail_coeff + m.zero_weight;
    if (closure > 0.0) {
        const double floor_scale = m.lambda.empty() ? 1e-300 : 1e-13 * m.lambda.back();
        if (std::abs(s) <= floor_scale)
            throw std::domain_error("j_function: evaluation at the origin where the "
                                    "closure/zero-mode term diverges");
        sum += closure / s;
    }
    return sum;
}

namespace detail {

// J(-nu) on the real axis in extended precision (the pole search lives here;
// long double keeps the heavy cancellation between neighbouring modes from
// contaminating the bracket logic).
inline long double j_real_neg(const ModeSet& m, long double nu) {
    long double sum = 0.0L;
    for (std::size_t i = 0; i < m.size(); ++i)
        sum += static_cast<long double>(m.weight[i]) /
               (static_cast<long double>(m.lambda[i]) - nu);
    const long double closure = static_cast<long double>(m.tail_coeff) +
                                static_cast<long double>(m.zero_weight);
    if (closure > 0.0L) sum -= closure / nu;
    return sum;
}

// |J'(-nu)| = sum_j w_j / (lambda_j - nu)^2  (all terms positive).
inline long double j_deriv_neg(const ModeSet& m, long double nu) {
    long double sum = 0.0L;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const long double d = static_cast<long double>(m.lambda[i]) - nu;
        sum += static_cast<long double>(m.weight[i]) / (d * d);
    }
    const long double closure = static_cast<long double>(m.tail_coeff) +
                                static_cast<long double>(m.zero_weight);
    if (closure > 0.0L) sum += closure / (nu * nu);
    return sum;
}

// Bisection for the root of g(nu) = 1 + k J(-nu) in (lo, hi); g is strictly
// increasing between consecutive spectral poles, -inf -> +inf.
inline long double bisect_pole(const ModeSet& m, long double k, long double lo,
                               long double hi) {
    long double glo = 1.0L + k * j_real_neg(m, lo);
    long double ghi = 1.0L + k * j_real_neg(m, hi);
    if (!(glo < 0.0L) || !(ghi > 0.0L))
        throw std::runtime_error("bisect_pole: bracket does not straddle the root");
    for (int it = 0; it < 300; ++it) {
        const long double mid = 0.5L * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // interval exhausted in precision
        const long double gm = 1.0L + k * j_real_neg(m, mid);
        if (gm < 0.0L) lo = mid; else hi = mid;
        if (hi - lo <= 1e-18L * lo) break;
    }
    return 0.5L * (lo + hi);
}

}  // namespace detail

// All decay poles -nu_i of 1/(1 + k J), one per spectral gap plus the one
// above lambda_1 (and, on finite spaces, the slow pole in (0, lambda_L)).
// Returned decreasing; at most max_count poles.
inline std::vector<double> find_poles(const ModeSet& m, double k_rate,
                                      std::size_t max_count) {
    if (!(k_rate > 0.0)) throw std::invalid_argument("find_poles: k must be > 0");
    if (m.size() == 0) throw std::invalid_argument("find_poles: empty mode set");
    const long double k = k_rate;
    std::vector<double> nu;
    const std::size_t gap_poles =
        std::min(max_count, m.size() + (m.has_zero_mode ? 1 : 0));

    for (std::size_t j = 1; j <= gap_poles; ++j) {
        long double lo, hi;
        if (j == 1) {
            lo = static_cast<long double>(m.lambda[0]) * (1.0L + 1e-15L);
            hi = 2.0L * static_cast<long double>(m.lambda[0]) + 2.0L * k;
            int doublings = 0;
            while (1.0L + k * detail::j_real_neg(m, hi) <= 0.0L) {
                hi *= 2.0L;
                if (++doublings > 60)
                    throw std::runtime_error("find_poles: no upper bracket for nu_1");
            }
        } else if (j <= m.size()) {
            lo = static_cast<long double>(m.lambda[j - 1]) * (1.0L + 1e-15L);
            hi = static_cast<long double>(m.lambda[j - 2]) * (1.0L - 1e-15L);
        } else {  // zero-mode gap (0, lambda_L)
            hi = static_cast<long double>(m.lambda.back()) * (1.0L - 1e-15L);
            lo = 0.5L * hi;
            int halvings = 0;
            while (1.0L + k * detail::j_real_neg(m, lo) >= 0.0L) {
                lo *= 0.5L;
                if (++halvings > 2000)
                    throw std::runtime_error("find_poles: no lower bracket for the "
                                             "zero-mode pole");
            }
        }
        nu.push_back(static_cast<double>(detail::bisect_pole(m, k, lo, hi)));
    }
    return nu;
}

// b_i = 1 / (k^2 |J'(-nu_i)|) for each supplied pole.
inline std::vector<double> residues(const ModeSet& m, double k_rate,
                                    const std::vector<double>& nu) {
    std::vector<double> b(nu.size());
    for (std::size_t i = 0; i < nu.size(); ++i)
        b[i] = static_cast<double>(
            1.0L / (static_cast<long double>(k_rate) * static_cast<long double>(k_rate) *
                    detail::j_deriv_neg(m, static_cast<long double>(nu[i]))));
    return b;
}

struct SinkSpectrum {
    double k_rate = 0.0;
    ModeSet modes;
    std::vector<double> nu;          // decreasing
    std::vector<double> b;           // residues, same length
    std::vector<double> g_residual;  // |1 + k J(-nu_i)| as recomputed a posteriori
    double pole_tail_mass = 0.0;     // survival mass carried by untracked poles
    std::size_t lambda_pole_count = 0;  // poles paired with an eigenvalue

    std::size_t size() const { return nu.size(); }
};

// Locate poles and residues.  Stops at n_poles, or earlier once a pole's
// survival-mass share b/nu drops below tol of the running sum.
inline SinkSpectrum make_sink_spectrum(const Spectrum& spec, double k_rate,
                                       std::size_t n_poles = 40, double tol = 1e-16) {
    if (!(k_rate > 0.0))
        throw std::invalid_argument("make_sink_spectrum: k must be > 0");
    if (n_poles < 1)
        throw std::invalid_argument("make_sink_spectrum: need at least one pole");
    // Margin modes beyond the last requested pole keep the closure term from
    // touching the active brackets.
    SinkSpectrum out;
    out.k_rate = k_rate;
    out.modes = point_source_modes(spec);
    if (!spec.finite_space() && spec.size() < n_poles + 8)
        throw std::invalid_argument("make_sink_spectrum: spectrum too short; need "
                                    "at least n_poles + 8 computed modes");

    const std::vector<double> all_nu = find_poles(out.modes, k_rate, n_poles);
    out.lambda_pole_count = std::min(all_nu.size(), out.modes.size());

    double mass = 0.0;
    for (std::size_t i = 0; i < all_nu.size(); ++i) {
        const double nu_i = all_nu[i];
        const double b_i = residues(out.modes, k_rate, {nu_i})[0];
        const double share = k_rate * b_i / nu_i;
        if (i >= 5 && share < tol * mass && i + 1 < all_nu.size() &&
            !out.modes.has_zero_mode) {
            out.lambda_pole_count = std::min(out.lambda_pole_count, i);
            break;
        }
        out.nu.push_back(nu_i);
        out.b.push_back(b_i);
        mass += share;
        double g;
        try {
            g = std::abs(1.0 + k_rate * static_cast<double>(detail::j_real_neg(
                                            out.modes, static_cast<long double>(nu_i))));
        } catch (...) {
            g = 0.0;
        }
        out.g_residual.push_back(g);
    }
    out.lambda_pole_count = std::min(out.lambda_pole_count, out.nu.size());
    out.pole_tail_mass = std::max(0.0, 1.0 - mass);
    return out;
}

struct ValueWithBound {
    double value;
    double bound;  // certified truncation bound (omitted-pole contribution)
};

// S(t) = k sum_i (b_i / nu_i) e^{-nu_i t}.  Omitted poles are slower than the
// listed ones, so their contribution is bounded by their total mass.
inline ValueWithBound survival(const SinkSpectrum& ss, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("survival: t must be >= 0");
    double sum = 0.0;
    for (std::size_t i = 0; i < ss.size(); ++i)
        sum += ss.b[i] / ss.nu[i] * std::exp(-ss.nu[i] * t);
    return {ss.k_rate * sum, ss.pole_tail_mass};
}

// f(x0, t) = sum_i b_i e^{-nu_i t}; omitted poles contribute at most
// nu_last * tail_mass / k.
inline ValueWithBound center_value(const SinkSpectrum& ss, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("center_value: t must be >= 0");
    double sum = 0.0;
    for (std::size_t i = 0; i < ss.size(); ++i)
        sum += ss.b[i] * std::exp(-ss.nu[i] * t);
    const double bound = ss.nu.empty()
                             ? 0.0
                             : ss.nu.back() * ss.pole_tail_mass / ss.k_rate;
    return {sum, bound};
}

// Laplace transform of the survival probability (for contour inversion).
inline std::complex<double> survival_transform(const ModeSet& m, double k_rate,
                                               std::complex<double> s) {
    return (1.0 / s) / (1.0 + k_rate * j_function(m, s));
}

// Laplace transform of the sphere-S_k value for initial data with basis
// coefficients a (a[j-1] multiplies phi_j):
//     f~_k(s) = sum_i phi_i(S_k) [ a_i - k C(s) c_i / (1 + k J(s)) ] / (s + lambda_i)
// with C(s) = sum_j a_j c_j / (s + lambda_j).  For the point source a_i = c_i
// and k = 0 (center sphere) this reduces to J/(1 + kJ).
inline std::complex<double> laplace_value(const Spectrum& spec, const ModeSet& m,
                                          double k_rate, const std::vector<double>& a,
                                          std::complex<double> s, std::size_t k_sphere) {
    if (a.empty() || a.size() > m.size())
        throw std::invalid_argument("laplace_value: coefficient count must be in "
                                    "[1, mode count]");
    std::complex<double> C = 0.0;
    for (std::size_t j = 1; j <= a.size(); ++j)
        C += a[j - 1] * spec.c(j) / (s + m.lambda[j - 1]);
    const std::complex<double> drain =
        k_rate * C / (1.0 + k_rate * j_function(m, s));
    std::complex<double> f = 0.0;
    for (std::size_t i = std::max<std::size_t>(1, k_sphere); i <= m.size(); ++i) {
        const double ai = i <= a.size() ? a[i - 1] : 0.0;
        const std::complex<double> coeff = ai - drain * spec.c(i);
        if (coeff == 0.0 && ai == 0.0 && spec.c(i) == 0.0) continue;
        f += spec.basis(i, k_sphere) * coeff / (s + m.lambda[i - 1]);
    }
    return f;
}

struct DeltaEntry {
    double delta;              // nu_j / lambda_j - 1
    double identity_residual;  // defect in the exact gap identity (see below)
};

// The pole equation rearranged per gap:
//     1/Delta_j = lambda_j/(k c_j^2)
//                 + sum_{i != j} (c_i^2/c_j^2) / (lambda_i/lambda_j - 1 - Delta_j),
// with the untracked far tail folded in at lambda = 0.  The reported residual
// is |1 - Delta_j * RHS_j|, dimensionless.
inline std::vector<DeltaEntry> delta_sequence(const Spectrum& spec,
                                              const SinkSpectrum& ss) {
    std::vector<DeltaEntry> out;
    const std::size_t n = std::min(ss.lambda_pole_count, spec.size());
    for (std::size_t j = 1; j <= n; ++j) {
        const long double lam_j = spec.lambda(j);
        const long double cj2 = spec.c2(j);
        const long double delta =
            static_cast<long double>(ss.nu[j - 1]) / lam_j - 1.0L;
        long double rhs = lam_j / (static_cast<long double>(ss.k_rate) * cj2);
        for (std::size_t i = 1; i <= spec.size(); ++i) {
            if (i == j) continue;
            rhs += (static_cast<long double>(spec.c2(i)) / cj2) /
                   (static_cast<long double>(spec.lambda(i)) / lam_j - 1.0L - delta);
        }
        // far tail (weight 1/N_n at lambda ~ 0)
        rhs += (static_cast<long double>(spec.coefficient_tail(spec.size())) / cj2) /
               (-1.0L - delta);
        out.push_back({static_cast<double>(delta),
                       static_cast<double>(std::fabs(1.0L - delta * rhs))});
    }
    return out;
}

}  // namespace ultradiff
