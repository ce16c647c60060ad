#pragma once
// Closed-form long-time asymptotics with log-periodic modulation.
//
// Every geometric eigen-series sum_i A e^{-theta i} exp(-L e^{-q i} t) behaves
// for large t as  t^{-beta} P(log t)  with beta = theta/q and P periodic with
// period q.  The Fourier coefficients of P are Gamma values on the line
// Re z = beta:
//     core(beta, q, x) = (1/q) [ Gamma(beta)
//         + 2 sum_{m>=1} Re( e^{2 pi i m x / q} Gamma(beta - 2 pi i m / q) ) ],
// so  sum ~ (L t)^{-beta} core(beta, q, log(L t)) * A.
//
// Three instances:
//  * plain two-parameter geometric series (exponent log a / log b),
//  * the point-source return probability (exponent theta/(alpha xi)),
//  * the survival probability under a point sink (exponent (alpha xi - theta)
//    /(alpha xi)), whose prefactor involves the limiting relative gap Delta of
//    the decay poles and the bilateral lattice sum
//        G(Delta) = sum_{m in Z} e^{-theta m} / (e^{-alpha xi m} - 1 - Delta)^2
//    entering through the residue derivative J'(-nu).

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "gamma.hpp"
#include "hierarchy.hpp"

namespace ultradiff {

// Periodic modulation kernel; x enters only through x mod log_b.
inline double modulation_core(double beta, double log_b, double x,
                              std::size_t modes = 12) {
    if (!(beta > 0.0)) throw std::domain_error("modulation_core: beta must be > 0");
    if (!(log_b > 0.0)) throw std::domain_error("modulation_core: log_b must be > 0");
    const double two_pi = 6.28318530717958647692;
    double acc = complex_gamma(std::complex<double>(beta, 0.0)).real();
    for (std::size_t m = 1; m <= modes; ++m) {
        const double w = two_pi * static_cast<double>(m) / log_b;
        const std::complex<double> gamma_m =
            complex_gamma(std::complex<double>(beta, -w));
        const std::complex<double> phase(std::cos(w * x), std::sin(w * x));
        acc += 2.0 * (phase * gamma_m).real();
    }
    return acc / log_b;
}

// A power-law envelope with log-periodic modulation:
//     value(t) = t^{-beta} * modulation(t),
//     modulation(t) = amplitude * rate_scale^{-beta}
//                     * core(beta, log_period, log(rate_scale * t)).
struct AsymptoticModel {
    double beta = 0.0;
    double log_period = 0.0;
    double amplitude = 1.0;
    double rate_scale = 1.0;
    std::size_t modes = 12;

    double modulation(double t) const {
        return amplitude * std::pow(rate_scale, -beta) *
               modulation_core(beta, log_period, std::log(rate_scale * t), modes);
    }
    double evaluate(double t) const { return std::pow(t, -beta) * modulation(t); }
};

// ── Plain geometric series: sum_{i>=1} a^{-i} e^{-b^{-i} t} ────────────────
inline AsymptoticModel theorem2_model(double a, double b) {
    if (!(a > 1.0) || !(b > 1.0))
        throw std::domain_error("theorem2_model: need a > 1 and b > 1");
    AsymptoticModel m;
    m.beta = std::log(a) / std::log(b);
    m.log_period = std::log(b);
    return m;
}

inline double theorem2_modulation(double a, double b, double t,
                                  std::size_t modes = 12) {
    AsymptoticModel m = theorem2_model(a, b);
    m.modes = modes;
    return m.modulation(t);
}

namespace detail {

inline void require_asym(const AsymptoticParams& ap, const char* who) {
    if (!ap.present())
        throw std::invalid_argument(std::string(who) +
                                    ": hierarchy has no asymptotic record");
}

// Lambda and the coefficient amplitude of the regular hierarchy (with the
// convention C = lim N_i^{-1} e^{theta i}, i.e. N_i ~ C^{-1} e^{theta i}):
//     lambda_i ~ Lambda e^{-alpha xi i},  c_i^2 ~ A_c e^{-theta i},
//     Lambda = e^{-alpha D} (1 - e^{-(alpha xi + theta)}) / (1 - e^{-alpha xi}),
//     A_c    = C (e^theta - 1).
inline double rate_amplitude(const AsymptoticParams& ap, double alpha) {
    const double axi = alpha * ap.xi;
    return std::exp(-alpha * ap.D) * (1.0 - std::exp(-(axi + ap.theta))) /
           (1.0 - std::exp(-axi));
}

inline double coeff_amplitude(const AsymptoticParams& ap) {
    return ap.C * (std::exp(ap.theta) - 1.0);
}

}  // namespace detail

// ── Return probability of the point source ────────────────────────────────
inline AsymptoticModel theorem3_model(const AsymptoticParams& ap, double alpha) {
    detail::require_asym(ap, "theorem3_model");
    if (!(alpha > 0.0)) throw std::domain_error("theorem3_model: alpha must be > 0");
    AsymptoticModel m;
    m.beta = ap.theta / (alpha * ap.xi);
    m.log_period = alpha * ap.xi;
    m.amplitude = detail::coeff_amplitude(ap);
    m.rate_scale = detail::rate_amplitude(ap, alpha);
    return m;
}

inline double theorem3_modulation(const AsymptoticParams& ap, double alpha, double t,
                                  std::size_t modes = 12) {
    AsymptoticModel m = theorem3_model(ap, alpha);
    m.modes = modes;
    return m.modulation(t);
}

// ── Limiting relative pole gap Delta ──────────────────────────────────────
//
// The decay poles satisfy nu_j = lambda_j (1 + Delta_j) with Delta_j -> Delta
// solving the k-independent limit equation
//     1/Delta = sum_{m != 0} e^{theta m} / (e^{alpha xi m} - 1 - Delta),
// which has a unique root in (0, e^{alpha xi} - 1).  Requires the sink
// power-counting hypothesis alpha xi > theta.

namespace detail {

inline double delta_equation_rhs(double theta, double axi, double delta) {
    long double sum = 0.0L;
    for (int m = 1; m <= 400; ++m) {
        const long double term =
            std::exp(static_cast<long double>(theta) * m) /
            (std::exp(static_cast<long double>(axi) * m) - 1.0L - delta);
        sum += term;
        if (std::fabs(term) < 1e-20L * std::fabs(sum) && m > 4) break;
    }
    for (int m = 1; m <= 400; ++m) {
        const long double term =
            std::exp(-static_cast<long double>(theta) * m) /
            (std::exp(-static_cast<long double>(axi) * m) - 1.0L - delta);
        sum += term;
        if (std::fabs(term) < 1e-20L * std::fabs(sum) && m > 4) break;
    }
    return static_cast<double>(sum);
}

}  // namespace detail

inline double delta_limit(const AsymptoticParams& ap, double alpha) {
    detail::require_asym(ap, "delta_limit");
    const double axi = alpha * ap.xi;
    if (!(axi > ap.theta))
        throw std::domain_error("delta_limit: hypothesis alpha*xi > theta violated; "
                                "the survival exponent degenerates");
    double lo = 1e-12, hi = (std::exp(axi) - 1.0) * (1.0 - 1e-12);
    auto F = [&](double d) {
        return detail::delta_equation_rhs(ap.theta, axi, d) - 1.0 / d;
    };
    if (!(F(lo) < 0.0) || !(F(hi) > 0.0))
        throw std::runtime_error("delta_limit: bracketing failed");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (F(mid) < 0.0) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

// G(Delta): bilateral residue lattice sum (the m = 0 term alone is 1/Delta^2).
inline double lattice_residue_sum(double theta, double log_b, double delta) {
    if (!(delta > 0.0))
        throw std::domain_error("lattice_residue_sum: delta must be > 0");
    if (!(2.0 * log_b > theta))
        throw std::domain_error("lattice_residue_sum: divergent (needs 2 log_b > theta)");
    if (1.0 + delta >= std::exp(log_b) * (1.0 - 1e-9))
        throw std::domain_error("lattice_residue_sum: delta resonant with the "
                                "spectral gap e^{log_b} - 1");
    long double sum = 1.0L / (static_cast<long double>(delta) * delta);
    for (int sign : {+1, -1}) {
        for (int m = 1; m <= 2000; ++m) {
            const long double e_t = std::exp(-static_cast<long double>(sign) * theta * m);
            const long double den =
                std::exp(-static_cast<long double>(sign) * log_b * m) - 1.0L - delta;
            const long double term = e_t / (den * den);
            sum += term;
            if (term < 1e-20L * sum && m > 4) break;
        }
    }
    return static_cast<double>(sum);
}

// ── Survival probability under the sink ───────────────────────────────────
inline AsymptoticModel theorem4_model(const AsymptoticParams& ap, double alpha,
                                      double k_rate) {
    detail::require_asym(ap, "theorem4_model");
    if (!(k_rate > 0.0)) throw std::domain_error("theorem4_model: k must be > 0");
    const double axi = alpha * ap.xi;
    if (!(axi > ap.theta))
        throw std::domain_error("theorem4_model: hypothesis alpha*xi > theta "
                                "violated; no power-law survival regime");
    const double delta = delta_limit(ap, alpha);
    const double G = lattice_residue_sum(ap.theta, axi, delta);
    const double Lambda = detail::rate_amplitude(ap, alpha);
    const double A_c = detail::coeff_amplitude(ap);

    AsymptoticModel m;
    m.beta = (axi - ap.theta) / axi;
    m.log_period = axi;
    m.rate_scale = Lambda * (1.0 + delta);                  // pole rate amplitude
    m.amplitude = Lambda / (k_rate * A_c * G * (1.0 + delta));  // k * W_infinity
    return m;
}

inline double theorem4_modulation(const AsymptoticParams& ap, double alpha,
                                  double k_rate, double t, std::size_t modes = 12) {
    AsymptoticModel m = theorem4_model(ap, alpha, k_rate);
    m.modes = modes;
    return m.modulation(t);
}

// ── Brute-force series evaluation and fitting utilities ───────────────────

// sum_{n>=1} a(n) e^{-b(n) t}, stopping once the coefficients have decayed
// below tol of the accumulated value for 8 consecutive terms.  Refuses
// series whose coefficients show no decay within the term cap.
inline double brute_series(const std::function<double(std::size_t)>& a_fn,
                           const std::function<double(std::size_t)>& b_fn, double t,
                           double tol = 1e-16) {
    if (!(t > 0.0)) throw std::invalid_argument("brute_series: t must be > 0");
    long double acc = 0.0L;
    int quiet = 0;
    for (std::size_t n = 1; n <= 200000; ++n) {
        const double a = a_fn(n);
        const double b = b_fn(n);
        if (!(b >= 0.0)) throw std::runtime_error("brute_series: negative rate");
        const long double term =
            static_cast<long double>(a) * std::exp(-static_cast<long double>(b) * t);
        acc += term;
        if (std::abs(a) < tol * std::max<long double>(std::fabs(acc), 1e-300L)) {
            if (++quiet >= 8) return static_cast<double>(acc);
        } else {
            quiet = 0;
        }
    }
    throw std::runtime_error("brute_series: coefficients lack decay within 2e5 terms");
}

struct FitResult {
    double exponent;  // beta in y ~ t^{-beta}
    double stderr_;   // standard error of the exponent estimate
};

// Least-squares fit of log y against log t.  With period_hint > 0 the design
// matrix also carries one harmonic block per Fourier mode of the expected
// log-periodic modulation, which removes the oscillation bias from the slope
// estimate.  Keep harmonics below the Nyquist rate of the sampling grid.
inline FitResult fit_power_exponent(const std::vector<double>& ts,
                                    const std::vector<double>& ys,
                                    double period_hint = 0.0,
                                    std::size_t max_harmonics = 4) {
    if (ts.size() != ys.size() || ts.size() < 4)
        throw std::invalid_argument("fit_power_exponent: need >= 4 matching samples");
    const std::size_t n = ts.size();
    const std::size_t harmonics = period_hint > 0.0 ? max_harmonics : 0;
    const std::size_t p = 2 + 2 * harmonics;
    if (n <= p)
        throw std::invalid_argument("fit_power_exponent: more parameters than samples");

    Eigen::MatrixXd X(n, p);
    Eigen::VectorXd y(n);
    const double two_pi = 6.28318530717958647692;
    for (std::size_t r = 0; r < n; ++r) {
        if (!(ts[r] > 0.0) || !(ys[r] > 0.0))
            throw std::invalid_argument("fit_power_exponent: samples must be positive");
        const double lt = std::log(ts[r]);
        X(r, 0) = 1.0;
        X(r, 1) = lt;
        for (std::size_t m = 1; m <= harmonics; ++m) {
            const double w = two_pi * static_cast<double>(m) / period_hint;
            X(r, 2 * m) = std::cos(w * lt);
            X(r, 2 * m + 1) = std::sin(w * lt);
        }
        y(r) = std::log(ys[r]);
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (static_cast<std::size_t>(qr.rank()) < p)
        throw std::invalid_argument("fit_power_exponent: singular design "
                                    "(harmonics at or beyond the grid Nyquist rate)");
    const Eigen::VectorXd beta = qr.solve(y);
    const Eigen::VectorXd resid = y - X * beta;
    const double sigma2 =
        resid.squaredNorm() / static_cast<double>(n - p);
    const Eigen::MatrixXd xtx_inv =
        (X.transpose() * X).ldlt().solve(Eigen::MatrixXd::Identity(p, p));
    return {-beta(1), std::sqrt(std::max(0.0, sigma2 * xtx_inv(1, 1)))};
}

// Self-consistency of log-periodicity: on a log-equidistant grid commensurate
// with the claimed period, compare samples one period apart.  Returns
// max_j |u_{j+R} - u_j| / mean |u|.
inline double log_periodicity_deviation(const std::vector<double>& ts,
                                        const std::vector<double>& us,
                                        double log_period) {
    if (ts.size() != us.size() || ts.size() < 3)
        throw std::invalid_argument("log_periodicity_deviation: need >= 3 samples");
    if (!(log_period > 0.0))
        throw std::invalid_argument("log_periodicity_deviation: period must be > 0");
    const std::size_t n = ts.size();
    const double dlog = std::log(ts[1] / ts[0]);
    if (!(dlog > 0.0))
        throw std::invalid_argument("log_periodicity_deviation: grid must increase");
    for (std::size_t j = 2; j < n; ++j)
        if (std::abs(std::log(ts[j] / ts[j - 1]) - dlog) > 1e-9 * dlog)
            throw std::invalid_argument("log_periodicity_deviation: grid not "
                                        "log-equidistant");
    const double ratio = log_period / dlog;
    const std::size_t R = static_cast<std::size_t>(std::llround(ratio));
    if (R < 1 || std::abs(static_cast<double>(R) * dlog - log_period) > 1e-9)
        throw std::invalid_argument("log_periodicity_deviation: grid spacing not "
                                    "commensurate with the period");
    if (static_cast<double>(n - 1) * dlog < 2.0 * log_period)
        throw std::invalid_argument("log_periodicity_deviation: need >= 2 periods "
                                    "of data");
    double dev = 0.0, mean = 0.0;
    for (std::size_t j = 0; j < n; ++j) mean += std::abs(us[j]);
    mean /= static_cast<double>(n);
    for (std::size_t j = 0; j + R < n; ++j)
        dev = std::max(dev, std::abs(us[j + R] - us[j]));
    return dev / mean;
}

}  // namespace ultradiff
