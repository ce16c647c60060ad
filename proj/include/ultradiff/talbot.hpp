#pragma once
// Numerical inverse Laplace transform on the fixed Talbot contour.
//
// With r = 2M/(5t) and theta_k = k pi / M,
//     s(theta)     = r theta (cot theta + i)
//     sigma(theta) = theta + (theta cot theta - 1) cot theta
//     f(t) ~ (r/M) [ (1/2) F(r) e^{r t}
//                    + sum_{k=1}^{M-1} Re( e^{t s(theta_k)} F(s(theta_k))
//                                          (1 + i sigma(theta_k)) ) ].
// The scheme converges geometrically in M for transforms analytic off the
// negative real axis.  M much beyond ~40 in double precision buys nothing:
// the e^{2M/5} contour growth amplifies roundoff, so the default stays at 32.

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>

namespace ultradiff {

inline double talbot_invert(const std::function<std::complex<double>(std::complex<double>)>& F,
                            double t, std::size_t m = 32) {
    if (!(t > 0.0)) throw std::invalid_argument("talbot_invert: t must be > 0");
    if (m < 4) throw std::invalid_argument("talbot_invert: need m >= 4 nodes");
    const double pi = 3.14159265358979323846;
    const double r = 2.0 * static_cast<double>(m) / (5.0 * t);

    const std::complex<double> f0 = F(std::complex<double>(r, 0.0));
    if (!std::isfinite(f0.real()) || !std::isfinite(f0.imag()))
        throw std::runtime_error("talbot_invert: transform not finite on the contour");
    double acc = 0.5 * f0.real() * std::exp(r * t);

    for (std::size_t k = 1; k < m; ++k) {
        const double theta = static_cast<double>(k) * pi / static_cast<double>(m);
        const double cot = std::cos(theta) / std::sin(theta);
        const std::complex<double> s(r * theta * cot, r * theta);
        const double sigma = theta + (theta * cot - 1.0) * cot;
        const std::complex<double> fs = F(s);
        if (!std::isfinite(fs.real()) || !std::isfinite(fs.imag()))
            throw std::runtime_error("talbot_invert: transform not finite on the contour");
        const std::complex<double> w =
            std::exp(t * s) * fs * std::complex<double>(1.0, sigma);
        acc += w.real();
    }
    return acc * r / static_cast<double>(m);
}

}  // namespace ultradiff
