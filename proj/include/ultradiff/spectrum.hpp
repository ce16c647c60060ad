#pragma once
// Radial eigenbasis of the ultrametric diffusion generator.
//
// The generator acting on radially symmetric functions around the center has
// the orthonormal eigenbasis (counting measure over points)
//     phi_i = (N_{i-1}(1 - N_{i-1}/N_i))^{-1/2} (J_{i-1} - (N_{i-1}/N_i) J_i),
// where J_i is the indicator of the ball B_i.  The eigenvalues are
//     lambda_i = sum_{j>=i} e^{-alpha d_j} (1 - e^{-alpha(d_{j+1}-d_j)} N_j/N_{j+1}),
// a strictly decreasing positive sequence, and the point source expands as
//     J_0 = sum_j c_j phi_j,   c_j = N_{j-1}^{-1/2} (1 - N_{j-1}/N_j)^{1/2}.
//
// On a depth-L truncation the same formulas hold with the sum cut at j = L-1
// plus the exact final term e^{-alpha d_L}, and a flat zero-mode of weight
// 1/N_L joins the basis.

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "hierarchy.hpp"

namespace ultradiff {

struct EigenvalueResult {
    double value;
    double tail_bound;  // certified truncation error of the defining series
};

// lambda_i with a geometric tail certificate.  tol is relative.
inline EigenvalueResult eigenvalue(const UltrametricHierarchy& h, const Kernel& kernel,
                                   std::size_t i, double tol = 1e-14) {
    if (i < 1) throw std::invalid_argument("eigenvalue: index must be >= 1");
    if (!(tol > 0.0)) throw std::invalid_argument("eigenvalue: tol must be > 0");
    const double alpha = kernel.alpha();
    const AsymptoticParams& a = h.asym();
    if (!h.is_tabulated() && !a.present())
        throw std::runtime_error("eigenvalue: hierarchy has no asymptotic "
                                 "record; cannot certify the series tail");

    const std::size_t last_j =
        h.is_tabulated() ? h.max_level() - 1 : h.max_level();  // need d_{j+1}
    double sum = 0.0;
    double max_dev = 0.0;  // observed max |d_j - xi j| over the scanned range
    for (std::size_t j = i; j <= last_j; ++j) {
        const double dj = h.d(j), dj1 = h.d(j + 1);
        const double term =
            std::exp(-alpha * dj) *
            (1.0 - std::exp(-alpha * (dj1 - dj)) * h.population_ratio(j));
        sum += term;
        if (a.present())
            max_dev = std::max(max_dev, std::abs(dj - a.xi * static_cast<double>(j)));

        if (a.present()) {
            // tail majorant: sum_{l>j} e^{-alpha d_l}
            //             <= e^{alpha dev} e^{-alpha xi (j+1)} / (1 - e^{-alpha xi})
            const double axi = alpha * a.xi;
            const double bound = std::exp(alpha * max_dev) *
                                 std::exp(-axi * static_cast<double>(j + 1)) /
                                 (1.0 - std::exp(-axi));
            if (bound <= tol * sum) return {sum, bound};
        }
        if (j > i + 100000)
            throw std::runtime_error("eigenvalue: series failed to converge "
                                     "(no geometric decay within 1e5 terms)");
    }
    if (h.is_tabulated() && a.present()) {
        const double axi = alpha * a.xi;
        const double bound = std::exp(alpha * max_dev) *
                             std::exp(-axi * static_cast<double>(last_j + 1)) /
                             (1.0 - std::exp(-axi));
        if (bound <= tol * sum) return {sum, bound};
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3g", bound);
        throw std::runtime_error(
            "eigenvalue: tabulated hierarchy exhausted at level " +
            std::to_string(h.max_level()) + " before reaching tol (tail bound " +
            buf + ")");
    }
    throw std::runtime_error("eigenvalue: hierarchy has no asymptotic record; "
                             "cannot certify the series tail");
}

// Exact spectrum of the depth-L truncated generator: the series cut at L-1
// plus the closing term e^{-alpha d_L}.
inline double finite_eigenvalue(const UltrametricHierarchy& h, const Kernel& kernel,
                                std::size_t i) {
    const std::size_t L = h.max_level();
    if (!h.is_tabulated() || L == UltrametricHierarchy::unbounded())
        throw std::invalid_argument("finite_eigenvalue: needs a tabulated hierarchy");
    if (i < 1 || i > L)
        throw std::invalid_argument("finite_eigenvalue: index out of range");
    const double alpha = kernel.alpha();
    double sum = 0.0;
    for (std::size_t j = i; j + 1 <= L; ++j)
        sum += std::exp(-alpha * h.d(j)) *
               (1.0 - std::exp(-alpha * (h.d(j + 1) - h.d(j))) * h.population_ratio(j));
    sum += std::exp(-alpha * h.d(L));
    return sum;
}

// Value of phi_i on the sphere S_k: constant c-like value inside B_{i-1},
// one negative value on S_i, zero outside B_i.
inline double basis_value(const UltrametricHierarchy& h, std::size_t i, std::size_t k) {
    if (i < 1) throw std::invalid_argument("basis_value: index must be >= 1");
    if (k > i) return 0.0;
    const double Nim1 = h.N(i - 1);
    const double r = Nim1 / h.N(i);  // N_{i-1}/N_i
    const double pref = 1.0 / std::sqrt(Nim1 * (1.0 - r));
    if (k <= i - 1) return pref * (1.0 - r);
    return -pref * r;  // k == i
}

// c_j = N_{j-1}^{-1/2} (1 - N_{j-1}/N_j)^{1/2}; the expansion of the point source.
inline double point_source_coefficient(const UltrametricHierarchy& h, std::size_t j) {
    const double Nim1 = h.N(j - 1);
    return std::sqrt((1.0 - Nim1 / h.N(j)) / Nim1);
}

inline std::vector<double> point_source_coefficients(const UltrametricHierarchy& h,
                                                     std::size_t n) {
    if (n < 1) throw std::invalid_argument("point_source_coefficients: n must be >= 1");
    std::vector<double> c(n);
    for (std::size_t j = 1; j <= n; ++j) c[j - 1] = point_source_coefficient(h, j);
    return c;
}

// Integral of phi_i phi_j phi_k over all points (counting measure).
// Only two patterns survive: all indices equal, or exactly two equal with the
// remaining index strictly larger (the paired basis function is then constant
// on the support and orthonormality leaves the single coefficient c_max).
inline double triple_product(const UltrametricHierarchy& h,
                             std::size_t i, std::size_t j, std::size_t k) {
    if (i < 1 || j < 1 || k < 1)
        throw std::invalid_argument("triple_product: indices must be >= 1");
    if (i == j && j == k) {
        const double Nim1 = h.N(i - 1);
        const double r = Nim1 / h.N(i);
        return (1.0 - 2.0 * r) / std::sqrt(Nim1 * (1.0 - r));
    }
    if (i == j && k > i) return point_source_coefficient(h, k);
    if (i == k && j > i) return point_source_coefficient(h, j);
    if (j == k && i > j) return point_source_coefficient(h, i);
    return 0.0;
}

// Partial sum of the ball-indicator expansion
//     J_i = N_i sum_{j > i} c_j phi_j
// evaluated on sphere S_k, terms j = i+1 .. n.  The residual is exactly
// +-N_i/N_n (telescoping): + for k <= i, - for k > i.
inline double reconstruct_ball_indicator(const UltrametricHierarchy& h,
                                         std::size_t i, std::size_t k, std::size_t n) {
    if (n < 1) throw std::invalid_argument("reconstruct_ball_indicator: n must be >= 1");
    double sum = 0.0;
    for (std::size_t j = i + 1; j <= n; ++j)
        sum += point_source_coefficient(h, j) * basis_value(h, j, k);
    return h.N(i) * sum;
}

// ───────────────────────────── Spectrum ──────────────────────────────────
//
// A computed prefix of the spectral data: lambda_1..lambda_n with tail
// certificates, the point-source coefficients, and (for finite spaces) the
// flat zero-mode weight 1/N_L.

class Spectrum {
public:
    Spectrum(UltrametricHierarchy h, Kernel kernel, std::size_t count,
             double tol = 1e-14)
        : h_(std::move(h)), kernel_(kernel) {
        if (count < 1) throw std::invalid_argument("Spectrum: count must be >= 1");
        if (h_.finite_space()) {
            const std::size_t L = h_.max_level();
            count = std::min(count, L);
            lambda_.resize(count);
            tail_.assign(count, 0.0);
            for (std::size_t i = 1; i <= count; ++i)
                lambda_[i - 1] = finite_eigenvalue(h_, kernel_, i);
            uniform_weight_ = 1.0 / h_.N(L);
        } else {
            lambda_.resize(count);
            tail_.resize(count);
            for (std::size_t i = 1; i <= count; ++i) {
                const EigenvalueResult e = eigenvalue(h_, kernel_, i, tol);
                lambda_[i - 1] = e.value;
                tail_[i - 1] = e.tail_bound;
            }
        }
        c_ = point_source_coefficients(h_, count);
        for (std::size_t i = 1; i < lambda_.size(); ++i)
            if (!(lambda_[i] < lambda_[i - 1]))
                throw std::runtime_error("Spectrum: eigenvalues not strictly "
                                         "decreasing at index " + std::to_string(i + 1));
    }

    std::size_t size() const { return lambda_.size(); }
    double lambda(std::size_t i) const { return lambda_.at(i - 1); }       // 1-based
    double tail_bound(std::size_t i) const { return tail_.at(i - 1); }
    double c(std::size_t i) const { return c_.at(i - 1); }
    double c2(std::size_t i) const { return c_.at(i - 1) * c_.at(i - 1); }
    double basis(std::size_t i, std::size_t k) const { return basis_value(h_, i, k); }

    bool finite_space() const { return h_.finite_space(); }
    double uniform_weight() const { return uniform_weight_; }  // 1/N_L, finite only
    const UltrametricHierarchy& hierarchy() const { return h_; }
    const Kernel& kernel() const { return kernel_; }

    // Coefficient mass beyond the first n modes: sum_{j>n} c_j^2 = 1/N_n.
    double coefficient_tail(std::size_t n) const { return 1.0 / h_.N(n); }

private:
    UltrametricHierarchy h_;
    Kernel kernel_;
    std::vector<double> lambda_, tail_, c_;
    double uniform_weight_ = 0.0;
};

inline Spectrum make_spectrum(const UltrametricHierarchy& h, const Kernel& kernel,
                              std::size_t count, double tol = 1e-14) {
    return Spectrum(h, kernel, count, tol);
}

}  // namespace ultradiff
