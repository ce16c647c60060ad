#pragma once
// Exact solutions of the radial master equation df/dt = A f without reaction.
//
// For the point source at the center,
//     f(x0, t)   = sum_j c_j^2 e^{-lambda_j t}            (return probability)
//     f(S_k, t)  = f(x0, t) - sum_{i<=k} c_i^2 e^{-lambda_i t}
//                  - (1/N_k) e^{-lambda_k t}
// (spheres S_k carry one value each by radial symmetry).  On a finite depth-L
// space the same sums run over the truncated spectrum plus the flat zero mode
// with weight 1/N_L.  General radial initial data f0 = sum_i a_i phi_i evolves
// as sum_i a_i e^{-lambda_i t} phi_i.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "spectrum.hpp"

namespace ultradiff {

struct CenterValue {
    double value;
    std::size_t terms_used;
    double residual_bound;  // certified bound on the omitted coefficient tail
};

// Return probability at the center.  Terms whose coefficient tail 1/N_n is
// already below tol are dropped; since e^{-lambda t} <= 1 the omitted mass
// bounds the error for every t >= 0.
inline CenterValue center_value(const Spectrum& spec, double t, double tol = 1e-14) {
    if (!(t >= 0.0)) throw std::invalid_argument("center_value: t must be >= 0");
    double sum = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 1; i <= spec.size(); ++i) {
        sum += spec.c2(i) * std::exp(-spec.lambda(i) * t);
        used = i;
        if (spec.coefficient_tail(i) <= tol && !spec.finite_space()) break;
    }
    double residual = spec.coefficient_tail(used);
    if (spec.finite_space() && used == spec.size()) {
        sum += spec.uniform_weight();
        residual = 0.0;
    }
    return {sum, used, residual};
}

struct SphereProfile {
    double t;
    std::vector<double> values;  // values[k] = f on sphere S_k, k = 0..K
    std::size_t terms_used;
    double residual_bound;

    std::size_t max_sphere() const { return values.size() - 1; }
};

// Solve for the point source at time t on spheres 0..K.
inline SphereProfile solve_point_source(const Spectrum& spec, double t,
                                        std::size_t K, double tol = 1e-14) {
    if (!(t >= 0.0)) throw std::invalid_argument("solve_point_source: t must be >= 0");
    if (K >= spec.size() && !spec.finite_space())
        throw std::invalid_argument("solve_point_source: sphere index needs a larger "
                                    "computed spectrum");
    if (spec.finite_space() && K > spec.size())
        throw std::invalid_argument("solve_point_source: sphere index exceeds depth");
    const CenterValue cv = center_value(spec, t, tol);

    SphereProfile out;
    out.t = t;
    out.terms_used = cv.terms_used;
    out.residual_bound = cv.residual_bound;
    out.values.resize(K + 1);
    out.values[0] = cv.value;
    double head = 0.0;  // sum_{i<=k} c_i^2 e^{-lambda_i t}
    for (std::size_t k = 1; k <= K; ++k) {
        head += spec.c2(k) * std::exp(-spec.lambda(k) * t);
        const double hk = spec.hierarchy().N(k) == spec.hierarchy().N(k - 1)
                              ? 0.0  // degenerate level: S_k empty (cannot occur
                                     // for validated hierarchies)
                              : cv.value - head -
                                    std::exp(-spec.lambda(k) * t) / spec.hierarchy().N(k);
        out.values[k] = hk;
    }
    return out;
}

// Evolve general radial initial data given by basis coefficients a_1..a_n
// (plus, on finite spaces, the flat component flat0 carried unchanged).
// Rejects coefficient sequences with no sign of square-summable decay.
inline SphereProfile solve_general(const Spectrum& spec, const std::vector<double>& a,
                                   double t, std::size_t K, double flat0 = 0.0) {
    if (!(t >= 0.0)) throw std::invalid_argument("solve_general: t must be >= 0");
    if (a.empty() || a.size() > spec.size())
        throw std::invalid_argument("solve_general: coefficient count must be in "
                                    "[1, spectrum size]");
    if (a.size() >= 9) {
        bool increasing = true;
        for (std::size_t i = a.size() - 8; i < a.size(); ++i)
            if (std::abs(a[i]) <= std::abs(a[i - 1])) { increasing = false; break; }
        if (increasing)
            throw std::invalid_argument("solve_general: |a_i| increasing over the "
                                        "last 8 terms; not square-summable data");
    }
    SphereProfile out;
    out.t = t;
    out.terms_used = a.size();
    out.residual_bound = 0.0;  // exact for finitely supported data
    out.values.assign(K + 1, flat0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        const double w = a[i - 1] * std::exp(-spec.lambda(i) * t);
        if (w == 0.0) continue;
        for (std::size_t k = 0; k <= K && k <= i; ++k)
            out.values[k] += w * spec.basis(i, k);
    }
    return out;
}

// Mass inside the ball B_K summed sphere by sphere: sum_{k<=K} M_k f_k.
inline double profile_ball_mass(const Spectrum& spec, const SphereProfile& p,
                                std::size_t K) {
    if (K > p.max_sphere())
        throw std::invalid_argument("profile_ball_mass: K exceeds profile");
    const UltrametricHierarchy& h = spec.hierarchy();
    double mass = 0.0;
    for (std::size_t k = 0; k <= K; ++k) mass += h.M(k) * p.values[k];
    return mass;
}

// The same ball mass computed through the spectral tail:
//     sum_{k<=K} M_k f_k = N_K sum_{i>K} c_i^2 e^{-lambda_i t}  (+ zero mode).
// Independent route used to cross-check mass bookkeeping.
inline double eigen_tail_ball_mass(const Spectrum& spec, double t, std::size_t K) {
    if (K >= spec.size())
        throw std::invalid_argument("eigen_tail_ball_mass: K too large for spectrum");
    double sum = 0.0;
    for (std::size_t i = K + 1; i <= spec.size(); ++i)
        sum += spec.c2(i) * std::exp(-spec.lambda(i) * t);
    if (spec.finite_space()) sum += spec.uniform_weight();
    return spec.hierarchy().N(K) * sum;
}

}  // namespace ultradiff
