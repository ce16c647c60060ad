#pragma once
// Brute-force reference solutions on explicit finite trees: the full dense
// master-equation generator with matrix-exponential and adaptive-ODE
// propagation, the exact reduction to sphere-mass coordinates, and a
// continuous-time Monte Carlo driver.  Everything here is deliberately
// independent of the spectral machinery so the two can cross-check each other.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "rng.hpp"
#include "tree.hpp"

namespace ultradiff {

struct RateMatrix {
    Eigen::MatrixXd G;  // symmetric generator, columns sum to -sink at center
    std::size_t n = 0;
    double sink_rate = 0.0;
    std::size_t center = 0;
};

// Full point-space generator: G(x,y) = K(d(x,y)) off-diagonal, diagonal
// balancing the column, and the sink subtracted at the center.
inline RateMatrix build_rate_matrix(const FiniteTree& tree, const Kernel& kernel,
                                    double sink_rate = 0.0) {
    const std::size_t n = tree.leaf_count();
    if (n > 4096)
        throw std::invalid_argument("build_rate_matrix: refusing > 4096 points "
                                    "(dense oracle only)");
    if (sink_rate < 0.0)
        throw std::invalid_argument("build_rate_matrix: sink rate must be >= 0");
    RateMatrix rm;
    rm.G = Eigen::MatrixXd::Zero(n, n);
    rm.n = n;
    rm.sink_rate = sink_rate;
    rm.center = tree.center();
    for (std::size_t x = 0; x < n; ++x) {
        double out = 0.0;
        for (std::size_t y = 0; y < n; ++y) {
            if (y == x) continue;
            const double r = kernel.rate(tree.distance(x, y),
                                         static_cast<double>(tree.pair_ball_count(x, y)));
            rm.G(y, x) = r;
            out += r;
        }
        rm.G(x, x) = -out;
    }
    rm.G(rm.center, rm.center) -= sink_rate;
    return rm;
}

// Propagate f0 to time t with the scaling-and-squaring matrix exponential.
inline Eigen::VectorXd evolve(const RateMatrix& rm, const Eigen::VectorXd& f0,
                              double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("evolve: t must be >= 0");
    if (static_cast<std::size_t>(f0.size()) != rm.n)
        throw std::invalid_argument("evolve: dimension mismatch");
    return (t * rm.G).exp() * f0;
}

// Same propagation through an embedded Dormand-Prince 5(4) pair; an
// implementation-independent check on the matrix exponential.
inline Eigen::VectorXd evolve_ode(const RateMatrix& rm, const Eigen::VectorXd& f0,
                                  double t, double rtol = 1e-12,
                                  double atol = 1e-14) {
    if (!(t >= 0.0)) throw std::invalid_argument("evolve_ode: t must be >= 0");
    if (static_cast<std::size_t>(f0.size()) != rm.n)
        throw std::invalid_argument("evolve_ode: dimension mismatch");
    if (t == 0.0) return f0;

    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                        a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                        a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 35.0 / 384 - 5179.0 / 57600,
                        e3 = 500.0 / 1113 - 7571.0 / 16695,
                        e4 = 125.0 / 192 - 393.0 / 640,
                        e5 = -2187.0 / 6784 + 92097.0 / 339200,
                        e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    Eigen::VectorXd y = f0;
    const double gnorm = rm.G.cwiseAbs().rowwise().sum().maxCoeff();
    double h = std::min(t, 0.1 / std::max(gnorm, 1e-12));
    double time = 0.0;
    std::size_t steps = 0;
    while (time < t) {
        if (++steps > 50'000'000)
            throw std::runtime_error("evolve_ode: step limit exceeded");
        h = std::min(h, t - time);
        const Eigen::VectorXd k1 = rm.G * y;
        const Eigen::VectorXd k2 = rm.G * (y + h * (a21 * k1));
        const Eigen::VectorXd k3 = rm.G * (y + h * (a31 * k1 + a32 * k2));
        const Eigen::VectorXd k4 = rm.G * (y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        const Eigen::VectorXd k5 =
            rm.G * (y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const Eigen::VectorXd k6 = rm.G * (y + h * (a61 * k1 + a62 * k2 + a63 * k3 +
                                                    a64 * k4 + a65 * k5));
        const Eigen::VectorXd ynew =
            y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const Eigen::VectorXd k7 = rm.G * ynew;
        const Eigen::VectorXd err =
            h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double norm2 = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double sc =
                atol + rtol * std::max(std::abs(y(i)), std::abs(ynew(i)));
            const double q = err(i) / sc;
            norm2 += q * q;
        }
        const double en = std::sqrt(norm2 / static_cast<double>(y.size()));
        if (en <= 1.0) {
            time += h;
            y = ynew;
        }
        const double fac =
            std::clamp(0.9 * std::pow(std::max(en, 1e-10), -0.2), 0.2, 5.0);
        h *= fac;
    }
    return y;
}

// Exact reduction to sphere-mass coordinates m_k = sum_{x in S_k} f(x).
// Flow between distinct spheres is center-determined on an equal-depth tree
// (the merge level of any such pair is an ancestor level of the center), so
//     dm_k/dt = sum_{j != k} [ M_k K(d_kj) m_j - M_j K(d_kj) m_k ],
// with d_kj the center distance of level max(k, j); within-sphere traffic
// cancels from the mass balance identically.
inline RateMatrix reduce_spherical(const FiniteTree& tree, const Kernel& kernel,
                                   double sink_rate = 0.0) {
    const std::size_t L = tree.levels();
    std::vector<double> N(L + 1), M(L + 1);
    N[0] = 1.0;
    M[0] = 1.0;
    for (std::size_t h = 1; h <= L; ++h) {
        N[h] = static_cast<double>(tree.ancestor_count(tree.center(), h));
        M[h] = N[h] - N[h - 1];
    }
    RateMatrix rm;
    rm.G = Eigen::MatrixXd::Zero(L + 1, L + 1);
    rm.n = L + 1;
    rm.sink_rate = sink_rate;
    rm.center = 0;
    for (std::size_t j = 0; j <= L; ++j) {
        double out = 0.0;
        for (std::size_t k = 0; k <= L; ++k) {
            if (k == j) continue;
            const std::size_t merge = std::max(j, k);
            const double r = kernel.rate(tree.level_distance(merge), N[merge]);
            rm.G(k, j) = M[k] * r;
            out += M[k] * r;
        }
        rm.G(j, j) = -out;
    }
    rm.G(0, 0) -= sink_rate;
    return rm;
}

// Sphere masses of a point-space profile.
inline std::vector<double> project_sphere_mass(const FiniteTree& tree,
                                               const Eigen::VectorXd& f) {
    if (static_cast<std::size_t>(f.size()) != tree.leaf_count())
        throw std::invalid_argument("project_sphere_mass: dimension mismatch");
    std::vector<double> m(tree.levels() + 1, 0.0);
    for (std::size_t x = 0; x < tree.leaf_count(); ++x)
        m[tree.sphere_index(x)] += f(static_cast<Eigen::Index>(x));
    return m;
}

// Sphere means (per-point values) of a point-space profile.
inline std::vector<double> project_sphere_mean(const FiniteTree& tree,
                                               const Eigen::VectorXd& f) {
    std::vector<double> m = project_sphere_mass(tree, f);
    std::size_t prev = 1;
    for (std::size_t k = 0; k < m.size(); ++k) {
        const std::size_t Nk = tree.ancestor_count(tree.center(), k);
        m[k] /= static_cast<double>(Nk - (k == 0 ? 0 : prev));
        prev = Nk;
    }
    return m;
}

// ───────────────────────── Monte Carlo driver ─────────────────────────────

struct GillespieResult {
    std::vector<double> times;
    // sphere_counts[s][k]: walkers on sphere S_k at snapshot s
    std::vector<std::vector<std::uint64_t>> sphere_counts;
    std::vector<std::uint64_t> absorbed;  // cumulative, per snapshot
    std::vector<std::uint64_t> final_leaf_counts;
    std::size_t walkers = 0;
    std::uint64_t seed = 0;
};

// Independent continuous-time walkers started at the center, with the exact
// jump law of the kernel and (optionally) absorption at the center as a
// competing exponential clock.  Jump targets at merge level j of the current
// leaf are uniform over the two contiguous leaf-index ranges forming the
// level-j shell, so sampling is O(1) per event.
inline GillespieResult gillespie(const FiniteTree& tree, const Kernel& kernel,
                                 double sink_rate, std::size_t walkers,
                                 std::vector<double> times, std::uint64_t seed) {
    if (times.empty()) throw std::invalid_argument("gillespie: no snapshot times");
    std::sort(times.begin(), times.end());
    if (!(times.front() >= 0.0))
        throw std::invalid_argument("gillespie: times must be >= 0");
    if (sink_rate < 0.0)
        throw std::invalid_argument("gillespie: sink rate must be >= 0");

    const std::size_t n = tree.leaf_count();
    const std::size_t L = tree.levels();

    // Per-leaf per-level jump rates: cnt_j leaves in the level-j shell, each
    // reached at the kernel rate for that merge level.
    std::vector<std::vector<double>> cum_rate(n);   // cumulative over levels 1..L
    std::vector<std::vector<std::size_t>> shell(n); // shell sizes per level
    std::vector<double> total_rate(n);
    for (std::size_t x = 0; x < n; ++x) {
        cum_rate[x].resize(L + 1, 0.0);
        shell[x].resize(L + 1, 0);
        double acc = 0.0;
        std::size_t prev = 1;
        for (std::size_t j = 1; j <= L; ++j) {
            const std::size_t ball = tree.ancestor_count(x, j);
            const std::size_t cnt = ball - prev;
            shell[x][j] = cnt;
            acc += static_cast<double>(cnt) *
                   kernel.rate(tree.level_distance(j), static_cast<double>(ball));
            cum_rate[x][j] = acc;
            prev = ball;
        }
        total_rate[x] = acc;
    }

    GillespieResult res;
    res.times = times;
    res.sphere_counts.assign(times.size(), std::vector<std::uint64_t>(L + 1, 0));
    res.absorbed.assign(times.size(), 0);
    res.final_leaf_counts.assign(n, 0);
    res.walkers = walkers;
    res.seed = seed;

    for (std::size_t w = 0; w < walkers; ++w) {
        SplitMix64 rng(mix_seed(seed, w));
        std::size_t pos = tree.center();
        double t = 0.0;
        bool gone = false;
        std::size_t snap = 0;
        while (snap < times.size()) {
            const double rate =
                total_rate[pos] + (pos == tree.center() ? sink_rate : 0.0);
            const double dt =
                rate > 0.0 ? rng.exponential(rate)
                           : std::numeric_limits<double>::infinity();
            // record any snapshots passed before this event fires
            while (snap < times.size() && t + dt > times[snap]) {
                ++res.sphere_counts[snap][tree.sphere_index(pos)];
                ++snap;
            }
            if (snap >= times.size()) break;
            t += dt;
            if (pos == tree.center() && sink_rate > 0.0 &&
                rng.uniform01() * rate < sink_rate) {
                gone = true;  // absorbed at the sink
                break;
            }
            // pick the merge level, then a uniform leaf in its shell
            const double u = rng.uniform01() * total_rate[pos];
            std::size_t j = 1;
            while (j < L && (u > cum_rate[pos][j] || shell[pos][j] == 0)) ++j;
            while (shell[pos][j] == 0 && j > 1) --j;  // exact-boundary tie
            const auto [a1, b1r] = tree.ancestor_range(pos, j);
            const auto [a0, b0] = tree.ancestor_range(pos, j - 1);
            (void)b1r;
            const std::size_t left = a0 - a1;  // leaves before the inner ball
            std::size_t idx = static_cast<std::size_t>(
                rng.uniform01() * static_cast<double>(shell[pos][j]));
            if (idx >= shell[pos][j]) idx = shell[pos][j] - 1;
            pos = idx < left ? a1 + idx : b0 + (idx - left);
        }
        if (gone) {
            for (std::size_t s = snap; s < times.size(); ++s) ++res.absorbed[s];
        } else if (snap >= times.size()) {
            ++res.final_leaf_counts[pos];
        }
    }
    return res;
}

}  // namespace ultradiff
