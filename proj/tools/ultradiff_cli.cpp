// Command-line front end: exact spectral solvers for hierarchical diffusion,
// the point-sink survival problem, log-periodic asymptotics, and brute-force
// oracle cross-checks.
//
// Subcommands:
//   validate      certify hierarchy regularity (summability / bounded / limit)
//   spectrum      eigenvalues, tail certificates, point-source coefficients
//   solve         sphere profiles of the pure diffusion
//   sink          decay poles, residues, survival (pole sum vs contour)
//   asym          closed-form power-law/log-periodic models vs brute series
//   oracle-check  spectral solution vs dense matrix-exponential oracle
//   mc            Monte Carlo occupancies vs the reduced generator
//
// Exit codes: 0 success, 1 failed check / violated hypothesis, 2 bad usage
// or config.  Output is CSV with '#' metadata lines; all floating-point
// values carry 17 significant digits, and a fixed config+seed reproduces the
// output byte for byte.

#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ultradiff/ultradiff.hpp"

using nlohmann::json;
using namespace ultradiff;

namespace {

constexpr const char* kVersion = "0.1.0";

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ───────────────────────────── configuration ─────────────────────────────

struct RunConfig {
    std::string scenario_type = "self_similar";  // self_similar|perturbed|tree
    long p = 2;
    double xi = 1.0;
    std::vector<double> delta, epsilon;
    json branching;  // tree grammar: nested arrays, or {"uniform":{...}}
    std::vector<double> level_distance;

    double alpha = std::log(4.0);
    double sink_rate = 1.0;
    double t_min = 0.1, t_max = 100.0;
    int points_per_decade = 8;
    std::size_t spheres = 8;
    double tol = 1e-12;
    std::uint64_t seed = 12345;
    std::size_t depth = 8;
    std::size_t walkers = 100000;
    std::size_t poles = 40;
    std::size_t count = 20;

    json canonical;  // effective values, for the reproducibility hash
};

template <typename T>
T field_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("config: field '") + key +
                          "' has the wrong type");
    }
}

RunConfig parse_config(const json& j) {
    RunConfig c;
    for (auto it = j.begin(); it != j.end(); ++it) {
        static const std::vector<std::string> known = {
            "scenario", "alpha", "sink_rate", "t_grid",  "spheres", "tol",
            "seed",     "depth", "walkers",   "poles",   "count"};
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            throw ConfigError("config: unknown field '" + it.key() + "'");
    }
    if (j.contains("scenario")) {
        const json& s = j.at("scenario");
        c.scenario_type = field_or<std::string>(s, "type", c.scenario_type);
        c.p = field_or<long>(s, "p", c.p);
        c.xi = field_or<double>(s, "xi", c.xi);
        c.delta = field_or<std::vector<double>>(s, "delta", {});
        c.epsilon = field_or<std::vector<double>>(s, "epsilon", {});
        c.level_distance = field_or<std::vector<double>>(s, "level_distance", {});
        if (s.contains("branching")) c.branching = s.at("branching");
        if (c.scenario_type != "self_similar" && c.scenario_type != "perturbed" &&
            c.scenario_type != "tree")
            throw ConfigError("config: scenario.type must be self_similar, "
                              "perturbed, or tree");
        if (c.scenario_type == "tree" && c.branching.is_null())
            throw ConfigError("config: tree scenario needs scenario.branching");
        if (c.scenario_type == "perturbed" && c.delta.empty() && c.epsilon.empty())
            throw ConfigError("config: perturbed scenario needs delta or epsilon");
    }
    c.alpha = field_or<double>(j, "alpha", c.alpha);
    c.sink_rate = field_or<double>(j, "sink_rate", c.sink_rate);
    if (j.contains("t_grid")) {
        const json& g = j.at("t_grid");
        c.t_min = field_or<double>(g, "t_min", c.t_min);
        c.t_max = field_or<double>(g, "t_max", c.t_max);
        c.points_per_decade = field_or<int>(g, "points_per_decade",
                                            c.points_per_decade);
    }
    c.spheres = field_or<std::size_t>(j, "spheres", c.spheres);
    c.tol = field_or<double>(j, "tol", c.tol);
    c.seed = field_or<std::uint64_t>(j, "seed", c.seed);
    c.depth = field_or<std::size_t>(j, "depth", c.depth);
    c.walkers = field_or<std::size_t>(j, "walkers", c.walkers);
    c.poles = field_or<std::size_t>(j, "poles", c.poles);
    c.count = field_or<std::size_t>(j, "count", c.count);

    if (!(c.alpha > 0.0)) throw ConfigError("config: alpha must be > 0");
    if (c.sink_rate < 0.0) throw ConfigError("config: sink_rate must be >= 0");
    if (!(c.t_min > 0.0) || !(c.t_max >= c.t_min))
        throw ConfigError("config: need 0 < t_min <= t_max");
    if (c.points_per_decade < 1)
        throw ConfigError("config: points_per_decade must be >= 1");
    if (c.depth < 1) throw ConfigError("config: depth must be >= 1");
    return c;
}

void fill_canonical(RunConfig& c) {
    json s;
    s["type"] = c.scenario_type;
    s["p"] = c.p;
    s["xi"] = c.xi;
    if (!c.delta.empty()) s["delta"] = c.delta;
    if (!c.epsilon.empty()) s["epsilon"] = c.epsilon;
    if (!c.branching.is_null()) s["branching"] = c.branching;
    if (!c.level_distance.empty()) s["level_distance"] = c.level_distance;
    json out;
    out["scenario"] = s;
    out["alpha"] = c.alpha;
    out["sink_rate"] = c.sink_rate;
    out["t_grid"] = {{"t_min", c.t_min},
                     {"t_max", c.t_max},
                     {"points_per_decade", c.points_per_decade}};
    out["spheres"] = c.spheres;
    out["tol"] = c.tol;
    out["seed"] = c.seed;
    out["depth"] = c.depth;
    out["walkers"] = c.walkers;
    out["poles"] = c.poles;
    out["count"] = c.count;
    c.canonical = out;
}

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

// ─────────────────────────── scenario builders ───────────────────────────

TreeSpec parse_branching(const json& j) {
    if (j.is_array()) {
        TreeSpec s;
        for (const auto& child : j) s.children.push_back(parse_branching(child));
        return s;
    }
    if (j.is_object() && j.contains("uniform")) {
        const json& u = j.at("uniform");
        return TreeSpec::uniform(field_or<long>(u, "branch", 2),
                                 field_or<std::size_t>(u, "depth", 1));
    }
    throw ConfigError("config: branching must be nested arrays ([] = leaf) or "
                      "{\"uniform\": {\"branch\": p, \"depth\": L}}");
}

std::vector<double> linear_distances(double xi, std::size_t L) {
    std::vector<double> d(L);
    for (std::size_t h = 1; h <= L; ++h) d[h - 1] = xi * static_cast<double>(h);
    return d;
}

UltrametricHierarchy build_hierarchy(const RunConfig& c) {
    if (c.scenario_type == "self_similar") return make_self_similar(c.p, c.xi);
    if (c.scenario_type == "perturbed")
        return make_perturbed(c.p, c.xi, c.delta, c.epsilon);
    FiniteTree tree(parse_branching(c.branching), c.level_distance);
    return tree.induced_hierarchy();
}

// Equal-depth tree carrying exactly the radial data (d_i, N_i): the ball of
// level j keeps the previous ball as one child and hangs the M_j new points
// on unary chains so that every leaf sits at the same depth.
TreeSpec realize_radial_tree(const std::vector<double>& N) {
    TreeSpec node = TreeSpec::leaf();
    double prev = 1.0;
    for (std::size_t j = 1; j <= N.size(); ++j) {
        const double Mj = N[j - 1] - prev;
        if (Mj < 1.0 || Mj != std::floor(Mj))
            throw ConfigError("scenario: sphere populations must be positive "
                              "integers to realize a tree");
        TreeSpec parent;
        parent.children.push_back(node);
        for (double m = 0; m < Mj; ++m) {
            TreeSpec chain = TreeSpec::leaf();
            for (std::size_t h = 1; h < j; ++h) {
                TreeSpec wrap;
                wrap.children.push_back(chain);
                chain = wrap;
            }
            parent.children.push_back(chain);
        }
        node = parent;
        prev = N[j - 1];
    }
    return node;
}

FiniteTree build_tree(const RunConfig& c, std::size_t depth) {
    if (c.scenario_type == "self_similar")
        return make_uniform_tree(c.p, depth, linear_distances(c.xi, depth));
    if (c.scenario_type == "tree")
        return FiniteTree(parse_branching(c.branching), c.level_distance);
    // perturbed: realize the tabulated radial data up to the requested depth
    UltrametricHierarchy h = make_perturbed(c.p, c.xi, c.delta, c.epsilon);
    const std::size_t L = std::min(depth, h.max_level());
    std::vector<double> N(L), d(L);
    for (std::size_t i = 1; i <= L; ++i) {
        N[i - 1] = h.N(i);
        d[i - 1] = h.d(i);
    }
    return FiniteTree(realize_radial_tree(N), d);
}

// ───────────────────────────── output helpers ────────────────────────────

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Output {
    std::ostream* os = &std::cout;
    std::ofstream file;

    void open(const std::string& path) {
        if (path.empty()) return;
        file.open(path);
        if (!file) throw ConfigError("cannot open output file: " + path);
        os = &file;
    }
    template <typename T>
    Output& operator<<(const T& v) {
        *os << v;
        return *this;
    }
};

void write_meta(Output& out, const RunConfig& c, const std::string& sub) {
    const std::uint64_t h = fnv1a64(c.canonical.dump());
    char hash[20];
    std::snprintf(hash, sizeof hash, "%016" PRIx64, h);
    out << "# ultradiff " << kVersion << "\n";
    out << "# subcommand=" << sub << "\n";
    out << "# config_hash=" << hash << "\n";
    out << "# seed=" << c.seed << "\n";
}

std::vector<double> log_grid(double t_min, double t_max, double step_log) {
    std::vector<double> ts;
    const double n = std::log(t_max / t_min) / step_log;
    const long count = static_cast<long>(std::floor(n + 1e-9));
    for (long i = 0; i <= count; ++i)
        ts.push_back(t_min * std::exp(step_log * static_cast<double>(i)));
    return ts;
}

std::vector<double> config_grid(const RunConfig& c) {
    return log_grid(c.t_min, c.t_max,
                    std::log(10.0) / static_cast<double>(c.points_per_decade));
}

std::size_t spectrum_count_for(const RunConfig&, const UltrametricHierarchy& h,
                               std::size_t need) {
    if (h.finite_space()) return std::min(need, h.max_level());
    if (h.is_tabulated()) {
        // the eigenvalue series at level i needs d_{i+1}, so the last
        // tabulated level has no certifiable eigenvalue
        if (h.max_level() < 2)
            throw ConfigError("scenario: tabulated hierarchy too short");
        return std::min(need, h.max_level() - 1);
    }
    return need;
}

// ───────────────────────────── subcommands ───────────────────────────────

int run_validate(const RunConfig& c, Output& out, std::size_t probe,
                 bool require_limit) {
    UltrametricHierarchy h = build_hierarchy(c);
    Kernel kernel(c.alpha);
    ConditionReport r = validate(h, kernel, probe);
    write_meta(out, c, "validate");
    out << "field,value\n";
    out << "probe_depth," << r.probe_depth << "\n";
    out << "finite_space," << (r.finite_space ? 1 : 0) << "\n";
    out << "undetermined," << (r.undetermined ? 1 : 0) << "\n";
    out << "restr_N_ok," << (r.restr_N_ok ? 1 : 0) << "\n";
    out << "restr_d_ok," << (r.restr_d_ok ? 1 : 0) << "\n";
    out << "sum_inv_N," << fmt(r.sum_inv_N) << "\n";
    out << "sum_exp_ad," << fmt(r.sum_exp_ad) << "\n";
    out << "bounded_N_ok," << (r.bounded_N_ok ? 1 : 0) << "\n";
    out << "bounded_d_ok," << (r.bounded_d_ok ? 1 : 0) << "\n";
    out << "A_lo," << fmt(r.A_lo) << "\n";
    out << "A_hi," << fmt(r.A_hi) << "\n";
    out << "B," << fmt(r.B) << "\n";
    out << "limit_N_ok," << (r.limit_N_ok ? 1 : 0) << "\n";
    out << "limit_d_ok," << (r.limit_d_ok ? 1 : 0) << "\n";
    out << "C_hat," << fmt(r.C_hat) << "\n";
    out << "D_hat," << fmt(r.D_hat) << "\n";
    out << "theta_hat," << fmt(r.theta_hat) << "\n";
    out << "xi_hat," << fmt(r.xi_hat) << "\n";
    if (!r.detail.empty()) out << "# " << r.detail << "\n";
    if (require_limit && !r.limit_ok()) {
        std::cerr << "validate: limit scenario not certified\n";
        return 1;
    }
    return 0;
}

int run_spectrum(const RunConfig& c, Output& out, std::size_t count) {
    UltrametricHierarchy h = build_hierarchy(c);
    Kernel kernel(c.alpha);
    Spectrum spec(h, kernel, spectrum_count_for(c, h, count), c.tol);
    write_meta(out, c, "spectrum");
    out << "i,lambda,tail_bound,c_i\n";
    for (std::size_t i = 1; i <= spec.size(); ++i)
        out << i << "," << fmt(spec.lambda(i)) << "," << fmt(spec.tail_bound(i))
            << "," << fmt(spec.c(i)) << "\n";
    return 0;
}

int run_solve(const RunConfig& c, Output& out) {
    UltrametricHierarchy h = build_hierarchy(c);
    Kernel kernel(c.alpha);
    const std::size_t theta_terms = static_cast<std::size_t>(
        std::ceil(-std::log(c.tol) / std::log(static_cast<double>(c.p)))) + 8;
    const std::size_t count =
        spectrum_count_for(c, h, std::max(c.spheres + 8, theta_terms));
    Spectrum spec(h, kernel, count, c.tol);
    const std::size_t K =
        spec.finite_space() ? std::min(c.spheres, spec.size())
                            : std::min(c.spheres, spec.size() - 1);
    write_meta(out, c, "solve");
    out << "t,k,f_point,f_sphere_mass,terms_used,residual_bound\n";
    for (double t : config_grid(c)) {
        SphereProfile p = solve_point_source(spec, t, K, c.tol);
        for (std::size_t k = 0; k <= K; ++k)
            out << fmt(t) << "," << k << "," << fmt(p.values[k]) << ","
                << fmt(h.M(k) * p.values[k]) << "," << p.terms_used << ","
                << fmt(p.residual_bound) << "\n";
    }
    return 0;
}

int run_sink(const RunConfig& c, Output& out) {
    if (!(c.sink_rate > 0.0))
        throw ConfigError("sink: sink_rate must be > 0 for this subcommand");
    UltrametricHierarchy h = build_hierarchy(c);
    Kernel kernel(c.alpha);
    const std::size_t count = spectrum_count_for(c, h, c.poles + 16);
    Spectrum spec(h, kernel, count, c.tol);
    const std::size_t n_poles =
        spec.finite_space() ? std::min(c.poles, spec.size() + 1) : c.poles;
    SinkSpectrum ss = make_sink_spectrum(spec, c.sink_rate, n_poles);
    std::vector<DeltaEntry> ds = delta_sequence(spec, ss);

    write_meta(out, c, "sink");
    out << "i,lambda_i,nu_i,delta_i,b_i,residual\n";
    for (std::size_t i = 1; i <= ss.size(); ++i) {
        const bool paired = i <= ss.lambda_pole_count;
        out << i << "," << fmt(paired ? spec.lambda(i) : 0.0) << ","
            << fmt(ss.nu[i - 1]) << ","
            << (paired ? fmt(ds[i - 1].delta) : std::string("nan")) << ","
            << fmt(ss.b[i - 1]) << "," << fmt(ss.g_residual[i - 1]) << "\n";
    }
    out << "\n";
    out << "t,S_polesum,S_talbot,abs_diff\n";
    for (double t : config_grid(c)) {
        const double sp = survival(ss, t).value;
        const double st = talbot_invert(
            [&](std::complex<double> s) {
                return survival_transform(ss.modes, c.sink_rate, s);
            },
            t);
        out << fmt(t) << "," << fmt(sp) << "," << fmt(st) << ","
            << fmt(std::abs(sp - st)) << "\n";
    }
    return 0;
}

int run_asym(const RunConfig& c, Output& out, int theorem, double a_param,
             double b_param) {
    UltrametricHierarchy h = build_hierarchy(c);
    Kernel kernel(c.alpha);

    AsymptoticModel model;
    std::function<double(double)> brute;  // y(t)

    if (theorem == 2) {
        model = theorem2_model(a_param, b_param);
        brute = [a_param, b_param](double t) {
            return brute_series(
                [a_param](std::size_t n) {
                    return std::pow(a_param, -static_cast<double>(n));
                },
                [b_param](std::size_t n) {
                    return std::pow(b_param, -static_cast<double>(n));
                },
                t);
        };
    } else if (theorem == 3 || theorem == 4) {
        if (!h.asym().present())
            throw ConfigError("asym: scenario carries no asymptotic record "
                              "(theorems 3/4 need theta and xi)");
        const std::size_t count = spectrum_count_for(c, h, 80);
        auto spec = std::make_shared<Spectrum>(h, kernel, count, c.tol);
        if (theorem == 3) {
            model = theorem3_model(h.asym(), c.alpha);
            brute = [spec](double t) {
                return brute_series(
                    [spec](std::size_t n) {
                        return n <= spec->size() ? spec->c2(n) : 0.0;
                    },
                    [spec](std::size_t n) {
                        return spec->lambda(std::min(n, spec->size()));
                    },
                    t);
            };
        } else {
            model = theorem4_model(h.asym(), c.alpha, c.sink_rate);  // may throw
            const std::size_t n_poles =
                spec->finite_space() ? std::min<std::size_t>(40, spec->size() + 1)
                                     : std::min<std::size_t>(40, count - 16);
            auto ss = std::make_shared<SinkSpectrum>(
                make_sink_spectrum(*spec, c.sink_rate, n_poles));
            brute = [ss](double t) { return survival(*ss, t).value; };
        }
    } else {
        throw ConfigError("asym: --theorem must be 2, 3, or 4");
    }

    // log-equidistant grid commensurate with the model period; 16 samples per
    // period keeps every fitted harmonic strictly below the grid Nyquist rate
    const double step = model.log_period / 16.0;
    const std::vector<double> ts = log_grid(1e3, 1e8, step);
    std::vector<double> ys(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) ys[i] = brute(ts[i]);
    const FitResult fit = fit_power_exponent(ts, ys, model.log_period);

    write_meta(out, c, "asym");
    out << "# theorem=" << theorem << " beta_model=" << fmt(model.beta)
        << " beta_hat=" << fmt(fit.exponent) << " stderr=" << fmt(fit.stderr_)
        << "\n";
    out << "t,y,beta_hat,u=y*t^beta,modulation_formula,ratio\n";
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double u = ys[i] * std::pow(ts[i], model.beta);
        const double mf = model.modulation(ts[i]);
        out << fmt(ts[i]) << "," << fmt(ys[i]) << "," << fmt(fit.exponent) << ","
            << fmt(u) << "," << fmt(mf) << "," << fmt(u / mf) << "\n";
    }
    return 0;
}

int run_oracle_check(const RunConfig& c, Output& out, std::size_t depth,
                     bool with_sink, double check_tol) {
    FiniteTree tree = build_tree(c, depth);
    Kernel kernel(c.alpha);
    UltrametricHierarchy h = tree.induced_hierarchy();
    Spectrum spec(h, kernel, tree.levels(), c.tol);
    const double k_rate = with_sink ? c.sink_rate : 0.0;
    RateMatrix rm = build_rate_matrix(tree, kernel, k_rate);
    Eigen::VectorXd f0 = Eigen::VectorXd::Zero(rm.n);
    f0(static_cast<Eigen::Index>(tree.center())) = 1.0;

    write_meta(out, c, "oracle-check");
    out << "t,k,analytic,oracle,abs_diff\n";
    double worst = 0.0;
    if (!with_sink) {
        for (double t : config_grid(c)) {
            const Eigen::VectorXd f = evolve(rm, f0, t);
            const std::vector<double> mean = project_sphere_mean(tree, f);
            SphereProfile p = solve_point_source(spec, t, tree.levels(), c.tol);
            for (std::size_t k = 0; k <= tree.levels(); ++k) {
                const double diff = std::abs(p.values[k] - mean[k]);
                worst = std::max(worst, diff);
                out << fmt(t) << "," << k << "," << fmt(p.values[k]) << ","
                    << fmt(mean[k]) << "," << fmt(diff) << "\n";
            }
        }
    } else {
        // survival (row k = -1) and center value (row k = 0) under the sink
        SinkSpectrum ss = make_sink_spectrum(spec, k_rate, spec.size() + 1);
        for (double t : config_grid(c)) {
            const Eigen::VectorXd f = evolve(rm, f0, t);
            const double s_oracle = f.sum();
            const double s_analytic = survival(ss, t).value;
            const double f0_oracle = f(static_cast<Eigen::Index>(tree.center()));
            const double f0_analytic = center_value(ss, t).value;
            const double d1 = std::abs(s_analytic - s_oracle);
            const double d2 = std::abs(f0_analytic - f0_oracle);
            worst = std::max(worst, std::max(d1, d2));
            out << fmt(t) << ",-1," << fmt(s_analytic) << "," << fmt(s_oracle)
                << "," << fmt(d1) << "\n";
            out << fmt(t) << ",0," << fmt(f0_analytic) << "," << fmt(f0_oracle)
                << "," << fmt(d2) << "\n";
        }
    }
    out << "# max_abs_diff=" << fmt(worst) << " tol=" << fmt(check_tol) << "\n";
    if (worst > check_tol) {
        std::cerr << "oracle-check: max |analytic - oracle| = " << fmt(worst)
                  << " exceeds " << fmt(check_tol) << "\n";
        return 1;
    }
    return 0;
}

int run_mc(const RunConfig& c, Output& out, bool with_sink) {
    FiniteTree tree = build_tree(c, c.depth);
    Kernel kernel(c.alpha);
    const double k_rate = with_sink ? c.sink_rate : 0.0;
    const std::vector<double> ts = config_grid(c);
    GillespieResult g =
        gillespie(tree, kernel, k_rate, c.walkers, ts, c.seed);
    RateMatrix rq = reduce_spherical(tree, kernel, k_rate);

    write_meta(out, c, "mc");
    out << "# walkers=" << c.walkers << "\n";
    out << "t,k,empirical,analytic,stderr,z\n";
    const double W = static_cast<double>(c.walkers);
    for (std::size_t s = 0; s < ts.size(); ++s) {
        Eigen::VectorXd m0 = Eigen::VectorXd::Zero(rq.n);
        m0(0) = 1.0;
        const Eigen::VectorXd m = evolve(rq, m0, ts[s]);
        double alive_mass = 0.0;
        for (Eigen::Index i = 0; i < m.size(); ++i) alive_mass += m(i);
        for (std::size_t k = 0; k <= tree.levels(); ++k) {
            const double emp =
                static_cast<double>(g.sphere_counts[s][k]) / W;
            const double ana = m(static_cast<Eigen::Index>(k));
            const double se = std::sqrt(std::max(ana * (1.0 - ana), 0.0) / W);
            const double z = se > 0.0 ? (emp - ana) / se : 0.0;
            out << fmt(ts[s]) << "," << k << "," << fmt(emp) << "," << fmt(ana)
                << "," << fmt(se) << "," << fmt(z) << "\n";
        }
        if (with_sink) {
            const double emp = static_cast<double>(g.absorbed[s]) / W;
            const double ana = 1.0 - alive_mass;
            const double se = std::sqrt(std::max(ana * (1.0 - ana), 0.0) / W);
            const double z = se > 0.0 ? (emp - ana) / se : 0.0;
            out << fmt(ts[s]) << ",-1," << fmt(emp) << "," << fmt(ana) << ","
                << fmt(se) << "," << fmt(z) << "\n";
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact spectral solvers for hierarchical diffusion"};
    app.require_subcommand(1);

    std::string config_path, out_path;
    std::optional<std::uint64_t> seed_flag;
    std::optional<double> tol_flag;
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--out", out_path, "output CSV path (default stdout)");
    app.add_option("--seed", seed_flag, "override RNG seed");
    app.add_option("--tol", tol_flag, "override tolerance");

    auto* sub_validate = app.add_subcommand("validate", "certify regularity");
    sub_validate->fallthrough();
    std::size_t probe = 32;
    bool require_limit = false;
    sub_validate->add_option("--probe-depth", probe, "levels to probe");
    sub_validate->add_flag("--require-limit", require_limit,
                           "exit 1 unless the limit scenario is certified");

    auto* sub_spectrum = app.add_subcommand("spectrum", "eigenvalue table");
    sub_spectrum->fallthrough();
    std::optional<std::size_t> count_flag;
    sub_spectrum->add_option("--count", count_flag, "number of eigenvalues");

    auto* sub_solve = app.add_subcommand("solve", "sphere profiles");
    sub_solve->fallthrough();
    std::optional<std::size_t> spheres_flag;
    sub_solve->add_option("--spheres", spheres_flag, "largest sphere index");

    auto* sub_sink = app.add_subcommand("sink", "decay poles and survival");
    sub_sink->fallthrough();
    std::optional<std::size_t> poles_flag;
    sub_sink->add_option("--poles", poles_flag, "number of poles");

    auto* sub_asym = app.add_subcommand("asym", "asymptotic law vs brute series");
    sub_asym->fallthrough();
    int theorem = 3;
    double a_param = 2.0, b_param = 4.0;
    sub_asym->add_option("--theorem", theorem, "which law: 2, 3, or 4");
    sub_asym->add_option("--a", a_param, "coefficient ratio (theorem 2)");
    sub_asym->add_option("--b", b_param, "rate ratio (theorem 2)");

    auto* sub_oracle = app.add_subcommand("oracle-check",
                                          "spectral vs dense matrix exponential");
    sub_oracle->fallthrough();
    std::optional<std::size_t> depth_flag;
    bool with_sink = false;
    sub_oracle->add_option("--depth", depth_flag, "tree depth");
    sub_oracle->add_flag("--with-sink", with_sink, "compare the sink dynamics");

    auto* sub_mc = app.add_subcommand("mc", "Monte Carlo vs reduced generator");
    sub_mc->fallthrough();
    std::optional<std::size_t> walkers_flag;
    bool mc_sink = false;
    sub_mc->add_option("--walkers", walkers_flag, "walker count");
    sub_mc->add_flag("--with-sink", mc_sink, "simulate the sink");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        json cfg_json = json::object();
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw ConfigError("cannot read config: " + config_path);
            try {
                in >> cfg_json;
            } catch (const json::exception& e) {
                throw ConfigError(std::string("config parse error: ") + e.what());
            }
        }
        RunConfig cfg = parse_config(cfg_json);
        if (seed_flag) cfg.seed = *seed_flag;
        if (tol_flag) cfg.tol = *tol_flag;
        if (count_flag) cfg.count = *count_flag;
        if (spheres_flag) cfg.spheres = *spheres_flag;
        if (poles_flag) cfg.poles = *poles_flag;
        if (depth_flag) cfg.depth = *depth_flag;
        if (walkers_flag) cfg.walkers = *walkers_flag;
        fill_canonical(cfg);

        Output out;
        out.open(out_path);

        if (sub_validate->parsed())
            return run_validate(cfg, out, probe, require_limit);
        if (sub_spectrum->parsed()) return run_spectrum(cfg, out, cfg.count);
        if (sub_solve->parsed()) return run_solve(cfg, out);
        if (sub_sink->parsed()) return run_sink(cfg, out);
        if (sub_asym->parsed())
            return run_asym(cfg, out, theorem, a_param, b_param);
        if (sub_oracle->parsed())
            return run_oracle_check(cfg, out, cfg.depth, with_sink,
                                    tol_flag ? *tol_flag : 1e-8);
        if (sub_mc->parsed()) return run_mc(cfg, out, mc_sink);
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "check failed: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 1;
    }
}
