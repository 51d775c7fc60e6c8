#include "rwrs/cli.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "rwrs/mc.hpp"
#include "rwrs/spectral.hpp"
#include "rwrs/varsolve.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rwrs::cli {

namespace {

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
    }
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const std::exception&) {
        throw ConfigError("bad value for '" + key + "'");
    }
}

template <typename T>
T get_req(const json& j, const std::string& key) {
    if (!j.contains(key)) throw ConfigError("missing required key '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const std::exception&) {
        throw ConfigError("bad value for '" + key + "'");
    }
}

StepKernel kernel_from(const json& j) {
    if (j.is_string()) return kernel_by_name(j.get<std::string>());
    check_keys(j, "kernel", {"name", "d", "support"});
    if (j.contains("name")) return kernel_by_name(j.at("name").get<std::string>());
    const int d = get_req<int>(j, "d");
    std::vector<std::pair<Site, double>> support;
    if (!j.contains("support") || !j.at("support").is_array())
        throw ConfigError("kernel: 'support' array required");
    for (const auto& e : j.at("support")) {
        check_keys(e, "kernel.support", {"offset", "prob"});
        auto off = get_req<std::vector<int>>(e, "offset");
        if (static_cast<int>(off.size()) != d) throw ConfigError("kernel.support: offset size != d");
        Site s = origin_site();
        for (int i = 0; i < d; ++i) s[i] = off[static_cast<std::size_t>(i)];
        support.push_back({s, get_req<double>(e, "prob")});
    }
    try {
        return StepKernel::from_support(d, support);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("kernel: ") + e.what());
    }
}

SceneryModel scenery_from(const json& j) {
    check_keys(j, "scenery", {"family", "sigma", "D", "q", "a", "b", "seed"});
    const std::string fam = get_req<std::string>(j, "family");
    try {
        if (fam == "gaussian") return SceneryModel::gaussian(get_or<double>(j, "sigma", 1.0));
        if (fam == "weibull_tail")
            return SceneryModel::weibull(get_req<double>(j, "D"), get_req<double>(j, "q"));
        if (fam == "bounded_uniform")
            return SceneryModel::uniform(get_req<double>(j, "a"), get_req<double>(j, "b"));
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("scenery: ") + e.what());
    }
    throw ConfigError("scenery: unknown family '" + fam + "'");
}

BC bc_from(const std::string& s) {
    if (s == "dirichlet") return BC::dirichlet;
    if (s == "periodic") return BC::periodic;
    throw ConfigError("bc must be 'dirichlet' or 'periodic'");
}

RateProblem rate_problem_from(const json& j) {
    check_keys(j, "solve", {"mode", "d", "Gamma", "D", "q", "u", "scenery", "R", "m", "bc",
                            "delta", "restarts", "max_iters", "tol", "seed"});
    RateProblem p;
    const std::string mode = get_req<std::string>(j, "mode");
    if (mode == "chi")
        p.mode = RateProblem::Mode::chi;
    else if (mode == "K_Dq")
        p.mode = RateProblem::Mode::K_Dq;
    else if (mode == "K_H")
        p.mode = RateProblem::Mode::K_H;
    else
        throw ConfigError("solve.mode must be chi | K_Dq | K_H");
    p.d = get_or<int>(j, "d", 1);
    if (j.contains("Gamma")) {
        const auto rows = j.at("Gamma").get<std::vector<std::vector<double>>>();
        p.Gamma = Eigen::MatrixXd(p.d, p.d);
        if (static_cast<int>(rows.size()) != p.d) throw ConfigError("Gamma: wrong shape");
        for (int i = 0; i < p.d; ++i) {
            if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != p.d)
                throw ConfigError("Gamma: wrong shape");
            for (int k = 0; k < p.d; ++k)
                p.Gamma(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
        }
    }
    p.D = get_or<double>(j, "D", 0.5);
    p.q = get_or<double>(j, "q", 2.0);
    p.u = get_or<double>(j, "u", 1.0);
    if (j.contains("scenery")) {
        p.scenery = scenery_from(j.at("scenery"));
        p.has_scenery = true;
        p.H_power = false;
    }
    p.R = get_or<double>(j, "R", 8.0);
    p.m = get_or<int>(j, "m", 512);
    p.bc = bc_from(get_or<std::string>(j, "bc", "dirichlet"));
    p.delta = get_or<double>(j, "delta", 0.0);
    p.opt.restarts = get_or<int>(j, "restarts", 5);
    p.opt.max_iters = get_or<int>(j, "max_iters", 20000);
    p.opt.tol = get_or<double>(j, "tol", 1e-9);
    p.opt.seed = get_or<uint64_t>(j, "seed", 1);
    return p;
}

std::string timestamp_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[64];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open output file " + path);
    out << j.dump(2) << "\n";
    if (!out) throw IoError("failed writing " + path);
}

json result_shell(const json& config) {
    json out;
    out["config"] = config;
    out["seed"] = config.contains("seed") ? config.at("seed") : json(1);
    out["generated_at"] = timestamp_now();
    return out;
}

// ---- commands ------------------------------------------------------------

int cmd_simulate(const json& cfg) {
    const StepKernel k = kernel_from(cfg.at("kernel"));
    const int64_t n = get_req<int64_t>(cfg, "n");
    const int64_t reps = get_or<int64_t>(cfg, "replicates", 1);
    const uint64_t seed = get_or<uint64_t>(cfg, "seed", 1);
    const bool with_scenery = cfg.contains("scenery");
    SceneryModel m = with_scenery ? scenery_from(cfg.at("scenery")) : SceneryModel::gaussian(1.0);

    std::vector<std::string> header{"seed", "replicate", "n", "lambda", "range"};
    if (with_scenery) header.push_back("z");
    std::vector<std::vector<std::string>> rows;
    for (int64_t r = 0; r < reps; ++r) {
        CounterRng rng(stream_key(seed, kStreamWalk, static_cast<uint64_t>(r)));
        LocalTimeField f;
        walk_local_times(k, n, rng, f);
        std::vector<std::string> row{std::to_string(seed), std::to_string(r), std::to_string(n),
                                     std::to_string(f.lambda), std::to_string(f.range())};
        if (with_scenery) {
            const uint64_t scen = stream_key(seed, kStreamScenery, static_cast<uint64_t>(r));
            double z = 0.0;
            f.counts.for_each([&](uint64_t key, int64_t c) {
                z += static_cast<double>(c) * m.sample(scen, key);
            });
            row.push_back(format_double(z));
        }
        rows.push_back(std::move(row));
    }
    write_csv(get_req<std::string>(cfg, "csv"), header, rows);
    if (cfg.contains("output")) {
        json out = result_shell(cfg);
        out["results"] = {{"replicates", reps}, {"n", n}};
        write_json_file(cfg.at("output").get<std::string>(), out);
    }
    return 0;
}

int cmd_tail(const json& cfg) {
    const StepKernel k = kernel_from(cfg.at("kernel"));
    const SceneryModel m = scenery_from(cfg.at("scenery"));
    const int64_t n = get_req<int64_t>(cfg, "n");
    const int64_t reps = get_or<int64_t>(cfg, "replicates", 10000);
    const uint64_t seed = get_or<uint64_t>(cfg, "seed", 1);
    const std::string method = get_req<std::string>(cfg, "method");

    bool smalldev = false;
    double theta = 0.0;
    const double b = resolve_b(cfg.at("b"), static_cast<double>(n), &smalldev, &theta);

    TailEstimate e;
    if (method == "naive") {
        e = tail_naive(k, m, n, b, reps, seed);
    } else if (method == "cond-gaussian") {
        if (!m.is_centered_gaussian()) throw ConfigError("cond-gaussian requires gaussian scenery");
        e = tail_cond_gaussian(k, m.sigma, n, b, reps, seed);
    } else if (method == "exact-enum") {
        const double p = exact_enum(k, m, n, b);
        e.method = "exact-enum";
        e.n = static_cast<double>(n);
        e.b = b;
        e.estimate = p;
        e.log_estimate = std::log(p);
        e.replicates = 0;
    } else {
        throw ConfigError("tail.method must be naive | cond-gaussian | exact-enum");
    }
    if (smalldev) {
        const ScaleRegime reg = ScaleRegime::small_dev(k.d, theta);
        e.rate_normalized = reg.rate_normalized(e.log_estimate, static_cast<double>(n));
        e.prediction = -kPi / 4.0;
    }
    json out = result_shell(cfg);
    out["results"] = {{"method", e.method},
                      {"n", e.n},
                      {"b", e.b},
                      {"estimate", e.estimate},
                      {"log_estimate", e.log_estimate},
                      {"stderr", e.stderr_est},
                      {"rate_normalized", e.rate_normalized},
                      {"prediction", e.prediction},
                      {"scenery_closed_form_H", m.closed_form_H()}};
    write_json_file(get_req<std::string>(cfg, "output"), out);
    return 0;
}

int cmd_rate_table(const json& cfg) {
    const StepKernel k = kernel_from(cfg.at("kernel"));
    const SceneryModel m = scenery_from(cfg.at("scenery"));
    const auto n_list = get_req<std::vector<int64_t>>(cfg, "n_list");
    const int64_t reps = get_or<int64_t>(cfg, "replicates", 10000);
    const uint64_t seed = get_or<uint64_t>(cfg, "seed", 1);

    const json& rj = cfg.at("regime");
    check_keys(rj, "regime", {"case", "theta", "q"});
    const std::string rcase = get_req<std::string>(rj, "case");
    ScaleRegime reg = ScaleRegime::large(k.d);
    if (rcase == "V")
        reg = ScaleRegime::very_large(k.d, get_req<double>(rj, "theta"), get_req<double>(rj, "q"));
    else if (rcase == "small-dev")
        reg = ScaleRegime::small_dev(k.d, get_req<double>(rj, "theta"));
    else if (rcase != "L")
        throw ConfigError("regime.case must be V | L | small-dev");

    double prediction = std::numeric_limits<double>::quiet_NaN();
    bool converged = true;
    if (reg.c == ScaleRegime::Case::SmallDev) {
        prediction = -kPi / 4.0;
    } else if (cfg.contains("prediction_value")) {
        prediction = cfg.at("prediction_value").get<double>();
    } else if (cfg.contains("solve")) {
        RateProblem p = rate_problem_from(cfg.at("solve"));
        p.d = k.d;
        if (!p.Gamma.size()) p.Gamma = k.gamma;
        VarResult r = (reg.c == ScaleRegime::Case::V) ? solve_K_Dq(p) : solve_K_H(p);
        prediction = -r.value;
        converged = r.converged;
    }

    const std::string method_s = get_or<std::string>(cfg, "method", "naive");
    const TailMethod method =
        method_s == "cond-gaussian" ? TailMethod::cond_gaussian : TailMethod::naive;
    auto rows = rate_table(reg, method, k, m, n_list, reps, seed, prediction);

    std::vector<std::vector<std::string>> csv;
    for (const auto& r : rows)
        csv.push_back({format_double(r.n), format_double(r.rate_normalized),
                       format_double(r.prediction), format_double(r.stderr_norm)});
    write_csv(get_req<std::string>(cfg, "csv"), {"n", "rate_normalized", "prediction", "stderr"}, csv);

    if (cfg.contains("output")) {
        json out = result_shell(cfg);
        json arr = json::array();
        for (const auto& r : rows)
            arr.push_back({{"n", r.n},
                           {"rate_normalized", r.rate_normalized},
                           {"prediction", r.prediction},
                           {"stderr", r.stderr_norm}});
        out["results"] = arr;
        write_json_file(cfg.at("output").get<std::string>(), out);
    }
    return converged ? 0 : 3;
}

int cmd_solve(const json& cfg) {
    RateProblem p = rate_problem_from(cfg.at("solve"));
    VarResult r;
    std::string mode;
    switch (p.mode) {
        case RateProblem::Mode::chi:
            r = solve_chi(p);
            mode = "chi";
            break;
        case RateProblem::Mode::K_Dq:
            r = solve_K_Dq(p);
            mode = "K_Dq";
            break;
        case RateProblem::Mode::K_H:
            r = solve_K_H(p);
            mode = "K_H";
            break;
    }
    json out = result_shell(cfg);
    out["results"] = {{"mode", mode},
                      {"value", r.value},
                      {"converged", r.converged},
                      {"flagged_infinite", r.flagged_infinite},
                      {"grid", {{"R", p.R}, {"m", p.m}, {"delta", p.delta},
                                {"bc", p.bc == BC::dirichlet ? "dirichlet" : "periodic"}}},
                      {"gamma_star", r.gamma_star},
                      {"route_a", r.route_a},
                      {"route_b", r.route_b},
                      {"route_gap", r.route_gap},
                      {"kappa", r.kappa},
                      {"iterations", r.iters}};
    write_json_file(get_req<std::string>(cfg, "output"), out);
    if (cfg.contains("minimizer_csv")) {
        std::vector<std::vector<std::string>> rows;
        int c[3];
        for (std::size_t i = 0; i < r.minimizer.v.size(); ++i) {
            r.minimizer.cell_of(i, c);
            std::vector<std::string> row;
            for (int k = 0; k < r.minimizer.d; ++k)
                row.push_back(format_double(r.minimizer.coord(c[k])));
            row.push_back(format_double(r.minimizer.v[i]));
            rows.push_back(std::move(row));
        }
        std::vector<std::string> header;
        for (int k = 0; k < r.minimizer.d; ++k) header.push_back("x" + std::to_string(k));
        header.push_back("psi");
        write_csv(cfg.at("minimizer_csv").get<std::string>(), header, rows);
    }
    return (r.converged && !r.flagged_infinite) ? 0 : 3;
}

int cmd_spectral_check(const json& cfg) {
    const StepKernel k = kernel_from(cfg.at("kernel"));
    const double R = get_req<double>(cfg, "R");
    const auto alphas = get_req<std::vector<double>>(cfg, "alpha_list");
    const auto T_list = get_req<std::vector<int64_t>>(cfg, "T_list");
    const int m = get_or<int>(cfg, "m", 512);
    const BC bc = bc_from(get_or<std::string>(cfg, "bc", "dirichlet"));

    const json& fj = cfg.at("f");
    check_keys(fj, "f", {"type", "c"});
    const std::string ftype = get_req<std::string>(fj, "type");
    const double c = get_or<double>(fj, "c", 1.0);
    std::function<double(const double*)> f;
    if (ftype == "const") {
        f = [c](const double*) { return c; };
    } else if (ftype == "cos") {
        f = [c, R, k](const double* x) {
            double v = c;
            for (int i = 0; i < k.d; ++i) v *= std::cos(0.5 * kPi * x[i] / R);
            return v;
        };
    } else {
        throw ConfigError("f.type must be const | cos");
    }

    GridFunction fg = GridFunction::zeros(k.d, R, m, bc);
    fg.fill(f);
    EigResult eig = principal_eigenvalue_continuum(fg, k.gamma);

    std::vector<std::vector<std::string>> rows;
    for (double alpha : alphas) {
        TransferMatrix tm = make_transfer(k, f, R, alpha, bc);
        TransferSpectrum sp = transfer_spectrum(tm);
        for (int64_t T : T_list) {
            const int64_t n = T * static_cast<int64_t>(std::llround(alpha * alpha));
            const double v = transfer_cumulant(sp, n);
            rows.push_back({format_double(alpha), std::to_string(n), format_double(v),
                            format_double(sp.lattice_limit), format_double(eig.lambda)});
        }
    }
    write_csv(get_req<std::string>(cfg, "csv"),
              {"alpha", "n", "value", "lattice_eig", "continuum_eig"}, rows);
    if (cfg.contains("output")) {
        json out = result_shell(cfg);
        out["results"] = {{"continuum_eig", eig.lambda}, {"converged", eig.converged}};
        write_json_file(cfg.at("output").get<std::string>(), out);
    }
    return eig.converged ? 0 : 3;
}

int cmd_trial_sequence(const json& cfg) {
    const int d = get_req<int>(cfg, "d");
    const double p = get_req<double>(cfg, "p");
    const auto n_list = get_req<std::vector<double>>(cfg, "n_list");
    std::vector<std::vector<std::string>> rows;
    json arr = json::array();
    for (double n : n_list) {
        TrialSequence t = trial_sequence_chi_zero(d, p, n);
        rows.push_back({format_double(n), format_double(t.l2sq), format_double(t.l2psq),
                        format_double(t.half_gradsq), format_double(t.l2sq_closed),
                        format_double(t.l2psq_closed), format_double(t.half_gradsq_closed)});
        arr.push_back({{"n", n},
                       {"l2sq", t.l2sq},
                       {"l2psq", t.l2psq},
                       {"half_gradsq", t.half_gradsq},
                       {"l2sq_closed", t.l2sq_closed},
                       {"l2psq_closed", t.l2psq_closed},
                       {"half_gradsq_closed", t.half_gradsq_closed},
                       {"l2sq_limit", t.l2sq_limit},
                       {"l2psq_limit", t.l2psq_limit}});
    }
    write_csv(get_req<std::string>(cfg, "csv"),
              {"n", "l2sq", "l2psq", "half_gradsq", "l2sq_closed", "l2psq_closed",
               "half_gradsq_closed"},
              rows);
    if (cfg.contains("output")) {
        json out = result_shell(cfg);
        out["results"] = arr;
        write_json_file(cfg.at("output").get<std::string>(), out);
    }
    return 0;
}

int cmd_box_study(const json& cfg) {
    RateProblem base = rate_problem_from(cfg.at("solve"));
    const auto R_list = get_req<std::vector<double>>(cfg, "R_list");
    const auto delta_list = get_req<std::vector<double>>(cfg, "delta_list");
    auto rows = box_convergence_study(base, R_list, delta_list);
    std::vector<std::vector<std::string>> csv;
    bool all_converged = true;
    for (const auto& r : rows) {
        csv.push_back({format_double(r.R), format_double(r.delta), std::string(1, r.bc),
                       format_double(r.value)});
        all_converged = all_converged && r.converged;
    }
    write_csv(get_req<std::string>(cfg, "csv"), {"R", "delta", "bc", "value"}, csv);
    if (cfg.contains("output")) {
        json out = result_shell(cfg);
        json arr = json::array();
        for (const auto& r : rows)
            arr.push_back({{"R", r.R},
                           {"delta", r.delta},
                           {"bc", std::string(1, r.bc)},
                           {"value", r.value},
                           {"converged", r.converged}});
        out["results"] = arr;
        write_json_file(cfg.at("output").get<std::string>(), out);
    }
    return all_converged ? 0 : 3;
}

const std::set<std::string> kCommonKeys = {"command", "seed", "workers", "output", "csv"};

void validate_command(const json& cfg) {
    const std::string cmd = get_req<std::string>(cfg, "command");
    std::set<std::string> keys = kCommonKeys;
    if (cmd == "simulate") {
        keys.insert({"kernel", "n", "replicates", "scenery"});
    } else if (cmd == "tail") {
        keys.insert({"kernel", "scenery", "n", "b", "method", "replicates"});
    } else if (cmd == "rate-table") {
        keys.insert({"kernel", "scenery", "regime", "method", "n_list", "replicates",
                     "prediction_value", "solve"});
    } else if (cmd == "solve") {
        keys.insert({"solve", "minimizer_csv"});
    } else if (cmd == "spectral-check") {
        keys.insert({"kernel", "R", "alpha_list", "T_list", "m", "bc", "f"});
    } else if (cmd == "trial-sequence") {
        keys.insert({"d", "p", "n_list"});
    } else if (cmd == "box-study") {
        keys.insert({"solve", "R_list", "delta_list"});
    } else {
        throw ConfigError("unknown command '" + cmd + "'");
    }
    check_keys(cfg, "config", keys);
}

}  // namespace

double resolve_b(const json& bspec, double n, bool* smalldev, double* theta) {
    if (smalldev) *smalldev = false;
    if (bspec.is_number()) return bspec.get<double>();
    if (bspec.is_string()) {
        const std::string s = bspec.get<std::string>();
        const std::string prefix = "auto-smalldev:";
        if (s.rfind(prefix, 0) == 0) {
            double th;
            try {
                th = std::stod(s.substr(prefix.size()));
            } catch (const std::exception&) {
                throw ConfigError("bad auto-smalldev theta");
            }
            if (!(th > 0.5 && th < 1.0)) throw ConfigError("auto-smalldev theta outside (1/2, 1)");
            if (smalldev) *smalldev = true;
            if (theta) *theta = th;
            return std::pow(std::log(n), th) / std::sqrt(n);
        }
    }
    throw ConfigError("b must be a number or 'auto-smalldev:theta'");
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open output file " + path);
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
    }
    if (!out) throw IoError("failed writing " + path);
}

std::vector<std::vector<std::string>> read_csv(const std::string& path,
                                               std::vector<std::string>* header) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (first && header) {
            *header = cells;
        } else {
            rows.push_back(cells);
        }
        first = false;
    }
    return rows;
}

void validate(const json& config) { validate_command(config); }

int run(const json& config) {
    validate_command(config);
    const int workers = get_or<int>(config, "workers", 0);
#ifdef _OPENMP
    if (workers > 0) omp_set_num_threads(workers);
#endif
    const std::string cmd = config.at("command").get<std::string>();
    if (cmd == "simulate") return cmd_simulate(config);
    if (cmd == "tail") return cmd_tail(config);
    if (cmd == "rate-table") return cmd_rate_table(config);
    if (cmd == "solve") return cmd_solve(config);
    if (cmd == "spectral-check") return cmd_spectral_check(config);
    if (cmd == "trial-sequence") return cmd_trial_sequence(config);
    if (cmd == "box-study") return cmd_box_study(config);
    throw ConfigError("unknown command");
}

}  // namespace rwrs::cli
