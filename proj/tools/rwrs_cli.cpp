// Command-line front end: builds a config (file + flag overrides) and runs it.
//
// Exit codes: 0 ok, 2 invalid config, 3 flagged non-convergence, 4 I/O error.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "rwrs/cli.hpp"

using rwrs::cli::json;

namespace {

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw rwrs::cli::ConfigError("cannot read config file " + path);
    try {
        return json::parse(in);
    } catch (const std::exception& e) {
        throw rwrs::cli::ConfigError(std::string("config parse error: ") + e.what());
    }
}

struct FlagSet {
    CLI::App* app;
    json values;

    void number(const std::string& name, const std::string& key) {
        auto stash = std::make_shared<double>();
        app->add_option_function<double>(
            name, [this, key, stash](double v) { values[key] = v; });
    }
    void integer(const std::string& name, const std::string& key) {
        app->add_option_function<int64_t>(
            name, [this, key](int64_t v) { values[key] = v; });
    }
    void text(const std::string& name, const std::string& key) {
        app->add_option_function<std::string>(
            name, [this, key](const std::string& v) { values[key] = v; });
    }
};

void merge_into(json& dst, const json& src) {
    for (auto it = src.begin(); it != src.end(); ++it) dst[it.key()] = *it;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"random-walk-in-random-scenery laboratory"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may appear after the subcommand

    std::string config_path;
    app.add_option("--config", config_path, "experiment config file (JSON)");

    struct Sub {
        std::string command;
        FlagSet flags;
        json kernel_overrides;
        json scenery_overrides;
        json solve_overrides;
        json regime_overrides;
        json f_overrides;
    };
    std::vector<std::shared_ptr<Sub>> subs;

    auto add_common = [&](Sub& s) {
        s.flags.integer("--seed", "seed");
        s.flags.integer("--workers", "workers");
        s.flags.text("--output", "output");
        s.flags.text("--csv", "csv");
    };
    auto add_kernel = [&](Sub& s) {
        s.flags.app->add_option_function<int>("--d", [&s](int d) {
            s.kernel_overrides["name"] = "srw-" + std::to_string(d) + "d";
        });
        s.flags.app->add_option_function<std::string>(
            "--kernel", [&s](const std::string& v) { s.kernel_overrides["name"] = v; });
    };
    auto add_scenery = [&](Sub& s) {
        auto opt = [&s](const std::string& flag, const std::string& key) {
            s.flags.app->add_option_function<double>(
                flag, [&s, key](double v) { s.scenery_overrides[key] = v; });
        };
        s.flags.app->add_option_function<std::string>(
            "--scenery-family",
            [&s](const std::string& v) { s.scenery_overrides["family"] = v; });
        opt("--sigma", "sigma");
        opt("--scenery-D", "D");
        opt("--scenery-q", "q");
        opt("--scenery-a", "a");
        opt("--scenery-b", "b");
    };

    auto make_sub = [&](const std::string& name, const std::string& desc) {
        auto s = std::make_shared<Sub>();
        s->command = name;
        s->flags.app = app.add_subcommand(name, desc);
        add_common(*s);
        subs.push_back(s);
        return s;
    };

    {
        auto s = make_sub("simulate", "walk replicates: lambda, range, optional Z as CSV");
        add_kernel(*s);
        add_scenery(*s);
        s->flags.integer("--n", "n");
        s->flags.integer("--replicates", "replicates");
    }
    {
        auto s = make_sub("tail", "estimate P(Z_n/n > b)");
        add_kernel(*s);
        add_scenery(*s);
        s->flags.integer("--n", "n");
        s->flags.text("--b", "b");
        s->flags.text("--method", "method");
        s->flags.integer("--replicates", "replicates");
    }
    {
        auto s = make_sub("rate-table", "rate-normalised log-probabilities along an n-list");
        add_kernel(*s);
        add_scenery(*s);
        s->flags.text("--method", "method");
        s->flags.number("--prediction", "prediction_value");
        s->flags.app->add_option_function<std::vector<int64_t>>(
            "--n-list", [&s](const std::vector<int64_t>& v) { s->flags.values["n_list"] = v; });
        s->flags.integer("--replicates", "replicates");
        s->flags.app->add_option_function<std::string>(
            "--regime", [&s](const std::string& v) { s->regime_overrides["case"] = v; });
        s->flags.app->add_option_function<double>(
            "--theta", [&s](double v) { s->regime_overrides["theta"] = v; });
        s->flags.app->add_option_function<double>(
            "--regime-q", [&s](double v) { s->regime_overrides["q"] = v; });
    }
    auto add_solve_flags = [&](Sub& s) {
        auto optd = [&s](const std::string& flag, const std::string& key) {
            s.flags.app->add_option_function<double>(
                flag, [&s, key](double v) { s.solve_overrides[key] = v; });
        };
        auto opti = [&s](const std::string& flag, const std::string& key) {
            s.flags.app->add_option_function<int64_t>(
                flag, [&s, key](int64_t v) { s.solve_overrides[key] = v; });
        };
        s.flags.app->add_option_function<std::string>(
            "--mode", [&s](const std::string& v) { s.solve_overrides["mode"] = v; });
        opti("--d", "d");
        optd("--D", "D");
        optd("--q", "q");
        optd("--u", "u");
        optd("--R", "R");
        opti("--m", "m");
        optd("--delta", "delta");
        opti("--restarts", "restarts");
        opti("--max-iters", "max_iters");
        s.flags.app->add_option_function<std::string>(
            "--bc", [&s](const std::string& v) { s.solve_overrides["bc"] = v; });
    };
    {
        auto s = make_sub("solve", "variational constants chi, K_Dq, K_H on a grid");
        add_solve_flags(*s);
        s->flags.text("--minimizer-csv", "minimizer_csv");
    }
    {
        auto s = make_sub("spectral-check", "transfer-matrix cumulants vs principal eigenvalue");
        add_kernel(*s);
        s->flags.number("--R", "R");
        s->flags.integer("--m", "m");
        s->flags.text("--bc", "bc");
        s->flags.app->add_option_function<std::vector<double>>(
            "--alpha-list",
            [&s](const std::vector<double>& v) { s->flags.values["alpha_list"] = v; });
        s->flags.app->add_option_function<std::vector<int64_t>>(
            "--T-list", [&s](const std::vector<int64_t>& v) { s->flags.values["T_list"] = v; });
        s->flags.app->add_option_function<std::string>(
            "--f-type", [&s](const std::string& v) { s->f_overrides["type"] = v; });
        s->flags.app->add_option_function<double>(
            "--f-c", [&s](double v) { s->f_overrides["c"] = v; });
    }
    {
        auto s = make_sub("trial-sequence", "radial trial profiles for the supercritical regime");
        s->flags.integer("--d", "d");
        s->flags.number("--p", "p");
        s->flags.app->add_option_function<std::vector<double>>(
            "--n-list", [&s](const std::vector<double>& v) { s->flags.values["n_list"] = v; });
    }
    {
        auto s = make_sub("box-study", "finite-box Dirichlet/periodic values across (R, delta)");
        add_solve_flags(*s);
        s->flags.app->add_option_function<std::vector<double>>(
            "--R-list", [&s](const std::vector<double>& v) { s->flags.values["R_list"] = v; });
        s->flags.app->add_option_function<std::vector<double>>(
            "--delta-list",
            [&s](const std::vector<double>& v) { s->flags.values["delta_list"] = v; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;  // any usage problem is a config error
    }

    try {
        json cfg = config_path.empty() ? json::object() : load_config(config_path);
        for (const auto& s : subs) {
            if (!s->flags.app->parsed()) continue;
            cfg["command"] = s->command;
            merge_into(cfg, s->flags.values);
            auto merge_block = [&cfg](const char* key, const json& block) {
                if (block.empty()) return;
                json merged = cfg.contains(key) ? cfg[key] : json::object();
                merge_into(merged, block);
                cfg[key] = merged;
            };
            merge_block("kernel", s->kernel_overrides);
            merge_block("scenery", s->scenery_overrides);
            merge_block("solve", s->solve_overrides);
            merge_block("regime", s->regime_overrides);
            merge_block("f", s->f_overrides);
        }
        return rwrs::cli::run(cfg);
    } catch (const rwrs::cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const rwrs::cli::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
