// dp-pmse: differentially private synthetic data via the pMSE mechanism,
// plus the simulation studies (failure-rate, regress-eval, pmse-eval).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dppmse/baselines.hpp"
#include "dppmse/csv.hpp"
#include "dppmse/errors.hpp"
#include "dppmse/experiments.hpp"
#include "dppmse/mechanism.hpp"
#include "dppmse/models.hpp"
#include "dppmse/pmse.hpp"

namespace {

using dppmse::experiments::kUnlimitedDepthCap;

int parse_depth(const std::string &token) {
    if (token == "unlimited") {
        return kUnlimitedDepthCap;
    }
    try {
        const int d = std::stoi(token);
        if (d < 0) {
            throw dppmse::DomainError("depth must be >= 0 or 'unlimited'");
        }
        return d;
    } catch (const std::invalid_argument &) {
        throw dppmse::DomainError("invalid depth '" + token + "'");
    }
}

std::vector<std::string> split_csv_list(const std::string &s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) {
            out.push_back(tok);
        }
    }
    return out;
}

std::vector<double> parse_double_list(const std::string &s) {
    std::vector<double> out;
    for (const auto &tok : split_csv_list(s)) {
        out.push_back(std::stod(tok));
    }
    return out;
}

std::vector<int> parse_depth_list(const std::string &s) {
    std::vector<int> out;
    for (const auto &tok : split_csv_list(s)) {
        out.push_back(parse_depth(tok));
    }
    return out;
}

// JSON config file supplies defaults; explicitly passed flags win.
class ConfigFile {
public:
    void load(const std::string &path) {
        std::ifstream in(path);
        if (!in) {
            throw dppmse::ParseError("cannot open config file '" + path + "'");
        }
        try {
            in >> json_;
        } catch (const nlohmann::json::exception &e) {
            throw dppmse::ParseError("config file '" + path + "': " + e.what());
        }
    }

    template <typename T>
    void apply(CLI::App *cmd, const std::string &flag, const std::string &key,
               T &var) const {
        if (json_.is_null() || !json_.contains(key)) {
            return;
        }
        if (cmd->count("--" + flag) > 0) {
            return;  // explicit flag wins
        }
        var = json_.at(key).get<T>();
    }

private:
    nlohmann::json json_;
};

void write_datasets(const dppmse::mech::MechanismOutput &out,
                    const std::filesystem::path &dir,
                    std::vector<std::string> &paths) {
    std::filesystem::create_directories(dir);
    char name[64];
    for (std::size_t i = 0; i < out.datasets.size(); ++i) {
        std::snprintf(name, sizeof(name), "synthetic_%02zu.csv", i + 1);
        const auto path = dir / name;
        dppmse::write_csv(out.datasets[i], path);
        paths.push_back(path.string());
    }
}

int run_synthesize(const std::string &input, const std::string &out_dir,
                   double epsilon, std::size_t l, std::size_t m, int depth,
                   double cp, std::size_t min_leaf, double delta_u, double prior_sd,
                   std::size_t iterations, std::size_t burn_in, std::size_t thin,
                   std::uint64_t seed, unsigned threads) {
    const auto x = dppmse::read_csv(input);
    if (x.cols() != 2) {
        throw dppmse::ShapeError(
            "synthesize: the sequential Gaussian model expects 2 columns, input has " +
            std::to_string(x.cols()));
    }
    dppmse::mech::MechanismConfig cfg;
    cfg.epsilon_total = epsilon;
    cfg.num_datasets = l;
    cfg.replicates_m = m;
    cfg.delta_u = delta_u;
    cfg.prior.sd = prior_sd;
    cfg.chain.iterations = iterations;
    cfg.chain.burn_in = burn_in;
    cfg.chain.thin = thin;
    cfg.pmse.fit.max_depth = depth;
    cfg.pmse.fit.cp = cp;
    cfg.pmse.fit.min_leaf = min_leaf;
    cfg.threads = threads;

    const dppmse::models::SequentialGaussianModel model(x.rows());
    dppmse::RandomSource rng(seed);
    const auto out = dppmse::mech::run_mechanism(x, model, cfg, rng);

    std::vector<std::string> paths;
    write_datasets(out, out_dir, paths);

    nlohmann::json diag;
    diag["input"] = input;
    diag["seed"] = seed;
    diag["epsilon_total"] = cfg.epsilon_total;
    diag["epsilon_spent"] = out.epsilon_spent;
    diag["epsilon_per_draw"] = cfg.epsilon_total / static_cast<double>(l);
    diag["num_datasets"] = l;
    diag["replicates_m"] = m;
    diag["delta_u"] =
        delta_u > 0 ? delta_u : dppmse::pmse::sensitivity_bound(x.rows());
    diag["tree"] = {{"depth", depth}, {"cp", cp}, {"min_leaf", min_leaf}};
    diag["chain"] = {{"iterations", iterations}, {"burn_in", burn_in}, {"thin", thin}};
    diag["datasets"] = paths;
    auto &chains = diag["chains"];
    chains = nlohmann::json::array();
    for (std::size_t i = 0; i < out.thetas.size(); ++i) {
        nlohmann::json c;
        c["theta"] = out.thetas[i].params;
        c["generation_seed"] = out.generation_seeds[i];
        c["acceptance_rate"] = out.diagnostics[i].acceptance_rate;
        c["acceptance_warning"] = out.diagnostics[i].acceptance_warning;
        c["tuned_proposal_sd"] = out.diagnostics[i].tuned_proposal_sd;
        c["utility_trace"] = out.diagnostics[i].utility_trace;
        chains.push_back(std::move(c));
    }
    const auto diag_path = std::filesystem::path(out_dir) / "mechanism.json";
    std::ofstream diag_out(diag_path);
    diag_out << diag.dump(2) << '\n';

    std::cout << "wrote " << paths.size() << " synthetic datasets to " << out_dir
              << " (epsilon_spent=" << out.epsilon_spent << ")\n";
    for (std::size_t i = 0; i < out.diagnostics.size(); ++i) {
        if (out.diagnostics[i].acceptance_warning) {
            std::cout << "warning: chain " << i + 1 << " acceptance rate "
                      << out.diagnostics[i].acceptance_rate
                      << " outside [0.05, 0.95]\n";
        }
    }
    return 0;
}

void print_cells(const dppmse::experiments::ExperimentReport &report) {
    for (const auto &cell : report.cells) {
        std::cout << report.experiment << "  " << cell.method;
        if (!cell.variant.empty()) {
            std::cout << "  " << cell.variant;
        }
        const auto eps = cell.params.find("epsilon");
        if (eps != cell.params.end()) {
            std::cout << "  eps=" << eps->second;
        }
        for (const auto &[k, v] : cell.aggregates) {
            if (k != "sims") {
                std::cout << "  " << k << "=" << v;
            }
        }
        std::cout << '\n';
    }
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Differentially private synthetic data via the pMSE mechanism"};
    app.require_subcommand(1);

    // ---- synthesize ----
    auto *syn = app.add_subcommand("synthesize",
                                   "Sample private parameters and release synthetic CSVs");
    std::string syn_input, syn_out, syn_depth = "unlimited", syn_config;
    double syn_eps = 1.0, syn_cp = 0.01, syn_delta_u = 0.0, syn_prior_sd = 100000.0;
    std::size_t syn_l = 10, syn_m = 20, syn_min_leaf = 1;
    std::size_t syn_iters = 2000, syn_burn = 500, syn_thin = 1;
    std::uint64_t syn_seed = 12345;
    unsigned syn_threads = 0;
    syn->add_option("--input", syn_input, "Input CSV (header + 2 numeric columns)");
    syn->add_option("--out", syn_out, "Output directory");
    syn->add_option("--epsilon", syn_eps, "Total privacy budget");
    syn->add_option("--l", syn_l, "Number of private datasets (budget epsilon/l each)");
    syn->add_option("--m", syn_m, "Synthetic replicates per utility evaluation");
    syn->add_option("--depth", syn_depth, "Tree depth (integer or 'unlimited')");
    syn->add_option("--cp", syn_cp, "Complexity parameter (relative improvement)");
    syn->add_option("--min-leaf", syn_min_leaf, "Minimum rows per leaf");
    syn->add_option("--delta-u", syn_delta_u, "Sensitivity (default 1/n)");
    syn->add_option("--prior-sd", syn_prior_sd, "Flat prior standard deviation");
    syn->add_option("--chain-iterations", syn_iters, "Metropolis iterations");
    syn->add_option("--burn-in", syn_burn, "Burn-in iterations");
    syn->add_option("--thin", syn_thin, "Thinning interval");
    syn->add_option("--seed", syn_seed, "Master seed");
    syn->add_option("--threads", syn_threads, "Worker threads (0 = hardware)");
    syn->add_option("--config", syn_config, "JSON config file (flags win on conflict)");

    // ---- shared experiment options ----
    struct ExpFlags {
        std::string out, config, depths, cps, epsilons, bounds, methods;
        dppmse::experiments::ExperimentConfig cfg;
    };
    auto add_common = [](CLI::App *cmd, ExpFlags &f) {
        cmd->add_option("--out", f.out, "Output directory");
        cmd->add_option("--sims", f.cfg.sims, "Simulations per cell (0 = default)");
        cmd->add_option("--n", f.cfg.n, "Rows per simulated dataset");
        cmd->add_option("--seed", f.cfg.seed, "Master seed");
        cmd->add_option("--threads", f.cfg.threads, "Worker threads (0 = hardware)");
        cmd->add_option("--config", f.config, "JSON config file (flags win on conflict)");
    };

    auto *fail = app.add_subcommand("failure-rate",
                                    "Empirical failure rate of the 1/n sensitivity bound");
    ExpFlags fail_f;
    add_common(fail, fail_f);
    fail->add_option("--depths", fail_f.depths, "Comma list of depths (int or 'unlimited')");
    fail->add_option("--cps", fail_f.cps, "Comma list of complexity parameters");
    fail->add_option("--noise-sd", fail_f.cfg.noise_sd, "Row perturbation noise sd");
    fail->add_option("--theta-sd", fail_f.cfg.theta_sd, "Exploratory theta draw sd");

    auto *reg = app.add_subcommand("regress-eval",
                                   "OLS coefficient accuracy of the synthesizers");
    ExpFlags reg_f;
    add_common(reg, reg_f);
    reg->add_option("--epsilons", reg_f.epsilons, "Comma list of epsilon values");
    reg->add_option("--depths", reg_f.depths, "Mechanism tree depths");
    reg->add_option("--bounds", reg_f.bounds, "Bounds multipliers for baselines");
    reg->add_option("--methods", reg_f.methods, "Subset of methods to run");
    reg->add_option("--l", reg_f.cfg.l, "Datasets per release");
    reg->add_option("--chain-m", reg_f.cfg.chain_m, "Utility replicates in the sampler");
    reg->add_option("--chain-iterations", reg_f.cfg.chain_iterations, "Chain length");
    reg->add_option("--burn-in", reg_f.cfg.chain_burn_in, "Chain burn-in");
    reg->add_option("--mech-cp", reg_f.cfg.mech_cp, "Mechanism tree cp");
    reg->add_option("--hist-bins", reg_f.cfg.hist_bins_per_dim, "Histogram bins per dim");

    auto *pm = app.add_subcommand("pmse-eval",
                                  "Mean pMSE achieved by each synthesizer");
    ExpFlags pm_f;
    add_common(pm, pm_f);
    pm->add_option("--epsilons", pm_f.epsilons, "Comma list of epsilon values");
    pm->add_option("--methods", pm_f.methods, "Subset of methods to run");
    pm->add_option("--l", pm_f.cfg.l, "Datasets per release");
    pm->add_option("--chain-m", pm_f.cfg.chain_m, "Utility replicates in the sampler");
    pm->add_option("--chain-iterations", pm_f.cfg.chain_iterations, "Chain length");
    pm->add_option("--burn-in", pm_f.cfg.chain_burn_in, "Chain burn-in");
    pm->add_option("--eval-min-leaf", pm_f.cfg.eval_min_leaf,
                   "Evaluation tree min_leaf (saturation)");
    pm->add_option("--eval-bounds", pm_f.cfg.eval_bounds_multiplier,
                   "Bounds multiplier for baselines");
    pm->add_option("--hist-bins", pm_f.cfg.hist_bins_per_dim, "Histogram bins per dim");

    try {
        app.parse(argc, argv);

        if (syn->parsed()) {
            ConfigFile file;
            if (!syn_config.empty()) {
                file.load(syn_config);
            }
            file.apply(syn, "input", "input", syn_input);
            file.apply(syn, "out", "out", syn_out);
            file.apply(syn, "epsilon", "epsilon", syn_eps);
            file.apply(syn, "l", "l", syn_l);
            file.apply(syn, "m", "m", syn_m);
            file.apply(syn, "depth", "depth", syn_depth);
            file.apply(syn, "cp", "cp", syn_cp);
            file.apply(syn, "min-leaf", "min_leaf", syn_min_leaf);
            file.apply(syn, "delta-u", "delta_u", syn_delta_u);
            file.apply(syn, "prior-sd", "prior_sd", syn_prior_sd);
            file.apply(syn, "chain-iterations", "chain_iterations", syn_iters);
            file.apply(syn, "burn-in", "burn_in", syn_burn);
            file.apply(syn, "thin", "thin", syn_thin);
            file.apply(syn, "seed", "seed", syn_seed);
            file.apply(syn, "threads", "threads", syn_threads);
            if (syn_input.empty() || syn_out.empty()) {
                throw dppmse::DomainError("synthesize requires --input and --out");
            }
            return run_synthesize(syn_input, syn_out, syn_eps, syn_l, syn_m,
                                  parse_depth(syn_depth), syn_cp, syn_min_leaf,
                                  syn_delta_u, syn_prior_sd, syn_iters, syn_burn,
                                  syn_thin, syn_seed, syn_threads);
        }

        auto finish_experiment = [](CLI::App *cmd, ExpFlags &f,
                                    const char *kind) -> int {
            ConfigFile file;
            if (!f.config.empty()) {
                file.load(f.config);
            }
            file.apply(cmd, "out", "out", f.out);
            file.apply(cmd, "sims", "sims", f.cfg.sims);
            file.apply(cmd, "n", "n", f.cfg.n);
            file.apply(cmd, "seed", "seed", f.cfg.seed);
            file.apply(cmd, "threads", "threads", f.cfg.threads);
            file.apply(cmd, "depths", "depths", f.depths);
            file.apply(cmd, "cps", "cps", f.cps);
            file.apply(cmd, "epsilons", "epsilons", f.epsilons);
            file.apply(cmd, "bounds", "bounds", f.bounds);
            file.apply(cmd, "methods", "methods", f.methods);
            file.apply(cmd, "l", "l", f.cfg.l);
            file.apply(cmd, "chain-m", "chain_m", f.cfg.chain_m);
            file.apply(cmd, "chain-iterations", "chain_iterations",
                       f.cfg.chain_iterations);
            file.apply(cmd, "burn-in", "chain_burn_in", f.cfg.chain_burn_in);
            file.apply(cmd, "mech-cp", "mech_cp", f.cfg.mech_cp);
            file.apply(cmd, "noise-sd", "noise_sd", f.cfg.noise_sd);
            file.apply(cmd, "theta-sd", "theta_sd", f.cfg.theta_sd);
            file.apply(cmd, "eval-min-leaf", "eval_min_leaf", f.cfg.eval_min_leaf);
            file.apply(cmd, "eval-bounds", "eval_bounds_multiplier",
                       f.cfg.eval_bounds_multiplier);
            file.apply(cmd, "hist-bins", "hist_bins_per_dim",
                       f.cfg.hist_bins_per_dim);
            if (f.out.empty()) {
                throw dppmse::DomainError(std::string(kind) + " requires --out");
            }
            if (!f.depths.empty()) {
                f.cfg.depths = parse_depth_list(f.depths);
            }
            if (!f.cps.empty()) {
                f.cfg.cps = parse_double_list(f.cps);
            }
            if (!f.epsilons.empty()) {
                f.cfg.epsilons = parse_double_list(f.epsilons);
            }
            if (!f.bounds.empty()) {
                f.cfg.bounds_multipliers = parse_double_list(f.bounds);
            }
            if (!f.methods.empty()) {
                f.cfg.methods = split_csv_list(f.methods);
            }
            dppmse::experiments::ExperimentReport report;
            if (std::string(kind) == "failure-rate") {
                report = dppmse::experiments::failure_rate_experiment(f.cfg);
            } else if (std::string(kind) == "regress-eval") {
                report = dppmse::experiments::regress_eval_experiment(f.cfg);
            } else {
                report = dppmse::experiments::pmse_eval_experiment(f.cfg);
            }
            dppmse::experiments::emit_report(report, f.out);
            print_cells(report);
            std::cout << "report written to " << f.out << '\n';
            return 0;
        };

        if (fail->parsed()) {
            return finish_experiment(fail, fail_f, "failure-rate");
        }
        if (reg->parsed()) {
            return finish_experiment(reg, reg_f, "regress-eval");
        }
        if (pm->parsed()) {
            return finish_experiment(pm, pm_f, "pmse-eval");
        }
        return 0;
    } catch (const CLI::ParseError &e) {
        return app.exit(e);
    } catch (const dppmse::ParseError &e) {
        std::cerr << R"({"error":"parse_error","message":")" << e.what() << "\"}\n";
        return 1;
    } catch (const dppmse::ShapeError &e) {
        std::cerr << R"({"error":"shape_error","message":")" << e.what() << "\"}\n";
        return 1;
    } catch (const dppmse::ModelDomainError &e) {
        std::cerr << R"({"error":"model_domain_error","message":")" << e.what()
                  << "\"}\n";
        return 1;
    } catch (const dppmse::DomainError &e) {
        std::cerr << R"({"error":"domain_error","message":")" << e.what() << "\"}\n";
        return 1;
    } catch (const dppmse::ResourceError &e) {
        std::cerr << R"({"error":"resource_error","message":")" << e.what() << "\"}\n";
        return 1;
    } catch (const dppmse::DegenerateDesignError &e) {
        std::cerr << R"({"error":"degenerate_design","message":")" << e.what()
                  << "\"}\n";
        return 1;
    } catch (const std::out_of_range &e) {
        std::cerr << R"({"error":"index_error","message":")" << e.what() << "\"}\n";
        return 1;
    } catch (const std::exception &e) {
        std::cerr << R"({"error":"error","message":")" << e.what() << "\"}\n";
        return 1;
    }
}
