#include "dppmse/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dppmse/baselines.hpp"
#include "dppmse/errors.hpp"
#include "dppmse/mechanism.hpp"
#include "dppmse/models.hpp"
#include "dppmse/parallel.hpp"
#include "dppmse/pmse.hpp"

namespace dppmse::experiments {

namespace {

// Population moments implied by the study design; the bounded baselines
// receive their truncation boxes as multiples of these.
constexpr double kMean1 = 2.0;
constexpr double kSd1 = 10.0;
constexpr double kMean2 = -2.5 + 0.5 * kMean1;
const double kSd2 = std::sqrt(0.5 * 0.5 * kSd1 * kSd1 + 3.0 * 3.0);

std::vector<double> population_centers() { return {kMean1, kMean2}; }
std::vector<double> population_sds() { return {kSd1, kSd2}; }

std::string depth_label(int depth) {
    return depth == kUnlimitedDepthCap ? "unlimited" : std::to_string(depth);
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

nlohmann::json config_to_json(const ExperimentConfig &cfg) {
    nlohmann::json j;
    j["n"] = cfg.n;
    j["sims"] = cfg.sims;
    j["seed"] = cfg.seed;
    j["threads"] = cfg.threads;
    j["depths"] = cfg.depths;
    j["cps"] = cfg.cps;
    j["epsilons"] = cfg.epsilons;
    j["bounds_multipliers"] = cfg.bounds_multipliers;
    j["methods"] = cfg.methods;
    j["l"] = cfg.l;
    j["chain_m"] = cfg.chain_m;
    j["mech_cp"] = cfg.mech_cp;
    j["chain_iterations"] = cfg.chain_iterations;
    j["chain_burn_in"] = cfg.chain_burn_in;
    j["noise_sd"] = cfg.noise_sd;
    j["theta_sd"] = cfg.theta_sd;
    j["eval_min_leaf"] = cfg.eval_min_leaf;
    j["hist_bins_per_dim"] = cfg.hist_bins_per_dim;
    j["eval_bounds_multiplier"] = cfg.eval_bounds_multiplier;
    return j;
}

models::ThetaVector draw_exploratory_theta(double sd, RandomSource &rng) {
    for (;;) {
        std::vector<double> p(5);
        for (auto &v : p) {
            v = rng.normal(0.0, sd);
        }
        if (p[1] > 0.0 && p[4] > 0.0) {
            return models::ThetaVector(std::move(p));
        }
    }
}

double mean_of(const std::vector<double> &v) {
    double total = 0.0;
    for (double x : v) {
        total += x;
    }
    return total / static_cast<double>(v.size());
}

double variance_of(const std::vector<double> &v) {
    if (v.size() < 2) {
        return 0.0;
    }
    const double m = mean_of(v);
    double total = 0.0;
    for (double x : v) {
        total += (x - m) * (x - m);
    }
    return total / static_cast<double>(v.size() - 1);
}

bool method_selected(const ExperimentConfig &cfg, const std::string &name) {
    if (cfg.methods.empty()) {
        return true;
    }
    return std::find(cfg.methods.begin(), cfg.methods.end(), name) !=
           cfg.methods.end();
}

mech::MechanismConfig mechanism_config(const ExperimentConfig &cfg, double epsilon,
                                       const pmse::PmseConfig &pmse_cfg) {
    mech::MechanismConfig m;
    m.epsilon_total = epsilon;
    m.num_datasets = cfg.l;
    m.replicates_m = cfg.chain_m;
    m.pmse = pmse_cfg;
    m.chain.iterations = cfg.chain_iterations;
    m.chain.burn_in = cfg.chain_burn_in;
    m.threads = 1;  // experiments parallelize across simulations
    return m;
}

}  // namespace

DataMatrix simulate_population(std::size_t n, RandomSource &rng) {
    if (n < 2) {
        throw DomainError("simulate_population requires n >= 2");
    }
    std::vector<double> values(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x1 = rng.normal(2.0, 10.0);
        const double x2 = rng.normal(-2.5 + 0.5 * x1, 3.0);
        values[2 * i] = x1;
        values[2 * i + 1] = x2;
    }
    return DataMatrix(std::move(values), n, {"x1", "x2"});
}

std::pair<double, double> ols_fit(const DataMatrix &x) {
    if (x.cols() < 2) {
        throw ShapeError("ols_fit: need at least 2 columns");
    }
    const std::size_t n = x.rows();
    if (n < 3) {
        throw DomainError("ols_fit: need at least 3 rows");
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x(i, 0);
        my += x(i, 1);
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    bool constant = true;
    const double first = x(0, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x(i, 0) - mx;
        sxx += dx * dx;
        sxy += dx * (x(i, 1) - my);
        constant = constant && x(i, 0) == first;
    }
    if (constant || !(sxx > 0.0)) {
        throw DegenerateDesignError("ols_fit: predictor column has no variance");
    }
    const double beta1 = sxy / sxx;
    return {my - beta1 * mx, beta1};
}

std::pair<double, double> combine_estimates(
    const std::vector<std::pair<double, double>> &per_dataset) {
    if (per_dataset.empty()) {
        throw DomainError("combine_estimates: need at least one estimate");
    }
    double b0 = 0.0, b1 = 0.0;
    for (const auto &[a, b] : per_dataset) {
        b0 += a;
        b1 += b;
    }
    const auto k = static_cast<double>(per_dataset.size());
    return {b0 / k, b1 / k};
}

ExperimentReport failure_rate_experiment(const ExperimentConfig &cfg) {
    const std::size_t sims = cfg.sims ? cfg.sims : 10000;
    ExperimentReport report;
    report.experiment = "failure-rate";
    report.master_seed = cfg.seed;
    report.config_json = config_to_json(cfg).dump();

    const double bound = pmse::sensitivity_bound(cfg.n);
    std::size_t cell_tag = 0;
    for (const double cp : cfg.cps) {
        for (const int depth : cfg.depths) {
            const std::uint64_t cell_seed = mix_seed(cfg.seed, 1000 + cell_tag);
            std::vector<double> deltas(sims);
            parallel_for(sims, cfg.threads, [&](std::size_t s) {
                RandomSource rng(mix_seed(cell_seed, s));
                const auto x = simulate_population(cfg.n, rng);
                const auto row = static_cast<std::size_t>(rng.uniform_index(cfg.n));
                const auto x_prime = perturb_one_row(x, row, cfg.noise_sd, rng);
                const auto theta = draw_exploratory_theta(cfg.theta_sd, rng);
                pmse::PmseConfig pcfg;
                pcfg.fit.max_depth = depth;
                pcfg.fit.cp = cp;
                const models::SequentialGaussianModel model(cfg.n);
                deltas[s] = pmse::sensitivity_delta(x, x_prime, theta, model, 1,
                                                    pcfg, rng);
            });
            std::size_t violations = 0;
            double max_delta = 0.0;
            for (const double d : deltas) {
                violations += d > bound ? 1 : 0;
                max_delta = std::max(max_delta, d);
            }
            ReportCell cell;
            cell.method = "greedy-cart";
            cell.variant = "depth=" + depth_label(depth) + ",cp=" + format_double(cp);
            cell.params = {{"depth", static_cast<double>(depth)},
                           {"cp", cp},
                           {"n", static_cast<double>(cfg.n)},
                           {"bound", bound}};
            cell.aggregates = {
                {"violation_pct",
                 100.0 * static_cast<double>(violations) / static_cast<double>(sims)},
                {"mean_delta", mean_of(deltas)},
                {"max_delta", max_delta},
                {"sims", static_cast<double>(sims)}};
            cell.raw["delta"] = std::move(deltas);
            report.cells.push_back(std::move(cell));
            ++cell_tag;
        }
    }
    return report;
}

namespace {

struct MethodCell {
    std::string method;
    std::string variant;
    double epsilon;
    int depth = 0;          // pmse-mech only
    double multiplier = 0;  // bounded baselines only
};

std::vector<MethodCell> comparison_cells(const ExperimentConfig &cfg,
                                         const std::vector<double> &epsilons,
                                         bool mech_by_depth,
                                         const std::vector<double> &multipliers) {
    std::vector<MethodCell> cells;
    for (const double eps : epsilons) {
        if (method_selected(cfg, "pmse-mech")) {
            if (mech_by_depth) {
                for (const int depth : cfg.depths) {
                    cells.push_back({"pmse-mech", "depth=" + depth_label(depth), eps,
                                     depth, 0.0});
                }
            } else {
                cells.push_back({"pmse-mech", "depth=unlimited", eps,
                                 kUnlimitedDepthCap, 0.0});
            }
        }
        if (method_selected(cfg, "noisy-bppd")) {
            for (const double mult : multipliers) {
                cells.push_back({"noisy-bppd", "bounds=" + format_double(mult) + "sd",
                                 eps, 0, mult});
            }
        }
        if (method_selected(cfg, "smooth-hist")) {
            for (const double mult : multipliers) {
                cells.push_back({"smooth-hist", "bounds=" + format_double(mult) + "sd",
                                 eps, 0, mult});
            }
        }
        if (method_selected(cfg, "nondp-bppd")) {
            cells.push_back({"nondp-bppd", "", eps, 0, 0.0});
        }
    }
    return cells;
}

}  // namespace

ExperimentReport regress_eval_experiment(const ExperimentConfig &cfg) {
    const std::size_t sims = cfg.sims ? cfg.sims : 250;
    const std::vector<double> epsilons =
        cfg.epsilons.empty() ? std::vector<double>{0.25, 0.5, 1.0} : cfg.epsilons;

    ExperimentReport report;
    report.experiment = "regress-eval";
    report.master_seed = cfg.seed;
    report.config_json = config_to_json(cfg).dump();

    const auto cells = comparison_cells(cfg, epsilons, /*mech_by_depth=*/true,
                                        cfg.bounds_multipliers);
    std::size_t cell_tag = 0;
    for (const auto &spec : cells) {
        const std::uint64_t cell_seed = mix_seed(cfg.seed, 5000 + cell_tag);
        std::vector<double> err_b0(sims);
        std::vector<double> err_b1(sims);
        parallel_for(sims, cfg.threads, [&](std::size_t s) {
            RandomSource rng(mix_seed(cell_seed, s));
            const auto x = simulate_population(cfg.n, rng);
            const auto truth = ols_fit(x);

            std::vector<DataMatrix> datasets;
            if (spec.method == "pmse-mech") {
                pmse::PmseConfig pcfg;
                pcfg.fit.max_depth = spec.depth;
                pcfg.fit.cp = cfg.mech_cp;
                auto mcfg = mechanism_config(cfg, spec.epsilon, pcfg);
                const models::SequentialGaussianModel model(cfg.n);
                datasets = mech::run_mechanism(x, model, mcfg, rng).datasets;
            } else if (spec.method == "noisy-bppd") {
                const auto bounds = baselines::Bounds::centered(
                    population_centers(), population_sds(), spec.multiplier);
                datasets = baselines::noisy_bppd_synthesize(x, bounds, spec.epsilon,
                                                            cfg.l, rng);
            } else if (spec.method == "smooth-hist") {
                const auto bounds = baselines::Bounds::centered(
                    population_centers(), population_sds(), spec.multiplier);
                const auto hist = baselines::smooth_histogram_fit(
                    bounds.clamp(x), bounds,
                    {cfg.hist_bins_per_dim, cfg.hist_bins_per_dim}, spec.epsilon,
                    baselines::HistogramPrivacyUnit::kPerRelease);
                datasets.push_back(baselines::smooth_histogram_sample(
                    hist, cfg.n, rng, x.column_names()));
            } else {
                datasets = baselines::nondp_bppd_synthesize(x, cfg.l, rng);
            }

            std::vector<std::pair<double, double>> fits;
            fits.reserve(datasets.size());
            for (const auto &ds : datasets) {
                try {
                    fits.push_back(ols_fit(ds));
                } catch (const DegenerateDesignError &) {
                    // skip degenerate synthetic draws
                }
            }
            if (fits.empty()) {
                err_b0[s] = std::abs(truth.first);
                err_b1[s] = std::abs(truth.second);
                return;
            }
            const auto combined = combine_estimates(fits);
            err_b0[s] = std::abs(truth.first - combined.first);
            err_b1[s] = std::abs(truth.second - combined.second);
        });

        ReportCell cell;
        cell.method = spec.method;
        cell.variant = spec.variant;
        cell.params = {{"epsilon", spec.epsilon},
                       {"n", static_cast<double>(cfg.n)},
                       {"l", static_cast<double>(cfg.l)}};
        if (spec.method == "pmse-mech") {
            cell.params["depth"] = spec.depth;
            cell.params["cp"] = cfg.mech_cp;
        }
        if (spec.multiplier > 0.0) {
            cell.params["bounds_multiplier"] = spec.multiplier;
        }
        cell.aggregates = {{"mean_abs_err_b0", mean_of(err_b0)},
                           {"mean_abs_err_b1", mean_of(err_b1)},
                           {"var_abs_err_b0", variance_of(err_b0)},
                           {"var_abs_err_b1", variance_of(err_b1)},
                           {"sims", static_cast<double>(sims)}};
        cell.raw["abs_err_b0"] = std::move(err_b0);
        cell.raw["abs_err_b1"] = std::move(err_b1);
        report.cells.push_back(std::move(cell));
        ++cell_tag;
    }
    return report;
}

ExperimentReport pmse_eval_experiment(const ExperimentConfig &cfg) {
    const std::size_t sims = cfg.sims ? cfg.sims : 250;
    const std::vector<double> epsilons =
        cfg.epsilons.empty() ? std::vector<double>{0.25, 0.5, 1.0, 2.0, 4.0}
                             : cfg.epsilons;

    ExperimentReport report;
    report.experiment = "pmse-eval";
    report.master_seed = cfg.seed;
    report.config_json = config_to_json(cfg).dump();

    // Saturation-limited evaluation trees; the mechanism's internal utility
    // uses the same configuration so the sampled parameters optimize the
    // measure they are scored on.
    pmse::PmseConfig eval_cfg;
    eval_cfg.fit.max_depth = kUnlimitedDepthCap;
    eval_cfg.fit.cp = 0.0;
    eval_cfg.fit.min_leaf = cfg.eval_min_leaf;

    const auto cells = comparison_cells(cfg, epsilons, /*mech_by_depth=*/false,
                                        {cfg.eval_bounds_multiplier});
    std::size_t cell_tag = 0;
    for (const auto &spec : cells) {
        const std::uint64_t cell_seed = mix_seed(cfg.seed, 9000 + cell_tag);
        std::vector<double> pmse_values(sims);
        parallel_for(sims, cfg.threads, [&](std::size_t s) {
            RandomSource rng(mix_seed(cell_seed, s));
            const auto x = simulate_population(cfg.n, rng);

            std::vector<DataMatrix> datasets;
            if (spec.method == "pmse-mech") {
                auto mcfg = mechanism_config(cfg, spec.epsilon, eval_cfg);
                const models::SequentialGaussianModel model(cfg.n);
                datasets = mech::run_mechanism(x, model, mcfg, rng).datasets;
            } else if (spec.method == "noisy-bppd") {
                const auto bounds = baselines::Bounds::centered(
                    population_centers(), population_sds(),
                    cfg.eval_bounds_multiplier);
                datasets = baselines::noisy_bppd_synthesize(x, bounds, spec.epsilon,
                                                            cfg.l, rng);
            } else if (spec.method == "smooth-hist") {
                const auto bounds = baselines::Bounds::centered(
                    population_centers(), population_sds(),
                    cfg.eval_bounds_multiplier);
                const auto hist = baselines::smooth_histogram_fit(
                    bounds.clamp(x), bounds,
                    {cfg.hist_bins_per_dim, cfg.hist_bins_per_dim}, spec.epsilon,
                    baselines::HistogramPrivacyUnit::kPerRelease);
                datasets.push_back(baselines::smooth_histogram_sample(
                    hist, cfg.n, rng, x.column_names()));
            } else {
                datasets = baselines::nondp_bppd_synthesize(x, cfg.l, rng);
            }

            const pmse::UtilityEvaluator evaluator(x, eval_cfg);
            double total = 0.0;
            for (const auto &ds : datasets) {
                total += evaluator.evaluate(ds);
            }
            pmse_values[s] = total / static_cast<double>(datasets.size());
        });

        ReportCell cell;
        cell.method = spec.method;
        cell.variant = spec.variant;
        cell.params = {{"epsilon", spec.epsilon},
                       {"n", static_cast<double>(cfg.n)},
                       {"eval_min_leaf", static_cast<double>(cfg.eval_min_leaf)}};
        cell.aggregates = {{"mean_pmse", mean_of(pmse_values)},
                           {"var_pmse", variance_of(pmse_values)},
                           {"sims", static_cast<double>(sims)}};
        cell.raw["pmse"] = std::move(pmse_values);
        report.cells.push_back(std::move(cell));
        ++cell_tag;
    }
    return report;
}

void emit_report(const ExperimentReport &report, const std::filesystem::path &out_dir) {
    std::filesystem::create_directories(out_dir);

    nlohmann::json j;
    j["experiment"] = report.experiment;
    j["master_seed"] = report.master_seed;
    j["config"] = nlohmann::json::parse(report.config_json);
    auto &cells = j["cells"];
    cells = nlohmann::json::array();
    for (const auto &cell : report.cells) {
        nlohmann::json c;
        c["method"] = cell.method;
        c["variant"] = cell.variant;
        c["params"] = cell.params;
        c["aggregates"] = cell.aggregates;
        c["raw"] = cell.raw;
        cells.push_back(std::move(c));
    }
    const auto json_path = out_dir / (report.experiment + "_report.json");
    {
        std::ofstream out(json_path);
        if (!out) {
            throw ParseError("cannot open '" + json_path.string() + "' for writing");
        }
        out << j.dump(2) << '\n';
    }

    // Flat per-cell CSV; one column per parameter and aggregate key.
    std::set<std::string> param_keys;
    std::set<std::string> agg_keys;
    for (const auto &cell : report.cells) {
        for (const auto &[k, _] : cell.params) {
            param_keys.insert(k);
        }
        for (const auto &[k, _] : cell.aggregates) {
            agg_keys.insert(k);
        }
    }
    const auto csv_path = out_dir / (report.experiment + "_cells.csv");
    std::ofstream csv(csv_path);
    if (!csv) {
        throw ParseError("cannot open '" + csv_path.string() + "' for writing");
    }
    csv << "method,variant";
    for (const auto &k : param_keys) {
        csv << ',' << k;
    }
    for (const auto &k : agg_keys) {
        csv << ',' << k;
    }
    csv << '\n';
    char buf[64];
    for (const auto &cell : report.cells) {
        csv << cell.method << ',' << cell.variant;
        for (const auto &k : param_keys) {
            csv << ',';
            const auto it = cell.params.find(k);
            if (it != cell.params.end()) {
                std::snprintf(buf, sizeof(buf), "%.17g", it->second);
                csv << buf;
            }
        }
        for (const auto &k : agg_keys) {
            csv << ',';
            const auto it = cell.aggregates.find(k);
            if (it != cell.aggregates.end()) {
                std::snprintf(buf, sizeof(buf), "%.17g", it->second);
                csv << buf;
            }
        }
        csv << '\n';
    }
}

}  // namespace dppmse::experiments
