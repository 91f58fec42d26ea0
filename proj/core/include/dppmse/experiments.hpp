#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dppmse/data_matrix.hpp"
#include "dppmse/rng.hpp"

namespace dppmse::experiments {

/// Depth used when a grid asks for "unlimited" trees: deep enough to be
/// unreachable at the pool sizes involved, with cp or min_leaf as the live
/// stopping rule.
inline constexpr int kUnlimitedDepthCap = 30;

/// Shared settings for the three simulation studies. sims == 0 selects the
/// per-study desk-scale default (10,000 for failure-rate, 250 otherwise).
struct ExperimentConfig {
    std::size_t n = 5000;
    std::size_t sims = 0;
    std::uint64_t seed = 12345;
    unsigned threads = 0;

    std::vector<int> depths = {1, 2, 5, kUnlimitedDepthCap};
    std::vector<double> cps = {0.01, 0.001};
    std::vector<double> epsilons;  // empty = per-study default
    std::vector<double> bounds_multipliers = {2.0, 4.0, 5.0, 10.0};
    std::vector<std::string> methods;  // empty = all applicable

    // synthesis settings shared by the comparison studies
    std::size_t l = 10;
    std::size_t chain_m = 2;
    double mech_cp = 0.01;
    std::size_t chain_iterations = 400;
    std::size_t chain_burn_in = 100;

    // failure-rate study
    double noise_sd = 25.0;  // row perturbation, sd reading of N(0, 25)
    double theta_sd = 10.0;  // exploratory parameter draws, sd reading of N(0, 10)

    // pMSE evaluation trees: saturation-limited (cp 0, min_leaf below)
    std::size_t eval_min_leaf = 100;
    std::size_t hist_bins_per_dim = 32;
    double eval_bounds_multiplier = 4.0;
};

/// One table cell: a (method, variant, parameter point) with aggregate
/// statistics and the raw per-simulation draws they were computed from.
struct ReportCell {
    std::string method;
    std::string variant;
    std::map<std::string, double> params;
    std::map<std::string, double> aggregates;
    std::map<std::string, std::vector<double>> raw;
};

struct ExperimentReport {
    std::string experiment;
    std::uint64_t master_seed = 0;
    std::string config_json;  // serialized config echo for exact re-runs
    std::vector<ReportCell> cells;
};

/// Two-variable study population: x1 ~ Normal(2, 10), x2 ~ Normal(-2.5 + 0.5 x1, 3).
DataMatrix simulate_population(std::size_t n, RandomSource &rng);

/// Closed-form simple regression of column 2 on column 1: (beta0, beta1).
std::pair<double, double> ols_fit(const DataMatrix &x);

/// Point-estimate combining across synthetic datasets: coefficient means.
std::pair<double, double> combine_estimates(
    const std::vector<std::pair<double, double>> &per_dataset);

/// Empirical failure rate of the 1/n sensitivity bound under greedy fitting,
/// per (tree depth, cp) cell.
ExperimentReport failure_rate_experiment(const ExperimentConfig &cfg);

/// Absolute OLS coefficient error of each synthesizer vs the original data.
ExperimentReport regress_eval_experiment(const ExperimentConfig &cfg);

/// Mean and variance of the pMSE achieved by each synthesizer.
ExperimentReport pmse_eval_experiment(const ExperimentConfig &cfg);

/// Writes <experiment>_report.json (full, with raw draws) and
/// <experiment>_cells.csv (flat aggregates) into out_dir.
void emit_report(const ExperimentReport &report, const std::filesystem::path &out_dir);

}  // namespace dppmse::experiments
