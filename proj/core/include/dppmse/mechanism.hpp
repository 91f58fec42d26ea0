#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "dppmse/data_matrix.hpp"
#include "dppmse/models.hpp"
#include "dppmse/pmse.hpp"
#include "dppmse/rng.hpp"

namespace dppmse::mech {

/// Random-walk Metropolis settings. When proposal_sd is empty, a discarded
/// pilot phase tunes a shared step scale toward 20-40% acceptance.
struct ChainConfig {
    std::size_t iterations = 2000;
    std::size_t burn_in = 500;
    std::size_t thin = 1;
    std::vector<double> proposal_sd;          // per-parameter; empty = pilot-tuned
    std::optional<models::ThetaVector> init;  // unset = Gaussian draws, sd init_sd
    double init_sd = 10.0;
    /// Exploratory init draws; the chain starts from the highest-density one.
    std::size_t init_candidates = 32;
};

struct ChainDiagnostics {
    double acceptance_rate = 0.0;   // post burn-in
    bool acceptance_warning = false;  // rate outside [0.05, 0.95]
    std::vector<double> utility_trace;  // utility at kept states (NaN for stubs)
    std::vector<double> tuned_proposal_sd;
};

/// Exponential-mechanism parameters for one run. delta_u <= 0 selects the
/// default sensitivity bound 1/n for the input's row count.
struct MechanismConfig {
    double epsilon_total = 1.0;
    std::size_t num_datasets = 1;  // l; each draw spends epsilon_total / l
    std::size_t replicates_m = 20;
    double delta_u = 0.0;
    models::FlatPrior prior{};
    ChainConfig chain{};
    pmse::PmseConfig pmse{};
    unsigned threads = 0;
};

struct MechanismOutput {
    std::vector<models::ThetaVector> thetas;
    std::vector<DataMatrix> datasets;
    std::vector<std::uint64_t> generation_seeds;  // datasets[i] = g(thetas[i]; seed)
    double epsilon_spent = 0.0;
    std::vector<ChainDiagnostics> diagnostics;
};

/// A (possibly noisy) log-density evaluation: the chain keeps log_density and
/// records utility for diagnostics.
struct TargetValue {
    double log_density = 0.0;
    double utility = 0.0;
};
using LogTargetFn = std::function<TargetValue(const models::ThetaVector &, RandomSource &)>;

struct ChainResult {
    models::ThetaVector final_theta;
    std::vector<models::ThetaVector> kept;  // post burn-in, thinned
    ChainDiagnostics diagnostics;
};

/// Random-walk Metropolis on an arbitrary (noisy) log-target. The current
/// state's target value is retained between iterations; each proposal is
/// evaluated fresh.
ChainResult run_chain(const LogTargetFn &target, std::size_t dim,
                      const ChainConfig &cfg, RandomSource &rng);

/// log f(theta) = -eps_draw * u(x, theta) / (2 delta_u) + log prior(theta).
/// Returns -infinity for theta outside the model domain (auto-reject).
double log_target(const DataMatrix &x, const models::ThetaVector &theta,
                  double eps_draw, const MechanismConfig &cfg,
                  const models::GenerativeModel &model, RandomSource &rng);

/// Draws one private parameter vector at budget eps_draw.
models::ThetaVector metropolis_sample(const DataMatrix &x,
                                      const models::GenerativeModel &model,
                                      double eps_draw, const MechanismConfig &cfg,
                                      RandomSource &rng,
                                      ChainDiagnostics *diagnostics = nullptr);

/// Full mechanism: l independent chains at eps_total / l each, then one
/// synthetic dataset per draw via generate_from_theta (which never sees x).
MechanismOutput run_mechanism(const DataMatrix &x,
                              const models::GenerativeModel &model,
                              const MechanismConfig &cfg, RandomSource &rng);

}  // namespace dppmse::mech
