#include "dppmse/mechanism.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "dppmse/errors.hpp"
#include "dppmse/parallel.hpp"

namespace dppmse::mech {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_uniform(RandomSource &rng) {
    double u;
    do {
        u = rng.uniform01();
    } while (u == 0.0);
    return std::log(u);
}

models::ThetaVector propose(const models::ThetaVector &theta,
                            const std::vector<double> &step_sd, RandomSource &rng) {
    std::vector<double> p(theta.params);
    for (std::size_t j = 0; j < p.size(); ++j) {
        p[j] += rng.normal(0.0, step_sd[j]);
    }
    return models::ThetaVector(std::move(p));
}

// One Metropolis sweep of `iters` proposals; returns the acceptance count.
std::size_t sweep(const LogTargetFn &target, models::ThetaVector &theta,
                  TargetValue &current, const std::vector<double> &step_sd,
                  std::size_t iters, RandomSource &rng) {
    std::size_t accepted = 0;
    for (std::size_t i = 0; i < iters; ++i) {
        auto proposal = propose(theta, step_sd, rng);
        const TargetValue value = target(proposal, rng);
        if (log_uniform(rng) < value.log_density - current.log_density) {
            theta = std::move(proposal);
            current = value;
            ++accepted;
        }
    }
    return accepted;
}

}  // namespace

ChainResult run_chain(const LogTargetFn &target, std::size_t dim,
                      const ChainConfig &cfg, RandomSource &rng) {
    if (dim < 1) {
        throw DomainError("run_chain: dimension must be >= 1");
    }
    if (cfg.burn_in >= cfg.iterations) {
        throw DomainError("run_chain: burn_in must be < iterations");
    }
    if (cfg.thin < 1) {
        throw DomainError("run_chain: thin must be >= 1");
    }

    // Initial state: supplied, or Gaussian draws redrawn until the target is
    // finite (out-of-domain points have density zero).
    models::ThetaVector theta;
    TargetValue current{kNegInf, 0.0};
    if (cfg.init) {
        theta = *cfg.init;
        if (theta.size() != dim) {
            throw DomainError("run_chain: init has " + std::to_string(theta.size()) +
                              " entries, expected " + std::to_string(dim));
        }
        current = target(theta, rng);
        if (!(current.log_density > kNegInf)) {
            throw DomainError("run_chain: init point has zero target density");
        }
    } else {
        // Best of init_candidates exploratory draws; keeps the chain out of
        // zero-gradient plateaus far from the target's mass.
        bool found = false;
        const std::size_t wanted = std::max<std::size_t>(cfg.init_candidates, 1);
        std::size_t finite_seen = 0;
        for (std::size_t attempt = 0; attempt < 10000 && finite_seen < wanted;
             ++attempt) {
            std::vector<double> p(dim);
            for (auto &v : p) {
                v = rng.normal(0.0, cfg.init_sd);
            }
            models::ThetaVector candidate(std::move(p));
            const TargetValue value = target(candidate, rng);
            if (!(value.log_density > kNegInf)) {
                continue;
            }
            ++finite_seen;
            if (!found || value.log_density > current.log_density) {
                theta = std::move(candidate);
                current = value;
                found = true;
            }
        }
        if (!found) {
            throw DomainError("run_chain: could not find a valid initial point");
        }
    }

    std::vector<double> step_sd;
    if (!cfg.proposal_sd.empty()) {
        if (cfg.proposal_sd.size() == 1) {
            step_sd.assign(dim, cfg.proposal_sd[0]);
        } else if (cfg.proposal_sd.size() == dim) {
            step_sd = cfg.proposal_sd;
        } else {
            throw DomainError("run_chain: proposal_sd must have 1 or dim entries");
        }
        for (double s : step_sd) {
            if (!(s > 0.0)) {
                throw DomainError("run_chain: proposal_sd entries must be > 0");
            }
        }
    } else {
        // Discarded pilot. A coarse-to-fine ladder moves the chain out of the
        // initialization region, then the scale adapts toward 20-40%
        // acceptance. The scale is clamped so plateau regions (acceptance
        // near 1 in every direction) cannot blow it up.
        const double scale_cap = 3.0 * cfg.init_sd;
        double scale = 1.0;
        for (const double ladder : {3.0, 1.0}) {
            step_sd.assign(dim, ladder);
            sweep(target, theta, current, step_sd, 40, rng);
            scale = ladder;
        }
        for (int round = 0; round < 8; ++round) {
            step_sd.assign(dim, scale);
            const std::size_t accepted =
                sweep(target, theta, current, step_sd, 30, rng);
            const double rate = static_cast<double>(accepted) / 30.0;
            if (rate < 0.20) {
                scale *= 0.55;
            } else if (rate > 0.40) {
                scale = std::min(scale * 1.7, scale_cap);
            }
        }
        step_sd.assign(dim, scale);
    }

    ChainResult result;
    result.diagnostics.tuned_proposal_sd = step_sd;
    std::size_t accepted_post = 0;
    for (std::size_t it = 0; it < cfg.iterations; ++it) {
        const std::size_t acc = sweep(target, theta, current, step_sd, 1, rng);
        if (it >= cfg.burn_in) {
            accepted_post += acc;
            if ((it - cfg.burn_in) % cfg.thin == 0) {
                result.kept.push_back(theta);
                result.diagnostics.utility_trace.push_back(current.utility);
            }
        }
    }
    const std::size_t post = cfg.iterations - cfg.burn_in;
    result.diagnostics.acceptance_rate =
        static_cast<double>(accepted_post) / static_cast<double>(post);
    result.diagnostics.acceptance_warning =
        result.diagnostics.acceptance_rate < 0.05 ||
        result.diagnostics.acceptance_rate > 0.95;
    result.final_theta = result.kept.back();
    return result;
}

double log_target(const DataMatrix &x, const models::ThetaVector &theta,
                  double eps_draw, const MechanismConfig &cfg,
                  const models::GenerativeModel &model, RandomSource &rng) {
    if (!(eps_draw > 0.0)) {
        throw DomainError("log_target: eps_draw must be > 0");
    }
    const double delta_u =
        cfg.delta_u > 0.0 ? cfg.delta_u : pmse::sensitivity_bound(x.rows());
    if (!model.in_domain(theta)) {
        return kNegInf;
    }
    const auto estimate =
        pmse::utility(x, theta, model, cfg.replicates_m, cfg.pmse, rng);
    return -eps_draw * estimate.mean_pmse / (2.0 * delta_u) +
           models::log_prior(cfg.prior, theta);
}

models::ThetaVector metropolis_sample(const DataMatrix &x,
                                      const models::GenerativeModel &model,
                                      double eps_draw, const MechanismConfig &cfg,
                                      RandomSource &rng,
                                      ChainDiagnostics *diagnostics) {
    if (!(eps_draw > 0.0)) {
        throw DomainError("metropolis_sample: eps_draw must be > 0");
    }
    const double delta_u =
        cfg.delta_u > 0.0 ? cfg.delta_u : pmse::sensitivity_bound(x.rows());
    const pmse::UtilityEvaluator evaluator(x, cfg.pmse);
    const LogTargetFn target = [&](const models::ThetaVector &theta,
                                   RandomSource &r) -> TargetValue {
        if (!model.in_domain(theta)) {
            return {kNegInf, std::numeric_limits<double>::quiet_NaN()};
        }
        const auto estimate = evaluator(theta, model, cfg.replicates_m, r);
        return {-eps_draw * estimate.mean_pmse / (2.0 * delta_u) +
                    models::log_prior(cfg.prior, theta),
                estimate.mean_pmse};
    };
    auto result = run_chain(target, model.arity(), cfg.chain, rng);
    if (diagnostics != nullptr) {
        *diagnostics = std::move(result.diagnostics);
    }
    return std::move(result.final_theta);
}

MechanismOutput run_mechanism(const DataMatrix &x,
                              const models::GenerativeModel &model,
                              const MechanismConfig &cfg, RandomSource &rng) {
    if (!(cfg.epsilon_total > 0.0)) {
        throw DomainError("run_mechanism: epsilon_total must be > 0");
    }
    if (cfg.num_datasets < 1) {
        throw DomainError("run_mechanism: num_datasets must be >= 1");
    }
    if (model.columns() != x.cols()) {
        throw ShapeError("run_mechanism: model emits " +
                         std::to_string(model.columns()) + " columns but data has " +
                         std::to_string(x.cols()));
    }
    const std::size_t l = cfg.num_datasets;
    const double eps_draw = cfg.epsilon_total / static_cast<double>(l);
    const std::uint64_t master = rng.next_raw();

    MechanismOutput out;
    out.thetas.resize(l);
    out.datasets.reserve(l);
    out.generation_seeds.resize(l);
    out.diagnostics.resize(l);

    std::vector<std::optional<DataMatrix>> datasets(l);
    parallel_for(l, cfg.threads, [&](std::size_t i) {
        RandomSource chain_rng(mix_seed(master, 2 * i));
        out.thetas[i] =
            metropolis_sample(x, model, eps_draw, cfg, chain_rng, &out.diagnostics[i]);
        // Post-processing: synthesis sees only (theta, n_rows, seed).
        out.generation_seeds[i] = mix_seed(master, 2 * i + 1);
        datasets[i] = models::generate_from_theta(model, out.thetas[i], x.rows(),
                                                  out.generation_seeds[i])
                          .renamed(x.column_names());
    });
    for (std::size_t i = 0; i < l; ++i) {
        out.datasets.push_back(std::move(*datasets[i]));
        out.epsilon_spent += eps_draw;
    }
    return out;
}

}  // namespace dppmse::mech
