#pragma once

#include "sgm/estimators.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sgm::cli {

struct SimulationOptions {
    int replicates = 20;
    int n_train = 40;
    int n_test = 10;
    std::uint64_t seed = 1;
    int jobs = 1;
    double tau = 1.0;  // τ for the reported coefficients
    std::vector<double> tau_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    SolverConfig solver;
};

struct Summary {
    double mean = 0.0;
    double se = 0.0;  // standard error of the mean
    int count = 0;
};

Summary summarize(const std::vector<double>& values);

struct CoefficientSummary {
    Frequency u;  // for the Gaussian model, the indicator of the pair (i, j)
    Summary value;
};

struct PredictiveSummary {
    double tau = 0.0;
    Summary loglik;
};

struct ModelSummary {
    std::vector<CoefficientSummary> coefficients;  // sorted by decreasing |mean|
    std::vector<PredictiveSummary> predictive;     // one per τ in the grid
    std::size_t best = 0;                          // index of the largest mean
};

struct SimulationResult {
    ModelSummary sgm;
    ModelSummary mixm;
    ModelSummary gauss;
    std::vector<std::string> failures;  // "replicate r: message"
    int completed = 0;
};

/// Replicated benchmark experiment: draw n_train and n_test rows from the
/// five-dimensional benchmark, preprocess with training statistics, fit SGM,
/// MixM (lit region, standard frequencies) and the Gaussian lasso. Coefficients
/// are the √J-scaled SGM/MixM estimates and Gaussian partial correlations at τ;
/// held-out log-likelihoods are reported for each τ in the grid.
/// Failed replicates are recorded and left out of the averages.
SimulationResult run_simulation(const SimulationOptions& options);

/// Deterministic 64-bit seed for replicate r and stream k.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t r, std::uint64_t k);

}  // namespace sgm::cli
