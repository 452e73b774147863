#pragma once

#include "sgm/feasibility.hpp"
#include "sgm/maxdet.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace sgm {

/// Fitted estimates with |θ̂_u| below this are reported as exact zeros.
inline constexpr double kSparseThreshold = 1e-8;

/// Column means and population standard deviations of a training sample.
struct Preprocessor {
    Vector mean;
    Vector sd;

    /// Throws DataError if n < 2, a value is not finite or a column is constant.
    static Preprocessor fit(const MatrixRef& raw);
    /// (D − mean) / sd, columnwise.
    Matrix standardize(const MatrixRef& raw) const;
    /// Φ applied to standardize(raw), clamped into the open unit interval.
    Matrix to_unit(const MatrixRef& raw) const;
};

struct Preprocessed {
    Matrix standardized;
    Matrix unit;
};

Preprocessed preprocess(const MatrixRef& raw);

/// Throws DataError unless data is nonempty with entries in [0,1] and m columns.
void check_unit_data(const MatrixRef& data, int m);

struct FitResult {
    Family family = Family::sgm;
    FrequencySet freqs;
    RegionSpec region;
    Vector theta;      // reported estimate, sparse entries set to 0
    Vector theta_raw;  // solver output before thresholding
    Vector scaled;     // √J_uu θ̂_u with J taken at the origin
    double loglik = 0.0;
    SolveReport report;
};

/// Constrained MLE of the SGM over the lattice or lit region.
FitResult fit_sgm(const MatrixRef& data, const FrequencySet& freqs, const RegionSpec& region,
                  const SolverConfig& config = {});

/// Constrained MLE of MixM over its lattice or lit region.
FitResult fit_mixm(const MatrixRef& data, const FrequencySet& freqs, const RegionSpec& region,
                   const SolverConfig& config = {});

FitResult fit_family(Family family, const MatrixRef& data, const FrequencySet& freqs, const RegionSpec& region,
                     const SolverConfig& config = {});

/// Σ_t log p(x(t)|θ̂) for either family; −∞ if some test density is ≤ 0.
double loglik(Family family, const FrequencySet& freqs, const VectorRef& theta, const MatrixRef& data);

struct ConcentrationMatrix {
    Matrix C;
    Matrix sigma;  // sample correlation used for the fit
    double tau = 1.0;
    double budget = 0.0;  // τ Σ_{i<j} |(Σ̂⁻¹)_ij|
    SolveReport report;
};

/// Sample correlation matrix (population moments). Throws DataError on a constant column.
Matrix sample_correlation(const MatrixRef& data);

/// maximize log det C − tr(Σ̂C) subject to Σ_{i<j}|C_ij| ≤ τ Σ_{i<j}|(Σ̂⁻¹)_ij|,
/// with Σ̂ the sample correlation of `standardized`. Requires τ ∈ [0,1].
ConcentrationMatrix fit_gauss_lasso(const MatrixRef& standardized, double tau, const SolverConfig& config = {});

/// ρ̂_ij = −C_ij / √(C_ii C_jj), unit diagonal.
Matrix partial_correlations(const MatrixRef& c);

/// Σ_t [log φ(d(t)|0, C⁻¹) − log φ(d(t)|0, I)] on standardized test data.
double gauss_loglik(const MatrixRef& c, const MatrixRef& standardized);

enum class ModelKind { sgm, mixm, gauss };

struct CvOptions {
    ModelKind model = ModelKind::sgm;
    RegionSpec::Kind region = RegionSpec::Kind::lit;
    int M = 0;  // lattice resolution; 0 picks U_max + 1
    std::vector<double> tau_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    int folds = 5;
    std::uint64_t seed = 1;
    bool preprocess = true;
    bool global_preprocess = false;  // fit mean/sd once on all rows instead of per training fold
    int jobs = 1;
    std::optional<FrequencySet> freqs;  // defaults to the standard set
    SolverConfig solver;
};

struct CvRow {
    double tau = 0.0;  // unused (0) for lattice fits
    double loglik = 0.0;
};

struct CvResult {
    std::vector<CvRow> rows;
    std::size_t best = 0;
};

/// Fold label (0..K−1) per row: a seeded shuffle dealt round robin.
std::vector<int> fold_assignment(std::size_t n, int folds, std::uint64_t seed);

/// Held-out predictive log-likelihood summed over folds, one row per τ
/// (a single row for lattice fits). `best` is the first row with the largest value.
CvResult cross_validate(const MatrixRef& raw, const CvOptions& options);

}  // namespace sgm
