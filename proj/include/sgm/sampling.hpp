#pragma once

#include "sgm/model.hpp"

#include <cstdint>

namespace sgm {

/// Π_j (1 + Σ_u |θ_u| u_j²), an upper bound on p(·|θ) for feasible θ.
double rejection_bound(const FrequencySet& freqs, const VectorRef& theta);

/// 1 + Σ_u |θ_u| ‖u‖², an upper bound on p̃(·|θ).
double mixm_rejection_bound(const FrequencySet& freqs, const VectorRef& theta);

double family_bound(Family family, const FrequencySet& freqs, const VectorRef& theta);

struct SampleResult {
    Matrix samples;
    std::uint64_t proposals = 0;
    double bound = 1.0;
};

/// n exact draws from p(·|θ) (or p̃) by uniform-proposal rejection.
///
/// The seed fixes the stream: each proposal draws m uniforms for x and then one
/// for the accept test. Throws IndefiniteHessian (or NumericalError for MixM)
/// when a proposal reveals θ is infeasible, and NumericalError if a density
/// exceeds the bound.
SampleResult sample_family(Family family, const FrequencySet& freqs, const VectorRef& theta, std::size_t n,
                           std::uint64_t seed);

Matrix sample_sgm(const FrequencySet& freqs, const VectorRef& theta, std::size_t n, std::uint64_t seed);
Matrix sample_mixm(const FrequencySet& freqs, const VectorRef& theta, std::size_t n, std::uint64_t seed);

/// n draws of the five-dimensional benchmark: x₁ ~ N(0,1), x₂ ~ N(x₁,1),
/// x₃ ~ N(0, 1 + tanh x₂), (x₄,x₅) standard bivariate normal with correlation tanh x₃.
Matrix sample_benchmark5(std::size_t n, std::uint64_t seed);

}  // namespace sgm
