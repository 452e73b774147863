#pragma once

#include "sgm/frequency_set.hpp"

#include <Eigen/Core>

#include <span>

namespace sgm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using VectorRef = Eigen::Ref<const Eigen::VectorXd>;
using MatrixRef = Eigen::Ref<const Eigen::MatrixXd>;

/// Pivot tolerance separating "positive definite" from "semidefinite".
inline constexpr double kPdTolerance = 1e-10;

/// The two density families sharing a frequency set and parameter vector.
enum class Family { sgm, mixm };

/// cos(π k x_j) and sin(π k x_j) for k = 0..order, j = 0..m-1.
///
/// Every model quantity is a polynomial in these values, so building the
/// table once per point is the only transcendental work. Coordinates are not
/// clipped; the extended (periodic, even) potential is evaluated outside [0,1].
class TrigTable {
public:
    TrigTable(const VectorRef& x, int order);

    double cos(int j, int k) const { return c_(k, j); }
    double sin(int j, int k) const { return s_(k, j); }
    int dim() const { return static_cast<int>(c_.cols()); }

private:
    Matrix c_;
    Matrix s_;
};

/// Π_j cos(π u_j x_j).
double cosine_product(std::span<const int> u, const TrigTable& trig);

/// H_u(x) = D²(−π⁻² Π_j cos(π u_j x_j)).
Matrix hessian_basis(std::span<const int> u, const VectorRef& x);
void add_hessian_basis(std::span<const int> u, const TrigTable& trig, double weight, Matrix& out);

/// D²ψ(x|θ) = I + Σ_u θ_u H_u(x). Requires x ∈ [0,1]^m.
Matrix hessian(const FrequencySet& freqs, const VectorRef& x, const VectorRef& theta);

/// Same as hessian() without the domain check, for the periodic extension.
Matrix hessian_extended(const FrequencySet& freqs, const VectorRef& x, const VectorRef& theta);

/// ψ(x|θ) = xᵀx/2 − Σ_u (θ_u/π²) Π_j cos(π u_j x_j).
double potential(const FrequencySet& freqs, const VectorRef& x, const VectorRef& theta);

/// Dψ(x|θ), the Brenier map from p(·|θ) to the uniform density.
Vector gradient_map(const FrequencySet& freqs, const VectorRef& x, const VectorRef& theta);

/// p(x|θ) = det D²ψ(x|θ).
///
/// Returns 0 when the smallest LDLᵀ pivot lies in [−kPdTolerance, kPdTolerance]
/// and throws IndefiniteHessian when it is below −kPdTolerance.
double density(const FrequencySet& freqs, const VectorRef& x, const VectorRef& theta);

/// Determinant of a symmetric matrix with the same pivot conventions as density().
double pd_determinant(const MatrixRef& g);

/// ∂ log p(x|θ)/∂θ_u = tr(G⁻¹ H_u(x)) with G = D²ψ(x|θ).
/// Throws NumericalError if G is not positive definite.
Vector score(const FrequencySet& freqs, const VectorRef& x, const VectorRef& theta);

/// p̃(x|θ) = 1 + Σ_u θ_u ‖u‖² Π_j cos(π u_j x_j).
double mixm_density(const FrequencySet& freqs, const VectorRef& x, const VectorRef& theta);

/// ∂ log p̃/∂θ_u. Throws NumericalError if p̃(x|θ) ≤ 0.
Vector mixm_score(const FrequencySet& freqs, const VectorRef& x, const VectorRef& theta);

/// Density of either family.
double family_density(Family family, const FrequencySet& freqs, const VectorRef& x, const VectorRef& theta);

/// Diagonal of the Fisher information at θ = 0 (shared by both families):
/// J_uu = ‖u‖⁴ / 2^|σ(u)|.
Vector fisher_origin(const FrequencySet& freqs);

/// Fisher information of the one-dimensional model U = {u} at θ.
/// Requires θ² u⁴ < 1; throws std::domain_error otherwise.
double fisher_closed_1d(int u, double theta);

/// Fisher information of the correlation model U = {(1,1)} at θ, |θ| < 1.
double fisher_closed_corr(double theta);

/// Throws InvalidArgument unless θ has one finite entry per frequency and x has dimension m.
void check_dimensions(const FrequencySet& freqs, const VectorRef& x, const VectorRef& theta);

}  // namespace sgm
