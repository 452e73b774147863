#pragma once

#include "sgm/model.hpp"

#include <cstdint>
#include <functional>

namespace sgm {

/// Default cap on the number of lattice points a single check may visit.
inline constexpr std::uint64_t kDefaultLatticeCap = 10'000'000;

/// Which tractable subset of the feasible region an estimator works over.
struct RegionSpec {
    enum class Kind { lattice, lit };

    Kind kind = Kind::lit;
    int M = 0;         // lattice resolution, kind == lattice
    double tau = 1.0;  // L1 budget, kind == lit

    static RegionSpec lattice(int M) { return {Kind::lattice, M, 0.0}; }
    static RegionSpec lit(double tau) { return {Kind::lit, 0, tau}; }

    /// Throws InvalidArgument if M < U_max + 1 or τ ∉ [0,1].
    void validate(const FrequencySet& freqs) const;
};

/// min_j (τ − Σ_u |θ_u| u_j²). θ lies in the little region of size τ iff this is ≥ 0.
double lit_margin(const FrequencySet& freqs, const VectorRef& theta, double tau);

/// τ − Σ_u |θ_u| ‖u‖², the conservative region of the mixture family.
double mixm_lit_margin(const FrequencySet& freqs, const VectorRef& theta, double tau);

/// (K_M θ)_u = θ_u / Π_j (1 − u_j/M).
Vector scale_km(const FrequencySet& freqs, const VectorRef& theta, int M);

/// Calls visit(ξ) for every ξ ∈ {0, 1/M, ..., 1}^m in odometer order (first axis fastest).
/// Throws ResourceLimit if (M+1)^m exceeds cap.
void for_each_lattice_point(int dim, int M, const std::function<void(const Vector&)>& visit,
                            std::uint64_t cap = kDefaultLatticeCap);

struct LatticeCheck {
    bool feasible = false;
    double margin = 0.0;  // smallest eigenvalue (or density) over the lattice
};

/// Membership in the lattice inner approximation: D²ψ(ξ|K_M θ) has smallest
/// eigenvalue > kPdTolerance at every lattice point ξ.
LatticeCheck lattice_feasible(const FrequencySet& freqs, const VectorRef& theta, int M,
                              std::uint64_t cap = kDefaultLatticeCap);

/// Mixture analogue: p̃(ξ|K_M θ) > kPdTolerance at every lattice point.
LatticeCheck mixm_lattice_feasible(const FrequencySet& freqs, const VectorRef& theta, int M,
                                   std::uint64_t cap = kDefaultLatticeCap);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const MatrixRef& a);

struct MinEigOptions {
    int resolution = 0;        // points per axis; 0 picks 201 (m ≤ 2) or 41 (m = 3)
    int multistarts = 64;      // random starts for m ≥ 4
    std::uint64_t seed = 12345;
};

/// Approximate min over x ∈ [0,1]^m of λ_min(D²ψ(x|θ)).
///
/// Dense grid for m ≤ 3. For m ≥ 4, coordinate pattern search from every cube
/// vertex (m ≤ 12) plus `multistarts` uniform random starts.
double min_eig_grid(const FrequencySet& freqs, const VectorRef& theta, const MinEigOptions& options = {});

/// Exact membership in the feasible region of U = {(1,1),(2,2)}.
///
/// With ρ₁ = θ₁₁ and ρ₂ = 4θ₂₂ the smallest Hessian eigenvalue over the square is
/// min_z 1 + ρ₁ cos z + ρ₂ cos 2z, a quadratic in cos z minimized in closed form.
bool ma2_feasible(double theta11, double theta22);

/// min_z (1 + ρ₁ cos z + ρ₂ cos 2z) for ρ₁ = θ₁₁, ρ₂ = 4θ₂₂.
double ma2_margin(double theta11, double theta22);

/// Q_M(z) = (1/2M²) (sin(πMz/2) / sin(πz/2))², evaluated through its cosine sum
/// so even-integer z needs no special casing.
double fejer_kernel(int M, double z);

/// Σ_{ξ ∈ R_M^m} D²ψ(ξ|K_M θ) Π_j Q_M(x_j − ξ_j) with R_M = {−(M−1)/M, ..., 1}.
/// Equals D²ψ(x|θ) for M ≥ U_max + 1.
Matrix fejer_reconstruct(const FrequencySet& freqs, const VectorRef& theta, int M, const VectorRef& x,
                         std::uint64_t cap = kDefaultLatticeCap);

}  // namespace sgm
