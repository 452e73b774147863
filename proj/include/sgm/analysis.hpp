#pragma once

#include "sgm/quadrature.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace sgm {

inline constexpr int kDefaultQuadNodes = 48;

/// One model instance: a family, its frequency set and a parameter vector.
struct ModelSpec {
    Family family = Family::sgm;
    FrequencySet freqs;
    Vector theta;
};

/// E[f(X)] under the model by tensor quadrature (m ≤ 4).
double expectation(const ModelSpec& model, const std::function<double(const Vector&)>& f, int nodes = kDefaultQuadNodes);

/// Corr(X_i, X_j), zero-based axes.
double correlation(const ModelSpec& model, int i, int j, int nodes = kDefaultQuadNodes);

/// E[(X₁−½)(X₂−½)²] / (V[X₁]^{1/2} V[X₂]) for a two-dimensional model.
double beta122(const ModelSpec& model, int nodes = kDefaultQuadNodes);

/// E[(X₁−EX₁)(X₂−EX₂)(X₃−EX₃)] / √(V[X₁]V[X₂]V[X₃]) for a three-dimensional model.
double beta123(const ModelSpec& model, int nodes = kDefaultQuadNodes);

/// I(X₁;X₂|X₃) for a three-dimensional model. Marginals come from the same
/// tensor grid as the joint; integrands are clipped below at 1e-300 before the log.
/// Throws InvalidArgument if the density is negative at a node.
double cond_mutual_info(const ModelSpec& model, int nodes = kDefaultQuadNodes);

/// Density of (X_a)_{a ∈ axes} at x_sub, integrating out the other coordinates
/// (at most 3 of them).
double marginal_density(const ModelSpec& model, const std::vector<int>& axes, const Vector& x_sub,
                        int nodes = kDefaultQuadNodes);

/// ∫ p s sᵀ with s the score of the model at θ.
Matrix fisher_numeric(const ModelSpec& model, int nodes = kDefaultQuadNodes);

/// A fixed coordinate (zero-based axis, value) for conditional grids.
using Condition = std::pair<int, double>;

struct DensityGrid {
    int axis_i = 0;
    int axis_j = 1;
    Vector coords;  // shared regular grid k/(r−1) on both axes
    Matrix values;  // values(a, b) at (x_i, x_j) = (coords[a], coords[b])
};

/// Marginal (no conditions) or conditional density of (X_i, X_j) on a regular
/// resolution × resolution grid. Coordinates that are neither plotted nor fixed
/// are integrated out; the conditional normalizer uses the same rule.
DensityGrid density_grid(const ModelSpec& model, std::pair<int, int> axes, int resolution,
                         const std::vector<Condition>& conditions = {}, int nodes = kDefaultQuadNodes);

/// TSV with header `x_i<TAB>x_j<TAB>density` (one-based names), rows with the
/// first axis slowest, 17 significant digits.
void write_grid_tsv(std::ostream& out, const DensityGrid& grid);

struct Table1Row {
    std::string freqs;  // frequency set of the row's models
    std::string quantity;
    double sgm = 0.0;
    double mixm = 0.0;
};

/// Summary rows: max correlation, max β₁₂₂ and max β₁₂₃ at their maximizers,
/// then the conditional-mutual-information coefficients I₁₂|₃/ε⁴ extrapolated from
/// ε = 0.05 and 0.025.
std::vector<Table1Row> table1(int nodes = kDefaultQuadNodes);

/// I₁₂|₃ / (θφ)² at θ = φ = ε for U = {(1,0,1), (0,1,1)}.
double cmi_ratio(Family family, double epsilon, int nodes = kDefaultQuadNodes);

}  // namespace sgm
