#pragma once

#include "sgm/model.hpp"

#include <string>
#include <vector>

namespace sgm {

/// θ ↦ A₀ + Σ_k θ_k A_k for symmetric d×d matrices.
///
/// The coefficient matrices are stored vectorized: column k of `coefficients`
/// is vec(A_k) (column-major, d² rows).
struct AffineMatrix {
    Matrix constant;
    Matrix coefficients;

    AffineMatrix() = default;
    AffineMatrix(Matrix constant_term, int nvars);

    int size() const { return static_cast<int>(constant.rows()); }
    int nvars() const { return static_cast<int>(coefficients.cols()); }

    /// Adds `scale * a` to A_k.
    void add_coefficient(int k, const MatrixRef& a, double scale = 1.0);
    Matrix coefficient(int k) const;
    Matrix evaluate(const VectorRef& theta) const;
};

struct ObjectiveTerm {
    AffineMatrix map;
    double weight = 1.0;
};

/// aᵀθ ≤ b.
struct LinearConstraint {
    Vector a;
    double b = 0.0;
};

/// maximize cᵀθ + Σ_t w_t log det G_t(θ)
/// subject to F_c(θ) ≻ 0 and aᵢᵀθ ≤ bᵢ.
///
/// θ = 0 must be strictly feasible and every G_t(0) positive definite; the
/// solver always starts there.
struct MaxDetProblem {
    int nvars = 0;
    std::vector<ObjectiveTerm> objective_terms;
    Vector linear_objective;  // c; empty means zero
    std::vector<AffineMatrix> psd_constraints;
    std::vector<LinearConstraint> linear_constraints;

    /// Throws InvalidArgument on shape mismatches, asymmetric data or no objective terms.
    void validate() const;
};

struct SolverConfig {
    double barrier_init = 1.0;
    double barrier_shrink = 0.2;
    double newton_tol = 1e-9;
    double gap_tol = 1e-12;  // outer loop also runs until μ·ν ≤ gap_tol, ν the total constraint order
    int max_newton = 50;
    int max_outer = 30;

    void validate() const;
};

struct PathPoint {
    double barrier_weight = 0.0;
    double objective = 0.0;
};

struct SolveReport {
    Vector theta;
    double objective = 0.0;
    double kkt_residual = 0.0;
    double barrier_weight = 0.0;  // μ at the returned point
    double gradient_norm_at_start = 0.0;
    int outer_iterations = 0;
    int newton_iterations = 0;
    bool converged = false;
    std::string status;
    std::vector<PathPoint> path;  // central points, one per outer iteration
};

struct Evaluation {
    double value = 0.0;
    Vector gradient;
    Matrix hessian;
};

/// Value and exact derivatives of cᵀθ + Σ w log det G(θ).
/// Throws NumericalError if some G_t(θ) is not positive definite.
Evaluation objective_eval(const MaxDetProblem& problem, const VectorRef& theta);

/// Objective value only; −∞ when θ is outside the domain.
double objective_value(const MaxDetProblem& problem, const VectorRef& theta);

/// Smallest constraint margin at θ (min eigenvalue of each F_c, slack of each
/// linear row). +∞ when there are no constraints.
double constraint_margin(const MaxDetProblem& problem, const VectorRef& theta);

/// Objective plus μ·(Σ log det F_c + Σ log slack). −∞ outside the domain.
double barrier_value(const MaxDetProblem& problem, const VectorRef& theta, double mu);

/// Barrier objective with derivatives. Throws NumericalError outside the domain.
Evaluation barrier_eval(const MaxDetProblem& problem, const VectorRef& theta, double mu);

struct BarrierStep {
    enum class Status { stepped, centered, line_search_failed };

    Vector theta;
    double decrement = 0.0;  // Newton decrement λ² = gᵀ(−H)⁻¹g at the input point
    double step = 0.0;
    Status status = Status::stepped;
};

/// One damped Newton step on the barrier objective with backtracking.
/// Steps that leave the domain or fail the sufficient-increase test are halved
/// until the step drops below 1e-14, which is reported as line_search_failed.
BarrierStep barrier_step(const MaxDetProblem& problem, const VectorRef& theta, double mu,
                         const SolverConfig& config = {});

/// First-order optimality residual at θ.
///
/// Constraints with margin above max(√μ, 1e-9) are treated as inactive and carry
/// their barrier multipliers μ/s (linear) or μF⁻¹ (matrix). The remaining ones
/// get nonnegative multipliers fitted by NNLS against the objective gradient, in
/// the directions their barrier multipliers point. The result is the stationarity
/// norm plus the total complementarity gap; it is zero at an exact optimum and
/// equals ‖∇f‖ when there are no constraints.
double kkt_residual(const MaxDetProblem& problem, const VectorRef& theta, double mu = 0.0);

/// Barrier path following from θ = 0.
///
/// Throws NumericalError("infeasible start") if θ = 0 is not strictly feasible.
/// Exhausting the iteration budget returns the last iterate with converged = false.
SolveReport solve(const MaxDetProblem& problem, const SolverConfig& config = {});

}  // namespace sgm
