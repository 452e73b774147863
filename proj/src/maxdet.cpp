#include "sgm/maxdet.hpp"

#include "sgm/errors.hpp"
#include "sgm/nnls.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace sgm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kMinStep = 1e-14;
constexpr double kArmijo = 0.01;

struct Accumulator {
    double value = 0.0;
    Vector gradient;
    Matrix hessian;
    bool derivatives = false;

    Accumulator(int nvars, bool with_derivatives) : derivatives(with_derivatives) {
        if (derivatives) {
            gradient = Vector::Zero(nvars);
            hessian = Matrix::Zero(nvars, nvars);
        }
    }
};

// weight · log det(map(θ)). Returns false when map(θ) is not positive definite.
bool add_log_det(const AffineMatrix& map, const VectorRef& theta, double weight, Accumulator& acc) {
    const int d = map.size();
    const int k = map.nvars();
    Eigen::LLT<Matrix> llt(map.evaluate(theta));
    if (llt.info() != Eigen::Success) {
        return false;
    }
    const Matrix l = llt.matrixL();
    const Vector diag = l.diagonal();
    if (!diag.allFinite() || diag.minCoeff() <= 0.0) {
        return false;
    }
    acc.value += weight * 2.0 * diag.array().log().sum();
    if (!acc.derivatives) {
        return true;
    }
    // W_k = L⁻¹ A_k L⁻ᵀ: gradient tr W_k, curvature −⟨W_k, W_l⟩.
    const Matrix linv = l.triangularView<Eigen::Lower>().solve(Matrix::Identity(d, d));
    Matrix w(d * d, k);
    Matrix t(d, d);
    for (int c = 0; c < k; ++c) {
        Eigen::Map<const Matrix> a(map.coefficients.col(c).data(), d, d);
        Eigen::Map<Matrix> wk(w.col(c).data(), d, d);
        t.noalias() = linv * a;
        wk.noalias() = t * linv.transpose();
        acc.gradient[c] += weight * wk.trace();
    }
    acc.hessian.noalias() -= weight * (w.transpose() * w);
    return true;
}

bool add_objective(const MaxDetProblem& problem, const VectorRef& theta, Accumulator& acc) {
    for (const auto& term : problem.objective_terms) {
        if (!add_log_det(term.map, theta, term.weight, acc)) {
            return false;
        }
    }
    if (problem.linear_objective.size() > 0) {
        acc.value += problem.linear_objective.dot(theta);
        if (acc.derivatives) {
            acc.gradient += problem.linear_objective;
        }
    }
    return true;
}

bool add_barrier(const MaxDetProblem& problem, const VectorRef& theta, double mu, Accumulator& acc) {
    for (const auto& con : problem.psd_constraints) {
        if (!add_log_det(con, theta, mu, acc)) {
            return false;
        }
    }
    for (const auto& con : problem.linear_constraints) {
        const double slack = con.b - con.a.dot(theta);
        if (!(slack > 0.0)) {
            return false;
        }
        acc.value += mu * std::log(slack);
        if (acc.derivatives) {
            acc.gradient -= (mu / slack) * con.a;
            acc.hessian.noalias() -= (mu / (slack * slack)) * (con.a * con.a.transpose());
        }
    }
    return true;
}

// ν = Σ size(F_c) + #linear rows; the barrier duality gap at μ is μν.
double barrier_order(const MaxDetProblem& problem) {
    double order = static_cast<double>(problem.linear_constraints.size());
    for (const auto& con : problem.psd_constraints) {
        order += con.size();
    }
    return order;
}

// Newton direction for maximizing a concave function with curvature `hessian`.
Vector newton_direction(const Matrix& hessian, const Vector& gradient) {
    const Matrix neg = -hessian;
    const double scale = 1.0 + neg.cwiseAbs().maxCoeff();
    double shift = 0.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
        Eigen::LDLT<Matrix> ldlt(neg + shift * Matrix::Identity(neg.rows(), neg.cols()));
        if (ldlt.info() == Eigen::Success && ldlt.vectorD().minCoeff() > 0.0) {
            Vector dir = ldlt.solve(gradient);
            if (dir.allFinite()) {
                return dir;
            }
        }
        shift = shift == 0.0 ? 1e-12 * scale : shift * 100.0;
    }
    throw NumericalError("Newton system is singular");
}

}  // namespace

AffineMatrix::AffineMatrix(Matrix constant_term, int nvars)
    : constant(std::move(constant_term)), coefficients(Matrix::Zero(constant.rows() * constant.rows(), nvars)) {}

void AffineMatrix::add_coefficient(int k, const MatrixRef& a, double scale) {
    const auto d = constant.rows();
    Eigen::Map<Matrix> col(coefficients.col(k).data(), d, d);
    col += scale * a;
}

Matrix AffineMatrix::coefficient(int k) const {
    const auto d = constant.rows();
    return Eigen::Map<const Matrix>(coefficients.col(k).data(), d, d);
}

Matrix AffineMatrix::evaluate(const VectorRef& theta) const {
    const auto d = constant.rows();
    Vector flat = coefficients * theta;
    return constant + Eigen::Map<const Matrix>(flat.data(), d, d);
}

void MaxDetProblem::validate() const {
    if (nvars < 1) {
        throw InvalidArgument("problem needs at least one variable");
    }
    if (objective_terms.empty()) {
        throw InvalidArgument("problem needs at least one objective term");
    }
    auto check_map = [&](const AffineMatrix& map, const char* what) {
        if (map.constant.rows() != map.constant.cols() || map.constant.rows() == 0) {
            throw InvalidArgument(std::string(what) + ": constant term must be square");
        }
        if (map.nvars() != nvars || map.coefficients.rows() != map.constant.rows() * map.constant.rows()) {
            throw InvalidArgument(std::string(what) + ": coefficient block has the wrong shape");
        }
        const double tol = 1e-12 * (1.0 + map.constant.cwiseAbs().maxCoeff());
        if ((map.constant - map.constant.transpose()).cwiseAbs().maxCoeff() > tol) {
            throw InvalidArgument(std::string(what) + ": constant term is not symmetric");
        }
        for (int k = 0; k < nvars; ++k) {
            Matrix a = map.coefficient(k);
            if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + a.cwiseAbs().maxCoeff())) {
                throw InvalidArgument(std::string(what) + ": coefficient matrix is not symmetric");
            }
        }
    };
    for (const auto& term : objective_terms) {
        check_map(term.map, "objective term");
        if (!(term.weight > 0.0)) {
            throw InvalidArgument("objective weights must be positive");
        }
    }
    for (const auto& con : psd_constraints) {
        check_map(con, "matrix constraint");
    }
    for (const auto& con : linear_constraints) {
        if (con.a.size() != nvars) {
            throw InvalidArgument("linear constraint has the wrong length");
        }
    }
    if (linear_objective.size() != 0 && linear_objective.size() != nvars) {
        throw InvalidArgument("linear objective has the wrong length");
    }
}

void SolverConfig::validate() const {
    if (!(barrier_init > 0.0) || !(barrier_shrink > 0.0 && barrier_shrink < 1.0) || !(newton_tol > 0.0) ||
        !(gap_tol > 0.0) ||
        max_newton < 1 || max_outer < 1) {
        throw InvalidArgument("solver configuration values must be positive with barrier_shrink < 1");
    }
}

Evaluation objective_eval(const MaxDetProblem& problem, const VectorRef& theta) {
    Accumulator acc(problem.nvars, true);
    if (!add_objective(problem, theta, acc)) {
        throw NumericalError("objective matrix is not positive definite at this point");
    }
    return {acc.value, std::move(acc.gradient), std::move(acc.hessian)};
}

double objective_value(const MaxDetProblem& problem, const VectorRef& theta) {
    Accumulator acc(problem.nvars, false);
    return add_objective(problem, theta, acc) ? acc.value : kNegInf;
}

double constraint_margin(const MaxDetProblem& problem, const VectorRef& theta) {
    double margin = std::numeric_limits<double>::infinity();
    for (const auto& con : problem.psd_constraints) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(con.evaluate(theta), Eigen::EigenvaluesOnly);
        margin = std::min(margin, es.eigenvalues().minCoeff());
    }
    for (const auto& con : problem.linear_constraints) {
        margin = std::min(margin, con.b - con.a.dot(theta));
    }
    return margin;
}

double barrier_value(const MaxDetProblem& problem, const VectorRef& theta, double mu) {
    Accumulator acc(problem.nvars, false);
    if (!add_objective(problem, theta, acc) || !add_barrier(problem, theta, mu, acc)) {
        return kNegInf;
    }
    return acc.value;
}

Evaluation barrier_eval(const MaxDetProblem& problem, const VectorRef& theta, double mu) {
    Accumulator acc(problem.nvars, true);
    if (!add_objective(problem, theta, acc) || !add_barrier(problem, theta, mu, acc)) {
        throw NumericalError("point is outside the barrier domain");
    }
    return {acc.value, std::move(acc.gradient), std::move(acc.hessian)};
}

BarrierStep barrier_step(const MaxDetProblem& problem, const VectorRef& theta, double mu, const SolverConfig& config) {
    const Evaluation eval = barrier_eval(problem, theta, mu);
    const Vector dir = newton_direction(eval.hessian, eval.gradient);
    BarrierStep out;
    out.theta = theta;
    out.decrement = std::max(0.0, eval.gradient.dot(dir));
    if (0.5 * out.decrement <= config.newton_tol * 1e-12) {
        out.status = BarrierStep::Status::centered;
        return out;
    }
    const double slack = 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(eval.value));
    for (double t = 1.0; t >= kMinStep; t *= 0.5) {
        Vector trial = theta + t * dir;
        const double value = barrier_value(problem, trial, mu);
        if (value > kNegInf && value >= eval.value + kArmijo * t * out.decrement - slack) {
            out.theta = std::move(trial);
            out.step = t;
            return out;
        }
    }
    out.status = BarrierStep::Status::line_search_failed;
    return out;
}

double kkt_residual(const MaxDetProblem& problem, const VectorRef& theta, double mu) {
    const Evaluation eval = objective_eval(problem, theta);
    const double active_tol = std::max(std::sqrt(mu), 1e-9);
    Vector residual = eval.gradient;
    double complementarity = 0.0;

    // Active PSD blocks carry a multiplier V W Vᵀ on the near-null eigenspace V.
    struct ActiveBlock {
        const AffineMatrix* con;
        Matrix basis;
        Matrix f;
    };
    std::vector<ActiveBlock> blocks;
    std::vector<Vector> columns;
    std::vector<std::pair<std::size_t, std::pair<Eigen::Index, Eigen::Index>>> entries;
    std::vector<Vector> linear_columns;
    std::vector<double> linear_slacks;

    const auto direction = [&](const AffineMatrix& con, const Matrix& z) {
        Vector dir(problem.nvars);
        for (int k = 0; k < problem.nvars; ++k) {
            Eigen::Map<const Matrix> a(con.coefficients.col(k).data(), con.size(), con.size());
            dir[k] = z.cwiseProduct(a).sum();
        }
        return dir;
    };

    for (const auto& con : problem.psd_constraints) {
        const Matrix f = con.evaluate(theta);
        if (f.llt().info() != Eigen::Success) {
            throw NumericalError("kkt residual requested at an infeasible point");
        }
        // Cholesky decides feasibility; eigenvalues at rounding level are clamped.
        Eigen::SelfAdjointEigenSolver<Matrix> es(f);
        const Vector ev = es.eigenvalues().cwiseMax(std::numeric_limits<double>::epsilon() * f.norm());
        const Matrix& vecs = es.eigenvectors();
        std::vector<Eigen::Index> null_idx;
        Matrix inverse = Matrix::Zero(ev.size(), ev.size());
        for (Eigen::Index i = 0; i < ev.size(); ++i) {
            if (ev[i] <= active_tol) {
                null_idx.push_back(i);
            } else {
                inverse += (1.0 / ev[i]) * vecs.col(i) * vecs.col(i).transpose();
            }
        }
        if (null_idx.empty()) {
            residual += mu * direction(con, inverse);
            complementarity += mu * static_cast<double>(ev.size());
            continue;
        }
        const auto r = static_cast<Eigen::Index>(null_idx.size());
        Matrix basis(ev.size(), r);
        for (Eigen::Index i = 0; i < r; ++i) {
            basis.col(i) = vecs.col(null_idx[static_cast<std::size_t>(i)]);
        }
        const std::size_t b = blocks.size();
        blocks.push_back({&con, basis, f});
        // Diagonal entries of W are nonnegative; off-diagonal ones enter as ± pairs.
        for (Eigen::Index i = 0; i < r; ++i) {
            for (Eigen::Index j = i; j < r; ++j) {
                Matrix e = Matrix::Zero(r, r);
                e(i, j) = e(j, i) = 1.0;
                const Vector dir = direction(con, basis * e * basis.transpose());
                columns.push_back(dir);
                entries.push_back({b, {i, j}});
                if (i != j) {
                    columns.push_back(-dir);
                    entries.push_back({b, {j, i}});
                }
            }
        }
    }
    for (const auto& con : problem.linear_constraints) {
        const double slack = con.b - con.a.dot(theta);
        if (!(slack > 0.0)) {
            throw NumericalError("kkt residual requested at an infeasible point");
        }
        if (slack <= active_tol) {
            linear_columns.push_back(-con.a);
            linear_slacks.push_back(slack);
        } else {
            residual -= (mu / slack) * con.a;
            complementarity += mu;
        }
    }

    const auto stack = [&](const std::vector<Vector>& cols) {
        Matrix c(problem.nvars, static_cast<Eigen::Index>(cols.size()));
        for (std::size_t i = 0; i < cols.size(); ++i) {
            c.col(static_cast<Eigen::Index>(i)) = cols[i];
        }
        return c;
    };

    if (!blocks.empty()) {
        std::vector<Vector> all = columns;
        all.insert(all.end(), linear_columns.begin(), linear_columns.end());
        const Vector weights = nnls(stack(all), -residual);
        std::vector<Matrix> w;
        for (const auto& block : blocks) {
            w.push_back(Matrix::Zero(block.basis.cols(), block.basis.cols()));
        }
        for (std::size_t k = 0; k < entries.size(); ++k) {
            const auto& [b, ij] = entries[k];
            const auto [i, j] = ij;
            const double v = weights[static_cast<Eigen::Index>(k)];
            if (i == j) {
                w[b](i, i) += v;
            } else {
                const double sign = i < j ? 1.0 : -1.0;
                w[b](i, j) += sign * v;
                w[b](j, i) += sign * v;
            }
        }
        // Projecting W onto the PSD cone keeps the residual a valid certificate.
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            Eigen::SelfAdjointEigenSolver<Matrix> ws(w[b]);
            const Matrix wp = ws.eigenvectors() * ws.eigenvalues().cwiseMax(0.0).asDiagonal() *
                              ws.eigenvectors().transpose();
            const Matrix z = blocks[b].basis * wp * blocks[b].basis.transpose();
            residual += direction(*blocks[b].con, z);
            complementarity += std::abs(z.cwiseProduct(blocks[b].f).sum());
        }
    }
    if (!linear_columns.empty()) {
        const Vector multipliers = nnls(stack(linear_columns), -residual);
        residual += stack(linear_columns) * multipliers;
        for (std::size_t i = 0; i < linear_columns.size(); ++i) {
            complementarity += multipliers[static_cast<Eigen::Index>(i)] * linear_slacks[i];
        }
    }
    return residual.norm() + complementarity;
}

SolveReport solve(const MaxDetProblem& problem, const SolverConfig& config) {
    problem.validate();
    config.validate();

    SolveReport report;
    report.theta = Vector::Zero(problem.nvars);
    if (!(constraint_margin(problem, report.theta) > 0.0)) {
        throw NumericalError("infeasible start: theta = 0 is not strictly feasible");
    }
    const Evaluation start = objective_eval(problem, report.theta);
    report.gradient_norm_at_start = start.gradient.norm();
    const double tolerance = config.newton_tol * (1.0 + report.gradient_norm_at_start);

    const double order = barrier_order(problem);
    const bool constrained = order > 0.0;
    double mu = constrained ? config.barrier_init : 0.0;
    report.status = "iteration budget exhausted";

    for (int outer = 0; outer < config.max_outer; ++outer) {
        ++report.outer_iterations;
        double previous_decrement = std::numeric_limits<double>::infinity();
        bool centered = false;
        for (int it = 0; it < config.max_newton; ++it) {
            BarrierStep step = barrier_step(problem, report.theta, mu, config);
            const bool close = 0.5 * step.decrement <= config.newton_tol;
            if (step.status == BarrierStep::Status::centered) {
                centered = true;
                break;
            }
            if (step.status == BarrierStep::Status::line_search_failed) {
                // Rounding noise stalls the line search only once the point is centered.
                centered = close;
                break;
            }
            ++report.newton_iterations;
            report.theta = std::move(step.theta);
            // Past the tolerance, keep polishing only while the decrement still falls fast.
            if (close && step.decrement > 0.25 * previous_decrement) {
                centered = true;
                break;
            }
            previous_decrement = step.decrement;
        }
        report.barrier_weight = mu;
        report.path.push_back({mu, objective_value(problem, report.theta)});
        if (!centered) {
            report.status = "centering did not converge";
        }
        report.kkt_residual = kkt_residual(problem, report.theta, mu);
        if (centered && report.kkt_residual <= 0.1 * tolerance && mu * order <= config.gap_tol) {
            report.status = "optimal";
            break;
        }
        if (!constrained && centered) {
            report.status = "optimal";
            break;
        }
        mu *= config.barrier_shrink;
    }
    report.objective = objective_value(problem, report.theta);
    report.converged = report.kkt_residual <= tolerance;
    if (!report.converged && report.status == "optimal") {
        report.status = "stationarity tolerance not reached";
    }
    return report;
}

}  // namespace sgm
