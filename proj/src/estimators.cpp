#include "sgm/estimators.hpp"

#include "sgm/errors.hpp"
#include "sgm/normal.hpp"
#include "sgm/parallel.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace sgm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Column u holds vec H_u(x) (SGM, m² rows) or ‖u‖² Π cos(π u_j x_j) (MixM, one row).
Matrix basis_columns(Family family, const FrequencySet& freqs, const VectorRef& x) {
    const int m = freqs.dim();
    const TrigTable trig(x, freqs.max_order());
    if (family == Family::mixm) {
        Matrix out(1, static_cast<Eigen::Index>(freqs.size()));
        for (std::size_t k = 0; k < freqs.size(); ++k) {
            out(0, static_cast<Eigen::Index>(k)) = squared_norm(freqs[k]) * cosine_product(freqs[k], trig);
        }
        return out;
    }
    Matrix out(m * m, static_cast<Eigen::Index>(freqs.size()));
    Matrix h(m, m);
    for (std::size_t k = 0; k < freqs.size(); ++k) {
        h.setZero();
        add_hessian_basis(freqs[k], trig, 1.0, h);
        out.col(static_cast<Eigen::Index>(k)) = Eigen::Map<const Vector>(h.data(), m * m);
    }
    return out;
}

AffineMatrix affine_from_basis(const Matrix& basis, const Matrix& transform) {
    const auto d = static_cast<Eigen::Index>(std::lround(std::sqrt(static_cast<double>(basis.rows()))));
    AffineMatrix map(Matrix::Identity(d, d), static_cast<int>(transform.cols()));
    map.coefficients = basis * transform;
    return map;
}

// θ = y⁺ − y⁻ with y⁺_k = y_{2k}, y⁻_k = y_{2k+1}.
Matrix split_transform(std::size_t count) {
    Matrix t = Matrix::Zero(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(2 * count));
    for (std::size_t k = 0; k < count; ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        t(i, 2 * i) = 1.0;
        t(i, 2 * i + 1) = -1.0;
    }
    return t;
}

// Split-variable L¹ rows Σ_k w_rk (y⁺_k + y⁻_k + 2δ) ≤ τ with y ≥ −δ.
// The offset δ keeps y = 0 strictly inside while |θ_k| ≤ y⁺_k + y⁻_k + 2δ.
void add_l1_constraints(MaxDetProblem& problem, const Matrix& weights, double tau) {
    const Eigen::Index count = weights.cols();
    const double max_row = weights.rowwise().sum().maxCoeff();
    const double delta = tau / (4.0 * max_row);
    for (Eigen::Index v = 0; v < 2 * count; ++v) {
        LinearConstraint c{Vector::Zero(2 * count), delta};
        c.a[v] = -1.0;
        problem.linear_constraints.push_back(std::move(c));
    }
    for (Eigen::Index r = 0; r < weights.rows(); ++r) {
        const double total = weights.row(r).sum();
        if (total <= 0.0) {
            continue;
        }
        LinearConstraint c{Vector::Zero(2 * count), tau - 2.0 * delta * total};
        for (Eigen::Index k = 0; k < count; ++k) {
            c.a[2 * k] = weights(r, k);
            c.a[2 * k + 1] = weights(r, k);
        }
        problem.linear_constraints.push_back(std::move(c));
    }
}

FitResult zero_fit(Family family, const MatrixRef& data, const FrequencySet& freqs, const RegionSpec& region) {
    FitResult out;
    out.family = family;
    out.freqs = freqs;
    out.region = region;
    out.theta = Vector::Zero(static_cast<Eigen::Index>(freqs.size()));
    out.theta_raw = out.theta;
    out.scaled = out.theta;
    out.loglik = loglik(family, freqs, out.theta, data);
    out.report.theta = out.theta;
    out.report.converged = true;
    out.report.status = "zero budget";
    return out;
}

}  // namespace

Preprocessor Preprocessor::fit(const MatrixRef& raw) {
    if (raw.rows() < 2 || raw.cols() < 1) {
        throw DataError("preprocessing needs at least two rows and one column");
    }
    if (!raw.allFinite()) {
        throw DataError("data contains non-finite values");
    }
    Preprocessor p;
    p.mean = raw.colwise().mean().transpose();
    p.sd = ((raw.rowwise() - p.mean.transpose()).array().square().colwise().mean().sqrt()).transpose();
    for (Eigen::Index j = 0; j < p.sd.size(); ++j) {
        if (!(p.sd[j] > 0.0)) {
            throw DataError("column " + std::to_string(j + 1) + " is constant");
        }
    }
    return p;
}

Matrix Preprocessor::standardize(const MatrixRef& raw) const {
    if (raw.cols() != mean.size()) {
        throw DataError("column count does not match the fitted preprocessing");
    }
    return (raw.rowwise() - mean.transpose()).array().rowwise() / sd.transpose().array();
}

Matrix Preprocessor::to_unit(const MatrixRef& raw) const {
    const double lo = std::numeric_limits<double>::min();
    const double hi = std::nextafter(1.0, 0.0);
    return standardize(raw).unaryExpr([&](double z) { return std::clamp(normal_cdf(z), lo, hi); });
}

Preprocessed preprocess(const MatrixRef& raw) {
    const Preprocessor p = Preprocessor::fit(raw);
    return {p.standardize(raw), p.to_unit(raw)};
}

void check_unit_data(const MatrixRef& data, int m) {
    if (data.rows() < 1) {
        throw DataError("no samples");
    }
    if (data.cols() != m) {
        throw DataError("data has " + std::to_string(data.cols()) + " columns, model expects " + std::to_string(m));
    }
    if (!data.allFinite() || data.minCoeff() < 0.0 || data.maxCoeff() > 1.0) {
        throw DataError("model data must lie in [0,1]; preprocess raw data first");
    }
}

double loglik(Family family, const FrequencySet& freqs, const VectorRef& theta, const MatrixRef& data) {
    check_unit_data(data, freqs.dim());
    double total = 0.0;
    for (Eigen::Index t = 0; t < data.rows(); ++t) {
        double p = 0.0;
        try {
            p = family_density(family, freqs, data.row(t).transpose(), theta);
        } catch (const IndefiniteHessian&) {
            return kNegInf;
        }
        if (!(p > 0.0)) {
            return kNegInf;
        }
        total += std::log(p);
    }
    return total;
}

FitResult fit_family(Family family, const MatrixRef& data, const FrequencySet& freqs, const RegionSpec& region,
                     const SolverConfig& config) {
    if (freqs.empty()) {
        throw InvalidArgument("frequency set is empty");
    }
    check_unit_data(data, freqs.dim());
    region.validate(freqs);
    const auto count = freqs.size();
    const auto nu = static_cast<Eigen::Index>(count);
    const bool lit = region.kind == RegionSpec::Kind::lit;
    if (lit && region.tau == 0.0) {
        return zero_fit(family, data, freqs, region);
    }

    const Matrix transform = lit ? split_transform(count) : Matrix(Matrix::Identity(nu, nu));
    MaxDetProblem problem;
    problem.nvars = static_cast<int>(transform.cols());
    for (Eigen::Index t = 0; t < data.rows(); ++t) {
        problem.objective_terms.push_back(
            {affine_from_basis(basis_columns(family, freqs, data.row(t).transpose()), transform), 1.0});
    }

    if (lit) {
        const int m = freqs.dim();
        Matrix weights(family == Family::sgm ? m : 1, nu);
        for (Eigen::Index k = 0; k < nu; ++k) {
            const auto& u = freqs[static_cast<std::size_t>(k)];
            if (family == Family::sgm) {
                for (int j = 0; j < m; ++j) {
                    weights(j, k) = u[static_cast<std::size_t>(j)] * u[static_cast<std::size_t>(j)];
                }
            } else {
                weights(0, k) = squared_norm(u);
            }
        }
        add_l1_constraints(problem, weights, region.tau);
    } else {
        const Vector km = scale_km(freqs, Vector::Ones(nu), region.M);
        const Matrix scaled_transform = km.asDiagonal() * transform;
        // Shifted by 2ε_pd so boundary estimates still pass lattice_feasible.
        const double floor = 1.0 - 2.0 * kPdTolerance;
        for_each_lattice_point(freqs.dim(), region.M, [&](const Vector& xi) {
            const Matrix basis = basis_columns(family, freqs, xi);
            if (family == Family::sgm) {
                AffineMatrix map = affine_from_basis(basis, scaled_transform);
                map.constant *= floor;
                problem.psd_constraints.push_back(std::move(map));
            } else {
                problem.linear_constraints.push_back({-(basis * scaled_transform).row(0).transpose(), floor});
            }
        });
    }

    FitResult out;
    out.family = family;
    out.freqs = freqs;
    out.region = region;
    out.report = solve(problem, config);
    out.theta_raw = transform * out.report.theta;
    out.theta = out.theta_raw.unaryExpr([](double v) { return std::abs(v) < kSparseThreshold ? 0.0 : v; });
    out.scaled = fisher_origin(freqs).cwiseSqrt().cwiseProduct(out.theta);
    out.loglik = loglik(family, freqs, out.theta, data);
    return out;
}

FitResult fit_sgm(const MatrixRef& data, const FrequencySet& freqs, const RegionSpec& region,
                  const SolverConfig& config) {
    return fit_family(Family::sgm, data, freqs, region, config);
}

FitResult fit_mixm(const MatrixRef& data, const FrequencySet& freqs, const RegionSpec& region,
                   const SolverConfig& config) {
    return fit_family(Family::mixm, data, freqs, region, config);
}

Matrix sample_correlation(const MatrixRef& data) {
    const Preprocessed p = preprocess(data);
    return (p.standardized.transpose() * p.standardized) / static_cast<double>(data.rows());
}

ConcentrationMatrix fit_gauss_lasso(const MatrixRef& standardized, double tau, const SolverConfig& config) {
    if (!(tau >= 0.0 && tau <= 1.0)) {
        throw InvalidArgument("tau must lie in [0,1]");
    }
    ConcentrationMatrix out;
    out.tau = tau;
    out.sigma = sample_correlation(standardized);
    const auto m = out.sigma.rows();
    Eigen::LLT<Matrix> llt(out.sigma);
    if (llt.info() != Eigen::Success || llt.matrixLLT().diagonal().minCoeff() <= 1e-8) {
        throw DataError("sample correlation matrix is singular");
    }
    const Matrix inverse = llt.solve(Matrix::Identity(m, m));
    double off = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index i = 0; i < j; ++i) {
            off += std::abs(inverse(i, j));
        }
    }
    out.budget = tau * off;
    if (!(out.budget > 0.0)) {
        out.C = out.sigma.diagonal().cwiseInverse().asDiagonal();
        out.report.theta = Vector::Zero(0);
        out.report.converged = true;
        out.report.status = "zero budget";
        return out;
    }

    // Variables: Δ_ii for each i, then (y⁺, y⁻) per pair i < j; C = I + Δ.
    const Eigen::Index pairs = m * (m - 1) / 2;
    MaxDetProblem problem;
    problem.nvars = static_cast<int>(m + 2 * pairs);
    AffineMatrix map(Matrix::Identity(m, m), problem.nvars);
    problem.linear_objective = Vector::Zero(problem.nvars);
    for (Eigen::Index i = 0; i < m; ++i) {
        Matrix e = Matrix::Zero(m, m);
        e(i, i) = 1.0;
        map.add_coefficient(static_cast<int>(i), e);
        problem.linear_objective[i] = -out.sigma(i, i);
    }
    Eigen::Index p = 0;
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index i = 0; i < j; ++i, ++p) {
            Matrix e = Matrix::Zero(m, m);
            e(i, j) = e(j, i) = 1.0;
            const auto plus = static_cast<int>(m + 2 * p);
            map.add_coefficient(plus, e, 1.0);
            map.add_coefficient(plus + 1, e, -1.0);
            problem.linear_objective[plus] = -2.0 * out.sigma(i, j);
            problem.linear_objective[plus + 1] = 2.0 * out.sigma(i, j);
        }
    }
    problem.objective_terms.push_back({std::move(map), 1.0});

    const double delta = out.budget / (4.0 * static_cast<double>(pairs));
    LinearConstraint budget{Vector::Zero(problem.nvars), out.budget - 2.0 * delta * static_cast<double>(pairs)};
    for (Eigen::Index v = m; v < problem.nvars; ++v) {
        LinearConstraint c{Vector::Zero(problem.nvars), delta};
        c.a[v] = -1.0;
        problem.linear_constraints.push_back(std::move(c));
        budget.a[v] = 1.0;
    }
    problem.linear_constraints.push_back(std::move(budget));

    out.report = solve(problem, config);
    out.C = problem.objective_terms.front().map.evaluate(out.report.theta);
    return out;
}

Matrix partial_correlations(const MatrixRef& c) {
    const Vector s = c.diagonal().cwiseSqrt().cwiseInverse();
    Matrix rho = -(s.asDiagonal() * c * s.asDiagonal());
    rho.diagonal().setOnes();
    return rho;
}

double gauss_loglik(const MatrixRef& c, const MatrixRef& standardized) {
    if (standardized.cols() != c.rows()) {
        throw DataError("test data dimension does not match the concentration matrix");
    }
    Eigen::LLT<Matrix> llt(c);
    if (llt.info() != Eigen::Success) {
        return kNegInf;
    }
    const double half_logdet = llt.matrixLLT().diagonal().array().log().sum();
    double total = 0.0;
    for (Eigen::Index t = 0; t < standardized.rows(); ++t) {
        const Vector d = standardized.row(t).transpose();
        total += half_logdet - 0.5 * d.dot(c * d) + 0.5 * d.squaredNorm();
    }
    return total;
}

std::vector<int> fold_assignment(std::size_t n, int folds, std::uint64_t seed) {
    if (folds < 2 || static_cast<std::size_t>(folds) > n) {
        throw InvalidArgument("folds must satisfy 2 <= K <= n");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<int> label(n);
    for (std::size_t i = 0; i < n; ++i) {
        label[order[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));
    }
    return label;
}

CvResult cross_validate(const MatrixRef& raw, const CvOptions& options) {
    const auto n = static_cast<std::size_t>(raw.rows());
    const int m = static_cast<int>(raw.cols());
    const std::vector<int> label = fold_assignment(n, options.folds, options.seed);
    const FrequencySet freqs = options.freqs ? *options.freqs : FrequencySet::standard(m);
    const bool density_model = options.model != ModelKind::gauss;
    if (density_model && freqs.dim() != m) {
        throw InvalidArgument("frequency set dimension does not match the data");
    }

    std::optional<Preprocessor> global;
    if (options.preprocess && options.global_preprocess) {
        global = Preprocessor::fit(raw);
    }
    struct Split {
        Matrix train;
        Matrix test;
    };
    std::vector<Split> splits(static_cast<std::size_t>(options.folds));
    for (int f = 0; f < options.folds; ++f) {
        std::vector<Eigen::Index> tr, te;
        for (std::size_t i = 0; i < n; ++i) {
            (label[i] == f ? te : tr).push_back(static_cast<Eigen::Index>(i));
        }
        Matrix train = raw(tr, Eigen::all);
        Matrix test = raw(te, Eigen::all);
        if (options.preprocess) {
            const Preprocessor p = global ? *global : Preprocessor::fit(train);
            if (density_model) {
                train = p.to_unit(train);
                test = p.to_unit(test);
            } else {
                train = p.standardize(train);
                test = p.standardize(test);
            }
        }
        splits[static_cast<std::size_t>(f)] = {std::move(train), std::move(test)};
    }

    const bool lattice = density_model && options.region == RegionSpec::Kind::lattice;
    const std::vector<double> taus = lattice ? std::vector<double>{0.0} : options.tau_grid;
    if (taus.empty()) {
        throw InvalidArgument("tau grid is empty");
    }
    const int M = options.M > 0 ? options.M : freqs.max_order() + 1;
    const Family family = options.model == ModelKind::mixm ? Family::mixm : Family::sgm;

    const std::size_t folds = splits.size();
    std::vector<double> values(taus.size() * folds);
    parallel_for(values.size(), options.jobs, [&](std::size_t task) {
        const double tau = taus[task / folds];
        const Split& s = splits[task % folds];
        if (options.model == ModelKind::gauss) {
            values[task] = gauss_loglik(fit_gauss_lasso(s.train, tau, options.solver).C, s.test);
        } else {
            const RegionSpec region = lattice ? RegionSpec::lattice(M) : RegionSpec::lit(tau);
            const FitResult fit = fit_family(family, s.train, freqs, region, options.solver);
            values[task] = loglik(family, freqs, fit.theta, s.test);
        }
    });

    CvResult out;
    for (std::size_t r = 0; r < taus.size(); ++r) {
        double total = 0.0;
        for (std::size_t f = 0; f < folds; ++f) {
            total += values[r * folds + f];
        }
        out.rows.push_back({taus[r], total});
        if (total > out.rows[out.best].loglik) {
            out.best = r;
        }
    }
    return out;
}

}  // namespace sgm
