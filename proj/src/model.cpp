#include "sgm/model.hpp"

#include "sgm/errors.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sgm {

namespace {

constexpr double kPi = std::numbers::pi;

// Π_{ρ ∉ {skip1, skip2}} cos(π u_ρ x_ρ)
double cos_product_except(std::span<const int> u, const TrigTable& trig, int skip1, int skip2) {
    double prod = 1.0;
    for (int r = 0; r < static_cast<int>(u.size()); ++r) {
        if (r != skip1 && r != skip2) {
            prod *= trig.cos(r, u[r]);
        }
    }
    return prod;
}

void check_point(const VectorRef& x) {
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        if (!(x[j] >= 0.0 && x[j] <= 1.0)) {
            throw InvalidArgument("point coordinate " + std::to_string(x[j]) + " outside [0,1]");
        }
    }
}

Matrix accumulate_hessian(const FrequencySet& freqs, const VectorRef& x, const VectorRef& theta) {
    const int m = freqs.dim();
    TrigTable trig(x, freqs.max_order());
    Matrix g = Matrix::Identity(m, m);
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        if (theta[static_cast<Eigen::Index>(i)] != 0.0) {
            add_hessian_basis(freqs[i], trig, theta[static_cast<Eigen::Index>(i)], g);
        }
    }
    return g;
}

}  // namespace

TrigTable::TrigTable(const VectorRef& x, int order) : c_(order + 1, x.size()), s_(order + 1, x.size()) {
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        for (int k = 0; k <= order; ++k) {
            c_(k, j) = std::cos(kPi * k * x[j]);
            s_(k, j) = std::sin(kPi * k * x[j]);
        }
    }
}

double cosine_product(std::span<const int> u, const TrigTable& trig) {
    return cos_product_except(u, trig, -1, -1);
}

void add_hessian_basis(std::span<const int> u, const TrigTable& trig, double weight, Matrix& out) {
    const int m = static_cast<int>(u.size());
    for (int j = 0; j < m; ++j) {
        if (u[j] == 0) {
            continue;
        }
        out(j, j) += weight * u[j] * u[j] * trig.cos(j, u[j]) * cos_product_except(u, trig, j, -1);
        for (int k = j + 1; k < m; ++k) {
            if (u[k] == 0) {
                continue;
            }
            double v = -weight * u[j] * u[k] * trig.sin(j, u[j]) * trig.sin(k, u[k]) *
                       cos_product_except(u, trig, j, k);
            out(j, k) += v;
            out(k, j) += v;
        }
    }
}

Matrix hessian_basis(std::span<const int> u, const VectorRef& x) {
    const int m = static_cast<int>(u.size());
    int order = 0;
    for (int v : u) {
        order = std::max(order, v);
    }
    TrigTable trig(x, order);
    Matrix h = Matrix::Zero(m, m);
    add_hessian_basis(u, trig, 1.0, h);
    return h;
}

void check_dimensions(const FrequencySet& freqs, const VectorRef& x, const VectorRef& theta) {
    if (x.size() != freqs.dim()) {
        throw InvalidArgument("point has dimension " + std::to_string(x.size()) + ", model has " +
                              std::to_string(freqs.dim()));
    }
    if (theta.size() != static_cast<Eigen::Index>(freqs.size())) {
        throw InvalidArgument("parameter vector has " + std::to_string(theta.size()) + " entries, expected " +
                              std::to_string(freqs.size()));
    }
    if (!theta.allFinite()) {
        throw InvalidArgument("parameter vector has non-finite entries");
    }
}

Matrix hessian(const FrequencySet& freqs, const VectorRef& x, const VectorRef& theta) {
    check_dimensions(freqs, x, theta);
    check_point(x);
    return accumulate_hessian(freqs, x, theta);
}

Matrix hessian_extended(const FrequencySet& freqs, const VectorRef& x, const VectorRef& theta) {
    check_dimensions(freqs, x, theta);
    return accumulate_hessian(freqs, x, theta);
}

double potential(const FrequencySet& freqs, const VectorRef& x, const VectorRef& theta) {
    check_dimensions(freqs, x, theta);
    TrigTable trig(x, freqs.max_order());
    double value = 0.5 * x.squaredNorm();
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        value -= theta[static_cast<Eigen::Index>(i)] / (kPi * kPi) * cosine_product(freqs[i], trig);
    }
    return value;
}

Vector gradient_map(const FrequencySet& freqs, const VectorRef& x, const VectorRef& theta) {
    check_dimensions(freqs, x, theta);
    TrigTable trig(x, freqs.max_order());
    Vector y = x;
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        const auto& u = freqs[i];
        const double t = theta[static_cast<Eigen::Index>(i)];
        for (int j = 0; j < freqs.dim(); ++j) {
            if (u[j] != 0) {
                y[j] += t / kPi * u[j] * trig.sin(j, u[j]) * cos_product_except(u, trig, j, -1);
            }
        }
    }
    return y;
}

double pd_determinant(const MatrixRef& g) {
    Eigen::LDLT<Matrix> ldlt(g);
    const Vector d = ldlt.vectorD();
    const double min_pivot = d.minCoeff();
    if (min_pivot < -kPdTolerance) {
        throw IndefiniteHessian("matrix has a negative pivot " + std::to_string(min_pivot));
    }
    if (min_pivot <= kPdTolerance) {
        return 0.0;
    }
    return d.prod();
}

double density(const FrequencySet& freqs, const VectorRef& x, const VectorRef& theta) {
    return pd_determinant(hessian(freqs, x, theta));
}

Vector score(const FrequencySet& freqs, const VectorRef& x, const VectorRef& theta) {
    check_dimensions(freqs, x, theta);
    check_point(x);
    const int m = freqs.dim();
    TrigTable trig(x, freqs.max_order());
    Matrix g = Matrix::Identity(m, m);
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        add_hessian_basis(freqs[i], trig, theta[static_cast<Eigen::Index>(i)], g);
    }
    Eigen::LDLT<Matrix> ldlt(g);
    if (ldlt.vectorD().minCoeff() <= kPdTolerance) {
        throw NumericalError("score undefined: Hessian of the potential is singular");
    }
    const Matrix ginv = ldlt.solve(Matrix::Identity(m, m));
    Vector s(freqs.size());
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        Matrix h = Matrix::Zero(m, m);
        add_hessian_basis(freqs[i], trig, 1.0, h);
        s[static_cast<Eigen::Index>(i)] = ginv.cwiseProduct(h).sum();
    }
    return s;
}

double mixm_density(const FrequencySet& freqs, const VectorRef& x, const VectorRef& theta) {
    check_dimensions(freqs, x, theta);
    TrigTable trig(x, freqs.max_order());
    double p = 1.0;
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        p += theta[static_cast<Eigen::Index>(i)] * squared_norm(freqs[i]) * cosine_product(freqs[i], trig);
    }
    return p;
}

Vector mixm_score(const FrequencySet& freqs, const VectorRef& x, const VectorRef& theta) {
    check_dimensions(freqs, x, theta);
    TrigTable trig(x, freqs.max_order());
    Vector basis(freqs.size());
    double p = 1.0;
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        basis[static_cast<Eigen::Index>(i)] = squared_norm(freqs[i]) * cosine_product(freqs[i], trig);
        p += theta[static_cast<Eigen::Index>(i)] * basis[static_cast<Eigen::Index>(i)];
    }
    if (p <= 0.0) {
        throw NumericalError("score undefined: mixture density is not positive");
    }
    return basis / p;
}

double family_density(Family family, const FrequencySet& freqs, const VectorRef& x, const VectorRef& theta) {
    return family == Family::sgm ? density(freqs, x, theta) : mixm_density(freqs, x, theta);
}

Vector fisher_origin(const FrequencySet& freqs) {
    Vector j(freqs.size());
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        const double n2 = squared_norm(freqs[i]);
        j[static_cast<Eigen::Index>(i)] = n2 * n2 / std::ldexp(1.0, support_size(freqs[i]));
    }
    return j;
}

double fisher_closed_1d(int u, double theta) {
    if (u <= 0) {
        throw std::domain_error("frequency must be positive");
    }
    const double u4 = std::pow(static_cast<double>(u), 4);
    const double a = theta * theta * u4;
    if (!(a < 1.0)) {
        throw std::domain_error("theta outside the interior of the feasible interval");
    }
    // 1 − r = a/(1 + r) removes the cancellation near θ = 0.
    const double r = std::sqrt(1.0 - a);
    return u4 / (r * (1.0 + r));
}

double fisher_closed_corr(double theta) {
    const double a = theta * theta;
    if (!(a < 1.0)) {
        throw std::domain_error("theta outside the interior of the feasible interval");
    }
    const double r = std::sqrt(1.0 - a);
    return 2.0 / (r * (1.0 + r));
}

}  // namespace sgm
