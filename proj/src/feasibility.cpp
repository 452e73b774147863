#include "sgm/feasibility.hpp"

#include "sgm/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

namespace sgm {

namespace {

constexpr double kPi = std::numbers::pi;

std::uint64_t lattice_size(int dim, int points_per_axis, std::uint64_t cap) {
    std::uint64_t total = 1;
    for (int j = 0; j < dim; ++j) {
        if (total > cap / static_cast<std::uint64_t>(points_per_axis)) {
            throw ResourceLimit("lattice of " + std::to_string(points_per_axis) + "^" + std::to_string(dim) +
                                " points exceeds the cap of " + std::to_string(cap));
        }
        total *= static_cast<std::uint64_t>(points_per_axis);
    }
    return total;
}

void check_lattice_order(const FrequencySet& freqs, int M) {
    if (M < freqs.max_order() + 1) {
        throw InvalidArgument("lattice resolution M=" + std::to_string(M) + " must be at least U_max+1=" +
                              std::to_string(freqs.max_order() + 1));
    }
}

// Visits every point of axis_values^dim, first axis fastest.
void for_each_grid_point(int dim, const Vector& axis_values, std::uint64_t cap,
                         const std::function<void(const Vector&)>& visit) {
    const auto n = static_cast<int>(axis_values.size());
    const std::uint64_t total = lattice_size(dim, n, cap);
    std::vector<int> idx(dim, 0);
    Vector x(dim);
    for (std::uint64_t count = 0; count < total; ++count) {
        for (int j = 0; j < dim; ++j) {
            x[j] = axis_values[idx[j]];
        }
        visit(x);
        for (int j = 0; j < dim; ++j) {
            if (++idx[j] < n) {
                break;
            }
            idx[j] = 0;
        }
    }
}

double min_eig_at(const FrequencySet& freqs, const Vector& x, const VectorRef& theta) {
    return min_eigenvalue(hessian_extended(freqs, x, theta));
}

}  // namespace

void RegionSpec::validate(const FrequencySet& freqs) const {
    if (kind == Kind::lattice) {
        check_lattice_order(freqs, M);
    } else if (!(tau >= 0.0 && tau <= 1.0)) {
        throw InvalidArgument("tau must lie in [0,1]");
    }
}

double lit_margin(const FrequencySet& freqs, const VectorRef& theta, double tau) {
    if (theta.size() != static_cast<Eigen::Index>(freqs.size())) {
        throw InvalidArgument("parameter vector does not match the frequency set");
    }
    double margin = std::numeric_limits<double>::infinity();
    for (int j = 0; j < freqs.dim(); ++j) {
        double used = 0.0;
        for (std::size_t i = 0; i < freqs.size(); ++i) {
            used += std::abs(theta[static_cast<Eigen::Index>(i)]) * freqs[i][j] * freqs[i][j];
        }
        margin = std::min(margin, tau - used);
    }
    return margin;
}

double mixm_lit_margin(const FrequencySet& freqs, const VectorRef& theta, double tau) {
    if (theta.size() != static_cast<Eigen::Index>(freqs.size())) {
        throw InvalidArgument("parameter vector does not match the frequency set");
    }
    double used = 0.0;
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        used += std::abs(theta[static_cast<Eigen::Index>(i)]) * squared_norm(freqs[i]);
    }
    return tau - used;
}

Vector scale_km(const FrequencySet& freqs, const VectorRef& theta, int M) {
    check_lattice_order(freqs, M);
    Vector out = theta;
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        double denom = 1.0;
        for (int uj : freqs[i]) {
            denom *= 1.0 - static_cast<double>(uj) / M;
        }
        out[static_cast<Eigen::Index>(i)] /= denom;
    }
    return out;
}

void for_each_lattice_point(int dim, int M, const std::function<void(const Vector&)>& visit, std::uint64_t cap) {
    if (M < 1) {
        throw InvalidArgument("lattice resolution must be positive");
    }
    Vector axis(M + 1);
    for (int k = 0; k <= M; ++k) {
        axis[k] = static_cast<double>(k) / M;
    }
    for_each_grid_point(dim, axis, cap, visit);
}

double min_eigenvalue(const MatrixRef& a) {
    const auto n = a.rows();
    if (n == 1) {
        return a(0, 0);
    }
    if (n == 2) {
        const double mean = 0.5 * (a(0, 0) + a(1, 1));
        const double half = 0.5 * (a(0, 0) - a(1, 1));
        return mean - std::hypot(half, a(0, 1));
    }
    if (n == 3) {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es;
        es.computeDirect(Eigen::Matrix3d(a), Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

LatticeCheck lattice_feasible(const FrequencySet& freqs, const VectorRef& theta, int M, std::uint64_t cap) {
    const Vector scaled = scale_km(freqs, theta, M);
    double margin = std::numeric_limits<double>::infinity();
    for_each_lattice_point(
        freqs.dim(), M, [&](const Vector& xi) { margin = std::min(margin, min_eig_at(freqs, xi, scaled)); }, cap);
    return {margin > kPdTolerance, margin};
}

LatticeCheck mixm_lattice_feasible(const FrequencySet& freqs, const VectorRef& theta, int M, std::uint64_t cap) {
    const Vector scaled = scale_km(freqs, theta, M);
    double margin = std::numeric_limits<double>::infinity();
    for_each_lattice_point(
        freqs.dim(), M, [&](const Vector& xi) { margin = std::min(margin, mixm_density(freqs, xi, scaled)); },
        cap);
    return {margin > kPdTolerance, margin};
}

double min_eig_grid(const FrequencySet& freqs, const VectorRef& theta, const MinEigOptions& options) {
    const int m = freqs.dim();
    if (theta.size() != static_cast<Eigen::Index>(freqs.size())) {
        throw InvalidArgument("parameter vector does not match the frequency set");
    }
    if (m <= 3) {
        int res = options.resolution > 0 ? options.resolution : (m <= 2 ? 201 : 41);
        if (res < 2) {
            throw InvalidArgument("grid resolution must be at least 2");
        }
        Vector axis = Vector::LinSpaced(res, 0.0, 1.0);
        double best = std::numeric_limits<double>::infinity();
        for_each_grid_point(m, axis, std::numeric_limits<std::uint64_t>::max(),
                            [&](const Vector& x) { best = std::min(best, min_eig_at(freqs, x, theta)); });
        return best;
    }

    std::vector<Vector> starts;
    if (m <= 12) {
        for (int mask = 0; mask < (1 << m); ++mask) {
            Vector v(m);
            for (int j = 0; j < m; ++j) {
                v[j] = (mask >> j) & 1;
            }
            starts.push_back(v);
        }
    }
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int s = 0; s < options.multistarts; ++s) {
        Vector v(m);
        for (int j = 0; j < m; ++j) {
            v[j] = unif(rng);
        }
        starts.push_back(v);
    }

    double best = std::numeric_limits<double>::infinity();
    for (Vector x : starts) {
        double f = min_eig_at(freqs, x, theta);
        double h = 0.25;
        int evaluations = 0;
        while (h > 1e-7 && evaluations < 20000) {
            bool improved = false;
            for (int j = 0; j < m; ++j) {
                for (double dir : {-1.0, 1.0}) {
                    Vector y = x;
                    y[j] = std::clamp(x[j] + dir * h, 0.0, 1.0);
                    if (y[j] == x[j]) {
                        continue;
                    }
                    const double fy = min_eig_at(freqs, y, theta);
                    ++evaluations;
                    if (fy < f) {
                        x = y;
                        f = fy;
                        improved = true;
                    }
                }
            }
            if (!improved) {
                h *= 0.5;
            }
        }
        best = std::min(best, f);
    }
    return best;
}

double ma2_margin(double theta11, double theta22) {
    const double r1 = theta11;
    const double r2 = 4.0 * theta22;
    // 1 + r1 cos z + r2 cos 2z = (1 − r2) + r1 c + 2 r2 c², c = cos z ∈ [−1, 1]
    auto g = [&](double c) { return (1.0 - r2) + r1 * c + 2.0 * r2 * c * c; };
    double best = std::min(g(-1.0), g(1.0));
    if (r2 > 0.0) {
        const double vertex = -r1 / (4.0 * r2);
        if (std::abs(vertex) <= 1.0) {
            best = std::min(best, g(vertex));
        }
    }
    return best;
}

bool ma2_feasible(double theta11, double theta22) {
    return ma2_margin(theta11, theta22) >= 0.0;
}

double fejer_kernel(int M, double z) {
    if (M < 1) {
        throw InvalidArgument("kernel order must be positive");
    }
    // Σ_{a,b<M} e^{iπ(a−b)z} = M + 2 Σ_{k=1}^{M−1} (M−k) cos(πkz)
    double sum = M;
    for (int k = 1; k < M; ++k) {
        sum += 2.0 * (M - k) * std::cos(kPi * k * z);
    }
    return std::max(0.0, sum) / (2.0 * M * M);
}

Matrix fejer_reconstruct(const FrequencySet& freqs, const VectorRef& theta, int M, const VectorRef& x,
                         std::uint64_t cap) {
    check_dimensions(freqs, x, theta);
    const Vector scaled = scale_km(freqs, theta, M);
    const int m = freqs.dim();
    Vector axis(2 * M);
    for (int k = -(M - 1); k <= M; ++k) {
        axis[k + M - 1] = static_cast<double>(k) / M;
    }
    // Per-axis kernel weights Q_M(x_j − ξ_j).
    Matrix weights(2 * M, m);
    for (int j = 0; j < m; ++j) {
        for (int k = 0; k < 2 * M; ++k) {
            weights(k, j) = fejer_kernel(M, x[j] - axis[k]);
        }
    }
    Matrix out = Matrix::Zero(m, m);
    std::vector<int> idx(m, 0);
    const std::uint64_t total = lattice_size(m, 2 * M, cap);
    Vector xi(m);
    for (std::uint64_t count = 0; count < total; ++count) {
        double w = 1.0;
        for (int j = 0; j < m; ++j) {
            xi[j] = axis[idx[j]];
            w *= weights(idx[j], j);
        }
        if (w != 0.0) {
            out += w * hessian_extended(freqs, xi, scaled);
        }
        for (int j = 0; j < m; ++j) {
            if (++idx[j] < 2 * M) {
                break;
            }
            idx[j] = 0;
        }
    }
    return out;
}

}  // namespace sgm
