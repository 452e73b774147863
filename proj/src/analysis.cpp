#include "sgm/analysis.hpp"

#include "sgm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

namespace sgm {

namespace {

constexpr double kLogFloor = 1e-300;

double density_at(const ModelSpec& model, const Vector& x) {
    return family_density(model.family, model.freqs, x, model.theta);
}

// ∫ p(x) over the coordinates in `free_axes`, the others taken from `x`.
double integrate_out(const ModelSpec& model, Vector x, const std::vector<int>& free_axes, const QuadratureRule& rule) {
    if (free_axes.empty()) {
        return density_at(model, x);
    }
    double total = 0.0;
    for_each_node(static_cast<int>(free_axes.size()), rule, [&](const Vector& y, double w) {
        for (std::size_t k = 0; k < free_axes.size(); ++k) {
            x[free_axes[k]] = y[static_cast<Eigen::Index>(k)];
        }
        total += w * density_at(model, x);
    });
    return total;
}

void require_dim(const ModelSpec& model, int m, const char* what) {
    if (model.freqs.dim() != m) {
        throw InvalidArgument(std::string(what) + " needs a " + std::to_string(m) + "-dimensional model");
    }
}

}  // namespace

double expectation(const ModelSpec& model, const std::function<double(const Vector&)>& f, int nodes) {
    const QuadratureRule rule = QuadratureRule::gauss_legendre(nodes);
    return integrate([&](const Vector& x) { return density_at(model, x) * f(x); }, model.freqs.dim(), rule);
}

double correlation(const ModelSpec& model, int i, int j, int nodes) {
    const double mi = expectation(model, [&](const Vector& x) { return x[i]; }, nodes);
    const double mj = expectation(model, [&](const Vector& x) { return x[j]; }, nodes);
    const double vi = expectation(model, [&](const Vector& x) { return (x[i] - mi) * (x[i] - mi); }, nodes);
    const double vj = expectation(model, [&](const Vector& x) { return (x[j] - mj) * (x[j] - mj); }, nodes);
    const double c = expectation(model, [&](const Vector& x) { return (x[i] - mi) * (x[j] - mj); }, nodes);
    return c / std::sqrt(vi * vj);
}

double beta122(const ModelSpec& model, int nodes) {
    require_dim(model, 2, "beta122");
    const double num = expectation(
        model, [](const Vector& x) { return (x[0] - 0.5) * (x[1] - 0.5) * (x[1] - 0.5); }, nodes);
    const double m1 = expectation(model, [](const Vector& x) { return x[0]; }, nodes);
    const double m2 = expectation(model, [](const Vector& x) { return x[1]; }, nodes);
    const double v1 = expectation(model, [&](const Vector& x) { return (x[0] - m1) * (x[0] - m1); }, nodes);
    const double v2 = expectation(model, [&](const Vector& x) { return (x[1] - m2) * (x[1] - m2); }, nodes);
    return num / (std::sqrt(v1) * v2);
}

double beta123(const ModelSpec& model, int nodes) {
    require_dim(model, 3, "beta123");
    Vector mean(3);
    Vector var(3);
    for (int k = 0; k < 3; ++k) {
        mean[k] = expectation(model, [&](const Vector& x) { return x[k]; }, nodes);
        var[k] = expectation(model, [&](const Vector& x) { return (x[k] - mean[k]) * (x[k] - mean[k]); }, nodes);
    }
    const double num = expectation(
        model, [&](const Vector& x) { return (x[0] - mean[0]) * (x[1] - mean[1]) * (x[2] - mean[2]); }, nodes);
    return num / std::sqrt(var.prod());
}

double cond_mutual_info(const ModelSpec& model, int nodes) {
    require_dim(model, 3, "cond_mutual_info");
    const QuadratureRule rule = QuadratureRule::gauss_legendre(nodes);
    const int n = rule.size();
    const auto at = [n](int i, int j, int k) { return static_cast<std::size_t>(i + n * (j + n * k)); };
    std::vector<double> p(static_cast<std::size_t>(n) * n * n);
    Vector x(3);
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                x << rule.nodes[i], rule.nodes[j], rule.nodes[k];
                const double v = density_at(model, x);
                if (v < 0.0) {
                    throw InvalidArgument("density is negative: parameters are infeasible");
                }
                p[at(i, j, k)] = v;
            }
        }
    }
    Matrix p13 = Matrix::Zero(n, n);
    Matrix p23 = Matrix::Zero(n, n);
    Vector p3 = Vector::Zero(n);
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                const double v = p[at(i, j, k)];
                p13(i, k) += rule.weights[j] * v;
                p23(j, k) += rule.weights[i] * v;
                p3[k] += rule.weights[i] * rule.weights[j] * v;
            }
        }
    }
    double total = 0.0;
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                const double v = std::max(p[at(i, j, k)], kLogFloor);
                const double ratio = (v * std::max(p3[k], kLogFloor)) /
                                     (std::max(p13(i, k), kLogFloor) * std::max(p23(j, k), kLogFloor));
                total += rule.weights[i] * rule.weights[j] * rule.weights[k] * v * std::log(ratio);
            }
        }
    }
    return total;
}

double marginal_density(const ModelSpec& model, const std::vector<int>& axes, const Vector& x_sub, int nodes) {
    const int m = model.freqs.dim();
    if (static_cast<Eigen::Index>(axes.size()) != x_sub.size()) {
        throw InvalidArgument("marginal_density: one coordinate per axis is required");
    }
    Vector x = Vector::Zero(m);
    std::vector<bool> kept(static_cast<std::size_t>(m), false);
    for (std::size_t k = 0; k < axes.size(); ++k) {
        const int a = axes[k];
        if (a < 0 || a >= m || kept[static_cast<std::size_t>(a)]) {
            throw InvalidArgument("marginal_density: axes must be distinct and in range");
        }
        kept[static_cast<std::size_t>(a)] = true;
        x[a] = x_sub[static_cast<Eigen::Index>(k)];
    }
    std::vector<int> free_axes;
    for (int a = 0; a < m; ++a) {
        if (!kept[static_cast<std::size_t>(a)]) {
            free_axes.push_back(a);
        }
    }
    if (free_axes.size() > 3) {
        throw ResourceLimit("marginal_density integrates out at most 3 coordinates");
    }
    return integrate_out(model, x, free_axes, QuadratureRule::gauss_legendre(nodes));
}

Matrix fisher_numeric(const ModelSpec& model, int nodes) {
    const auto k = static_cast<Eigen::Index>(model.freqs.size());
    Matrix j = Matrix::Zero(k, k);
    for_each_node(model.freqs.dim(), QuadratureRule::gauss_legendre(nodes), [&](const Vector& x, double w) {
        const double p = density_at(model, x);
        const Vector s = model.family == Family::sgm ? score(model.freqs, x, model.theta)
                                                     : mixm_score(model.freqs, x, model.theta);
        j.noalias() += (w * p) * (s * s.transpose());
    });
    return j;
}

DensityGrid density_grid(const ModelSpec& model, std::pair<int, int> axes, int resolution,
                         const std::vector<Condition>& conditions, int nodes) {
    const int m = model.freqs.dim();
    if (resolution < 2) {
        throw InvalidArgument("grid resolution must be at least 2");
    }
    std::vector<int> role(static_cast<std::size_t>(m), 0);  // 0 free, 1 plotted, 2 fixed
    Vector x = Vector::Zero(m);
    auto claim = [&](int a, int r) {
        if (a < 0 || a >= m || role[static_cast<std::size_t>(a)] != 0) {
            throw InvalidArgument("grid axes and conditions must be distinct and in range");
        }
        role[static_cast<std::size_t>(a)] = r;
    };
    claim(axes.first, 1);
    claim(axes.second, 1);
    for (const auto& [a, v] : conditions) {
        claim(a, 2);
        if (!(v >= 0.0 && v <= 1.0)) {
            throw InvalidArgument("conditioning values must lie in [0,1]");
        }
        x[a] = v;
    }
    std::vector<int> free_axes;
    std::vector<int> unfixed;
    for (int a = 0; a < m; ++a) {
        if (role[static_cast<std::size_t>(a)] == 0) {
            free_axes.push_back(a);
        }
        if (role[static_cast<std::size_t>(a)] != 2) {
            unfixed.push_back(a);
        }
    }
    if (free_axes.size() > 3) {
        throw ResourceLimit("density_grid integrates out at most 3 coordinates");
    }
    const QuadratureRule rule = QuadratureRule::gauss_legendre(nodes);
    const double normalizer = conditions.empty() ? 1.0 : integrate_out(model, x, unfixed, rule);
    if (!(normalizer > 0.0)) {
        throw NumericalError("conditioning event has zero density");
    }

    DensityGrid grid;
    grid.axis_i = axes.first;
    grid.axis_j = axes.second;
    grid.coords = Vector::LinSpaced(resolution, 0.0, 1.0);
    grid.values.resize(resolution, resolution);
    for (int a = 0; a < resolution; ++a) {
        for (int b = 0; b < resolution; ++b) {
            x[axes.first] = grid.coords[a];
            x[axes.second] = grid.coords[b];
            grid.values(a, b) = integrate_out(model, x, free_axes, rule) / normalizer;
        }
    }
    return grid;
}

void write_grid_tsv(std::ostream& out, const DensityGrid& grid) {
    out << "x_" << grid.axis_i + 1 << '\t' << "x_" << grid.axis_j + 1 << '\t' << "density\n";
    out << std::setprecision(17);
    for (Eigen::Index a = 0; a < grid.values.rows(); ++a) {
        for (Eigen::Index b = 0; b < grid.values.cols(); ++b) {
            out << grid.coords[a] << '\t' << grid.coords[b] << '\t' << grid.values(a, b) << '\n';
        }
    }
}

double cmi_ratio(Family family, double epsilon, int nodes) {
    ModelSpec model{family, FrequencySet(3, {{1, 0, 1}, {0, 1, 1}}), Vector::Constant(2, epsilon)};
    return cond_mutual_info(model, nodes) / std::pow(epsilon, 4);
}

std::vector<Table1Row> table1(int nodes) {
    const auto spec = [](Family f, int m, std::vector<Frequency> u, double t) {
        return ModelSpec{f, FrequencySet(m, std::move(u)), Vector::Constant(1, t)};
    };
    std::vector<Table1Row> rows;
    rows.push_back({"(1,1)", "maximum correlation",
                    correlation(spec(Family::sgm, 2, {{1, 1}}, 1.0), 0, 1, nodes),
                    correlation(spec(Family::mixm, 2, {{1, 1}}, 0.5), 0, 1, nodes)});
    rows.push_back({"(1,2)", "maximum beta_122", beta122(spec(Family::sgm, 2, {{1, 2}}, -0.25), nodes),
                    beta122(spec(Family::mixm, 2, {{1, 2}}, -0.2), nodes)});
    rows.push_back({"(1,1,1)", "maximum beta_123", beta123(spec(Family::sgm, 3, {{1, 1, 1}}, -1.0), nodes),
                    beta123(spec(Family::mixm, 3, {{1, 1, 1}}, -1.0 / 3.0), nodes)});
    // The ratio is c + O(ε); one Richardson step removes the linear term.
    const auto coefficient = [nodes](Family f) { return 2.0 * cmi_ratio(f, 0.025, nodes) - cmi_ratio(f, 0.05, nodes); };
    rows.push_back({"(1,0,1),(0,1,1)", "leading coefficient of I_12|3", coefficient(Family::sgm), coefficient(Family::mixm)});
    return rows;
}

}  // namespace sgm
