#include "sgm/quadrature.hpp"

#include "sgm/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace sgm {

QuadratureRule QuadratureRule::gauss_legendre(int points) {
    if (points < 1) {
        throw InvalidArgument("quadrature needs at least one node");
    }
    QuadratureRule rule;
    rule.nodes.resize(points);
    rule.weights.resize(points);
    const int n = points;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        // Newton on P_n from the Chebyshev-like initial guess.
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) {
                p0 = 1.0;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) {
                break;
            }
        }
        // Recompute the derivative at the converged root.
        double p0 = 1.0;
        double p1 = z;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n == 1 ? 1.0 : n * (z * p1 - p0) / (z * z - 1.0);
        const double w = 1.0 / ((1.0 - z * z) * dp * dp);  // half of the [-1,1] weight
        rule.nodes[i] = 0.5 * (1.0 - z);
        rule.nodes[n - 1 - i] = 0.5 * (1.0 + z);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

void for_each_node(int m, const QuadratureRule& rule, const std::function<void(const Vector&, double)>& visit) {
    if (m < 1 || m > kMaxTensorDim) {
        throw ResourceLimit("tensor quadrature supports 1 to " + std::to_string(kMaxTensorDim) + " dimensions, got " +
                            std::to_string(m));
    }
    const int n = rule.size();
    std::vector<int> idx(static_cast<std::size_t>(m), 0);
    Vector x(m);
    while (true) {
        double w = 1.0;
        for (int j = 0; j < m; ++j) {
            x[j] = rule.nodes[idx[static_cast<std::size_t>(j)]];
            w *= rule.weights[idx[static_cast<std::size_t>(j)]];
        }
        visit(x, w);
        int j = 0;
        while (j < m && ++idx[static_cast<std::size_t>(j)] == n) {
            idx[static_cast<std::size_t>(j)] = 0;
            ++j;
        }
        if (j == m) {
            break;
        }
    }
}

double integrate(const std::function<double(const Vector&)>& f, int m, const QuadratureRule& rule) {
    double total = 0.0;
    for_each_node(m, rule, [&](const Vector& x, double w) { total += w * f(x); });
    return total;
}

}  // namespace sgm
