#include "sgm/nnls.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <limits>
#include <vector>

namespace sgm {

Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int max_iterations) {
    const auto n = a.cols();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    if (n == 0) {
        return x;
    }
    if (max_iterations <= 0) {
        max_iterations = static_cast<int>(3 * n + 10);
    }
    std::vector<bool> passive(static_cast<std::size_t>(n), false);
    const double tol = 10.0 * std::numeric_limits<double>::epsilon() * a.norm() * std::max<double>(a.rows(), n);

    auto solve_passive = [&](Eigen::VectorXd& z) {
        std::vector<Eigen::Index> cols;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (passive[static_cast<std::size_t>(j)]) {
                cols.push_back(j);
            }
        }
        Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(cols.size()));
        for (std::size_t k = 0; k < cols.size(); ++k) {
            sub.col(static_cast<Eigen::Index>(k)) = a.col(cols[k]);
        }
        Eigen::VectorXd zs = sub.colPivHouseholderQr().solve(b);
        z.setZero(n);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            z[cols[k]] = zs[static_cast<Eigen::Index>(k)];
        }
    };

    for (int iter = 0; iter < max_iterations; ++iter) {
        Eigen::VectorXd w = a.transpose() * (b - a * x);
        Eigen::Index best = -1;
        double best_w = tol;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!passive[static_cast<std::size_t>(j)] && w[j] > best_w) {
                best_w = w[j];
                best = j;
            }
        }
        if (best < 0) {
            break;
        }
        passive[static_cast<std::size_t>(best)] = true;

        Eigen::VectorXd z;
        for (int inner = 0; inner <= n; ++inner) {
            solve_passive(z);
            bool all_positive = true;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (passive[static_cast<std::size_t>(j)] && z[j] <= 0.0) {
                    all_positive = false;
                }
            }
            if (all_positive) {
                break;
            }
            double alpha = 1.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (passive[static_cast<std::size_t>(j)] && z[j] <= 0.0) {
                    alpha = std::min(alpha, x[j] / (x[j] - z[j]));
                }
            }
            x += alpha * (z - x);
            for (Eigen::Index j = 0; j < n; ++j) {
                if (passive[static_cast<std::size_t>(j)] && x[j] <= tol) {
                    passive[static_cast<std::size_t>(j)] = false;
                    x[j] = 0.0;
                }
            }
        }
        for (Eigen::Index j = 0; j < n; ++j) {
            x[j] = passive[static_cast<std::size_t>(j)] ? std::max(0.0, z[j]) : 0.0;
        }
    }
    return x;
}

}  // namespace sgm
