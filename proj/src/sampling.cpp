#include "sgm/sampling.hpp"

#include "sgm/errors.hpp"

#include <cmath>
#include <random>
#include <string>

namespace sgm {

double rejection_bound(const FrequencySet& freqs, const VectorRef& theta) {
    check_dimensions(freqs, Vector::Zero(freqs.dim()), theta);
    double bound = 1.0;
    for (int j = 0; j < freqs.dim(); ++j) {
        double row = 1.0;
        for (std::size_t k = 0; k < freqs.size(); ++k) {
            const int uj = freqs[k][static_cast<std::size_t>(j)];
            row += std::abs(theta[static_cast<Eigen::Index>(k)]) * uj * uj;
        }
        bound *= row;
    }
    return bound;
}

double mixm_rejection_bound(const FrequencySet& freqs, const VectorRef& theta) {
    check_dimensions(freqs, Vector::Zero(freqs.dim()), theta);
    double bound = 1.0;
    for (std::size_t k = 0; k < freqs.size(); ++k) {
        bound += std::abs(theta[static_cast<Eigen::Index>(k)]) * squared_norm(freqs[k]);
    }
    return bound;
}

double family_bound(Family family, const FrequencySet& freqs, const VectorRef& theta) {
    return family == Family::sgm ? rejection_bound(freqs, theta) : mixm_rejection_bound(freqs, theta);
}

SampleResult sample_family(Family family, const FrequencySet& freqs, const VectorRef& theta, std::size_t n,
                           std::uint64_t seed) {
    if (n < 1) {
        throw InvalidArgument("sample size must be positive");
    }
    const int m = freqs.dim();
    SampleResult out;
    out.bound = family_bound(family, freqs, theta);
    out.samples.resize(static_cast<Eigen::Index>(n), m);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Vector x(m);
    for (std::size_t i = 0; i < n;) {
        for (int j = 0; j < m; ++j) {
            x[j] = unif(rng);
        }
        ++out.proposals;
        const double p = family_density(family, freqs, x, theta);
        if (p < 0.0) {
            throw NumericalError("negative density at a proposal: theta is infeasible");
        }
        if (p > out.bound * (1.0 + 1e-12)) {
            throw NumericalError("density " + std::to_string(p) + " exceeds the rejection bound " +
                                 std::to_string(out.bound));
        }
        if (unif(rng) * out.bound < p) {
            out.samples.row(static_cast<Eigen::Index>(i++)) = x.transpose();
        }
    }
    return out;
}

Matrix sample_sgm(const FrequencySet& freqs, const VectorRef& theta, std::size_t n, std::uint64_t seed) {
    return sample_family(Family::sgm, freqs, theta, n, seed).samples;
}

Matrix sample_mixm(const FrequencySet& freqs, const VectorRef& theta, std::size_t n, std::uint64_t seed) {
    return sample_family(Family::mixm, freqs, theta, n, seed).samples;
}

Matrix sample_benchmark5(std::size_t n, std::uint64_t seed) {
    if (n < 1) {
        throw InvalidArgument("sample size must be positive");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    Matrix out(static_cast<Eigen::Index>(n), 5);
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        const double x1 = z(rng);
        const double x2 = x1 + z(rng);
        const double x3 = std::sqrt(1.0 + std::tanh(x2)) * z(rng);
        const double r = std::tanh(x3);
        const double x4 = z(rng);
        const double x5 = r * x4 + std::sqrt(1.0 - r * r) * z(rng);
        out.row(i) << x1, x2, x3, x4, x5;
    }
    return out;
}

}  // namespace sgm
