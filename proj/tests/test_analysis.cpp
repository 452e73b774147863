#include "sgm/analysis.hpp"
#include "sgm/errors.hpp"
#include "sgm/feasibility.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace sgm;

namespace {

constexpr double kPi = std::numbers::pi;

ModelSpec single(Family family, int m, Frequency u, double theta) {
    return {family, FrequencySet(m, {std::move(u)}), Vector::Constant(1, theta)};
}

std::vector<double> sweep(double lo, double hi) {
    std::vector<double> out;
    for (int k = 0; k <= 10; ++k) out.push_back(lo + (hi - lo) * k / 10.0);
    return out;
}

int count_local_maxima(const Eigen::Ref<const Vector>& v) {
    int count = 0;
    const auto n = v.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        const bool left = i == 0 || v[i] > v[i - 1];
        const bool right = i == n - 1 || v[i] > v[i + 1];
        count += left && right;
    }
    return count;
}

double trapezoid_2d(const DensityGrid& g) {
    const auto r = g.coords.size();
    const double h = 1.0 / static_cast<double>(r - 1);
    double total = 0.0;
    for (Eigen::Index a = 0; a < r; ++a) {
        for (Eigen::Index b = 0; b < r; ++b) {
            const double wa = (a == 0 || a == r - 1) ? 0.5 : 1.0;
            const double wb = (b == 0 || b == r - 1) ? 0.5 : 1.0;
            total += wa * wb * g.values(a, b);
        }
    }
    return total * h * h;
}

}  // namespace

TEST_CASE("Gauss-Legendre rule") {
    for (int n : {1, 2, 5, 12, 48}) {
        const QuadratureRule rule = QuadratureRule::gauss_legendre(n);
        CHECK(rule.weights.sum() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(rule.weights.minCoeff() > 0.0);
        for (int k = 0; k <= 2 * n - 1; ++k) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += rule.weights[i] * std::pow(rule.nodes[i], k);
            CHECK(s == doctest::Approx(1.0 / (k + 1)).epsilon(1e-13));
        }
    }
    CHECK(integrate([](const Vector&) { return 1.0; }, 4, QuadratureRule::gauss_legendre(3)) ==
          doctest::Approx(1.0));
    CHECK_THROWS_AS(integrate([](const Vector&) { return 1.0; }, 5, QuadratureRule::gauss_legendre(3)), ResourceLimit);
}

TEST_CASE("cosine orthogonality table") {
    const QuadratureRule rule = QuadratureRule::gauss_legendre(kDefaultQuadNodes);
    for (int u = 0; u <= 4; ++u) {
        for (int v = 0; v <= 4; ++v) {
            const double s = integrate([&](const Vector& x) { return std::cos(kPi * u * x[0]) * std::cos(kPi * v * x[0]); },
                                       1, rule);
            const double expected = u != v ? 0.0 : (u == 0 ? 1.0 : 0.5);
            CHECK(s == doctest::Approx(expected).epsilon(1e-13).scale(1.0));
        }
    }
}

TEST_CASE("densities integrate to one") {
    std::mt19937_64 rng(61);
    std::normal_distribution<double> z;
    for (int m = 1; m <= 3; ++m) {
        const FrequencySet f = FrequencySet::standard(m);
        for (int rep = 0; rep < 3; ++rep) {
            Vector draw(static_cast<Eigen::Index>(f.size()));
            for (auto& v : draw) v = z(rng);
            for (Family fam : {Family::sgm, Family::mixm}) {
                // Rescale onto 99% of the family's lit region.
                const double used = 1.0 - (fam == Family::sgm ? lit_margin(f, draw, 1.0) : mixm_lit_margin(f, draw, 1.0));
                const Vector t = draw * (0.99 / used);
                const ModelSpec model{fam, f, t};
                CHECK(expectation(model, [](const Vector&) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("correlation model closed forms") {
    for (double t : sweep(-1.0, 1.0)) {
        const ModelSpec model = single(Family::sgm, 2, {1, 1}, t);
        const double closed = (96 * t / std::pow(kPi, 4)) / (1 + 3 * t * t / (kPi * kPi));
        CHECK(correlation(model, 0, 1) == doctest::Approx(closed).epsilon(1e-8).scale(1.0));
        const double mean = expectation(model, [](const Vector& x) { return x[0]; });
        const double var = expectation(model, [](const Vector& x) { return (x[0] - 0.5) * (x[0] - 0.5); });
        CHECK(std::abs(mean - 0.5) <= 1e-8);
        CHECK(std::abs(var - (1.0 / 12 + t * t / (4 * kPi * kPi))) <= 1e-8);
        for (double x : {0.0, 0.13, 0.5, 0.77, 1.0}) {
            const double m1 = marginal_density(model, {0}, Vector::Constant(1, x));
            CHECK(std::abs(m1 - (1 + t * t / 2 * std::cos(2 * kPi * x))) <= 1e-8);
        }
    }
    CHECK(correlation(single(Family::sgm, 2, {1, 1}, 0.5), 0, 1) == doctest::Approx(0.458).epsilon(1e-3));
}

TEST_CASE("heteroscedastic model") {
    for (double t : sweep(-0.25, 0.25)) {
        const ModelSpec model = single(Family::sgm, 2, {1, 2}, t);
        const double closed = (-5 * t / std::pow(kPi, 4)) /
                              (std::sqrt(1.0 / 12 + t * t / (kPi * kPi)) * (1.0 / 12 + t * t / (4 * kPi * kPi)));
        CHECK(beta122(model) == doctest::Approx(closed).epsilon(1e-8).scale(1.0));
        const QuadratureRule rule = QuadratureRule::gauss_legendre(kDefaultQuadNodes);
        for (double x1 : {0.0, 0.21, 0.5, 0.9}) {
            double mass = 0.0, first = 0.0, second = 0.0;
            for (int i = 0; i < rule.size(); ++i) {
                Vector x(2);
                x << x1, rule.nodes[i];
                const double p = density(model.freqs, x, model.theta);
                mass += rule.weights[i] * p;
                first += rule.weights[i] * p * x[1];
                second += rule.weights[i] * p * (x[1] - 0.5) * (x[1] - 0.5);
            }
            CHECK(std::abs(first / mass - 0.5) <= 1e-8);
            const double c1 = std::cos(kPi * x1);
            const double cvar = 1.0 / 12 + (10 * t * c1 + t * t) / (4 * kPi * kPi * (1 + 2 * t * t * std::cos(2 * kPi * x1)));
            CHECK(std::abs(second / mass - cvar) <= 1e-8);
        }
    }
    CHECK(beta122(single(Family::sgm, 2, {1, 2}, 0.0)) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("three-way interaction model") {
    for (double t : sweep(-1.0 / 3, 1.0 / 3)) {
        const ModelSpec mixm = single(Family::mixm, 3, {1, 1, 1}, t);
        CHECK(beta123(mixm, 24) == doctest::Approx(-288 * std::sqrt(12.0) * t / std::pow(kPi, 6)).epsilon(1e-8).scale(1.0));
    }
    const double closed = (24 / std::pow(kPi, 6) + 1944 / (729 * std::pow(kPi, 6))) /
                          std::pow(1.0 / 12 + 1 / (4 * kPi * kPi), 1.5);
    CHECK(beta123(single(Family::sgm, 3, {1, 1, 1}, -1.0), 24) == doctest::Approx(closed).epsilon(1e-8));
    for (double t : {-1.0, -0.4, 0.6}) {
        const ModelSpec model = single(Family::sgm, 3, {1, 1, 1}, t);
        for (double a : {0.1, 0.45}) {
            for (double b : {0.0, 0.7}) {
                Vector x(2);
                x << a, b;
                const double c1 = std::cos(kPi * a), c2 = std::cos(kPi * b);
                CHECK(std::abs(marginal_density(model, {0, 1}, x) - (1 + t * t * (4 * c1 * c1 * c2 * c2 - 1) / 2)) <= 1e-8);
            }
            CHECK(std::abs(marginal_density(model, {2}, Vector::Constant(1, a)) -
                           (1 + t * t * (2 * std::cos(kPi * a) * std::cos(kPi * a) - 1) / 2)) <= 1e-8);
        }
        CHECK(std::abs(correlation(model, 0, 2)) <= 1e-12);
    }
}

TEST_CASE("Fisher information by quadrature") {
    const FrequencySet f = FrequencySet::standard(2);
    const Matrix j0 = fisher_numeric({Family::sgm, f, Vector::Zero(static_cast<Eigen::Index>(f.size()))});
    const Vector origin = fisher_origin(f);
    CHECK((j0 - Matrix(origin.asDiagonal())).cwiseAbs().maxCoeff() <= 1e-10);
    const Matrix jm = fisher_numeric({Family::mixm, f, Vector::Zero(static_cast<Eigen::Index>(f.size()))});
    CHECK((jm - j0).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(fisher_numeric(single(Family::sgm, 2, {1, 1}, 0.6))(0, 0) == doctest::Approx(fisher_closed_corr(0.6)).epsilon(1e-6));
    CHECK(fisher_numeric(single(Family::sgm, 1, {2}, 0.1))(0, 0) == doctest::Approx(fisher_closed_1d(2, 0.1)).epsilon(1e-6));
}

TEST_CASE("density grids") {
    const DensityGrid flat = density_grid(single(Family::sgm, 2, {1, 1}, 0.0), {0, 1}, 5);
    CHECK((flat.values.array() - 1.0).abs().maxCoeff() <= 1e-12);

    const FrequencySet f(3, {{1, 2, 0}, {0, 1, 1}, {1, 1, 1}});
    Vector theta(3);
    theta[static_cast<Eigen::Index>(f.index_of(Frequency{1, 2, 0}))] = 0.1;
    theta[static_cast<Eigen::Index>(f.index_of(Frequency{0, 1, 1}))] = 0.3;
    theta[static_cast<Eigen::Index>(f.index_of(Frequency{1, 1, 1}))] = 0.2;
    const ModelSpec truth{Family::sgm, f, theta};
    const DensityGrid hi = density_grid(truth, {0, 2}, 101, {{1, 0.75}});
    const DensityGrid lo = density_grid(truth, {0, 2}, 101, {{1, 0.25}});
    CHECK(hi.values.minCoeff() >= 0.0);
    CHECK(lo.values.minCoeff() >= 0.0);
    CHECK(std::abs(trapezoid_2d(hi) - 1.0) <= 1e-3);
    CHECK(std::abs(trapezoid_2d(lo) - 1.0) <= 1e-3);
    CHECK((hi.values - lo.values).cwiseAbs().maxCoeff() > 0.1);
    for (double c : {0.0, 0.3, 0.9, 1.0}) {
        CHECK(std::abs(trapezoid_2d(density_grid(truth, {0, 2}, 101, {{1, c}})) - 1.0) <= 1e-3);
    }
    CHECK(std::abs(trapezoid_2d(density_grid(truth, {1, 2}, 101)) - 1.0) <= 1e-3);

    const DensityGrid het = density_grid(single(Family::sgm, 2, {1, 2}, 0.2), {0, 1}, 201);
    CHECK(het.coords[190] == doctest::Approx(0.95));
    CHECK(count_local_maxima(het.values.row(190).transpose()) == 1);
    CHECK(count_local_maxima(het.values.row(10).transpose()) == 2);

    std::ostringstream out;
    write_grid_tsv(out, density_grid(single(Family::sgm, 2, {1, 1}, 0.5), {0, 1}, 3));
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "x_1\tx_2\tdensity");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        CHECK(std::count(line.begin(), line.end(), '\t') == 2);
    }
    CHECK(rows == 9);
    CHECK_THROWS_AS(density_grid(truth, {0, 2}, 1), InvalidArgument);
}

TEST_CASE("conditional mutual information") {
    const FrequencySet f(3, {{1, 0, 1}, {0, 1, 1}});
    Vector theta(2);
    theta[static_cast<Eigen::Index>(f.index_of(Frequency{1, 0, 1}))] = 0.0;
    theta[static_cast<Eigen::Index>(f.index_of(Frequency{0, 1, 1}))] = 0.3;
    for (Family fam : {Family::sgm, Family::mixm}) {
        CHECK(std::abs(cond_mutual_info({fam, f, theta}, 24)) <= 1e-12);
        CHECK(std::abs(cond_mutual_info({fam, f, Vector::Zero(2)}, 24)) <= 1e-12);
        CHECK(cond_mutual_info({fam, f, Vector::Constant(2, 0.2)}, 24) > 0.0);
    }
    CHECK_THROWS_AS(cond_mutual_info({Family::mixm, f, Vector::Constant(2, 0.9)}, 24), InvalidArgument);
}
