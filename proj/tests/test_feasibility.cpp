#include "sgm/errors.hpp"
#include "sgm/feasibility.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <random>

using namespace sgm;

namespace {

const FrequencySet kTruthSet(3, {{1, 2, 0}, {0, 1, 1}, {1, 1, 1}});

Vector truth_theta() {
    Vector theta(3);
    theta[static_cast<Eigen::Index>(kTruthSet.index_of(Frequency{1, 2, 0}))] = 0.1;
    theta[static_cast<Eigen::Index>(kTruthSet.index_of(Frequency{0, 1, 1}))] = 0.3;
    theta[static_cast<Eigen::Index>(kTruthSet.index_of(Frequency{1, 1, 1}))] = 0.2;
    return theta;
}

// Brute-force min over z of 1 + ρ₁ cos z + ρ₂ cos 2z.
double ma2_brute(double t11, double t22) {
    double best = 1e300;
    for (int k = 0; k <= 200000; ++k) {
        const double z = std::numbers::pi * k / 200000.0;
        best = std::min(best, 1 + t11 * std::cos(z) + 4 * t22 * std::cos(2 * z));
    }
    return best;
}

}  // namespace

TEST_CASE("lit margin") {
    const FrequencySet one(2, {{1, 1}});
    CHECK(lit_margin(one, Vector::Zero(1), 1.0) == 1.0);
    CHECK(lit_margin(one, Vector::Constant(1, 1.0), 1.0) == doctest::Approx(0.0));
    CHECK(lit_margin(kTruthSet, truth_theta(), 1.0) == doctest::Approx(0.1));
    // Affine in τ with slope one.
    CHECK(lit_margin(kTruthSet, truth_theta(), 0.5) == doctest::Approx(-0.4));
    CHECK(mixm_lit_margin(kTruthSet, truth_theta(), 1.0) == doctest::Approx(1 - 0.5 - 0.6 - 0.6));
}

TEST_CASE("K_M scaling") {
    const FrequencySet f(3, {{1, 1, 0}, {0, 0, 2}});
    Vector theta(2);
    theta << 0.2, -0.1;
    const Vector scaled = scale_km(f, theta, 5);
    CHECK(scaled[static_cast<Eigen::Index>(f.index_of(Frequency{1, 1, 0}))] ==
          doctest::Approx(0.2 * 1.5625));
    CHECK(scaled[static_cast<Eigen::Index>(f.index_of(Frequency{0, 0, 2}))] == doctest::Approx(-0.1 / 0.6));
    const Vector far = scale_km(f, theta, 1000);
    // (K_M θ)_u − θ_u ≈ θ_u Σ_j u_j / M.
    CHECK((far - theta).norm() <= theta.norm() * 2 * 3 / 1000.0);
}

TEST_CASE("lattice enumeration and caps") {
    int count = 0;
    Vector first, last;
    for_each_lattice_point(2, 3, [&](const Vector& xi) {
        if (count == 0) first = xi;
        if (count == 1) CHECK(xi[0] == doctest::Approx(1.0 / 3.0));
        last = xi;
        ++count;
    });
    CHECK(count == 16);
    CHECK(first.norm() == 0.0);
    CHECK(last.isApprox(Vector::Ones(2)));
    CHECK_THROWS_AS(for_each_lattice_point(3, 9, [](const Vector&) {}, 999), ResourceLimit);
}

TEST_CASE("region validation") {
    const FrequencySet f = FrequencySet::standard(2);
    CHECK_NOTHROW(RegionSpec::lattice(3).validate(f));
    CHECK_THROWS_AS(RegionSpec::lattice(2).validate(f), InvalidArgument);
    CHECK_NOTHROW(RegionSpec::lit(0.0).validate(f));
    CHECK_THROWS_AS(RegionSpec::lit(1.5).validate(f), InvalidArgument);
    CHECK_THROWS_AS(RegionSpec::lit(-0.1).validate(f), InvalidArgument);
}

TEST_CASE("lattice membership") {
    const FrequencySet f = FrequencySet::standard(2);
    const LatticeCheck zero = lattice_feasible(f, Vector::Zero(static_cast<Eigen::Index>(f.size())), 3);
    CHECK(zero.feasible);
    CHECK(zero.margin == doctest::Approx(1.0));
    // The three-frequency truth enters the lattice region only at M = 10.
    CHECK_FALSE(lattice_feasible(kTruthSet, truth_theta(), 8).feasible);
    CHECK(lattice_feasible(kTruthSet, truth_theta(), 10).feasible);
    const FrequencySet one(2, {{1, 1}});
    CHECK_FALSE(lattice_feasible(one, Vector::Constant(1, 1.0), 2).feasible);
    CHECK(mixm_lattice_feasible(one, Vector::Constant(1, 0.1), 2).feasible);
    CHECK_FALSE(mixm_lattice_feasible(one, Vector::Constant(1, 0.2), 2).feasible);
}

TEST_CASE("smallest eigenvalue and grid scan") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> z;
    for (int rep = 0; rep < 20; ++rep) {
        Matrix a(4, 4);
        for (auto& v : a.reshaped()) v = z(rng);
        a = (a + a.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Matrix> es(a);
        CHECK(min_eigenvalue(a) == doctest::Approx(es.eigenvalues()[0]).epsilon(1e-12));
    }
    const FrequencySet one(2, {{1, 1}});
    for (double t : {-0.8, -0.2, 0.0, 0.5, 1.0}) {
        CHECK(min_eig_grid(one, Vector::Constant(1, t)) == doctest::Approx(1 - std::abs(t)).epsilon(1e-9));
    }
    const FrequencySet ma(2, {{1, 1}, {2, 2}});
    Vector theta(2);
    theta << 0.0, 0.3;
    CHECK(min_eig_grid(ma, theta) < 0.0);
}

TEST_CASE("single-frequency lit boundary is tight") {
    for (const Frequency& u : {Frequency{1}, Frequency{2}, Frequency{1, 2}, Frequency{2, 1, 1}}) {
        const FrequencySet f(static_cast<int>(u.size()), {u});
        int umax = 0;
        for (int v : u) umax = std::max(umax, v);
        for (double sign : {-1.0, 1.0}) {
            const Vector theta = Vector::Constant(1, sign / (umax * umax));
            CHECK(std::abs(min_eig_grid(f, theta)) <= 1e-6);
        }
    }
}

TEST_CASE("exact MA(2) region") {
    CHECK(ma2_feasible(0.0, 0.0));
    CHECK(ma2_feasible(0.0, 0.2));
    CHECK_FALSE(ma2_feasible(0.0, 0.3));
    // Feasible point outside both clauses of the two-clause description.
    CHECK(ma2_feasible(1.2, 0.125));
    CHECK(ma2_margin(1.2, 0.125) == doctest::Approx(0.14).epsilon(1e-12));
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> a(-1.5, 1.5), b(-0.5, 0.5);
    for (int rep = 0; rep < 40; ++rep) {
        const double t11 = a(rng), t22 = b(rng);
        CHECK(ma2_margin(t11, t22) == doctest::Approx(ma2_brute(t11, t22)).epsilon(1e-8).scale(1.0));
    }
}

TEST_CASE("Fejér kernel") {
    for (int M : {1, 2, 3, 5, 8}) {
        CHECK(fejer_kernel(M, 0.0) == doctest::Approx(0.5));
        CHECK(fejer_kernel(M, 2.0) == doctest::Approx(0.5));
        std::mt19937_64 rng(static_cast<std::uint64_t>(M));
        std::uniform_real_distribution<double> u(0.0, 1.0), w(-3.0, 3.0);
        for (int rep = 0; rep < 10; ++rep) {
            const double x = u(rng);
            double total = 0.0;
            for (int k = -(M - 1); k <= M; ++k) {
                total += fejer_kernel(M, x - static_cast<double>(k) / M);
            }
            CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(fejer_kernel(M, w(rng)) >= 0.0);
        }
        const double z = 0.37;
        const double closed = std::pow(std::sin(std::numbers::pi * M * z / 2) / std::sin(std::numbers::pi * z / 2), 2) /
                              (2.0 * M * M);
        CHECK(fejer_kernel(M, z) == doctest::Approx(closed).epsilon(1e-12));
    }
}

TEST_CASE("Fejér reconstruction of the Hessian") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> z(0.0, 0.2);
    const FrequencySet two = FrequencySet::standard(2);
    Vector theta(static_cast<Eigen::Index>(two.size()));
    for (auto& t : theta) t = z(rng);
    for (int rep = 0; rep < 5; ++rep) {
        Vector x(2);
        x << u(rng), u(rng);
        CHECK((fejer_reconstruct(two, theta, 3, x) - hessian(two, x, theta)).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK((fejer_reconstruct(two, Vector::Zero(theta.size()), 3, x) - Matrix::Identity(2, 2)).norm() <= 1e-12);
    }
    const FrequencySet f(1, {{2}});
    for (int k = 0; k <= 10; ++k) {
        const Vector x = Vector::Constant(1, k / 10.0);
        const Vector t = Vector::Constant(1, 0.2);
        CHECK(std::abs(fejer_reconstruct(f, t, 3, x)(0, 0) - hessian(f, x, t)(0, 0)) <= 1e-10);
    }
}
