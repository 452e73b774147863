#include "simulation.hpp"

#include "sgm/errors.hpp"
#include "sgm/parallel.hpp"
#include "sgm/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <optional>

namespace sgm::cli {

namespace {

constexpr int kDim = 5;

struct Replicate {
    Vector sgm_scaled;
    Vector mixm_scaled;
    Vector gauss_rho;  // upper triangle, pairs in (j, then i < j) order
    std::vector<double> sgm_pred;
    std::vector<double> mixm_pred;
    std::vector<double> gauss_pred;
    std::optional<std::string> error;
};

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Vector upper_pairs(const Matrix& rho) {
    Vector out(rho.rows() * (rho.rows() - 1) / 2);
    Eigen::Index p = 0;
    for (Eigen::Index j = 0; j < rho.rows(); ++j) {
        for (Eigen::Index i = 0; i < j; ++i) {
            out[p++] = rho(i, j);
        }
    }
    return out;
}

Replicate run_replicate(const SimulationOptions& opt, const FrequencySet& freqs, int r) {
    Replicate rep;
    const auto ur = static_cast<std::uint64_t>(r);
    const Matrix train_raw = sample_benchmark5(static_cast<std::size_t>(opt.n_train), derive_seed(opt.seed, ur, 0));
    const Matrix test_raw = sample_benchmark5(static_cast<std::size_t>(opt.n_test), derive_seed(opt.seed, ur, 1));
    const Preprocessor pre = Preprocessor::fit(train_raw);
    const Matrix train_unit = pre.to_unit(train_raw);
    const Matrix test_unit = pre.to_unit(test_raw);
    const Matrix train_std = pre.standardize(train_raw);
    const Matrix test_std = pre.standardize(test_raw);

    auto fit_at = [&](Family family, double tau) {
        return fit_family(family, train_unit, freqs, RegionSpec::lit(tau), opt.solver);
    };
    const FitResult sgm = fit_at(Family::sgm, opt.tau);
    const FitResult mixm = fit_at(Family::mixm, opt.tau);
    const ConcentrationMatrix gauss = fit_gauss_lasso(train_std, opt.tau, opt.solver);
    rep.sgm_scaled = sgm.scaled;
    rep.mixm_scaled = mixm.scaled;
    rep.gauss_rho = upper_pairs(partial_correlations(gauss.C));

    for (double tau : opt.tau_grid) {
        const bool same = tau == opt.tau;
        const Vector ts = same ? sgm.theta : fit_at(Family::sgm, tau).theta;
        const Vector tm = same ? mixm.theta : fit_at(Family::mixm, tau).theta;
        const Matrix c = same ? gauss.C : fit_gauss_lasso(train_std, tau, opt.solver).C;
        rep.sgm_pred.push_back(loglik(Family::sgm, freqs, ts, test_unit));
        rep.mixm_pred.push_back(loglik(Family::mixm, freqs, tm, test_unit));
        rep.gauss_pred.push_back(gauss_loglik(c, test_std));
    }
    return rep;
}

ModelSummary summarize_model(const std::vector<Replicate>& reps, const std::vector<Frequency>& labels,
                             const std::vector<double>& grid, Vector Replicate::*coef,
                             std::vector<double> Replicate::*pred) {
    ModelSummary out;
    for (std::size_t k = 0; k < labels.size(); ++k) {
        std::vector<double> v;
        for (const auto& r : reps) {
            if (!r.error) {
                v.push_back((r.*coef)[static_cast<Eigen::Index>(k)]);
            }
        }
        out.coefficients.push_back({labels[k], summarize(v)});
    }
    std::stable_sort(out.coefficients.begin(), out.coefficients.end(), [](const auto& a, const auto& b) {
        return std::abs(a.value.mean) > std::abs(b.value.mean);
    });
    for (std::size_t t = 0; t < grid.size(); ++t) {
        std::vector<double> v;
        for (const auto& r : reps) {
            if (!r.error) {
                v.push_back((r.*pred)[t]);
            }
        }
        out.predictive.push_back({grid[t], summarize(v)});
        if (out.predictive[t].loglik.mean > out.predictive[out.best].loglik.mean) {
            out.best = t;
        }
    }
    return out;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t r, std::uint64_t k) {
    return splitmix64(splitmix64(seed) ^ splitmix64(2 * r + k + 1));
}

Summary summarize(const std::vector<double>& values) {
    Summary s;
    s.count = static_cast<int>(values.size());
    if (values.empty()) {
        return s;
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    s.mean = sum / s.count;
    if (s.count > 1) {
        double ss = 0.0;
        for (double v : values) {
            ss += (v - s.mean) * (v - s.mean);
        }
        s.se = std::sqrt(ss / (s.count - 1) / s.count);
    }
    return s;
}

SimulationResult run_simulation(const SimulationOptions& options) {
    if (options.replicates < 1 || options.n_train < 2 || options.n_test < 1 || options.tau_grid.empty()) {
        throw InvalidArgument("simulation needs replicates >= 1, n >= 2, n_test >= 1 and a nonempty tau grid");
    }
    const FrequencySet freqs = FrequencySet::standard(kDim);
    std::vector<Replicate> reps(static_cast<std::size_t>(options.replicates));
    parallel_for(reps.size(), options.jobs, [&](std::size_t r) {
        try {
            reps[r] = run_replicate(options, freqs, static_cast<int>(r));
        } catch (const std::exception& e) {
            reps[r] = Replicate{};
            reps[r].error = e.what();
        }
    });

    SimulationResult out;
    for (std::size_t r = 0; r < reps.size(); ++r) {
        if (reps[r].error) {
            out.failures.push_back("replicate " + std::to_string(r) + ": " + *reps[r].error);
        } else {
            ++out.completed;
        }
    }
    std::vector<Frequency> pairs;
    for (int j = 0; j < kDim; ++j) {
        for (int i = 0; i < j; ++i) {
            Frequency u(kDim, 0);
            u[static_cast<std::size_t>(i)] = u[static_cast<std::size_t>(j)] = 1;
            pairs.push_back(u);
        }
    }
    out.sgm = summarize_model(reps, freqs.freqs(), options.tau_grid, &Replicate::sgm_scaled, &Replicate::sgm_pred);
    out.mixm = summarize_model(reps, freqs.freqs(), options.tau_grid, &Replicate::mixm_scaled, &Replicate::mixm_pred);
    out.gauss = summarize_model(reps, pairs, options.tau_grid, &Replicate::gauss_rho, &Replicate::gauss_pred);
    return out;
}

}  // namespace sgm::cli
