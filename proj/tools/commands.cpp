#include "commands.hpp"

#include "io.hpp"
#include "simulation.hpp"

#include "sgm/analysis.hpp"
#include "sgm/errors.hpp"
#include "sgm/estimators.hpp"
#include "sgm/sampling.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace sgm::cli {

namespace {

using Json = nlohmann::ordered_json;

enum class LogLevel { warn, info, debug };

LogLevel log_level() {
    const char* env = std::getenv("SGM_LOG");
    const std::string v = env ? env : "";
    if (v == "debug") {
        return LogLevel::debug;
    }
    if (v == "info") {
        return LogLevel::info;
    }
    return LogLevel::warn;
}

void log(LogLevel level, const std::string& msg) {
    static const LogLevel threshold = log_level();
    if (level <= threshold) {
        std::cerr << "[sgm] " << msg << '\n';
    }
}

struct Options {
    std::string input;
    std::string output;
    std::string model = "sgm";
    std::string region = "lit";
    std::string freqs = "standard";
    std::string theta;
    double tau = 1.0;
    int M = 0;
    std::uint64_t seed = 1;
    int folds = 5;
    int jobs = 1;
    int quad_nodes = kDefaultQuadNodes;
    bool no_preprocess = false;
    std::string tau_grid = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0";
    bool global_preprocess = false;
    std::size_t n = 100;
    bool table1 = false;
    std::string quantity;
    std::string axes;
    std::string at;
    std::string condition;
    int resolution = 51;
    int replicates = 20;
    int n_test = 10;
};

Json vector_json(const VectorRef& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        a.push_back(v[i]);
    }
    return a;
}

Json matrix_json(const MatrixRef& m) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        a.push_back(vector_json(m.row(i).transpose()));
    }
    return a;
}

Json freqs_json(const FrequencySet& freqs) {
    Json a = Json::array();
    for (const auto& u : freqs) {
        a.push_back(u);
    }
    return a;
}

Json solver_json(const SolveReport& r) {
    return Json{{"status", r.status},
                {"converged", r.converged},
                {"objective", r.objective},
                {"kkt_residual", r.kkt_residual},
                {"barrier_weight", r.barrier_weight},
                {"outer_iterations", r.outer_iterations},
                {"newton_iterations", r.newton_iterations}};
}

Json summary_json(const Summary& s) {
    return Json{{"mean", s.mean}, {"se", s.se}, {"ci95", 1.96 * s.se}, {"count", s.count}};
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_.open(path);
            if (!file_) {
                throw DataError("cannot write " + path);
            }
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

void emit(const Options& o, Json j) {
    Output out(o.output);
    out.stream() << j.dump(2) << '\n';
}

Json header(const std::string& command) {
    return Json{{"schema", 1}, {"command", command}};
}

Family parse_family(const std::string& model) {
    if (model == "sgm") {
        return Family::sgm;
    }
    if (model == "mixm") {
        return Family::mixm;
    }
    throw InvalidArgument("--model must be sgm or mixm here, got " + model);
}

RegionSpec parse_region(const Options& o, const FrequencySet& freqs) {
    if (o.region == "lit") {
        return RegionSpec::lit(o.tau);
    }
    if (o.region == "lattice") {
        return RegionSpec::lattice(o.M > 0 ? o.M : freqs.max_order() + 1);
    }
    throw InvalidArgument("--region must be lit or lattice");
}

Json region_json(const RegionSpec& r) {
    if (r.kind == RegionSpec::Kind::lit) {
        return Json{{"kind", "lit"}, {"tau", r.tau}};
    }
    return Json{{"kind", "lattice"}, {"M", r.M}};
}

Json common_config(const Options& o) {
    return Json{{"input", o.input},   {"model", o.model}, {"region", o.region}, {"tau", o.tau},
                {"M", o.M},           {"freqs", o.freqs}, {"seed", o.seed},     {"folds", o.folds},
                {"jobs", o.jobs},     {"quad_nodes", o.quad_nodes}, {"preprocess", !o.no_preprocess}};
}

std::vector<int> parse_axes(const std::string& text, int m) {
    std::vector<int> axes;
    for (double v : parse_doubles(text)) {
        const int a = static_cast<int>(v);
        if (a != v || a < 1 || a > m) {
            throw InvalidArgument("axes are 1-based integers up to " + std::to_string(m));
        }
        axes.push_back(a - 1);
    }
    return axes;
}

double elapsed(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void cmd_fit(const Options& o) {
    const auto start = std::chrono::steady_clock::now();
    const Matrix raw = read_csv_file(o.input);
    Json j = header("fit");
    j["config"] = common_config(o);
    j["n"] = raw.rows();
    j["m"] = raw.cols();
    if (o.model == "gauss") {
        const Matrix data = o.no_preprocess ? raw : preprocess(raw).standardized;
        const ConcentrationMatrix fit = fit_gauss_lasso(data, o.tau);
        j["model"] = "gauss";
        j["tau"] = o.tau;
        j["budget"] = fit.budget;
        j["C"] = matrix_json(fit.C);
        j["partial_correlations"] = matrix_json(partial_correlations(fit.C));
        j["sample_correlation"] = matrix_json(fit.sigma);
        j["loglik"] = gauss_loglik(fit.C, data);
        j["solver"] = solver_json(fit.report);
    } else {
        const Family family = parse_family(o.model);
        const FrequencySet freqs = parse_freqs(o.freqs, static_cast<int>(raw.cols()));
        const RegionSpec region = parse_region(o, freqs);
        const Matrix data = o.no_preprocess ? raw : preprocess(raw).unit;
        log(LogLevel::info, "fitting " + o.model + " with " + std::to_string(freqs.size()) + " frequencies");
        const FitResult fit = fit_family(family, data, freqs, region);
        j["model"] = o.model;
        j["region"] = region_json(region);
        j["freqs"] = freqs_json(freqs);
        j["theta"] = vector_json(fit.theta);
        j["theta_raw"] = vector_json(fit.theta_raw);
        j["scaled"] = vector_json(fit.scaled);
        j["loglik"] = fit.loglik;
        j["solver"] = solver_json(fit.report);
        if (!fit.report.converged) {
            log(LogLevel::warn, "solver did not converge: " + fit.report.status);
        }
    }
    j["timing"] = Json{{"seconds", elapsed(start)}};
    emit(o, std::move(j));
}

void cmd_cv(const Options& o) {
    const auto start = std::chrono::steady_clock::now();
    const Matrix raw = read_csv_file(o.input);
    CvOptions cv;
    if (o.model == "gauss") {
        cv.model = ModelKind::gauss;
    } else {
        cv.model = parse_family(o.model) == Family::sgm ? ModelKind::sgm : ModelKind::mixm;
        cv.freqs = parse_freqs(o.freqs, static_cast<int>(raw.cols()));
    }
    if (o.region != "lit" && o.region != "lattice") {
        throw InvalidArgument("--region must be lit or lattice");
    }
    cv.region = o.region == "lit" ? RegionSpec::Kind::lit : RegionSpec::Kind::lattice;
    cv.M = o.M;
    cv.tau_grid = parse_doubles(o.tau_grid);
    cv.folds = o.folds;
    cv.seed = o.seed;
    cv.preprocess = !o.no_preprocess;
    cv.global_preprocess = o.global_preprocess;
    cv.jobs = o.jobs;
    const CvResult result = cross_validate(raw, cv);

    Json j = header("cv");
    Json config = common_config(o);
    config["tau_grid"] = cv.tau_grid;
    config["global_preprocess"] = o.global_preprocess;
    j["config"] = config;
    Json rows = Json::array();
    for (std::size_t r = 0; r < result.rows.size(); ++r) {
        Json row{{"tau", result.rows[r].tau}, {"cv_loglik", result.rows[r].loglik}, {"best", r == result.best}};
        if (!std::isfinite(result.rows[r].loglik)) {
            row["cv_loglik"] = nullptr;
            row["infinite"] = true;
        }
        rows.push_back(row);
    }
    j["rows"] = rows;
    j["best_tau"] = result.rows[result.best].tau;
    j["timing"] = Json{{"seconds", elapsed(start)}};
    emit(o, std::move(j));
}

void cmd_sample(const Options& o) {
    Matrix data;
    if (o.model == "benchmark5") {
        data = sample_benchmark5(o.n, o.seed);
    } else {
        const Family family = parse_family(o.model);
        if (o.theta.empty()) {
            throw InvalidArgument("--theta FILE is required for sgm and mixm sampling");
        }
        const auto [freqs, theta] = read_theta_file(o.theta);
        const SampleResult s = sample_family(family, freqs, theta, o.n, o.seed);
        log(LogLevel::info, "acceptance rate " + std::to_string(static_cast<double>(o.n) / s.proposals) +
                                ", bound " + std::to_string(s.bound));
        data = s.samples;
    }
    Output out(o.output);
    write_csv(out.stream(), data);
}

void cmd_feasible(const Options& o) {
    if (o.theta.empty()) {
        throw InvalidArgument("--theta FILE is required");
    }
    const auto [freqs, theta] = read_theta_file(o.theta);
    const int M = o.M > 0 ? o.M : freqs.max_order() + 1;
    Json j = header("feasible");
    j["config"] = Json{{"theta", o.theta}, {"tau", o.tau}, {"M", M}};
    j["freqs"] = freqs_json(freqs);
    j["theta"] = vector_json(theta);
    const double lit = lit_margin(freqs, theta, o.tau);
    const double mlit = mixm_lit_margin(freqs, theta, o.tau);
    j["lit"] = Json{{"tau", o.tau}, {"margin", lit}, {"feasible", lit >= 0.0}};
    j["mixm_lit"] = Json{{"tau", o.tau}, {"margin", mlit}, {"feasible", mlit >= 0.0}};
    const LatticeCheck lat = lattice_feasible(freqs, theta, M);
    const LatticeCheck mlat = mixm_lattice_feasible(freqs, theta, M);
    j["lattice"] = Json{{"M", M}, {"margin", lat.margin}, {"feasible", lat.feasible}};
    j["mixm_lattice"] = Json{{"M", M}, {"margin", mlat.margin}, {"feasible", mlat.feasible}};
    const double grid = min_eig_grid(freqs, theta);
    j["min_eigenvalue_search"] = Json{{"value", grid}, {"nonnegative", grid >= -1e-8}};
    if (freqs == FrequencySet(2, {{1, 1}, {2, 2}})) {
        const double ma2 = ma2_margin(theta[0], theta[1]);
        j["ma2_exact"] = Json{{"margin", ma2}, {"feasible", ma2 >= 0.0}};
    }
    emit(o, std::move(j));
}

void cmd_analyze(const Options& o) {
    const auto start = std::chrono::steady_clock::now();
    Json j = header("analyze");
    j["config"] = Json{{"theta", o.theta},           {"model", o.model}, {"quantity", o.quantity},
                       {"quad_nodes", o.quad_nodes}, {"table1", o.table1}};
    if (o.table1) {
        Json rows = Json::array();
        for (const auto& r : table1(o.quad_nodes)) {
            rows.push_back(Json{{"freqs", r.freqs}, {"quantity", r.quantity}, {"sgm", r.sgm}, {"mixm", r.mixm}});
        }
        j["rows"] = rows;
        j["timing"] = Json{{"seconds", elapsed(start)}};
        emit(o, std::move(j));
        return;
    }
    if (o.theta.empty() || o.quantity.empty()) {
        throw InvalidArgument("analyze needs --table1 or both --quantity and --theta");
    }
    auto [freqs, theta] = read_theta_file(o.theta);
    const ModelSpec model{parse_family(o.model), freqs, theta};
    const int m = freqs.dim();
    const int q = o.quad_nodes;
    if (o.quantity == "grid") {
        const auto axes = parse_axes(o.axes.empty() ? "1,2" : o.axes, m);
        if (axes.size() != 2) {
            throw InvalidArgument("--axes for a grid needs exactly two axes");
        }
        std::vector<Condition> conditions;
        std::stringstream ss(o.condition);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos) {
                throw InvalidArgument("--condition entries look like AXIS=VALUE");
            }
            const auto a = parse_axes(item.substr(0, eq), m);
            conditions.emplace_back(a.front(), parse_doubles(item.substr(eq + 1)).front());
        }
        const DensityGrid grid = density_grid(model, {axes[0], axes[1]}, o.resolution, conditions, q);
        Output out(o.output);
        write_grid_tsv(out.stream(), grid);
        return;
    }
    j["freqs"] = freqs_json(freqs);
    j["theta"] = vector_json(theta);
    if (o.quantity == "correlation") {
        const auto axes = parse_axes(o.axes.empty() ? "1,2" : o.axes, m);
        if (axes.size() != 2) {
            throw InvalidArgument("--axes for a correlation needs exactly two axes");
        }
        j["value"] = correlation(model, axes[0], axes[1], q);
    } else if (o.quantity == "beta122") {
        j["value"] = beta122(model, q);
    } else if (o.quantity == "beta123") {
        j["value"] = beta123(model, q);
    } else if (o.quantity == "cmi") {
        j["value"] = cond_mutual_info(model, q);
    } else if (o.quantity == "fisher") {
        j["value"] = matrix_json(fisher_numeric(model, q));
        j["origin_diagonal"] = vector_json(fisher_origin(freqs));
    } else if (o.quantity == "marginal") {
        const auto axes = parse_axes(o.axes, m);
        const std::vector<double> at = parse_doubles(o.at);
        j["value"] = marginal_density(model, axes, Eigen::Map<const Vector>(at.data(), static_cast<Eigen::Index>(at.size())), q);
    } else {
        throw InvalidArgument("unknown quantity " + o.quantity);
    }
    j["timing"] = Json{{"seconds", elapsed(start)}};
    emit(o, std::move(j));
}

Json model_summary_json(const ModelSummary& s, const std::string& coefficient_name) {
    Json coefs = Json::array();
    for (const auto& c : s.coefficients) {
        Json row = summary_json(c.value);
        row["u"] = c.u;
        coefs.push_back(row);
    }
    Json pred = Json::array();
    for (const auto& p : s.predictive) {
        Json row = summary_json(p.loglik);
        row["tau"] = p.tau;
        pred.push_back(row);
    }
    Json best = summary_json(s.predictive[s.best].loglik);
    best["tau"] = s.predictive[s.best].tau;
    return Json{{coefficient_name, coefs}, {"predictive", pred}, {"best_predictive", best}};
}

void cmd_simulate(const Options& o) {
    const auto start = std::chrono::steady_clock::now();
    SimulationOptions sim;
    sim.replicates = o.replicates;
    sim.n_train = static_cast<int>(o.n);
    sim.n_test = o.n_test;
    sim.seed = o.seed;
    sim.jobs = o.jobs;
    sim.tau = o.tau;
    sim.tau_grid = parse_doubles(o.tau_grid);
    const SimulationResult r = run_simulation(sim);
    Json j = header("simulate");
    j["config"] = Json{{"replicates", sim.replicates}, {"n", sim.n_train}, {"n_test", sim.n_test},
                       {"seed", sim.seed},             {"jobs", sim.jobs}, {"tau", sim.tau},
                       {"tau_grid", sim.tau_grid}};
    j["completed"] = r.completed;
    j["failures"] = r.failures;
    j["sgm"] = model_summary_json(r.sgm, "scaled_coefficients");
    j["mixm"] = model_summary_json(r.mixm, "scaled_coefficients");
    j["gauss"] = model_summary_json(r.gauss, "partial_correlations");
    j["timing"] = Json{{"seconds", elapsed(start)}};
    emit(o, std::move(j));
}

void add_io(CLI::App* app, Options& o, bool needs_input) {
    auto* in = app->add_option("--input", o.input, "Input CSV");
    if (needs_input) {
        in->required();
    }
    app->add_option("--output", o.output, "Output path (default stdout)");
}

void add_model(CLI::App* app, Options& o) {
    app->add_option("--model", o.model, "Model: sgm, mixm or gauss")->capture_default_str();
    app->add_option("--region", o.region, "Region: lit or lattice")->capture_default_str();
    app->add_option("--tau", o.tau, "L1 budget in [0,1]")->capture_default_str();
    app->add_option("--M", o.M, "Lattice resolution (default U_max + 1)");
    app->add_option("--freqs", o.freqs, "standard or file:PATH")->capture_default_str();
    app->add_flag("--no-preprocess", o.no_preprocess, "Use the input as-is");
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"Structural gradient model toolkit"};
    app.require_subcommand(1);
    Options o;

    auto* fit = app.add_subcommand("fit", "Fit SGM, MixM or the Gaussian lasso to a CSV");
    add_io(fit, o, true);
    add_model(fit, o);

    auto* cv = app.add_subcommand("cv", "Cross-validated predictive log-likelihood over a tau grid");
    add_io(cv, o, true);
    add_model(cv, o);
    cv->add_option("--tau-grid", o.tau_grid, "Comma-separated tau values")->capture_default_str();
    cv->add_option("--folds", o.folds, "Number of folds")->capture_default_str();
    cv->add_option("--seed", o.seed, "Fold shuffle seed")->capture_default_str();
    cv->add_option("--jobs", o.jobs, "Worker threads")->capture_default_str();
    cv->add_flag("--global-preprocess", o.global_preprocess, "Fit preprocessing once on all rows");

    auto* sample = app.add_subcommand("sample", "Draw exact samples");
    add_io(sample, o, false);
    sample->add_option("--model", o.model, "sgm, mixm or benchmark5")->capture_default_str();
    sample->add_option("--theta", o.theta, "JSON file with freqs and theta");
    sample->add_option("--n", o.n, "Number of samples")->capture_default_str();
    sample->add_option("--seed", o.seed, "Random seed")->capture_default_str();

    auto* feasible = app.add_subcommand("feasible", "Region margins for a parameter vector");
    add_io(feasible, o, false);
    feasible->add_option("--theta", o.theta, "JSON file with freqs and theta")->required();
    feasible->add_option("--tau", o.tau, "L1 budget")->capture_default_str();
    feasible->add_option("--M", o.M, "Lattice resolution (default U_max + 1)");

    auto* analyze = app.add_subcommand("analyze", "Quadrature moments, Fisher information and density grids");
    add_io(analyze, o, false);
    analyze->add_flag("--table1", o.table1, "Reproduce the examples summary table");
    analyze->add_option("--quantity", o.quantity, "correlation, beta122, beta123, cmi, fisher, marginal or grid");
    analyze->add_option("--theta", o.theta, "JSON file with freqs and theta");
    analyze->add_option("--model", o.model, "sgm or mixm")->capture_default_str();
    analyze->add_option("--axes", o.axes, "1-based axes, comma-separated");
    analyze->add_option("--at", o.at, "Marginal evaluation point, comma-separated");
    analyze->add_option("--condition", o.condition, "Fixed coordinates AXIS=VALUE, comma-separated");
    analyze->add_option("--resolution", o.resolution, "Grid points per axis")->capture_default_str();
    analyze->add_option("--quad-nodes", o.quad_nodes, "Gauss-Legendre nodes per axis")->capture_default_str();

    auto* simulate = app.add_subcommand("simulate", "Replicated five-dimensional benchmark comparison");
    simulate->add_option("--output", o.output, "Output path (default stdout)");
    simulate->add_option("--replicates", o.replicates, "Number of replicates")->capture_default_str();
    simulate->add_option("--n", o.n, "Training sample size")->capture_default_str();
    simulate->add_option("--n-test", o.n_test, "Held-out sample size")->capture_default_str();
    simulate->add_option("--tau", o.tau, "tau for reported coefficients")->capture_default_str();
    simulate->add_option("--tau-grid", o.tau_grid, "tau values for the predictive comparison")->capture_default_str();
    simulate->add_option("--seed", o.seed, "Random seed")->capture_default_str();
    simulate->add_option("--jobs", o.jobs, "Worker threads")->capture_default_str();

    o.n = 0;
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*fit) {
            cmd_fit(o);
        } else if (*cv) {
            cmd_cv(o);
        } else if (*sample) {
            if (o.n == 0) {
                o.n = 100;
            }
            cmd_sample(o);
        } else if (*feasible) {
            cmd_feasible(o);
        } else if (*analyze) {
            cmd_analyze(o);
        } else if (*simulate) {
            if (o.n == 0) {
                o.n = 40;
            }
            cmd_simulate(o);
        }
    } catch (const InvalidArgument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const Error& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kNumerical;
    } catch (const std::domain_error& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kNumerical;
    }
    return kOk;
}

}  // namespace sgm::cli
