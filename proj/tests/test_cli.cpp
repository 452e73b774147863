#include "commands.hpp"

#include <doctest.h>
#include <json.hpp>

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int run(std::vector<std::string> args) {
    args.insert(args.begin(), "sgm");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    return sgm::cli::run(static_cast<int>(argv.size()), argv.data());
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("sgm_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json load(const std::string& path) { return json::parse(slurp(path)); }

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

const char* kTruth = R"({"freqs": [[1,2,0],[0,1,1],[1,1,1]], "theta": [0.1, 0.3, 0.2]})";

}  // namespace

TEST_CASE("sample output is accepted by fit") {
    TempDir dir;
    write(dir.file("theta.json"), kTruth);
    REQUIRE(run({"sample", "--model", "sgm", "--theta", dir.file("theta.json"), "--n", "120", "--seed", "3",
                 "--output", dir.file("x.csv")}) == 0);
    const std::string csv = slurp(dir.file("x.csv"));
    CHECK(csv.rfind("x1,x2,x3\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 121);

    REQUIRE(run({"fit", "--input", dir.file("x.csv"), "--tau", "1", "--output", dir.file("fit.json")}) == 0);
    const json fit = load(dir.file("fit.json"));
    CHECK(fit["schema"] == 1);
    CHECK(fit["command"] == "fit");
    CHECK(fit["freqs"].size() == 16);
    CHECK(fit["theta"].size() == 16);
    CHECK(fit["freqs"][0] == json::array({1, 0, 0}));
    CHECK(fit["config"]["tau"] == 1.0);
    CHECK(fit.contains("timing"));

    REQUIRE(run({"fit", "--input", dir.file("x.csv"), "--tau", "0", "--output", dir.file("zero.json")}) == 0);
    for (const auto& v : load(dir.file("zero.json"))["theta"]) CHECK(v.get<double>() == 0.0);

    REQUIRE(run({"fit", "--input", dir.file("x.csv"), "--model", "gauss", "--output", dir.file("g.json")}) == 0);
    CHECK(load(dir.file("g.json"))["partial_correlations"].size() == 3);

    REQUIRE(run({"sample", "--model", "benchmark5", "--n", "30", "--output", dir.file("b.csv")}) == 0);
    CHECK(run({"fit", "--input", dir.file("b.csv"), "--model", "mixm", "--tau", "0.5", "--output",
               dir.file("m.json")}) == 0);
}

TEST_CASE("outputs are deterministic apart from timing") {
    TempDir dir;
    REQUIRE(run({"sample", "--model", "benchmark5", "--n", "25", "--seed", "9", "--output", dir.file("a.csv")}) == 0);
    REQUIRE(run({"sample", "--model", "benchmark5", "--n", "25", "--seed", "9", "--output", dir.file("b.csv")}) == 0);
    CHECK(slurp(dir.file("a.csv")) == slurp(dir.file("b.csv")));
    const std::vector<std::string> cv{"cv", "--input", dir.file("a.csv"), "--freqs", "standard", "--tau-grid", "0,0.5,1",
                                      "--folds", "3"};
    auto first = cv, second = cv;
    first.insert(first.end(), {"--output", dir.file("cv1.json")});
    second.insert(second.end(), {"--output", dir.file("cv2.json"), "--jobs", "2"});
    REQUIRE(run(first) == 0);
    REQUIRE(run(second) == 0);
    json a = load(dir.file("cv1.json")), b = load(dir.file("cv2.json"));
    CHECK(a["rows"].size() == 3);
    a.erase("timing");
    b.erase("timing");
    a["config"].erase("jobs");
    b["config"].erase("jobs");
    CHECK(a == b);
}

TEST_CASE("feasibility report") {
    TempDir dir;
    write(dir.file("ma2.json"), R"({"freqs": [[1,1],[2,2]], "theta": [1.2, 0.125]})");
    REQUIRE(run({"feasible", "--theta", dir.file("ma2.json"), "--output", dir.file("f.json")}) == 0);
    const json f = load(dir.file("f.json"));
    CHECK(f["ma2_exact"]["feasible"] == true);
    CHECK(f["lit"]["feasible"] == false);
    CHECK(f["min_eigenvalue_search"]["nonnegative"] == true);

    write(dir.file("truth.json"), kTruth);
    REQUIRE(run({"feasible", "--theta", dir.file("truth.json"), "--output", dir.file("t.json")}) == 0);
    CHECK(load(dir.file("t.json"))["lit"]["margin"].get<double>() == doctest::Approx(0.1));

    write(dir.file("zero.json"), R"({"freqs": [[1,1],[2,2]], "theta": [0, 0]})");
    REQUIRE(run({"feasible", "--theta", dir.file("zero.json"), "--output", dir.file("z.json")}) == 0);
    const json z = load(dir.file("z.json"));
    for (const char* key : {"lit", "mixm_lit", "lattice", "mixm_lattice"}) CHECK(z[key]["margin"].get<double>() > 0.0);
}

TEST_CASE("analysis exports") {
    TempDir dir;
    write(dir.file("het.json"), R"({"freqs": [[1,2]], "theta": [0.2]})");
    REQUIRE(run({"analyze", "--quantity", "grid", "--theta", dir.file("het.json"), "--resolution", "4", "--output",
                 dir.file("g.tsv")}) == 0);
    const std::string tsv = slurp(dir.file("g.tsv"));
    CHECK(tsv.rfind("x_1\tx_2\tdensity\n", 0) == 0);
    CHECK(std::count(tsv.begin(), tsv.end(), '\n') == 17);

    write(dir.file("corr.json"), R"({"freqs": [[1,1]], "theta": [0.0]})");
    REQUIRE(run({"analyze", "--quantity", "correlation", "--theta", dir.file("corr.json"), "--output",
                 dir.file("c.json")}) == 0);
    CHECK(load(dir.file("c.json"))["value"].get<double>() == doctest::Approx(0.0).scale(1.0));

    REQUIRE(run({"analyze", "--quantity", "marginal", "--theta", dir.file("corr.json"), "--axes", "1", "--at", "0.3",
                 "--output", dir.file("m.json")}) == 0);
    CHECK(load(dir.file("m.json"))["value"].get<double>() == doctest::Approx(1.0));
}

TEST_CASE("exit codes") {
    TempDir dir;
    CHECK(run({}) == 2);
    CHECK(run({"fit", "--bogus"}) == 2);
    CHECK(run({"fit", "--input", dir.file("missing.csv")}) == 3);
    write(dir.file("blank.csv"), "1,2\n3,\n");
    CHECK(run({"fit", "--input", dir.file("blank.csv")}) == 3);
    write(dir.file("ragged.csv"), "1,2\n3\n");
    CHECK(run({"fit", "--input", dir.file("ragged.csv")}) == 3);
    write(dir.file("const.csv"), "a,b\n1,2\n1,3\n1,4\n");
    CHECK(run({"fit", "--input", dir.file("const.csv")}) == 3);
    write(dir.file("ok.csv"), "0.1,0.2\n0.4,0.9\n0.7,0.3\n");
    CHECK(run({"fit", "--input", dir.file("ok.csv"), "--tau", "1.5"}) == 2);
    CHECK(run({"fit", "--input", dir.file("ok.csv"), "--model", "nope"}) == 2);
    write(dir.file("bad.json"), R"({"freqs": [[1,1]], "theta": [1.5]})");
    CHECK(run({"sample", "--theta", dir.file("bad.json"), "--n", "50", "--output", dir.file("s.csv")}) == 4);
    write(dir.file("broken.json"), "{not json");
    CHECK(run({"feasible", "--theta", dir.file("broken.json")}) == 3);
}
