#include "io.hpp"

#include "sgm/errors.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace sgm::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& cell, double& out) {
    const std::string t = trim(cell);
    if (t.empty()) {
        return false;
    }
    const char* end = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(t.data(), end, out);
    return ec == std::errc() && ptr == end;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, sep)) {
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == sep) {
        cells.emplace_back();
    }
    return cells;
}

std::ifstream open(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path);
    }
    return in;
}

}  // namespace

Matrix read_csv(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t width = 0;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) {
            continue;
        }
        const auto cells = split(line, ',');
        std::vector<double> values(cells.size());
        bool numeric = true;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (!parse_double(cells[i], values[i])) {
                if (trim(cells[i]).empty()) {
                    throw DataError("blank cell at line " + std::to_string(lineno));
                }
                numeric = false;
            }
        }
        if (!numeric) {
            if (rows.empty() && width == 0) {
                width = cells.size();  // header row
                continue;
            }
            throw DataError("non-numeric cell at line " + std::to_string(lineno));
        }
        if (width == 0) {
            width = cells.size();
        }
        if (cells.size() != width) {
            throw DataError("line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                            " cells, expected " + std::to_string(width));
        }
        rows.push_back(std::move(values));
    }
    if (rows.empty()) {
        throw DataError("CSV input has no data rows");
    }
    Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < width; ++c) {
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }
    return out;
}

Matrix read_csv_file(const std::string& path) {
    auto in = open(path);
    return read_csv(in);
}

void write_csv(std::ostream& out, const MatrixRef& data) {
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
        out << (j ? "," : "") << 'x' << j + 1;
    }
    out << '\n' << std::setprecision(17);
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        for (Eigen::Index j = 0; j < data.cols(); ++j) {
            out << (j ? "," : "") << data(i, j);
        }
        out << '\n';
    }
}

FrequencySet parse_freqs(const std::string& spec, int dim) {
    if (spec == "standard") {
        return FrequencySet::standard(dim);
    }
    if (spec.rfind("file:", 0) != 0) {
        throw InvalidArgument("--freqs must be 'standard' or 'file:PATH'");
    }
    auto in = open(spec.substr(5));
    std::vector<Frequency> freqs;
    std::string line;
    while (std::getline(in, line)) {
        for (char& ch : line) {
            if (ch == ',') {
                ch = ' ';
            }
        }
        std::istringstream ss(line);
        Frequency u;
        int v = 0;
        while (ss >> v) {
            u.push_back(v);
        }
        if (!ss.eof()) {
            throw DataError("frequency file has a non-integer entry: " + line);
        }
        if (!u.empty()) {
            freqs.push_back(std::move(u));
        }
    }
    return FrequencySet(dim, std::move(freqs));
}

std::pair<FrequencySet, Vector> read_theta_file(const std::string& path) {
    auto in = open(path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("theta file " + path + ": " + e.what());
    }
    if (!j.contains("freqs") || !j.contains("theta")) {
        throw DataError("theta file needs keys \"freqs\" and \"theta\"");
    }
    try {
        const auto raw = j.at("freqs").get<std::vector<Frequency>>();
        const auto theta = j.at("theta").get<std::vector<double>>();
        if (raw.empty() || raw.size() != theta.size()) {
            throw DataError("theta file: \"freqs\" and \"theta\" must be nonempty and of equal length");
        }
        // Keep each θ with its frequency when the set reorders them.
        const FrequencySet freqs(static_cast<int>(raw.front().size()), raw);
        Vector out(static_cast<Eigen::Index>(theta.size()));
        for (std::size_t k = 0; k < raw.size(); ++k) {
            out[static_cast<Eigen::Index>(freqs.index_of(raw[k]))] = theta[k];
        }
        return {freqs, out};
    } catch (const nlohmann::json::exception& e) {
        throw DataError("theta file " + path + ": " + e.what());
    }
}

std::vector<double> parse_doubles(const std::string& text) {
    std::vector<double> out;
    for (const auto& cell : split(text, ',')) {
        double v = 0.0;
        if (!parse_double(cell, v)) {
            throw InvalidArgument("not a number: '" + cell + "'");
        }
        out.push_back(v);
    }
    return out;
}

}  // namespace sgm::cli
