#include "mpelab/io.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

#include <openssl/evp.h>

namespace mpelab::io {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& token, const std::string& where) {
    const std::string t = trim(token);
    if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
    if (t == "-inf") return -std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        throw Error(ErrorCode::Parse, where + ": cannot parse number '" + t + "'");
    }
    if (used != t.size()) {
        throw Error(ErrorCode::Parse, where + ": cannot parse number '" + t + "'");
    }
    return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

Matrix matrix_from_json(const json& rows, const std::string& what) {
    if (!rows.is_array() || rows.empty()) {
        throw Error(ErrorCode::Parse, what + " must be a non-empty array of rows");
    }
    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::Index cols = -1;
    Matrix m;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        if (!row.is_array()) throw Error(ErrorCode::Parse, what + " rows must be arrays");
        if (cols < 0) {
            cols = static_cast<Eigen::Index>(row.size());
            m.resize(n, cols);
        } else if (static_cast<Eigen::Index>(row.size()) != cols) {
            throw Error(ErrorCode::DimensionMismatch, what + " rows have different lengths");
        }
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = parse_number(row[static_cast<std::size_t>(j)]);
    }
    return m;
}

std::string label_from_json(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    throw Error(ErrorCode::Parse, "state labels must be strings or integers");
}

json label_to_json(const std::string& label) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(label, &used);
        if (used == label.size()) return v;
    } catch (const std::exception&) {
    }
    return label;
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

}  // namespace

json number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

double parse_number(const json& v) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        return parse_double(s, "number");
    }
    throw Error(ErrorCode::Parse, "expected a number, got " + v.dump());
}

json vector_json(const Vector& v) {
    json out = json::array();
    for (double x : v) out.push_back(number(x));
    return out;
}

json matrix_json(const Matrix& m) {
    json out = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vector_json(m.row(i).transpose()));
    return out;
}

FiniteKernel kernel_from_json(const json& doc) {
    if (!doc.is_object() || !doc.contains("matrix")) {
        throw Error(ErrorCode::Parse, "kernel file must be an object with a \"matrix\" field");
    }
    const Matrix p = matrix_from_json(doc.at("matrix"), "matrix");
    std::vector<std::string> labels;
    if (doc.contains("states")) {
        if (!doc.at("states").is_array()) throw Error(ErrorCode::Parse, "\"states\" must be an array");
        for (const auto& s : doc.at("states")) labels.push_back(label_from_json(s));
    } else {
        for (Eigen::Index i = 0; i < p.rows(); ++i) labels.push_back(std::to_string(i + 1));
    }
    if (static_cast<Eigen::Index>(labels.size()) != p.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "\"states\" and \"matrix\" sizes differ");
    }
    const std::string metric = doc.value("metric", std::string{});
    StateSpace space;
    if (metric == "explicit") {
        if (!doc.contains("distances")) {
            throw Error(ErrorCode::Parse, "explicit metric needs a \"distances\" matrix");
        }
        space = StateSpace::with_metric(labels, matrix_from_json(doc.at("distances"), "distances"));
    } else if (metric.empty() || metric == "abs-diff") {
        space = StateSpace::labeled(labels);
        if (metric == "abs-diff" && space.metric_kind() != MetricKind::AbsDiff) {
            throw Error(ErrorCode::BadParameters, "abs-diff metric needs integer state labels");
        }
    } else {
        throw Error(ErrorCode::Parse, "unknown metric '" + metric + "'");
    }
    return build_kernel(std::move(space), p);
}

json kernel_to_json(const FiniteKernel& kernel) {
    json out;
    json states = json::array();
    for (const auto& l : kernel.space().labels()) states.push_back(label_to_json(l));
    out["states"] = std::move(states);
    out["matrix"] = matrix_json(kernel.matrix());
    const auto& space = kernel.space();
    if (space.metric_kind() == MetricKind::AbsDiff) {
        out["metric"] = "abs-diff";
    } else if (space.metric_kind() == MetricKind::Explicit) {
        out["metric"] = "explicit";
        const auto n = static_cast<Eigen::Index>(space.size());
        Matrix d(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                d(i, j) = space.distance(static_cast<StateIndex>(i), static_cast<StateIndex>(j));
            }
        }
        out["distances"] = matrix_json(d);
    }
    return out;
}

FiniteKernel kernel_from_csv(const std::string& text, const std::string* labels_text) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<double> row;
        for (const auto& cell : split(line, ',')) {
            row.push_back(parse_double(cell, "csv line " + std::to_string(line_no)));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw Error(ErrorCode::Parse, "csv kernel is empty");
    const auto n = static_cast<Eigen::Index>(rows.size());
    Matrix p(n, static_cast<Eigen::Index>(rows[0].size()));
    for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != p.cols()) {
            throw Error(ErrorCode::DimensionMismatch, "csv rows have different lengths");
        }
        for (Eigen::Index j = 0; j < p.cols(); ++j) p(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    std::vector<std::string> labels;
    if (labels_text) {
        std::istringstream lin(*labels_text);
        while (std::getline(lin, line)) {
            const auto t = trim(line);
            if (!t.empty()) labels.push_back(t);
        }
    } else {
        for (Eigen::Index i = 0; i < n; ++i) labels.push_back(std::to_string(i + 1));
    }
    if (static_cast<Eigen::Index>(labels.size()) != n) {
        throw Error(ErrorCode::DimensionMismatch, "label sidecar and csv matrix sizes differ");
    }
    return build_kernel(StateSpace::labeled(std::move(labels)), p);
}

FiniteKernel read_kernel(const std::string& path) {
    const std::string text = read_file(path);
    if (std::filesystem::path(path).extension() == ".csv") {
        const std::string sidecar = path + ".labels";
        if (std::filesystem::exists(sidecar)) {
            const std::string labels = read_file(sidecar);
            return kernel_from_csv(text, &labels);
        }
        return kernel_from_csv(text, nullptr);
    }
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::Parse, path + ": " + e.what());
    }
    return kernel_from_json(doc);
}

RewardFunction reward_from_json(const json& doc) {
    const json& values = doc.is_object() ? doc.at("values") : doc;
    if (!values.is_array()) throw Error(ErrorCode::Parse, "reward \"values\" must be an array");
    Vector g(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) g(static_cast<Eigen::Index>(i)) = parse_number(values[i]);
    return RewardFunction(g);
}

RewardFunction read_reward(const std::string& path, std::size_t expected_size) {
    const std::string text = read_file(path);
    RewardFunction g;
    if (std::filesystem::path(path).extension() == ".csv") {
        std::vector<double> values;
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            for (const auto& cell : split(line, ',')) {
                if (!trim(cell).empty()) values.push_back(parse_double(cell, path));
            }
        }
        g = RewardFunction(Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size())));
    } else {
        try {
            g = reward_from_json(json::parse(text));
        } catch (const json::exception& e) {
            throw Error(ErrorCode::Parse, path + ": " + e.what());
        }
    }
    if (g.size() != expected_size) {
        throw Error(ErrorCode::DimensionMismatch,
                    "reward has " + std::to_string(g.size()) + " values, kernel has " +
                        std::to_string(expected_size) + " states");
    }
    return g;
}

json reward_to_json(const RewardFunction& g) { return json{{"values", vector_json(g.values())}}; }

json mixing_json(const MixingReport& report) {
    json out;
    json lambda = json::object();
    for (const auto& [n, v] : report.lambda) lambda[std::to_string(n)] = number(v);
    json minor = json::object();
    for (const auto& [n, m] : report.minorization) {
        json entry{{"d", number(m.d)}};
        entry["eta"] = m.eta ? vector_json(m.eta->weights()) : json(nullptr);
        minor[std::to_string(n)] = std::move(entry);
    }
    json ratio = json::object();
    for (const auto& [n, v] : report.strong_ratio) ratio[std::to_string(n)] = number(v);
    out["lambda"] = std::move(lambda);
    out["minorization"] = std::move(minor);
    out["strong_ratio"] = std::move(ratio);
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
    out << content;
    if (!out) throw Error(ErrorCode::Io, "write failed for '" + path + "'");
}

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorCode::Io, "sha256 failed");
    }
    std::ostringstream out;
    for (unsigned int i = 0; i < len; ++i) {
        out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    }
    return out.str();
}

json make_report(const std::string& command, const std::vector<std::string>& input_contents,
                 const json& config, json results) {
    json inputs = json::array();
    std::string combined;
    for (const auto& content : input_contents) {
        const auto h = sha256_hex(content);
        inputs.push_back(h);
        combined += h;
    }
    combined += config.dump();
    json out;
    out["schema_version"] = kSchemaVersion;
    out["tool"] = "mpelab";
    out["command"] = command;
    out["generated_at"] = utc_timestamp();
    out["inputs_digest"] = sha256_hex(combined);
    out["input_digests"] = std::move(inputs);
    out["config"] = config;
    out["results"] = std::move(results);
    return out;
}

CorpusFiles corpus_files(const CorpusChain& chain) {
    CorpusFiles files;
    files.kernel = kernel_to_json(chain.kernel);
    for (const auto& r : chain.rewards) files.rewards.emplace_back(r.name, reward_to_json(r.reward));
    json meta;
    meta["name"] = chain.name;
    json params = json::object();
    for (const auto& [k, v] : chain.parameters) params[k] = number(v);
    meta["parameters"] = std::move(params);
    if (chain.truncation) {
        const auto& t = *chain.truncation;
        json trunc;
        trunc["size"] = t.size;
        trunc["redirect_state"] = chain.kernel.space().label(t.redirect_state);
        json mass = json::array();
        for (double m : t.redirected_mass) mass.push_back(number(m));
        trunc["redirected_mass"] = std::move(mass);
        trunc["error_bound"] = number(t.error_bound);
        meta["truncation"] = std::move(trunc);
    } else {
        meta["truncation"] = nullptr;
    }
    files.metadata = std::move(meta);
    return files;
}

}  // namespace mpelab::io
