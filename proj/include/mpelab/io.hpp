#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "mpelab/corpus.hpp"
#include "mpelab/mixing.hpp"

namespace mpelab::io {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Finite values as numbers; infinities and NaN as "inf", "-inf", "nan".
json number(double v);
/// Inverse of number(); also accepts plain numbers.
double parse_number(const json& v);
json vector_json(const Vector& v);
json matrix_json(const Matrix& m);

/// {"states": [...], "matrix": [[...]], "metric": "abs-diff" | "explicit",
/// "distances": [[...]]}. Labels may be strings or integers. Without
/// "metric", integer labels get abs-diff and others none.
FiniteKernel kernel_from_json(const json& doc);
json kernel_to_json(const FiniteKernel& kernel);

/// Comma-separated rows; labels come from a sidecar file with one label per
/// line, or default to 1..n.
FiniteKernel kernel_from_csv(const std::string& text, const std::string* labels_text);

/// Dispatches on the extension. For "x.csv" the sidecar is "x.csv.labels"
/// when present.
FiniteKernel read_kernel(const std::string& path);

/// {"values": [...]} or one number per line / comma.
RewardFunction reward_from_json(const json& doc);
RewardFunction read_reward(const std::string& path, std::size_t expected_size);
json reward_to_json(const RewardFunction& g);

json mixing_json(const MixingReport& report);

std::string read_file(const std::string& path);
/// "-" or empty writes to stdout.
void write_file(const std::string& path, const std::string& content);

std::string sha256_hex(const std::string& data);

/// Report envelope with schema_version, command, generated_at (UTC), the
/// SHA-256 of every input and of the config, and the results.
json make_report(const std::string& command, const std::vector<std::string>& input_contents,
                 const json& config, json results);

/// Kernel file plus one reward file per canonical reward.
struct CorpusFiles {
    json kernel;
    std::vector<std::pair<std::string, json>> rewards;
    json metadata;
};
CorpusFiles corpus_files(const CorpusChain& chain);

}  // namespace mpelab::io
