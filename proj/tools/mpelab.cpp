#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mpelab/corpus.hpp"
#include "mpelab/ergodic.hpp"
#include "mpelab/io.hpp"
#include "mpelab/mixing.hpp"
#include "mpelab/mpe.hpp"
#include "mpelab/simulate.hpp"
#include "mpelab/verify.hpp"

using namespace mpelab;
using io::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitDiverged = 2;
constexpr int kExitInconclusive = 3;

struct RunConfig {
    std::string subcommand;
    std::string kernel_path;
    std::string reward_path;
    std::string reward2_path;
    std::string corpus;
    std::vector<std::string> params;
    std::string values;
    std::string values2;
    std::string reward_name;
    std::string reward2_name;
    std::string out;
    std::string out_dir;
    std::string format = "json";
    std::uint64_t seed = 1;
    double tol = 1e-10;
    std::size_t max_iter = 100000;
    double span_cap = 1e4;
    std::string anchor;
    std::size_t n_max = 0;
    std::string states;
    std::string support;
    std::string alphas = "0.9,0.5,0.1";
    std::size_t paths = 10000;
    std::size_t horizon = 20;
    std::string start;
    std::size_t resamples = 1000;
    std::string filter;
    std::optional<double> verify_tol;
    std::uint64_t verify_seed = VerifyOptions{}.seed;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    int depth = 0;
    for (char c : text) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == ',' && depth == 0) {
            out.push_back(trim(item));
            item.clear();
        } else {
            item += c;
        }
    }
    if (!trim(item).empty()) out.push_back(trim(item));
    return out;
}

/// Number, "inf", or ln(...) / log(...) / exp(...) of such, with optional sign.
double parse_value(const std::string& raw) {
    std::string s = trim(raw);
    if (s.empty()) throw Error(ErrorCode::Parse, "empty value");
    if (s[0] == '-' || s[0] == '+') {
        const double v = parse_value(s.substr(1));
        return s[0] == '-' ? -v : v;
    }
    for (const std::string fn : {"ln", "log", "exp"}) {
        if (s.rfind(fn + "(", 0) == 0 && s.back() == ')') {
            const double inner = parse_value(s.substr(fn.size() + 1, s.size() - fn.size() - 2));
            return fn == "exp" ? std::exp(inner) : std::log(inner);
        }
    }
    if (s == "inf") return std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw Error(ErrorCode::Parse, "cannot parse value '" + s + "'");
    }
    if (used != s.size()) throw Error(ErrorCode::Parse, "cannot parse value '" + s + "'");
    return v;
}

std::map<std::string, double> parse_params(const std::vector<std::string>& items) {
    std::map<std::string, double> out;
    for (const auto& item : items) {
        for (const auto& part : split_list(item)) {
            const auto eq = part.find('=');
            if (eq == std::string::npos) {
                throw Error(ErrorCode::Parse, "parameter '" + part + "' is not key=value");
            }
            out[trim(part.substr(0, eq))] = parse_value(part.substr(eq + 1));
        }
    }
    return out;
}

/// Kernel and reward sources resolved from files or the corpus.
struct Inputs {
    std::optional<FiniteKernel> kernel;
    std::optional<CorpusChain> chain;
    std::vector<std::string> contents;
};

Inputs load_kernel(const RunConfig& cfg) {
    Inputs in;
    if (!cfg.corpus.empty()) {
        in.chain = build_corpus(cfg.corpus, parse_params(cfg.params));
        in.kernel = in.chain->kernel;
        in.contents.push_back(io::kernel_to_json(*in.kernel).dump());
    } else if (!cfg.kernel_path.empty()) {
        in.contents.push_back(io::read_file(cfg.kernel_path));
        in.kernel = io::read_kernel(cfg.kernel_path);
    } else {
        throw Error(ErrorCode::BadParameters, "need --kernel FILE or --corpus NAME");
    }
    return in;
}

RewardFunction load_reward(Inputs& in, const std::string& path, const std::string& values,
                           const std::string& name, const char* flag) {
    const std::size_t n = in.kernel->size();
    if (!values.empty()) {
        std::vector<double> v;
        for (const auto& item : split_list(values)) v.push_back(parse_value(item));
        RewardFunction g(Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())));
        if (g.size() != n) {
            throw Error(ErrorCode::DimensionMismatch, "reward has " + std::to_string(g.size()) +
                                                          " values, kernel has " + std::to_string(n) +
                                                          " states");
        }
        in.contents.push_back(io::reward_to_json(g).dump());
        return g;
    }
    if (!path.empty()) {
        in.contents.push_back(io::read_file(path));
        return io::read_reward(path, n);
    }
    if (in.chain && !in.chain->rewards.empty()) {
        for (const auto& r : in.chain->rewards) {
            if (name.empty() || r.name == name) {
                in.contents.push_back(io::reward_to_json(r.reward).dump());
                return r.reward;
            }
        }
        throw Error(ErrorCode::BadParameters, "corpus chain has no reward '" + name + "'");
    }
    throw Error(ErrorCode::BadParameters, std::string("need ") + flag + " FILE or inline values");
}

StateIndex state_index(const FiniteKernel& k, const std::string& label) {
    const auto idx = k.space().index_of(label);
    if (!idx) throw Error(ErrorCode::InvalidState, "unknown state '" + label + "'");
    return *idx;
}

StateSet state_list(const FiniteKernel& k, const std::string& text) {
    std::vector<StateIndex> out;
    for (const auto& label : split_list(text)) out.push_back(state_index(k, label));
    return make_state_set(out);
}

json label_list(const FiniteKernel& k, const StateSet& set) {
    json out = json::array();
    for (auto s : set) out.push_back(k.space().label(s));
    return out;
}

json base_config(const RunConfig& cfg) {
    json c;
    if (!cfg.kernel_path.empty()) c["kernel"] = cfg.kernel_path;
    if (!cfg.corpus.empty()) {
        c["corpus"] = cfg.corpus;
        json p = json::object();
        for (const auto& [k, v] : parse_params(cfg.params)) p[k] = io::number(v);
        c["params"] = std::move(p);
    }
    if (!cfg.reward_path.empty()) c["reward"] = cfg.reward_path;
    if (!cfg.values.empty()) c["values"] = cfg.values;
    if (!cfg.reward_name.empty()) c["reward_name"] = cfg.reward_name;
    c["format"] = cfg.format;
    return c;
}

void emit(const RunConfig& cfg, const json& report, const std::string& csv) {
    if (cfg.format == "csv") {
        io::write_file(cfg.out, csv);
    } else {
        io::write_file(cfg.out, report.dump(2) + "\n");
    }
}

std::string csv_number(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

int run_mixing(const RunConfig& cfg) {
    auto in = load_kernel(cfg);
    const std::size_t n_max = cfg.n_max == 0 ? 4 : cfg.n_max;
    const auto report = mixing_report(*in.kernel, n_max);
    json config = base_config(cfg);
    config["n_max"] = n_max;
    std::ostringstream csv;
    csv << "n,lambda,d,strong_ratio\n";
    for (std::size_t n = 1; n <= n_max; ++n) {
        csv << n << "," << csv_number(report.lambda.at(n)) << "," << csv_number(report.minorization.at(n).d)
            << "," << csv_number(report.strong_ratio.at(n)) << "\n";
    }
    emit(cfg, io::make_report("mixing", in.contents, config, io::mixing_json(report)), csv.str());
    return kExitOk;
}

SolveOptions solve_options(const RunConfig& cfg, const FiniteKernel& k) {
    SolveOptions opts;
    opts.tol = cfg.tol;
    opts.max_iter = cfg.max_iter;
    opts.span_cap = cfg.span_cap;
    if (!cfg.anchor.empty()) opts.anchor = state_index(k, cfg.anchor);
    opts.validate(k.size());
    return opts;
}

json solve_config(const RunConfig& cfg) {
    json c = base_config(cfg);
    c["tol"] = cfg.tol;
    c["max_iter"] = cfg.max_iter;
    c["span_cap"] = cfg.span_cap;
    c["anchor"] = cfg.anchor.empty() ? json(nullptr) : json(cfg.anchor);
    return c;
}

int run_solve(const RunConfig& cfg) {
    auto in = load_kernel(cfg);
    const auto g = load_reward(in, cfg.reward_path, cfg.values, cfg.reward_name, "--reward");
    const auto sol = solve_mpe(*in.kernel, g, solve_options(cfg, *in.kernel));
    json results;
    results["status"] = to_string(sol.status);
    results["reason"] = to_string(sol.reason);
    results["lambda"] = io::number(sol.lambda);
    results["residual"] = io::number(sol.residual);
    results["iterations"] = sol.iterations;
    results["w"] = io::vector_json(sol.w);
    json trace = json::array();
    for (double t : sol.trace) trace.push_back(io::number(t));
    results["trace"] = std::move(trace);
    std::ostringstream csv;
    csv << "state,w\n";
    for (std::size_t i = 0; i < in.kernel->size() && i < static_cast<std::size_t>(sol.w.size()); ++i) {
        csv << in.kernel->space().label(i) << "," << csv_number(sol.w(static_cast<Eigen::Index>(i))) << "\n";
    }
    emit(cfg, io::make_report("solve", in.contents, solve_config(cfg), results), csv.str());
    switch (sol.status) {
        case SolveStatus::Solved: return kExitOk;
        case SolveStatus::Diverged: return kExitDiverged;
        case SolveStatus::Inconclusive: return kExitInconclusive;
    }
    return kExitError;
}

int run_ape(const RunConfig& cfg) {
    auto in = load_kernel(cfg);
    const auto g = load_reward(in, cfg.reward_path, cfg.values, cfg.reward_name, "--reward");
    const auto sol = solve_ape(*in.kernel, g);
    json results{{"lambda", io::number(sol.lambda)}, {"residual", io::number(sol.residual)}};
    results["w"] = io::vector_json(sol.w);
    std::ostringstream csv;
    csv << "state,w\n";
    for (std::size_t i = 0; i < in.kernel->size(); ++i) {
        csv << in.kernel->space().label(i) << "," << csv_number(sol.w(static_cast<Eigen::Index>(i))) << "\n";
    }
    emit(cfg, io::make_report("ape", in.contents, base_config(cfg), results), csv.str());
    return kExitOk;
}

int run_average(const RunConfig& cfg) {
    auto in = load_kernel(cfg);
    const auto g = load_reward(in, cfg.reward_path, cfg.values, cfg.reward_name, "--reward");
    const std::size_t n_max = cfg.n_max == 0 ? 100 : cfg.n_max;
    StateSet states = cfg.states.empty() ? complement({}, in.kernel->size()) : state_list(*in.kernel, cfg.states);
    const auto sol = solve_mpe(*in.kernel, g, solve_options(cfg, *in.kernel));
    const auto trace = average_trace(*in.kernel, g, states, n_max,
                                     sol.status == SolveStatus::Solved ? &sol : nullptr);
    json results;
    results["states"] = label_list(*in.kernel, trace.states);
    results["steps"] = trace.steps;
    json values = json::array();
    for (const auto& row : trace.values) {
        json r = json::array();
        for (double v : row) r.push_back(io::number(v));
        values.push_back(std::move(r));
    }
    results["values"] = std::move(values);
    results["lambda"] = trace.lambda ? io::number(*trace.lambda) : json(nullptr);
    json env = json::array();
    for (double e : trace.envelope) env.push_back(io::number(e));
    results["envelope"] = std::move(env);

    std::ostringstream csv;
    csv << "n";
    for (auto s : trace.states) csv << ",state_" << in.kernel->space().label(s);
    if (trace.lambda) csv << ",lambda,envelope";
    csv << "\n";
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        csv << trace.steps[i];
        for (double v : trace.values[i]) csv << "," << csv_number(v);
        if (trace.lambda) csv << "," << csv_number(*trace.lambda) << "," << csv_number(trace.envelope[i]);
        csv << "\n";
    }
    json config = solve_config(cfg);
    config["n_max"] = n_max;
    emit(cfg, io::make_report("average", in.contents, config, results), csv.str());
    return kExitOk;
}

int run_classify(const RunConfig& cfg) {
    auto in = load_kernel(cfg);
    const auto c = finite_existence_classifier(*in.kernel);
    json results;
    results["verdict"] = to_string(c.verdict);
    results["detail"] = c.detail;
    results["recurrent_class"] = label_list(*in.kernel, c.recurrent_class);
    results["period"] = c.period;
    results["positive_power"] = c.positive_power;
    results["witness"] = c.witness ? io::vector_json(c.witness->values()) : json(nullptr);
    results["witness_support"] = label_list(*in.kernel, c.witness_support);
    results["stay_rate"] = io::number(c.stay_rate);
    std::ostringstream csv;
    csv << "verdict,period,positive_power\n"
        << to_string(c.verdict) << "," << c.period << "," << c.positive_power << "\n";
    emit(cfg, io::make_report("classify", in.contents, base_config(cfg), results), csv.str());
    return kExitOk;
}

int run_escape(const RunConfig& cfg) {
    auto in = load_kernel(cfg);
    const StateSet support = cfg.support.empty() ? invariant_measure(*in.kernel).support()
                                                 : state_list(*in.kernel, cfg.support);
    std::vector<double> alphas;
    for (const auto& a : split_list(cfg.alphas)) alphas.push_back(parse_value(a));
    const std::size_t n_max = cfg.n_max == 0 ? 1000 : cfg.n_max;
    const auto results_list = escape_geometric_test(*in.kernel, support, alphas, n_max);
    json results;
    results["support"] = label_list(*in.kernel, support);
    json rows = json::array();
    std::ostringstream csv;
    csv << "alpha,passed,n\n";
    for (const auto& r : results_list) {
        rows.push_back({{"alpha", r.alpha}, {"passed", r.passed}, {"n", r.passed ? json(r.n) : json(nullptr)},
                        {"vacuous", r.vacuous}});
        csv << csv_number(r.alpha) << "," << (r.passed ? "true" : "false") << ","
            << (r.passed ? std::to_string(r.n) : "") << "\n";
    }
    results["alphas"] = std::move(rows);
    json config = base_config(cfg);
    config["alphas"] = cfg.alphas;
    config["n_max"] = n_max;
    emit(cfg, io::make_report("escape-test", in.contents, config, results), csv.str());
    return kExitOk;
}

StateIndex start_state(const RunConfig& cfg, const FiniteKernel& k) {
    return cfg.start.empty() ? 0 : state_index(k, cfg.start);
}

int run_simulate(const RunConfig& cfg) {
    auto in = load_kernel(cfg);
    const auto g = load_reward(in, cfg.reward_path, cfg.values, cfg.reward_name, "--reward");
    const StateIndex x0 = start_state(cfg, *in.kernel);
    const auto est = mc_entropic_estimate(*in.kernel, g, x0, cfg.horizon, cfg.paths, cfg.seed, cfg.resamples);
    json results{{"estimate", io::number(est.estimate)},
                 {"std_error", io::number(est.std_error)},
                 {"ci_low", io::number(est.ci_low)},
                 {"ci_high", io::number(est.ci_high)},
                 {"exact", io::number(risk_sensitive_average(*in.kernel, g, x0, cfg.horizon))},
                 {"paths", est.paths},
                 {"horizon", est.horizon},
                 {"resamples", est.resamples},
                 {"rng", kRngAlgorithm}};
    std::string csv;
    if (cfg.format == "csv") {
        const auto sums = sample_paths(*in.kernel, x0, cfg.horizon, cfg.paths, cfg.seed).reward_sums(g);
        std::ostringstream out;
        out << "path,sum\n";
        for (std::size_t i = 0; i < sums.size(); ++i) out << i << "," << csv_number(sums[i]) << "\n";
        csv = out.str();
    }
    json config = base_config(cfg);
    config["seed"] = cfg.seed;
    config["paths"] = cfg.paths;
    config["horizon"] = cfg.horizon;
    config["start"] = in.kernel->space().label(x0);
    config["resamples"] = cfg.resamples;
    emit(cfg, io::make_report("simulate", in.contents, config, results), csv);
    return kExitOk;
}

json law_json(const LatticeDistribution& law) {
    json out{{"step", io::number(law.step)}, {"offset", io::number(law.offset)}, {"mean", io::number(law.mean())}};
    json probs = json::array();
    for (double p : law.probabilities) probs.push_back(io::number(p));
    out["probabilities"] = std::move(probs);
    return out;
}

int run_dominance(const RunConfig& cfg) {
    auto in = load_kernel(cfg);
    std::string second_name = cfg.reward2_name;
    if (second_name.empty() && cfg.reward2_path.empty() && cfg.values2.empty() && in.chain &&
        in.chain->rewards.size() > 1) {
        second_name = in.chain->rewards[1].name;
    }
    const auto g1 = load_reward(in, cfg.reward_path, cfg.values, cfg.reward_name, "--reward");
    const auto g2 = load_reward(in, cfg.reward2_path, cfg.values2, second_name, "--reward2");
    const StateIndex x0 = start_state(cfg, *in.kernel);
    const auto law1 = partial_sum_distribution(*in.kernel, g1, x0, cfg.horizon);
    const auto law2 = partial_sum_distribution(*in.kernel, g2, x0, cfg.horizon);
    const auto verdict = stochastic_dominance(law1, law2);
    json results{{"verdict", to_string(verdict)}};
    results["first"] = law_json(law1);
    results["second"] = law_json(law2);

    // CDFs on the merged support.
    std::map<double, std::pair<double, double>> mass;
    for (std::size_t k = 0; k < law1.probabilities.size(); ++k) mass[law1.value(k)].first += law1.probabilities[k];
    for (std::size_t k = 0; k < law2.probabilities.size(); ++k) mass[law2.value(k)].second += law2.probabilities[k];
    std::ostringstream csv;
    csv << "value,cdf_first,cdf_second\n";
    double c1 = 0.0, c2 = 0.0;
    for (const auto& [v, m] : mass) {
        c1 += m.first;
        c2 += m.second;
        csv << csv_number(v) << "," << csv_number(c1) << "," << csv_number(c2) << "\n";
    }
    json config = base_config(cfg);
    config["reward2"] = cfg.reward2_path;
    config["values2"] = cfg.values2;
    config["reward2_name"] = second_name;
    config["start"] = in.kernel->space().label(x0);
    config["horizon"] = cfg.horizon;
    emit(cfg, io::make_report("dominance", in.contents, config, results), csv.str());
    return kExitOk;
}

int run_corpus(const RunConfig& cfg) {
    const auto chain = build_corpus(cfg.corpus, parse_params(cfg.params));
    const auto files = io::corpus_files(chain);
    if (!cfg.out_dir.empty()) {
        std::filesystem::create_directories(cfg.out_dir);
        const std::filesystem::path dir(cfg.out_dir);
        io::write_file((dir / "kernel.json").string(), files.kernel.dump(2) + "\n");
        for (const auto& [name, reward] : files.rewards) {
            io::write_file((dir / ("reward_" + name + ".json")).string(), reward.dump(2) + "\n");
        }
        io::write_file((dir / "metadata.json").string(), files.metadata.dump(2) + "\n");
    }
    json results;
    results["metadata"] = files.metadata;
    results["kernel"] = files.kernel;
    json rewards = json::object();
    for (const auto& [name, reward] : files.rewards) rewards[name] = reward;
    results["rewards"] = std::move(rewards);
    json config = base_config(cfg);
    config["out_dir"] = cfg.out_dir;
    if (cfg.out_dir.empty() || !cfg.out.empty()) {
        io::write_file(cfg.out, io::make_report("corpus", {}, config, results).dump(2) + "\n");
    }
    return kExitOk;
}

int run_verify(const RunConfig& cfg) {
    VerifyOptions opts;
    opts.filter = cfg.filter;
    opts.solver_tol = cfg.verify_tol;
    opts.seed = cfg.verify_seed;
    const auto results = run_acceptance(opts);
    std::cout << format_table(results);
    bool all = !results.empty();
    json rows = json::array();
    for (const auto& r : results) {
        all = all && r.passed;
        rows.push_back({{"id", r.id},
                        {"name", r.name},
                        {"group", r.group},
                        {"expected", r.expected},
                        {"actual", r.actual},
                        {"tolerance", r.tolerance},
                        {"status", r.passed ? "pass" : "fail"}});
    }
    std::size_t passed = 0;
    for (const auto& r : results) passed += r.passed ? 1 : 0;
    std::cout << passed << "/" << results.size() << " criteria passed\n";
    if (!cfg.out.empty()) {
        json config{{"filter", cfg.filter},
                    {"tol", cfg.verify_tol ? json(*cfg.verify_tol) : json(nullptr)},
                    {"seed", cfg.verify_seed}};
        io::write_file(cfg.out, io::make_report("verify-paper", {}, config, {{"criteria", rows}}).dump(2) + "\n");
    }
    return all ? kExitOk : kExitError;
}

void add_kernel_options(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--kernel", cfg.kernel_path, "Kernel file (.json or .csv with .labels sidecar)");
    sub->add_option("--corpus", cfg.corpus, "Built-in chain instead of --kernel");
    sub->add_option("--param,--params", cfg.params, "Corpus parameter key=value; values accept ln(x)");
    sub->add_option("--out", cfg.out, "Output file (default stdout)");
    sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
}

void add_reward_options(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--reward", cfg.reward_path, "Reward file (.json {\"values\"} or .csv)");
    sub->add_option("--values", cfg.values, "Inline reward, comma separated; accepts ln(x)");
    sub->add_option("--reward-name", cfg.reward_name, "Canonical corpus reward to use");
}

void add_solver_options(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--tol", cfg.tol, "Span stopping tolerance");
    sub->add_option("--max-iter", cfg.max_iter, "Iteration limit");
    sub->add_option("--span-cap", cfg.span_cap, "Divergence span cap");
    sub->add_option("--anchor", cfg.anchor, "State label for relative value iteration");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multiplicative Poisson equation toolkit for finite Markov chains"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto* mixing = app.add_subcommand("mixing", "Dobrushin, minorization and strong-mixing coefficients");
    add_kernel_options(mixing, cfg);
    mixing->add_option("--n-max", cfg.n_max, "Largest step count (default 4)");

    auto* solve = app.add_subcommand("solve", "Solve the multiplicative Poisson equation");
    add_kernel_options(solve, cfg);
    add_reward_options(solve, cfg);
    add_solver_options(solve, cfg);

    auto* ape = app.add_subcommand("ape", "Solve the additive Poisson equation");
    add_kernel_options(ape, cfg);
    add_reward_options(ape, cfg);

    auto* average = app.add_subcommand("average", "Risk-sensitive averages T^n 0 / n");
    add_kernel_options(average, cfg);
    add_reward_options(average, cfg);
    add_solver_options(average, cfg);
    average->add_option("--n-max", cfg.n_max, "Largest horizon (default 100)");
    average->add_option("--states", cfg.states, "Comma-separated state labels (default all)");

    auto* classify = app.add_subcommand("classify", "Decide whether every reward has a bounded solution");
    add_kernel_options(classify, cfg);

    auto* escape = app.add_subcommand("escape-test", "Geometric escape test from the support");
    add_kernel_options(escape, cfg);
    escape->add_option("--support", cfg.support, "Comma-separated labels (default invariant support)");
    escape->add_option("--alphas", cfg.alphas, "Comma-separated rates in (0, 1)");
    escape->add_option("--n-max", cfg.n_max, "Largest horizon (default 1000)");

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo entropic estimate with bootstrap");
    add_kernel_options(simulate, cfg);
    add_reward_options(simulate, cfg);
    simulate->add_option("--paths", cfg.paths, "Number of paths");
    simulate->add_option("--horizon", cfg.horizon, "Path length n");
    simulate->add_option("--seed", cfg.seed, "Master seed");
    simulate->add_option("--start", cfg.start, "Start state label (default first)");
    simulate->add_option("--resamples", cfg.resamples, "Bootstrap resamples");

    auto* dominance = app.add_subcommand("dominance", "Exact partial-sum laws and first-order dominance");
    add_kernel_options(dominance, cfg);
    add_reward_options(dominance, cfg);
    dominance->add_option("--reward2", cfg.reward2_path, "Second reward file");
    dominance->add_option("--values2", cfg.values2, "Second inline reward");
    dominance->add_option("--reward2-name", cfg.reward2_name, "Second canonical corpus reward");
    dominance->add_option("--start", cfg.start, "Start state label (default first)");
    dominance->add_option("--horizon", cfg.horizon, "Number of summed steps n");

    auto* corpus = app.add_subcommand("corpus", "Write a built-in chain and its rewards as JSON");
    corpus->add_option("name", cfg.corpus, "Chain name")->required()->check(CLI::IsMember(corpus_names()));
    corpus->add_option("--param,--params", cfg.params, "Parameter key=value; values accept ln(x)");
    corpus->add_option("--out-dir", cfg.out_dir, "Directory for kernel.json, reward_*.json, metadata.json");
    corpus->add_option("--out", cfg.out, "Combined report file (default stdout without --out-dir)");

    auto* verify = app.add_subcommand("verify-paper", "Run every acceptance criterion");
    verify->add_option("--filter", cfg.filter, "Keep criteria whose id, group or name matches");
    verify->add_option("--tol", cfg.verify_tol, "Override the solver tolerance");
    verify->add_option("--seed", cfg.verify_seed, "Seed for randomised criteria");
    verify->add_option("--out", cfg.out, "JSON report file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitError;
    }

    try {
        if (mixing->parsed()) return run_mixing(cfg);
        if (solve->parsed()) return run_solve(cfg);
        if (ape->parsed()) return run_ape(cfg);
        if (average->parsed()) return run_average(cfg);
        if (classify->parsed()) return run_classify(cfg);
        if (escape->parsed()) return run_escape(cfg);
        if (simulate->parsed()) return run_simulate(cfg);
        if (dominance->parsed()) return run_dominance(cfg);
        if (corpus->parsed()) return run_corpus(cfg);
        if (verify->parsed()) return run_verify(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
