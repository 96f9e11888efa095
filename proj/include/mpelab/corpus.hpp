#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mpelab/entropy.hpp"

namespace mpelab {

/// How a denumerable chain was cut to `size` states: mass that would leave
/// the truncated range goes to `redirect_state`.
struct TruncationPolicy {
    std::size_t size = 0;
    StateIndex redirect_state = 0;
    /// Per row, the mass moved to redirect_state.
    std::vector<double> redirected_mass;
    /// Bound on the perturbation this causes, as documented per chain.
    double error_bound = 0.0;
};

struct NamedReward {
    std::string name;
    RewardFunction reward;
};

struct CorpusChain {
    std::string name;
    FiniteKernel kernel;
    std::optional<TruncationPolicy> truncation;
    std::vector<NamedReward> rewards;
    std::map<std::string, double> parameters;
};

/// [[1, 0], [1 - stay, stay]]; stay in (0, 1) is the Dobrushin coefficient.
CorpusChain two_state(double stay);

/// Zero diagonal, 1/2 elsewhere.
CorpusChain cyclic_three();

/// State 1 absorbing; state i >= 2 jumps to 1 w.p. 1 - 2^{-(i-1)} and to
/// i + 1 otherwise. N >= 8.
CorpusChain shift_chain(std::size_t n);

/// Every state jumps to 1 or one step forward w.p. 1/2 each. Carries the
/// block reward for epsilon (default 0.5).
CorpusChain full_support_shift(std::size_t n, double epsilon = 0.5);

/// Row 1 = (3/4, 1/4); rows i >= 2 send 1/2 to 1, 1/4 to i, 1/4 to i + 1.
/// Carries the alternating and dyadic-block rewards for level k.
CorpusChain recurrent_shift(std::size_t n, double k = 1.0);

/// Blocks A_0 = {1}, A_i of size i + 1 walked left to right with reset to
/// 1; only complete blocks fitting in n states are kept and the mass at 1
/// is recomputed. Carries the block-tail reward for level k.
CorpusChain branching_chain(std::size_t n, double k = 2.0);

/// Row 1 = (1/2, a_1, a_2, ...); rows i >= 2 = 1/2 to 1, 1/2 to i. The
/// first n - 1 weights are rescaled to sum to 1/2.
CorpusChain local_geometric(const std::vector<double>& weights, std::size_t n);
/// Weights a_i = 2^{-(i+1)}.
CorpusChain local_geometric(std::size_t n);

/// min(1, m * dist(x, closed ball(centre, radius - 1/m))) on a metric space.
RewardFunction bump_reward(const StateSpace& space, StateIndex centre, double radius, double m);

/// 0 on [2^j, 2^j + 2^{j-1}), level on [2^j + 2^{j-1}, 2^{j+1}), states 1..n.
RewardFunction dyadic_block_reward(std::size_t n, double level);

/// 0 on state 1 and on even states, k on odd states >= 3.
RewardFunction alternating_reward(std::size_t n, double k);

/// Closed-form facts for the two-state chain.
bool two_state_solution_exists(double stay, const RewardFunction& g);

struct ClosedForm {
    Vector w;
    double lambda = 0.0;
};
/// Solution with inf w = 0, or nullopt when no bounded solution exists.
std::optional<ClosedForm> two_state_closed_form(double stay, const RewardFunction& g);

/// ln(1/2 + (sqrt(12 + e^{2k} - 4 e^k) + e^k) / 8); k >= 0.
double recurrent_shift_lambda(double k);

/// Names accepted by build_corpus.
std::vector<std::string> corpus_names();

/// Dispatch by name with keyword parameters (for example {"n": 64}).
/// local_geometric accepts "ratio" for weights proportional to ratio^i.
CorpusChain build_corpus(const std::string& name, const std::map<std::string, double>& params);

}  // namespace mpelab
