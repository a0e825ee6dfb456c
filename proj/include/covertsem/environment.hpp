#pragma once

// The MDP around the contract problem: state sampling and encoding, the
// action-to-contract mapping with its monotonicity gate, and the gated
// reward function. Episodes are single-step (the contract problem has no
// transition dynamics); done is always 1 and the next state is a fresh
// sample.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "covertsem/channel.hpp"
#include "covertsem/contract.hpp"
#include "covertsem/rng.hpp"

namespace covertsem::env {

struct EnvRanges {
    std::vector<std::pair<double, double>> theta_ranges = {{10.0, 50.0}, {100.0, 200.0}};
    std::pair<double, double> cost_range = {80.0, 100.0};
    std::vector<double> snr_db_set = {-3.0, 0.0, 3.0, 6.0, 9.0, 12.0, 15.0, 18.0, 21.0};
    double u_ref = 160.0;
    int m_count = 5;
    int k_count = 2;
    double q_max = 50.0;
    double infeasible_penalty = 0.0;  // reward for gated actions is -penalty; 0 keeps the literal rule

    void validate() const {
        if (k_count < 1 || m_count < 1) throw std::invalid_argument("EnvRanges: counts must be positive");
        if (static_cast<int>(theta_ranges.size()) != k_count)
            throw std::invalid_argument("EnvRanges: need one theta range per type");
        for (const auto& [lo, hi] : theta_ranges)
            if (!(lo < hi) || lo <= 0.0) throw std::invalid_argument("EnvRanges: theta ranges must be positive with lo < hi");
        if (!(cost_range.first < cost_range.second))
            throw std::invalid_argument("EnvRanges: cost range must have lo < hi");
        if (snr_db_set.empty()) throw std::invalid_argument("EnvRanges: snr set must be nonempty");
        if (!(q_max > 0.0)) throw std::invalid_argument("EnvRanges: q_max must be positive");
        if (infeasible_penalty < 0.0) throw std::invalid_argument("EnvRanges: penalty must be nonnegative");
    }

    double snr_db_min() const {
        double lo = snr_db_set.front();
        for (double v : snr_db_set) lo = std::min(lo, v);
        return lo;
    }
    double snr_db_max() const {
        double hi = snr_db_set.front();
        for (double v : snr_db_set) hi = std::max(hi, v);
        return hi;
    }
};

struct MdpState {
    int m = 0;
    int k = 0;
    double u_ref = 0.0;
    double unit_cost = 0.0;
    double sinr = 0.0;                 // linear
    std::vector<double> proportions;   // lambda, K entries
    std::vector<double> type_values;   // theta, K entries ascending

    contract::UavPopulation population() const {
        contract::UavPopulation pop;
        pop.type_values = type_values;
        pop.proportions = proportions;
        pop.uav_count = m;
        return pop;
    }
};

struct ActionVec {
    std::vector<double> raw;  // network output in [-1,1]^K
    std::vector<double> q;    // scaled densities in [0, q_max]^K
};

struct Transition {
    std::vector<double> state;       // encoded
    std::vector<double> action;      // raw
    double reward = 0.0;
    std::vector<double> next_state;  // encoded
    double done = 1.0;
};

inline MdpState sample_state(const EnvRanges& ranges, Rng& rng) {
    MdpState s;
    s.m = ranges.m_count;
    s.k = ranges.k_count;
    s.u_ref = ranges.u_ref;
    s.unit_cost = rng.uniform(ranges.cost_range.first, ranges.cost_range.second);
    s.sinr = channel::snr_db_to_linear(ranges.snr_db_set[rng.choice(ranges.snr_db_set.size())]);
    s.proportions = rng.dirichlet(static_cast<std::size_t>(ranges.k_count));
    s.type_values.resize(ranges.k_count);
    for (int k = 0; k < ranges.k_count; ++k)
        s.type_values[k] = rng.uniform(ranges.theta_ranges[k].first, ranges.theta_ranges[k].second);
    std::sort(s.type_values.begin(), s.type_values.end());
    return s;
}

inline int state_dim(const EnvRanges& ranges) { return 2 * ranges.k_count + 5; }

// Flattened [M, K, U_ref, a, SNR_dB, lambda..., theta...], each entry mapped
// to [0,1] by its configured range. SNR is normalized on the dB scale.
inline std::vector<double> encode_state(const MdpState& s, const EnvRanges& ranges) {
    std::vector<double> enc;
    enc.reserve(state_dim(ranges));
    const auto norm = [](double v, double lo, double hi) {
        return hi > lo ? (v - lo) / (hi - lo) : 0.0;
    };
    enc.push_back(norm(static_cast<double>(s.m), 0.0, 2.0 * ranges.m_count));
    enc.push_back(norm(static_cast<double>(s.k), 0.0, 2.0 * ranges.k_count));
    enc.push_back(norm(s.u_ref, 0.0, 2.0 * std::max(1.0, ranges.u_ref)));
    enc.push_back(norm(s.unit_cost, ranges.cost_range.first, ranges.cost_range.second));
    enc.push_back(norm(10.0 * std::log10(s.sinr), ranges.snr_db_min() - 1.0, ranges.snr_db_max() + 1.0));
    for (double l : s.proportions) enc.push_back(l);
    for (int k = 0; k < s.k; ++k)
        enc.push_back(norm(s.type_values[k], ranges.theta_ranges[k].first, ranges.theta_ranges[k].second));
    return enc;
}

inline MdpState decode_state(const std::vector<double>& enc, const EnvRanges& ranges) {
    if (static_cast<int>(enc.size()) != state_dim(ranges))
        throw std::invalid_argument("decode_state: encoded length mismatch");
    const auto denorm = [](double v, double lo, double hi) { return lo + v * (hi - lo); };
    MdpState s;
    s.m = static_cast<int>(std::lround(denorm(enc[0], 0.0, 2.0 * ranges.m_count)));
    s.k = static_cast<int>(std::lround(denorm(enc[1], 0.0, 2.0 * ranges.k_count)));
    s.u_ref = denorm(enc[2], 0.0, 2.0 * std::max(1.0, ranges.u_ref));
    s.unit_cost = denorm(enc[3], ranges.cost_range.first, ranges.cost_range.second);
    s.sinr = std::pow(10.0, denorm(enc[4], ranges.snr_db_min() - 1.0, ranges.snr_db_max() + 1.0) / 10.0);
    s.proportions.assign(enc.begin() + 5, enc.begin() + 5 + ranges.k_count);
    s.type_values.resize(ranges.k_count);
    for (int k = 0; k < ranges.k_count; ++k)
        s.type_values[k] = denorm(enc[5 + ranges.k_count + k], ranges.theta_ranges[k].first,
                                  ranges.theta_ranges[k].second);
    return s;
}

// q_k = (raw_k + 1)/2 * q_max. Decreasing q vectors return nullopt: the
// agent has to learn monotonicity, nothing is sorted on its behalf.
inline std::optional<contract::ContractMenu> action_to_menu(const ActionVec& action,
                                                            const MdpState& state,
                                                            const contract::EconParams& econ,
                                                            double q_max) {
    for (double r : action.raw)
        if (r < -1.0 || r > 1.0) throw std::invalid_argument("action_to_menu: raw action outside [-1,1]");
    std::vector<double> q(action.raw.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
        q[i] = (action.raw[i] + 1.0) / 2.0 * q_max;
        if (i > 0 && q[i] < q[i - 1]) return std::nullopt;
    }
    return contract::menu_from_q(q, state.population(), econ);
}

inline ActionVec make_action(std::vector<double> raw, double q_max) {
    ActionVec a;
    a.q.resize(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) a.q[i] = (raw[i] + 1.0) / 2.0 * q_max;
    a.raw = std::move(raw);
    return a;
}

// Paper reward: U_PT^BS + sum_k U_k^A(item_k) + sum_k sum_n (U_k^A(item_k)
// - U_k^A(item_n)) when the menu passes the full IR/IC check, else the
// gated value (0 by default).
inline double gated_reward(const std::optional<contract::ContractMenu>& menu, const MdpState& state,
                           const contract::EconParams& econ, const contract::UtilityMode& mode,
                           double infeasible_penalty = 0.0) {
    if (!menu) return -infeasible_penalty;
    const contract::UavPopulation pop = state.population();
    const contract::FeasibilityReport report = contract::check_feasibility(*menu, pop, econ);
    if (!report.all_ok()) return -infeasible_penalty;

    double reward = contract::bs_total_utility(*menu, pop, econ, mode);
    const int k_count = menu->size();
    for (int k = 0; k < k_count; ++k) {
        reward += report.ir_slack[k];  // U_k at its own item
        for (int n = 0; n < k_count; ++n) {
            if (n == k) continue;
            reward += report.ic_slack[k][n];
        }
    }
    return reward;
}

struct StepResult {
    double reward = 0.0;
    MdpState next_state;
    double done = 1.0;
};

inline StepResult step(const MdpState& state, const ActionVec& action, const EnvRanges& ranges,
                       const contract::EconParams& econ, const contract::UtilityMode& mode,
                       Rng& rng) {
    const contract::EconParams state_econ{econ.upsilon, state.unit_cost, econ.beta_profit};
    contract::UtilityMode state_mode = mode;
    if (state_mode) state_mode->u_ref = state.u_ref;  // the reference point travels with the state
    const auto menu = action_to_menu(action, state, state_econ, ranges.q_max);
    StepResult out;
    out.reward = gated_reward(menu, state, state_econ, state_mode, ranges.infeasible_penalty);
    out.next_state = sample_state(ranges, rng);
    out.done = 1.0;
    return out;
}

}  // namespace covertsem::env
