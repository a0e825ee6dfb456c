#pragma once

// Contract economics: UAV/BS utilities, the prospect-theory transform,
// IR/IC feasibility checking, closed-form optimal rewards, and oracle
// solvers for the reduced single-variable contract problem.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace covertsem::contract {

struct UavPopulation {
    std::vector<double> type_values;  // theta_k, ascending
    std::vector<double> proportions;  // lambda_k, sums to 1
    int uav_count = 5;                // M

    int type_count() const { return static_cast<int>(type_values.size()); }

    void validate() const {
        if (type_values.empty() || type_values.size() != proportions.size())
            throw std::invalid_argument("UavPopulation: type_values and proportions must be nonempty and equal length");
        if (uav_count < 1) throw std::invalid_argument("UavPopulation: uav_count must be positive");
        double sum = 0.0;
        for (std::size_t k = 0; k < type_values.size(); ++k) {
            if (!(type_values[k] > 0.0)) throw std::invalid_argument("UavPopulation: type values must be positive");
            if (k > 0 && type_values[k] < type_values[k - 1])
                throw std::invalid_argument("UavPopulation: type values must be ascending");
            if (proportions[k] < 0.0) throw std::invalid_argument("UavPopulation: proportions must be nonnegative");
            sum += proportions[k];
        }
        if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("UavPopulation: proportions must sum to 1");
    }
};

struct EconParams {
    double upsilon = 200.0;     // reward weight
    double unit_cost = 90.0;    // cost per unit Q
    double beta_profit = 50.0;  // BS unit profit

    void validate() const {
        if (!(upsilon > 0.0 && unit_cost > 0.0 && beta_profit > 0.0))
            throw std::invalid_argument("EconParams: all parameters must be strictly positive");
    }
};

struct PtParams {
    double u_ref = 160.0;
    double gain_exp = 1.0;       // zeta+
    double loss_exp = 1.0;       // zeta-
    double loss_aversion = 0.5;  // eta

    void validate() const {
        if (!(gain_exp > 0.0 && gain_exp <= 1.0) || !(loss_exp > 0.0 && loss_exp <= 1.0))
            throw std::invalid_argument("PtParams: exponents must lie in (0,1]");
        if (loss_aversion < 0.0) throw std::invalid_argument("PtParams: loss aversion must be nonnegative");
    }
};

// EUT aggregation when empty, PT otherwise.
using UtilityMode = std::optional<PtParams>;

struct ContractItem {
    double q = 0.0;
    double r = 0.0;
};

struct ContractMenu {
    std::vector<ContractItem> items;  // indexed by type k

    int size() const { return static_cast<int>(items.size()); }
};

inline double uav_utility(double theta, const ContractItem& item, const EconParams& econ) {
    return econ.upsilon * theta * item.r - econ.unit_cost * item.q;
}

inline double bs_item_utility_eut(double q, double r, const EconParams& econ) {
    if (q < 0.0) throw std::domain_error("bs_item_utility_eut: q must be nonnegative");
    return econ.beta_profit * std::log(q + 1.0) - r;
}

// (u - ref)^z+ on gains, -eta * (ref - u)^z- on losses.
inline double pt_transform(double u_eut, const PtParams& pt) {
    if (u_eut >= pt.u_ref) return std::pow(u_eut - pt.u_ref, pt.gain_exp);
    return -pt.loss_aversion * std::pow(pt.u_ref - u_eut, pt.loss_exp);
}

inline double bs_total_utility(const ContractMenu& menu, const UavPopulation& pop,
                               const EconParams& econ, const UtilityMode& mode) {
    if (menu.size() != pop.type_count())
        throw std::invalid_argument("bs_total_utility: menu length must match type count");
    double sum = 0.0;
    for (int k = 0; k < menu.size(); ++k) {
        const double u = bs_item_utility_eut(menu.items[k].q, menu.items[k].r, econ);
        sum += pop.proportions[k] * (mode ? pt_transform(u, *mode) : u);
    }
    return pop.uav_count * sum;
}

struct FeasibilityReport {
    std::vector<double> ir_slack;                    // per type: U_k(item_k)
    std::vector<std::vector<double>> ic_slack;       // [k][n]: U_k(item_k) - U_k(item_n), n != k entries meaningful
    bool monotone_ok = true;
    std::vector<bool> ir_ok;
    std::vector<std::vector<bool>> ic_ok;

    bool all_ok() const {
        if (!monotone_ok) return false;
        for (bool ok : ir_ok)
            if (!ok) return false;
        for (const auto& row : ic_ok)
            for (bool ok : row)
                if (!ok) return false;
        return true;
    }
};

inline constexpr double kFeasibilityTol = 1e-9;

// Evaluates all K IR constraints, the full K(K-1) IC set, and Lemma-1
// monotonicity (Q and R nondecreasing in k).
inline FeasibilityReport check_feasibility(const ContractMenu& menu, const UavPopulation& pop,
                                           const EconParams& econ) {
    if (menu.size() != pop.type_count())
        throw std::invalid_argument("check_feasibility: menu length must match type count");
    const int k_count = menu.size();
    FeasibilityReport report;
    report.ir_slack.resize(k_count);
    report.ir_ok.resize(k_count);
    report.ic_slack.assign(k_count, std::vector<double>(k_count, 0.0));
    report.ic_ok.assign(k_count, std::vector<bool>(k_count, true));

    for (int k = 0; k < k_count; ++k) {
        const double own = uav_utility(pop.type_values[k], menu.items[k], econ);
        report.ir_slack[k] = own;
        report.ir_ok[k] = own >= -kFeasibilityTol;
        for (int n = 0; n < k_count; ++n) {
            if (n == k) continue;
            const double other = uav_utility(pop.type_values[k], menu.items[n], econ);
            report.ic_slack[k][n] = own - other;
            report.ic_ok[k][n] = own - other >= -kFeasibilityTol;
        }
        if (k > 0 && (menu.items[k].q < menu.items[k - 1].q - kFeasibilityTol ||
                      menu.items[k].r < menu.items[k - 1].r - kFeasibilityTol))
            report.monotone_ok = false;
    }
    return report;
}

// Closed-form rewards for a nondecreasing Q vector:
// R_k = (a/ups) Q_1/theta_1 + (a/ups) sum_{i<=k} (Q_i - Q_{i-1})/theta_i.
inline std::vector<double> optimal_rewards(const std::vector<double>& q_vec,
                                           const UavPopulation& pop, const EconParams& econ) {
    if (static_cast<int>(q_vec.size()) != pop.type_count())
        throw std::invalid_argument("optimal_rewards: q_vec length must match type count");
    for (std::size_t i = 0; i < q_vec.size(); ++i) {
        if (q_vec[i] < 0.0) throw std::invalid_argument("optimal_rewards: Q must be nonnegative");
        if (i > 0 && q_vec[i] < q_vec[i - 1])
            throw std::invalid_argument("optimal_rewards: q_vec must be nondecreasing");
    }
    const double scale = econ.unit_cost / econ.upsilon;
    std::vector<double> rewards(q_vec.size());
    double acc = scale * q_vec[0] / pop.type_values[0];
    rewards[0] = acc;
    for (std::size_t i = 1; i < q_vec.size(); ++i) {
        acc += scale * (q_vec[i] - q_vec[i - 1]) / pop.type_values[i];
        rewards[i] = acc;
    }
    return rewards;
}

inline ContractMenu menu_from_q(const std::vector<double>& q_vec, const UavPopulation& pop,
                                const EconParams& econ) {
    const std::vector<double> rewards = optimal_rewards(q_vec, pop, econ);
    ContractMenu menu;
    menu.items.resize(q_vec.size());
    for (std::size_t i = 0; i < q_vec.size(); ++i) menu.items[i] = {q_vec[i], rewards[i]};
    return menu;
}

struct SolveResult {
    ContractMenu menu;
    double utility = 0.0;
};

namespace detail {

// Visits every nondecreasing index vector in {0..grid_n-1}^K in
// lexicographic order.
template <typename Visitor>
void for_each_nondecreasing(int k_count, int grid_n, Visitor&& visit) {
    std::vector<int> idx(k_count, 0);
    while (true) {
        visit(idx);
        int pos = k_count - 1;
        while (pos >= 0 && idx[pos] == grid_n - 1) --pos;
        if (pos < 0) return;
        const int next = idx[pos] + 1;
        for (int i = pos; i < k_count; ++i) idx[i] = next;
    }
}

}  // namespace detail

// Exhaustive search over nondecreasing Q vectors on a grid_n-point grid over
// [0, q_max]^K, rewards from the closed form. Ties break toward the
// lexicographically smaller Q vector (visit order is lexicographic, strict
// improvement required to switch).
inline SolveResult oracle_grid_solve(const UavPopulation& pop, const EconParams& econ,
                                     const UtilityMode& mode, double q_max, int grid_n) {
    pop.validate();
    econ.validate();
    if (!(q_max >= 0.0)) throw std::invalid_argument("oracle_grid_solve: q_max must be nonnegative");
    if (grid_n < 2) throw std::invalid_argument("oracle_grid_solve: grid_n must be >= 2");

    const int k_count = pop.type_count();
    std::vector<double> grid(grid_n);
    for (int i = 0; i < grid_n; ++i) grid[i] = q_max * i / (grid_n - 1);

    SolveResult best;
    bool have_best = false;
    std::vector<double> q(k_count);
    detail::for_each_nondecreasing(k_count, grid_n, [&](const std::vector<int>& idx) {
        for (int k = 0; k < k_count; ++k) q[k] = grid[idx[k]];
        ContractMenu menu = menu_from_q(q, pop, econ);
        const double utility = bs_total_utility(menu, pop, econ, mode);
        if (!have_best || utility > best.utility) {
            best.menu = std::move(menu);
            best.utility = utility;
            have_best = true;
        }
    });
    return best;
}

// Complete-information benchmark: the BS observes each type, extracts full
// surplus (R = aQ/(ups*theta)), and optimizes Q per type analytically. The
// EUT objective per type is beta*ln(Q+1) - aQ/(ups*theta), concave in Q, so
// the optimum over [0, q_max] is the projected stationary point
// Q* = beta*ups*theta/a - 1. Any PT transform is monotone in the per-item
// EUT utility, so the same Q* maximizes the PT objective.
inline SolveResult complete_info_solve(const UavPopulation& pop, const EconParams& econ,
                                       const UtilityMode& mode, double q_max) {
    pop.validate();
    econ.validate();
    if (!(q_max >= 0.0)) throw std::invalid_argument("complete_info_solve: q_max must be nonnegative");

    SolveResult result;
    result.menu.items.resize(pop.type_count());
    double total = 0.0;
    for (int k = 0; k < pop.type_count(); ++k) {
        const double theta = pop.type_values[k];
        const double q_star = std::clamp(
            econ.beta_profit * econ.upsilon * theta / econ.unit_cost - 1.0, 0.0, q_max);
        const double r = econ.unit_cost * q_star / (econ.upsilon * theta);
        result.menu.items[k] = {q_star, r};
        const double u = bs_item_utility_eut(q_star, r, econ);
        total += pop.proportions[k] * (mode ? pt_transform(u, *mode) : u);
    }
    result.utility = pop.uav_count * total;
    return result;
}

}  // namespace covertsem::contract
