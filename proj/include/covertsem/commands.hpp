#pragma once

// Batch experiment commands binding all modules together: Q-table
// generation, oracle scheme comparison, training, evaluation, and the
// reference-point sweep. The CLI is a thin shell over these.

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "covertsem/checkpoint.hpp"
#include "covertsem/config.hpp"
#include "covertsem/io.hpp"
#include "covertsem/rdsac.hpp"
#include "covertsem/sac.hpp"
#include "covertsem/semantics.hpp"

namespace covertsem::commands {

using config::RunConfig;
using nlohmann::json;

// Per-type menu records {k, theta, lambda, q, r, u_uav, u_bs_eut, u_bs_pt}.
inline json menu_records(const contract::ContractMenu& menu, const contract::UavPopulation& pop,
                         const contract::EconParams& econ, const contract::UtilityMode& mode) {
    json records = json::array();
    for (int k = 0; k < menu.size(); ++k) {
        const contract::ContractItem& item = menu.items[k];
        const double u_eut = contract::bs_item_utility_eut(item.q, item.r, econ);
        records.push_back(json{
            {"k", k + 1},
            {"theta", pop.type_values[k]},
            {"lambda", pop.proportions[k]},
            {"q", item.q},
            {"r", item.r},
            {"u_uav", contract::uav_utility(pop.type_values[k], item, econ)},
            {"u_bs_eut", u_eut},
            {"u_bs_pt", mode ? contract::pt_transform(u_eut, *mode) : u_eut},
        });
    }
    return records;
}

// One JSON object per line, suitable for offline analysis of rollouts.
inline std::string transitions_jsonl(const std::vector<env::Transition>& transitions) {
    std::string out;
    for (const env::Transition& t : transitions) {
        const json line{{"state", t.state},
                        {"action", t.action},
                        {"reward", t.reward},
                        {"next_state", t.next_state},
                        {"done", t.done}};
        out += line.dump();
        out += '\n';
    }
    return out;
}

struct TableQRow {
    double snr_db = 0.0;
    double per_g1 = 0.0, per_g2 = 0.0, per_g3 = 0.0;
    double q_g1 = 0.0, q_g2 = 0.0, q_g3 = 0.0;
};

// Per SNR point: per-level PER under the level bit profile, SSIM-driven
// information degree per level over a seeded scene batch, the covert
// probability from the detection model, and the assembled Q values.
inline std::vector<TableQRow> table_q(const RunConfig& cfg, const std::vector<double>& snr_db) {
    if (snr_db.empty()) throw std::invalid_argument("table_q: SNR list must be nonempty");

    // mean information degree per abstraction level over the scene batch
    const std::uint64_t scene_seed = derive_seed(cfg.seed, config::kStreamScene);
    double i_s[3] = {0.0, 0.0, 0.0};
    for (int b = 0; b < cfg.scene_batch; ++b) {
        const semantics::Scene scene = semantics::generate_scene(
            derive_seed(scene_seed, static_cast<std::uint64_t>(b)), cfg.scene_height,
            cfg.scene_width, cfg.scene_objects);
        const semantics::Level levels[3] = {semantics::Level::G1, semantics::Level::G2,
                                            semantics::Level::G3};
        for (int g = 0; g < 3; ++g) {
            const double sim =
                semantics::ssim(scene.image, semantics::apply_abstraction(scene, {levels[g], cfg.kappa}));
            i_s[g] += semantics::semantic_info_degree(
                semantics::semantic_error_probability(sim, cfg.sem));
        }
    }
    for (double& v : i_s) v /= cfg.scene_batch;

    const double rx = channel::received_power_w(cfg.geometry, cfg.channel_env);
    const double eps0 =
        channel::covert_probability(cfg.detection, cfg.channel_env.noise_willie_w, rx);

    const double bits[3] = {cfg.bits_g1, cfg.bits_g2, cfg.bits_g3};
    std::vector<TableQRow> rows;
    rows.reserve(snr_db.size());
    for (double db : snr_db) {
        const double ups = channel::snr_db_to_linear(db);
        TableQRow row;
        row.snr_db = db;
        double* pers[3] = {&row.per_g1, &row.per_g2, &row.per_g3};
        double* qs[3] = {&row.q_g1, &row.q_g2, &row.q_g3};
        for (int g = 0; g < 3; ++g) {
            channel::PerConfig per = cfg.per;
            per.packet_bits = bits[g];
            per.validate();
            *pers[g] = channel::packet_error_rate(ups, per);
            const double v = channel::packet_success_rate(ups, per) * i_s[g];
            *qs[g] = semantics::covert_semantic_density(eps0, v, cfg.sem);
        }
        rows.push_back(row);
    }
    return rows;
}

inline std::string table_q_csv(const std::vector<TableQRow>& rows) {
    io::CsvWriter csv({"snr_db", "per_g1", "per_g2", "per_g3", "q_g1", "q_g2", "q_g3"});
    for (const TableQRow& r : rows)
        csv.row({r.snr_db, r.per_g1, r.per_g2, r.per_g3, r.q_g1, r.q_g2, r.q_g3});
    return csv.str();
}

struct OracleReport {
    int n_states = 0;
    double mean_random = 0.0;  // BS utility of random nondecreasing menus
    double mean_ca = 0.0;      // grid-oracle BS utility under asymmetric information
    double mean_cc = 0.0;      // complete-information BS utility
    double mean_ca_env_reward = 0.0;  // CA menus replayed through the env reward
    double gap_ratio = 0.0;           // (cc - ca) / (cc - random)
    int bound_violations = 0;         // states where random <= ca <= cc failed
    json ca_menus = json::array();    // per-state CA menu records
};

// Samples states from the shared evaluation stream so oracle-replay
// evaluation reproduces mean_ca_env_reward exactly.
inline OracleReport oracle_report(const RunConfig& cfg) {
    OracleReport report;
    report.n_states = cfg.oracle_states;
    if (cfg.oracle_states == 0) return report;

    Rng state_rng(derive_seed(cfg.seed, rdsac::kStreamEval));
    Rng menu_rng(derive_seed(cfg.seed, config::kStreamOracleStates));
    const contract::UtilityMode base_mode = cfg.mode();

    for (int i = 0; i < cfg.oracle_states; ++i) {
        const env::MdpState state = env::sample_state(cfg.ranges, state_rng);
        const contract::EconParams econ{cfg.econ.upsilon, state.unit_cost, cfg.econ.beta_profit};
        contract::UtilityMode mode = base_mode;
        if (mode) mode->u_ref = state.u_ref;
        const contract::UavPopulation pop = state.population();

        std::vector<double> q(cfg.ranges.k_count);
        for (double& v : q) v = menu_rng.uniform(0.0, cfg.ranges.q_max);
        std::sort(q.begin(), q.end());
        const double random_u =
            contract::bs_total_utility(contract::menu_from_q(q, pop, econ), pop, econ, mode);

        const contract::SolveResult ca =
            contract::oracle_grid_solve(pop, econ, mode, cfg.ranges.q_max, cfg.oracle_grid_n);
        const contract::SolveResult cc =
            contract::complete_info_solve(pop, econ, mode, cfg.ranges.q_max);

        std::vector<double> raw(cfg.ranges.k_count);
        for (int k = 0; k < cfg.ranges.k_count; ++k)
            raw[k] = 2.0 * ca.menu.items[k].q / cfg.ranges.q_max - 1.0;
        Rng scratch(0);
        const double ca_env = env::step(state, env::make_action(raw, cfg.ranges.q_max), cfg.ranges,
                                        cfg.econ, base_mode, scratch)
                                  .reward;

        if (!(random_u <= ca.utility + 1e-9 && ca.utility <= cc.utility + 1e-9))
            ++report.bound_violations;
        report.mean_random += random_u;
        report.mean_ca += ca.utility;
        report.mean_cc += cc.utility;
        report.mean_ca_env_reward += ca_env;
        report.ca_menus.push_back(json{{"state", i}, {"items", menu_records(ca.menu, pop, econ, mode)}});
    }
    report.mean_random /= cfg.oracle_states;
    report.mean_ca /= cfg.oracle_states;
    report.mean_cc /= cfg.oracle_states;
    report.mean_ca_env_reward /= cfg.oracle_states;
    const double denom = report.mean_cc - report.mean_random;
    report.gap_ratio = denom != 0.0 ? (report.mean_cc - report.mean_ca) / denom : 0.0;
    return report;
}

inline json oracle_report_json(const OracleReport& r) {
    return json{{"n_states", r.n_states},
                {"mean_random_utility", r.mean_random},
                {"mean_ca_utility", r.mean_ca},
                {"mean_cc_utility", r.mean_cc},
                {"mean_ca_env_reward", r.mean_ca_env_reward},
                {"gap_ratio", r.gap_ratio},
                {"bound_violations", r.bound_violations}};
}

inline std::string curve_csv(const std::vector<rdsac::CurveRow>& curve) {
    io::CsvWriter csv({"episode", "mean_reward", "critic_loss", "actor_loss", "feasibility_rate"});
    for (const rdsac::CurveRow& r : curve)
        csv.row({static_cast<double>(r.episode), r.mean_reward, r.critic_loss, r.actor_loss,
                 r.feasibility_rate});
    return csv.str();
}

struct TrainOutput {
    std::string curve_csv;
    checkpoint::Checkpoint ckpt;
    double tail_mean_reward = 0.0;  // mean curve reward over the final 10%
    rdsac::EvalResult eval;
    std::string transitions_jsonl;  // nonempty when train.log_transitions is set
};

inline double tail_mean(const std::vector<rdsac::CurveRow>& curve) {
    if (curve.empty()) return 0.0;
    const std::size_t tail = std::max<std::size_t>(1, curve.size() / 10);
    double sum = 0.0;
    for (std::size_t i = curve.size() - tail; i < curve.size(); ++i) sum += curve[i].mean_reward;
    return sum / tail;
}

inline TrainOutput run_train(const RunConfig& cfg, const std::string& algo) {
    TrainOutput out;
    const rdsac::EnvSetup setup = cfg.setup();
    if (algo == "rdsac") {
        rdsac::TrainResult res = rdsac::train(setup, cfg.train, cfg.seed);
        out.curve_csv = curve_csv(res.curve);
        out.tail_mean_reward = tail_mean(res.curve);
        out.eval = rdsac::evaluate(res.policy, setup, cfg.eval_states, cfg.seed);
        if (cfg.train.log_transitions) out.transitions_jsonl = transitions_jsonl(res.transitions);
        out.ckpt.algo = "rdsac";
        out.ckpt.policy = std::move(res.policy);
        out.ckpt.critics = std::move(res.critics);
    } else if (algo == "sac") {
        rdsac::SacTrainResult res = rdsac::sac_train(setup, cfg.train, cfg.seed);
        out.curve_csv = curve_csv(res.curve);
        out.tail_mean_reward = tail_mean(res.curve);
        out.eval = rdsac::sac_evaluate(res.policy, setup, cfg.eval_states, cfg.seed);
        if (cfg.train.log_transitions) out.transitions_jsonl = transitions_jsonl(res.transitions);
        out.ckpt.algo = "sac";
        out.ckpt.gaussian = std::move(res.policy);
        out.ckpt.critics = std::move(res.critics);
    } else {
        throw std::invalid_argument("train: algo must be 'rdsac' or 'sac'");
    }
    return out;
}

// Oracle-replay evaluation: the grid oracle acts as the policy on the
// shared evaluation stream.
inline rdsac::EvalResult evaluate_oracle_replay(const RunConfig& cfg, int n_states) {
    Rng state_rng(derive_seed(cfg.seed, rdsac::kStreamEval));
    const contract::UtilityMode base_mode = cfg.mode();
    std::vector<double> rewards(n_states);
    for (int i = 0; i < n_states; ++i) {
        const env::MdpState state = env::sample_state(cfg.ranges, state_rng);
        const contract::EconParams econ{cfg.econ.upsilon, state.unit_cost, cfg.econ.beta_profit};
        contract::UtilityMode mode = base_mode;
        if (mode) mode->u_ref = state.u_ref;
        const contract::SolveResult ca = contract::oracle_grid_solve(
            state.population(), econ, mode, cfg.ranges.q_max, cfg.oracle_grid_n);
        std::vector<double> raw(cfg.ranges.k_count);
        for (int k = 0; k < cfg.ranges.k_count; ++k)
            raw[k] = 2.0 * ca.menu.items[k].q / cfg.ranges.q_max - 1.0;
        Rng scratch(0);
        rewards[i] = env::step(state, env::make_action(raw, cfg.ranges.q_max), cfg.ranges, cfg.econ,
                               base_mode, scratch)
                         .reward;
    }
    rdsac::EvalResult out;
    for (double r : rewards) out.mean += r;
    out.mean /= n_states;
    double var = 0.0;
    for (double r : rewards) var += (r - out.mean) * (r - out.mean);
    out.stddev = std::sqrt(var / n_states);
    return out;
}

inline rdsac::EvalResult run_eval(const RunConfig& cfg, const std::string& checkpoint_path,
                                  int n_states) {
    if (checkpoint_path == "oracle") return evaluate_oracle_replay(cfg, n_states);
    const checkpoint::Checkpoint ckpt = checkpoint::load(checkpoint_path);
    const rdsac::EnvSetup setup = cfg.setup();
    if (ckpt.algo == "rdsac") return rdsac::evaluate(ckpt.policy, setup, n_states, cfg.seed);
    return rdsac::sac_evaluate(ckpt.gaussian, setup, n_states, cfg.seed);
}

struct SweepRow {
    double u_ref = 0.0;
    double utility = 0.0;  // mean oracle CA utility over the fixed instances
};

// Reference-point sweep over fixed sampled instances; only U_ref varies.
inline std::vector<SweepRow> sweep_ref(const RunConfig& cfg, const std::vector<double>& refs,
                                       int n_instances) {
    if (refs.empty()) throw std::invalid_argument("sweep_ref: refs must be nonempty");
    if (n_instances < 1) throw std::invalid_argument("sweep_ref: need at least one instance");

    Rng rng(derive_seed(cfg.seed, config::kStreamSweep));
    std::vector<env::MdpState> states(n_instances);
    for (auto& s : states) s = env::sample_state(cfg.ranges, rng);

    std::vector<SweepRow> rows;
    rows.reserve(refs.size());
    for (double ref : refs) {
        double total = 0.0;
        for (const env::MdpState& state : states) {
            const contract::EconParams econ{cfg.econ.upsilon, state.unit_cost,
                                            cfg.econ.beta_profit};
            contract::PtParams pt = cfg.pt;
            pt.u_ref = ref;
            total += contract::oracle_grid_solve(state.population(), econ, pt, cfg.ranges.q_max,
                                                 cfg.oracle_grid_n)
                         .utility;
        }
        rows.push_back({ref, total / n_instances});
    }
    return rows;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    io::CsvWriter csv({"u_ref", "utility"});
    for (const SweepRow& r : rows) csv.row({r.u_ref, r.utility});
    return csv.str();
}

}  // namespace covertsem::commands
