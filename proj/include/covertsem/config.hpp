#pragma once

// Run configuration: one JSON document carrying every module's parameters.
// Unknown keys are rejected, omitted keys fall back to explicit defaults,
// and the fully resolved document (with auto values made concrete) is echoed
// next to every command's outputs.

#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "covertsem/channel.hpp"
#include "covertsem/contract.hpp"
#include "covertsem/environment.hpp"
#include "covertsem/rdsac.hpp"
#include "covertsem/semantics.hpp"

namespace covertsem::config {

using nlohmann::json;

// Additional RNG stream labels (the training streams live in rdsac.hpp).
inline constexpr std::uint64_t kStreamScene = 32;
inline constexpr std::uint64_t kStreamOracleStates = 33;
inline constexpr std::uint64_t kStreamSweep = 34;

inline json default_config() {
    return json{
        {"schema_version", 1},
        {"seed", 1},
        {"out_dir", "out"},
        {"channel",
         {{"env_a", 9.61},
          {"env_b", 0.16},
          {"carrier_hz", 2.0e9},
          {"light_speed_mps", 3.0e8},
          {"atten_los", 1.0},
          {"atten_nlos", 20.0},
          {"noise_bs_w", 1e-10},
          {"noise_willie_w", 1e-10}}},
        {"geometry", {{"horiz_dist_m", 100.0}, {"altitude_m", 100.0}, {"tx_power_w", 0.1}}},
        {"per",
         {{"mod_c", 1.0},
          {"mod_beta", 0.5},
          {"packet_bits", 1024.0},
          {"bits_g1", 1024.0},
          {"bits_g2", 4096.0},
          {"bits_g3", 16384.0}}},
        {"detection",
         {{"mode", "uniform_range"},
          {"threshold_w", 0.0},
          {"lo_w", nullptr},   // null = derive from the channel: noise_willie
          {"hi_w", nullptr},   // null = noise_willie + 2 * received power
          {"prior_h0", 0.5},
          {"prior_h1", 0.5}}},
        {"semantics",
         {{"p_base", 0.1},
          {"sens_lambda", 5.0},
          {"alpha_scale", 100.0},
          {"payload_l", 1.0},
          {"kappa", 4},
          {"scene_height", 64},
          {"scene_width", 64},
          {"scene_objects", 4},
          {"scene_batch", 100}}},
        {"econ", {{"upsilon", 200.0}, {"unit_cost", 90.0}, {"beta_profit", 50.0}}},
        {"pt",
         {{"enabled", true},
          {"u_ref", 160.0},
          {"gain_exp", 1.0},
          {"loss_exp", 1.0},
          {"loss_aversion", 0.5}}},
        {"env",
         {{"m_count", 5},
          {"k_count", 2},
          {"theta_ranges", json::array({json::array({10.0, 50.0}), json::array({100.0, 200.0})})},
          {"cost_range", json::array({80.0, 100.0})},
          {"snr_db_set", json::array({-3.0, 0.0, 3.0, 6.0, 9.0, 12.0, 15.0, 18.0, 21.0})},
          {"q_max", 50.0},
          {"infeasible_penalty", 0.0}}},
        {"oracle", {{"grid_n", 101}, {"n_states", 50}}},
        {"train",
         {{"gamma", 0.95},
          {"tau", 0.005},
          {"rho", 0.9},
          {"beta_entropy", 0.05},
          {"batch", 256},
          {"episodes", 800},
          {"steps_per_episode", 8},
          {"buffer_capacity", 100000},
          {"lr_actor", 1e-3},
          {"lr_critic", 1e-3},
          {"diffusion_steps", 5},
          {"delta_lo", 1e-4},
          {"delta_hi", 0.2},
          {"hidden", json::array({64, 64})},
          {"embed_dim", 8},
          {"reward_scale", 1e-3},
          {"entropy_states", 8},
          {"entropy_samples", 16},
          {"sac_alpha", 0.2},
          {"log_transitions", false}}},
        {"eval", {{"n_states", 50}}},
    };
}

namespace detail {

inline bool type_compatible(const json& value, const json& reference) {
    if (reference.is_null()) return value.is_null() || value.is_number();
    if (reference.is_number() && value.is_number()) return true;
    if (reference.is_string() && value.is_string()) return true;
    if (reference.is_boolean() && value.is_boolean()) return true;
    if (reference.is_array() && value.is_array()) return true;
    if (reference.is_object() && value.is_object()) return true;
    return false;
}

// Walks the user document against the defaults: unknown keys and type
// mismatches are errors, known keys override.
inline void merge_validate(json& base, const json& user, const std::string& path) {
    for (const auto& [key, value] : user.items()) {
        if (!base.contains(key))
            throw std::invalid_argument("config: unknown key '" + path + key + "'");
        json& slot = base[key];
        if (slot.is_object() && value.is_object()) {
            merge_validate(slot, value, path + key + ".");
            continue;
        }
        if (!type_compatible(value, slot))
            throw std::invalid_argument("config: type mismatch at '" + path + key + "'");
        slot = value;
    }
}

}  // namespace detail

struct RunConfig {
    std::uint64_t seed = 1;
    std::string out_dir = "out";

    channel::ChannelEnv channel_env;
    channel::LinkGeometry geometry;
    channel::PerConfig per;  // packet_bits carries the base profile
    double bits_g1 = 1024.0, bits_g2 = 4096.0, bits_g3 = 16384.0;
    channel::DetectionConfig detection;  // resolved (no auto markers left)

    semantics::SemanticConfig sem;
    int kappa = 4;
    int scene_height = 64, scene_width = 64, scene_objects = 4, scene_batch = 100;

    contract::EconParams econ;
    bool pt_enabled = true;
    contract::PtParams pt;

    env::EnvRanges ranges;
    int oracle_grid_n = 101;
    int oracle_states = 50;
    rdsac::TrainConfig train;
    int eval_states = 50;

    json resolved;  // the echoed document

    contract::UtilityMode mode() const {
        return pt_enabled ? contract::UtilityMode{pt} : contract::UtilityMode{};
    }
    rdsac::EnvSetup setup() const { return {ranges, econ, mode()}; }
};

inline RunConfig config_from_json(const json& user) {
    json doc = default_config();
    detail::merge_validate(doc, user, "");

    if (doc["schema_version"].get<int>() != 1)
        throw std::invalid_argument("config: unsupported schema_version");

    RunConfig cfg;
    cfg.seed = doc["seed"].get<std::uint64_t>();
    cfg.out_dir = doc["out_dir"].get<std::string>();

    const json& ch = doc["channel"];
    cfg.channel_env = {ch["env_a"], ch["env_b"], ch["carrier_hz"], ch["light_speed_mps"],
                       ch["atten_los"], ch["atten_nlos"], ch["noise_bs_w"], ch["noise_willie_w"]};
    cfg.channel_env.validate();

    const json& geo = doc["geometry"];
    cfg.geometry = {geo["horiz_dist_m"], geo["altitude_m"], geo["tx_power_w"]};
    cfg.geometry.validate();

    const json& per = doc["per"];
    cfg.per = {per["mod_c"], per["mod_beta"], per["packet_bits"]};
    cfg.per.validate();
    cfg.bits_g1 = per["bits_g1"];
    cfg.bits_g2 = per["bits_g2"];
    cfg.bits_g3 = per["bits_g3"];

    const json& det = doc["detection"];
    const std::string mode = det["mode"].get<std::string>();
    if (mode == "fixed")
        cfg.detection.mode = channel::ThresholdMode::Fixed;
    else if (mode == "uniform_range")
        cfg.detection.mode = channel::ThresholdMode::UniformRange;
    else
        throw std::invalid_argument("config: detection.mode must be 'fixed' or 'uniform_range'");
    cfg.detection.threshold_w = det["threshold_w"];
    cfg.detection.prior_h0 = det["prior_h0"];
    cfg.detection.prior_h1 = det["prior_h1"];
    const double rx = channel::received_power_w(cfg.geometry, cfg.channel_env);
    cfg.detection.lo_w = det["lo_w"].is_null() ? cfg.channel_env.noise_willie_w
                                               : det["lo_w"].get<double>();
    cfg.detection.hi_w = det["hi_w"].is_null() ? cfg.channel_env.noise_willie_w + 2.0 * rx
                                               : det["hi_w"].get<double>();
    cfg.detection.validate();
    doc["detection"]["lo_w"] = cfg.detection.lo_w;
    doc["detection"]["hi_w"] = cfg.detection.hi_w;

    const json& sem = doc["semantics"];
    cfg.sem = {sem["p_base"], sem["sens_lambda"], sem["alpha_scale"], sem["payload_l"]};
    cfg.sem.validate();
    cfg.kappa = sem["kappa"];
    cfg.scene_height = sem["scene_height"];
    cfg.scene_width = sem["scene_width"];
    cfg.scene_objects = sem["scene_objects"];
    cfg.scene_batch = sem["scene_batch"];
    if (cfg.kappa < 2) throw std::invalid_argument("config: semantics.kappa must be >= 2");
    if (cfg.scene_batch < 1) throw std::invalid_argument("config: semantics.scene_batch must be >= 1");

    const json& econ = doc["econ"];
    cfg.econ = {econ["upsilon"], econ["unit_cost"], econ["beta_profit"]};
    cfg.econ.validate();

    const json& pt = doc["pt"];
    cfg.pt_enabled = pt["enabled"];
    cfg.pt = {pt["u_ref"], pt["gain_exp"], pt["loss_exp"], pt["loss_aversion"]};
    cfg.pt.validate();

    const json& env_j = doc["env"];
    cfg.ranges.m_count = env_j["m_count"];
    cfg.ranges.k_count = env_j["k_count"];
    cfg.ranges.theta_ranges.clear();
    for (const auto& pair : env_j["theta_ranges"]) {
        if (!pair.is_array() || pair.size() != 2)
            throw std::invalid_argument("config: env.theta_ranges entries must be [lo, hi]");
        cfg.ranges.theta_ranges.emplace_back(pair[0].get<double>(), pair[1].get<double>());
    }
    cfg.ranges.cost_range = {env_j["cost_range"][0].get<double>(),
                             env_j["cost_range"][1].get<double>()};
    cfg.ranges.snr_db_set.clear();
    for (const auto& v : env_j["snr_db_set"]) cfg.ranges.snr_db_set.push_back(v.get<double>());
    cfg.ranges.u_ref = cfg.pt.u_ref;
    cfg.ranges.q_max = env_j["q_max"];
    cfg.ranges.infeasible_penalty = env_j["infeasible_penalty"];
    cfg.ranges.validate();

    cfg.oracle_grid_n = doc["oracle"]["grid_n"];
    cfg.oracle_states = doc["oracle"]["n_states"];
    if (cfg.oracle_grid_n < 2) throw std::invalid_argument("config: oracle.grid_n must be >= 2");
    if (cfg.oracle_states < 0) throw std::invalid_argument("config: oracle.n_states must be >= 0");

    const json& tr = doc["train"];
    cfg.train.gamma = tr["gamma"];
    cfg.train.tau = tr["tau"];
    cfg.train.rho = tr["rho"];
    cfg.train.beta_entropy = tr["beta_entropy"];
    cfg.train.batch = tr["batch"];
    cfg.train.episodes = tr["episodes"];
    cfg.train.steps_per_episode = tr["steps_per_episode"];
    cfg.train.buffer_capacity = tr["buffer_capacity"].get<std::size_t>();
    cfg.train.lr_actor = tr["lr_actor"];
    cfg.train.lr_critic = tr["lr_critic"];
    cfg.train.diffusion_steps = tr["diffusion_steps"];
    cfg.train.delta_lo = tr["delta_lo"];
    cfg.train.delta_hi = tr["delta_hi"];
    cfg.train.hidden.clear();
    for (const auto& h : tr["hidden"]) cfg.train.hidden.push_back(h.get<int>());
    cfg.train.embed_dim = tr["embed_dim"];
    cfg.train.reward_scale = tr["reward_scale"];
    cfg.train.entropy_states = tr["entropy_states"];
    cfg.train.entropy_samples = tr["entropy_samples"];
    cfg.train.sac_alpha = tr["sac_alpha"];
    cfg.train.log_transitions = tr["log_transitions"];
    cfg.train.validate();

    cfg.eval_states = doc["eval"]["n_states"];
    if (cfg.eval_states < 1) throw std::invalid_argument("config: eval.n_states must be >= 1");

    cfg.resolved = std::move(doc);
    return cfg;
}

inline RunConfig load_config(const std::optional<std::string>& path) {
    if (!path) return config_from_json(json::object());
    std::ifstream in(*path);
    if (!in) throw std::runtime_error("config: cannot open '" + *path + "'");
    json user;
    try {
        in >> user;
    } catch (const json::parse_error& e) {
        throw std::runtime_error("config: parse failure in '" + *path + "': " + e.what());
    }
    return config_from_json(user);
}

}  // namespace covertsem::config
