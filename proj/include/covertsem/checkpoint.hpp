#pragma once

// Versioned JSON checkpoints for trained policies. Doubles serialize via
// nlohmann's shortest round-trip representation, so load is bit-exact.

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "covertsem/io.hpp"
#include "covertsem/rdsac.hpp"
#include "covertsem/sac.hpp"

namespace covertsem::checkpoint {

using nlohmann::json;

inline constexpr int kVersion = 1;

inline json spec_to_json(const neural::NetSpec& spec) {
    return json{{"layer_sizes", spec.layer_sizes},
                {"hidden_act", static_cast<int>(spec.hidden_act)},
                {"final_act", static_cast<int>(spec.final_act)}};
}

inline neural::NetSpec spec_from_json(const json& j) {
    neural::NetSpec spec;
    spec.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
    spec.hidden_act = static_cast<neural::Act>(j.at("hidden_act").get<int>());
    spec.final_act = static_cast<neural::Act>(j.at("final_act").get<int>());
    spec.validate();
    return spec;
}

inline json schedule_to_json(const rdsac::DiffusionSchedule& sch) {
    return json{{"steps", sch.steps}, {"delta", sch.delta}, {"chi", sch.chi}, {"chi_bar", sch.chi_bar}};
}

inline rdsac::DiffusionSchedule schedule_from_json(const json& j) {
    rdsac::DiffusionSchedule sch;
    sch.steps = j.at("steps").get<int>();
    sch.delta = j.at("delta").get<std::vector<double>>();
    sch.chi = j.at("chi").get<std::vector<double>>();
    sch.chi_bar = j.at("chi_bar").get<std::vector<double>>();
    sch.validate();
    return sch;
}

inline json policy_to_json(const rdsac::PolicyBundle& policy) {
    return json{{"spec", spec_to_json(policy.spec)},
                {"noise_net", policy.noise_net.data},
                {"target_noise_net", policy.target_noise_net.data},
                {"schedule", schedule_to_json(policy.schedule)},
                {"state_dim", policy.state_dim},
                {"action_dim", policy.action_dim},
                {"embed_dim", policy.embed_dim}};
}

inline rdsac::PolicyBundle policy_from_json(const json& j) {
    rdsac::PolicyBundle policy;
    policy.spec = spec_from_json(j.at("spec"));
    policy.noise_net.data = j.at("noise_net").get<std::vector<double>>();
    policy.target_noise_net.data = j.at("target_noise_net").get<std::vector<double>>();
    policy.schedule = schedule_from_json(j.at("schedule"));
    policy.state_dim = j.at("state_dim").get<int>();
    policy.action_dim = j.at("action_dim").get<int>();
    policy.embed_dim = j.at("embed_dim").get<int>();
    if (policy.noise_net.data.size() != policy.spec.param_count())
        throw std::runtime_error("checkpoint: parameter count mismatch");
    return policy;
}

inline json gaussian_to_json(const rdsac::GaussianPolicy& policy) {
    return json{{"spec", spec_to_json(policy.spec)},
                {"params", policy.params.data},
                {"state_dim", policy.state_dim},
                {"action_dim", policy.action_dim},
                {"log_std_min", policy.log_std_min},
                {"log_std_max", policy.log_std_max}};
}

inline rdsac::GaussianPolicy gaussian_from_json(const json& j) {
    rdsac::GaussianPolicy policy;
    policy.spec = spec_from_json(j.at("spec"));
    policy.params.data = j.at("params").get<std::vector<double>>();
    policy.state_dim = j.at("state_dim").get<int>();
    policy.action_dim = j.at("action_dim").get<int>();
    policy.log_std_min = j.at("log_std_min").get<double>();
    policy.log_std_max = j.at("log_std_max").get<double>();
    if (policy.params.data.size() != policy.spec.param_count())
        throw std::runtime_error("checkpoint: parameter count mismatch");
    return policy;
}

inline json critics_to_json(const rdsac::CriticPair& critics) {
    return json{{"spec", spec_to_json(critics.spec)},
                {"q1", critics.q1.data},
                {"q2", critics.q2.data},
                {"target_q1", critics.target_q1.data},
                {"target_q2", critics.target_q2.data}};
}

inline rdsac::CriticPair critics_from_json(const json& j) {
    rdsac::CriticPair critics;
    critics.spec = spec_from_json(j.at("spec"));
    critics.q1.data = j.at("q1").get<std::vector<double>>();
    critics.q2.data = j.at("q2").get<std::vector<double>>();
    critics.target_q1.data = j.at("target_q1").get<std::vector<double>>();
    critics.target_q2.data = j.at("target_q2").get<std::vector<double>>();
    return critics;
}

struct Checkpoint {
    std::string algo;  // "rdsac" or "sac"
    rdsac::PolicyBundle policy;      // valid when algo == "rdsac"
    rdsac::GaussianPolicy gaussian;  // valid when algo == "sac"
    rdsac::CriticPair critics;
};

inline void save(const std::string& path, const Checkpoint& ckpt) {
    json doc{{"version", kVersion}, {"algo", ckpt.algo}, {"critics", critics_to_json(ckpt.critics)}};
    if (ckpt.algo == "rdsac")
        doc["policy"] = policy_to_json(ckpt.policy);
    else if (ckpt.algo == "sac")
        doc["policy"] = gaussian_to_json(ckpt.gaussian);
    else
        throw std::invalid_argument("checkpoint: unknown algo '" + ckpt.algo + "'");
    io::write_text_file(path, doc.dump(2));
}

inline Checkpoint load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("checkpoint: cannot open '" + path + "'");
    json doc;
    in >> doc;
    if (!doc.contains("version") || doc["version"].get<int>() != kVersion)
        throw std::runtime_error("checkpoint: version mismatch in '" + path + "' (expected " +
                                 std::to_string(kVersion) + ")");
    Checkpoint ckpt;
    ckpt.algo = doc.at("algo").get<std::string>();
    ckpt.critics = critics_from_json(doc.at("critics"));
    if (ckpt.algo == "rdsac")
        ckpt.policy = policy_from_json(doc.at("policy"));
    else if (ckpt.algo == "sac")
        ckpt.gaussian = gaussian_from_json(doc.at("policy"));
    else
        throw std::runtime_error("checkpoint: unknown algo '" + ckpt.algo + "'");
    return ckpt;
}

}  // namespace covertsem::checkpoint
