#pragma once

// Gaussian-policy soft actor-critic baseline on the same critic/optimizer
// substrate and environment as the diffusion policy. The squashed-Gaussian
// head provides an exact per-sample log-density for its entropy term.

#include <cmath>
#include <vector>

#include "covertsem/rdsac.hpp"

namespace covertsem::rdsac {

struct GaussianPolicy {
    neural::NetSpec spec;  // input state, output [mu(K), log-std pre-squash(K)]
    neural::ParamSet params;
    int state_dim = 0;
    int action_dim = 0;
    double log_std_min = -5.0;
    double log_std_max = 2.0;
};

inline GaussianPolicy make_gaussian_policy(int state_dim, int action_dim,
                                           const std::vector<int>& hidden, std::uint64_t seed) {
    GaussianPolicy policy;
    policy.state_dim = state_dim;
    policy.action_dim = action_dim;
    policy.spec.layer_sizes.push_back(state_dim);
    for (int h : hidden) policy.spec.layer_sizes.push_back(h);
    policy.spec.layer_sizes.push_back(2 * action_dim);
    policy.spec.hidden_act = neural::Act::SiLU;
    policy.spec.final_act = neural::Act::None;
    policy.params = neural::init_params(policy.spec, seed);
    return policy;
}

struct GaussianSample {
    std::vector<double> action;   // tanh-squashed
    std::vector<double> xi;       // standard normal draws
    std::vector<double> mu;
    std::vector<double> log_std;  // after the smooth clamp
    std::vector<double> dls_dz;   // clamp derivative at the raw head output
    double log_prob = 0.0;
    neural::ForwardCache cache;
};

namespace detail {

// smooth log-std clamp: lo + (hi - lo) * (tanh(z) + 1) / 2
inline double soft_clamp(double z, double lo, double hi, double* deriv) {
    const double t = std::tanh(z);
    if (deriv) *deriv = 0.5 * (hi - lo) * (1.0 - t * t);
    return lo + 0.5 * (hi - lo) * (t + 1.0);
}

inline constexpr double kLogTwoPi = 1.8378770664093453;
inline constexpr double kTanhEps = 1e-6;

}  // namespace detail

inline GaussianSample gaussian_sample(const GaussianPolicy& policy,
                                      const std::vector<double>& state_enc, Rng* rng,
                                      bool deterministic = false) {
    GaussianSample s;
    neural::forward_cached(policy.spec, policy.params, state_enc, s.cache);
    const std::vector<double>& head = s.cache.acts.back();
    const int k = policy.action_dim;
    s.action.resize(k);
    s.xi.resize(k);
    s.mu.resize(k);
    s.log_std.resize(k);
    s.dls_dz.resize(k);
    s.log_prob = 0.0;
    for (int i = 0; i < k; ++i) {
        s.mu[i] = head[i];
        s.log_std[i] = detail::soft_clamp(head[k + i], policy.log_std_min, policy.log_std_max,
                                          &s.dls_dz[i]);
        const double sigma = std::exp(s.log_std[i]);
        s.xi[i] = deterministic ? 0.0 : rng->normal();
        const double pre = s.mu[i] + sigma * s.xi[i];
        s.action[i] = std::tanh(pre);
        s.log_prob += -0.5 * s.xi[i] * s.xi[i] - 0.5 * detail::kLogTwoPi - s.log_std[i] -
                      std::log(1.0 - s.action[i] * s.action[i] + detail::kTanhEps);
    }
    return s;
}

struct SacLossResult {
    double loss = 0.0;
    neural::ParamSet grad;
};

// Policy loss mean(alpha * log pi - min Q(s, a)) with reparameterized
// gradients through both the action and the density parameters.
inline SacLossResult sac_policy_loss(const GaussianPolicy& policy, const CriticPair& critics,
                                     const BatchView& batch, double alpha, Rng& rng) {
    if (batch.size() == 0) throw std::invalid_argument("sac_policy_loss: empty batch");
    SacLossResult out;
    out.grad = neural::zeros_like(policy.spec);
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    const int k = policy.action_dim;

    neural::ForwardCache critic_cache;
    neural::ParamSet critic_grad = neural::zeros_like(critics.spec);
    std::vector<double> dq(1, 1.0);
    std::vector<double> d_head(2 * k);
    for (std::size_t b = 0; b < batch.size(); ++b) {
        const env::Transition& tr = batch[b];
        GaussianSample s = gaussian_sample(policy, tr.state, &rng);

        const auto input = critic_input(tr.state, s.action);
        const double q1 = neural::forward(critics.spec, critics.q1, input)[0];
        const double q2 = neural::forward(critics.spec, critics.q2, input)[0];
        const neural::ParamSet& chosen = (q1 <= q2) ? critics.q1 : critics.q2;
        out.loss += (alpha * s.log_prob - std::min(q1, q2)) * inv_b;

        neural::forward_cached(critics.spec, chosen, input, critic_cache);
        critic_grad.zero();
        const auto d_input = neural::backward(critics.spec, chosen, critic_cache, dq, critic_grad);

        for (int i = 0; i < k; ++i) {
            const double a = s.action[i];
            const double sigma = std::exp(s.log_std[i]);
            // dL/da from the critic and from the tanh correction in log pi
            const double dl_da =
                inv_b * (alpha * 2.0 * a / (1.0 - a * a + detail::kTanhEps) -
                         d_input[policy.state_dim + i]);
            const double dl_dpre = dl_da * (1.0 - a * a);
            d_head[i] = dl_dpre;  // d pre / d mu = 1
            // d pre / d log_std = sigma * xi; explicit -alpha/B from the -log_std term
            d_head[k + i] = (dl_dpre * sigma * s.xi[i] - inv_b * alpha) * s.dls_dz[i];
        }
        neural::backward(policy.spec, policy.params, s.cache, d_head, out.grad);
    }
    if (!std::isfinite(out.loss)) throw std::runtime_error("sac_policy_loss: non-finite loss");
    return out;
}

// Bellman residual with the entropy-augmented soft target
// y = scale*r + gamma(1-d)(min Q_bar(s', a') - alpha log pi(a'|s')).
inline CriticLossResult sac_critic_loss(const CriticPair& critics, const GaussianPolicy& policy,
                                        const BatchView& batch, const TrainConfig& cfg, Rng& rng) {
    if (batch.size() == 0) throw std::invalid_argument("sac_critic_loss: empty batch");
    CriticLossResult out;
    out.grad_q1 = neural::zeros_like(critics.spec);
    out.grad_q2 = neural::zeros_like(critics.spec);
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    neural::ForwardCache cache;
    std::vector<double> dout(1);
    for (std::size_t b = 0; b < batch.size(); ++b) {
        const env::Transition& tr = batch[b];
        double target = cfg.reward_scale * tr.reward;
        if (tr.done < 0.5) {
            const GaussianSample next = gaussian_sample(policy, tr.next_state, &rng);
            const double t1 = critic_value(critics, critics.target_q1, tr.next_state, next.action);
            const double t2 = critic_value(critics, critics.target_q2, tr.next_state, next.action);
            target += cfg.gamma * (std::min(t1, t2) - cfg.sac_alpha * next.log_prob);
        }
        const auto input = critic_input(tr.state, tr.action);
        for (int m = 0; m < 2; ++m) {
            const neural::ParamSet& params = (m == 0) ? critics.q1 : critics.q2;
            neural::ParamSet& grad = (m == 0) ? out.grad_q1 : out.grad_q2;
            neural::forward_cached(critics.spec, params, input, cache);
            const double diff = cache.acts.back()[0] - target;
            out.loss += diff * diff * inv_b;
            dout[0] = 2.0 * diff * inv_b;
            neural::backward(critics.spec, params, cache, dout, grad);
        }
    }
    if (!std::isfinite(out.loss)) throw std::runtime_error("sac_critic_loss: non-finite loss");
    return out;
}

struct SacTrainResult {
    GaussianPolicy policy;
    CriticPair critics;
    std::vector<CurveRow> curve;
    std::vector<env::Transition> transitions;  // populated when log_transitions is set
};

inline SacTrainResult sac_train(const EnvSetup& setup, const TrainConfig& cfg, std::uint64_t seed) {
    setup.ranges.validate();
    setup.econ.validate();
    cfg.validate();

    const int sdim = env::state_dim(setup.ranges);
    const int adim = setup.ranges.k_count;
    SacTrainResult result;
    result.policy = make_gaussian_policy(sdim, adim, cfg.hidden, derive_seed(seed, kStreamSacInit));
    result.critics = make_critics(sdim, adim, cfg.hidden, derive_seed(seed, kStreamCriticInit));

    neural::OptState opt_policy = neural::OptState::for_params(result.policy.params, cfg.lr_actor);
    neural::OptState opt_q1 = neural::OptState::for_params(result.critics.q1, cfg.lr_critic);
    neural::OptState opt_q2 = neural::OptState::for_params(result.critics.q2, cfg.lr_critic);

    Rng env_rng(derive_seed(seed, kStreamEnv));
    Rng rollout_rng(derive_seed(seed, kStreamRollout));
    Rng update_rng(derive_seed(seed, kStreamUpdate));

    ReplayBuffer buffer(cfg.buffer_capacity);
    env::MdpState state = env::sample_state(setup.ranges, env_rng);

    for (int episode = 1; episode <= cfg.episodes; ++episode) {
        double reward_sum = 0.0;
        int feasible = 0;
        for (int n = 0; n < cfg.steps_per_episode; ++n) {
            const auto enc = env::encode_state(state, setup.ranges);
            const GaussianSample s = gaussian_sample(result.policy, enc, &rollout_rng);
            const auto action = env::make_action(s.action, setup.ranges.q_max);
            const env::StepResult res =
                env::step(state, action, setup.ranges, setup.econ, setup.mode, env_rng);
            env::Transition tr{enc, s.action, res.reward,
                               env::encode_state(res.next_state, setup.ranges), res.done};
            if (cfg.log_transitions) result.transitions.push_back(tr);
            buffer.push(std::move(tr));
            reward_sum += res.reward;
            if (is_nondecreasing(action.q)) ++feasible;
            state = res.next_state;
        }

        CurveRow row;
        row.episode = episode;
        row.mean_reward = reward_sum / cfg.steps_per_episode;
        row.feasibility_rate = static_cast<double>(feasible) / cfg.steps_per_episode;

        if (buffer.size() >= static_cast<std::size_t>(cfg.batch)) {
            BatchView batch;
            for (std::size_t idx : buffer.sample_indices(update_rng, cfg.batch))
                batch.items.push_back(&buffer[idx]);

            const CriticLossResult closs =
                sac_critic_loss(result.critics, result.policy, batch, cfg, update_rng);
            neural::optimizer_step(result.critics.q1, closs.grad_q1, opt_q1);
            neural::optimizer_step(result.critics.q2, closs.grad_q2, opt_q2);

            const SacLossResult aloss =
                sac_policy_loss(result.policy, result.critics, batch, cfg.sac_alpha, update_rng);
            neural::optimizer_step(result.policy.params, aloss.grad, opt_policy);

            neural::soft_update(result.critics.target_q1, result.critics.q1, cfg.tau);
            neural::soft_update(result.critics.target_q2, result.critics.q2, cfg.tau);

            row.critic_loss = closs.loss;
            row.actor_loss = aloss.loss;
        }
        result.curve.push_back(row);
    }
    return result;
}

inline EvalResult sac_evaluate(const GaussianPolicy& policy, const EnvSetup& setup, int n_states,
                               std::uint64_t seed) {
    if (n_states < 1) throw std::invalid_argument("sac_evaluate: n_states must be >= 1");
    Rng env_rng(derive_seed(seed, kStreamEval));
    std::vector<double> rewards(n_states);
    for (int i = 0; i < n_states; ++i) {
        const env::MdpState state = env::sample_state(setup.ranges, env_rng);
        const auto enc = env::encode_state(state, setup.ranges);
        const GaussianSample s = gaussian_sample(policy, enc, nullptr, true);
        Rng scratch(0);
        rewards[i] =
            env::step(state, env::make_action(s.action, setup.ranges.q_max), setup.ranges,
                      setup.econ, setup.mode, scratch)
                .reward;
    }
    EvalResult out;
    for (double r : rewards) out.mean += r;
    out.mean /= n_states;
    double var = 0.0;
    for (double r : rewards) var += (r - out.mean) * (r - out.mean);
    out.stddev = std::sqrt(var / n_states);
    return out;
}

}  // namespace covertsem::rdsac
