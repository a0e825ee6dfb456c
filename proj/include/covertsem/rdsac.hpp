#pragma once

// Regularized diffusion-based soft actor-critic: noise schedule, reverse
// chain action sampling (with manual backprop through the chain), double
// critics with Bellman targets, the rho-weighted actor loss combining a
// reparameterized Q term, a particle entropy bonus, and the diffusion
// (behavior-cloning) regularizer, plus the training loop.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "covertsem/environment.hpp"
#include "covertsem/neural.hpp"
#include "covertsem/rng.hpp"

namespace covertsem::rdsac {

struct DiffusionSchedule {
    int steps = 0;
    std::vector<double> delta;    // delta[t-1] for t = 1..T
    std::vector<double> chi;      // 1 - delta
    std::vector<double> chi_bar;  // prod_{i<=t} chi_i; chi_bar_0 = 1 by convention

    void validate() const {
        if (steps < 1 || static_cast<int>(delta.size()) != steps)
            throw std::invalid_argument("DiffusionSchedule: invalid step count");
        for (int t = 0; t < steps; ++t) {
            if (!(delta[t] > 0.0 && delta[t] < 1.0))
                throw std::invalid_argument("DiffusionSchedule: delta must lie in (0,1)");
            if (t > 0 && !(chi_bar[t] < chi_bar[t - 1]))
                throw std::invalid_argument("DiffusionSchedule: chi_bar must be strictly decreasing");
        }
    }
};

inline DiffusionSchedule build_schedule(int steps, double delta_lo, double delta_hi) {
    if (steps < 1) throw std::invalid_argument("build_schedule: need at least one step");
    if (!(delta_lo > 0.0) || !(delta_lo <= delta_hi) || !(delta_hi < 1.0))
        throw std::invalid_argument("build_schedule: need 0 < delta_lo <= delta_hi < 1");
    DiffusionSchedule sch;
    sch.steps = steps;
    sch.delta.resize(steps);
    sch.chi.resize(steps);
    sch.chi_bar.resize(steps);
    double prod = 1.0;
    for (int t = 0; t < steps; ++t) {
        sch.delta[t] = steps == 1 ? delta_lo
                                  : delta_lo + (delta_hi - delta_lo) * t / (steps - 1);
        sch.chi[t] = 1.0 - sch.delta[t];
        prod *= sch.chi[t];
        sch.chi_bar[t] = prod;
    }
    sch.validate();
    return sch;
}

// sqrt(chi_bar_t) * action + sqrt(1 - chi_bar_t) * noise
inline std::vector<double> forward_noise(const std::vector<double>& action, int t,
                                         const DiffusionSchedule& sch,
                                         const std::vector<double>& noise) {
    if (t < 1 || t > sch.steps) throw std::invalid_argument("forward_noise: t out of range");
    if (noise.size() != action.size()) throw std::invalid_argument("forward_noise: dimension mismatch");
    const double cb = sch.chi_bar[t - 1];
    std::vector<double> out(action.size());
    for (std::size_t i = 0; i < action.size(); ++i)
        out[i] = std::sqrt(cb) * action[i] + std::sqrt(1.0 - cb) * noise[i];
    return out;
}

struct PolicyBundle {
    neural::NetSpec spec;  // input [state, action, embed], output action-dim noise estimate
    neural::ParamSet noise_net;
    neural::ParamSet target_noise_net;
    DiffusionSchedule schedule;
    int state_dim = 0;
    int action_dim = 0;
    int embed_dim = 8;
};

inline PolicyBundle make_policy(int state_dim, int action_dim, int embed_dim,
                                const std::vector<int>& hidden, DiffusionSchedule schedule,
                                std::uint64_t seed) {
    PolicyBundle policy;
    policy.state_dim = state_dim;
    policy.action_dim = action_dim;
    policy.embed_dim = embed_dim;
    policy.schedule = std::move(schedule);
    policy.spec.layer_sizes.push_back(state_dim + action_dim + embed_dim);
    for (int h : hidden) policy.spec.layer_sizes.push_back(h);
    policy.spec.layer_sizes.push_back(action_dim);
    policy.spec.hidden_act = neural::Act::SiLU;
    policy.spec.final_act = neural::Act::None;
    policy.noise_net = neural::init_params(policy.spec, seed);
    policy.target_noise_net = policy.noise_net;
    return policy;
}

namespace detail {

inline std::vector<double> policy_input(const PolicyBundle& policy,
                                        const std::vector<double>& state_enc,
                                        const std::vector<double>& phi, int t) {
    std::vector<double> in;
    in.reserve(policy.spec.input_dim());
    in.insert(in.end(), state_enc.begin(), state_enc.end());
    in.insert(in.end(), phi.begin(), phi.end());
    const auto emb = neural::time_embed(t, policy.schedule.steps, policy.embed_dim);
    in.insert(in.end(), emb.begin(), emb.end());
    return in;
}

}  // namespace detail

// Reverse denoising chain over an arbitrary denoiser, pre-squash. A null
// rng selects the deterministic mean path: Phi^T = 0 and no per-step noise.
// The final step never adds noise.
template <typename Denoiser>
std::vector<double> reverse_chain(const DiffusionSchedule& sch, int dim, Denoiser&& denoise,
                                  Rng* rng) {
    std::vector<double> phi(dim, 0.0);
    if (rng)
        for (auto& x : phi) x = rng->normal();
    for (int t = sch.steps; t >= 1; --t) {
        const double chi = sch.chi[t - 1];
        const double delta = sch.delta[t - 1];
        const double cb = sch.chi_bar[t - 1];
        const std::vector<double> eps = denoise(phi, t);
        if (static_cast<int>(eps.size()) != dim)
            throw std::runtime_error("reverse_chain: denoiser dimension mismatch");
        const double c1 = 1.0 / std::sqrt(chi);
        const double c2 = delta / std::sqrt(1.0 - cb);
        for (int i = 0; i < dim; ++i) {
            double mu = c1 * (phi[i] - c2 * eps[i]);
            if (!std::isfinite(mu)) throw std::runtime_error("reverse_chain: non-finite chain value");
            phi[i] = mu;
        }
        if (t > 1 && rng) {
            const double sigma = std::sqrt(delta);
            for (int i = 0; i < dim; ++i) phi[i] += sigma * rng->normal();
        }
    }
    return phi;
}

inline std::vector<double> squash(const std::vector<double>& phi) {
    std::vector<double> out(phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) out[i] = std::tanh(phi[i]);
    return out;
}

// Stochastic sample from the policy's reverse chain, squashed into [-1,1].
inline std::vector<double> reverse_sample(const PolicyBundle& policy,
                                          const neural::ParamSet& params,
                                          const std::vector<double>& state_enc, Rng& rng) {
    const auto denoise = [&](const std::vector<double>& phi, int t) {
        return neural::forward(policy.spec, params, detail::policy_input(policy, state_enc, phi, t));
    };
    return squash(reverse_chain(policy.schedule, policy.action_dim, denoise, &rng));
}

// Mean-path action used for evaluation: fully deterministic.
inline std::vector<double> reverse_sample_deterministic(const PolicyBundle& policy,
                                                        const neural::ParamSet& params,
                                                        const std::vector<double>& state_enc) {
    const auto denoise = [&](const std::vector<double>& phi, int t) {
        return neural::forward(policy.spec, params, detail::policy_input(policy, state_enc, phi, t));
    };
    return squash(reverse_chain(policy.schedule, policy.action_dim, denoise, nullptr));
}

// Recorded reverse chain for reparameterized gradients: keeps every
// intermediate phi and forward cache so a loss gradient on the squashed
// output can be pulled back onto the network parameters.
struct ChainTrace {
    std::vector<std::vector<double>> phi;          // phi[t] for t = 0..T (phi[T] is the seed noise)
    std::vector<neural::ForwardCache> caches;      // caches[t-1] for the step consuming phi[t]
    std::vector<double> raw;                       // squashed output
};

inline ChainTrace sample_action_traced(const PolicyBundle& policy, const neural::ParamSet& params,
                                       const std::vector<double>& state_enc, Rng& rng) {
    const DiffusionSchedule& sch = policy.schedule;
    ChainTrace trace;
    trace.phi.resize(sch.steps + 1);
    trace.caches.resize(sch.steps);

    std::vector<double> phi(policy.action_dim);
    for (auto& x : phi) x = rng.normal();
    trace.phi[sch.steps] = phi;

    for (int t = sch.steps; t >= 1; --t) {
        neural::ForwardCache& cache = trace.caches[t - 1];
        neural::forward_cached(policy.spec, params, detail::policy_input(policy, state_enc, phi, t),
                               cache);
        const std::vector<double>& eps = cache.acts.back();
        const double c1 = 1.0 / std::sqrt(sch.chi[t - 1]);
        const double c2 = sch.delta[t - 1] / std::sqrt(1.0 - sch.chi_bar[t - 1]);
        for (int i = 0; i < policy.action_dim; ++i) phi[i] = c1 * (phi[i] - c2 * eps[i]);
        if (t > 1) {
            const double sigma = std::sqrt(sch.delta[t - 1]);
            for (int i = 0; i < policy.action_dim; ++i) phi[i] += sigma * rng.normal();
        }
        trace.phi[t - 1] = phi;
    }
    trace.raw = squash(phi);
    return trace;
}

// Pulls dL/draw back through the recorded chain, accumulating dL/domega.
// The injected noises are treated as constants (reparameterization).
inline void backprop_chain(const PolicyBundle& policy, const neural::ParamSet& params,
                           const ChainTrace& trace, const std::vector<double>& d_raw,
                           neural::ParamSet& grad) {
    const DiffusionSchedule& sch = policy.schedule;
    std::vector<double> g(policy.action_dim);
    for (int i = 0; i < policy.action_dim; ++i) {
        const double th = trace.raw[i];
        g[i] = d_raw[i] * (1.0 - th * th);  // through the tanh squash
    }
    std::vector<double> d_eps(policy.action_dim);
    for (int t = 1; t <= sch.steps; ++t) {
        const double c1 = 1.0 / std::sqrt(sch.chi[t - 1]);
        const double c2 = sch.delta[t - 1] / std::sqrt(1.0 - sch.chi_bar[t - 1]);
        for (int i = 0; i < policy.action_dim; ++i) d_eps[i] = -c1 * c2 * g[i];
        const std::vector<double> d_input =
            neural::backward(policy.spec, params, trace.caches[t - 1], d_eps, grad);
        for (int i = 0; i < policy.action_dim; ++i)
            g[i] = c1 * g[i] + d_input[policy.state_dim + i];
    }
}

struct CriticPair {
    neural::NetSpec spec;  // input [state, action], scalar output
    neural::ParamSet q1, q2, target_q1, target_q2;
};

inline CriticPair make_critics(int state_dim, int action_dim, const std::vector<int>& hidden,
                               std::uint64_t seed) {
    CriticPair critics;
    critics.spec.layer_sizes.push_back(state_dim + action_dim);
    for (int h : hidden) critics.spec.layer_sizes.push_back(h);
    critics.spec.layer_sizes.push_back(1);
    critics.spec.hidden_act = neural::Act::SiLU;
    critics.spec.final_act = neural::Act::None;
    critics.q1 = neural::init_params(critics.spec, derive_seed(seed, 1));
    critics.q2 = neural::init_params(critics.spec, derive_seed(seed, 2));
    critics.target_q1 = critics.q1;
    critics.target_q2 = critics.q2;
    return critics;
}

inline std::vector<double> critic_input(const std::vector<double>& state_enc,
                                        const std::vector<double>& action) {
    std::vector<double> in;
    in.reserve(state_enc.size() + action.size());
    in.insert(in.end(), state_enc.begin(), state_enc.end());
    in.insert(in.end(), action.begin(), action.end());
    return in;
}

inline double critic_value(const CriticPair& critics, const neural::ParamSet& params,
                           const std::vector<double>& state_enc, const std::vector<double>& action) {
    return neural::forward(critics.spec, params, critic_input(state_enc, action))[0];
}

struct TrainConfig {
    double gamma = 0.95;
    double tau = 0.005;
    double rho = 0.9;
    double beta_entropy = 0.05;
    int batch = 256;
    int episodes = 800;
    int steps_per_episode = 8;
    std::size_t buffer_capacity = 100000;
    double lr_actor = 1e-3;
    double lr_critic = 1e-3;
    int diffusion_steps = 5;
    double delta_lo = 1e-4;
    double delta_hi = 0.2;
    std::vector<int> hidden = {64, 64};
    int embed_dim = 8;
    double reward_scale = 1e-3;  // applied inside critic targets / actor Q term only
    int entropy_states = 8;
    int entropy_samples = 16;
    double sac_alpha = 0.2;
    bool log_transitions = false;  // keep every rollout transition in the result

    void validate() const {
        if (gamma < 0.0 || gamma > 1.0) throw std::invalid_argument("TrainConfig: gamma must lie in [0,1]");
        if (rho < 0.0 || rho > 1.0) throw std::invalid_argument("TrainConfig: rho must lie in [0,1]");
        if (batch < 1) throw std::invalid_argument("TrainConfig: batch must be >= 1");
        if (tau < 0.0 || tau > 1.0) throw std::invalid_argument("TrainConfig: tau must lie in [0,1]");
        if (episodes < 0 || steps_per_episode < 1) throw std::invalid_argument("TrainConfig: invalid episode counts");
        if (!(reward_scale > 0.0)) throw std::invalid_argument("TrainConfig: reward_scale must be positive");
        if (entropy_states < 0 || entropy_samples < 2) throw std::invalid_argument("TrainConfig: invalid entropy estimator sizes");
    }
};

class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
        if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
    }

    void push(env::Transition t) {
        if (data_.size() < capacity_) {
            data_.push_back(std::move(t));
        } else {
            data_[cursor_] = std::move(t);
        }
        cursor_ = (cursor_ + 1) % capacity_;
    }

    std::size_t size() const { return data_.size(); }
    const env::Transition& operator[](std::size_t i) const { return data_[i]; }

    // uniform sample of distinct indices
    std::vector<std::size_t> sample_indices(Rng& rng, std::size_t n) const {
        return rng.sample_without_replacement(data_.size(), std::min(n, data_.size()));
    }

private:
    std::size_t capacity_;
    std::size_t cursor_ = 0;
    std::vector<env::Transition> data_;
};

inline constexpr double kEntropyFloor = -50.0;

// Kozachenko-Leonenko nearest-neighbor differential entropy estimate:
// H ~= (d/m) sum_i ln rho_i + ln V_d + gamma_EM + ln(m-1).
// Duplicate-only inputs collapse to the floor constant.
inline double entropy_estimate(const std::vector<std::vector<double>>& samples,
                               std::vector<std::vector<double>>* d_samples = nullptr) {
    const std::size_t m = samples.size();
    if (m < 2) throw std::invalid_argument("entropy_estimate: need at least two samples");
    const std::size_t dim = samples[0].size();

    std::vector<std::size_t> nn(m);
    std::vector<double> rho(m);
    for (std::size_t i = 0; i < m; ++i) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_j = i;
        for (std::size_t j = 0; j < m; ++j) {
            if (j == i) continue;
            double d2 = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
                const double diff = samples[i][k] - samples[j][k];
                d2 += diff * diff;
            }
            if (d2 < best) {
                best = d2;
                best_j = j;
            }
        }
        rho[i] = std::sqrt(best);
        nn[i] = best_j;
    }

    constexpr double kEulerMascheroni = 0.57721566490153286;
    constexpr double kPi = 3.14159265358979323846;
    // ln of the unit-ball volume in dim dimensions: pi^{d/2} / Gamma(d/2 + 1)
    const double log_vd =
        0.5 * dim * std::log(kPi) - channel::detail::lanczos_lgamma(0.5 * dim + 1.0);

    double sum_log = 0.0;
    bool degenerate = false;
    for (double r : rho) {
        if (r <= 0.0) {
            degenerate = true;
            break;
        }
        sum_log += std::log(r);
    }
    if (degenerate) {
        if (d_samples) {
            d_samples->assign(m, std::vector<double>(dim, 0.0));
        }
        return kEntropyFloor;
    }

    const double h = static_cast<double>(dim) / m * sum_log + log_vd + kEulerMascheroni +
                     std::log(static_cast<double>(m - 1));
    if (h < kEntropyFloor) {
        if (d_samples) d_samples->assign(m, std::vector<double>(dim, 0.0));
        return kEntropyFloor;
    }

    if (d_samples) {
        d_samples->assign(m, std::vector<double>(dim, 0.0));
        const double scale = static_cast<double>(dim) / m;
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t j = nn[i];
            for (std::size_t k = 0; k < dim; ++k) {
                const double diff = (samples[i][k] - samples[j][k]) / (rho[i] * rho[i]);
                (*d_samples)[i][k] += scale * diff;
                (*d_samples)[j][k] -= scale * diff;
            }
        }
    }
    return h;
}

struct BatchView {
    std::vector<const env::Transition*> items;

    std::size_t size() const { return items.size(); }
    const env::Transition& operator[](std::size_t i) const { return *items[i]; }
};

struct CriticLossResult {
    double loss = 0.0;
    neural::ParamSet grad_q1;
    neural::ParamSet grad_q2;
};

// Bellman residual over both critics. Targets use the target policy's
// stochastic reverse chain on the next state and the min of the target
// critics; chain noise is drawn from `rng` in batch order.
inline CriticLossResult critic_loss(const CriticPair& critics, const PolicyBundle& policy,
                                    const BatchView& batch, const TrainConfig& cfg, Rng& rng) {
    if (batch.size() == 0) throw std::invalid_argument("critic_loss: empty batch");
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
            const auto next_action =
                reverse_sample(policy, policy.target_noise_net, tr.next_state, rng);
            const double t1 = critic_value(critics, critics.target_q1, tr.next_state, next_action);
            const double t2 = critic_value(critics, critics.target_q2, tr.next_state, next_action);
            target += cfg.gamma * std::min(t1, t2);
        }
        const auto input = critic_input(tr.state, tr.action);
        for (int m = 0; m < 2; ++m) {
            const neural::ParamSet& params = (m == 0) ? critics.q1 : critics.q2;
            neural::ParamSet& grad = (m == 0) ? out.grad_q1 : out.grad_q2;
            neural::forward_cached(critics.spec, params, input, cache);
            const double q = cache.acts.back()[0];
            const double diff = q - target;
            out.loss += diff * diff * inv_b;
            dout[0] = 2.0 * diff * inv_b;
            neural::backward(critics.spec, params, cache, dout, grad);
        }
    }
    if (!std::isfinite(out.loss)) throw std::runtime_error("critic_loss: non-finite loss");
    return out;
}

struct ActorLossResult {
    double loss = 0.0;
    double q_term = 0.0;
    double entropy_term = 0.0;
    double diffusion_term = 0.0;
    neural::ParamSet grad;
};

// L = rho * L_act + (1 - rho) * L_diff with
//   L_act  = -mean_b min(Q1,Q2)(s_b, Phi_omega(s_b)) - beta * mean_e H(s_e)
//   L_diff = mean_b || eps - eps_omega(sqrt(cb) Phi_b + sqrt(1-cb) eps, s_b, t) ||^2
// Draw order from `rng`: per-sample Q-term chains (batch order), entropy
// chains (state-major), then the diffusion (t, eps) pairs in batch order.
inline ActorLossResult actor_loss(const PolicyBundle& policy, const CriticPair& critics,
                                  const BatchView& batch, const TrainConfig& cfg, Rng& rng) {
    if (batch.size() == 0) throw std::invalid_argument("actor_loss: empty batch");
    ActorLossResult out;
    out.grad = neural::zeros_like(policy.spec);
    const double inv_b = 1.0 / static_cast<double>(batch.size());

    // Q maximization through the sampling chain
    if (cfg.rho > 0.0) {
        neural::ForwardCache critic_cache;
        neural::ParamSet critic_grad = neural::zeros_like(critics.spec);
        std::vector<double> dq(1, 1.0);
        for (std::size_t b = 0; b < batch.size(); ++b) {
            const env::Transition& tr = batch[b];
            const ChainTrace trace = sample_action_traced(policy, policy.noise_net, tr.state, rng);
            const auto input = critic_input(tr.state, trace.raw);
            const double q1 = neural::forward(critics.spec, critics.q1, input)[0];
            const double q2 = neural::forward(critics.spec, critics.q2, input)[0];
            const neural::ParamSet& chosen = (q1 <= q2) ? critics.q1 : critics.q2;
            out.q_term += std::min(q1, q2) * inv_b;

            neural::forward_cached(critics.spec, chosen, input, critic_cache);
            critic_grad.zero();
            const auto d_input = neural::backward(critics.spec, chosen, critic_cache, dq, critic_grad);
            std::vector<double> d_raw(policy.action_dim);
            for (int i = 0; i < policy.action_dim; ++i)
                d_raw[i] = -cfg.rho * inv_b * d_input[policy.state_dim + i];
            backprop_chain(policy, policy.noise_net, trace, d_raw, out.grad);
        }

        // particle entropy bonus over per-state action samples
        if (cfg.beta_entropy > 0.0 && cfg.entropy_states > 0) {
            const int n_states = std::min<std::size_t>(cfg.entropy_states, batch.size());
            std::vector<ChainTrace> traces(cfg.entropy_samples);
            std::vector<std::vector<double>> actions(cfg.entropy_samples);
            std::vector<std::vector<double>> d_actions;
            for (int e = 0; e < n_states; ++e) {
                const env::Transition& tr = batch[e];
                for (int i = 0; i < cfg.entropy_samples; ++i) {
                    traces[i] = sample_action_traced(policy, policy.noise_net, tr.state, rng);
                    actions[i] = traces[i].raw;
                }
                const double h = entropy_estimate(actions, &d_actions);
                out.entropy_term += h / n_states;
                const double coeff = -cfg.rho * cfg.beta_entropy / n_states;
                for (int i = 0; i < cfg.entropy_samples; ++i) {
                    std::vector<double> d_raw(policy.action_dim);
                    for (int k = 0; k < policy.action_dim; ++k) d_raw[k] = coeff * d_actions[i][k];
                    backprop_chain(policy, policy.noise_net, traces[i], d_raw, out.grad);
                }
            }
        }
    }

    // diffusion regularization: denoising residual on buffer actions
    if (cfg.rho < 1.0) {
        neural::ForwardCache cache;
        std::vector<double> dout(policy.action_dim);
        for (std::size_t b = 0; b < batch.size(); ++b) {
            const env::Transition& tr = batch[b];
            const int t = static_cast<int>(rng.choice(policy.schedule.steps)) + 1;
            const auto eps = rng.normal_vec(policy.action_dim);
            const auto noisy = forward_noise(tr.action, t, policy.schedule, eps);
            neural::forward_cached(policy.spec, policy.noise_net,
                                   detail::policy_input(policy, tr.state, noisy, t), cache);
            const auto& pred = cache.acts.back();
            double sample_loss = 0.0;
            for (int i = 0; i < policy.action_dim; ++i) {
                const double diff = pred[i] - eps[i];
                sample_loss += diff * diff;
                dout[i] = (1.0 - cfg.rho) * inv_b * 2.0 * diff;
            }
            out.diffusion_term += sample_loss * inv_b;
            neural::backward(policy.spec, policy.noise_net, cache, dout, out.grad);
        }
    }

    const double l_act = -out.q_term - cfg.beta_entropy * out.entropy_term;
    out.loss = cfg.rho * l_act + (1.0 - cfg.rho) * out.diffusion_term;
    if (!std::isfinite(out.loss)) throw std::runtime_error("actor_loss: non-finite loss");
    return out;
}

struct EnvSetup {
    env::EnvRanges ranges;
    contract::EconParams econ;
    contract::UtilityMode mode;  // nullopt = EUT
};

struct CurveRow {
    int episode = 0;
    double mean_reward = 0.0;
    double critic_loss = 0.0;
    double actor_loss = 0.0;
    double feasibility_rate = 0.0;
};

struct TrainResult {
    PolicyBundle policy;
    CriticPair critics;
    std::vector<CurveRow> curve;
    std::vector<env::Transition> transitions;  // populated when log_transitions is set
};

// RNG stream labels under the master seed.
enum Stream : std::uint64_t {
    kStreamEnv = 1,
    kStreamPolicyInit = 2,
    kStreamCriticInit = 3,
    kStreamRollout = 4,
    kStreamUpdate = 5,
    kStreamEval = 6,
    kStreamSacInit = 7,
};

inline bool is_nondecreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] < v[i - 1]) return false;
    return true;
}

inline TrainResult train(const EnvSetup& setup, const TrainConfig& cfg, std::uint64_t seed) {
    setup.ranges.validate();
    setup.econ.validate();
    cfg.validate();

    const int sdim = env::state_dim(setup.ranges);
    const int adim = setup.ranges.k_count;
    TrainResult result;
    result.policy = make_policy(sdim, adim, cfg.embed_dim, cfg.hidden,
                                build_schedule(cfg.diffusion_steps, cfg.delta_lo, cfg.delta_hi),
                                derive_seed(seed, kStreamPolicyInit));
    result.critics = make_critics(sdim, adim, cfg.hidden, derive_seed(seed, kStreamCriticInit));

    neural::OptState opt_policy = neural::OptState::for_params(result.policy.noise_net, cfg.lr_actor);
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
            const auto raw = reverse_sample(result.policy, result.policy.noise_net, enc, rollout_rng);
            const auto action = env::make_action(raw, setup.ranges.q_max);
            const env::StepResult res =
                env::step(state, action, setup.ranges, setup.econ, setup.mode, env_rng);
            env::Transition tr{enc, raw, res.reward,
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
                critic_loss(result.critics, result.policy, batch, cfg, update_rng);
            neural::optimizer_step(result.critics.q1, closs.grad_q1, opt_q1);
            neural::optimizer_step(result.critics.q2, closs.grad_q2, opt_q2);

            const ActorLossResult aloss =
                actor_loss(result.policy, result.critics, batch, cfg, update_rng);
            neural::optimizer_step(result.policy.noise_net, aloss.grad, opt_policy);

            neural::soft_update(result.policy.target_noise_net, result.policy.noise_net, cfg.tau);
            neural::soft_update(result.critics.target_q1, result.critics.q1, cfg.tau);
            neural::soft_update(result.critics.target_q2, result.critics.q2, cfg.tau);

            row.critic_loss = closs.loss;
            row.actor_loss = aloss.loss;
        }
        result.curve.push_back(row);
    }
    return result;
}

struct EvalResult {
    double mean = 0.0;
    double stddev = 0.0;
};

// Deterministic mean-path evaluation over freshly sampled states.
inline EvalResult evaluate(const PolicyBundle& policy, const EnvSetup& setup, int n_states,
                           std::uint64_t seed) {
    if (n_states < 1) throw std::invalid_argument("evaluate: n_states must be >= 1");
    Rng env_rng(derive_seed(seed, kStreamEval));
    std::vector<double> rewards(n_states);
    for (int i = 0; i < n_states; ++i) {
        const env::MdpState state = env::sample_state(setup.ranges, env_rng);
        const auto enc = env::encode_state(state, setup.ranges);
        const auto raw = reverse_sample_deterministic(policy, policy.noise_net, enc);
        Rng scratch(0);  // next-state draw unused
        rewards[i] =
            env::step(state, env::make_action(raw, setup.ranges.q_max), setup.ranges, setup.econ,
                      setup.mode, scratch)
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
