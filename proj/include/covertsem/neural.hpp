#pragma once

// Minimal feedforward network substrate for the policy and critics: forward
// pass with caching, exact reverse-mode gradients (checked against finite
// differences in the test suite), Adam-style optimizer, soft target updates,
// and the sinusoidal diffusion-step embedding.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "covertsem/rng.hpp"

namespace covertsem::neural {

enum class Act { SiLU, Tanh, None };

inline double activate(Act act, double x) {
    switch (act) {
        case Act::SiLU: return x / (1.0 + std::exp(-x));
        case Act::Tanh: return std::tanh(x);
        case Act::None: return x;
    }
    return x;
}

inline double activate_deriv(Act act, double x) {
    switch (act) {
        case Act::SiLU: {
            const double s = 1.0 / (1.0 + std::exp(-x));
            return s * (1.0 + x * (1.0 - s));
        }
        case Act::Tanh: {
            const double t = std::tanh(x);
            return 1.0 - t * t;
        }
        case Act::None: return 1.0;
    }
    return 1.0;
}

struct NetSpec {
    std::vector<int> layer_sizes;  // input, hidden..., output widths
    Act hidden_act = Act::SiLU;
    Act final_act = Act::None;

    int input_dim() const { return layer_sizes.front(); }
    int output_dim() const { return layer_sizes.back(); }
    int num_layers() const { return static_cast<int>(layer_sizes.size()) - 1; }

    std::size_t param_count() const {
        std::size_t n = 0;
        for (int l = 0; l < num_layers(); ++l)
            n += static_cast<std::size_t>(layer_sizes[l + 1]) * (layer_sizes[l] + 1);
        return n;
    }

    void validate() const {
        if (layer_sizes.size() < 2) throw std::invalid_argument("NetSpec: need at least input and output layers");
        for (int w : layer_sizes)
            if (w < 1) throw std::invalid_argument("NetSpec: layer widths must be >= 1");
    }

    bool operator==(const NetSpec&) const = default;
};

// Flat parameter storage, layer by layer: W (row-major, out x in) then bias.
struct ParamSet {
    std::vector<double> data;

    void zero() { std::fill(data.begin(), data.end(), 0.0); }
    bool finite() const {
        for (double x : data)
            if (!std::isfinite(x)) return false;
        return true;
    }
};

inline ParamSet zeros_like(const NetSpec& spec) {
    ParamSet p;
    p.data.assign(spec.param_count(), 0.0);
    return p;
}

// Uniform fan-in initialization: U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
inline ParamSet init_params(const NetSpec& spec, std::uint64_t seed) {
    spec.validate();
    Rng rng(seed);
    ParamSet p = zeros_like(spec);
    std::size_t off = 0;
    for (int l = 0; l < spec.num_layers(); ++l) {
        const int in = spec.layer_sizes[l];
        const int out = spec.layer_sizes[l + 1];
        const double bound = 1.0 / std::sqrt(static_cast<double>(in));
        for (int i = 0; i < out * in; ++i) p.data[off + i] = rng.uniform(-bound, bound);
        off += static_cast<std::size_t>(out) * in;
        for (int i = 0; i < out; ++i) p.data[off + i] = rng.uniform(-bound, bound);
        off += out;
    }
    return p;
}

struct ForwardCache {
    std::vector<std::vector<double>> acts;  // acts[0] = input, acts[l+1] = layer l output
    std::vector<std::vector<double>> pre;   // pre[l] = layer l pre-activation
};

inline void forward_cached(const NetSpec& spec, const ParamSet& params,
                           std::span<const double> input, ForwardCache& cache) {
    if (static_cast<int>(input.size()) != spec.input_dim())
        throw std::invalid_argument("forward: input size " + std::to_string(input.size()) +
                                    " != spec input dim " + std::to_string(spec.input_dim()));
    if (params.data.size() != spec.param_count())
        throw std::invalid_argument("forward: parameter count mismatch");

    const int layers = spec.num_layers();
    cache.acts.resize(layers + 1);
    cache.pre.resize(layers);
    cache.acts[0].assign(input.begin(), input.end());

    std::size_t off = 0;
    for (int l = 0; l < layers; ++l) {
        const int in = spec.layer_sizes[l];
        const int out = spec.layer_sizes[l + 1];
        const double* w = params.data.data() + off;
        const double* b = w + static_cast<std::size_t>(out) * in;
        const std::vector<double>& x = cache.acts[l];
        std::vector<double>& z = cache.pre[l];
        std::vector<double>& a = cache.acts[l + 1];
        z.resize(out);
        a.resize(out);
        const Act act = (l == layers - 1) ? spec.final_act : spec.hidden_act;
        for (int i = 0; i < out; ++i) {
            double sum = b[i];
            const double* wi = w + static_cast<std::size_t>(i) * in;
            for (int j = 0; j < in; ++j) sum += wi[j] * x[j];
            z[i] = sum;
            a[i] = activate(act, sum);
        }
        off += static_cast<std::size_t>(out) * (in + 1);
    }
}

inline std::vector<double> forward(const NetSpec& spec, const ParamSet& params,
                                   std::span<const double> input) {
    ForwardCache cache;
    forward_cached(spec, params, input, cache);
    return cache.acts.back();
}

// Reverse pass: accumulates parameter gradients into `grad` (caller zeroes
// it) and returns dL/dinput for chaining through composite losses.
inline std::vector<double> backward(const NetSpec& spec, const ParamSet& params,
                                    const ForwardCache& cache, std::span<const double> d_output,
                                    ParamSet& grad) {
    const int layers = spec.num_layers();
    if (static_cast<int>(d_output.size()) != spec.output_dim())
        throw std::invalid_argument("backward: output cotangent size mismatch");
    if (grad.data.size() != spec.param_count()) grad.data.assign(spec.param_count(), 0.0);

    std::vector<double> delta(d_output.begin(), d_output.end());
    std::size_t off_end = spec.param_count();
    for (int l = layers - 1; l >= 0; --l) {
        const int in = spec.layer_sizes[l];
        const int out = spec.layer_sizes[l + 1];
        const std::size_t off = off_end - static_cast<std::size_t>(out) * (in + 1);
        const double* w = params.data.data() + off;
        double* gw = grad.data.data() + off;
        double* gb = gw + static_cast<std::size_t>(out) * in;
        const Act act = (l == layers - 1) ? spec.final_act : spec.hidden_act;

        for (int i = 0; i < out; ++i) delta[i] *= activate_deriv(act, cache.pre[l][i]);

        const std::vector<double>& x = cache.acts[l];
        std::vector<double> prev(in, 0.0);
        for (int i = 0; i < out; ++i) {
            const double d = delta[i];
            double* gwi = gw + static_cast<std::size_t>(i) * in;
            const double* wi = w + static_cast<std::size_t>(i) * in;
            for (int j = 0; j < in; ++j) {
                gwi[j] += d * x[j];
                prev[j] += d * wi[j];
            }
            gb[i] += d;
        }
        delta = std::move(prev);
        off_end = off;
    }
    return delta;
}

// Gradient of a scalar batch loss. `loss_grad` maps (sample index, output)
// to the loss contribution and fills dL/doutput for that sample.
template <typename LossGrad>
double batch_gradient(const NetSpec& spec, const ParamSet& params,
                      const std::vector<std::vector<double>>& inputs, LossGrad&& loss_grad,
                      ParamSet& grad) {
    grad.data.assign(spec.param_count(), 0.0);
    double loss = 0.0;
    ForwardCache cache;
    std::vector<double> d_out(spec.output_dim());
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        forward_cached(spec, params, inputs[i], cache);
        std::fill(d_out.begin(), d_out.end(), 0.0);
        loss += loss_grad(i, cache.acts.back(), d_out);
        backward(spec, params, cache, d_out, grad);
    }
    if (!std::isfinite(loss))
        throw std::runtime_error("batch_gradient: non-finite loss (diverged forward pass?)");
    return loss;
}

// Sinusoidal embedding of the diffusion step t/T: pairs
// (sin(pi 2^i t/T), cos(pi 2^i t/T)). Entries lie in [-1,1] and distinct
// steps map to distinct vectors for dim >= 2.
inline std::vector<double> time_embed(int t, int t_total, int dim) {
    if (t < 1 || t > t_total) throw std::invalid_argument("time_embed: t out of [1, T]");
    if (dim < 1) throw std::invalid_argument("time_embed: dim must be >= 1");
    const double tau = static_cast<double>(t) / t_total;
    std::vector<double> out(dim);
    constexpr double kPi = 3.14159265358979323846;
    double freq = kPi;
    for (int i = 0; i < dim; i += 2) {
        out[i] = std::sin(freq * tau);
        if (i + 1 < dim) out[i + 1] = std::cos(freq * tau);
        freq *= 2.0;
    }
    return out;
}

// Adam with bias correction.
struct OptState {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long step = 0;
    std::vector<double> m;
    std::vector<double> v;

    static OptState for_params(const ParamSet& params, double lr) {
        OptState opt;
        opt.lr = lr;
        opt.m.assign(params.data.size(), 0.0);
        opt.v.assign(params.data.size(), 0.0);
        return opt;
    }
};

inline void optimizer_step(ParamSet& params, const ParamSet& grads, OptState& opt) {
    if (grads.data.size() != params.data.size() || opt.m.size() != params.data.size())
        throw std::invalid_argument("optimizer_step: shape mismatch");
    if (!grads.finite()) throw std::runtime_error("optimizer_step: non-finite gradient");
    opt.step += 1;
    const double bc1 = 1.0 - std::pow(opt.beta1, static_cast<double>(opt.step));
    const double bc2 = 1.0 - std::pow(opt.beta2, static_cast<double>(opt.step));
    for (std::size_t i = 0; i < params.data.size(); ++i) {
        const double g = grads.data[i];
        opt.m[i] = opt.beta1 * opt.m[i] + (1.0 - opt.beta1) * g;
        opt.v[i] = opt.beta2 * opt.v[i] + (1.0 - opt.beta2) * g * g;
        const double m_hat = opt.m[i] / bc1;
        const double v_hat = opt.v[i] / bc2;
        params.data[i] -= opt.lr * m_hat / (std::sqrt(v_hat) + opt.eps);
    }
}

// target <- tau * online + (1 - tau) * target
inline void soft_update(ParamSet& target, const ParamSet& online, double tau) {
    if (target.data.size() != online.data.size())
        throw std::invalid_argument("soft_update: shape mismatch");
    if (tau < 0.0 || tau > 1.0) throw std::invalid_argument("soft_update: tau must lie in [0,1]");
    for (std::size_t i = 0; i < target.data.size(); ++i)
        target.data[i] = tau * online.data[i] + (1.0 - tau) * target.data[i];
}

}  // namespace covertsem::neural
