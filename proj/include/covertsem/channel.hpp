#pragma once

// Air-to-ground probabilistic channel, SINR, packet error rate, and the
// warden's power-detection / covertness model.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace covertsem::channel {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

struct ChannelEnv {
    double env_a = 9.61;             // S-curve constant a (urban default)
    double env_b = 0.16;             // S-curve constant b (urban default)
    double carrier_hz = 2.0e9;       // f_c
    double light_speed_mps = 3.0e8;  // c
    double atten_los = 1.0;          // beta^LoS
    double atten_nlos = 20.0;        // beta^NLoS
    double noise_bs_w = 1e-10;       // sigma^2_BS
    double noise_willie_w = 1e-10;   // sigma^2_w

    void validate() const {
        if (!(env_a > 0.0) || !(env_b > 0.0)) throw std::invalid_argument("ChannelEnv: S-curve constants must be positive");
        if (!(atten_los > 0.0) || atten_nlos < atten_los) throw std::invalid_argument("ChannelEnv: need atten_nlos >= atten_los > 0");
        if (!(noise_bs_w > 0.0) || !(noise_willie_w > 0.0)) throw std::invalid_argument("ChannelEnv: noise variances must be positive");
        if (!(carrier_hz > 0.0)) throw std::invalid_argument("ChannelEnv: carrier frequency must be positive");
    }
};

struct LinkGeometry {
    double horiz_dist_m = 100.0;  // d
    double altitude_m = 100.0;    // h
    double tx_power_w = 0.1;      // P

    void validate() const {
        if (horiz_dist_m < 0.0) throw std::invalid_argument("LinkGeometry: horizontal distance must be nonnegative");
        if (!(altitude_m > 0.0)) throw std::invalid_argument("LinkGeometry: altitude must be positive");
        if (tx_power_w < 0.0) throw std::invalid_argument("LinkGeometry: transmit power must be nonnegative");
    }
};

enum class ThresholdMode { Fixed, UniformRange };

struct DetectionConfig {
    ThresholdMode mode = ThresholdMode::UniformRange;
    double threshold_w = 0.0;  // Fixed mode
    double lo_w = 0.0;         // UniformRange mode
    double hi_w = 0.0;
    double prior_h0 = 0.5;
    double prior_h1 = 0.5;

    void validate() const {
        if (std::abs(prior_h0 + prior_h1 - 1.0) > 1e-12) throw std::invalid_argument("DetectionConfig: priors must sum to 1");
        if (mode == ThresholdMode::Fixed && threshold_w < 0.0) throw std::invalid_argument("DetectionConfig: threshold must be nonnegative");
        if (mode == ThresholdMode::UniformRange && !(lo_w < hi_w)) throw std::invalid_argument("DetectionConfig: uniform range needs lo < hi");
    }
};

struct PerConfig {
    double mod_c = 1.0;          // modulation constant C
    double mod_beta = 0.5;       // modulation constant beta
    double packet_bits = 1024.0; // N; kept real-valued since it only enters through ln(C*N)

    void validate() const {
        if (!(mod_c > 0.0) || !(mod_beta > 0.0)) throw std::invalid_argument("PerConfig: modulation constants must be positive");
        if (packet_bits < 1.0) throw std::invalid_argument("PerConfig: packet_bits must be >= 1");
        if (!(mod_c * packet_bits > 1.0)) throw std::invalid_argument("PerConfig: need C*N > 1 so ln(CN) > 0");
    }
};

inline double elevation_angle(const LinkGeometry& geom) {
    if (geom.horiz_dist_m == 0.0) return kPi / 2.0;
    return std::atan(geom.altitude_m / geom.horiz_dist_m);
}

inline double los_probability(double angle_rad, const ChannelEnv& env) {
    const double deg = 180.0 / kPi * angle_rad;
    return 1.0 / (1.0 + env.env_a * std::exp(-env.env_b * (deg - env.env_a)));
}

inline double dist3d(const LinkGeometry& geom) {
    return std::hypot(geom.horiz_dist_m, geom.altitude_m);
}

enum class LinkCondition { LoS, NLoS };

inline double path_loss(double dist3d_m, const ChannelEnv& env, LinkCondition cond) {
    if (!(dist3d_m > 0.0)) throw std::domain_error("path_loss: degenerate geometry (distance must be positive)");
    const double free_space = 4.0 * kPi * env.carrier_hz * dist3d_m / env.light_speed_mps;
    const double atten = (cond == LinkCondition::LoS) ? env.atten_los : env.atten_nlos;
    return free_space * free_space * atten;
}

// LoS/NLoS-weighted path loss. Channel power gain is taken as the
// reciprocal of this value when computing received power.
inline double expected_channel_gain(const LinkGeometry& geom, const ChannelEnv& env) {
    const double d3 = dist3d(geom);
    const double p_los = los_probability(elevation_angle(geom), env);
    const double h_los = path_loss(d3, env, LinkCondition::LoS);
    const double h_nlos = path_loss(d3, env, LinkCondition::NLoS);
    return h_los * p_los + h_nlos * (1.0 - p_los);
}

inline double received_power_w(const LinkGeometry& geom, const ChannelEnv& env) {
    return geom.tx_power_w / expected_channel_gain(geom, env);
}

inline double sinr(double signal_w, double interference_w, double noise_w) {
    if (!(noise_w > 0.0)) throw std::invalid_argument("sinr: noise power must be positive");
    return signal_w / (interference_w + noise_w);
}

inline double snr_db_to_linear(double snr_db) { return std::pow(10.0, snr_db / 10.0); }

namespace detail {

// Lanczos approximation of ln Gamma (g = 7, 9 coefficients). Relative error
// well under 1e-10 on the (1, 3] range exercised by the PER formula and
// stays accurate for the larger arguments reached at low SINR.
inline double lanczos_lgamma(double x) {
    static constexpr double kCoef[9] = {
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    };
    static constexpr double kG = 7.0;
    if (!(x > 0.0)) throw std::domain_error("lanczos_lgamma: argument must be positive");
    if (x < 0.5) {
        // reflection, only hit by direct gamma() callers
        return std::log(kPi / std::sin(kPi * x)) - lanczos_lgamma(1.0 - x);
    }
    const double z = x - 1.0;
    double a = kCoef[0];
    for (int i = 1; i < 9; ++i) a += kCoef[i] / (z + static_cast<double>(i));
    const double t = z + kG + 0.5;
    return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(a);
}

inline double lanczos_gamma(double x) { return std::exp(lanczos_lgamma(x)); }

// log of exp(-ln(CN)/(beta*ups)) * Gamma(1 + 1/(beta*ups))
inline double log_packet_success(double ups, const PerConfig& cfg) {
    if (!(ups > 0.0)) throw std::domain_error("packet_error_rate: SINR must be positive");
    const double y = 1.0 / (cfg.mod_beta * ups);
    return lanczos_lgamma(1.0 + y) - std::log(cfg.mod_c * cfg.packet_bits) * y;
}

}  // namespace detail

// 1 - exp(-ln(CN)/(beta*Ups)) * Gamma(1 + 1/(beta*Ups)), evaluated in log
// space and clamped to [0,1]. The underlying approximation leaves [0,1] for
// beta*Ups below roughly 1/(CN); the clamp keeps the result a probability.
inline double packet_error_rate(double ups, const PerConfig& cfg) {
    const double z = detail::log_packet_success(ups, cfg);
    if (z >= 0.0) return 0.0;
    return std::clamp(-std::expm1(z), 0.0, 1.0);
}

// 1 - PER computed directly; preserves precision when PER is close to 1.
inline double packet_success_rate(double ups, const PerConfig& cfg) {
    const double z = detail::log_packet_success(ups, cfg);
    return std::clamp(std::exp(z), 0.0, 1.0);
}

// Willie's detection probability for a fixed threshold under equal priors:
// 1 when the threshold lies inside [noise, rx + noise] (boundary inclusive),
// 0.5 otherwise.
inline double detection_epsilon(double threshold_w, double noise_willie_w, double rx_power_w) {
    if (threshold_w < 0.0 || noise_willie_w < 0.0 || rx_power_w < 0.0)
        throw std::invalid_argument("detection_epsilon: inputs must be nonnegative");
    return (noise_willie_w <= threshold_w && threshold_w <= rx_power_w + noise_willie_w) ? 1.0 : 0.5;
}

// Covert probability eps0 = 1 - Pr{eps = 1}. Fixed mode maps the single
// threshold through detection_epsilon; UniformRange treats the threshold as
// uniform on [lo, hi] and measures the overlap with the detection band.
inline double covert_probability(const DetectionConfig& cfg, double noise_willie_w, double rx_power_w) {
    cfg.validate();
    const double band_lo = noise_willie_w;
    const double band_hi = rx_power_w + noise_willie_w;
    if (cfg.mode == ThresholdMode::Fixed) {
        return detection_epsilon(cfg.threshold_w, noise_willie_w, rx_power_w) == 1.0 ? 0.0 : 1.0;
    }
    const double overlap = std::max(0.0, std::min(band_hi, cfg.hi_w) - std::max(band_lo, cfg.lo_w));
    return 1.0 - overlap / (cfg.hi_w - cfg.lo_w);
}

}  // namespace covertsem::channel
