#pragma once

// Synthetic scenes with ground-truth semantic masks, the three-level
// abstraction hierarchy, single-scale SSIM, and the covert semantic
// information density metric Q.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "covertsem/rng.hpp"

namespace covertsem::semantics {

struct Image {
    int height = 0;
    int width = 0;
    std::vector<double> pix;  // row-major luminance in [0,1]

    Image() = default;
    Image(int h, int w, double fill = 0.0)
        : height(h), width(w), pix(static_cast<std::size_t>(h) * w, fill) {}

    double& at(int i, int j) { return pix[static_cast<std::size_t>(i) * width + j]; }
    double at(int i, int j) const { return pix[static_cast<std::size_t>(i) * width + j]; }
    bool same_shape(const Image& other) const { return height == other.height && width == other.width; }
};

struct Scene {
    Image image;
    std::vector<std::uint8_t> mask;  // 1 = task-critical, same row-major layout

    std::uint8_t mask_at(int i, int j) const { return mask[static_cast<std::size_t>(i) * image.width + j]; }
};

enum class Level { G1, G2, G3 };

struct AbstractionLevel {
    Level level = Level::G3;
    int kappa = 4;  // downsample factor, used by G2 only

    void validate() const {
        if (kappa < 2) throw std::invalid_argument("AbstractionLevel: kappa must be >= 2");
    }
};

struct SemanticConfig {
    double p_base = 0.1;       // baseline task error rate
    double sens_lambda = 5.0;  // task sensitivity
    double alpha_scale = 100.0;
    double payload_l = 1.0;

    void validate() const {
        if (!(p_base > 0.0 && p_base < 1.0)) throw std::invalid_argument("SemanticConfig: p_base must lie in (0,1)");
        if (sens_lambda < 0.0) throw std::invalid_argument("SemanticConfig: sens_lambda must be nonnegative");
        if (!(alpha_scale > 0.0)) throw std::invalid_argument("SemanticConfig: alpha_scale must be positive");
        if (!(payload_l > 0.0)) throw std::invalid_argument("SemanticConfig: payload_l must be positive");
    }
};

// Procedurally generated scene: filled shapes (task-critical) over a smooth
// textured background. Masks are ground truth by construction; shape centers
// keep a margin so the border always stays background.
inline Scene generate_scene(std::uint64_t seed, int height, int width, int n_objects) {
    if (height < 32 || width < 32)
        throw std::invalid_argument("generate_scene: dimensions must be >= 32 (SSIM window)");
    if (n_objects < 1) throw std::invalid_argument("generate_scene: n_objects must be >= 1");

    Rng rng(derive_seed(seed, 0x5ce17e));
    Scene scene;
    scene.image = Image(height, width);
    scene.mask.assign(static_cast<std::size_t>(height) * width, 0);

    const double f1 = rng.uniform(1.0, 4.0), p1 = rng.uniform(0.0, 1.0);
    const double f2 = rng.uniform(1.0, 4.0), p2 = rng.uniform(0.0, 1.0);
    const double f3 = rng.uniform(1.0, 4.0), p3 = rng.uniform(0.0, 1.0);
    constexpr double kTau = 6.283185307179586;
    for (int i = 0; i < height; ++i) {
        for (int j = 0; j < width; ++j) {
            double v = 0.35;
            v += 0.10 * std::sin(kTau * (f1 * i / height + p1)) * std::cos(kTau * (f2 * j / width + p2));
            v += 0.08 * std::sin(kTau * (f3 * (i + j) / (height + width) + p3));
            v += 0.04 * (rng.uniform() * 2.0 - 1.0);
            scene.image.at(i, j) = std::clamp(v, 0.0, 1.0);
        }
    }

    const int min_dim = std::min(height, width);
    for (int obj = 0; obj < n_objects; ++obj) {
        const int r = std::max(3, static_cast<int>(rng.uniform(min_dim / 12.0, min_dim / 6.0)));
        const int ci = r + 2 + static_cast<int>(rng.choice(static_cast<std::size_t>(std::max(1, height - 2 * r - 4))));
        const int cj = r + 2 + static_cast<int>(rng.choice(static_cast<std::size_t>(std::max(1, width - 2 * r - 4))));
        const bool disc = rng.uniform() < 0.5;
        const double base = rng.uniform(0.65, 0.95);
        for (int i = ci - r; i <= ci + r; ++i) {
            for (int j = cj - r; j <= cj + r; ++j) {
                if (i < 0 || i >= height || j < 0 || j >= width) continue;
                const double di = i - ci, dj = j - cj;
                if (disc && di * di + dj * dj > static_cast<double>(r) * r) continue;
                const double shade = base - 0.15 * (di + dj) / (2.0 * r);
                scene.image.at(i, j) = std::clamp(shade, 0.0, 1.0);
                scene.mask[static_cast<std::size_t>(i) * width + j] = 1;
            }
        }
    }
    return scene;
}

// Block-average downsample by kappa (partial edge blocks averaged over their
// actual extent) followed by nearest-neighbor upsample back to H x W.
inline Image lowpass(const Image& img, int kappa) {
    if (kappa < 2) throw std::invalid_argument("lowpass: kappa must be >= 2");
    const int bh = (img.height + kappa - 1) / kappa;
    const int bw = (img.width + kappa - 1) / kappa;
    std::vector<double> block(static_cast<std::size_t>(bh) * bw, 0.0);
    for (int bi = 0; bi < bh; ++bi) {
        for (int bj = 0; bj < bw; ++bj) {
            const int i0 = bi * kappa, j0 = bj * kappa;
            const int i1 = std::min(img.height, i0 + kappa);
            const int j1 = std::min(img.width, j0 + kappa);
            double sum = 0.0;
            for (int i = i0; i < i1; ++i)
                for (int j = j0; j < j1; ++j) sum += img.at(i, j);
            block[static_cast<std::size_t>(bi) * bw + bj] = sum / ((i1 - i0) * (j1 - j0));
        }
    }
    Image out(img.height, img.width);
    for (int i = 0; i < img.height; ++i)
        for (int j = 0; j < img.width; ++j)
            out.at(i, j) = block[static_cast<std::size_t>(i / kappa) * bw + (j / kappa)];
    return out;
}

// G1: X .* M; G2: X .* M + lowpass(X) .* (1 - M); G3: X.
inline Image apply_abstraction(const Scene& scene, const AbstractionLevel& level) {
    level.validate();
    const Image& x = scene.image;
    if (level.level == Level::G3) return x;
    Image out(x.height, x.width);
    if (level.level == Level::G1) {
        for (int i = 0; i < x.height; ++i)
            for (int j = 0; j < x.width; ++j)
                out.at(i, j) = scene.mask_at(i, j) ? x.at(i, j) : 0.0;
        return out;
    }
    const Image bg = lowpass(x, level.kappa);
    for (int i = 0; i < x.height; ++i)
        for (int j = 0; j < x.width; ++j)
            out.at(i, j) = scene.mask_at(i, j) ? x.at(i, j) : bg.at(i, j);
    return out;
}

// Single-scale SSIM: 11x11 Gaussian window (sigma 1.5), C1=(0.01)^2,
// C2=(0.03)^2 for dynamic range 1, averaged over all fully-contained window
// positions.
inline double ssim(const Image& a, const Image& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("ssim: dimension mismatch");
    constexpr int kWin = 11;
    if (a.height < kWin || a.width < kWin) throw std::invalid_argument("ssim: images must be at least 11x11");

    static const std::vector<double> weights = [] {
        std::vector<double> w(kWin * kWin);
        const double sigma = 1.5;
        double sum = 0.0;
        for (int i = 0; i < kWin; ++i) {
            for (int j = 0; j < kWin; ++j) {
                const double di = i - (kWin - 1) / 2.0;
                const double dj = j - (kWin - 1) / 2.0;
                w[i * kWin + j] = std::exp(-(di * di + dj * dj) / (2.0 * sigma * sigma));
                sum += w[i * kWin + j];
            }
        }
        for (auto& x : w) x /= sum;
        return w;
    }();

    constexpr double c1 = 0.01 * 0.01;
    constexpr double c2 = 0.03 * 0.03;
    double total = 0.0;
    long count = 0;
    for (int i0 = 0; i0 + kWin <= a.height; ++i0) {
        for (int j0 = 0; j0 + kWin <= a.width; ++j0) {
            double mu_a = 0.0, mu_b = 0.0;
            for (int i = 0; i < kWin; ++i)
                for (int j = 0; j < kWin; ++j) {
                    const double w = weights[i * kWin + j];
                    mu_a += w * a.at(i0 + i, j0 + j);
                    mu_b += w * b.at(i0 + i, j0 + j);
                }
            double var_a = 0.0, var_b = 0.0, cov = 0.0;
            for (int i = 0; i < kWin; ++i)
                for (int j = 0; j < kWin; ++j) {
                    const double w = weights[i * kWin + j];
                    const double da = a.at(i0 + i, j0 + j) - mu_a;
                    const double db = b.at(i0 + i, j0 + j) - mu_b;
                    var_a += w * da * da;
                    var_b += w * db * db;
                    cov += w * da * db;
                }
            const double num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2);
            const double den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2);
            total += num / den;
            ++count;
        }
    }
    return total / count;
}

// P_E = P_base * (1 + lambda * (1 - SSIM)), clamped to [0,1].
inline double semantic_error_probability(double ssim_val, const SemanticConfig& cfg) {
    if (ssim_val < -1.0 || ssim_val > 1.0) throw std::invalid_argument("semantic_error_probability: ssim out of [-1,1]");
    return std::clamp(cfg.p_base * (1.0 + cfg.sens_lambda * (1.0 - ssim_val)), 0.0, 1.0);
}

inline double semantic_info_degree(double p_e) {
    if (p_e < 0.0 || p_e > 1.0) throw std::invalid_argument("semantic_info_degree: p_e out of [0,1]");
    return 1.0 - p_e;
}

// V = (1 - PER) * I_S
inline double expected_semantic_value(double per, double i_s) {
    if (per < 0.0 || per > 1.0 || i_s < 0.0 || i_s > 1.0)
        throw std::invalid_argument("expected_semantic_value: inputs must lie in [0,1]");
    return (1.0 - per) * i_s;
}

// Q = alpha * eps0 * V / L
inline double covert_semantic_density(double eps0, double v, const SemanticConfig& cfg) {
    if (eps0 < 0.0 || eps0 > 1.0 || v < 0.0 || v > 1.0)
        throw std::invalid_argument("covert_semantic_density: eps0 and v must lie in [0,1]");
    return cfg.alpha_scale * eps0 * v / cfg.payload_l;
}

}  // namespace covertsem::semantics
