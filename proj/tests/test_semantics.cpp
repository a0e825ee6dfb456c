#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "covertsem/semantics.hpp"

using namespace covertsem::semantics;

TEST_CASE("scene generation is deterministic and masks are nontrivial") {
    const Scene s1 = generate_scene(7, 64, 64, 3);
    const Scene s2 = generate_scene(7, 64, 64, 3);
    CHECK(s1.image.pix == s2.image.pix);
    CHECK(s1.mask == s2.mask);

    const Scene s3 = generate_scene(8, 64, 64, 3);
    CHECK(s1.image.pix != s3.image.pix);

    const long ones = std::count(s1.mask.begin(), s1.mask.end(), 1);
    CHECK(ones > 0);
    CHECK(ones < static_cast<long>(s1.mask.size()));

    CHECK_THROWS_AS(generate_scene(1, 16, 64, 1), std::invalid_argument);
    CHECK_THROWS_AS(generate_scene(1, 64, 64, 0), std::invalid_argument);
}

TEST_CASE("lowpass") {
    Image constant(32, 32, 0.5);
    const Image lp = lowpass(constant, 4);
    for (double v : lp.pix) CHECK(v == Catch::Approx(0.5).epsilon(1e-15));

    Image stripes(2, 2);
    stripes.at(0, 0) = 0.0;
    stripes.at(0, 1) = 1.0;
    stripes.at(1, 0) = 0.0;
    stripes.at(1, 1) = 1.0;
    const Image mean = lowpass(stripes, 2);
    for (double v : mean.pix) CHECK(v == Catch::Approx(0.5).epsilon(1e-15));

    const Scene s = generate_scene(3, 48, 48, 2);
    const auto [lo_it, hi_it] = std::minmax_element(s.image.pix.begin(), s.image.pix.end());
    const Image lp2 = lowpass(s.image, 5);
    for (double v : lp2.pix) {
        CHECK(v >= *lo_it - 1e-12);
        CHECK(v <= *hi_it + 1e-12);
    }
    CHECK_THROWS_AS(lowpass(constant, 1), std::invalid_argument);
}

TEST_CASE("abstraction levels") {
    Scene s = generate_scene(5, 64, 64, 3);

    const Image g3 = apply_abstraction(s, {Level::G3, 4});
    CHECK(g3.pix == s.image.pix);

    Scene all_ones = s;
    std::fill(all_ones.mask.begin(), all_ones.mask.end(), 1);
    CHECK(apply_abstraction(all_ones, {Level::G1, 4}).pix == s.image.pix);

    Scene all_zero = s;
    std::fill(all_zero.mask.begin(), all_zero.mask.end(), 0);
    const Image zeroed = apply_abstraction(all_zero, {Level::G1, 4});
    for (double v : zeroed.pix) CHECK(v == 0.0);

    const Image g1 = apply_abstraction(s, {Level::G1, 4});
    const Image g2 = apply_abstraction(s, {Level::G2, 4});
    CHECK(g1.same_shape(s.image));
    CHECK(g2.same_shape(s.image));
    // task-critical pixels survive every level untouched
    for (int i = 0; i < s.image.height; ++i)
        for (int j = 0; j < s.image.width; ++j)
            if (s.mask_at(i, j)) {
                CHECK(g1.at(i, j) == s.image.at(i, j));
                CHECK(g2.at(i, j) == s.image.at(i, j));
            }
}

TEST_CASE("ssim basics") {
    const Scene s = generate_scene(11, 64, 64, 3);
    CHECK(ssim(s.image, s.image) == Catch::Approx(1.0).margin(1e-9));

    Image inverted = s.image;
    for (double& v : inverted.pix) v = 1.0 - v;
    CHECK(ssim(s.image, inverted) < 1.0);

    Image wrong(32, 48, 0.0);
    CHECK_THROWS_AS(ssim(s.image, wrong), std::invalid_argument);
    Image tiny(8, 8, 0.0);
    CHECK_THROWS_AS(ssim(tiny, tiny), std::invalid_argument);
}

TEST_CASE("coarser lowpass destroys more structure") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const Scene s = generate_scene(seed, 48, 48, 3);
        const double fine = ssim(s.image, lowpass(s.image, 2));
        const double coarse = ssim(s.image, lowpass(s.image, 8));
        CHECK(fine >= coarse);
    }
}

TEST_CASE("abstraction similarity ordering over 100 seeds") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const Scene s = generate_scene(seed, 64, 64, 3);
        const double sim1 = ssim(s.image, apply_abstraction(s, {Level::G1, 4}));
        const double sim2 = ssim(s.image, apply_abstraction(s, {Level::G2, 4}));
        const double sim3 = ssim(s.image, apply_abstraction(s, {Level::G3, 4}));
        CHECK(sim1 <= sim2);
        CHECK(sim2 <= sim3);
        CHECK(sim3 == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("semantic error probability") {
    SemanticConfig cfg;
    cfg.p_base = 0.1;
    cfg.sens_lambda = 2.0;
    CHECK(semantic_error_probability(1.0, cfg) == Catch::Approx(0.1).epsilon(1e-12));
    CHECK(semantic_error_probability(0.5, cfg) == Catch::Approx(0.2).epsilon(1e-12));

    SemanticConfig harsh;
    harsh.p_base = 0.6;
    harsh.sens_lambda = 5.0;
    CHECK(semantic_error_probability(0.0, harsh) == 1.0);  // clamped from 3.6
}

TEST_CASE("info degree, semantic value, density") {
    CHECK(semantic_info_degree(0.0) == 1.0);
    CHECK(semantic_info_degree(1.0) == 0.0);
    CHECK(semantic_info_degree(0.2) == Catch::Approx(0.8));

    CHECK(expected_semantic_value(0.0, 1.0) == 1.0);
    CHECK(expected_semantic_value(1.0, 0.7) == 0.0);
    CHECK(expected_semantic_value(0.25, 0.8) == Catch::Approx(0.6));

    SemanticConfig cfg;
    cfg.alpha_scale = 1.0;
    cfg.payload_l = 2.0;
    CHECK(covert_semantic_density(0.5, 0.8, cfg) == Catch::Approx(0.2));
    CHECK(covert_semantic_density(0.0, 0.9, cfg) == 0.0);
    // linear in both factors
    CHECK(covert_semantic_density(0.4, 0.6, cfg) ==
          Catch::Approx(2.0 * covert_semantic_density(0.2, 0.6, cfg)));
    CHECK(covert_semantic_density(0.4, 0.6, cfg) ==
          Catch::Approx(2.0 * covert_semantic_density(0.4, 0.3, cfg)));
}

TEST_CASE("info degree ordering follows similarity ordering") {
    SemanticConfig cfg;
    const Scene s = generate_scene(21, 64, 64, 4);
    const double i1 = semantic_info_degree(
        semantic_error_probability(ssim(s.image, apply_abstraction(s, {Level::G1, 4})), cfg));
    const double i2 = semantic_info_degree(
        semantic_error_probability(ssim(s.image, apply_abstraction(s, {Level::G2, 4})), cfg));
    const double i3 = semantic_info_degree(
        semantic_error_probability(ssim(s.image, apply_abstraction(s, {Level::G3, 4})), cfg));
    CHECK(i1 <= i2);
    CHECK(i2 <= i3);
}
