// End-to-end tour: build a scene, score the abstraction levels, assemble the
// covert semantic density, solve a contract instance three ways, and run a
// short training session against the grid oracle.

#include <cstdio>

#include "covertsem/commands.hpp"

using namespace covertsem;

int main() {
    // scene + abstraction levels
    const semantics::Scene scene = semantics::generate_scene(7, 64, 64, 4);
    semantics::SemanticConfig sem;
    const double sim_g1 =
        semantics::ssim(scene.image, semantics::apply_abstraction(scene, {semantics::Level::G1, 4}));
    const double sim_g2 =
        semantics::ssim(scene.image, semantics::apply_abstraction(scene, {semantics::Level::G2, 4}));
    std::printf("SSIM vs original: g1 %.3f, g2 %.3f, g3 1.000\n", sim_g1, sim_g2);

    // physical layer at 9 dB with the default urban channel
    channel::PerConfig per;
    const double ups = channel::snr_db_to_linear(9.0);
    const double success = channel::packet_success_rate(ups, per);
    channel::DetectionConfig detection;
    detection.lo_w = 1e-10;
    detection.hi_w = 1e-10 + 2e-9;
    const double eps0 = channel::covert_probability(detection, 1e-10, 1e-9);
    const double i_s = semantics::semantic_info_degree(
        semantics::semantic_error_probability(sim_g2, sem));
    const double q = semantics::covert_semantic_density(eps0, success * i_s, sem);
    std::printf("9 dB, level g2: packet success %.3f, eps0 %.2f, Q %.3f\n", success, eps0, q);

    // one contract instance, three solvers
    contract::UavPopulation pop;
    pop.type_values = {30.0, 150.0};
    pop.proportions = {0.5, 0.5};
    pop.uav_count = 5;
    contract::EconParams econ;
    contract::PtParams pt;
    const auto ca = contract::oracle_grid_solve(pop, econ, pt, 50.0, 101);
    const auto cc = contract::complete_info_solve(pop, econ, pt, 50.0);
    std::printf("CA menu: (%.1f, %.4f), (%.1f, %.4f) -> utility %.2f (CC bound %.2f)\n",
                ca.menu.items[0].q, ca.menu.items[0].r, ca.menu.items[1].q, ca.menu.items[1].r,
                ca.utility, cc.utility);

    // short training run against the oracle replay baseline
    rdsac::EnvSetup setup;
    setup.mode = pt;
    rdsac::TrainConfig train_cfg;
    train_cfg.episodes = 120;
    const rdsac::TrainResult trained = rdsac::train(setup, train_cfg, 1);
    const rdsac::EvalResult eval = rdsac::evaluate(trained.policy, setup, 20, 1);
    std::printf("after %d episodes: eval mean reward %.0f (+/- %.0f)\n", train_cfg.episodes,
                eval.mean, eval.stddev);
    return 0;
}
