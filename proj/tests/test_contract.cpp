#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "covertsem/contract.hpp"
#include "covertsem/rng.hpp"

using namespace covertsem;
using namespace covertsem::contract;

namespace {

UavPopulation two_types(double t1 = 20.0, double t2 = 150.0, double l1 = 0.5, int m = 5) {
    UavPopulation pop;
    pop.type_values = {t1, t2};
    pop.proportions = {l1, 1.0 - l1};
    pop.uav_count = m;
    return pop;
}

}  // namespace

TEST_CASE("uav utility") {
    EconParams econ;  // upsilon 200, unit cost 90
    CHECK(uav_utility(20.0, {1.0, 0.0225}, econ) == Catch::Approx(0.0).margin(1e-12));
    CHECK(uav_utility(20.0, {0.0, 0.0}, econ) == 0.0);
    CHECK(uav_utility(150.0, {3.0, 0.0285}, econ) == Catch::Approx(585.0).epsilon(1e-12));
}

TEST_CASE("bs item utility") {
    EconParams econ;
    CHECK(bs_item_utility_eut(0.0, 0.0, econ) == 0.0);
    CHECK(bs_item_utility_eut(std::exp(1.0) - 1.0, 0.0, econ) == Catch::Approx(50.0).epsilon(1e-12));
    CHECK(bs_item_utility_eut(3.0, 10.0, econ) == Catch::Approx(50.0 * std::log(4.0) - 10.0).epsilon(1e-12));
    CHECK_THROWS_AS(bs_item_utility_eut(-0.1, 0.0, econ), std::domain_error);
}

TEST_CASE("pt transform") {
    PtParams pt;  // ref 160, eta 0.5, exponents 1
    CHECK(pt_transform(160.0, pt) == 0.0);
    CHECK(pt_transform(200.0, pt) == Catch::Approx(40.0).epsilon(1e-12));
    CHECK(pt_transform(100.0, pt) == Catch::Approx(-30.0).epsilon(1e-12));
}

TEST_CASE("pt transform monotone nondecreasing") {
    Rng rng(17);
    for (int i = 0; i < 500; ++i) {
        PtParams pt;
        pt.u_ref = rng.uniform(-100.0, 300.0);
        pt.gain_exp = rng.uniform(0.2, 1.0);
        pt.loss_exp = rng.uniform(0.2, 1.0);
        pt.loss_aversion = rng.uniform(0.0, 3.0);
        double u1 = rng.uniform(-500.0, 500.0);
        double u2 = rng.uniform(-500.0, 500.0);
        if (u1 > u2) std::swap(u1, u2);
        CHECK(pt_transform(u1, pt) <= pt_transform(u2, pt) + 1e-12);
    }
}

TEST_CASE("bs total utility") {
    EconParams econ;
    UavPopulation pop = two_types();

    ContractMenu zero;
    zero.items = {{0.0, 0.0}, {0.0, 0.0}};
    CHECK(bs_total_utility(zero, pop, econ, std::nullopt) == 0.0);

    UavPopulation single;
    single.type_values = {20.0};
    single.proportions = {1.0};
    single.uav_count = 5;
    ContractMenu one;
    one.items = {{3.0, 10.0}};
    const double item_u = bs_item_utility_eut(3.0, 10.0, econ);
    CHECK(bs_total_utility(one, single, econ, std::nullopt) == Catch::Approx(5.0 * item_u));

    // per-item EUT utilities 10 and 30, lambda (0.5, 0.5), M = 2 -> 40
    UavPopulation pair = two_types(20.0, 150.0, 0.5, 2);
    ContractMenu menu;
    menu.items = {{std::exp(10.0 / 50.0) - 1.0, 0.0}, {std::exp(30.0 / 50.0) - 1.0, 0.0}};
    CHECK(bs_total_utility(menu, pair, econ, std::nullopt) == Catch::Approx(40.0).epsilon(1e-12));

    ContractMenu wrong;
    wrong.items = {{0.0, 0.0}};
    CHECK_THROWS_AS(bs_total_utility(wrong, pop, econ, std::nullopt), std::invalid_argument);
}

TEST_CASE("optimal rewards closed form") {
    EconParams econ;
    UavPopulation single;
    single.type_values = {20.0};
    single.proportions = {1.0};
    CHECK(optimal_rewards({1.0}, single, econ)[0] == Catch::Approx(0.0225).epsilon(1e-12));

    UavPopulation pop = two_types();
    const auto r = optimal_rewards({1.0, 3.0}, pop, econ);
    CHECK(r[0] == Catch::Approx(0.0225).epsilon(1e-12));
    CHECK(r[1] == Catch::Approx(0.0285).epsilon(1e-12));

    const auto zeros = optimal_rewards({0.0, 0.0}, pop, econ);
    CHECK(zeros[0] == 0.0);
    CHECK(zeros[1] == 0.0);

    CHECK_THROWS_AS(optimal_rewards({3.0, 1.0}, pop, econ), std::invalid_argument);
}

TEST_CASE("feasibility checks") {
    EconParams econ;
    UavPopulation pop = two_types();

    const ContractMenu good = menu_from_q({1.0, 3.0}, pop, econ);
    CHECK(check_feasibility(good, pop, econ).all_ok());

    ContractMenu bad;
    bad.items = {{1.0, 0.05}, {3.0, 0.01}};  // R decreasing while Q increases
    CHECK_FALSE(check_feasibility(bad, pop, econ).monotone_ok);

    UavPopulation single;
    single.type_values = {20.0};
    single.proportions = {1.0};
    ContractMenu one;
    one.items = {{1.0, 0.03}};  // ups*theta*R = 120 >= aQ = 90
    CHECK(check_feasibility(one, single, econ).all_ok());
}

TEST_CASE("closed-form menus feasible on 1000 random instances with binding constraints") {
    Rng rng(97);
    EconParams econ;
    for (int trial = 0; trial < 1000; ++trial) {
        UavPopulation pop;
        pop.type_values = {rng.uniform(10.0, 50.0), rng.uniform(100.0, 200.0)};
        const auto lambda = rng.dirichlet(2);
        pop.proportions = lambda;
        pop.uav_count = 5;
        econ.unit_cost = rng.uniform(80.0, 100.0);

        double q1 = rng.uniform(0.0, 50.0);
        double q2 = rng.uniform(0.0, 50.0);
        if (q1 > q2) std::swap(q1, q2);

        const ContractMenu menu = menu_from_q({q1, q2}, pop, econ);
        const FeasibilityReport report = check_feasibility(menu, pop, econ);
        REQUIRE(report.all_ok());
        // IR binds for type 1, downward-adjacent IC binds for type 2
        CHECK(std::abs(report.ir_slack[0]) <= 1e-9);
        CHECK(std::abs(report.ic_slack[1][0]) <= 1e-9);
        // higher types keep nonnegative information rent
        CHECK(report.ir_slack[1] >= -1e-9);
    }
}

TEST_CASE("oracle grid solve approaches the analytic single-type optimum") {
    EconParams econ;  // beta 50, upsilon 200, cost 90
    UavPopulation single;
    single.type_values = {20.0};
    single.proportions = {1.0};
    single.uav_count = 1;

    const double q_star = 50.0 * 200.0 * 20.0 / 90.0 - 1.0;  // ~2221.22
    const double q_max = 3000.0;
    const int grid_n = 3001;
    const double step = q_max / (grid_n - 1);
    const SolveResult res = oracle_grid_solve(single, econ, std::nullopt, q_max, grid_n);
    CHECK(std::abs(res.menu.items[0].q - q_star) <= step + 1e-12);

    const SolveResult degenerate = oracle_grid_solve(single, econ, std::nullopt, 0.0, 5);
    CHECK(degenerate.menu.items[0].q == 0.0);
    CHECK(degenerate.utility == 0.0);
}

TEST_CASE("grid argmax invariant under linear PT transform") {
    EconParams econ;
    UavPopulation single;
    single.type_values = {30.0};
    single.proportions = {1.0};
    single.uav_count = 5;
    PtParams pt;  // exponents exactly 1

    const SolveResult eut = oracle_grid_solve(single, econ, std::nullopt, 50.0, 41);
    const SolveResult ptr = oracle_grid_solve(single, econ, pt, 50.0, 41);
    CHECK(eut.menu.items[0].q == ptr.menu.items[0].q);
}

TEST_CASE("complete info dominates asymmetric info which dominates random menus") {
    Rng rng(31);
    EconParams econ;
    PtParams pt;
    for (int trial = 0; trial < 25; ++trial) {
        UavPopulation pop;
        pop.type_values = {rng.uniform(10.0, 50.0), rng.uniform(100.0, 200.0)};
        pop.proportions = rng.dirichlet(2);
        pop.uav_count = 5;
        econ.unit_cost = rng.uniform(80.0, 100.0);

        for (const UtilityMode& mode : {UtilityMode{}, UtilityMode{pt}}) {
            const SolveResult cc = complete_info_solve(pop, econ, mode, 50.0);
            const SolveResult ca = oracle_grid_solve(pop, econ, mode, 50.0, 101);
            double q1 = rng.uniform(0.0, 50.0);
            double q2 = rng.uniform(0.0, 50.0);
            if (q1 > q2) std::swap(q1, q2);
            const double random_u =
                bs_total_utility(menu_from_q({q1, q2}, pop, econ), pop, econ, mode);
            CHECK(cc.utility >= ca.utility - 1e-9);
            CHECK(ca.utility >= random_u - 1e-9);
        }
    }
}

TEST_CASE("complete info single type matches the analytic optimum") {
    EconParams econ;
    UavPopulation single;
    single.type_values = {20.0};
    single.proportions = {1.0};
    single.uav_count = 1;
    const SolveResult cc = complete_info_solve(single, econ, std::nullopt, 1e6);
    CHECK(cc.menu.items[0].q == Catch::Approx(200000.0 / 90.0 - 1.0).epsilon(1e-12));

    const SolveResult clamped = complete_info_solve(single, econ, std::nullopt, 0.0);
    CHECK(clamped.menu.items[0].q == 0.0);
    CHECK(clamped.utility == 0.0);
}
