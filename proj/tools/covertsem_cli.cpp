// Batch experiment runner: Q-table generation, oracle scheme comparison,
// policy training/evaluation, reference-point sweeps, and scene export.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "covertsem/commands.hpp"

namespace {

using covertsem::config::RunConfig;
using nlohmann::json;

struct CommonArgs {
    std::string config_path;
    std::optional<std::int64_t> seed;
    std::string out_dir;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON config file (defaults apply when omitted)");
    auto* seed = cmd->add_option("--seed", "master seed override");
    seed->each([&args](const std::string& v) { args.seed = std::stoll(v); });
    cmd->add_option("--out", args.out_dir, "output directory override");
}

RunConfig resolve_config(const CommonArgs& args,
                         const std::function<void(json&)>& extra_overrides = {}) {
    json user = json::object();
    if (!args.config_path.empty()) {
        std::ifstream in(args.config_path);
        if (!in) throw std::runtime_error("config: cannot open '" + args.config_path + "'");
        in >> user;
    }
    if (args.seed) user["seed"] = *args.seed;
    if (!args.out_dir.empty()) user["out_dir"] = args.out_dir;
    if (extra_overrides) extra_overrides(user);
    return covertsem::config::config_from_json(user);
}

std::filesystem::path prepare_out(const RunConfig& cfg) {
    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    covertsem::io::write_text_file((dir / "resolved_config.json").string(),
                                   cfg.resolved.dump(2) + "\n");
    return dir;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"covertsem: covert semantic contract design experiments"};
    app.require_subcommand(1);

    CommonArgs table_args;
    std::vector<double> snr_list;
    auto* cmd_table = app.add_subcommand("table-q", "emit the Q/PER table over an SNR grid");
    add_common(cmd_table, table_args);
    cmd_table->add_option("--snr", snr_list, "SNR grid in dB (default -3..21 step 3)");

    CommonArgs oracle_args;
    auto* cmd_oracle = app.add_subcommand("oracle", "random / CA / CC scheme comparison");
    add_common(cmd_oracle, oracle_args);

    CommonArgs train_args;
    std::string algo = "rdsac";
    std::optional<int> episodes;
    auto* cmd_train = app.add_subcommand("train", "train a contract policy");
    add_common(cmd_train, train_args);
    cmd_train->add_option("--algo", algo, "rdsac or sac")
        ->check(CLI::IsMember({"rdsac", "sac"}));
    auto* ep_opt = cmd_train->add_option("--episodes", "episode count override");
    ep_opt->each([&episodes](const std::string& v) { episodes = std::stoi(v); });

    CommonArgs eval_args;
    std::string checkpoint_path;
    int eval_states = 0;
    auto* cmd_eval = app.add_subcommand("eval", "evaluate a checkpoint (or 'oracle')");
    add_common(cmd_eval, eval_args);
    cmd_eval->add_option("--checkpoint", checkpoint_path, "checkpoint path or 'oracle'")
        ->required();
    cmd_eval->add_option("--n-states", eval_states, "evaluation states (default from config)");

    CommonArgs sweep_args;
    std::vector<double> refs{60.0, 110.0, 160.0};
    auto* cmd_sweep = app.add_subcommand("sweep-ref", "oracle utility over PT reference points");
    add_common(cmd_sweep, sweep_args);
    cmd_sweep->add_option("--refs", refs, "reference points (default 60 110 160)");

    CommonArgs scene_args;
    auto* cmd_scene = app.add_subcommand("scene", "export a generated scene and its mask");
    add_common(cmd_scene, scene_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_table->parsed()) {
            const RunConfig cfg = resolve_config(table_args);
            const auto dir = prepare_out(cfg);
            if (snr_list.empty()) snr_list = cfg.ranges.snr_db_set;
            const auto rows = covertsem::commands::table_q(cfg, snr_list);
            const std::string csv = covertsem::commands::table_q_csv(rows);
            covertsem::io::write_text_file((dir / "table_q.csv").string(), csv);
            std::printf("wrote %s (%zu rows)\n", (dir / "table_q.csv").c_str(), rows.size());
        } else if (cmd_oracle->parsed()) {
            const RunConfig cfg = resolve_config(oracle_args);
            const auto dir = prepare_out(cfg);
            const auto report = covertsem::commands::oracle_report(cfg);
            const json doc = covertsem::commands::oracle_report_json(report);
            covertsem::io::write_text_file((dir / "oracle.json").string(), doc.dump(2) + "\n");
            std::string menus;
            for (const auto& m : report.ca_menus) menus += m.dump() + "\n";
            covertsem::io::write_text_file((dir / "menus.jsonl").string(), menus);
            std::printf("%s\n", doc.dump(2).c_str());
        } else if (cmd_train->parsed()) {
            const RunConfig cfg = resolve_config(train_args, [&](json& user) {
                if (episodes) user["train"]["episodes"] = *episodes;
            });
            const auto dir = prepare_out(cfg);
            const auto out = covertsem::commands::run_train(cfg, algo);
            const auto curve_path = dir / ("curve_" + algo + ".csv");
            const auto ckpt_path = dir / ("checkpoint_" + algo + ".json");
            covertsem::io::write_text_file(curve_path.string(), out.curve_csv);
            covertsem::checkpoint::save(ckpt_path.string(), out.ckpt);
            if (!out.transitions_jsonl.empty())
                covertsem::io::write_text_file((dir / "transitions.jsonl").string(),
                                               out.transitions_jsonl);
            std::printf("algo=%s tail_mean=%.3f eval_mean=%.3f eval_std=%.3f\n", algo.c_str(),
                        out.tail_mean_reward, out.eval.mean, out.eval.stddev);
            std::printf("wrote %s and %s\n", curve_path.c_str(), ckpt_path.c_str());
        } else if (cmd_eval->parsed()) {
            const RunConfig cfg = resolve_config(eval_args);
            const auto dir = prepare_out(cfg);
            const int n = eval_states > 0 ? eval_states : cfg.eval_states;
            const auto result = covertsem::commands::run_eval(cfg, checkpoint_path, n);
            const json doc{{"mean", result.mean}, {"std", result.stddev}, {"n_states", n}};
            covertsem::io::write_text_file((dir / "eval.json").string(), doc.dump(2) + "\n");
            std::printf("%s\n", doc.dump(2).c_str());
        } else if (cmd_sweep->parsed()) {
            const RunConfig cfg = resolve_config(sweep_args);
            const auto dir = prepare_out(cfg);
            const auto rows = covertsem::commands::sweep_ref(cfg, refs, cfg.oracle_states);
            const std::string csv = covertsem::commands::sweep_csv(rows);
            covertsem::io::write_text_file((dir / "sweep_ref.csv").string(), csv);
            std::printf("%s", csv.c_str());
        } else if (cmd_scene->parsed()) {
            const RunConfig cfg = resolve_config(scene_args);
            const auto dir = prepare_out(cfg);
            const auto scene = covertsem::semantics::generate_scene(
                covertsem::derive_seed(cfg.seed, covertsem::config::kStreamScene),
                cfg.scene_height, cfg.scene_width, cfg.scene_objects);
            covertsem::io::write_scene((dir / "scene.pgm").string(), (dir / "mask.pgm").string(),
                                       scene);
            std::printf("wrote %s and %s\n", (dir / "scene.pgm").c_str(), (dir / "mask.pgm").c_str());
        }
    } catch (const std::exception& e) {
        const json err{{"error", e.what()}, {"command", argc > 1 ? argv[1] : ""}};
        std::cerr << err.dump() << std::endl;
        return 1;
    }
    return 0;
}
