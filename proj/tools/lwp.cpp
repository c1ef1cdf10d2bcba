#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lwp/experiment.hpp"
#include "lwp/metrics.hpp"

using namespace lwp;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Options shared by every subcommand. Flags given on the command line win
/// over values from the --config JSON.
struct CommonOpts {
    std::string config;
    std::string out = "out";
    std::uint64_t seed = 0;
    std::string dataset;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* dataset_opt = nullptr;

    void attach(CLI::App& cmd) {
        cmd.add_option("--config", config, "JSON experiment plan file");
        cmd.add_option("--out", out, "output directory (default: out)");
        seed_opt = cmd.add_option("--seed", seed, "master seed override");
        dataset_opt = cmd.add_option("--dataset", dataset,
                                     "dataset override: synth:<preset> or an edge-list path");
    }

    ExperimentPlan plan() const {
        ExperimentPlan p;
        if (!config.empty()) p = ExperimentPlan::from_json(read_file(config));
        if (seed_opt != nullptr && seed_opt->count() > 0) p.seed = seed;
        if (dataset_opt != nullptr && dataset_opt->count() > 0) p.dataset = dataset;
        return p;
    }
};

std::string ensure_out_dir(const std::string& out) {
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    if (ec) throw ValidationError("cannot create output directory '" + out + "'");
    return out;
}

std::string format_metric(const std::optional<double>& value) {
    if (!value) return "NA";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", *value);
    return buf;
}

void print_summary(const std::vector<SummaryRow>& rows) {
    std::printf("%-16s %-10s %-7s %-6s %-22s %10s %10s %7s\n", "dataset", "attack", "mode",
                "ratio", "metric", "mean", "std", "n_runs");
    for (const SummaryRow& row : rows) {
        std::printf("%-16s %-10s %-7s %-6.2f %-22s %10.4f %10.4f %7d\n", row.dataset.c_str(),
                    row.attack.c_str(), row.mode.c_str(), row.ratio, row.metric.c_str(), row.mean,
                    row.std_dev, row.n_runs);
    }
}

void report_failures(const std::vector<EvalReport>& reports) {
    for (const EvalReport& r : reports) {
        if (r.ok()) continue;
        std::fprintf(stderr, "cell failed: %s %s %s ratio %.2f repeat %d: %s\n",
                     r.predictor.c_str(), r.attack.c_str(), r.mode.c_str(), r.ratio, r.repeat,
                     r.error.c_str());
    }
}

void write_result(const ExperimentResult& result, const std::string& out,
                  const std::string& stem) {
    const std::string jsonl = out + "/" + stem + "_reports.jsonl";
    const std::string csv = out + "/" + stem + "_summary.csv";
    write_reports_jsonl(result, jsonl);
    const auto rows = summarize(result.reports);
    write_summary_csv(rows, csv);
    print_summary(rows);
    report_failures(result.reports);
    std::printf("wrote %s and %s\n", jsonl.c_str(), csv.c_str());
}

void cmd_train(const CommonOpts& opts) {
    const ExperimentPlan plan = opts.plan();
    plan.validate();
    const std::string out = ensure_out_dir(opts.out);

    const WeightedGraph graph = normalize_weights(load_dataset(plan.dataset));
    const std::uint64_t split_seed = mix_seed(plan.seed, 1);
    const ObservedSplit split = split_train_test(graph, plan.test_fraction, split_seed);

    SeaConfig sea_cfg = plan.sea;
    sea_cfg.seed = mix_seed(plan.seed, 2);
    const TrainResult trained = train_sea(split, sea_cfg);

    const SeaCheckpoint ckpt{sea_cfg, trained.params, split_seed, graph.node_count()};
    const std::string ckpt_path = out + "/sea_checkpoint.json";
    save_checkpoint(ckpt, ckpt_path);

    const SeaContext ctx(split.observed);
    std::vector<double> y;
    std::vector<double> y_hat;
    for (const Edge& e : split.test_edges) {
        y.push_back(e.w);
        y_hat.push_back(predict_weight(ctx, trained.params, sea_cfg, e.u, e.v));
    }
    std::printf("trained on %s: %d nodes, %d observed links, %zu withheld\n",
                plan.dataset.c_str(), graph.node_count(), split.observed.edge_count(),
                split.test_edges.size());
    std::printf("final objective %.6f\n", trained.loss_trace.back());
    if (!y.empty()) {
        const auto correlation = y.size() >= 2 ? pcc(y, y_hat) : std::nullopt;
        std::printf("clean test rmse %.4f pcc %s\n", rmse(y, y_hat),
                    format_metric(correlation).c_str());
    }
    std::printf("wrote %s\n", ckpt_path.c_str());
}

void cmd_attack(const CommonOpts& opts, const std::string& checkpoint, int target_u, int target_v,
                bool have_target, const std::string& mode_name, double ratio,
                const CLI::Option* eta_opt, double eta) {
    ExperimentPlan plan = opts.plan();
    if (eta_opt->count() > 0) plan.step_rule = StepRule::gradient_scaled(eta);
    plan.validate();
    const AttackMode mode = attack_mode_from_string(mode_name);
    if (!(ratio > 0.0) || ratio > 1.0) throw ValidationError("--ratio must lie in (0, 1]");
    const std::string out = ensure_out_dir(opts.out);

    const WeightedGraph graph = normalize_weights(load_dataset(plan.dataset));
    const ObservedSplit split = split_train_test(graph, plan.test_fraction, mix_seed(plan.seed, 1));

    SeaConfig sea_cfg = plan.sea;
    SeaParams params;
    if (!checkpoint.empty()) {
        const SeaCheckpoint ckpt = load_checkpoint(checkpoint);
        if (ckpt.node_count != graph.node_count()) {
            throw ValidationError("checkpoint was trained on a different node count");
        }
        sea_cfg = ckpt.config;
        params = ckpt.params;
    } else {
        sea_cfg.seed = mix_seed(plan.seed, 2);
        params = train_sea(split, sea_cfg).params;
    }

    Target target;
    if (have_target) {
        bool found = false;
        for (const Edge& e : split.test_edges) {
            if ((e.u == target_u && e.v == target_v) || (e.u == target_v && e.v == target_u)) {
                target = {e.u, e.v, e.w};
                found = true;
                break;
            }
        }
        if (!found) {
            throw ValidationError("target (" + std::to_string(target_u) + ", " +
                                  std::to_string(target_v) +
                                  ") is not one of the withheld test links");
        }
    } else {
        target = TargetSpec::sample(split, 1, mix_seed(plan.seed, 3)).targets.front();
    }

    AttackConfig cfg;
    cfg.mode = mode;
    cfg.iterations = budget_for(ratio, degree_sum(split.observed, target.u, target.v));
    cfg.per_iteration = 1;
    cfg.step_rule = plan.step_rule;
    cfg.seed = plan.seed;

    const AttackOutcome outcome = run_iga_lwp(split.observed, params, sea_cfg, target, cfg);

    const std::string edges_path = out + "/adversarial_edges.txt";
    const std::string trace_path = out + "/attack_trace.json";
    save_edge_list(outcome.adversarial, edges_path);
    save_attack_trace(outcome.trace, trace_path);

    std::printf("target (%d, %d) true weight %.4f\n", target.u, target.v, target.true_weight);
    std::printf("budget %d distinct links, %zu touched, %d iterations%s\n", cfg.resolved_budget(),
                outcome.trace.touched.size(), outcome.trace.iterations_run,
                outcome.trace.budget_exhausted ? " (budget exhausted)" : "");
    std::printf("target loss %.6f -> %.6f\n", outcome.trace.initial_loss,
                outcome.trace.final_loss);
    std::printf("wrote %s and %s (normalized weights)\n", edges_path.c_str(), trace_path.c_str());
}

void cmd_evaluate(const CommonOpts& opts, double ratio) {
    ExperimentPlan plan = opts.plan();
    if (!(ratio > 0.0) || ratio > 1.0) throw ValidationError("--ratio must lie in (0, 1]");
    plan.ratios = {ratio};
    plan.validate();
    const std::string out = ensure_out_dir(opts.out);
    const ExperimentResult result = run_experiment(plan);
    write_result(result, out, "evaluate");
}

void cmd_sweep(const CommonOpts& opts) {
    const ExperimentPlan plan = opts.plan();
    plan.validate();
    const std::string out = ensure_out_dir(opts.out);
    const ExperimentResult result = run_experiment(plan);
    write_result(result, out, "sweep");
}

void cmd_transfer(const CommonOpts& opts) {
    ExperimentPlan plan = opts.plan();
    plan.modes = {AttackMode::local};
    plan.ratios = {plan.transfer.ratio};
    plan.validate();
    const std::string out = ensure_out_dir(opts.out);

    std::vector<AdversarialCell> cells;
    const ExperimentResult surrogate = run_experiment(plan, &cells);
    write_reports_jsonl(surrogate, out + "/surrogate_reports.jsonl");
    report_failures(surrogate.reports);

    const ExperimentResult result = run_transfer(plan, cells);
    write_result(result, out, "transfer");
}

void cmd_report(const CommonOpts& opts, const std::string& in_path) {
    const ExperimentResult result = read_reports_jsonl(in_path);
    const std::string out = ensure_out_dir(opts.out);
    const std::string csv = out + "/summary.csv";
    const auto rows = summarize(result.reports);
    write_summary_csv(rows, csv);
    print_summary(rows);
    report_failures(result.reports);
    std::printf("wrote %s\n", csv.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adversarial link weight prediction toolkit"};
    app.require_subcommand(1);

    CommonOpts train_opts;
    auto* train = app.add_subcommand("train", "train the SEA surrogate and save a checkpoint");
    train_opts.attach(*train);
    train->callback([&]() { cmd_train(train_opts); });

    CommonOpts attack_opts;
    std::string checkpoint;
    int target_u = 0;
    int target_v = 0;
    std::string attack_mode = "global";
    double attack_ratio = 0.5;
    double eta = 50.0;
    auto* attack =
        app.add_subcommand("attack", "craft an adversarial graph for one withheld target link");
    attack_opts.attach(*attack);
    attack->add_option("--checkpoint", checkpoint, "SEA checkpoint (trains fresh when absent)");
    auto* u_opt = attack->add_option("--target-u", target_u, "target link endpoint");
    auto* v_opt = attack->add_option("--target-v", target_v, "target link endpoint");
    u_opt->needs(v_opt);
    v_opt->needs(u_opt);
    attack->add_option("--mode", attack_mode, "global or local (default: global)");
    attack->add_option("--ratio", attack_ratio, "budget as a fraction of k_t (default: 0.5)");
    auto* eta_opt = attack->add_option("--eta", eta, "gradient step scale override");
    attack->callback([&]() {
        cmd_attack(attack_opts, checkpoint, target_u, target_v, u_opt->count() > 0, attack_mode,
                   attack_ratio, eta_opt, eta);
    });

    CommonOpts eval_opts;
    double eval_ratio = 0.5;
    auto* evaluate =
        app.add_subcommand("evaluate", "clean vs attacked surrogate metrics at one budget ratio");
    eval_opts.attach(*evaluate);
    evaluate->add_option("--ratio", eval_ratio, "budget as a fraction of k_t (default: 0.5)");
    evaluate->callback([&]() { cmd_evaluate(eval_opts, eval_ratio); });

    CommonOpts sweep_opts;
    auto* sweep = app.add_subcommand("sweep", "run the full budget-ratio grid of the plan");
    sweep_opts.attach(*sweep);
    sweep->callback([&]() { cmd_sweep(sweep_opts); });

    CommonOpts transfer_opts;
    auto* transfer = app.add_subcommand(
        "transfer", "evaluate DeepWalk/Node2Vec/GCN predictors on local adversarial graphs");
    transfer_opts.attach(*transfer);
    transfer->callback([&]() { cmd_transfer(transfer_opts); });

    CommonOpts report_opts;
    std::string report_in;
    auto* report = app.add_subcommand("report", "summarize a reports.jsonl file into a CSV");
    report_opts.attach(*report);
    report->add_option("--in", report_in, "reports.jsonl produced by evaluate/sweep/transfer")
        ->required();
    report->callback([&]() { cmd_report(report_opts, report_in); });

    try {
        app.parse(argc, argv);
        return 0;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const lwp::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
