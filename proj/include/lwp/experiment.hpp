#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lwp/attack.hpp"
#include "lwp/baselines.hpp"
#include "lwp/graph.hpp"
#include "lwp/sea.hpp"
#include "lwp/transfer.hpp"

namespace lwp {

/// One evaluated condition: true and predicted weights for the sampled
/// target links of a single repeat, plus everything needed to re-derive the
/// cell. `pcc` is empty when the correlation is undefined (constant vector);
/// `error` is non-empty when the cell failed and the vectors are empty.
struct EvalReport {
    std::string dataset;
    std::string predictor = "sea";
    std::string attack = "original";
    std::string mode = "none";
    double ratio = 0.0;
    int repeat = 0;
    std::uint64_t split_seed = 0;
    std::string config_hash;
    std::string timestamp;
    std::vector<double> y;
    std::vector<double> y_hat;
    std::optional<double> pcc;
    double rmse = 0.0;
    std::string error;

    bool ok() const { return error.empty(); }
};

/// Settings for the transfer study: which budget ratio the adversarial
/// graphs use and how the three independent predictors are configured.
/// DeepWalk walks force p = q = 1; Node2Vec uses the p/q pair below.
struct TransferConfig {
    double ratio = 0.5;
    EmbeddingConfig embedding{};
    double node2vec_p = 0.25;
    double node2vec_q = 4.0;
    RegressorConfig regressor{};
    GcnConfig gcn{};

    void validate() const;
};

/// Full description of an experiment: dataset, split protocol, attack grid,
/// and model hyperparameters. Serializable to JSON; the canonical dump is
/// hashed into every report so results can be traced back to their config.
struct ExperimentPlan {
    std::string dataset = "synth:mid";  // "synth:<preset>" or an edge-list path
    double test_fraction = 0.1;
    int num_targets = 10;
    int num_repeats = 10;
    std::vector<std::string> attacks = {"rda", "sa-cn", "iga-lwp"};
    std::vector<AttackMode> modes = {AttackMode::global};
    std::vector<double> ratios = {0.2, 0.4, 0.6, 0.8, 1.0};
    std::uint64_t seed = 0;

    SeaConfig sea{};
    StepRule step_rule{};
    double baseline_alpha = 0.2;
    TransferConfig transfer{};

    void validate() const;
    std::string canonical_json() const;
    std::string config_hash() const;

    static ExperimentPlan from_json(const std::string& text);
};

/// Loads "synth:<preset>" via the generator, anything else as an edge-list
/// file. Weights are returned raw; callers normalize.
WeightedGraph load_dataset(const std::string& spec);

/// Distinct-link budget for one target: max(1, round(ratio * k_t)).
int budget_for(double ratio, int degree_sum);

/// One crafted adversarial graph, tagged with the cell that produced it.
struct AdversarialCell {
    std::string attack;
    AttackMode mode = AttackMode::global;
    double ratio = 0.0;
    int repeat = 0;
    int target_index = 0;
    Target target;
    WeightedGraph graph;
};

struct ExperimentResult {
    ExperimentPlan plan;
    std::vector<EvalReport> reports;
};

/// Runs the full surrogate-side protocol: per repeat, split the dataset,
/// train SEA on the observed part, sample targets, then evaluate SEA on the
/// clean graph and on each (attack, mode, ratio) adversarial graph. Failures
/// are recorded in the affected report and the run continues. When `capture`
/// is non-null every crafted adversarial graph is appended to it for reuse.
ExperimentResult run_experiment(const ExperimentPlan& plan,
                                std::vector<AdversarialCell>* capture = nullptr);

/// Transfer study over previously crafted adversarial graphs: retrains
/// DeepWalk- and Node2Vec-based regressors and the GCN on the clean and
/// adversarial graphs of cells matching (local mode, transfer.ratio) and
/// evaluates each on the repeat's targets.
ExperimentResult run_transfer(const ExperimentPlan& plan,
                              const std::vector<AdversarialCell>& cells);

/// One aggregated line of the summary table. `predictor` is folded into the
/// metric label ("gcn_rmse") when it is not the surrogate.
struct SummaryRow {
    std::string dataset;
    std::string predictor;
    std::string attack;
    std::string mode;
    double ratio = 0.0;
    std::string metric;
    double mean = 0.0;
    double std_dev = 0.0;
    int n_runs = 0;
};

/// Groups reports by (dataset, predictor, attack, mode, ratio) and emits
/// rmse (mean/std over repeats), pcc_run_mean (over repeats with a defined
/// correlation), and pcc_pooled (single correlation over the concatenated
/// target vectors). Failed cells are skipped.
std::vector<SummaryRow> summarize(const std::vector<EvalReport>& reports);

/// reports.jsonl: first line is the plan, one report per following line.
void write_reports_jsonl(const ExperimentResult& result, const std::string& path);
ExperimentResult read_reports_jsonl(const std::string& path);

/// CSV with columns dataset, attack, mode, ratio, metric, mean, std, n_runs.
void write_summary_csv(const std::vector<SummaryRow>& rows, const std::string& path);

}  // namespace lwp
