#include "lwp/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <map>
#include <memory>
#include <tuple>
#include <utility>

#include "lwp/metrics.hpp"
#include "lwp/synth.hpp"

namespace lwp {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string timestamp_utc() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::uint64_t split_seed_for(const ExperimentPlan& plan, int repeat) {
    return mix_seed(plan.seed, 4u * static_cast<std::uint64_t>(repeat) + 1);
}

std::uint64_t sea_seed_for(const ExperimentPlan& plan, int repeat) {
    return mix_seed(plan.seed, 4u * static_cast<std::uint64_t>(repeat) + 2);
}

std::uint64_t target_seed_for(const ExperimentPlan& plan, int repeat) {
    return mix_seed(plan.seed, 4u * static_cast<std::uint64_t>(repeat) + 3);
}

std::uint64_t cell_seed_for(const ExperimentPlan& plan, int repeat, const std::string& attack,
                            AttackMode mode, double ratio, std::size_t target_index) {
    const std::string key = attack + "|" + to_string(mode) + "|" + std::to_string(ratio) + "|" +
                            std::to_string(target_index);
    return mix_seed(mix_seed(plan.seed, 0x10000u + static_cast<std::uint64_t>(repeat)),
                    fnv1a64(key));
}

void finish_metrics(EvalReport& report) {
    report.rmse = rmse(report.y, report.y_hat);
    report.pcc = report.y.size() >= 2 ? pcc(report.y, report.y_hat) : std::nullopt;
}

WeightedGraph craft_adversarial(const ExperimentPlan& plan, const std::string& attack,
                                const WeightedGraph& observed, const SeaParams& params,
                                const SeaConfig& sea_cfg, const Target& target, AttackMode mode,
                                int budget_links, std::uint64_t seed) {
    if (attack == "iga-lwp") {
        AttackConfig cfg;
        cfg.mode = mode;
        cfg.iterations = budget_links;
        cfg.per_iteration = 1;
        cfg.step_rule = plan.step_rule;
        cfg.seed = seed;
        return run_iga_lwp(observed, params, sea_cfg, target, cfg).adversarial;
    }
    BaselineConfig cfg;
    cfg.alpha = plan.baseline_alpha;
    cfg.budget = budget_links;
    cfg.mode = mode;
    cfg.seed = seed;
    if (attack == "rda") return rda_attack(observed, target, cfg).adversarial;
    if (attack == "sa-cn") return sacn_attack(observed, target, cfg).adversarial;
    throw ValidationError("unknown attack '" + attack + "'");
}

ordered_json sea_to_json(const SeaConfig& c) {
    ordered_json o;
    o["hidden_dim"] = c.hidden_dim;
    o["embed_dim"] = c.embed_dim;
    o["leaky_slope"] = c.leaky_slope;
    o["nu"] = c.nu;
    o["l2_coeff"] = c.l2_coeff;
    o["learning_rate"] = c.learning_rate;
    o["epochs"] = c.epochs;
    return o;
}

ordered_json embedding_to_json(const EmbeddingConfig& c) {
    ordered_json o;
    o["dim"] = c.dim;
    o["walks_per_node"] = c.walks_per_node;
    o["walk_length"] = c.walk_length;
    o["window"] = c.window;
    o["negatives"] = c.negatives;
    o["epochs"] = c.epochs;
    o["learning_rate"] = c.learning_rate;
    return o;
}

/// Pulls `key` out of `obj` (erasing it) so leftover keys can be rejected.
std::optional<json> grab(json& obj, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end()) return std::nullopt;
    json value = *it;
    obj.erase(it);
    return value;
}

void reject_leftovers(const json& obj, const std::string& where) {
    if (obj.empty()) return;
    throw ValidationError("unknown key '" + obj.begin().key() + "' in " + where);
}

void parse_sea(json obj, SeaConfig& out) {
    if (auto v = grab(obj, "hidden_dim")) out.hidden_dim = v->get<int>();
    if (auto v = grab(obj, "embed_dim")) out.embed_dim = v->get<int>();
    if (auto v = grab(obj, "leaky_slope")) out.leaky_slope = v->get<double>();
    if (auto v = grab(obj, "nu")) out.nu = v->get<double>();
    if (auto v = grab(obj, "l2_coeff")) out.l2_coeff = v->get<double>();
    if (auto v = grab(obj, "learning_rate")) out.learning_rate = v->get<double>();
    if (auto v = grab(obj, "epochs")) out.epochs = v->get<int>();
    reject_leftovers(obj, "sea");
}

void parse_embedding(json obj, EmbeddingConfig& out) {
    if (auto v = grab(obj, "dim")) out.dim = v->get<int>();
    if (auto v = grab(obj, "walks_per_node")) out.walks_per_node = v->get<int>();
    if (auto v = grab(obj, "walk_length")) out.walk_length = v->get<int>();
    if (auto v = grab(obj, "window")) out.window = v->get<int>();
    if (auto v = grab(obj, "negatives")) out.negatives = v->get<int>();
    if (auto v = grab(obj, "epochs")) out.epochs = v->get<int>();
    if (auto v = grab(obj, "learning_rate")) out.learning_rate = v->get<double>();
    reject_leftovers(obj, "transfer.embedding");
}

void parse_transfer(json obj, TransferConfig& out) {
    if (auto v = grab(obj, "ratio")) out.ratio = v->get<double>();
    if (auto v = grab(obj, "node2vec_p")) out.node2vec_p = v->get<double>();
    if (auto v = grab(obj, "node2vec_q")) out.node2vec_q = v->get<double>();
    if (auto v = grab(obj, "embedding")) parse_embedding(*v, out.embedding);
    if (auto v = grab(obj, "regressor")) {
        json r = *v;
        if (auto e = grab(r, "epochs")) out.regressor.epochs = e->get<int>();
        if (auto e = grab(r, "learning_rate")) out.regressor.learning_rate = e->get<double>();
        reject_leftovers(r, "transfer.regressor");
    }
    if (auto v = grab(obj, "gcn")) {
        json g = *v;
        if (auto e = grab(g, "layers")) out.gcn.layers = e->get<int>();
        if (auto e = grab(g, "hidden")) out.gcn.hidden = e->get<int>();
        if (auto e = grab(g, "learning_rate")) out.gcn.learning_rate = e->get<double>();
        if (auto e = grab(g, "epochs")) out.gcn.epochs = e->get<int>();
        reject_leftovers(g, "transfer.gcn");
    }
    reject_leftovers(obj, "transfer");
}

ExperimentPlan plan_from_obj(json obj) {
    ExperimentPlan plan;
    if (auto v = grab(obj, "dataset")) plan.dataset = v->get<std::string>();
    if (auto v = grab(obj, "test_fraction")) plan.test_fraction = v->get<double>();
    if (auto v = grab(obj, "num_targets")) plan.num_targets = v->get<int>();
    if (auto v = grab(obj, "num_repeats")) plan.num_repeats = v->get<int>();
    if (auto v = grab(obj, "attacks")) plan.attacks = v->get<std::vector<std::string>>();
    if (auto v = grab(obj, "modes")) {
        plan.modes.clear();
        for (const auto& m : *v) plan.modes.push_back(attack_mode_from_string(m.get<std::string>()));
    }
    if (auto v = grab(obj, "ratios")) plan.ratios = v->get<std::vector<double>>();
    if (auto v = grab(obj, "seed")) plan.seed = v->get<std::uint64_t>();
    if (auto v = grab(obj, "sea")) parse_sea(*v, plan.sea);
    if (auto v = grab(obj, "step_rule")) {
        json s = *v;
        std::string kind = "gradient_scaled";
        double value = plan.step_rule.value;
        if (auto k = grab(s, "kind")) kind = k->get<std::string>();
        if (auto k = grab(s, "value")) value = k->get<double>();
        reject_leftovers(s, "step_rule");
        if (kind == "gradient_scaled") {
            plan.step_rule = StepRule::gradient_scaled(value);
        } else if (kind == "fixed") {
            plan.step_rule = StepRule::fixed(value);
        } else {
            throw ValidationError("unknown step_rule kind '" + kind + "'");
        }
    }
    if (auto v = grab(obj, "baseline_alpha")) plan.baseline_alpha = v->get<double>();
    if (auto v = grab(obj, "transfer")) parse_transfer(*v, plan.transfer);
    reject_leftovers(obj, "plan");
    return plan;
}

ordered_json plan_to_obj(const ExperimentPlan& plan) {
    ordered_json o;
    o["dataset"] = plan.dataset;
    o["test_fraction"] = plan.test_fraction;
    o["num_targets"] = plan.num_targets;
    o["num_repeats"] = plan.num_repeats;
    o["attacks"] = plan.attacks;
    ordered_json modes = ordered_json::array();
    for (const AttackMode m : plan.modes) modes.push_back(to_string(m));
    o["modes"] = modes;
    o["ratios"] = plan.ratios;
    o["seed"] = plan.seed;
    o["sea"] = sea_to_json(plan.sea);
    ordered_json step;
    step["kind"] = plan.step_rule.kind == StepRule::Kind::gradient_scaled ? "gradient_scaled"
                                                                          : "fixed";
    step["value"] = plan.step_rule.value;
    o["step_rule"] = step;
    o["baseline_alpha"] = plan.baseline_alpha;
    ordered_json transfer;
    transfer["ratio"] = plan.transfer.ratio;
    transfer["node2vec_p"] = plan.transfer.node2vec_p;
    transfer["node2vec_q"] = plan.transfer.node2vec_q;
    transfer["embedding"] = embedding_to_json(plan.transfer.embedding);
    ordered_json regressor;
    regressor["epochs"] = plan.transfer.regressor.epochs;
    regressor["learning_rate"] = plan.transfer.regressor.learning_rate;
    transfer["regressor"] = regressor;
    ordered_json gcn;
    gcn["layers"] = plan.transfer.gcn.layers;
    gcn["hidden"] = plan.transfer.gcn.hidden;
    gcn["learning_rate"] = plan.transfer.gcn.learning_rate;
    gcn["epochs"] = plan.transfer.gcn.epochs;
    transfer["gcn"] = gcn;
    o["transfer"] = transfer;
    return o;
}

}  // namespace

void TransferConfig::validate() const {
    if (!(ratio > 0.0) || ratio > 1.0) {
        throw ValidationError("transfer: ratio must lie in (0, 1]");
    }
    if (!(node2vec_p > 0.0) || !(node2vec_q > 0.0)) {
        throw ValidationError("transfer: node2vec p and q must be positive");
    }
    embedding.validate();
    regressor.validate();
    gcn.validate();
}

void ExperimentPlan::validate() const {
    if (dataset.empty()) throw ValidationError("plan: dataset must be set");
    if (!(test_fraction > 0.0) || !(test_fraction < 1.0)) {
        throw ValidationError("plan: test_fraction must lie in (0, 1)");
    }
    if (num_targets < 1) throw ValidationError("plan: num_targets must be >= 1");
    if (num_repeats < 1) throw ValidationError("plan: num_repeats must be >= 1");
    for (const std::string& a : attacks) {
        if (a != "rda" && a != "sa-cn" && a != "iga-lwp") {
            throw ValidationError("plan: unknown attack '" + a + "'");
        }
    }
    for (const double r : ratios) {
        if (!(r > 0.0) || r > 1.0) throw ValidationError("plan: ratios must lie in (0, 1]");
    }
    if (!(baseline_alpha >= 0.0)) throw ValidationError("plan: baseline_alpha must be >= 0");
    sea.validate();
    step_rule.validate();
    transfer.validate();
}

std::string ExperimentPlan::canonical_json() const {
    return plan_to_obj(*this).dump();
}

std::string ExperimentPlan::config_hash() const {
    return to_hex(fnv1a64(canonical_json()));
}

ExperimentPlan ExperimentPlan::from_json(const std::string& text) {
    json obj;
    try {
        obj = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("plan: invalid JSON: ") + e.what());
    }
    if (!obj.is_object()) throw ParseError("plan: top level must be a JSON object");
    try {
        return plan_from_obj(std::move(obj));
    } catch (const json::exception& e) {
        throw ParseError(std::string("plan: bad field type: ") + e.what());
    }
}

WeightedGraph load_dataset(const std::string& spec) {
    constexpr const char* kPrefix = "synth:";
    if (spec.rfind(kPrefix, 0) == 0) {
        return make_synthetic(synth_preset(spec.substr(6)));
    }
    return load_edge_list(spec).graph;
}

int budget_for(double ratio, int degree_sum) {
    return std::max(1, static_cast<int>(std::lround(ratio * degree_sum)));
}

ExperimentResult run_experiment(const ExperimentPlan& plan,
                                std::vector<AdversarialCell>* capture) {
    plan.validate();
    const WeightedGraph graph = normalize_weights(load_dataset(plan.dataset));
    const std::string hash = plan.config_hash();

    ExperimentResult result;
    result.plan = plan;

    for (int repeat = 0; repeat < plan.num_repeats; ++repeat) {
        EvalReport base;
        base.dataset = plan.dataset;
        base.repeat = repeat;
        base.split_seed = split_seed_for(plan, repeat);
        base.config_hash = hash;
        base.timestamp = timestamp_utc();

        SeaConfig sea_cfg = plan.sea;
        sea_cfg.seed = sea_seed_for(plan, repeat);

        ObservedSplit split;
        TrainResult trained;
        TargetSpec targets;
        try {
            split = split_train_test(graph, plan.test_fraction, base.split_seed);
            trained = train_sea(split, sea_cfg);
            targets = TargetSpec::sample(split, plan.num_targets, target_seed_for(plan, repeat));
        } catch (const std::exception& e) {
            EvalReport failed = base;
            failed.error = e.what();
            result.reports.push_back(std::move(failed));
            continue;
        }

        std::vector<double> y;
        y.reserve(targets.targets.size());
        for (const Target& t : targets.targets) y.push_back(t.true_weight);

        {
            const SeaContext ctx(split.observed);
            EvalReport clean = base;
            clean.y = y;
            for (const Target& t : targets.targets) {
                clean.y_hat.push_back(predict_weight(ctx, trained.params, sea_cfg, t.u, t.v));
            }
            finish_metrics(clean);
            result.reports.push_back(std::move(clean));
        }

        for (const AttackMode mode : plan.modes) {
            for (const std::string& attack : plan.attacks) {
                for (const double ratio : plan.ratios) {
                    EvalReport cell = base;
                    cell.attack = attack;
                    cell.mode = to_string(mode);
                    cell.ratio = ratio;
                    try {
                        cell.y = y;
                        for (std::size_t ti = 0; ti < targets.targets.size(); ++ti) {
                            const Target& t = targets.targets[ti];
                            const int budget = budget_for(ratio, targets.degree_sums[ti]);
                            WeightedGraph adv = craft_adversarial(
                                plan, attack, split.observed, trained.params, sea_cfg, t, mode,
                                budget, cell_seed_for(plan, repeat, attack, mode, ratio, ti));
                            const SeaContext ctx(adv);
                            cell.y_hat.push_back(
                                predict_weight(ctx, trained.params, sea_cfg, t.u, t.v));
                            if (capture != nullptr) {
                                capture->push_back({attack, mode, ratio, repeat,
                                                    static_cast<int>(ti), t, std::move(adv)});
                            }
                        }
                        finish_metrics(cell);
                    } catch (const std::exception& e) {
                        cell.y.clear();
                        cell.y_hat.clear();
                        cell.pcc = std::nullopt;
                        cell.rmse = 0.0;
                        cell.error = e.what();
                    }
                    result.reports.push_back(std::move(cell));
                }
            }
        }
    }
    return result;
}

ExperimentResult run_transfer(const ExperimentPlan& plan,
                              const std::vector<AdversarialCell>& cells) {
    plan.validate();
    const WeightedGraph graph = normalize_weights(load_dataset(plan.dataset));
    const std::string hash = plan.config_hash();

    // repeat -> attack -> target index -> crafted graph
    std::map<int, std::map<std::string, std::map<int, const WeightedGraph*>>> crafted;
    for (const AdversarialCell& cell : cells) {
        if (cell.mode != AttackMode::local) continue;
        if (std::abs(cell.ratio - plan.transfer.ratio) > 1e-12) continue;
        crafted[cell.repeat][cell.attack][cell.target_index] = &cell.graph;
    }

    ExperimentResult result;
    result.plan = plan;
    const std::vector<std::string> predictors = {"deepwalk", "node2vec", "gcn"};

    for (int repeat = 0; repeat < plan.num_repeats; ++repeat) {
        EvalReport base;
        base.dataset = plan.dataset;
        base.repeat = repeat;
        base.split_seed = split_seed_for(plan, repeat);
        base.config_hash = hash;
        base.timestamp = timestamp_utc();

        ObservedSplit split;
        TargetSpec targets;
        Eigen::MatrixXd deepwalk_emb;
        Eigen::MatrixXd node2vec_emb;
        try {
            split = split_train_test(graph, plan.test_fraction, base.split_seed);
            targets = TargetSpec::sample(split, plan.num_targets, target_seed_for(plan, repeat));

            // The attacks only move weights, so one walk corpus per repeat
            // serves every condition and target.
            EmbeddingConfig walk_cfg = plan.transfer.embedding;
            walk_cfg.p = 1.0;
            walk_cfg.q = 1.0;
            walk_cfg.seed = mix_seed(plan.seed, 0x20000u + 2u * static_cast<std::uint64_t>(repeat));
            deepwalk_emb =
                train_skipgram(random_walks(split.observed, walk_cfg), graph.node_count(), walk_cfg)
                    .embeddings;

            walk_cfg.p = plan.transfer.node2vec_p;
            walk_cfg.q = plan.transfer.node2vec_q;
            walk_cfg.seed =
                mix_seed(plan.seed, 0x20000u + 2u * static_cast<std::uint64_t>(repeat) + 1);
            node2vec_emb =
                train_skipgram(random_walks(split.observed, walk_cfg), graph.node_count(), walk_cfg)
                    .embeddings;
        } catch (const std::exception& e) {
            EvalReport failed = base;
            failed.predictor = "transfer";
            failed.error = e.what();
            result.reports.push_back(std::move(failed));
            continue;
        }

        std::vector<double> y;
        y.reserve(targets.targets.size());
        for (const Target& t : targets.targets) y.push_back(t.true_weight);

        GcnConfig gcn_cfg = plan.transfer.gcn;
        gcn_cfg.seed = mix_seed(plan.seed, 0x30000u + static_cast<std::uint64_t>(repeat));

        const auto fit = [&](const std::string& predictor,
                             const WeightedGraph& on) -> std::function<double(int, int)> {
            if (predictor == "gcn") {
                auto model = std::make_shared<GcnModel>(train_gcn(on, gcn_cfg));
                return [model](int u, int v) { return model->predict(u, v); };
            }
            const Eigen::MatrixXd& emb = predictor == "deepwalk" ? deepwalk_emb : node2vec_emb;
            auto model = std::make_shared<LinkRegressor>(
                fit_embedding_regressor(emb, on.edges(), plan.transfer.regressor));
            return [model](int u, int v) { return model->predict(u, v); };
        };

        std::vector<std::string> conditions = {"original"};
        conditions.insert(conditions.end(), plan.attacks.begin(), plan.attacks.end());

        for (const std::string& predictor : predictors) {
            for (const std::string& condition : conditions) {
                EvalReport report = base;
                report.predictor = predictor;
                report.attack = condition;
                report.mode = condition == "original" ? "none" : to_string(AttackMode::local);
                report.ratio = condition == "original" ? 0.0 : plan.transfer.ratio;
                try {
                    report.y = y;
                    if (condition == "original") {
                        const auto predict = fit(predictor, split.observed);
                        for (const Target& t : targets.targets) {
                            report.y_hat.push_back(predict(t.u, t.v));
                        }
                    } else {
                        for (std::size_t ti = 0; ti < targets.targets.size(); ++ti) {
                            const auto by_attack = crafted.find(repeat);
                            const WeightedGraph* adv = nullptr;
                            if (by_attack != crafted.end()) {
                                const auto by_target = by_attack->second.find(condition);
                                if (by_target != by_attack->second.end()) {
                                    const auto hit = by_target->second.find(static_cast<int>(ti));
                                    if (hit != by_target->second.end()) adv = hit->second;
                                }
                            }
                            if (adv == nullptr) {
                                throw ValidationError("no adversarial graph supplied for " +
                                                      condition + " repeat " +
                                                      std::to_string(repeat) + " target " +
                                                      std::to_string(ti));
                            }
                            const Target& t = targets.targets[ti];
                            report.y_hat.push_back(fit(predictor, *adv)(t.u, t.v));
                        }
                    }
                    finish_metrics(report);
                } catch (const std::exception& e) {
                    report.y.clear();
                    report.y_hat.clear();
                    report.pcc = std::nullopt;
                    report.rmse = 0.0;
                    report.error = e.what();
                }
                result.reports.push_back(std::move(report));
            }
        }
    }
    return result;
}

std::vector<SummaryRow> summarize(const std::vector<EvalReport>& reports) {
    using Key = std::tuple<std::string, std::string, std::string, std::string, double>;
    std::map<Key, std::vector<const EvalReport*>> groups;
    for (const EvalReport& r : reports) {
        if (!r.ok()) continue;
        groups[{r.dataset, r.predictor, r.attack, r.mode, r.ratio}].push_back(&r);
    }

    std::vector<SummaryRow> rows;
    for (const auto& [key, group] : groups) {
        SummaryRow base;
        base.dataset = std::get<0>(key);
        base.predictor = std::get<1>(key);
        base.attack = std::get<2>(key);
        base.mode = std::get<3>(key);
        base.ratio = std::get<4>(key);
        const std::string prefix = base.predictor == "sea" ? "" : base.predictor + "_";

        std::vector<double> rmses;
        std::vector<double> pccs;
        std::vector<double> pooled_y;
        std::vector<double> pooled_y_hat;
        for (const EvalReport* r : group) {
            rmses.push_back(r->rmse);
            if (r->pcc) pccs.push_back(*r->pcc);
            pooled_y.insert(pooled_y.end(), r->y.begin(), r->y.end());
            pooled_y_hat.insert(pooled_y_hat.end(), r->y_hat.begin(), r->y_hat.end());
        }

        SummaryRow rmse_row = base;
        rmse_row.metric = prefix + "rmse";
        rmse_row.mean = mean(rmses);
        rmse_row.std_dev = sample_std(rmses);
        rmse_row.n_runs = static_cast<int>(rmses.size());
        rows.push_back(std::move(rmse_row));

        if (!pccs.empty()) {
            SummaryRow run_row = base;
            run_row.metric = prefix + "pcc_run_mean";
            run_row.mean = mean(pccs);
            run_row.std_dev = sample_std(pccs);
            run_row.n_runs = static_cast<int>(pccs.size());
            rows.push_back(std::move(run_row));
        }

        if (pooled_y.size() >= 2) {
            if (const auto pooled = pcc(pooled_y, pooled_y_hat)) {
                SummaryRow pooled_row = base;
                pooled_row.metric = prefix + "pcc_pooled";
                pooled_row.mean = *pooled;
                pooled_row.std_dev = 0.0;
                pooled_row.n_runs = static_cast<int>(group.size());
                rows.push_back(std::move(pooled_row));
            }
        }
    }
    return rows;
}

namespace {

ordered_json report_to_obj(const EvalReport& r) {
    ordered_json o;
    o["kind"] = "report";
    o["dataset"] = r.dataset;
    o["predictor"] = r.predictor;
    o["attack"] = r.attack;
    o["mode"] = r.mode;
    o["ratio"] = r.ratio;
    o["repeat"] = r.repeat;
    o["split_seed"] = r.split_seed;
    o["config_hash"] = r.config_hash;
    o["timestamp"] = r.timestamp;
    o["y"] = r.y;
    o["y_hat"] = r.y_hat;
    o["pcc"] = r.pcc ? ordered_json(*r.pcc) : ordered_json(nullptr);
    o["rmse"] = r.rmse;
    o["error"] = r.error;
    return o;
}

EvalReport report_from_obj(const json& o) {
    EvalReport r;
    r.dataset = o.at("dataset").get<std::string>();
    r.predictor = o.at("predictor").get<std::string>();
    r.attack = o.at("attack").get<std::string>();
    r.mode = o.at("mode").get<std::string>();
    r.ratio = o.at("ratio").get<double>();
    r.repeat = o.at("repeat").get<int>();
    r.split_seed = o.at("split_seed").get<std::uint64_t>();
    r.config_hash = o.at("config_hash").get<std::string>();
    r.timestamp = o.at("timestamp").get<std::string>();
    r.y = o.at("y").get<std::vector<double>>();
    r.y_hat = o.at("y_hat").get<std::vector<double>>();
    if (!o.at("pcc").is_null()) r.pcc = o.at("pcc").get<double>();
    r.rmse = o.at("rmse").get<double>();
    r.error = o.at("error").get<std::string>();
    return r;
}

}  // namespace

void write_reports_jsonl(const ExperimentResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open '" + path + "' for writing");
    ordered_json header;
    header["kind"] = "plan";
    header["plan"] = plan_to_obj(result.plan);
    out << header.dump() << '\n';
    for (const EvalReport& r : result.reports) {
        out << report_to_obj(r).dump() << '\n';
    }
    if (!out) throw ValidationError("failed writing '" + path + "'");
}

ExperimentResult read_reports_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path + "'");

    ExperimentResult result;
    std::string line;
    int line_no = 0;
    bool have_plan = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json obj;
        try {
            obj = json::parse(line);
            const std::string kind = obj.at("kind").get<std::string>();
            if (kind == "plan") {
                result.plan = plan_from_obj(obj.at("plan"));
                have_plan = true;
            } else if (kind == "report") {
                result.reports.push_back(report_from_obj(obj));
            } else {
                throw ParseError("unknown record kind '" + kind + "'");
            }
        } catch (const json::exception& e) {
            throw ParseError(path + " line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!have_plan) throw ParseError(path + ": missing plan header line");
    return result;
}

void write_summary_csv(const std::vector<SummaryRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open '" + path + "' for writing");
    out << "dataset,attack,mode,ratio,metric,mean,std,n_runs\n";
    char buf[160];
    for (const SummaryRow& row : rows) {
        std::snprintf(buf, sizeof buf, "%.10g,%s,%.10g,%.10g,%d", row.ratio, row.metric.c_str(),
                      row.mean, row.std_dev, row.n_runs);
        out << row.dataset << ',' << row.attack << ',' << row.mode << ',' << buf << '\n';
    }
    if (!out) throw ValidationError("failed writing '" + path + "'");
}

}  // namespace lwp
