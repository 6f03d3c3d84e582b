// driftboost: gradient-boosted trees with cross-domain model revision.
//
// Subcommands: synth, train, predict, evaluate, analyze, transfer, grid.
// Exit codes: 0 success, 2 usage error, 1 runtime error.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "driftboost/boosting.hpp"
#include "driftboost/dataset.hpp"
#include "driftboost/metrics.hpp"
#include "driftboost/model_io.hpp"
#include "driftboost/synth.hpp"
#include "driftboost/text.hpp"
#include "driftboost/workflow.hpp"

namespace db = driftboost;

namespace {

struct SharedTrainFlags {
    double shrinkage = 0.1;
    double l2_reg = 1.0;
    double leaf_penalty = 0.0;
    int min_child = 1;
    double min_gain = 0.0;
    double subsample = 1.0;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--shrinkage", shrinkage, "Learning rate applied to leaf weights");
        cmd->add_option("--lambda", l2_reg, "L2 regularization on leaf weights");
        cmd->add_option("--eta", leaf_penalty, "Penalty per additional leaf");
        cmd->add_option("--min-child", min_child, "Minimum samples per child");
        cmd->add_option("--min-gain", min_gain, "Minimum gain to accept a split");
        cmd->add_option("--subsample", subsample, "Row subsample fraction per tree");
    }

    db::TrainConfig config(int trees, int depth, std::uint64_t seed) const {
        db::TrainConfig cfg;
        cfg.num_trees = trees;
        cfg.max_depth = depth;
        cfg.shrinkage = shrinkage;
        cfg.l2_reg = l2_reg;
        cfg.leaf_penalty = leaf_penalty;
        cfg.min_child_samples = min_child;
        cfg.min_split_gain = min_gain;
        cfg.row_subsample = subsample;
        cfg.seed = seed;
        return cfg;
    }
};

struct ReviseFlags {
    std::string resplit = "gain";
    std::string reweight = "on";
    std::string rare = "discount";
    long long min_samples = 30;
    double discount = 0.1;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--resplit", resplit, "Threshold revision: gain, fractile or off")
            ->check(CLI::IsMember({"gain", "fractile", "off"}));
        cmd->add_option("--reweight", reweight, "Leaf re-weighting: on or off")
            ->check(CLI::IsMember({"on", "off"}));
        cmd->add_option("--rare", rare, "Rare-branch policy: prune or discount")
            ->check(CLI::IsMember({"prune", "discount"}));
        cmd->add_option("--min-samples", min_samples,
                        "Least sample count before a branch counts as rare");
        cmd->add_option("--discount", discount, "Weight discount for rare branches");
    }

    db::ReviseConfig config(const SharedTrainFlags& train) const {
        db::ReviseConfig cfg;
        cfg.resplit_mode = resplit == "gain"       ? db::ResplitMode::gain_based
                           : resplit == "fractile" ? db::ResplitMode::fractile
                                                   : db::ResplitMode::off;
        cfg.reweight = reweight == "on";
        cfg.rare_branch_policy = rare == "prune" ? db::RareBranchPolicy::prune
                                                 : db::RareBranchPolicy::discount;
        cfg.min_samples_threshold = min_samples;
        cfg.discount_factor = discount;
        cfg.l2_reg = train.l2_reg;
        cfg.leaf_penalty = train.leaf_penalty;
        cfg.shrinkage = train.shrinkage;
        return cfg;
    }
};

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string metrics_line(const db::Ensemble& model, const db::Dataset& test,
                         double fraction) {
    const std::vector<double> margins = db::predict_margins(model, test);
    const double auc_value = db::auc(margins, test.labels());
    const double recall = db::top_recall(margins, test.labels(), fraction);
    return "auc=" + db::format_double(auc_value) + "\ttop_recall@" +
           db::format_double(fraction) + "=" + db::format_double(recall);
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
    std::string out_source, out_target;
    long long n_source = 10000, n_target = 10000;
    long long features = 10, informative = 3;
    std::string coef = "3,-2.5,2";
    double intercept = -1.0;
    std::string mode = "scale";
    std::string drift_features;
    double scale_a = 2.0, scale_b = 0.0;
    double mix_weight = 0.5;
    double mix_a1 = 1.0, mix_b1 = 0.0, mix_a2 = 1.0, mix_b2 = 3.0;
    double noise = 0.8;
    double flip_rate = 0.0;
    std::uint64_t seed = 0;
};

int cmd_synth(const SynthArgs& args) {
    db::GeneratorSpec gen;
    gen.feature_count = static_cast<std::size_t>(args.features);
    gen.informative.clear();
    gen.coefficients.clear();
    for (long long i = 0; i < args.informative; ++i)
        gen.informative.push_back(static_cast<std::size_t>(i));
    for (auto tok : db::split(args.coef, ',')) {
        double v;
        if (!db::parse_double(db::trim(tok), v))
            throw std::runtime_error("bad coefficient list: " + args.coef);
        gen.coefficients.push_back(v);
    }
    gen.intercept = args.intercept;

    db::DriftSpec drift;
    drift.seed = args.seed;
    drift.label_flip_rate = args.flip_rate;
    std::vector<std::size_t> drifted;
    if (!args.drift_features.empty())
        for (auto tok : db::split(args.drift_features, ',')) {
            long long idx;
            if (!db::parse_int(db::trim(tok), idx))
                throw std::runtime_error("bad drift feature list: " + args.drift_features);
            drifted.push_back(static_cast<std::size_t>(idx));
        }
    if (args.mode == "scale") {
        drift.mode = db::DriftMode::scale;
        for (std::size_t f : drifted)
            drift.scale_params[f] = {args.scale_a, args.scale_b};
    } else if (args.mode == "shape") {
        drift.mode = db::DriftMode::shape;
        for (std::size_t f : drifted)
            drift.shape_params[f] = {args.mix_weight,
                                     {args.mix_a1, args.mix_b1},
                                     {args.mix_a2, args.mix_b2}};
    } else if (args.mode == "efficacy") {
        drift.mode = db::DriftMode::efficacy_loss;
        for (std::size_t f : drifted) drift.noise_levels[f] = args.noise;
    } else {
        drift.mode = db::DriftMode::label_drift;
    }

    auto [source, target] = db::synth_domain_pair(
        gen, drift, static_cast<std::size_t>(args.n_source),
        static_cast<std::size_t>(args.n_target));
    db::write_csv(source, args.out_source);
    db::write_csv(target, args.out_target);
    std::cout << "wrote " << source.row_count() << " source rows (bad rate "
              << db::format_double(source.bad_rate()) << ") and " << target.row_count()
              << " target rows (bad rate " << db::format_double(target.bad_rate())
              << ")\n";
    return 0;
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
    std::string data, label_col = "label", base, out;
    long long trees = 100, depth = 5;
    std::uint64_t seed = 0;
    SharedTrainFlags shared;
};

int cmd_train(const TrainArgs& args) {
    const db::Dataset data = db::load_csv(args.data, args.label_col);
    db::TrainConfig cfg = args.shared.config(static_cast<int>(args.trees),
                                             static_cast<int>(args.depth), args.seed);
    std::optional<db::Ensemble> base;
    if (!args.base.empty()) base = db::load_model(args.base);

    std::vector<double> losses;
    db::Ensemble model = db::train(data, cfg, base ? &*base : nullptr, &losses);
    for (std::size_t i = 0; i < losses.size(); ++i)
        std::cout << "iter " << i << "\tlogloss " << db::format_double(losses[i]) << "\n";
    db::save_model(model, args.out);
    std::cout << "wrote " << model.trees.size() << " trees to " << args.out << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// predict / evaluate

struct PredictArgs {
    std::string model, data, label_col = "label", out;
};

int cmd_predict(const PredictArgs& args) {
    const db::Ensemble model = db::load_model(args.model);
    const db::Dataset data = db::load_csv(args.data, args.label_col);
    std::ostringstream rows;
    rows << "margin,probability\n";
    for (std::size_t i = 0; i < data.row_count(); ++i) {
        const double margin = db::predict_margin(model, data.row(i));
        rows << db::format_double(margin) << ','
             << db::format_double(db::margin_to_prob(margin)) << '\n';
    }
    if (args.out.empty())
        std::cout << rows.str();
    else
        write_text_file(args.out, rows.str());
    return 0;
}

struct EvaluateArgs {
    std::string model, data, label_col = "label";
    double fraction = 1e-4;
};

int cmd_evaluate(const EvaluateArgs& args) {
    const db::Ensemble model = db::load_model(args.model);
    const db::Dataset data = db::load_csv(args.data, args.label_col);
    std::cout << metrics_line(model, data, args.fraction) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeArgs {
    std::string source, target, label_col = "label", out, json_out;
    int bins = 10;
};

int cmd_analyze(const AnalyzeArgs& args) {
    const db::Dataset source = db::load_csv(args.source, args.label_col);
    const db::Dataset target = db::load_csv(args.target, args.label_col);
    const db::DriftReport report = db::drift_report(source, target, args.bins);
    const std::string table = db::drift_report_table(report);
    if (args.out.empty())
        std::cout << table;
    else
        write_text_file(args.out, table);

    if (!args.json_out.empty()) {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& row : report.rows) {
            nlohmann::json r;
            r["feat_id"] = row.name;
            r["deciles_s"] = row.deciles_s;
            r["deciles_t"] = row.deciles_t;
            r["IV_s"] = row.iv_s;
            r["IV_t"] = row.iv_t;
            r["rank_s"] = row.rank_s;
            r["rank_t"] = row.rank_t;
            r["rank_diff"] = row.rank_diff;
            j.push_back(std::move(r));
        }
        write_text_file(args.json_out, j.dump(2) + "\n");
    }
    return 0;
}

// ---------------------------------------------------------------------------
// transfer

struct TransferArgs {
    std::string workflow;
    std::string source, target, test, label_col = "label";
    long long src_trees = 10, src_depth = 5, tgt_trees = 100, tgt_depth = 5;
    std::uint64_t seed = 0;
    SharedTrainFlags shared;
    ReviseFlags revise;
    std::string out, trace;
    bool exchange_via_file = false;
    double fraction = 1e-4;
};

int cmd_transfer(const TransferArgs& args) {
    const db::Dataset target = db::load_csv(args.target, args.label_col);

    db::WorkflowConfig wcfg;
    wcfg.source_train = args.shared.config(static_cast<int>(args.src_trees),
                                           static_cast<int>(args.src_depth), args.seed);
    wcfg.target_train = args.shared.config(static_cast<int>(args.tgt_trees),
                                           static_cast<int>(args.tgt_depth), args.seed);
    wcfg.revise = args.revise.config(args.shared);
    wcfg.exchange_via_file = args.exchange_via_file;

    db::TransferResult result;
    if (args.workflow == "baseline1") {
        // target-only training; source-side flags are ignored
        result.model = db::train(target, wcfg.target_train);
    } else {
        if (args.source.empty())
            throw std::runtime_error("workflow " + args.workflow + " needs --source");
        const db::Dataset source = db::load_csv(args.source, args.label_col);
        if (args.workflow == "baseline2") {
            // transfer without any revision
            wcfg.revise.resplit_mode = db::ResplitMode::off;
            wcfg.revise.reweight = false;
            result = db::one_round(source, target, wcfg);
        } else if (args.workflow == "oneround") {
            result = db::one_round(source, target, wcfg);
        } else {
            result = db::multi_round(source, target, wcfg);
        }
    }

    db::save_model(result.model, args.out);
    if (!args.trace.empty()) write_text_file(args.trace, db::trace_table(result.traces));
    if (!args.test.empty()) {
        const db::Dataset test = db::load_csv(args.test, args.label_col);
        std::cout << metrics_line(result.model, test, args.fraction) << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// grid

struct GridConfig {
    std::string source, target, test, label_col = "label";
    std::vector<std::string> workflows = {"baseline1"};
    std::vector<int> src_depths = {3, 4, 5};
    std::vector<int> src_trees = {2, 4, 6, 8, 10, 20, 30, 40, 60, 80};
    std::vector<int> tgt_trees = {40, 80, 120, 160, 200, 240};
    int tgt_depth = 5;
    int repeat = 1;
    std::uint64_t seed = 0;
    double fraction = 1e-4;
    SharedTrainFlags shared;
    ReviseFlags revise;
    std::string out, detail_out;
};

std::vector<int> parse_int_list(const std::string& text, const std::string& key) {
    std::vector<int> out;
    for (auto tok : db::split(text, ',')) {
        long long v;
        if (!db::parse_int(db::trim(tok), v))
            throw std::runtime_error("bad integer list for " + key + ": " + text);
        out.push_back(static_cast<int>(v));
    }
    if (out.empty()) throw std::runtime_error("empty list for " + key);
    return out;
}

GridConfig load_grid_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    GridConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto text = db::trim(line);
        if (text.empty() || text[0] == '#') continue;
        auto eq = text.find('=');
        if (eq == std::string_view::npos)
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected key=value");
        const std::string key{db::trim(text.substr(0, eq))};
        const std::string value{db::trim(text.substr(eq + 1))};
        double dv;
        long long iv;
        if (key == "source") cfg.source = value;
        else if (key == "target") cfg.target = value;
        else if (key == "test") cfg.test = value;
        else if (key == "label_col") cfg.label_col = value;
        else if (key == "workflows") {
            cfg.workflows.clear();
            for (auto tok : db::split(value, ','))
                cfg.workflows.emplace_back(db::trim(tok));
        } else if (key == "src_depth") cfg.src_depths = parse_int_list(value, key);
        else if (key == "src_trees") cfg.src_trees = parse_int_list(value, key);
        else if (key == "tgt_trees") cfg.tgt_trees = parse_int_list(value, key);
        else if (key == "tgt_depth" && db::parse_int(value, iv)) cfg.tgt_depth = static_cast<int>(iv);
        else if (key == "repeat" && db::parse_int(value, iv)) cfg.repeat = static_cast<int>(iv);
        else if (key == "seed" && db::parse_int(value, iv)) cfg.seed = static_cast<std::uint64_t>(iv);
        else if (key == "fraction" && db::parse_double(value, dv)) cfg.fraction = dv;
        else if (key == "shrinkage" && db::parse_double(value, dv)) cfg.shared.shrinkage = dv;
        else if (key == "lambda" && db::parse_double(value, dv)) cfg.shared.l2_reg = dv;
        else if (key == "eta" && db::parse_double(value, dv)) cfg.shared.leaf_penalty = dv;
        else if (key == "min_child" && db::parse_int(value, iv)) cfg.shared.min_child = static_cast<int>(iv);
        else if (key == "min_gain" && db::parse_double(value, dv)) cfg.shared.min_gain = dv;
        else if (key == "subsample" && db::parse_double(value, dv)) cfg.shared.subsample = dv;
        else if (key == "resplit") cfg.revise.resplit = value;
        else if (key == "reweight") cfg.revise.reweight = value;
        else if (key == "rare") cfg.revise.rare = value;
        else if (key == "min_samples" && db::parse_int(value, iv)) cfg.revise.min_samples = iv;
        else if (key == "discount" && db::parse_double(value, dv)) cfg.revise.discount = dv;
        else if (key == "out") cfg.out = value;
        else if (key == "detail_out") cfg.detail_out = value;
        else
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": unknown or malformed key '" + key + "'");
    }
    if (cfg.target.empty()) throw std::runtime_error("grid config needs target=");
    if (cfg.test.empty()) throw std::runtime_error("grid config needs test=");
    if (cfg.repeat < 1) throw std::runtime_error("repeat must be >= 1");
    return cfg;
}

struct CellMetrics {
    double auc = 0.0;
    double recall = 0.0;
};

struct SummaryRow {
    std::string model;
    CellMetrics best;
    bool has_best = false;
};

int cmd_grid(const std::string& config_path) {
    GridConfig cfg = load_grid_config(config_path);

    // BM1 is the lift reference and always runs
    if (std::find(cfg.workflows.begin(), cfg.workflows.end(), "baseline1") ==
        cfg.workflows.end())
        cfg.workflows.insert(cfg.workflows.begin(), "baseline1");
    for (const auto& wf : cfg.workflows)
        if (wf != "baseline1" && wf != "baseline2" && wf != "oneround" &&
            wf != "multiround")
            throw std::runtime_error("unknown workflow in config: " + wf);

    const db::Dataset target = db::load_csv(cfg.target, cfg.label_col);
    const db::Dataset test = db::load_csv(cfg.test, cfg.label_col);
    std::optional<db::Dataset> source;
    for (const auto& wf : cfg.workflows)
        if (wf != "baseline1" && !source) {
            if (cfg.source.empty())
                throw std::runtime_error("grid config needs source= for workflow " + wf);
            source = db::load_csv(cfg.source, cfg.label_col);
        }

    std::ofstream detail_file;
    std::ostream* detail = nullptr;
    if (!cfg.detail_out.empty()) {
        detail_file.open(cfg.detail_out, std::ios::trunc);
        if (!detail_file) throw std::runtime_error("cannot write file: " + cfg.detail_out);
        detail = &detail_file;
        *detail << "workflow\tsrc_depth\tsrc_trees\ttgt_trees\tAUC\trecall\n";
        detail->flush();
    }

    auto evaluate_model = [&](const db::Ensemble& model) {
        const std::vector<double> margins = db::predict_margins(model, test);
        return CellMetrics{db::auc(margins, test.labels()),
                           db::top_recall(margins, test.labels(), cfg.fraction)};
    };

    auto run_cell = [&](const std::string& wf, int src_depth, int src_trees,
                        int tgt_trees) {
        CellMetrics mean;
        for (int rep = 0; rep < cfg.repeat; ++rep) {
            const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(rep);
            db::WorkflowConfig wcfg;
            wcfg.source_train = cfg.shared.config(src_trees, src_depth, seed);
            wcfg.target_train = cfg.shared.config(tgt_trees, cfg.tgt_depth, seed);
            wcfg.revise = cfg.revise.config(cfg.shared);
            CellMetrics m;
            if (wf == "baseline1") {
                m = evaluate_model(db::train(target, wcfg.target_train));
            } else {
                if (wf == "baseline2") {
                    wcfg.revise.resplit_mode = db::ResplitMode::off;
                    wcfg.revise.reweight = false;
                }
                db::TransferResult result = wf == "multiround"
                                                ? db::multi_round(*source, target, wcfg)
                                                : db::one_round(*source, target, wcfg);
                m = evaluate_model(result.model);
            }
            mean.auc += m.auc;
            mean.recall += m.recall;
        }
        mean.auc /= cfg.repeat;
        mean.recall /= cfg.repeat;
        if (detail != nullptr) {
            char row[160];
            std::snprintf(row, sizeof(row), "%s\t%d\t%d\t%d\t%.5f\t%.5f\n", wf.c_str(),
                          src_depth, src_trees, tgt_trees, mean.auc, mean.recall);
            *detail << row;
            detail->flush();
        }
        return mean;
    };

    std::vector<SummaryRow> summary;
    auto record_best = [&](SummaryRow& row, const CellMetrics& m) {
        if (!row.has_best || m.auc > row.best.auc) {
            row.best = m;
            row.has_best = true;
        }
    };

    for (const auto& wf : cfg.workflows) {
        if (wf == "baseline1") {
            SummaryRow row;
            row.model = "BM1";
            for (int tgt : cfg.tgt_trees) record_best(row, run_cell(wf, 0, 0, tgt));
            summary.push_back(row);
            continue;
        }
        const std::string short_name =
            wf == "baseline2" ? "BM2" : (wf == "oneround" ? "OR" : "MR");
        for (int dep : cfg.src_depths) {
            SummaryRow row;
            row.model = short_name + "-dep" + std::to_string(dep);
            for (int st : cfg.src_trees)
                for (int tt : cfg.tgt_trees) record_best(row, run_cell(wf, dep, st, tt));
            summary.push_back(row);
        }
    }

    const SummaryRow* bm1 = nullptr;
    for (const auto& row : summary)
        if (row.model == "BM1") bm1 = &row;

    std::ostringstream table;
    table << "Model\tAUC\tRecall@" << db::format_double(cfg.fraction)
          << "\tAUC Lift\tRecall Lift\n";
    for (const auto& row : summary) {
        const double auc_lift = (row.best.auc - bm1->best.auc) / bm1->best.auc * 100.0;
        const double recall_lift =
            bm1->best.recall > 0.0
                ? (row.best.recall - bm1->best.recall) / bm1->best.recall * 100.0
                : 0.0;
        char line[160];
        std::snprintf(line, sizeof(line), "%s\t%.5f\t%.5f\t%.3f%%\t%.3f%%\n",
                      row.model.c_str(), row.best.auc, row.best.recall, auc_lift,
                      recall_lift);
        table << line;
    }
    if (cfg.out.empty())
        std::cout << table.str();
    else
        write_text_file(cfg.out, table.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gradient-boosted trees with cross-domain model revision"};
    app.require_subcommand(1);

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a drifted two-domain dataset pair");
    synth_cmd->add_option("--out-source", synth.out_source)->required();
    synth_cmd->add_option("--out-target", synth.out_target)->required();
    synth_cmd->add_option("--n-source", synth.n_source);
    synth_cmd->add_option("--n-target", synth.n_target);
    synth_cmd->add_option("--features", synth.features);
    synth_cmd->add_option("--informative", synth.informative);
    synth_cmd->add_option("--coef", synth.coef, "Comma list of logistic coefficients");
    synth_cmd->add_option("--intercept", synth.intercept);
    synth_cmd->add_option("--mode", synth.mode, "scale, shape, efficacy or label")
        ->check(CLI::IsMember({"scale", "shape", "efficacy", "label"}));
    synth_cmd->add_option("--drift-features", synth.drift_features,
                          "Comma list of feature indices the drift applies to");
    synth_cmd->add_option("--scale-a", synth.scale_a);
    synth_cmd->add_option("--scale-b", synth.scale_b);
    synth_cmd->add_option("--mix-weight", synth.mix_weight);
    synth_cmd->add_option("--mix-a1", synth.mix_a1);
    synth_cmd->add_option("--mix-b1", synth.mix_b1);
    synth_cmd->add_option("--mix-a2", synth.mix_a2);
    synth_cmd->add_option("--mix-b2", synth.mix_b2);
    synth_cmd->add_option("--noise", synth.noise);
    synth_cmd->add_option("--flip-rate", synth.flip_rate);
    synth_cmd->add_option("--seed", synth.seed);

    TrainArgs train;
    auto* train_cmd = app.add_subcommand("train", "Train a boosted tree model");
    train_cmd->add_option("--data", train.data)->required();
    train_cmd->add_option("--label-col", train.label_col);
    train_cmd->add_option("--trees", train.trees);
    train_cmd->add_option("--depth", train.depth);
    train_cmd->add_option("--seed", train.seed);
    train_cmd->add_option("--base", train.base, "Continue training from this model");
    train_cmd->add_option("--out", train.out)->required();
    train.shared.add_to(train_cmd);

    PredictArgs predict;
    auto* predict_cmd = app.add_subcommand("predict", "Score rows with a model");
    predict_cmd->add_option("--model", predict.model)->required();
    predict_cmd->add_option("--data", predict.data)->required();
    predict_cmd->add_option("--label-col", predict.label_col);
    predict_cmd->add_option("--out", predict.out, "Output CSV (stdout when omitted)");

    EvaluateArgs evaluate;
    auto* eval_cmd = app.add_subcommand("evaluate", "AUC and top-fraction recall");
    eval_cmd->add_option("--model", evaluate.model)->required();
    eval_cmd->add_option("--data", evaluate.data)->required();
    eval_cmd->add_option("--label-col", evaluate.label_col);
    eval_cmd->add_option("--fraction", evaluate.fraction);

    AnalyzeArgs analyze;
    auto* analyze_cmd = app.add_subcommand("analyze", "Per-feature drift report");
    analyze_cmd->add_option("--source", analyze.source)->required();
    analyze_cmd->add_option("--target", analyze.target)->required();
    analyze_cmd->add_option("--label-col", analyze.label_col);
    analyze_cmd->add_option("--bins", analyze.bins);
    analyze_cmd->add_option("--out", analyze.out, "Report table (stdout when omitted)");
    analyze_cmd->add_option("--json", analyze.json_out, "Full report incl. deciles");

    TransferArgs transfer;
    auto* transfer_cmd =
        app.add_subcommand("transfer", "Two-domain training workflows");
    transfer_cmd->add_option("--workflow", transfer.workflow)
        ->required()
        ->check(CLI::IsMember({"baseline1", "baseline2", "oneround", "multiround"}));
    transfer_cmd->add_option("--source", transfer.source);
    transfer_cmd->add_option("--target", transfer.target)->required();
    transfer_cmd->add_option("--test", transfer.test);
    transfer_cmd->add_option("--label-col", transfer.label_col);
    transfer_cmd->add_option("--src-trees", transfer.src_trees);
    transfer_cmd->add_option("--src-depth", transfer.src_depth);
    transfer_cmd->add_option("--tgt-trees", transfer.tgt_trees);
    transfer_cmd->add_option("--tgt-depth", transfer.tgt_depth);
    transfer_cmd->add_option("--seed", transfer.seed);
    transfer_cmd->add_option("--out", transfer.out)->required();
    transfer_cmd->add_option("--trace", transfer.trace, "Revision trace table path");
    transfer_cmd->add_flag("--exchange-via-file", transfer.exchange_via_file,
                           "Round-trip models through disk between domains");
    transfer_cmd->add_option("--fraction", transfer.fraction);
    transfer.shared.add_to(transfer_cmd);
    transfer.revise.add_to(transfer_cmd);

    std::string grid_config;
    auto* grid_cmd = app.add_subcommand("grid", "Grid-search experiment from a config file");
    grid_cmd->add_option("--config", grid_config)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*synth_cmd) return cmd_synth(synth);
        if (*train_cmd) return cmd_train(train);
        if (*predict_cmd) return cmd_predict(predict);
        if (*eval_cmd) return cmd_evaluate(evaluate);
        if (*analyze_cmd) return cmd_analyze(analyze);
        if (*transfer_cmd) return cmd_transfer(transfer);
        if (*grid_cmd) return cmd_grid(grid_config);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
