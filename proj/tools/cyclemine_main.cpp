// cyclemine - mine long-term periodic workflows from feature sequences and
// run the three downstream tasks (period detection, completion tracking,
// anomaly localization) plus benchmark generation and evaluation.

#include <CLI11.hpp>

#include <cyclemine/cyclemine.hpp>
#include <cyclemine/pipeline.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>

namespace fs = std::filesystem;
using namespace cyclemine;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

struct CommonOpts {
    std::string k = "auto";
    double buffer = 0.2;
    int top_f = 3;
    int max_joint = 4;
    bool no_rerank = false;
    std::string window_token = "soft";
    int64_t min_anomaly_frames = 3;
    int64_t merge_gap = 5;
    uint64_t seed = 0;
};

MineConfig to_mine_config(const CommonOpts& o) {
    MineConfig cfg;
    if (o.k != "auto") cfg.k = std::stoi(o.k);
    cfg.buffer = o.buffer;
    cfg.period.top_f = o.top_f;
    cfg.period.rerank = !o.no_rerank;
    cfg.period.window_token = o.window_token == "hard" ? WindowToken::hard : WindowToken::soft;
    cfg.mta.max_joint = o.max_joint;
    cfg.seed = o.seed;
    return cfg;
}

ordered_json config_echo(const CommonOpts& o) {
    ordered_json j;
    j["k"] = o.k;
    j["buffer"] = o.buffer;
    j["top_f"] = o.top_f;
    j["max_joint"] = o.max_joint;
    j["rerank"] = !o.no_rerank;
    j["window_token"] = o.window_token;
    j["min_anomaly_frames"] = o.min_anomaly_frames;
    j["merge_gap"] = o.merge_gap;
    j["seed"] = o.seed;
    j["gap_penalty"] = -1; // unused by the scoring; echoed for completeness
    return j;
}

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--k", o.k, "cluster count, or 'auto' for the elbow sweep");
    cmd->add_option("--buffer", o.buffer, "segment buffer fraction")->check(CLI::Range(0.0, 0.49));
    cmd->add_option("--top-f", o.top_f, "dominant frequencies to consider");
    cmd->add_option("--max-joint", o.max_joint, "joint-alignment transcript limit");
    cmd->add_flag("--no-rerank", o.no_rerank, "skip DTW window re-ranking");
    cmd->add_option("--window-token", o.window_token, "token type for window initialization")
        ->check(CLI::IsMember({"soft", "hard"}));
    cmd->add_option("--seed", o.seed, "random seed");
}

int cmd_generate(const std::string& tier_s, int count, uint64_t seed, const std::string& task_s,
                 double gap_scale, const fs::path& out) {
    const Tier tier = tier_s == "clean"      ? Tier::clean
                      : tier_s == "jittered" ? Tier::jittered
                                             : Tier::noisy;
    const Task task = task_s == "period"       ? Task::period
                      : task_s == "completion" ? Task::completion
                                               : Task::anomaly;
    fs::create_directories(out);
    const auto specs = suite_specs(tier, count, seed, task, gap_scale);
    for (const auto& spec : specs) {
        auto [seq, gt] = generate(spec);
        seq.id = spec.id;
        write_sequence(out / (spec.id + ".seq"), seq);
        write_json(out / (spec.id + ".gt.json"), ground_truth_to_json(gt, spec.id, seq.frame_rate));
    }
    std::cout << "wrote " << specs.size() << " sequences to " << out.string() << "\n";
    return kExitOk;
}

int cmd_mine(const fs::path& seq_path, const fs::path& out, const CommonOpts& opts) {
    const FeatureSequence seq = read_sequence(seq_path);
    const MiningResult res = mine(seq, to_mine_config(opts));
    fs::create_directories(out);
    write_json(out / (seq.id + ".mine.json"), mining_result_to_json(res, seq.id, config_echo(opts)));
    std::cout << seq.id << ": count " << res.segmentation.count << ", window " << res.window
              << ", workflow " << res.workflow.display() << "\n";
    return kExitOk;
}

int cmd_track(const fs::path& seq_path, const fs::path& wf_path, const fs::path& out) {
    const FeatureSequence seq = read_sequence(seq_path);
    const MiningDoc doc = mining_doc_from_json(read_json(wf_path));
    const HardTranscript tokens = hard_tokenize(seq, doc.codebook);
    const CompletionEstimate est = track_completion(tokens, doc.workflow, doc.segmentation);
    fs::create_directories(out);
    ordered_json j;
    j["id"] = seq.id;
    j["remaining"] = est.remaining;
    write_json(out / (seq.id + ".track.json"), j);
    std::cout << seq.id << ": remaining " << est.remaining << "\n";
    return kExitOk;
}

int cmd_detect_anomaly(const fs::path& seq_path, const fs::path& wf_path, const fs::path& out,
                       const CommonOpts& opts) {
    const FeatureSequence seq = read_sequence(seq_path);
    const MiningDoc doc = mining_doc_from_json(read_json(wf_path));
    const HardTranscript tokens = hard_tokenize(seq, doc.codebook);
    StreamConfig cfg;
    cfg.min_anomaly_frames = opts.min_anomaly_frames;
    cfg.merge_gap = opts.merge_gap;
    const AnomalyReport rep = detect_stream_anomaly(tokens, doc.segmentation, doc.workflow, cfg);
    fs::create_directories(out);
    ordered_json j;
    j["id"] = seq.id;
    if (rep.interval) {
        j["anomaly"] = {rep.interval->begin, rep.interval->end};
        j["anomaly_seconds"] = {rep.interval->begin / seq.frame_rate,
                                rep.interval->end / seq.frame_rate};
        std::cout << seq.id << ": anomaly frames [" << rep.interval->begin << ", "
                  << rep.interval->end << ") = seconds [" << rep.interval->begin / seq.frame_rate
                  << ", " << rep.interval->end / seq.frame_rate << ")\n";
    } else {
        j["anomaly"] = nullptr;
        std::cout << seq.id << ": no anomaly\n";
    }
    write_json(out / (seq.id + ".anomaly.json"), j);
    return kExitOk;
}

int cmd_evaluate(const fs::path& pred_dir, const fs::path& gt_dir, const fs::path& out_file) {
    std::map<std::string, ordered_json> gts;
    for (const auto& entry : fs::directory_iterator(gt_dir)) {
        const std::string name = entry.path().filename().string();
        const std::string suffix = ".gt.json";
        if (name.size() > suffix.size() && name.ends_with(suffix))
            gts[name.substr(0, name.size() - suffix.size())] = read_json(entry.path());
    }
    if (gts.empty()) throw ParseError("no *.gt.json files in " + gt_dir.string());

    std::vector<std::string> missing;
    std::vector<SequenceEval> evals;
    for (const auto& [id, gt_json] : gts) {
        const GroundTruth gt = ground_truth_from_json(gt_json);
        SequenceEval ev;
        ev.id = id;

        const fs::path mine_path = pred_dir / (id + ".mine.json");
        if (!fs::exists(mine_path)) {
            missing.push_back(id + ".mine.json");
            continue;
        }
        const MiningDoc doc = mining_doc_from_json(read_json(mine_path));
        PeriodSegmentation gt_seg;
        gt_seg.boundaries = gt.boundaries;
        gt_seg.count = gt.count();
        ev.count_error = std::abs(static_cast<double>(doc.segmentation.count) -
                                  static_cast<double>(gt_seg.count)) /
                         static_cast<double>(gt_seg.count);
        ev.tiou_period = tiou_period_sequence(doc.segmentation, gt_seg);

        if (gt.remaining) {
            const fs::path track_path = pred_dir / (id + ".track.json");
            if (!fs::exists(track_path)) {
                missing.push_back(id + ".track.json");
                continue;
            }
            const double est = read_json(track_path).at("remaining").get<double>();
            ev.completion_error = std::abs(est - *gt.remaining);
        }
        if (gt.anomaly) {
            const fs::path an_path = pred_dir / (id + ".anomaly.json");
            if (!fs::exists(an_path)) {
                missing.push_back(id + ".anomaly.json");
                continue;
            }
            const ordered_json aj = read_json(an_path);
            if (aj.at("anomaly").is_null())
                ev.tiou_anomaly = 0.0;
            else
                ev.tiou_anomaly = tiou_interval(Interval(aj["anomaly"][0].get<double>(),
                                                         aj["anomaly"][1].get<double>()),
                                                *gt.anomaly);
        }
        evals.push_back(std::move(ev));
    }
    if (!missing.empty()) {
        std::cerr << "missing prediction files:\n";
        for (const auto& m : missing) std::cerr << "  " << m << "\n";
        return kExitData;
    }

    const EvalReport rep = EvalReport::aggregate(std::move(evals));
    write_json(out_file, eval_report_to_json(rep));
    std::cout << "mape " << rep.mape << "\n"
              << "tiou_period " << rep.tiou_period << "\n"
              << "mae " << rep.mae << "\n"
              << "tiou_anomaly " << rep.tiou_anomaly << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"long-term periodic workflow mining"};
    app.require_subcommand(1);

    std::string tier = "clean", task = "period";
    int count = 1;
    uint64_t gen_seed = 0;
    double gap_scale = 1.0;
    std::string gen_out = ".";
    CLI::App* generate_cmd = app.add_subcommand("generate", "write a synthetic benchmark suite");
    generate_cmd->add_option("--tier", tier, "noise tier")
        ->check(CLI::IsMember({"clean", "jittered", "noisy"}));
    generate_cmd->add_option("--count", count, "number of sequences")->check(CLI::PositiveNumber);
    generate_cmd->add_option("--seed", gen_seed, "suite seed");
    generate_cmd->add_option("--task", task, "benchmark task")
        ->check(CLI::IsMember({"period", "completion", "anomaly"}));
    generate_cmd->add_option("--gap-scale", gap_scale, "centroid separation scale");
    generate_cmd->add_option("--out", gen_out, "output directory");

    CommonOpts mine_opts;
    std::string mine_seq, mine_out = ".";
    CLI::App* mine_cmd = app.add_subcommand("mine", "mine workflow and period boundaries");
    mine_cmd->add_option("--seq", mine_seq, "sequence file")->required();
    mine_cmd->add_option("--out", mine_out, "output directory");
    add_common(mine_cmd, mine_opts);

    std::string track_seq, track_wf, track_out = ".";
    CLI::App* track_cmd = app.add_subcommand("track", "estimate remaining proportion of the open period");
    track_cmd->add_option("--seq", track_seq, "sequence file")->required();
    track_cmd->add_option("--workflow", track_wf, "mined workflow file")->required();
    track_cmd->add_option("--out", track_out, "output directory");

    CommonOpts an_opts;
    std::string an_seq, an_wf, an_out = ".";
    CLI::App* an_cmd = app.add_subcommand("detect-anomaly", "localize a procedural anomaly");
    an_cmd->add_option("--seq", an_seq, "sequence file")->required();
    an_cmd->add_option("--workflow", an_wf, "mined workflow file")->required();
    an_cmd->add_option("--out", an_out, "output directory");
    an_cmd->add_option("--min-anomaly-frames", an_opts.min_anomaly_frames,
                       "shortest reportable deviation run");
    an_cmd->add_option("--merge-gap", an_opts.merge_gap, "merge deviations closer than this");

    std::string eval_pred, eval_gt, eval_out = "eval.json";
    CLI::App* eval_cmd = app.add_subcommand("evaluate", "score predictions against ground truth");
    eval_cmd->add_option("--pred", eval_pred, "prediction directory")->required();
    eval_cmd->add_option("--gt", eval_gt, "ground-truth directory")->required();
    eval_cmd->add_option("--out", eval_out, "report file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e); // prints help, exit 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (generate_cmd->parsed())
            return cmd_generate(tier, count, gen_seed, task, gap_scale, gen_out);
        if (mine_cmd->parsed()) return cmd_mine(mine_seq, mine_out, mine_opts);
        if (track_cmd->parsed()) return cmd_track(track_seq, track_wf, track_out);
        if (an_cmd->parsed()) return cmd_detect_anomaly(an_seq, an_wf, an_out, an_opts);
        if (eval_cmd->parsed()) return cmd_evaluate(eval_pred, eval_gt, eval_out);
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}
