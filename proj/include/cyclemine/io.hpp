#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "core.hpp"
#include "datagen.hpp"
#include "metrics.hpp"
#include "miner.hpp"
#include "stream.hpp"

namespace cyclemine {

using ordered_json = nlohmann::ordered_json;

namespace detail {

inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ParseError("bad number: '" + s + "'");
    return v;
}

} // namespace detail

/// Writes content to path via a temp file + rename so readers never see a
/// partial file.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out) throw IoError("short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// --- sequence files: one header line "n frame_rate id", one frame per line ---

inline std::string encode_sequence(const FeatureSequence& seq) {
    std::string out = std::to_string(seq.dim()) + " " + detail::format_double(seq.frame_rate) +
                      " " + seq.id + "\n";
    for (const auto& frame : seq.frames) {
        for (size_t d = 0; d < frame.size(); ++d) {
            if (d) out += ' ';
            out += detail::format_double(frame[d]);
        }
        out += '\n';
    }
    return out;
}

inline FeatureSequence decode_sequence(const std::string& text) {
    std::istringstream in(text);
    std::string header;
    if (!std::getline(in, header)) throw ParseError("empty sequence file");
    std::istringstream hs(header);
    size_t n = 0;
    std::string rate_s, id;
    if (!(hs >> n >> rate_s)) throw ParseError("bad sequence header: '" + header + "'");
    std::getline(hs, id);
    const size_t first = id.find_first_not_of(" \t");
    id = first == std::string::npos ? "" : id.substr(first);

    FeatureSequence seq;
    seq.frame_rate = detail::parse_double(rate_s);
    seq.id = id;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> frame;
        frame.reserve(n);
        size_t pos = 0;
        while (pos < line.size()) {
            const size_t next = line.find(' ', pos);
            const std::string tok = line.substr(pos, next == std::string::npos ? next : next - pos);
            if (!tok.empty()) frame.push_back(detail::parse_double(tok));
            if (next == std::string::npos) break;
            pos = next + 1;
        }
        if (frame.size() != n)
            throw ParseError("frame with " + std::to_string(frame.size()) + " values, expected " +
                             std::to_string(n));
        seq.frames.push_back(std::move(frame));
    }
    validate_sequence(seq);
    return seq;
}

inline void write_sequence(const std::filesystem::path& path, const FeatureSequence& seq) {
    write_file_atomic(path, encode_sequence(seq));
}

inline FeatureSequence read_sequence(const std::filesystem::path& path) {
    try {
        return decode_sequence(read_file(path));
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

// --- JSON documents ---

inline ordered_json intervals_to_json(const std::vector<Interval>& xs) {
    ordered_json arr = ordered_json::array();
    for (const auto& iv : xs) arr.push_back({iv.begin, iv.end});
    return arr;
}

inline std::vector<Interval> intervals_from_json(const ordered_json& arr) {
    std::vector<Interval> out;
    for (const auto& p : arr) out.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    return out;
}

inline ordered_json ground_truth_to_json(const GroundTruth& gt, const std::string& id,
                                         double frame_rate = 1.0) {
    ordered_json j;
    j["id"] = id;
    j["frame_rate"] = frame_rate;
    j["count"] = gt.count();
    j["boundaries"] = intervals_to_json(gt.boundaries);
    j["workflow"] = tokens_display(gt.workflow_tokens);
    j["anomaly"] = gt.anomaly ? ordered_json({gt.anomaly->begin, gt.anomaly->end}) : ordered_json(nullptr);
    j["remaining"] = gt.remaining ? ordered_json(*gt.remaining) : ordered_json(nullptr);
    return j;
}

inline GroundTruth ground_truth_from_json(const ordered_json& j) {
    GroundTruth gt;
    gt.boundaries = intervals_from_json(j.at("boundaries"));
    gt.workflow_tokens = tokens_from_display(j.at("workflow").get<std::string>());
    if (!j.at("anomaly").is_null())
        gt.anomaly = Interval(j["anomaly"][0].get<double>(), j["anomaly"][1].get<double>());
    if (!j.at("remaining").is_null()) gt.remaining = j["remaining"].get<double>();
    return gt;
}

inline ordered_json workflow_to_json(const Workflow& wf) {
    ordered_json j;
    j["start_symbol"] = token_display(wf.start_symbol);
    j["display"] = wf.display();
    ordered_json slots = ordered_json::array();
    for (const auto& s : wf.slots) {
        ordered_json js;
        ordered_json alts = ordered_json::array();
        for (Token t : s.alternatives) alts.push_back(token_display(t));
        js["alternatives"] = alts;
        js["skippable"] = s.skippable;
        js["primary"] = token_display(s.primary);
        js["mean_duration"] = s.mean_duration;
        js["duration_var"] = s.duration_var;
        slots.push_back(std::move(js));
    }
    j["slots"] = std::move(slots);
    return j;
}

inline Workflow workflow_from_json(const ordered_json& j) {
    Workflow wf;
    wf.start_symbol = token_from_display(j.at("start_symbol").get<std::string>());
    for (const auto& js : j.at("slots")) {
        Slot s;
        for (const auto& a : js.at("alternatives"))
            s.alternatives.insert(token_from_display(a.get<std::string>()));
        s.skippable = js.at("skippable").get<bool>();
        s.primary = token_from_display(js.at("primary").get<std::string>());
        s.mean_duration = js.at("mean_duration").get<double>();
        s.duration_var = js.at("duration_var").get<double>();
        wf.slots.push_back(std::move(s));
    }
    wf.validate();
    return wf;
}

inline ordered_json mining_result_to_json(const MiningResult& res, const std::string& id,
                                          const ordered_json& config_echo = {}) {
    ordered_json j;
    j["id"] = id;
    j["window"] = res.window;
    j["count"] = res.segmentation.count;
    j["boundaries"] = intervals_to_json(res.segmentation.boundaries);
    j["workflow"] = workflow_to_json(res.workflow);
    j["k"] = res.codebook.k();
    j["centroids"] = res.codebook.centroids;
    ordered_json rows = ordered_json::array();
    for (const auto& row : res.alignment.rows) rows.push_back(tokens_display(row));
    j["alignment"] = std::move(rows);
    j["alignment_score"] = res.alignment.score;
    if (!config_echo.is_null() && !config_echo.empty()) j["config"] = config_echo;
    return j;
}

/// The pieces of a mining document that downstream commands consume.
struct MiningDoc {
    std::string id;
    int64_t window = 0;
    PeriodSegmentation segmentation;
    Workflow workflow;
    Codebook codebook;
};

inline MiningDoc mining_doc_from_json(const ordered_json& j) {
    MiningDoc doc;
    doc.id = j.at("id").get<std::string>();
    doc.window = j.at("window").get<int64_t>();
    doc.segmentation.boundaries = intervals_from_json(j.at("boundaries"));
    doc.segmentation.count = j.at("count").get<int>();
    doc.workflow = workflow_from_json(j.at("workflow"));
    doc.codebook.centroids = j.at("centroids").get<std::vector<std::vector<double>>>();
    return doc;
}

inline ordered_json eval_report_to_json(const EvalReport& rep) {
    ordered_json j;
    j["mape"] = rep.mape;
    j["tiou_period"] = rep.tiou_period;
    j["mae"] = rep.mae;
    j["tiou_anomaly"] = rep.tiou_anomaly;
    ordered_json per = ordered_json::array();
    for (const auto& s : rep.per_sequence) {
        ordered_json js;
        js["id"] = s.id;
        js["count_error"] = s.count_error ? ordered_json(*s.count_error) : ordered_json(nullptr);
        js["tiou_period"] = s.tiou_period ? ordered_json(*s.tiou_period) : ordered_json(nullptr);
        js["completion_error"] =
            s.completion_error ? ordered_json(*s.completion_error) : ordered_json(nullptr);
        js["tiou_anomaly"] = s.tiou_anomaly ? ordered_json(*s.tiou_anomaly) : ordered_json(nullptr);
        per.push_back(std::move(js));
    }
    j["per_sequence"] = std::move(per);
    return j;
}

inline ordered_json parse_json(const std::string& text, const std::string& origin) {
    ordered_json j = ordered_json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ParseError(origin + ": invalid JSON");
    return j;
}

inline ordered_json read_json(const std::filesystem::path& path) {
    return parse_json(read_file(path), path.string());
}

inline void write_json(const std::filesystem::path& path, const ordered_json& j) {
    write_file_atomic(path, j.dump(2) + "\n");
}

} // namespace cyclemine
