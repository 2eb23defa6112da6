#include "syco/jsonio.hpp"

#include <fstream>

#include <json.hpp>

namespace syco {

using nlohmann::json;

namespace {

json stance_to_json(const StanceResponse& s) {
    json j;
    j["label"] = to_string(s.label);
    if (s.p_agree) j["p_agree"] = *s.p_agree;
    j["raw_text"] = s.raw_text;
    return j;
}

StanceResponse stance_from_json(const json& j) {
    StanceResponse s;
    auto label = stance_from_string(j.at("label").get<std::string>());
    if (!label) throw Error("bad stance label in transcript: " + j.at("label").dump());
    s.label = *label;
    if (j.contains("p_agree")) s.p_agree = j.at("p_agree").get<double>();
    s.raw_text = j.value("raw_text", "");
    return s;
}

json flip_to_json(const FlipRecord& f) {
    json j;
    j["agent"] = f.agent.str();
    j["round"] = f.round;
    j["from"] = to_string(f.from);
    j["to"] = to_string(f.to);
    j["toward_user"] = f.toward_user;
    j["toward_correct"] = f.toward_correct;
    if (f.toward_prev_majority) j["toward_prev_majority"] = *f.toward_prev_majority;
    json sources = json::array();
    for (const AgentId& a : f.sources) sources.push_back(a.str());
    j["sources"] = sources;
    return j;
}

FlipRecord flip_from_json(const json& j, const std::string& trial_id) {
    FlipRecord f;
    f.trial_id = trial_id;
    f.agent = AgentId(j.at("agent").get<std::string>());
    f.round = j.at("round").get<int>();
    f.from = *stance_from_string(j.at("from").get<std::string>());
    f.to = *stance_from_string(j.at("to").get<std::string>());
    f.toward_user = j.at("toward_user").get<bool>();
    f.toward_correct = j.at("toward_correct").get<bool>();
    if (j.contains("toward_prev_majority"))
        f.toward_prev_majority = j.at("toward_prev_majority").get<bool>();
    for (const json& s : j.at("sources")) f.sources.emplace_back(s.get<std::string>());
    return f;
}

json trial_to_json(const Trial& t) {
    json j;
    j["question_id"] = t.question.id;
    j["subject"] = t.question.subject;
    j["question"] = t.question.text;
    j["options"] = t.question.options;
    j["correct"] = std::string(1, to_char(t.question.correct));
    j["user_option"] = std::string(1, to_char(t.user_option));
    j["metric"] = to_string(t.metric_kind);
    j["rng_seed"] = t.rng_seed;
    j["id"] = t.id();
    return j;
}

Trial trial_from_json(const json& j) {
    Trial t;
    t.question.id = j.at("question_id").get<std::string>();
    t.question.subject = j.at("subject").get<std::string>();
    t.question.text = j.at("question").get<std::string>();
    const auto& opts = j.at("options");
    for (int i = 0; i < 4; ++i) t.question.options[i] = opts.at(i).get<std::string>();
    t.question.correct = *option_from_char(j.at("correct").get<std::string>().at(0));
    t.user_option = *option_from_char(j.at("user_option").get<std::string>().at(0));
    t.metric_kind = *metric_from_string(j.at("metric").get<std::string>());
    t.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    return t;
}

}  // namespace

std::string transcript_to_json(const Transcript& t) {
    json j;
    j["trial"] = trial_to_json(t.trial);
    j["mode"] = to_string(t.mode);
    json rounds = json::array();
    for (const RoundRecord& r : t.rounds) {
        json jr;
        jr["round"] = r.round_index;
        json stances;
        for (const auto& [agent, stance] : r.stances) stances[agent.str()] = stance_to_json(stance);
        jr["stances"] = stances;
        rounds.push_back(jr);
    }
    j["rounds"] = rounds;
    if (!t.labels_shown.empty()) {
        json shown = json::array();
        for (const auto& per_round : t.labels_shown) {
            json m = json::object();
            for (const auto& [agent, label] : per_round) m[agent.str()] = label;
            shown.push_back(m);
        }
        j["labels_shown"] = shown;
    }
    json flips = json::array();
    for (const FlipRecord& f : t.flips) flips.push_back(flip_to_json(f));
    j["flips"] = flips;
    return j.dump();
}

Transcript transcript_from_json(const std::string& line) {
    json j = json::parse(line);
    Transcript t;
    t.trial = trial_from_json(j.at("trial"));
    auto mode = mode_from_string(j.at("mode").get<std::string>());
    if (!mode) throw Error("bad mode in transcript: " + j.at("mode").dump());
    t.mode = *mode;
    for (const json& jr : j.at("rounds")) {
        RoundRecord r;
        r.round_index = jr.at("round").get<int>();
        for (const auto& [name, js] : jr.at("stances").items())
            r.stances[AgentId(name)] = stance_from_json(js);
        t.rounds.push_back(std::move(r));
    }
    if (j.contains("labels_shown")) {
        for (const json& m : j.at("labels_shown")) {
            std::map<AgentId, std::string> per_round;
            for (const auto& [name, label] : m.items())
                per_round[AgentId(name)] = label.get<std::string>();
            t.labels_shown.push_back(std::move(per_round));
        }
    }
    for (const json& jf : j.at("flips")) t.flips.push_back(flip_from_json(jf, t.trial.id()));
    return t;
}

std::string probe_to_json(const ProbeLine& p) {
    json j;
    j["agent"] = p.agent.str();
    j["question_id"] = p.question_id;
    j["subject"] = p.subject;
    j["split"] = p.split;
    j["chosen"] = std::string(1, to_char(p.result.chosen));
    if (p.result.per_option_probability) j["probs"] = *p.result.per_option_probability;
    return j.dump();
}

ProbeLine probe_from_json(const std::string& line) {
    json j = json::parse(line);
    ProbeLine p;
    p.agent = AgentId(j.at("agent").get<std::string>());
    p.question_id = j.at("question_id").get<std::string>();
    p.subject = j.value("subject", "");
    p.split = j.value("split", "");
    p.result.chosen = *option_from_char(j.at("chosen").get<std::string>().at(0));
    if (j.contains("probs")) {
        std::array<double, 4> probs{};
        for (int i = 0; i < 4; ++i) probs[i] = j.at("probs").at(i).get<double>();
        p.result.per_option_probability = probs;
    }
    return p;
}

std::string score_table_to_json(const ScoreTable& t) {
    json j;
    json agents;
    for (const auto& [agent, scores] : t.scores) {
        json per_metric;
        for (MetricKind k : kAllMetrics)
            per_metric[to_string(k)] = scores[static_cast<int>(k)];
        agents[agent.str()] = per_metric;
    }
    j["scores"] = agents;
    j["provenance"] = to_string(t.provenance);
    if (t.seed) j["seed"] = *t.seed;
    j["delta"] = t.delta;
    return j.dump(2);
}

ScoreTable score_table_from_json(const std::string& text) {
    json j = json::parse(text);
    ScoreTable t;
    auto prov = provenance_from_string(j.at("provenance").get<std::string>());
    if (!prov) throw Error("bad provenance in score table");
    t.provenance = *prov;
    if (j.contains("seed")) t.seed = j.at("seed").get<std::uint64_t>();
    t.delta = j.value("delta", 0.2);
    for (const auto& [name, per_metric] : j.at("scores").items()) {
        std::array<double, 3> scores{};
        for (MetricKind k : kAllMetrics)
            scores[static_cast<int>(k)] = per_metric.at(to_string(k)).get<double>();
        t.scores[AgentId(name)] = scores;
    }
    return t;
}

std::string skipped_to_json(const std::string& trial_id, const std::string& error) {
    json j;
    j["skipped"] = trial_id;
    j["error"] = error;
    return j.dump();
}

std::optional<std::string> skipped_id_from_json(const std::string& line) {
    json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object() || !j.contains("skipped")) return std::nullopt;
    return j.at("skipped").get<std::string>();
}

std::string header_to_json(const FileHeader& h) {
    json j;
    j["config_hash"] = h.config_hash;
    j["stage"] = h.stage;
    j["artifact_version"] = h.artifact_version;
    return j.dump();
}

FileHeader header_from_json(const std::string& line) {
    json j = json::parse(line);
    FileHeader h;
    h.config_hash = j.value("config_hash", "");
    h.stage = j.value("stage", "");
    h.artifact_version = j.value("artifact_version", "");
    return h;
}

JsonlFile read_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    JsonlFile file;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first) {
            file.header = header_from_json(line);
            first = false;
        } else {
            file.records.push_back(line);
        }
    }
    if (first) throw Error(path.string() + ": empty artifact (missing header)");
    return file;
}

}  // namespace syco
