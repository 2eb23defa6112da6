#include "syco/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "syco/analysis.hpp"
#include "syco/metrics.hpp"
#include "syco/prompts.hpp"
#include "syco/rng.hpp"

namespace syco {

using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

// summary.txt is for humans; CSVs keep full shortest-round-trip precision.
std::string fmt4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string csv_comment(const RunConfig& cfg, const std::string& stage) {
    return "# config_hash=" + cfg.config_hash + " stage=" + stage + " artifact_version=" +
           kArtifactVersion;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

void write_jsonl_file(const std::filesystem::path& path, const FileHeader& header,
                      const std::vector<std::string>& lines) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << header_to_json(header) << '\n';
    for (const std::string& line : lines) out << line << '\n';
}

std::string sorted_agents_then_majority_key(const std::string& name) {
    // "majority" sorts after every agent row within a mode block.
    return name == "majority" ? "\x7f" : name;
}

}  // namespace

std::filesystem::path probes_path(const RunConfig& cfg) { return cfg.out_dir / "probes.jsonl"; }
std::filesystem::path pilot_path(const RunConfig& cfg) {
    return cfg.out_dir / "pilot_baseline.jsonl";
}
std::filesystem::path scores_path(const RunConfig& cfg, ScoreProvenance provenance) {
    std::string name = to_string(provenance);
    for (char& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return cfg.out_dir / ("scores_" + name + ".json");
}
std::filesystem::path transcripts_path(const RunConfig& cfg, ExperimentMode mode) {
    return cfg.out_dir / ("transcripts_" + to_string(mode) + ".jsonl");
}
std::filesystem::path summary_path(const RunConfig& cfg) { return cfg.out_dir / "summary.txt"; }

static std::filesystem::path manifest_path(const RunConfig& cfg) {
    return cfg.out_dir / "manifest.json";
}

BackendMap make_backends(const RunConfig& cfg) {
    BackendMap backends;
    for (const RosterEntry& entry : cfg.roster) {
        if (const auto* sim = std::get_if<SimProfile>(&entry.backend)) {
            backends[entry.id] = make_simulated_agent(entry.id, *sim);
        } else if (const auto* remote = std::get_if<EndpointConfig>(&entry.backend)) {
            EndpointConfig ec = *remote;
            ec.max_in_flight = std::min(ec.max_in_flight, cfg.max_in_flight);
            backends[entry.id] = make_remote_agent(entry.id, ec);
        } else {
            const auto& replay = std::get<ReplayBackendConfig>(entry.backend);
            backends[entry.id] = make_replay_agent(entry.id, replay.script_path);
        }
    }
    return backends;
}

std::vector<SubjectSample> make_samples(const RunConfig& cfg) {
    std::vector<Question> questions = load_questions(cfg.dataset.source_path);
    if (!cfg.novel_subjects.enabled) return split_calibration_test(questions, cfg.dataset);

    // Novel-subject variation: a fresh subject list used purely as test data,
    // with scores reused from an earlier run.
    std::map<std::string, std::vector<Question>> by_subject;
    for (Question& q : questions) by_subject[q.subject].push_back(std::move(q));
    std::vector<SubjectSample> out;
    for (const std::string& subject : cfg.novel_subjects.subjects) {
        auto it = by_subject.find(subject);
        const std::size_t have = it == by_subject.end() ? 0 : it->second.size();
        const std::size_t need = static_cast<std::size_t>(cfg.novel_subjects.per_subject);
        if (have < need)
            throw InsufficientQuestionsError("novel subject " + subject + ": have " +
                                             std::to_string(have) + ", need " +
                                             std::to_string(need));
        std::vector<Question>& pool = it->second;
        std::sort(pool.begin(), pool.end(),
                  [](const Question& a, const Question& b) { return a.id < b.id; });
        auto rng = make_engine(stream_seed(cfg.dataset.seed, "novel", subject));
        deterministic_shuffle(pool, rng);
        SubjectSample sample;
        sample.subject = subject;
        sample.test.assign(pool.begin(), pool.begin() + cfg.novel_subjects.per_subject);
        out.push_back(std::move(sample));
    }
    return out;
}

StageStatus read_manifest(const RunConfig& cfg) {
    StageStatus status;
    const auto path = manifest_path(cfg);
    if (!std::filesystem::exists(path)) return status;
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    json j = json::parse(buf.str());
    const std::string hash = j.value("config_hash", "");
    if (hash != cfg.config_hash)
        throw IncompleteInputsError("run directory " + cfg.out_dir.string() +
                                    " belongs to config " + hash + ", current config is " +
                                    cfg.config_hash);
    const json stages = j.value("stages", json::object());
    status.probe = stages.value("probe", false);
    status.score = stages.value("score", false);
    status.discuss = stages.value("discuss", false);
    status.analyze = stages.value("analyze", false);
    return status;
}

void write_manifest(const RunConfig& cfg, const StageStatus& status) {
    std::filesystem::create_directories(cfg.out_dir);
    json j;
    j["config_hash"] = cfg.config_hash;
    j["artifact_version"] = kArtifactVersion;
    j["stages"] = {{"probe", status.probe},
                   {"score", status.score},
                   {"discuss", status.discuss},
                   {"analyze", status.analyze}};
    write_text_file(manifest_path(cfg), j.dump(2) + "\n");
    // Provenance copy of the effective config (secrets stay uninterpolated).
    write_text_file(cfg.out_dir / "config.json", cfg.raw_text + "\n");
}

ProbeMap load_probe_map(const RunConfig& cfg, const std::string& split_filter) {
    if (!std::filesystem::exists(probes_path(cfg)))
        throw IncompleteInputsError("probes.jsonl missing; run the probe stage first");
    JsonlFile file = read_jsonl(probes_path(cfg));
    ProbeMap map;
    for (const std::string& line : file.records) {
        ProbeLine p = probe_from_json(line);
        if (!split_filter.empty() && p.split != split_filter) continue;
        map[{p.agent, p.question_id}] = p.result;
    }
    return map;
}

std::vector<Transcript> load_transcripts(const std::filesystem::path& path,
                                         const std::string& expect_hash, bool allow_mixed) {
    if (!std::filesystem::exists(path))
        throw IncompleteInputsError("missing transcripts: " + path.string());
    JsonlFile file = read_jsonl(path);
    if (!allow_mixed && !expect_hash.empty() && file.header.config_hash != expect_hash)
        throw IncompleteInputsError(path.string() + " carries config hash " +
                                    file.header.config_hash + ", expected " + expect_hash +
                                    " (pass --allow-mixed to override)");
    std::vector<Transcript> out;
    out.reserve(file.records.size());
    for (const std::string& line : file.records) out.push_back(transcript_from_json(line));
    return out;
}

ScoreTable load_score_table(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path))
        throw IncompleteInputsError("missing score table: " + path.string());
    std::ifstream in(path);
    std::stringstream buf;
    buf << in.rdbuf();
    json j = json::parse(buf.str());
    return score_table_from_json(j.at("table").dump());
}

namespace {

void write_score_table(const RunConfig& cfg, const ScoreTable& table) {
    json j;
    j["config_hash"] = cfg.config_hash;
    j["stage"] = "score";
    j["artifact_version"] = kArtifactVersion;
    j["table"] = json::parse(score_table_to_json(table));
    write_text_file(scores_path(cfg, table.provenance), j.dump(2) + "\n");
}

struct LoadedSamples {
    std::vector<SubjectSample> samples;
    std::vector<Question> calibration_questions;
    std::vector<Question> test_questions;
};

LoadedSamples load_samples(const RunConfig& cfg) {
    LoadedSamples out;
    out.samples = make_samples(cfg);
    for (const SubjectSample& s : out.samples) {
        out.calibration_questions.insert(out.calibration_questions.end(), s.calibration.begin(),
                                         s.calibration.end());
        out.test_questions.insert(out.test_questions.end(), s.test.begin(), s.test.end());
    }
    return out;
}

}  // namespace

void cmd_probe(const RunConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    StageStatus status = read_manifest(cfg);

    LoadedSamples data = load_samples(cfg);
    BackendMap backends = make_backends(cfg);

    struct Task {
        const Question* question;
        const char* split;
        AgentId agent;
    };
    std::vector<Task> tasks;
    for (const RosterEntry& entry : cfg.roster) {
        for (const Question& q : data.calibration_questions)
            tasks.push_back({&q, "calibration", entry.id});
        for (const Question& q : data.test_questions) tasks.push_back({&q, "test", entry.id});
    }

    std::vector<std::optional<ProbeLine>> results(tasks.size());
    std::map<AgentId, std::pair<std::size_t, std::size_t>> per_agent;  // {failures, total}
    std::mutex mu;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            const Task& task = tasks[i];
            try {
                ProbeResult r = backends.at(task.agent)->probe(
                    *task.question, assemble_probe_prompt(*task.question, task.agent));
                results[i] = ProbeLine{task.agent, task.question->id, task.question->subject,
                                       task.split, r};
                std::lock_guard lock(mu);
                ++per_agent[task.agent].second;
            } catch (const Error& e) {
                std::lock_guard lock(mu);
                ++per_agent[task.agent].first;
                ++per_agent[task.agent].second;
                std::fprintf(stderr, "probe failed: %s on %s: %s\n", task.agent.str().c_str(),
                             task.question->id.c_str(), e.what());
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < std::max(1, cfg.workers); ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    std::vector<std::string> lines;
    lines.reserve(results.size());
    std::vector<ProbeLine> ok;
    for (auto& r : results)
        if (r) ok.push_back(std::move(*r));
    std::sort(ok.begin(), ok.end(), [](const ProbeLine& a, const ProbeLine& b) {
        return std::tie(a.agent, a.split, a.question_id) <
               std::tie(b.agent, b.split, b.question_id);
    });
    for (const ProbeLine& p : ok) lines.push_back(probe_to_json(p));
    write_jsonl_file(probes_path(cfg), FileHeader{cfg.config_hash, "probe", kArtifactVersion},
                     lines);

    bool dead_agent = false;
    for (const auto& [agent, counts] : per_agent) {
        if (counts.first > 0)
            std::fprintf(stderr, "probe summary: %s failed %zu of %zu probes\n",
                         agent.str().c_str(), counts.first, counts.second);
        if (counts.second > 0 && counts.first == counts.second) dead_agent = true;
    }
    if (dead_agent) throw BackendFailureError("probe: at least one backend is fully unreachable");

    status.probe = true;
    write_manifest(cfg, status);
}

bool cmd_score(const RunConfig& cfg, std::optional<std::size_t> stop_after) {
    StageStatus status = read_manifest(cfg);
    if (!status.probe) throw IncompleteInputsError("score stage requires the probe stage first");

    if (cfg.novel_subjects.enabled) {
        // Reuse the score families computed by an earlier run.
        for (ScoreProvenance prov :
             {ScoreProvenance::BSS, ScoreProvenance::DBSS, ScoreProvenance::DSS,
              ScoreProvenance::Accuracy, ScoreProvenance::Random}) {
            RunConfig source = cfg;
            source.out_dir = cfg.novel_subjects.scores_from;
            ScoreTable table = load_score_table(scores_path(source, prov));
            for (const AgentId& agent : cfg.roster_ids())
                if (!table.scores.count(agent))
                    throw IncompleteInputsError("reused " + to_string(prov) +
                                                " scores lack agent " + agent.str());
            write_score_table(cfg, table);
        }
        status.score = true;
        write_manifest(cfg, status);
        return true;
    }

    LoadedSamples data = load_samples(cfg);
    BackendMap backends = make_backends(cfg);
    ProbeMap probes = load_probe_map(cfg);

    const std::vector<Trial> cal_trials =
        mint_trials(std::span<const SubjectSample>(data.samples), Split::Calibration, cfg.seed);

    DiscussionConfig pilot_cfg;
    pilot_cfg.roster = cfg.roster_ids();
    pilot_cfg.update_rounds = cfg.update_rounds;
    pilot_cfg.mode = ExperimentMode::Baseline;
    pilot_cfg.shuffle_peer_block = cfg.shuffle_peer_block;
    pilot_cfg.seed = stream_seed(cfg.seed, "pilot");

    ExperimentOptions opts;
    opts.checkpoint_path = cfg.out_dir / "pilot_baseline.ckpt.jsonl";
    opts.config_hash = cfg.config_hash;
    opts.workers = cfg.workers;
    opts.stop_after = stop_after;
    ExperimentResult pilot = run_experiment(cal_trials, pilot_cfg, backends, &probes, opts);
    if (!pilot.complete) return false;  // resume later; manifest stays incomplete

    std::vector<std::string> lines;
    for (const Transcript& t : pilot.transcripts) lines.push_back(transcript_to_json(t));
    write_jsonl_file(pilot_path(cfg), FileHeader{cfg.config_hash, "score", kArtifactVersion},
                     lines);
    std::filesystem::remove(opts.checkpoint_path);

    // BSS from the pilots' independent round (round 0 is single-turn behavior).
    std::map<AgentId, std::vector<Observation>> by_agent;
    for (const Transcript& t : pilot.transcripts) {
        for (const auto& [agent, stance] : t.rounds.front().stances) {
            auto pit = probes.find({agent, t.trial.question.id});
            if (pit == probes.end())
                throw IncompleteInputsError("no probe for " + agent.str() + " on " +
                                            t.trial.question.id);
            by_agent[agent].push_back(Observation{t.trial, pit->second, stance});
        }
    }
    ScoreTable bss = compute_bss_table(by_agent);
    bss.delta = cfg.delta;
    ScoreTable dbss = compute_dbss_table(pilot.transcripts, probes);
    dbss.delta = cfg.delta;
    ScoreTable dss =
        compute_dss(pilot.transcripts, bss, probes, cfg.delta, cfg.dss_symmetric);
    ScoreTable accuracy = accuracy_scores(
        probes, std::span<const Question>(data.calibration_questions), cfg.roster_ids());
    accuracy.delta = cfg.delta;
    ScoreTable random =
        random_scores(cfg.roster_ids(), stream_seed(cfg.seed, "random_scores"));
    random.delta = cfg.delta;

    for (const ScoreTable* table : {&bss, &dbss, &dss, &accuracy, &random})
        write_score_table(cfg, *table);

    if (!pilot.skipped.empty())
        std::fprintf(stderr, "score: %zu calibration trials skipped\n", pilot.skipped.size());

    status.score = true;
    write_manifest(cfg, status);
    return true;
}

DiscussStatus cmd_discuss(const RunConfig& cfg, std::optional<std::size_t> stop_after) {
    StageStatus status = read_manifest(cfg);
    if (!status.score) throw IncompleteInputsError("discuss stage requires the score stage first");

    LoadedSamples data = load_samples(cfg);
    BackendMap backends = make_backends(cfg);
    ProbeMap probes = load_probe_map(cfg);
    const std::vector<Trial> test_trials =
        mint_trials(std::span<const SubjectSample>(data.samples), Split::Test, cfg.seed);

    DiscussStatus result;
    std::optional<std::size_t> remaining = stop_after;
    for (ExperimentMode mode : cfg.modes) {
        if (std::filesystem::exists(transcripts_path(cfg, mode))) continue;  // already done

        DiscussionConfig dcfg;
        dcfg.roster = cfg.roster_ids();
        dcfg.update_rounds = cfg.update_rounds;
        dcfg.mode = mode;
        dcfg.shuffle_peer_block = cfg.shuffle_peer_block;
        dcfg.seed = stream_seed(cfg.seed, "discuss", to_string(mode));
        dcfg.dss_live = cfg.dss_live && mode == ExperimentMode::DSS;
        dcfg.dss_symmetric = cfg.dss_symmetric;
        switch (mode) {
            case ExperimentMode::Baseline: break;
            case ExperimentMode::BSS:
            case ExperimentMode::BinaryBSS:
                dcfg.label_source = load_score_table(scores_path(cfg, ScoreProvenance::BSS));
                break;
            case ExperimentMode::DBSS:
                dcfg.label_source = load_score_table(scores_path(cfg, ScoreProvenance::DBSS));
                break;
            case ExperimentMode::DSS:
                dcfg.label_source = load_score_table(scores_path(cfg, ScoreProvenance::DSS));
                break;
            case ExperimentMode::AccuracyBSS:
                dcfg.label_source = load_score_table(scores_path(cfg, ScoreProvenance::Accuracy));
                break;
            case ExperimentMode::RandomBSS:
            case ExperimentMode::RandomBinary:
                dcfg.label_source = load_score_table(scores_path(cfg, ScoreProvenance::Random));
                break;
        }

        ExperimentOptions opts;
        opts.checkpoint_path = cfg.out_dir / ("transcripts_" + to_string(mode) + ".ckpt.jsonl");
        opts.config_hash = cfg.config_hash;
        opts.workers = cfg.workers;
        opts.stop_after = remaining;
        ExperimentResult r = run_experiment(test_trials, dcfg, backends, &probes, opts);
        if (remaining) *remaining -= std::min(*remaining, r.newly_completed);
        result.skipped += r.skipped.size();
        if (!r.complete) {
            result.complete = false;
            return result;
        }

        std::vector<std::string> lines;
        for (const Transcript& t : r.transcripts) lines.push_back(transcript_to_json(t));
        write_jsonl_file(transcripts_path(cfg, mode),
                         FileHeader{cfg.config_hash, "discuss", kArtifactVersion}, lines);
        std::filesystem::remove(opts.checkpoint_path);
        if (!r.skipped.empty())
            std::fprintf(stderr, "discuss %s: %zu trials skipped\n", to_string(mode).c_str(),
                         r.skipped.size());
    }

    status.discuss = true;
    write_manifest(cfg, status);
    return result;
}

void cmd_analyze(const RunConfig& cfg, bool allow_mixed) {
    StageStatus status = read_manifest(cfg);
    if (!status.discuss)
        throw IncompleteInputsError("analyze stage requires the discuss stage first");

    const bool have_baseline =
        std::count(cfg.modes.begin(), cfg.modes.end(), ExperimentMode::Baseline) > 0;
    if (!have_baseline)
        throw UnpairedTrialsError("analyze requires Baseline transcripts for comparison");

    ProbeMap probes = load_probe_map(cfg, "test");
    std::map<ExperimentMode, std::vector<Transcript>> transcripts;
    for (ExperimentMode mode : cfg.modes)
        transcripts[mode] =
            load_transcripts(transcripts_path(cfg, mode), cfg.config_hash, allow_mixed);

    const std::vector<Transcript>& baseline = transcripts.at(ExperimentMode::Baseline);
    FinalAccuracy baseline_accuracy = final_accuracy(baseline);

    std::ostringstream accuracy_csv, trajectory_csv, influence_csv, flips_csv, post_csv,
        subjects_csv, summary;
    accuracy_csv << csv_comment(cfg, "analyze") << "\n"
                 << "mode,agent,estimate,lo,hi,p_vs_baseline\n";
    trajectory_csv << csv_comment(cfg, "analyze") << "\n" << "mode,agent,round,accuracy\n";
    influence_csv << csv_comment(cfg, "analyze") << "\n" << "mode,source,target,count,pct\n";
    flips_csv << csv_comment(cfg, "analyze") << "\n"
              << "mode,agent,overall,toward_correct,toward_user,toward_prev_majority,"
                 "transitions,flips\n";
    post_csv << csv_comment(cfg, "analyze") << "\n" << "mode,agent,ar,scs,cs,average\n";
    subjects_csv << csv_comment(cfg, "analyze") << "\n"
                 << "mode,subject,agent,accuracy_delta,sycophancy_delta,trials\n";

    summary << "syco run " << cfg.config_hash << "\n";
    summary << "modes analyzed: " << cfg.modes.size() << ", trials per mode: " << baseline.size()
            << "\n\n";

    for (ExperimentMode mode : cfg.modes) {
        const std::vector<Transcript>& ts = transcripts.at(mode);
        FinalAccuracy acc = final_accuracy(ts);

        std::vector<std::string> keys;
        for (const auto& [key, _] : acc.accuracy) keys.push_back(key);
        std::sort(keys.begin(), keys.end(), [](const std::string& a, const std::string& b) {
            return sorted_agents_then_majority_key(a) < sorted_agents_then_majority_key(b);
        });

        for (const std::string& key : keys) {
            const StatResult& s = acc.accuracy.at(key);
            accuracy_csv << to_string(mode) << ',' << key << ',' << fmt(s.estimate) << ','
                         << fmt(s.lo) << ',' << fmt(s.hi) << ',';
            if (mode != ExperimentMode::Baseline && baseline_accuracy.accuracy.count(key)) {
                const StatResult& b = baseline_accuracy.accuracy.at(key);
                ZTestResult zt = two_proportion_ztest(s.successes, s.n, b.successes, b.n);
                accuracy_csv << fmt(zt.p_two_sided);
            }
            accuracy_csv << '\n';
        }

        auto trajectory = accuracy_trajectory(ts);
        for (const auto& [agent, series] : trajectory)
            for (std::size_t round = 0; round < series.size(); ++round)
                trajectory_csv << to_string(mode) << ',' << agent << ',' << round << ','
                               << fmt(series[round]) << '\n';

        InfluenceMatrix influence = influence_matrix(ts, cfg.influence_single_source);
        for (std::size_t source = 0; source < influence.roster.size(); ++source)
            for (std::size_t target = 0; target < influence.roster.size(); ++target)
                influence_csv << to_string(mode) << ',' << influence.roster[source].str() << ','
                              << influence.roster[target].str() << ','
                              << influence.counts[source][target] << ','
                              << fmt(influence.normalized_pct[source][target]) << '\n';

        for (const auto& [agent, rates] : flip_rates(ts))
            flips_csv << to_string(mode) << ',' << agent.str() << ',' << fmt(rates.overall) << ','
                      << fmt(rates.toward_correct) << ',' << fmt(rates.toward_user) << ','
                      << fmt(rates.toward_prev_majority) << ',' << rates.transitions << ','
                      << rates.flips << '\n';

        PostSycophancy post = post_discussion_sycophancy(ts, probes);
        for (const auto& [agent, per_metric] : post.per_metric)
            post_csv << to_string(mode) << ',' << agent.str() << ','
                     << fmt(per_metric[static_cast<int>(MetricKind::AR)]) << ','
                     << fmt(per_metric[static_cast<int>(MetricKind::SCS)]) << ','
                     << fmt(per_metric[static_cast<int>(MetricKind::CS)]) << ','
                     << fmt(post.average.at(agent)) << '\n';

        if (mode != ExperimentMode::Baseline)
            for (const SubjectDelta& d : subject_breakdown(ts, baseline))
                subjects_csv << to_string(mode) << ',' << d.subject << ',' << d.agent << ','
                             << fmt(d.accuracy_delta) << ',' << fmt(d.sycophancy_delta) << ','
                             << d.trials << '\n';

        const StatResult& majority = acc.accuracy.at("majority");
        summary << to_string(mode) << ": majority accuracy " << fmt4(majority.estimate)
                << " (Wilson 95% CI " << fmt4(majority.lo) << ".." << fmt4(majority.hi) << ")";
        if (acc.tie_count > 0) summary << ", ties " << acc.tie_count;
        if (mode != ExperimentMode::Baseline) {
            const StatResult& b = baseline_accuracy.accuracy.at("majority");
            ZTestResult zt = two_proportion_ztest(majority.successes, majority.n, b.successes, b.n);
            summary << ", delta vs baseline " << fmt4(majority.estimate - b.estimate) << " (z="
                    << fmt4(zt.z) << ", p=" << fmt4(zt.p_two_sided) << ")";
        }
        summary << "\n";
    }

    summary << "\nreports: accuracy.csv trajectory.csv influence.csv flips.csv "
               "sycophancy_post.csv subjects.csv\n";

    write_text_file(cfg.out_dir / "accuracy.csv", accuracy_csv.str());
    write_text_file(cfg.out_dir / "trajectory.csv", trajectory_csv.str());
    write_text_file(cfg.out_dir / "influence.csv", influence_csv.str());
    write_text_file(cfg.out_dir / "flips.csv", flips_csv.str());
    write_text_file(cfg.out_dir / "sycophancy_post.csv", post_csv.str());
    write_text_file(cfg.out_dir / "subjects.csv", subjects_csv.str());
    write_text_file(summary_path(cfg), summary.str());

    status.analyze = true;
    write_manifest(cfg, status);
}

std::string cmd_report(const RunConfig& cfg) {
    StageStatus status = read_manifest(cfg);
    if (!status.analyze || !std::filesystem::exists(summary_path(cfg)))
        throw IncompleteInputsError("report requires the analyze stage first");
    std::ifstream in(summary_path(cfg));
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace syco
