#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <mutex>

#include "helpers.hpp"
#include "syco/discussion.hpp"
#include "syco/jsonio.hpp"
#include "syco/prompts.hpp"
#include "syco/rng.hpp"

using namespace syco;
using namespace syco::test;
namespace fs = std::filesystem;

namespace {

// Wraps a backend and records every discussion prompt it receives.
class RecordingBackend final : public AgentBackend {
public:
    explicit RecordingBackend(std::shared_ptr<AgentBackend> inner) : inner_(std::move(inner)) {}

    ProbeResult probe(const Question& q, const PromptBundle& p) override {
        return inner_->probe(q, p);
    }

    StanceResponse respond(const PromptBundle& p, const StanceContext& ctx,
                           bool want_probability) override {
        {
            std::lock_guard lock(mu_);
            prompts_.push_back(p);
        }
        return inner_->respond(p, ctx, want_probability);
    }

    std::vector<PromptBundle> prompts() {
        std::lock_guard lock(mu_);
        return prompts_;
    }

private:
    std::shared_ptr<AgentBackend> inner_;
    std::vector<PromptBundle> prompts_;
    std::mutex mu_;
};

SimProfile sim_profile(std::uint64_t seed, double sycophancy = 0.3, double conformity = 0.5,
                       double knowledge = 0.9, double label_trust = 0.0,
                       double flip_inertia = 0.0) {
    SimProfile p;
    p.knowledge_accuracy["*"] = knowledge;
    p.sycophancy = sycophancy;
    p.conformity = conformity;
    p.label_trust = label_trust;
    p.flip_inertia = flip_inertia;
    p.seed = seed;
    return p;
}

BackendMap sim_backends(const std::vector<AgentId>& roster, double sycophancy = 0.3,
                        double conformity = 0.5, double flip_inertia = 0.0) {
    BackendMap backends;
    std::uint64_t seed = 100;
    for (const AgentId& agent : roster)
        backends[agent] = make_simulated_agent(
            agent, sim_profile(seed++, sycophancy, conformity, 0.9, 0.0, flip_inertia));
    return backends;
}

DiscussionConfig base_config(const std::vector<AgentId>& roster) {
    DiscussionConfig cfg;
    cfg.roster = roster;
    cfg.update_rounds = 4;
    cfg.mode = ExperimentMode::Baseline;
    cfg.seed = 7;
    return cfg;
}

ScoreTable spread_table(const std::vector<AgentId>& roster) {
    ScoreTable t;
    double v = 0.05;
    for (const AgentId& agent : roster) {
        t.scores[agent] = {v, v, v};
        v += 0.12;
    }
    return t;
}

}  // namespace

TEST_CASE("transcript has 1 + update_rounds rounds with contiguous indices") {
    auto roster = make_roster(6);
    Transcript t = run_discussion(make_trial("q0"), base_config(roster), sim_backends(roster));
    REQUIRE(t.rounds.size() == 5);
    for (int r = 0; r < 5; ++r) {
        CHECK(t.rounds[r].round_index == r);
        CHECK(t.rounds[r].stances.size() == roster.size());
    }
    CHECK(t.labels_shown.empty());  // Baseline carries no labels
}

TEST_CASE("frozen agents keep round 0 forever") {
    auto roster = make_roster(4);
    BackendMap backends = sim_backends(roster, 0.0, 0.0, 1.0);
    Transcript t = run_discussion(make_trial("q0"), base_config(roster), backends);
    for (std::size_t r = 1; r < t.rounds.size(); ++r)
        for (const auto& [agent, stance] : t.rounds[r].stances)
            CHECK(stance.label == t.rounds[0].stances.at(agent).label);
    CHECK(t.flips.empty());
}

TEST_CASE("peer blocks carry exactly the previous round's stances") {
    auto roster = make_roster(5);
    BackendMap inner = sim_backends(roster, 0.4, 0.8);
    BackendMap recording;
    std::map<AgentId, std::shared_ptr<RecordingBackend>> recorders;
    for (const AgentId& agent : roster) {
        auto rec = std::make_shared<RecordingBackend>(inner.at(agent));
        recorders[agent] = rec;
        recording[agent] = rec;
    }
    Trial trial = make_trial("q0");
    Transcript t = run_discussion(trial, base_config(roster), recording);

    for (const AgentId& receiver : roster) {
        auto prompts = recorders.at(receiver)->prompts();
        REQUIRE(prompts.size() == t.rounds.size());  // one per round
        for (std::size_t r = 1; r < prompts.size(); ++r) {
            const PromptBundle& p = prompts[r];
            CHECK(p.round_index == static_cast<int>(r));
            // self-exclusion
            CHECK(p.user_text.find(receiver.str()) == std::string::npos);
            for (const AgentId& peer : roster) {
                if (peer == receiver) continue;
                const StanceResponse& prev = t.rounds[r - 1].stances.at(peer);
                const std::string line = peer.str() + ": " + stance_word(prev.label);
                CHECK_MESSAGE(p.user_text.find(line) != std::string::npos, "round ", r,
                              " missing '", line, "'");
            }
        }
    }
}

TEST_CASE("label modes record labels_shown and show them to agents") {
    auto roster = make_roster(6);
    DiscussionConfig cfg = base_config(roster);
    cfg.mode = ExperimentMode::BSS;
    cfg.label_source = spread_table(roster);
    Transcript t = run_discussion(make_trial("q0"), cfg, sim_backends(roster));
    REQUIRE(t.labels_shown.size() == t.rounds.size());
    CHECK(t.labels_shown[0].empty());
    for (std::size_t r = 1; r < t.labels_shown.size(); ++r) {
        CHECK(t.labels_shown[r].size() == roster.size());
        CHECK(t.labels_shown[r].at(roster[0]) == "least sycophantic");
        CHECK(t.labels_shown[r].at(roster[5]) == "very sycophantic");
    }
}

TEST_CASE("config validation enforces the label_source invariant") {
    auto roster = make_roster(3);
    DiscussionConfig cfg = base_config(roster);
    cfg.mode = ExperimentMode::BSS;  // label mode without a source
    CHECK_THROWS_AS(cfg.validate(), Error);

    DiscussionConfig cfg2 = base_config(roster);
    cfg2.label_source = spread_table(roster);  // Baseline with a source
    CHECK_THROWS_AS(cfg2.validate(), Error);
}

namespace {

fs::path write_replay_script(const std::string& name, const std::vector<std::string>& lines) {
    const fs::path path = fs::temp_directory_path() / name;
    std::ofstream out(path);
    for (const std::string& line : lines) out << line << "\n";
    return path;
}

std::string replay_line(const std::string& trial_id, int round, const std::string& agent,
                        const std::string& raw) {
    return R"({"trial_id":")" + trial_id + R"(","round":)" + std::to_string(round) +
           R"(,"agent":")" + agent + R"(","raw_text":")" + raw + R"("})";
}

}  // namespace

TEST_CASE("invalid stances carry the last valid stance forward for peers") {
    // r0 emits garbage at round 1; its round-0 stance must still be displayed
    // to peers at round 2.
    const std::string tid = "q0:SCS";
    std::vector<std::string> lines;
    lines.push_back(replay_line(tid, 0, "r0", "incorrect"));
    lines.push_back(replay_line(tid, 1, "r0", "garbage"));
    lines.push_back(replay_line(tid, 2, "r0", "garbage"));
    for (int r = 0; r <= 2; ++r) {
        lines.push_back(replay_line(tid, r, "r1", "correct"));
        lines.push_back(replay_line(tid, r, "r2", "incorrect"));
    }
    fs::path script = write_replay_script("syco_carry.jsonl", lines);

    std::vector<AgentId> roster = {AgentId("r0"), AgentId("r1"), AgentId("r2")};
    BackendMap inner;
    for (const AgentId& agent : roster)
        inner[agent] = std::shared_ptr<AgentBackend>(make_replay_agent(agent, script.string()));
    auto rec = std::make_shared<RecordingBackend>(inner.at(AgentId("r1")));
    inner[AgentId("r1")] = rec;

    DiscussionConfig cfg = base_config(roster);
    cfg.update_rounds = 2;
    Transcript t = run_discussion(make_trial("q0"), cfg, inner);

    CHECK(t.rounds[1].stances.at(AgentId("r0")).label == StanceLabel::Invalid);
    auto prompts = rec->prompts();
    REQUIRE(prompts.size() == 3);
    // round 2 prompt still shows r0's round-0 stance
    CHECK(prompts[2].user_text.find("r0: incorrect") != std::string::npos);
    fs::remove(script);
}

TEST_CASE("all-invalid round 0 aborts the trial") {
    const std::string tid = "q0:SCS";
    std::vector<std::string> lines;
    for (const char* agent : {"r0", "r1"}) {
        lines.push_back(replay_line(tid, 0, agent, "???"));
        lines.push_back(replay_line(tid, 1, agent, "correct"));
        lines.push_back(replay_line(tid, 2, agent, "correct"));
    }
    fs::path script = write_replay_script("syco_allinvalid.jsonl", lines);
    std::vector<AgentId> roster = {AgentId("r0"), AgentId("r1")};
    BackendMap backends;
    for (const AgentId& agent : roster)
        backends[agent] = std::shared_ptr<AgentBackend>(make_replay_agent(agent, script.string()));
    DiscussionConfig cfg = base_config(roster);
    cfg.update_rounds = 2;
    CHECK_THROWS_AS(run_discussion(make_trial("q0"), cfg, backends), AllInvalidError);
    fs::remove(script);
}

TEST_CASE("recorded flips match recomputation and classify directions") {
    auto roster = make_roster(6);
    BackendMap backends = sim_backends(roster, 0.4, 0.7);
    DiscussionConfig cfg = base_config(roster);
    for (int q = 0; q < 10; ++q) {
        Transcript t = run_discussion(make_trial("q" + std::to_string(q)), cfg, backends);
        for (const FlipRecord& f : t.flips) {
            CHECK(f.toward_user == (f.to == StanceLabel::AgreeWithUser));
            CHECK(f.toward_correct == (f.to == StanceLabel::DisagreeWithUser));
            CHECK(f.toward_user != f.toward_correct);
            for (const AgentId& source : f.sources) {
                CHECK(source != f.agent);
                CHECK(t.rounds[f.round - 1].stances.at(source).label == f.to);
            }
        }
    }
}

TEST_CASE("dss_live updates labels between rounds") {
    // Roster of replay agents: "flip" flips to the user at round 1 and, with
    // delta = 0.2 from a low base score, must overtake "steady" in the live
    // ranking shown at round 2.
    const std::string tid = "q0:SCS";
    std::vector<std::string> lines;
    lines.push_back(replay_line(tid, 0, "flip", "incorrect"));
    lines.push_back(replay_line(tid, 1, "flip", "correct"));
    lines.push_back(replay_line(tid, 2, "flip", "correct"));
    for (int r = 0; r <= 2; ++r) {
        lines.push_back(replay_line(tid, r, "steady", "incorrect"));
        lines.push_back(replay_line(tid, r, "extra", "incorrect"));
        lines.push_back(replay_line(tid, r, "anchor", "incorrect"));
    }
    fs::path script = write_replay_script("syco_dsslive.jsonl", lines);

    std::vector<AgentId> roster = {AgentId("anchor"), AgentId("extra"), AgentId("flip"),
                                   AgentId("steady")};
    BackendMap backends;
    for (const AgentId& agent : roster)
        backends[agent] = std::shared_ptr<AgentBackend>(make_replay_agent(agent, script.string()));

    ScoreTable dss;
    dss.provenance = ScoreProvenance::DSS;
    dss.delta = 0.2;
    dss.scores[AgentId("anchor")] = {0.9, 0.9, 0.9};
    dss.scores[AgentId("extra")] = {0.5, 0.5, 0.5};
    dss.scores[AgentId("flip")] = {0.10, 0.10, 0.10};
    dss.scores[AgentId("steady")] = {0.15, 0.15, 0.15};

    Trial trial = make_trial("q0");
    ProbeMap probes;
    for (const AgentId& agent : roster)
        probes[{agent, trial.question.id}] = ProbeResult{trial.question.correct, {}};

    DiscussionConfig cfg = base_config(roster);
    cfg.update_rounds = 2;
    cfg.mode = ExperimentMode::DSS;
    cfg.label_source = dss;
    cfg.dss_live = true;
    Transcript t = run_discussion(trial, cfg, backends, &probes);

    REQUIRE(t.labels_shown.size() == 3);
    // before any flips: flip < steady < anchor
    CHECK(t.labels_shown[1].at(AgentId("flip")) == "least sycophantic");
    // after the round-1 sycophantic flip: 0.10 + 0.2 = 0.30 > 0.15
    CHECK(t.labels_shown[2].at(AgentId("flip")) != "least sycophantic");
    CHECK(t.labels_shown[2].at(AgentId("steady")) == "least sycophantic");
    fs::remove(script);
}

TEST_CASE("peer-block shuffle changes prompt order, not outcomes") {
    auto roster = make_roster(5);
    Trial trial = make_trial("q0");

    auto run_with = [&](bool shuffle, std::map<AgentId, std::vector<std::string>>& prompts) {
        BackendMap inner = sim_backends(roster, 0.3, 0.5);
        BackendMap recording;
        std::map<AgentId, std::shared_ptr<RecordingBackend>> recorders;
        for (const AgentId& agent : roster) {
            auto rec = std::make_shared<RecordingBackend>(inner.at(agent));
            recorders[agent] = rec;
            recording[agent] = rec;
        }
        DiscussionConfig cfg = base_config(roster);
        cfg.shuffle_peer_block = shuffle;
        Transcript t = run_discussion(trial, cfg, recording);
        for (const auto& [agent, rec] : recorders)
            for (const PromptBundle& p : rec->prompts()) prompts[agent].push_back(p.user_text);
        return t;
    };

    std::map<AgentId, std::vector<std::string>> fixed_prompts, shuffled_prompts;
    Transcript fixed = run_with(false, fixed_prompts);
    Transcript shuffled = run_with(true, shuffled_prompts);

    // Simulated agents decide from the structured context, so stances match.
    for (std::size_t r = 0; r < fixed.rounds.size(); ++r)
        for (const auto& [agent, stance] : fixed.rounds[r].stances)
            CHECK(shuffled.rounds[r].stances.at(agent).label == stance.label);

    // But at least one prompt must present peers in a different order.
    bool any_diff = false;
    for (const AgentId& agent : roster)
        any_diff |= fixed_prompts.at(agent) != shuffled_prompts.at(agent);
    CHECK(any_diff);

    // Shuffling is seeded: a rerun reproduces the same order.
    std::map<AgentId, std::vector<std::string>> again;
    run_with(true, again);
    for (const AgentId& agent : roster) CHECK(again.at(agent) == shuffled_prompts.at(agent));
}

TEST_CASE("RandomBinary re-draws labels per trial") {
    auto roster = make_roster(6);
    DiscussionConfig cfg = base_config(roster);
    cfg.mode = ExperimentMode::RandomBinary;
    ScoreTable random = random_scores(roster, 99);
    cfg.label_source = random;
    BackendMap backends = sim_backends(roster);
    Transcript t1 = run_discussion(make_trial("q1"), cfg, backends);
    Transcript t2 = run_discussion(make_trial("q2"), cfg, backends);
    CHECK(t1.labels_shown[1] != t2.labels_shown[1]);
}

TEST_CASE("run_experiment is deterministic across worker counts and resumes cleanly") {
    auto roster = make_roster(4);
    BackendMap backends = sim_backends(roster, 0.4, 0.6);
    DiscussionConfig cfg = base_config(roster);

    std::vector<Trial> trials;
    for (int q = 0; q < 12; ++q) trials.push_back(make_trial("q" + std::to_string(q)));

    ExperimentOptions serial;
    serial.workers = 1;
    ExperimentResult r1 = run_experiment(trials, cfg, backends, nullptr, serial);

    ExperimentOptions parallel;
    parallel.workers = 3;
    ExperimentResult r2 = run_experiment(trials, cfg, backends, nullptr, parallel);

    REQUIRE(r1.transcripts.size() == r2.transcripts.size());
    for (std::size_t i = 0; i < r1.transcripts.size(); ++i)
        CHECK(transcript_to_json(r1.transcripts[i]) == transcript_to_json(r2.transcripts[i]));

    // interrupted + resumed run equals the uninterrupted one
    const fs::path ckpt = fs::temp_directory_path() / "syco_resume.ckpt.jsonl";
    fs::remove(ckpt);
    ExperimentOptions stop;
    stop.checkpoint_path = ckpt;
    stop.config_hash = "h1";
    stop.stop_after = 5;
    ExperimentResult partial = run_experiment(trials, cfg, backends, nullptr, stop);
    CHECK_FALSE(partial.complete);
    CHECK(partial.newly_completed == 5);

    ExperimentOptions resume;
    resume.checkpoint_path = ckpt;
    resume.config_hash = "h1";
    ExperimentResult resumed = run_experiment(trials, cfg, backends, nullptr, resume);
    CHECK(resumed.complete);
    REQUIRE(resumed.transcripts.size() == r1.transcripts.size());
    for (std::size_t i = 0; i < r1.transcripts.size(); ++i)
        CHECK(transcript_to_json(resumed.transcripts[i]) == transcript_to_json(r1.transcripts[i]));

    // hash mismatch refuses to resume
    ExperimentOptions wrong;
    wrong.checkpoint_path = ckpt;
    wrong.config_hash = "other";
    CHECK_THROWS_AS(run_experiment(trials, cfg, backends, nullptr, wrong), Error);
    fs::remove(ckpt);
}

TEST_CASE("a recorded run replays with identical stances and raw text") {
    auto roster = make_roster(4);
    BackendMap sims = sim_backends(roster, 0.4, 0.6);
    DiscussionConfig cfg = base_config(roster);

    std::vector<Trial> trials;
    for (int q = 0; q < 5; ++q) trials.push_back(make_trial("q" + std::to_string(q)));

    // Record a live run, then dump its raw outputs as a replay script.
    std::vector<Transcript> live;
    for (const Trial& t : trials) live.push_back(run_discussion(t, cfg, sims));

    const fs::path script = fs::temp_directory_path() / "syco_record_replay.jsonl";
    {
        std::ofstream out(script);
        for (const Transcript& t : live)
            for (const RoundRecord& r : t.rounds)
                for (const auto& [agent, stance] : r.stances)
                    out << replay_line(t.trial.id(), r.round_index, agent.str(), stance.raw_text)
                        << "\n";
        // probe lines so the replay roster can also answer neutral probes
        for (const Trial& t : trials)
            for (const AgentId& agent : roster) {
                ProbeResult p = sims.at(agent)->probe(
                    t.question, assemble_probe_prompt(t.question, agent));
                out << replay_line(t.question.id, -1, agent.str(),
                                   std::string(1, to_char(p.chosen)))
                    << "\n";
            }
    }

    BackendMap replays;
    for (const AgentId& agent : roster)
        replays[agent] =
            std::shared_ptr<AgentBackend>(make_replay_agent(agent, script.string()));

    for (std::size_t i = 0; i < trials.size(); ++i) {
        Transcript replayed = run_discussion(trials[i], cfg, replays);
        REQUIRE(replayed.rounds.size() == live[i].rounds.size());
        for (std::size_t r = 0; r < replayed.rounds.size(); ++r)
            for (const auto& [agent, stance] : replayed.rounds[r].stances) {
                const StanceResponse& original = live[i].rounds[r].stances.at(agent);
                CHECK(stance.raw_text == original.raw_text);
                CHECK(stance.label == original.label);
            }
        CHECK(replayed.flips.size() == live[i].flips.size());
    }
    fs::remove(script);
}

TEST_CASE("transcript JSON round-trips") {
    auto roster = make_roster(4);
    DiscussionConfig cfg = base_config(roster);
    cfg.mode = ExperimentMode::BinaryBSS;
    cfg.label_source = spread_table(roster);
    Transcript t = run_discussion(make_trial("q0", MetricKind::CS), cfg,
                                  sim_backends(roster, 0.4, 0.7));
    Transcript back = transcript_from_json(transcript_to_json(t));
    CHECK(transcript_to_json(back) == transcript_to_json(t));
    CHECK(back.trial.id() == t.trial.id());
    CHECK(back.rounds.size() == t.rounds.size());
    CHECK(back.labels_shown.size() == t.labels_shown.size());
    CHECK(back.flips.size() == t.flips.size());
}
