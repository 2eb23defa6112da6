#include "syco/discussion.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include "syco/jsonio.hpp"
#include "syco/prompts.hpp"
#include "syco/rng.hpp"

namespace syco {

void DiscussionConfig::validate() const {
    if (roster.size() < 2) throw Error("discussion: roster must have >= 2 agents");
    if (update_rounds < 1) throw Error("discussion: update_rounds must be >= 1");
    std::set<AgentId> unique(roster.begin(), roster.end());
    if (unique.size() != roster.size()) throw Error("discussion: duplicate roster agent");
    const bool needs_labels = mode != ExperimentMode::Baseline;
    if (needs_labels && !label_source)
        throw Error("discussion: mode " + to_string(mode) + " requires a label source");
    if (!needs_labels && label_source)
        throw Error("discussion: Baseline mode must not carry a label source");
    if (dss_live && !needs_labels)
        throw Error("discussion: dss_live needs a label mode");
    if (label_source)
        for (const AgentId& agent : roster)
            if (!label_source->scores.count(agent))
                throw Error("discussion: label source has no score for " + agent.str());
}

namespace {

LabelBlock full_label_block(const ScoreTable& table, MetricKind metric, ExperimentMode mode) {
    return label_format(mode) == LabelFormat::Binary ? to_binary_labels(table, metric)
                                                     : to_tier_labels(table, metric);
}

}  // namespace

Transcript run_discussion(const Trial& trial, const DiscussionConfig& cfg,
                          const BackendMap& backends, const ProbeMap* probes) {
    cfg.validate();
    trial.validate();
    for (const AgentId& agent : cfg.roster)
        if (!backends.count(agent))
            throw BackendUnavailableError("discussion: no backend bound for " + agent.str());
    if (cfg.dss_live && probes == nullptr)
        throw Error("discussion: dss_live needs probes for flip eligibility");

    const bool want_probability = trial.metric_kind == MetricKind::CS;
    const bool labeled = cfg.mode != ExperimentMode::Baseline;

    // Per-sample randomization: RandomBinary re-draws the table every trial.
    ScoreTable working;
    if (labeled) {
        working = *cfg.label_source;
        if (cfg.mode == ExperimentMode::RandomBinary)
            working = per_trial_random_scores(cfg.roster, working.seed.value_or(cfg.seed),
                                              trial.id());
    }

    Transcript transcript;
    transcript.trial = trial;
    transcript.mode = cfg.mode;
    if (labeled) transcript.labels_shown.emplace_back();  // round 0 shows none

    // Round 0: independent stances.
    RoundRecord round0;
    round0.round_index = 0;
    for (const AgentId& agent : cfg.roster) {
        StanceContext ctx;
        ctx.trial = &trial;
        ctx.round_index = 0;
        round0.stances[agent] =
            backends.at(agent)->respond(assemble_round0_prompt(trial, agent), ctx,
                                        want_probability);
    }
    bool any_valid = false;
    for (const auto& [agent, stance] : round0.stances) any_valid |= stance.valid();
    if (!any_valid)
        throw AllInvalidError("discussion: every round-0 stance is Invalid for " + trial.id());
    transcript.rounds.push_back(std::move(round0));

    // Last valid stance per agent, used for peer display when an agent later
    // goes Invalid.
    std::map<AgentId, StanceLabel> displayed;
    for (const auto& [agent, stance] : transcript.rounds[0].stances)
        if (stance.valid()) displayed[agent] = stance.label;

    // Live flip-penalty state, confined to this discussion.
    std::map<AgentId, DssState> live_state;
    if (cfg.dss_live) {
        for (const AgentId& agent : cfg.roster) {
            auto pit = probes->find({agent, trial.question.id});
            const bool eligible = pit != probes->end() &&
                                  pit->second.chosen != trial.user_option;
            live_state[agent] = DssState::init(working.score(agent, trial.metric_kind),
                                               working.delta, eligible, cfg.dss_symmetric);
        }
    }

    for (int t = 1; t <= cfg.update_rounds; ++t) {
        LabelBlock block;
        if (labeled) {
            block = full_label_block(working, trial.metric_kind, cfg.mode);
            std::map<AgentId, std::string> shown;
            for (const AgentId& agent : cfg.roster) shown[agent] = block.labels.at(agent);
            transcript.labels_shown.push_back(std::move(shown));
        }

        RoundRecord round;
        round.round_index = t;
        for (const AgentId& receiver : cfg.roster) {
            std::vector<AgentId> peer_order;
            for (const AgentId& peer : cfg.roster)
                if (peer != receiver) peer_order.push_back(peer);
            if (cfg.shuffle_peer_block) {
                auto rng = make_engine(stream_seed(cfg.seed, "peer_shuffle", trial.id(),
                                                   static_cast<std::uint64_t>(t), receiver.str()));
                deterministic_shuffle(peer_order, rng);
            }

            std::vector<PeerLine> peers;
            StanceContext ctx;
            ctx.trial = &trial;
            ctx.round_index = t;
            ctx.labels_present = labeled;
            for (const AgentId& peer : peer_order) {
                auto it = displayed.find(peer);
                if (it == displayed.end()) {
                    // No valid stance yet: the peer's line is omitted.
                    std::fprintf(stderr, "note: %s has no valid stance to display in %s round %d\n",
                                 peer.str().c_str(), trial.id().c_str(), t);
                    continue;
                }
                peers.push_back(PeerLine{peer, it->second});
                ctx.peer_stances[peer] = it->second;
            }

            std::vector<LabelLine> labels;
            if (labeled) {
                for (const AgentId& peer : block.order)
                    if (peer != receiver) labels.push_back(LabelLine{peer, block.labels.at(peer)});
                for (const auto& [peer, tier] : block.tiers)
                    if (peer != receiver) ctx.peer_tiers[peer] = tier;
            }

            if (auto it = displayed.find(receiver); it != displayed.end()) ctx.own_prev = it->second;

            PromptBundle prompt =
                assemble_discussion_prompt(trial, receiver, peers, labels, cfg.mode, t);
            round.stances[receiver] = backends.at(receiver)->respond(prompt, ctx, want_probability);
        }

        // Flips between consecutive recorded rounds (both stances valid).
        const RoundRecord& prev = transcript.rounds.back();
        std::optional<StanceLabel> prev_majority;
        try {
            MajorityOutcome o = majority_outcome(prev);
            if (o == MajorityOutcome::MajorityAgree) prev_majority = StanceLabel::AgreeWithUser;
            if (o == MajorityOutcome::MajorityDisagree)
                prev_majority = StanceLabel::DisagreeWithUser;
        } catch (const AllInvalidError&) {
        }

        for (const AgentId& agent : cfg.roster) {
            const StanceResponse& before = prev.stances.at(agent);
            const StanceResponse& after = round.stances.at(agent);
            if (!before.valid() || !after.valid()) continue;
            if (!is_flip(before, after)) continue;
            FlipRecord flip;
            flip.trial_id = trial.id();
            flip.agent = agent;
            flip.round = t;
            flip.from = before.label;
            flip.to = after.label;
            flip.toward_user = after.label == StanceLabel::AgreeWithUser;
            flip.toward_correct = after.label == StanceLabel::DisagreeWithUser;
            if (prev_majority) flip.toward_prev_majority = after.label == *prev_majority;
            for (const AgentId& peer : cfg.roster) {
                if (peer == agent) continue;
                const StanceResponse& ps = prev.stances.at(peer);
                if (ps.valid() && ps.label == after.label) flip.sources.push_back(peer);
            }

            if (cfg.dss_live) {
                DssState& state = live_state[agent];
                state = dss_step(state, flip.toward_user, flip.toward_correct);
                working.scores.at(agent)[static_cast<int>(trial.metric_kind)] = state.value();
            }
            transcript.flips.push_back(std::move(flip));
        }

        for (const auto& [agent, stance] : round.stances)
            if (stance.valid()) displayed[agent] = stance.label;
        transcript.rounds.push_back(std::move(round));
    }

    return transcript;
}

namespace {

struct Checkpoint {
    std::vector<Transcript> done;
    std::set<std::string> done_ids;
    std::set<std::string> skipped_ids;
};

Checkpoint load_checkpoint(const std::filesystem::path& path, const std::string& config_hash) {
    Checkpoint ckpt;
    if (path.empty() || !std::filesystem::exists(path)) return ckpt;
    JsonlFile file = read_jsonl(path);
    if (!config_hash.empty() && file.header.config_hash != config_hash)
        throw Error("checkpoint " + path.string() + " was written by config " +
                    file.header.config_hash + ", current is " + config_hash);
    for (std::size_t i = 0; i < file.records.size(); ++i) {
        const std::string& line = file.records[i];
        if (auto skipped = skipped_id_from_json(line)) {
            ckpt.skipped_ids.insert(*skipped);
            continue;
        }
        try {
            Transcript t = transcript_from_json(line);
            ckpt.done_ids.insert(t.trial.id());
            ckpt.done.push_back(std::move(t));
        } catch (const std::exception& e) {
            // A hard kill can truncate the final line mid-write; that trial
            // simply reruns. Corruption anywhere else is a real error.
            if (i + 1 == file.records.size()) {
                std::fprintf(stderr, "checkpoint %s: dropping truncated last record\n",
                             path.string().c_str());
                break;
            }
            throw Error("checkpoint " + path.string() + " record " + std::to_string(i + 1) +
                        ": " + e.what());
        }
    }
    return ckpt;
}

}  // namespace

ExperimentResult run_experiment(std::span<const Trial> trials, const DiscussionConfig& cfg,
                                const BackendMap& backends, const ProbeMap* probes,
                                const ExperimentOptions& opts) {
    cfg.validate();
    Checkpoint ckpt = load_checkpoint(opts.checkpoint_path, opts.config_hash);

    std::vector<const Trial*> pending;
    for (const Trial& t : trials)
        if (!ckpt.done_ids.count(t.id()) && !ckpt.skipped_ids.count(t.id()))
            pending.push_back(&t);

    std::ofstream ckpt_out;
    std::mutex io_mu;
    if (!opts.checkpoint_path.empty()) {
        const bool fresh = !std::filesystem::exists(opts.checkpoint_path);
        if (!opts.checkpoint_path.parent_path().empty())
            std::filesystem::create_directories(opts.checkpoint_path.parent_path());
        ckpt_out.open(opts.checkpoint_path, std::ios::app);
        if (!ckpt_out) throw Error("cannot open checkpoint " + opts.checkpoint_path.string());
        if (fresh) {
            ckpt_out << header_to_json(
                            FileHeader{opts.config_hash, "discuss-checkpoint", "1"})
                     << '\n';
            ckpt_out.flush();
        }
    }

    ExperimentResult result;
    result.transcripts = std::move(ckpt.done);
    for (const std::string& id : ckpt.skipped_ids) result.skipped.push_back(id);

    const std::size_t budget = opts.stop_after.value_or(pending.size());
    const std::size_t to_run = std::min(budget, pending.size());
    result.complete = to_run == pending.size();
    result.newly_completed = to_run;

    std::atomic<std::size_t> next{0};
    std::mutex result_mu;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= to_run) return;
            const Trial& trial = *pending[i];
            try {
                Transcript t = run_discussion(trial, cfg, backends, probes);
                const std::string line = transcript_to_json(t);
                {
                    std::lock_guard lock(io_mu);
                    if (ckpt_out.is_open()) {
                        ckpt_out << line << '\n';
                        ckpt_out.flush();  // checkpoint granularity: one trial
                    }
                }
                std::lock_guard lock(result_mu);
                result.transcripts.push_back(std::move(t));
            } catch (const Error& e) {
                std::fprintf(stderr, "trial %s skipped: %s\n", trial.id().c_str(), e.what());
                {
                    std::lock_guard lock(io_mu);
                    if (ckpt_out.is_open()) {
                        ckpt_out << skipped_to_json(trial.id(), e.what()) << '\n';
                        ckpt_out.flush();
                    }
                }
                std::lock_guard lock(result_mu);
                result.skipped.push_back(trial.id());
            }
        }
    };

    const int workers = std::max(1, opts.workers);
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::sort(result.transcripts.begin(), result.transcripts.end(),
              [](const Transcript& a, const Transcript& b) { return a.trial.id() < b.trial.id(); });
    std::sort(result.skipped.begin(), result.skipped.end());
    return result;
}

}  // namespace syco
