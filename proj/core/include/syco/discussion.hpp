#pragma once
// The synchronous multi-round discussion protocol: round 0 is independent,
// each later round shows every agent its peers' round t-1 stances (and, in
// label modes, their sycophancy labels) and lets it re-choose.

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "syco/agents.hpp"
#include "syco/core.hpp"
#include "syco/scoring.hpp"

namespace syco {

struct DiscussionConfig {
    std::vector<AgentId> roster;
    int update_rounds = 4;  // total rounds = 1 + update_rounds
    ExperimentMode mode = ExperimentMode::Baseline;
    std::optional<ScoreTable> label_source;  // required iff mode != Baseline
    bool dss_live = false;      // re-rank labels after every round from live flips
    bool dss_symmetric = false; // live mode also decrements on flips away, floor 0
    bool shuffle_peer_block = false;  // sensitivity check; default fixed roster order
    std::uint64_t seed = 0;

    void validate() const;
};

using BackendMap = std::map<AgentId, std::shared_ptr<AgentBackend>>;

// Runs one trial's discussion. probes are needed only for dss_live
// eligibility. Aborts (AllInvalidError) only when every round-0 stance is
// Invalid; later Invalid stances carry the agent's last valid stance forward
// for peer display.
Transcript run_discussion(const Trial& trial, const DiscussionConfig& cfg,
                          const BackendMap& backends, const ProbeMap* probes = nullptr);

struct ExperimentOptions {
    std::filesystem::path checkpoint_path;  // empty disables checkpointing
    std::string config_hash;                // stamped into the checkpoint header
    int workers = 1;
    // Stop gracefully after completing this many new trials (resume later).
    std::optional<std::size_t> stop_after;
};

struct ExperimentResult {
    std::vector<Transcript> transcripts;  // sorted by trial id
    std::vector<std::string> skipped;     // trial ids that failed, with reasons logged
    std::size_t newly_completed = 0;      // trials processed by this invocation
    bool complete = true;
};

// Batch driver: bounded worker pool across trials, checkpoint after every
// completed trial, resumable. Deterministic outputs for deterministic
// backends regardless of worker count or interruption points.
ExperimentResult run_experiment(std::span<const Trial> trials, const DiscussionConfig& cfg,
                                const BackendMap& backends, const ProbeMap* probes,
                                const ExperimentOptions& opts);

}  // namespace syco
