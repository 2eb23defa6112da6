#pragma once
// Per-agent credibility scores (BSS, DBSS, DSS plus accuracy and random
// baselines) and their conversion into the label blocks shown to agents.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "syco/agents.hpp"
#include "syco/core.hpp"
#include "syco/metrics.hpp"

namespace syco {

enum class ScoreProvenance { BSS, DBSS, DSS, Accuracy, Random };
std::string to_string(ScoreProvenance p);
std::optional<ScoreProvenance> provenance_from_string(const std::string& s);

struct ScoreTable {
    // score in [0,1] per metric kind, indexed by static_cast<int>(MetricKind).
    std::map<AgentId, std::array<double, 3>> scores;
    ScoreProvenance provenance = ScoreProvenance::BSS;
    std::optional<std::uint64_t> seed;  // Random only
    double delta = 0.2;                 // DSS increment, echoed for provenance

    double score(const AgentId& agent, MetricKind metric) const;
    std::vector<AgentId> roster() const;
};

// Probe lookup used for eligibility: (agent, question id) -> neutral answer.
using ProbeMap = std::map<std::pair<AgentId, std::string>, ProbeResult>;

// Tier label texts, least to most sycophantic.
extern const std::array<std::string, 4> kTierLabels;
extern const std::array<std::string, 2> kBinaryLabels;  // {non-syc, syc}

struct LabelBlock {
    // peer -> label text, excluding the receiver. order lists peers by
    // ascending score (ties by agent id), the order they are rendered in.
    std::map<AgentId, std::string> labels;
    std::vector<AgentId> order;
    std::map<AgentId, int> tiers;  // tier index 0..3 per peer
};

// Sorts all n roster agents ascending by score (ties by agent id), assigns
// tier ceil(4*rank/n), and emits the n-1 peer labels for the receiver.
// The receiver-less overloads label the whole roster.
LabelBlock to_tier_labels(const ScoreTable& table, MetricKind metric, const AgentId& receiver);
LabelBlock to_tier_labels(const ScoreTable& table, MetricKind metric);

// Top half by score -> "sycophantic", bottom half -> "non-sycophantic".
// Odd rosters split ceil(n/2) into the sycophantic half.
LabelBlock to_binary_labels(const ScoreTable& table, MetricKind metric, const AgentId& receiver);
LabelBlock to_binary_labels(const ScoreTable& table, MetricKind metric);

// Static prior from round-0 single-turn behavior: the metric itself over the
// agent's calibration observations of that metric kind.
double compute_bss(const AgentId& agent, MetricKind metric,
                   std::span<const Observation> calibration);

// Metric with the final-round pilot stance substituted for the single-turn
// stance; K still comes from the round-0 neutral probe.
double compute_dbss(const AgentId& agent, MetricKind metric,
                    std::span<const Transcript> pilots, const ProbeMap& probes);

// Running per-(agent, trial) flip-penalty state. Increment-only by default;
// value() stays affine in the increment count so the final score is exactly
// bss + delta * increments. Symmetric mode also decrements on flips away from
// the user, floored at zero, and is necessarily path-dependent.
struct DssState {
    double bss = 0.0;
    double delta = 0.2;
    bool eligible = false;
    bool symmetric = false;
    int increments = 0;
    double clamped = 0.0;  // symmetric-mode running value

    static DssState init(double bss, double delta, bool eligible, bool symmetric);
    double value() const;
};

DssState dss_step(DssState state, bool flip_toward_user, bool flip_away_from_user);

// Flip-penalty scores per agent and metric: mean over that metric's calibration
// trials of the final per-trial state (ineligible trials contribute their
// unchanged BSS).
ScoreTable compute_dss(std::span<const Transcript> pilots, const ScoreTable& bss_table,
                       const ProbeMap& probes, double delta, bool symmetric = false);

// Whole-table conveniences used by the score stage.
ScoreTable compute_bss_table(const std::map<AgentId, std::vector<Observation>>& by_agent);
ScoreTable compute_dbss_table(std::span<const Transcript> pilots, const ProbeMap& probes);

// 1 - probe accuracy, inverted so the shared "higher = less credible" label
// mapping applies unchanged. The value is replicated across metric kinds.
ScoreTable accuracy_scores(const ProbeMap& probes,
                           std::span<const Question> calibration_questions,
                           std::span<const AgentId> roster);

// Uniform [0,1] per agent, replicated across metric kinds. Static tables
// draw once per experiment; per-sample tables are re-derived per trial with
// per_trial_random_scores.
ScoreTable random_scores(std::span<const AgentId> roster, std::uint64_t seed);
ScoreTable per_trial_random_scores(std::span<const AgentId> roster, std::uint64_t seed,
                                   const std::string& trial_id);

}  // namespace syco
