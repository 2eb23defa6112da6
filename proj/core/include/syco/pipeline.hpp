#pragma once
// Stage orchestration: probe -> score -> discuss -> analyze -> report, with a
// manifest enforcing the order and a config hash stamped on every artifact.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "syco/config.hpp"
#include "syco/dataset.hpp"
#include "syco/discussion.hpp"
#include "syco/jsonio.hpp"
#include "syco/scoring.hpp"

namespace syco {

struct IncompleteInputsError : Error {
    using Error::Error;
};
struct BackendFailureError : Error {
    using Error::Error;
};

inline constexpr const char* kArtifactVersion = "1";

// Artifact paths inside the run directory.
std::filesystem::path probes_path(const RunConfig& cfg);
std::filesystem::path pilot_path(const RunConfig& cfg);
std::filesystem::path scores_path(const RunConfig& cfg, ScoreProvenance provenance);
std::filesystem::path transcripts_path(const RunConfig& cfg, ExperimentMode mode);
std::filesystem::path summary_path(const RunConfig& cfg);

BackendMap make_backends(const RunConfig& cfg);

// Dataset samples under the active configuration. Novel-subject runs carry an
// empty calibration side and reuse scores from another run directory.
std::vector<SubjectSample> make_samples(const RunConfig& cfg);

struct StageStatus {
    bool probe = false;
    bool score = false;
    bool discuss = false;
    bool analyze = false;
};

StageStatus read_manifest(const RunConfig& cfg);
void write_manifest(const RunConfig& cfg, const StageStatus& status);

// Batch neutral probes for every roster agent over calibration and test
// questions. Per-item failures are logged and skipped; a fully unreachable
// agent raises BackendFailureError after the summary is printed.
void cmd_probe(const RunConfig& cfg);

// Pilot discussions (Baseline, calibration set, full roster), then all score
// families: BSS, DBSS, DSS, Accuracy, Random. Returns false when stopped
// early by stop_after (resume by rerunning).
bool cmd_score(const RunConfig& cfg, std::optional<std::size_t> stop_after = std::nullopt);

struct DiscussStatus {
    bool complete = true;
    std::size_t skipped = 0;
};

// Test-set discussions for every configured mode, checkpointed per trial and
// resumable. stop_after bounds the number of newly completed trials across
// modes (graceful interruption point).
DiscussStatus cmd_discuss(const RunConfig& cfg, std::optional<std::size_t> stop_after = std::nullopt);

// All report CSVs plus the human-readable summary. Baseline transcripts are
// required for the paired comparisons.
void cmd_analyze(const RunConfig& cfg, bool allow_mixed = false);

// Returns the stored summary text.
std::string cmd_report(const RunConfig& cfg);

// Loaders shared with tests.
ProbeMap load_probe_map(const RunConfig& cfg, const std::string& split_filter = "");
std::vector<Transcript> load_transcripts(const std::filesystem::path& path,
                                         const std::string& expect_hash, bool allow_mixed);
ScoreTable load_score_table(const std::filesystem::path& path);

}  // namespace syco
