#pragma once
// Run configuration: a single human-readable JSON file with environment
// variable interpolation for secrets, validated before any work starts.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "syco/agents.hpp"
#include "syco/core.hpp"
#include "syco/dataset.hpp"

namespace syco {

struct ConfigError : Error {
    using Error::Error;
};

struct ReplayBackendConfig {
    std::string script_path;
};

using BackendConfig = std::variant<SimProfile, EndpointConfig, ReplayBackendConfig>;

struct RosterEntry {
    AgentId id;
    BackendConfig backend;
};

struct NovelSubjectsConfig {
    bool enabled = false;
    std::filesystem::path scores_from;  // run directory holding precomputed scores
    std::vector<std::string> subjects;
    int per_subject = 15;
};

struct RunConfig {
    DatasetConfig dataset;
    std::vector<RosterEntry> roster;
    int update_rounds = 4;
    bool shuffle_peer_block = false;
    std::vector<ExperimentMode> modes;
    double delta = 0.2;
    bool dss_symmetric = false;
    bool dss_live = false;
    bool influence_single_source = false;
    std::uint64_t seed = 0;
    std::filesystem::path out_dir;
    int workers = 1;
    int max_in_flight = 4;
    NovelSubjectsConfig novel_subjects;

    // Hash of the effective config with secrets left uninterpolated; stamps
    // every artifact this run writes.
    std::string config_hash;
    std::string raw_text;  // the effective config document, for provenance

    std::vector<AgentId> roster_ids() const;
    void validate() const;
};

struct CliOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> out_dir;
    std::optional<int> max_in_flight;
    std::vector<std::string> modes;  // replaces the config list when non-empty
};

// Loads, applies overrides, hashes, interpolates ${ENV_VAR} references, and
// validates. Throws ConfigError with a line-oriented message on any problem.
RunConfig load_run_config(const std::filesystem::path& path, const CliOverrides& overrides = {});
RunConfig run_config_from_json(const std::string& text, const CliOverrides& overrides = {});

}  // namespace syco
