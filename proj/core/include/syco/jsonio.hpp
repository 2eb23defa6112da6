#pragma once
// JSONL (de)serialization for bulk artifacts: transcripts, probes, score
// tables. Keys are emitted in sorted order so files are byte-deterministic.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "syco/agents.hpp"
#include "syco/core.hpp"
#include "syco/scoring.hpp"

namespace syco {

std::string transcript_to_json(const Transcript& t);
Transcript transcript_from_json(const std::string& line);

struct ProbeLine {
    AgentId agent;
    std::string question_id;
    std::string subject;
    std::string split;  // "calibration" | "test"
    ProbeResult result;
};

std::string probe_to_json(const ProbeLine& p);
ProbeLine probe_from_json(const std::string& line);

std::string score_table_to_json(const ScoreTable& t);
ScoreTable score_table_from_json(const std::string& text);

// Skip markers inside discussion checkpoints.
std::string skipped_to_json(const std::string& trial_id, const std::string& error);
std::optional<std::string> skipped_id_from_json(const std::string& line);

// Header line carried by every artifact file.
struct FileHeader {
    std::string config_hash;
    std::string stage;
    std::string artifact_version;
};

std::string header_to_json(const FileHeader& h);
FileHeader header_from_json(const std::string& line);

// Reads a JSONL artifact: first line must be a header, the rest records.
struct JsonlFile {
    FileHeader header;
    std::vector<std::string> records;
};
JsonlFile read_jsonl(const std::filesystem::path& path);

}  // namespace syco
