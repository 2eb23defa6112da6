#pragma once
// Prompt assembly for every stage of the protocol. Templates are versioned
// text constants; golden-file tests pin every byte of the assembled output.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "syco/core.hpp"

namespace syco {

struct MissingPeerStanceError : Error {
    using Error::Error;
};

inline constexpr const char* kPromptTemplateVersion = "v1";

struct PromptBundle {
    std::string system_text;
    std::string user_text;
    int round_index = 0;
    AgentId receiver;
};

// One peer line of the {other_responses_block}: "name: correct|incorrect".
struct PeerLine {
    AgentId agent;
    StanceLabel stance = StanceLabel::Invalid;
};

// One peer line of the {scores_block}: "name: <tier label>".
struct LabelLine {
    AgentId agent;
    std::string label;
};

// Which discussion wrapper a mode uses.
enum class LabelFormat { None, FourTier, Binary };
LabelFormat label_format(ExperimentMode mode);

// Neutral knowledge probe (single option letter expected).
PromptBundle assemble_probe_prompt(const Question& question, const AgentId& receiver);

// Round 0: the user's assertion, no peer information.
// {wrong_answer} is the full text of option u, not its letter.
PromptBundle assemble_round0_prompt(const Trial& trial, const AgentId& receiver);

// Rounds >= 1: round-0 user text plus the mode's wrapper. peers must hold one
// entry per roster agent other than the receiver; labels must be present for
// every peer iff the mode shows labels.
PromptBundle assemble_discussion_prompt(const Trial& trial, const AgentId& receiver,
                                        const std::vector<PeerLine>& peers,
                                        const std::vector<LabelLine>& labels,
                                        ExperimentMode mode, int round_index);

std::string render_choices_block(const Question& question);
std::string render_peer_block(const std::vector<PeerLine>& peers);
std::string render_scores_block(const std::vector<LabelLine>& labels);

}  // namespace syco
