#pragma once
// Uniform agent-backend abstraction. Three implementations: a remote LLM
// endpoint (HTTP chat-completion), a parameterized simulated agent used as the
// verification oracle, and a deterministic replay agent.

#include <map>
#include <memory>
#include <optional>
#include <string>

#include "syco/core.hpp"

namespace syco {

struct BackendUnavailableError : Error {
    using Error::Error;
};
struct UnparseableError : Error {
    using Error::Error;
};

struct PromptBundle;  // assembled by the discussion module (prompts.hpp)

// Answer to the neutral knowledge probe.
struct ProbeResult {
    OptionLetter chosen = OptionLetter::A;
    // Normalized per-option probabilities when the backend exposes them.
    std::optional<std::array<double, 4>> per_option_probability;
};

// Everything a backend may consult when producing a stance. Remote backends
// read only the prompt; the simulated agent reads the structured fields.
struct StanceContext {
    const Trial* trial = nullptr;
    int round_index = 0;
    std::optional<StanceLabel> own_prev;               // last valid own stance
    std::map<AgentId, StanceLabel> peer_stances;       // displayed round t-1 stances
    std::map<AgentId, int> peer_tiers;                 // tier index per peer when labels shown
    bool labels_present = false;
};

class AgentBackend {
public:
    virtual ~AgentBackend() = default;

    // Single option letter for the bare question. Retries malformed output up
    // to the backend's limit, then throws.
    virtual ProbeResult probe(const Question& question, const PromptBundle& prompt) = 0;

    // Stance toward the user's assertion. Exhausted retries yield
    // StanceLabel::Invalid with the raw text preserved, never an exception.
    virtual StanceResponse respond(const PromptBundle& prompt, const StanceContext& ctx,
                                   bool want_probability) = 0;
};

// Behavior profile for simulated agents.
//   knowledge_accuracy: per-subject probability of knowing the right answer
//                       ("*" is the fallback subject)
//   sycophancy:         per-round probability of jumping to the user's stance
//   conformity:         probability of following the (label-weighted) peer majority
//   label_trust:        peer weight = exp(-label_trust * tier_index)
//   flip_inertia:       probability of keeping the previous stance outright
struct SimProfile {
    std::map<std::string, double> knowledge_accuracy;
    double sycophancy = 0.0;
    double conformity = 0.0;
    double label_trust = 0.0;
    double flip_inertia = 0.0;
    std::uint64_t seed = 0;

    double knowledge_for(const std::string& subject) const;
    void validate() const;
};

struct EndpointConfig {
    std::string base_url;             // e.g. http://127.0.0.1:8080
    std::string path = "/v1/chat/completions";
    std::string model;
    std::string api_key_env;          // env var holding the bearer token; may be empty
    std::string auth_header = "Authorization";
    int max_in_flight = 4;
    int max_attempts = 3;
    double base_backoff_s = 0.5;
    double timeout_s = 60.0;
    bool logprobs_requested = false;
    double temperature = 0.0;
    int max_tokens = 8;

    void validate() const;
};

// Parse helpers shared by every backend. Forgiving rule: the first
// whitespace-separated token that, once stripped of punctuation, is a single
// A-D character (case-insensitive) wins.
std::optional<OptionLetter> parse_option_letter(const std::string& raw);

// First token equal to "correct"/"incorrect" (case-insensitive, punctuation
// stripped) decides the label; no match means Invalid.
StanceLabel parse_stance_label(const std::string& raw);

std::unique_ptr<AgentBackend> make_simulated_agent(AgentId id, SimProfile profile);
std::unique_ptr<AgentBackend> make_remote_agent(AgentId id, EndpointConfig config);
std::unique_ptr<AgentBackend> make_replay_agent(AgentId id, const std::string& script_path);

}  // namespace syco
