#pragma once
// Shared domain types for the sycophancy-aware multi-agent discussion harness:
// questions, trials, stances, transcripts, and the majority-outcome rule.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace syco {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AllInvalidError : Error {
    using Error::Error;
};
struct InvalidStanceError : Error {
    using Error::Error;
};

// Short unique model name, e.g. "llama3b". Stable across a run.
class AgentId {
public:
    AgentId() = default;
    explicit AgentId(std::string name) : name_(std::move(name)) {
        if (name_.empty()) throw Error("AgentId must be non-empty");
    }
    const std::string& str() const { return name_; }
    bool operator==(const AgentId&) const = default;
    auto operator<=>(const AgentId&) const = default;

private:
    std::string name_;
};

enum class OptionLetter : char { A = 'A', B = 'B', C = 'C', D = 'D' };

constexpr std::array<OptionLetter, 4> kAllOptions = {OptionLetter::A, OptionLetter::B,
                                                     OptionLetter::C, OptionLetter::D};

constexpr char to_char(OptionLetter o) { return static_cast<char>(o); }
constexpr int option_index(OptionLetter o) { return static_cast<char>(o) - 'A'; }
std::optional<OptionLetter> option_from_char(char c);

// A four-option multiple-choice item with known correct answer.
struct Question {
    std::string id;
    std::string subject;
    std::string text;
    std::array<std::string, 4> options;  // indexed A..D
    OptionLetter correct = OptionLetter::A;

    const std::string& option_text(OptionLetter o) const { return options[option_index(o)]; }
};

enum class MetricKind { AR, SCS, CS };
constexpr std::array<MetricKind, 3> kAllMetrics = {MetricKind::AR, MetricKind::SCS,
                                                   MetricKind::CS};

std::string to_string(MetricKind k);
std::optional<MetricKind> metric_from_string(const std::string& s);

enum class ExperimentMode {
    Baseline,
    BSS,
    DBSS,
    DSS,
    BinaryBSS,
    AccuracyBSS,
    RandomBSS,
    RandomBinary,
};
constexpr std::array<ExperimentMode, 8> kAllModes = {
    ExperimentMode::Baseline,    ExperimentMode::BSS,       ExperimentMode::DBSS,
    ExperimentMode::DSS,         ExperimentMode::BinaryBSS, ExperimentMode::AccuracyBSS,
    ExperimentMode::RandomBSS,   ExperimentMode::RandomBinary};

std::string to_string(ExperimentMode m);
std::optional<ExperimentMode> mode_from_string(const std::string& s);

// A question paired with the user's planted incorrect stance.
struct Trial {
    Question question;
    OptionLetter user_option = OptionLetter::A;  // u, always != question.correct
    MetricKind metric_kind = MetricKind::AR;
    std::uint64_t rng_seed = 0;

    std::string id() const { return question.id + ":" + to_string(metric_kind); }
    void validate() const;
};

// Binary stance toward the user's assertion. AgreeWithUser is the literal
// answer "correct", DisagreeWithUser the literal answer "incorrect".
enum class StanceLabel { AgreeWithUser, DisagreeWithUser, Invalid };

std::string to_string(StanceLabel l);
std::optional<StanceLabel> stance_from_string(const std::string& s);

// The word an agent must emit for this stance in a peer block.
std::string stance_word(StanceLabel l);

struct StanceResponse {
    StanceLabel label = StanceLabel::Invalid;
    std::optional<double> p_agree;  // normalized P(answer = "correct"), if available
    std::string raw_text;

    bool valid() const { return label != StanceLabel::Invalid; }
};

// One synchronous round: every roster agent present exactly once.
struct RoundRecord {
    int round_index = 0;
    std::map<AgentId, StanceResponse> stances;
};

// A stance change between consecutive rounds, classified by direction.
// toward_user and toward_correct partition all flips (stances are binary
// and u is always wrong). toward_prev_majority is absent when the previous
// round was tied.
struct FlipRecord {
    std::string trial_id;
    AgentId agent;
    int round = 0;
    StanceLabel from = StanceLabel::Invalid;
    StanceLabel to = StanceLabel::Invalid;
    bool toward_user = false;
    bool toward_correct = false;
    std::optional<bool> toward_prev_majority;
    std::vector<AgentId> sources;  // peers whose round-(t-1) stance equals the new stance
};

// Full record of one trial's discussion. rounds[0] is the independent round.
struct Transcript {
    Trial trial;
    ExperimentMode mode = ExperimentMode::Baseline;
    std::vector<RoundRecord> rounds;
    // Per round, agent -> tier label text shown to its peers. Empty for Baseline.
    std::vector<std::map<AgentId, std::string>> labels_shown;
    std::vector<FlipRecord> flips;
};

enum class MajorityOutcome {
    MajorityDisagree,  // the correct outcome: u is always wrong
    MajorityAgree,
    Tie,
};

std::string to_string(MajorityOutcome o);

// Strict-majority stance over non-Invalid stances. Invalid stances carry no
// information and are excluded. Throws AllInvalidError when nothing counts.
MajorityOutcome majority_outcome(const RoundRecord& final_round);

// True iff the two labels differ. Both must be non-Invalid.
bool is_flip(const StanceResponse& prev, const StanceResponse& cur);

}  // namespace syco
