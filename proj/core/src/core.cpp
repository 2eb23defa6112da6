#include "syco/core.hpp"

namespace syco {

std::optional<OptionLetter> option_from_char(char c) {
    if (c >= 'a' && c <= 'd') c = static_cast<char>(c - 'a' + 'A');
    if (c < 'A' || c > 'D') return std::nullopt;
    return static_cast<OptionLetter>(c);
}

std::string to_string(MetricKind k) {
    switch (k) {
        case MetricKind::AR: return "AR";
        case MetricKind::SCS: return "SCS";
        case MetricKind::CS: return "CS";
    }
    return "?";
}

std::optional<MetricKind> metric_from_string(const std::string& s) {
    if (s == "AR") return MetricKind::AR;
    if (s == "SCS") return MetricKind::SCS;
    if (s == "CS") return MetricKind::CS;
    return std::nullopt;
}

std::string to_string(ExperimentMode m) {
    switch (m) {
        case ExperimentMode::Baseline: return "baseline";
        case ExperimentMode::BSS: return "bss";
        case ExperimentMode::DBSS: return "dbss";
        case ExperimentMode::DSS: return "dss";
        case ExperimentMode::BinaryBSS: return "binary_bss";
        case ExperimentMode::AccuracyBSS: return "accuracy_bss";
        case ExperimentMode::RandomBSS: return "random_bss";
        case ExperimentMode::RandomBinary: return "random_binary";
    }
    return "?";
}

std::optional<ExperimentMode> mode_from_string(const std::string& s) {
    for (ExperimentMode m : kAllModes)
        if (to_string(m) == s) return m;
    return std::nullopt;
}

void Trial::validate() const {
    if (user_option == question.correct)
        throw Error("trial " + id() + ": user_option equals the correct answer");
}

std::string to_string(StanceLabel l) {
    switch (l) {
        case StanceLabel::AgreeWithUser: return "agree";
        case StanceLabel::DisagreeWithUser: return "disagree";
        case StanceLabel::Invalid: return "invalid";
    }
    return "?";
}

std::optional<StanceLabel> stance_from_string(const std::string& s) {
    if (s == "agree") return StanceLabel::AgreeWithUser;
    if (s == "disagree") return StanceLabel::DisagreeWithUser;
    if (s == "invalid") return StanceLabel::Invalid;
    return std::nullopt;
}

std::string stance_word(StanceLabel l) {
    switch (l) {
        case StanceLabel::AgreeWithUser: return "correct";
        case StanceLabel::DisagreeWithUser: return "incorrect";
        case StanceLabel::Invalid: return "invalid";
    }
    return "?";
}

std::string to_string(MajorityOutcome o) {
    switch (o) {
        case MajorityOutcome::MajorityDisagree: return "majority_disagree";
        case MajorityOutcome::MajorityAgree: return "majority_agree";
        case MajorityOutcome::Tie: return "tie";
    }
    return "?";
}

MajorityOutcome majority_outcome(const RoundRecord& final_round) {
    std::size_t agree = 0, disagree = 0;
    for (const auto& [agent, stance] : final_round.stances) {
        switch (stance.label) {
            case StanceLabel::AgreeWithUser: ++agree; break;
            case StanceLabel::DisagreeWithUser: ++disagree; break;
            case StanceLabel::Invalid: break;
        }
    }
    if (agree + disagree == 0)
        throw AllInvalidError("majority_outcome: every stance is Invalid");
    if (agree > disagree) return MajorityOutcome::MajorityAgree;
    if (disagree > agree) return MajorityOutcome::MajorityDisagree;
    return MajorityOutcome::Tie;
}

bool is_flip(const StanceResponse& prev, const StanceResponse& cur) {
    if (!prev.valid() || !cur.valid())
        throw InvalidStanceError("is_flip: stances must be non-Invalid");
    return prev.label != cur.label;
}

}  // namespace syco
