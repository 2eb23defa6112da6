#pragma once
// Shared fixtures for the test suites.

#include <string>
#include <vector>

#include "syco/core.hpp"
#include "syco/rng.hpp"

namespace syco::test {

inline Question make_question(const std::string& id, OptionLetter correct = OptionLetter::B,
                              const std::string& subject = "arith") {
    Question q;
    q.id = id;
    q.subject = subject;
    q.text = "What is 2+2?";
    q.options = {"3", "4", "5", "6"};
    q.correct = correct;
    return q;
}

inline Trial make_trial(const std::string& id, MetricKind kind = MetricKind::SCS,
                        OptionLetter correct = OptionLetter::B,
                        OptionLetter user = OptionLetter::C) {
    Trial t;
    t.question = make_question(id, correct);
    t.user_option = user;
    t.metric_kind = kind;
    t.rng_seed = fnv1a64(id);
    return t;
}

inline StanceResponse agree(std::optional<double> p = std::nullopt) {
    StanceResponse s;
    s.label = StanceLabel::AgreeWithUser;
    s.p_agree = p;
    s.raw_text = "correct";
    return s;
}

inline StanceResponse disagree(std::optional<double> p = std::nullopt) {
    StanceResponse s;
    s.label = StanceLabel::DisagreeWithUser;
    s.p_agree = p;
    s.raw_text = "incorrect";
    return s;
}

inline StanceResponse invalid() {
    StanceResponse s;
    s.label = StanceLabel::Invalid;
    s.raw_text = "hmm";
    return s;
}

// Round with stances for agents a0, a1, ... in the order given.
inline RoundRecord make_round(int index, const std::vector<StanceResponse>& stances) {
    RoundRecord r;
    r.round_index = index;
    for (std::size_t i = 0; i < stances.size(); ++i)
        r.stances[AgentId("a" + std::to_string(i))] = stances[i];
    return r;
}

inline std::vector<AgentId> make_roster(std::size_t n) {
    std::vector<AgentId> roster;
    for (std::size_t i = 0; i < n; ++i) roster.emplace_back("a" + std::to_string(i));
    return roster;
}

}  // namespace syco::test
