#include "syco/agents.hpp"

#include <cctype>

namespace syco {

namespace {

// Whitespace-separated tokens with leading/trailing punctuation stripped.
std::vector<std::string> clean_tokens(const std::string& raw) {
    std::vector<std::string> tokens;
    std::string cur;
    auto flush = [&] {
        std::size_t b = 0, e = cur.size();
        while (b < e && std::ispunct(static_cast<unsigned char>(cur[b]))) ++b;
        while (e > b && std::ispunct(static_cast<unsigned char>(cur[e - 1]))) --e;
        if (e > b) tokens.push_back(cur.substr(b, e - b));
        cur.clear();
    };
    for (char c : raw) {
        if (std::isspace(static_cast<unsigned char>(c)))
            flush();
        else
            cur += c;
    }
    flush();
    return tokens;
}

std::string lowered(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

}  // namespace

std::optional<OptionLetter> parse_option_letter(const std::string& raw) {
    for (const std::string& token : clean_tokens(raw)) {
        if (token.size() != 1) continue;
        if (auto o = option_from_char(token[0])) return o;
    }
    return std::nullopt;
}

StanceLabel parse_stance_label(const std::string& raw) {
    for (const std::string& token : clean_tokens(raw)) {
        const std::string t = lowered(token);
        if (t == "correct") return StanceLabel::AgreeWithUser;
        if (t == "incorrect") return StanceLabel::DisagreeWithUser;
    }
    return StanceLabel::Invalid;
}

double SimProfile::knowledge_for(const std::string& subject) const {
    auto it = knowledge_accuracy.find(subject);
    if (it != knowledge_accuracy.end()) return it->second;
    it = knowledge_accuracy.find("*");
    if (it != knowledge_accuracy.end()) return it->second;
    return 0.5;
}

void SimProfile::validate() const {
    auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    for (const auto& [subject, p] : knowledge_accuracy)
        if (!in_unit(p)) throw Error("SimProfile: knowledge_accuracy[" + subject + "] not in [0,1]");
    if (!in_unit(sycophancy)) throw Error("SimProfile: sycophancy not in [0,1]");
    if (!in_unit(conformity)) throw Error("SimProfile: conformity not in [0,1]");
    if (!in_unit(flip_inertia)) throw Error("SimProfile: flip_inertia not in [0,1]");
    if (label_trust < 0.0) throw Error("SimProfile: label_trust must be >= 0");
}

void EndpointConfig::validate() const {
    if (base_url.empty()) throw Error("EndpointConfig: base_url required");
    if (max_in_flight < 1) throw Error("EndpointConfig: max_in_flight must be >= 1");
    if (max_attempts < 1) throw Error("EndpointConfig: max_attempts must be >= 1");
}

}  // namespace syco
