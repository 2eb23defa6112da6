#include <fstream>
#include <map>
#include <tuple>

#include <json.hpp>

#include "syco/agents.hpp"
#include "syco/prompts.hpp"

namespace syco {

namespace {

// Replays recorded raw outputs from a JSONL script of
// {trial_id, round, agent, raw_text}. Probe lines use round = -1 with the
// question id in the trial_id field. Parsing goes through the standard rules
// so a replayed run is indistinguishable from the live one it recorded.
class ReplayAgent final : public AgentBackend {
public:
    ReplayAgent(AgentId id, const std::string& script_path) : id_(std::move(id)) {
        std::ifstream in(script_path);
        if (!in) throw BackendUnavailableError("replay: cannot open " + script_path);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(line);
            } catch (const nlohmann::json::exception& e) {
                throw Error("replay " + script_path + " line " + std::to_string(lineno) + ": " +
                            e.what());
            }
            if (j.at("agent").get<std::string>() != id_.str()) continue;
            script_[{j.at("trial_id").get<std::string>(), j.at("round").get<int>()}] =
                j.at("raw_text").get<std::string>();
        }
    }

    ProbeResult probe(const Question& question, const PromptBundle&) override {
        const std::string& raw = lookup(question.id, -1);
        auto letter = parse_option_letter(raw);
        if (!letter)
            throw BackendUnavailableError("replay: unparseable probe for " + question.id + ": '" +
                                          raw + "'");
        return ProbeResult{*letter, std::nullopt};
    }

    StanceResponse respond(const PromptBundle&, const StanceContext& ctx,
                           bool /*want_probability*/) override {
        if (ctx.trial == nullptr) throw Error("replay agent: context is missing the trial");
        const std::string& raw = lookup(ctx.trial->id(), ctx.round_index);
        StanceResponse out;
        out.raw_text = raw;
        out.label = parse_stance_label(raw);
        if (out.valid())
            out.p_agree = out.label == StanceLabel::AgreeWithUser ? 1.0 : 0.0;
        return out;
    }

private:
    const std::string& lookup(const std::string& trial_id, int round) const {
        auto it = script_.find({trial_id, round});
        if (it == script_.end())
            throw BackendUnavailableError("replay: " + id_.str() + " has no line for " + trial_id +
                                          " round " + std::to_string(round));
        return it->second;
    }

    AgentId id_;
    std::map<std::pair<std::string, int>, std::string> script_;
};

}  // namespace

std::unique_ptr<AgentBackend> make_replay_agent(AgentId id, const std::string& script_path) {
    return std::make_unique<ReplayAgent>(std::move(id), script_path);
}

}  // namespace syco
