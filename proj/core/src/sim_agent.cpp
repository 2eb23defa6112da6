#include <cmath>

#include "syco/agents.hpp"
#include "syco/prompts.hpp"
#include "syco/rng.hpp"

namespace syco {

namespace {

// Oracle agent with closed-form agree probabilities. Every draw comes from a
// stream keyed by (profile seed, agent, question/trial, round), so outputs do
// not depend on scheduling order, and the inherent stance of probe() and the
// round-0 decision always coincide.
class SimulatedAgent final : public AgentBackend {
public:
    SimulatedAgent(AgentId id, SimProfile profile) : id_(std::move(id)), profile_(std::move(profile)) {
        profile_.validate();
    }

    ProbeResult probe(const Question& question, const PromptBundle&) override {
        ProbeResult r;
        r.chosen = inherent_stance(question);
        const double p = profile_.knowledge_for(question.subject);
        std::array<double, 4> probs{};
        for (OptionLetter o : kAllOptions)
            probs[option_index(o)] = o == question.correct ? p : (1.0 - p) / 3.0;
        r.per_option_probability = probs;
        return r;
    }

    StanceResponse respond(const PromptBundle& prompt, const StanceContext& ctx,
                           bool want_probability) override {
        if (ctx.trial == nullptr) throw Error("simulated agent: context is missing the trial");
        const Trial& trial = *ctx.trial;
        const double p_agree = agree_probability(trial, ctx);

        auto rng = make_engine(stream_seed(profile_.seed, "decide", id_.str(), trial.id(),
                                           static_cast<std::uint64_t>(ctx.round_index)));
        StanceResponse out;
        out.label = draw_bernoulli(rng, p_agree) ? StanceLabel::AgreeWithUser
                                                 : StanceLabel::DisagreeWithUser;
        // The exact decision probability when asked for one, the degenerate
        // indicator otherwise.
        out.p_agree = want_probability
                          ? p_agree
                          : (out.label == StanceLabel::AgreeWithUser ? 1.0 : 0.0);
        out.raw_text = stance_word(out.label);
        (void)prompt;
        return out;
    }

private:
    OptionLetter inherent_stance(const Question& question) const {
        auto rng = make_engine(stream_seed(profile_.seed, "probe", id_.str(), question.id));
        const double p = profile_.knowledge_for(question.subject);
        if (draw_bernoulli(rng, p)) return question.correct;
        std::array<OptionLetter, 3> wrong{};
        int n = 0;
        for (OptionLetter o : kAllOptions)
            if (o != question.correct) wrong[n++] = o;
        return wrong[draw_below(rng, 3)];
    }

    // P(stance = Agree) for the current round, exact.
    double agree_probability(const Trial& trial, const StanceContext& ctx) const {
        if (ctx.round_index == 0) {
            // Inherent stance equal to u forces agreement; otherwise agreeing
            // is a pure sycophancy event.
            if (inherent_stance(trial.question) == trial.user_option) return 1.0;
            return profile_.sycophancy;
        }

        const bool prev_agree = ctx.own_prev.has_value() &&
                                *ctx.own_prev == StanceLabel::AgreeWithUser;

        // Label-weighted peer majority; tie or no peers falls back to keeping
        // the previous stance.
        double agree_w = 0.0, disagree_w = 0.0;
        for (const auto& [peer, stance] : ctx.peer_stances) {
            double w = 1.0;
            if (ctx.labels_present) {
                auto it = ctx.peer_tiers.find(peer);
                const int tier = it == ctx.peer_tiers.end() ? 0 : it->second;
                w = std::exp(-profile_.label_trust * tier);
            }
            if (stance == StanceLabel::AgreeWithUser)
                agree_w += w;
            else if (stance == StanceLabel::DisagreeWithUser)
                disagree_w += w;
        }

        const double keep = profile_.flip_inertia +
                            (1.0 - profile_.flip_inertia) * (1.0 - profile_.conformity);
        const double follow = (1.0 - profile_.flip_inertia) * profile_.conformity;

        double before_syco;
        if (agree_w > disagree_w)
            before_syco = keep * (prev_agree ? 1.0 : 0.0) + follow;
        else if (disagree_w > agree_w)
            before_syco = keep * (prev_agree ? 1.0 : 0.0);
        else
            before_syco = (keep + follow) * (prev_agree ? 1.0 : 0.0);

        // Independent per-round sycophancy draw toward the user's stance.
        return before_syco + (1.0 - before_syco) * profile_.sycophancy;
    }

    AgentId id_;
    SimProfile profile_;
};

}  // namespace

std::unique_ptr<AgentBackend> make_simulated_agent(AgentId id, SimProfile profile) {
    return std::make_unique<SimulatedAgent>(std::move(id), std::move(profile));
}

}  // namespace syco
