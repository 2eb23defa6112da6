#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "syco/agents.hpp"
#include "syco/prompts.hpp"

namespace syco {

namespace {

using nlohmann::json;

// Fair FIFO concurrency gate for max_in_flight.
class RequestGate {
public:
    explicit RequestGate(int limit) : limit_(limit) {}

    void acquire() {
        std::unique_lock lock(mu_);
        const std::uint64_t ticket = next_ticket_++;
        cv_.wait(lock, [&] { return in_flight_ < limit_ && ticket == serving_; });
        ++serving_;
        ++in_flight_;
        lock.unlock();
        cv_.notify_all();  // the next ticket may still have capacity
    }

    void release() {
        {
            std::lock_guard lock(mu_);
            --in_flight_;
        }
        cv_.notify_all();
    }

private:
    std::mutex mu_;
    std::condition_variable cv_;
    int limit_;
    int in_flight_ = 0;
    std::uint64_t next_ticket_ = 0;
    std::uint64_t serving_ = 0;
};

std::string normalized_token(std::string t) {
    std::size_t b = 0, e = t.size();
    auto junk = [](unsigned char c) { return std::isspace(c) || std::ispunct(c); };
    while (b < e && junk(static_cast<unsigned char>(t[b]))) ++b;
    while (e > b && junk(static_cast<unsigned char>(t[e - 1]))) --e;
    std::string out = t.substr(b, e - b);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// HTTP chat-completion backend. One POST per call; retries transport errors
// and malformed replies with exponential backoff, up to max_attempts.
class RemoteAgent final : public AgentBackend {
public:
    RemoteAgent(AgentId id, EndpointConfig config)
        : id_(std::move(id)), config_(std::move(config)), gate_(config_.max_in_flight) {
        config_.validate();
    }

    ProbeResult probe(const Question& question, const PromptBundle& prompt) override {
        std::string last_raw;
        for (int attempt = 0; attempt < config_.max_attempts; ++attempt) {
            backoff(attempt);
            auto reply = post_chat(prompt, /*want_logprobs=*/false);
            if (!reply) continue;
            last_raw = reply->content;
            if (auto letter = parse_option_letter(reply->content))
                return ProbeResult{*letter, std::nullopt};
        }
        if (last_raw.empty())
            throw BackendUnavailableError("probe: " + id_.str() + " unreachable after " +
                                          std::to_string(config_.max_attempts) + " attempts");
        throw UnparseableError("probe: " + id_.str() + " replied '" + last_raw + "' for " +
                               question.id);
    }

    StanceResponse respond(const PromptBundle& prompt, const StanceContext&,
                           bool want_probability) override {
        const bool want_logprobs = want_probability && config_.logprobs_requested;
        StanceResponse out;
        for (int attempt = 0; attempt < config_.max_attempts; ++attempt) {
            backoff(attempt);
            auto reply = post_chat(prompt, want_logprobs);
            if (!reply) continue;
            out.raw_text = reply->content;
            out.label = parse_stance_label(reply->content);
            if (!out.valid()) continue;  // re-prompt on malformed output
            if (want_probability) {
                if (reply->p_agree)
                    out.p_agree = reply->p_agree;
                else
                    out.p_agree = degenerate(out.label);
                if (!reply->p_agree) warn_degenerate();
            } else {
                out.p_agree = degenerate(out.label);
            }
            return out;
        }
        out.label = StanceLabel::Invalid;  // raw_text of the last attempt preserved
        out.p_agree.reset();
        return out;
    }

private:
    struct Reply {
        std::string content;
        std::optional<double> p_agree;
    };

    static double degenerate(StanceLabel l) {
        return l == StanceLabel::AgreeWithUser ? 1.0 : 0.0;
    }

    void backoff(int attempt) {
        if (attempt == 0) return;
        const double seconds = config_.base_backoff_s * std::pow(2.0, attempt - 1);
        std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
    }

    void warn_degenerate() {
        if (warned_.exchange(true)) return;
        std::fprintf(stderr,
                     "warning: endpoint for %s returned no token probabilities; "
                     "CS falls back to degenerate probabilities this run\n",
                     id_.str().c_str());
    }

    std::optional<Reply> post_chat(const PromptBundle& prompt, bool want_logprobs) {
        json body = {
            {"model", config_.model},
            {"messages",
             json::array({json{{"role", "system"}, {"content", prompt.system_text}},
                          json{{"role", "user"}, {"content", prompt.user_text}}})},
            {"temperature", config_.temperature},
            {"max_tokens", config_.max_tokens},
        };
        if (want_logprobs) {
            body["logprobs"] = true;
            body["top_logprobs"] = 20;
        }

        httplib::Client client(config_.base_url);
        client.set_connection_timeout(std::chrono::duration<double>(config_.timeout_s));
        client.set_read_timeout(std::chrono::duration<double>(config_.timeout_s));
        httplib::Headers headers;
        if (!config_.api_key_env.empty()) {
            const char* key = std::getenv(config_.api_key_env.c_str());
            if (key == nullptr)
                throw BackendUnavailableError("remote: env var " + config_.api_key_env +
                                              " is not set");
            const std::string value = config_.auth_header == "Authorization"
                                          ? std::string("Bearer ") + key
                                          : std::string(key);
            headers.emplace(config_.auth_header, value);
        }

        gate_.acquire();
        auto result = client.Post(config_.path, headers, body.dump(), "application/json");
        gate_.release();

        if (!result || result->status < 200 || result->status >= 300) return std::nullopt;
        try {
            json j = json::parse(result->body);
            Reply reply;
            const json& choice = j.at("choices").at(0);
            reply.content = choice.at("message").at("content").get<std::string>();
            if (want_logprobs && choice.contains("logprobs")) reply.p_agree = extract_p(choice);
            return reply;
        } catch (const json::exception&) {
            return std::nullopt;
        }
    }

    // P("correct") / (P("correct") + P("incorrect")) over the first generated
    // token's top_logprobs.
    static std::optional<double> extract_p(const json& choice) {
        const json& lp = choice.at("logprobs");
        if (!lp.contains("content") || lp.at("content").empty()) return std::nullopt;
        const json& first = lp.at("content").at(0);
        if (!first.contains("top_logprobs")) return std::nullopt;
        double p_correct = 0.0, p_incorrect = 0.0;
        for (const json& cand : first.at("top_logprobs")) {
            const std::string token = normalized_token(cand.at("token").get<std::string>());
            const double p = std::exp(cand.at("logprob").get<double>());
            if (token == "correct")
                p_correct += p;
            else if (token == "incorrect")
                p_incorrect += p;
        }
        if (p_correct + p_incorrect <= 0.0) return std::nullopt;
        return p_correct / (p_correct + p_incorrect);
    }

    AgentId id_;
    EndpointConfig config_;
    RequestGate gate_;
    std::atomic<bool> warned_{false};
};

}  // namespace

std::unique_ptr<AgentBackend> make_remote_agent(AgentId id, EndpointConfig config) {
    return std::make_unique<RemoteAgent>(std::move(id), std::move(config));
}

}  // namespace syco
