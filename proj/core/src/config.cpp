#include "syco/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "syco/rng.hpp"

namespace syco {

using nlohmann::json;

namespace {

// ${VAR} -> environment value. Applied to string leaves after hashing so
// secrets never reach the hash or the provenance copy.
std::string interpolate_env(const std::string& value) {
    std::string out;
    std::size_t i = 0;
    while (i < value.size()) {
        if (value[i] == '$' && i + 1 < value.size() && value[i + 1] == '{') {
            const std::size_t end = value.find('}', i + 2);
            if (end == std::string::npos) throw ConfigError("unterminated ${ in: " + value);
            const std::string var = value.substr(i + 2, end - i - 2);
            const char* env = std::getenv(var.c_str());
            if (env == nullptr) throw ConfigError("environment variable not set: " + var);
            out += env;
            i = end + 1;
        } else {
            out += value[i++];
        }
    }
    return out;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

SimProfile parse_sim(const json& j) {
    SimProfile p;
    p.sycophancy = get_or(j, "sycophancy", 0.0);
    p.conformity = get_or(j, "conformity", 0.0);
    p.label_trust = get_or(j, "label_trust", 0.0);
    p.flip_inertia = get_or(j, "flip_inertia", 0.0);
    p.seed = get_or<std::uint64_t>(j, "seed", 0);
    if (j.contains("knowledge"))
        for (const auto& [subject, v] : j.at("knowledge").items())
            p.knowledge_accuracy[subject] = v.get<double>();
    p.validate();
    return p;
}

EndpointConfig parse_remote(const json& j) {
    EndpointConfig c;
    c.base_url = interpolate_env(get_or<std::string>(j, "base_url", ""));
    c.path = get_or<std::string>(j, "path", c.path);
    c.model = get_or<std::string>(j, "model", "");
    c.api_key_env = get_or<std::string>(j, "api_key_env", "");
    c.auth_header = get_or<std::string>(j, "auth_header", c.auth_header);
    c.max_in_flight = get_or(j, "max_in_flight", c.max_in_flight);
    c.max_attempts = get_or(j, "max_attempts", c.max_attempts);
    c.base_backoff_s = get_or(j, "base_backoff_s", c.base_backoff_s);
    c.timeout_s = get_or(j, "timeout_s", c.timeout_s);
    c.logprobs_requested = get_or(j, "logprobs", c.logprobs_requested);
    c.temperature = get_or(j, "temperature", c.temperature);
    c.max_tokens = get_or(j, "max_tokens", c.max_tokens);
    c.validate();
    return c;
}

}  // namespace

std::vector<AgentId> RunConfig::roster_ids() const {
    std::vector<AgentId> ids;
    ids.reserve(roster.size());
    for (const RosterEntry& e : roster) ids.push_back(e.id);
    return ids;
}

void RunConfig::validate() const {
    if (roster.size() < 2) throw ConfigError("roster must list at least 2 agents");
    std::set<AgentId> unique;
    for (const RosterEntry& e : roster)
        if (!unique.insert(e.id).second)
            throw ConfigError("duplicate roster agent: " + e.id.str());
    if (modes.empty()) throw ConfigError("modes list is empty");
    if (update_rounds < 1) throw ConfigError("update_rounds must be >= 1");
    if (delta < 0.0) throw ConfigError("delta must be >= 0");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    if (out_dir.empty()) throw ConfigError("out directory required");
    if (dataset.subjects.empty() && !novel_subjects.enabled)
        throw ConfigError("dataset.subjects is empty");
    if (dataset.per_subject < 1) throw ConfigError("dataset.per_subject must be >= 1");
    if (novel_subjects.enabled) {
        if (novel_subjects.subjects.empty())
            throw ConfigError("novel_subjects.subjects is empty");
        if (novel_subjects.scores_from.empty())
            throw ConfigError("novel_subjects.scores_from required");
    }
}

RunConfig run_config_from_json(const std::string& text, const CliOverrides& overrides) {
    json j;
    try {
        j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }

    // Apply overrides before hashing so the hash identifies the effective run.
    if (overrides.seed) j["seed"] = *overrides.seed;
    if (overrides.out_dir) j["out"] = overrides.out_dir->string();
    if (overrides.max_in_flight) j["concurrency"]["max_in_flight"] = *overrides.max_in_flight;
    if (!overrides.modes.empty()) j["modes"] = overrides.modes;

    RunConfig cfg;
    cfg.raw_text = j.dump(2);
    cfg.config_hash = [&] {
        // The hash identifies the experiment, not the invocation: output
        // location, worker counts, and the mode selection (which only picks
        // which per-mode artifacts to produce) stay out of it.
        json canonical = j;
        canonical.erase("out");
        canonical.erase("concurrency");
        canonical.erase("modes");
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx",
                      static_cast<unsigned long long>(fnv1a64(canonical.dump())));
        return std::string(buf);
    }();

    if (!j.contains("dataset")) throw ConfigError("missing 'dataset' section");
    const json& jd = j.at("dataset");
    cfg.dataset.source_path = interpolate_env(get_or<std::string>(jd, "source", ""));
    cfg.dataset.subjects = get_or(jd, "subjects", std::vector<std::string>{});
    cfg.dataset.per_subject = get_or(jd, "per_subject", 50);
    cfg.seed = get_or<std::uint64_t>(j, "seed", 0);
    cfg.dataset.seed = get_or<std::uint64_t>(jd, "seed", cfg.seed);

    if (!j.contains("roster")) throw ConfigError("missing 'roster' section");
    for (const json& je : j.at("roster")) {
        RosterEntry entry;
        const std::string name = get_or<std::string>(je, "name", "");
        if (name.empty()) throw ConfigError("roster entry without a name");
        entry.id = AgentId(name);
        if (!je.contains("backend")) throw ConfigError("roster entry " + name + ": no backend");
        const json& jb = je.at("backend");
        const std::string kind = get_or<std::string>(jb, "kind", "");
        if (kind == "simulated") {
            SimProfile p = parse_sim(jb);
            if (!jb.contains("seed")) p.seed = stream_seed(cfg.seed, "sim_agent", name);
            entry.backend = p;
        } else if (kind == "remote") {
            entry.backend = parse_remote(jb);
        } else if (kind == "replay") {
            ReplayBackendConfig r;
            r.script_path = interpolate_env(get_or<std::string>(jb, "script", ""));
            if (r.script_path.empty())
                throw ConfigError("roster entry " + name + ": replay needs a script");
            entry.backend = r;
        } else {
            throw ConfigError("roster entry " + name + ": unknown backend kind '" + kind + "'");
        }
        cfg.roster.push_back(std::move(entry));
    }

    if (j.contains("discussion")) {
        const json& jdisc = j.at("discussion");
        cfg.update_rounds = get_or(jdisc, "update_rounds", cfg.update_rounds);
        cfg.shuffle_peer_block = get_or(jdisc, "shuffle_peer_block", cfg.shuffle_peer_block);
    }

    for (const std::string& name : get_or(j, "modes", std::vector<std::string>{})) {
        auto mode = mode_from_string(name);
        if (!mode) throw ConfigError("unknown mode '" + name + "'");
        cfg.modes.push_back(*mode);
    }

    cfg.delta = get_or(j, "delta", cfg.delta);
    if (j.contains("dss")) {
        cfg.dss_symmetric = get_or(j.at("dss"), "symmetric", cfg.dss_symmetric);
        cfg.dss_live = get_or(j.at("dss"), "live", cfg.dss_live);
    }
    if (j.contains("analysis"))
        cfg.influence_single_source =
            get_or(j.at("analysis"), "influence_single_source", cfg.influence_single_source);

    cfg.out_dir = get_or<std::string>(j, "out", "");
    if (j.contains("concurrency")) {
        cfg.workers = get_or(j.at("concurrency"), "workers", cfg.workers);
        cfg.max_in_flight = get_or(j.at("concurrency"), "max_in_flight", cfg.max_in_flight);
    }

    if (j.contains("novel_subjects")) {
        const json& jn = j.at("novel_subjects");
        cfg.novel_subjects.enabled = get_or(jn, "enabled", false);
        cfg.novel_subjects.scores_from = get_or<std::string>(jn, "scores_from", "");
        cfg.novel_subjects.subjects = get_or(jn, "subjects", std::vector<std::string>{});
        cfg.novel_subjects.per_subject = get_or(jn, "per_subject", 15);
    }

    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path, const CliOverrides& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return run_config_from_json(buffer.str(), overrides);
}

}  // namespace syco
