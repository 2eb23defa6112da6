#include <benchmark/benchmark.h>

#include "syco/analysis.hpp"
#include "syco/discussion.hpp"
#include "syco/rng.hpp"
#include "syco/scoring.hpp"

using namespace syco;

namespace {

Trial bench_trial(const std::string& id) {
    Trial t;
    t.question.id = id;
    t.question.subject = "bench";
    t.question.text = "Which option is right?";
    t.question.options = {"w", "x", "y", "z"};
    t.question.correct = OptionLetter::B;
    t.user_option = OptionLetter::C;
    t.metric_kind = MetricKind::SCS;
    return t;
}

BackendMap bench_backends(const std::vector<AgentId>& roster) {
    BackendMap backends;
    double sigma = 0.05;
    for (const AgentId& agent : roster) {
        SimProfile p;
        p.knowledge_accuracy["*"] = 1.0;
        p.sycophancy = sigma;
        p.conformity = 0.6;
        p.label_trust = 2.0;
        p.seed = fnv1a64(agent.str());
        backends[agent] = make_simulated_agent(agent, p);
        sigma += 0.11;
    }
    return backends;
}

}  // namespace

static void BM_RunDiscussion(benchmark::State& state) {
    std::vector<AgentId> roster;
    for (int i = 0; i < 6; ++i) roster.emplace_back("m" + std::to_string(i));
    BackendMap backends = bench_backends(roster);

    DiscussionConfig cfg;
    cfg.roster = roster;
    cfg.update_rounds = 4;
    cfg.mode = ExperimentMode::BSS;
    ScoreTable table;
    double v = 0.1;
    for (const AgentId& agent : roster) {
        table.scores[agent] = {v, v, v};
        v += 0.1;
    }
    cfg.label_source = table;
    cfg.seed = 3;

    std::size_t i = 0;
    for (auto _ : state) {
        Transcript t = run_discussion(bench_trial("q" + std::to_string(i++)), cfg, backends);
        benchmark::DoNotOptimize(t.rounds.size());
    }
}
BENCHMARK(BM_RunDiscussion);

static void BM_InfluenceMatrix(benchmark::State& state) {
    std::vector<AgentId> roster;
    for (int i = 0; i < 6; ++i) roster.emplace_back("m" + std::to_string(i));
    BackendMap backends = bench_backends(roster);
    DiscussionConfig cfg;
    cfg.roster = roster;
    cfg.update_rounds = 4;
    cfg.mode = ExperimentMode::Baseline;
    cfg.seed = 4;

    std::vector<Transcript> transcripts;
    for (int q = 0; q < static_cast<int>(state.range(0)); ++q)
        transcripts.push_back(run_discussion(bench_trial("q" + std::to_string(q)), cfg, backends));

    for (auto _ : state) {
        InfluenceMatrix m = influence_matrix(transcripts);
        benchmark::DoNotOptimize(m.counts.size());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_InfluenceMatrix)->Range(16, 256);

BENCHMARK_MAIN();
