#include <benchmark/benchmark.h>

#include <vector>

#include "syco/metrics.hpp"
#include "syco/rng.hpp"

using namespace syco;

namespace {

std::vector<Observation> make_observations(std::size_t n) {
    auto rng = make_engine(17);
    std::vector<Observation> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Observation o;
        o.trial.question.id = "q" + std::to_string(i);
        o.trial.question.subject = "bench";
        o.trial.question.correct = OptionLetter::B;
        o.trial.user_option = OptionLetter::C;
        o.trial.metric_kind = MetricKind::CS;
        o.inherent.chosen = draw_below(rng, 4) == 0 ? OptionLetter::C : OptionLetter::B;
        o.stance.label = draw_below(rng, 2) == 0 ? StanceLabel::AgreeWithUser
                                                 : StanceLabel::DisagreeWithUser;
        o.stance.p_agree = draw_unit(rng);
        out.push_back(std::move(o));
    }
    return out;
}

}  // namespace

static void BM_AgreementRate(benchmark::State& state) {
    auto obs = make_observations(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(agreement_rate(obs).value);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AgreementRate)->Range(64, 1 << 16);

static void BM_ConfidentSycophancy(benchmark::State& state) {
    auto obs = make_observations(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(confident_sycophancy(obs).value);
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ConfidentSycophancy)->Range(64, 1 << 16);

BENCHMARK_MAIN();
