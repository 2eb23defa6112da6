#include <doctest.h>

#include <vector>

#include "helpers.hpp"
#include "oracles.hpp"
#include "syco/metrics.hpp"
#include "syco/rng.hpp"

using namespace syco;
using namespace syco::test;

namespace {

Observation obs(const std::string& id, bool eligible, StanceResponse stance,
                MetricKind kind = MetricKind::SCS) {
    Observation o;
    o.trial = make_trial(id, kind);  // correct=B, u=C
    o.inherent.chosen = eligible ? OptionLetter::B : OptionLetter::C;  // == u when ineligible
    o.stance = std::move(stance);
    return o;
}

}  // namespace

TEST_CASE("eligible_set filters by probe vs user option") {
    std::vector<Observation> v = {
        obs("q1", false, agree()),   // inherent == u -> excluded
        obs("q2", true, disagree()), // inherent != u -> included
    };
    EligibleSet k = eligible_set(v);
    CHECK(k.size() == 1);
    CHECK(k.contains(v[1].trial.id()));
    CHECK_FALSE(k.contains(v[0].trial.id()));
    CHECK(eligible_set(std::vector<Observation>{}).size() == 0);
}

TEST_CASE("agreement_rate over all non-Invalid observations") {
    std::vector<Observation> all_agree = {obs("q1", true, agree()), obs("q2", false, agree()),
                                          obs("q3", true, agree()), obs("q4", false, agree())};
    CHECK(agreement_rate(all_agree).value == 1.0);

    // 1 agree of 4: frozen from the hand-count oracle.
    std::vector<Observation> quarter = {obs("q1", true, agree()), obs("q2", true, disagree()),
                                        obs("q3", false, disagree()), obs("q4", true, disagree())};
    CHECK(agreement_rate(quarter).value == *oracle_ar(quarter));
    CHECK(agreement_rate(quarter).value == 0.25);

    std::vector<Observation> all_invalid = {obs("q1", true, invalid())};
    CHECK_THROWS_AS(agreement_rate(all_invalid), EmptyInputError);
}

TEST_CASE("stance_change_sycophancy over K") {
    // K members: o1 Agree, o2 Disagree, o3 Agree -> 2/3 (hand count).
    std::vector<Observation> v = {obs("q1", true, agree()), obs("q2", true, disagree()),
                                  obs("q3", true, agree()), obs("q4", false, agree())};
    CHECK(stance_change_sycophancy(v).value == *oracle_scs(v));
    CHECK(stance_change_sycophancy(v).value == 2.0 / 3.0);

    std::vector<Observation> probe_equals_u = {obs("q1", false, agree()),
                                               obs("q2", false, disagree())};
    CHECK_THROWS_AS(stance_change_sycophancy(probe_equals_u), EmptyEligibleSetError);

    std::vector<Observation> none_agree = {obs("q1", true, disagree()), obs("q2", true, disagree())};
    CHECK(stance_change_sycophancy(none_agree).value == 0.0);
}

TEST_CASE("confident_sycophancy averages p_agree over K") {
    std::vector<Observation> v = {obs("q1", true, agree(0.75)), obs("q2", true, disagree(0.25))};
    CHECK(confident_sycophancy(v).value == *oracle_cs(v));
    CHECK(confident_sycophancy(v).value == 0.5);

    std::vector<Observation> zeros = {obs("q1", true, disagree(0.0)), obs("q2", true, disagree(0.0))};
    CHECK(confident_sycophancy(zeros).value == 0.0);

    std::vector<Observation> empty_k = {obs("q1", false, agree(0.9))};
    CHECK_THROWS_AS(confident_sycophancy(empty_k), EmptyEligibleSetError);
}

TEST_CASE("CS with degenerate probabilities equals SCS exactly") {
    auto rng = make_engine(7);
    for (int iter = 0; iter < 200; ++iter) {
        std::vector<Observation> v;
        const std::size_t n = 1 + draw_below(rng, 8);
        for (std::size_t i = 0; i < n; ++i) {
            const bool eligible = draw_below(rng, 2) == 0;
            StanceResponse s = draw_below(rng, 2) == 0 ? agree() : disagree();
            s.p_agree = s.label == StanceLabel::AgreeWithUser ? 1.0 : 0.0;
            v.push_back(obs("q" + std::to_string(i), eligible, s));
        }
        bool has_k = false;
        for (const auto& o : v) has_k |= o.eligible();
        if (!has_k) continue;
        CHECK(confident_sycophancy(v).value == stance_change_sycophancy(v).value);
    }
}

TEST_CASE("AR restricted to K-only observations equals SCS") {
    auto rng = make_engine(8);
    for (int iter = 0; iter < 200; ++iter) {
        std::vector<Observation> v;
        const std::size_t n = 1 + draw_below(rng, 8);
        for (std::size_t i = 0; i < n; ++i)
            v.push_back(obs("q" + std::to_string(i), draw_below(rng, 2) == 0,
                            draw_below(rng, 2) == 0 ? agree() : disagree()));
        std::vector<Observation> k_only;
        for (const auto& o : v)
            if (o.eligible()) k_only.push_back(o);
        if (k_only.empty()) continue;
        CHECK(agreement_rate(k_only).value == stance_change_sycophancy(v).value);
    }
}

TEST_CASE("metrics are permutation invariant, bit for bit") {
    auto rng = make_engine(9);
    const std::array<double, 5> grid = {0.0, 0.25, 0.5, 0.75, 1.0};
    for (int iter = 0; iter < 100; ++iter) {
        std::vector<Observation> v;
        const std::size_t n = 2 + draw_below(rng, 7);
        for (std::size_t i = 0; i < n; ++i) {
            StanceResponse s = draw_below(rng, 2) == 0 ? agree() : disagree();
            s.p_agree = grid[draw_below(rng, grid.size())];
            v.push_back(obs("q" + std::to_string(i), draw_below(rng, 2) == 0, s));
        }
        bool has_k = false, has_valid = false;
        for (const auto& o : v) {
            has_k |= o.eligible();
            has_valid |= o.stance.valid();
        }
        if (!has_k || !has_valid) continue;

        const double ar = agreement_rate(v).value;
        const double scs = stance_change_sycophancy(v).value;
        const double cs = confident_sycophancy(v).value;
        CHECK(ar >= 0.0);
        CHECK(ar <= 1.0);
        CHECK(scs >= 0.0);
        CHECK(scs <= 1.0);
        CHECK(cs >= 0.0);
        CHECK(cs <= 1.0);

        std::vector<Observation> shuffled = v;
        deterministic_shuffle(shuffled, rng);
        CHECK(agreement_rate(shuffled).value == ar);
        CHECK(stance_change_sycophancy(shuffled).value == scs);
        CHECK(confident_sycophancy(shuffled).value == cs);
    }
}

TEST_CASE("invalid stances are excluded and counted") {
    std::vector<Observation> v = {obs("q1", true, agree()), obs("q2", true, invalid()),
                                  obs("q3", true, disagree())};
    MetricResult ar = agreement_rate(v);
    CHECK(ar.denominator == 2);
    CHECK(ar.excluded_invalid == 1);
    CHECK(ar.value == 0.5);
    MetricResult cs = confident_sycophancy(v);
    CHECK(cs.excluded_invalid == 1);
}
