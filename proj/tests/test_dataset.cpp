#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "helpers.hpp"
#include "syco/dataset.hpp"
#include "syco/rng.hpp"

using namespace syco;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("syco_dataset_" + std::to_string(make_engine(std::random_device{}())()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

// n synthetic questions for one subject, correct letter rotating A..D.
std::string synth_csv(int n) {
    std::string text;
    for (int i = 0; i < n; ++i) {
        const char answer = static_cast<char>('A' + i % 4);
        text += "What is item " + std::to_string(i) + "?,w,x,y,z," + answer + "\n";
    }
    return text;
}

}  // namespace

TEST_CASE("load_questions parses the documented CSV schema") {
    TempDir dir;
    write_file(dir.path / "arith.csv", "2+2=?,3,4,5,6,B\n\"a,b\",p,\"q\"\"r\",s,t,D\n");
    auto questions = load_questions(dir.path / "arith.csv");
    REQUIRE(questions.size() == 2);
    CHECK(questions[0].subject == "arith");
    CHECK(questions[0].text == "2+2=?");
    CHECK(questions[0].options == std::array<std::string, 4>{"3", "4", "5", "6"});
    CHECK(questions[0].correct == OptionLetter::B);
    // RFC-4180: embedded comma and doubled quote
    CHECK(questions[1].text == "a,b");
    CHECK(questions[1].options[1] == "q\"r");
}

TEST_CASE("load_questions rejects schema violations") {
    TempDir dir;
    write_file(dir.path / "bad3.csv", "q,only,three,options,B\n");
    CHECK_THROWS_AS(load_questions(dir.path / "bad3.csv"), MissingOptionError);

    write_file(dir.path / "bade.csv", "q,a,b,c,d,E\n");
    CHECK_THROWS_AS(load_questions(dir.path / "bade.csv"), BadAnswerLetterError);

    CHECK_THROWS_AS(load_questions(dir.path / "absent.csv"), ParseError);
}

TEST_CASE("answer letters are accepted case-insensitively with padding") {
    TempDir dir;
    write_file(dir.path / "lc.csv", "q1,a,b,c,d,b\nq2,a,b,c,d, D \n");
    auto questions = load_questions(dir.path / "lc.csv");
    REQUIRE(questions.size() == 2);
    CHECK(questions[0].correct == OptionLetter::B);
    CHECK(questions[1].correct == OptionLetter::D);
}

TEST_CASE("load_questions parses JSONL with index or letter answers") {
    TempDir dir;
    write_file(dir.path / "mix.jsonl",
               R"({"id":"m1","subject":"mix","question":"Q1","choices":["a","b","c","d"],"answer":2})"
               "\n"
               R"({"id":"m2","subject":"mix","question":"Q2","choices":["a","b","c","d"],"answer":"D"})"
               "\n");
    auto questions = load_questions(dir.path / "mix.jsonl");
    REQUIRE(questions.size() == 2);
    CHECK(questions[0].correct == OptionLetter::C);
    CHECK(questions[1].correct == OptionLetter::D);
}

TEST_CASE("load_questions walks a directory and strips MMLU file suffixes") {
    TempDir dir;
    write_file(dir.path / "law_test.csv", synth_csv(3));
    write_file(dir.path / "bio_test.csv", synth_csv(2));
    auto questions = load_questions(dir.path);
    CHECK(questions.size() == 5);
    std::set<std::string> subjects;
    for (const auto& q : questions) subjects.insert(q.subject);
    CHECK(subjects == std::set<std::string>{"law", "bio"});
}

TEST_CASE("split_calibration_test is deterministic and disjoint") {
    TempDir dir;
    write_file(dir.path / "s1.csv", synth_csv(120));
    write_file(dir.path / "s2.csv", synth_csv(110));
    auto questions = load_questions(dir.path);

    DatasetConfig cfg;
    cfg.subjects = {"s1", "s2"};
    cfg.per_subject = 50;
    cfg.seed = 99;
    cfg.source_path = dir.path;

    auto samples = split_calibration_test(questions, cfg);
    REQUIRE(samples.size() == 2);
    std::size_t cal_total = 0, test_total = 0;
    for (const auto& s : samples) {
        CHECK(s.calibration.size() == 50);
        CHECK(s.test.size() == 50);
        cal_total += s.calibration.size();
        test_total += s.test.size();
        std::set<std::string> cal_ids, test_ids;
        for (const auto& q : s.calibration) cal_ids.insert(q.id);
        for (const auto& q : s.test) test_ids.insert(q.id);
        for (const auto& id : test_ids) CHECK(cal_ids.count(id) == 0);
    }
    CHECK(cal_total == 100);
    CHECK(test_total == 100);

    auto again = split_calibration_test(questions, cfg);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        for (std::size_t j = 0; j < 50; ++j) {
            CHECK(samples[i].calibration[j].id == again[i].calibration[j].id);
            CHECK(samples[i].test[j].id == again[i].test[j].id);
        }
    }
}

TEST_CASE("split rejects subjects with too few questions") {
    TempDir dir;
    write_file(dir.path / "small.csv", synth_csv(60));
    auto questions = load_questions(dir.path);
    DatasetConfig cfg;
    cfg.subjects = {"small"};
    cfg.per_subject = 50;  // needs 100
    CHECK_THROWS_AS(split_calibration_test(questions, cfg), InsufficientQuestionsError);
}

TEST_CASE("mint_trials yields 3 paired variants per question") {
    TempDir dir;
    write_file(dir.path / "s.csv", synth_csv(10));
    auto questions = load_questions(dir.path);
    auto trials = mint_trials(questions, 4242);
    CHECK(trials.size() == 30);

    std::map<std::string, std::set<char>> user_by_question;
    std::map<std::string, std::set<MetricKind>> kinds_by_question;
    for (const Trial& t : trials) {
        CHECK(t.user_option != t.question.correct);
        user_by_question[t.question.id].insert(to_char(t.user_option));
        kinds_by_question[t.question.id].insert(t.metric_kind);
    }
    for (const auto& [id, options] : user_by_question) CHECK(options.size() == 1);  // paired u
    for (const auto& [id, kinds] : kinds_by_question) CHECK(kinds.size() == 3);

    auto again = mint_trials(questions, 4242);
    for (std::size_t i = 0; i < trials.size(); ++i) {
        CHECK(trials[i].id() == again[i].id());
        CHECK(trials[i].user_option == again[i].user_option);
    }
}

TEST_CASE("user options are uniform over the three wrong answers") {
    // Chi-square over >= 3000 draws at alpha = 0.01 (df = 2, critical 9.21034).
    TempDir dir;
    write_file(dir.path / "u.csv", synth_csv(1));
    auto questions = load_questions(dir.path);
    REQUIRE(questions.size() == 1);

    std::map<char, std::size_t> counts;
    const int draws = 3000;
    for (int seed = 0; seed < draws; ++seed) {
        auto trials = mint_trials(questions, static_cast<std::uint64_t>(seed));
        counts[to_char(trials[0].user_option)]++;
    }
    const double expected = draws / 3.0;
    double chi2 = 0.0;
    std::size_t total = 0;
    for (const auto& [letter, count] : counts) {
        const double d = static_cast<double>(count) - expected;
        chi2 += d * d / expected;
        total += count;
    }
    CHECK(total == draws);
    CHECK(counts.size() == 3);
    CHECK(chi2 < 9.21034);
}

TEST_CASE("250 questions mint 750 trials") {
    TempDir dir;
    write_file(dir.path / "a.csv", synth_csv(50));
    write_file(dir.path / "b.csv", synth_csv(50));
    write_file(dir.path / "c.csv", synth_csv(50));
    write_file(dir.path / "d.csv", synth_csv(50));
    write_file(dir.path / "e.csv", synth_csv(50));
    auto questions = load_questions(dir.path);
    REQUIRE(questions.size() == 250);
    CHECK(mint_trials(questions, 1).size() == 750);
}
