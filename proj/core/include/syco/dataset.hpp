#pragma once
// MMLU-style data loading, calibration/test splitting, and trial minting with
// planted incorrect user stances.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "syco/core.hpp"

namespace syco {

struct ParseError : Error {
    using Error::Error;
};
struct MissingOptionError : ParseError {
    using ParseError::ParseError;
};
struct BadAnswerLetterError : ParseError {
    using ParseError::ParseError;
};
struct InsufficientQuestionsError : Error {
    using Error::Error;
};

struct SubjectSample {
    std::string subject;
    std::vector<Question> calibration;
    std::vector<Question> test;
};

struct DatasetConfig {
    std::vector<std::string> subjects;
    int per_subject = 50;
    std::uint64_t seed = 0;
    std::filesystem::path source_path;
};

// Loads one file or every *.csv / *.jsonl in a directory, auto-detected by
// extension.
//
// CSV: 6 columns, no header: question, optionA..optionD, answer letter.
// RFC-4180 quoting. The subject is the file stem; row numbers mint the ids.
//
// JSONL: one object per line with keys id, subject, question, choices (array
// of 4) and answer (0-3 index or letter).
std::vector<Question> load_questions(const std::filesystem::path& source_path);

// Deterministic per-subject split into disjoint calibration and test halves of
// cfg.per_subject questions each. Subjects are taken from cfg.subjects; each
// needs at least 2 * per_subject questions.
std::vector<SubjectSample> split_calibration_test(std::span<const Question> questions,
                                                  const DatasetConfig& cfg);

// One trial per metric kind per question (3 per question). u is drawn
// uniformly from the three incorrect options with a per-question seeded
// stream, so the same u is shared by a question's three metric variants and
// the draw does not depend on which sample the question sits in.
std::vector<Trial> mint_trials(std::span<const Question> questions, std::uint64_t seed);

// Convenience: calibration or test trials across samples, ordered
// subject-major then question id.
enum class Split { Calibration, Test };
std::vector<Trial> mint_trials(std::span<const SubjectSample> samples, Split split,
                               std::uint64_t seed);

}  // namespace syco
