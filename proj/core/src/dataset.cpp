#include "syco/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "syco/rng.hpp"

namespace syco {

namespace {

// Minimal RFC-4180 reader: quoted fields, doubled quotes, embedded commas and
// newlines. Returns one record per call, or nullopt at EOF.
std::optional<std::vector<std::string>> read_csv_record(std::istream& in) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    bool any = false;
    int c;
    while ((c = in.get()) != EOF) {
        any = true;
        char ch = static_cast<char>(c);
        if (quoted) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    field += '"';
                    in.get();
                } else {
                    quoted = false;
                }
            } else {
                field += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (ch == '\n') {
            break;
        } else if (ch == '\r') {
            if (in.peek() == '\n') in.get();
            break;
        } else {
            field += ch;
        }
    }
    if (!any) return std::nullopt;
    fields.push_back(std::move(field));
    return fields;
}

OptionLetter parse_answer_letter(const std::string& raw, const std::string& where) {
    std::string t = raw;
    while (!t.empty() && (t.back() == ' ' || t.back() == '\t')) t.pop_back();
    std::size_t start = 0;
    while (start < t.size() && (t[start] == ' ' || t[start] == '\t')) ++start;
    t = t.substr(start);
    if (t.size() == 1) {
        if (auto o = option_from_char(t[0])) return *o;
    }
    // JSONL also allows a 0-3 index.
    if (t.size() == 1 && t[0] >= '0' && t[0] <= '3')
        return static_cast<OptionLetter>('A' + (t[0] - '0'));
    throw BadAnswerLetterError(where + ": bad answer letter '" + raw + "'");
}

std::string subject_from_stem(const std::filesystem::path& file) {
    std::string stem = file.stem().string();
    // MMLU distributions name files <subject>_test.csv / <subject>_dev.csv.
    for (const char* suffix : {"_test", "_dev", "_val"}) {
        if (stem.size() > std::strlen(suffix) && stem.ends_with(suffix)) {
            stem.resize(stem.size() - std::strlen(suffix));
            break;
        }
    }
    return stem;
}

std::vector<Question> load_csv(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ParseError("cannot open " + file.string());
    const std::string subject = subject_from_stem(file);
    std::vector<Question> out;
    int row = 0;
    while (auto rec = read_csv_record(in)) {
        ++row;
        if (rec->size() == 1 && (*rec)[0].empty()) continue;  // blank line
        const std::string where = file.filename().string() + " row " + std::to_string(row);
        if (rec->size() < 6)
            throw MissingOptionError(where + ": expected 6 columns, got " +
                                     std::to_string(rec->size()));
        if (rec->size() > 6) throw ParseError(where + ": too many columns");
        Question q;
        q.subject = subject;
        q.id = subject + "#" + std::to_string(row);
        q.text = (*rec)[0];
        for (int i = 0; i < 4; ++i) q.options[i] = (*rec)[1 + i];
        q.correct = parse_answer_letter((*rec)[5], where);
        out.push_back(std::move(q));
    }
    return out;
}

std::vector<Question> load_jsonl(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ParseError("cannot open " + file.string());
    std::vector<Question> out;
    std::string line;
    int row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const std::string where = file.filename().string() + " line " + std::to_string(row);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(where + ": " + e.what());
        }
        Question q;
        q.id = j.contains("id") ? j.at("id").get<std::string>()
                                : subject_from_stem(file) + "#" + std::to_string(row);
        q.subject = j.value("subject", subject_from_stem(file));
        if (!j.contains("question")) throw ParseError(where + ": missing 'question'");
        q.text = j.at("question").get<std::string>();
        if (!j.contains("choices") || !j.at("choices").is_array())
            throw MissingOptionError(where + ": missing 'choices' array");
        const auto& choices = j.at("choices");
        if (choices.size() != 4)
            throw MissingOptionError(where + ": expected 4 choices, got " +
                                     std::to_string(choices.size()));
        for (int i = 0; i < 4; ++i) q.options[i] = choices[i].get<std::string>();
        if (!j.contains("answer")) throw BadAnswerLetterError(where + ": missing 'answer'");
        const auto& ans = j.at("answer");
        if (ans.is_number_integer()) {
            int idx = ans.get<int>();
            if (idx < 0 || idx > 3)
                throw BadAnswerLetterError(where + ": answer index out of range");
            q.correct = static_cast<OptionLetter>('A' + idx);
        } else {
            q.correct = parse_answer_letter(ans.get<std::string>(), where);
        }
        out.push_back(std::move(q));
    }
    return out;
}

std::vector<Question> load_one(const std::filesystem::path& file) {
    const std::string ext = file.extension().string();
    if (ext == ".csv") return load_csv(file);
    if (ext == ".jsonl") return load_jsonl(file);
    throw ParseError("unsupported dataset extension: " + file.string());
}

}  // namespace

std::vector<Question> load_questions(const std::filesystem::path& source_path) {
    if (!std::filesystem::exists(source_path))
        throw ParseError("dataset path does not exist: " + source_path.string());
    if (!std::filesystem::is_directory(source_path)) return load_one(source_path);

    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(source_path)) {
        if (!entry.is_regular_file()) continue;
        const std::string ext = entry.path().extension().string();
        if (ext == ".csv" || ext == ".jsonl") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<Question> all;
    for (const auto& f : files) {
        auto qs = load_one(f);
        all.insert(all.end(), std::make_move_iterator(qs.begin()),
                   std::make_move_iterator(qs.end()));
    }
    return all;
}

std::vector<SubjectSample> split_calibration_test(std::span<const Question> questions,
                                                  const DatasetConfig& cfg) {
    if (cfg.subjects.empty()) throw Error("split: subject list is empty");
    if (cfg.per_subject < 1) throw Error("split: per_subject must be >= 1");

    std::map<std::string, std::vector<Question>> by_subject;
    for (const Question& q : questions) by_subject[q.subject].push_back(q);

    std::vector<SubjectSample> out;
    for (const std::string& subject : cfg.subjects) {
        auto it = by_subject.find(subject);
        const std::size_t have = it == by_subject.end() ? 0 : it->second.size();
        const std::size_t need = 2 * static_cast<std::size_t>(cfg.per_subject);
        if (have < need)
            throw InsufficientQuestionsError("subject " + subject + ": have " +
                                             std::to_string(have) + ", need " +
                                             std::to_string(need));
        std::vector<Question>& pool = it->second;
        // Canonical order before the seeded shuffle makes the split a pure
        // function of (questions, subject, seed).
        std::sort(pool.begin(), pool.end(),
                  [](const Question& a, const Question& b) { return a.id < b.id; });
        auto rng = make_engine(stream_seed(cfg.seed, "split", subject));
        deterministic_shuffle(pool, rng);

        SubjectSample sample;
        sample.subject = subject;
        sample.calibration.assign(pool.begin(), pool.begin() + cfg.per_subject);
        sample.test.assign(pool.begin() + cfg.per_subject, pool.begin() + 2 * cfg.per_subject);
        out.push_back(std::move(sample));
    }
    return out;
}

std::vector<Trial> mint_trials(std::span<const Question> questions, std::uint64_t seed) {
    std::vector<Question> ordered(questions.begin(), questions.end());
    std::sort(ordered.begin(), ordered.end(), [](const Question& a, const Question& b) {
        return std::tie(a.subject, a.id) < std::tie(b.subject, b.id);
    });

    std::vector<Trial> out;
    out.reserve(ordered.size() * kAllMetrics.size());
    for (const Question& q : ordered) {
        // Per-question stream: u is stable across the three metric variants
        // and across whichever list the question appears in.
        auto rng = make_engine(stream_seed(seed, "user_option", q.id));
        std::array<OptionLetter, 3> wrong{};
        int n = 0;
        for (OptionLetter o : kAllOptions)
            if (o != q.correct) wrong[n++] = o;
        OptionLetter u = wrong[draw_below(rng, 3)];

        for (MetricKind k : kAllMetrics) {
            Trial t;
            t.question = q;
            t.user_option = u;
            t.metric_kind = k;
            t.rng_seed = stream_seed(seed, "trial", q.id, to_string(k));
            t.validate();
            out.push_back(std::move(t));
        }
    }
    return out;
}

std::vector<Trial> mint_trials(std::span<const SubjectSample> samples, Split split,
                               std::uint64_t seed) {
    std::vector<Question> questions;
    for (const SubjectSample& s : samples) {
        const auto& src = split == Split::Calibration ? s.calibration : s.test;
        questions.insert(questions.end(), src.begin(), src.end());
    }
    return mint_trials(questions, seed);
}

}  // namespace syco
