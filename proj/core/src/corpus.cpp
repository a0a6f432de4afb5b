#include "skillmap/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "skillmap/errors.hpp"

namespace skillmap {

std::set<std::string> EquivalenceSet::destinations_of(const std::string& src) const {
    std::set<std::string> out;
    for (const auto& [s, d] : pairs) {
        if (s == src) out.insert(d);
    }
    return out;
}

std::set<std::string> EquivalenceSet::source_skills() const {
    std::set<std::string> out;
    for (const auto& [s, d] : pairs) out.insert(s);
    return out;
}

EquivalenceSet EquivalenceSet::reversed() const {
    EquivalenceSet out;
    for (const auto& [s, d] : pairs) out.pairs.insert({d, s});
    out.none_skills_src = none_skills_dst;
    out.none_skills_dst = none_skills_src;
    return out;
}

void EquivalenceSet::validate() const {
    for (const auto& [s, d] : pairs) {
        if (none_skills_src.count(s)) {
            throw DataError("skill '" + s + "' is both paired and none-marked on the source side");
        }
        if (none_skills_dst.count(d)) {
            throw DataError("skill '" + d + "' is both paired and none-marked on the destination side");
        }
    }
}

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == delim) {
            fields.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    fields.push_back(field);
    return fields;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

std::int64_t parse_timestamp(const std::string& value, bool epoch_time) {
    const std::string v = trim(value);
    if (epoch_time) {
        try {
            std::size_t pos = 0;
            // accept "1577836800" and "1577836800.0"
            double d = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return static_cast<std::int64_t>(d);
        } catch (const std::exception&) {
            throw DataError("cannot parse epoch timestamp '" + v + "'");
        }
    }
    int year, month, day, hour = 0, minute = 0, second = 0;
    int n = std::sscanf(v.c_str(), "%d-%d-%d%*1[T ]%d:%d:%d", &year, &month, &day, &hour, &minute, &second);
    if (n < 3) {
        throw DataError("cannot parse ISO-8601 timestamp '" + v + "'");
    }
    std::tm tm{};
    tm.tm_year = year - 1900;
    tm.tm_mon = month - 1;
    tm.tm_mday = day;
    tm.tm_hour = hour;
    tm.tm_min = minute;
    tm.tm_sec = second;
    return static_cast<std::int64_t>(timegm(&tm));
}

std::vector<Interaction> load_response_logs(const std::string& path, const LogSchema& schema,
                                            LoadStats* stats) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open response log '" + path + "'");

    std::string header_line;
    if (!std::getline(in, header_line)) throw DataError("response log '" + path + "' is empty");
    const auto header = split_line(header_line, schema.delimiter);

    auto column_index = [&](const std::string& name) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (trim(header[i]) == name) return i;
        }
        throw ConfigError("response log '" + path + "' has no column '" + name + "'");
    };
    const std::size_t ci_student = column_index(schema.student_col);
    const std::size_t ci_problem = column_index(schema.problem_col);
    const std::size_t ci_skill = column_index(schema.skill_col);
    const std::size_t ci_time = column_index(schema.time_col);

    std::vector<Interaction> out;
    LoadStats local;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        ++local.rows_read;
        const auto fields = split_line(line, schema.delimiter);
        const std::size_t needed = std::max({ci_student, ci_problem, ci_skill, ci_time});
        if (fields.size() <= needed) {
            throw DataError("line " + std::to_string(line_no) + ": expected at least " +
                            std::to_string(needed + 1) + " fields, got " + std::to_string(fields.size()));
        }

        Interaction it;
        it.student_id = trim(fields[ci_student]);
        it.problem_id = trim(fields[ci_problem]);
        for (const auto& part : split_line(fields[ci_skill], schema.skill_delimiter)) {
            const std::string skill = trim(part);
            if (!skill.empty()) it.skill_ids.push_back(skill);
        }
        if (it.skill_ids.empty()) {
            ++local.rows_without_skill;
            continue;
        }
        try {
            it.start_time = parse_timestamp(fields[ci_time], schema.epoch_time);
        } catch (const DataError& e) {
            throw DataError("line " + std::to_string(line_no) + ": " + e.what());
        }
        it.row_index = out.size();
        out.push_back(std::move(it));
    }
    if (stats) *stats = local;
    return out;
}

std::map<std::string, std::string> load_problem_texts(const std::string& path,
                                                      std::size_t* warning_count) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open problem texts '" + path + "'");

    std::map<std::string, std::string> out;
    std::size_t duplicates = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw DataError("problem texts line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!rec.contains("problem_id") || !rec.contains("text")) {
            throw DataError("problem texts line " + std::to_string(line_no) +
                            ": record needs 'problem_id' and 'text' fields");
        }
        std::string id = rec["problem_id"].is_string() ? rec["problem_id"].get<std::string>()
                                                       : rec["problem_id"].dump();
        if (out.count(id)) ++duplicates;  // last wins
        out[id] = rec["text"].get<std::string>();
    }
    if (warning_count) *warning_count = duplicates;
    return out;
}

EquivalenceSet load_equivalence_pairs(const std::string& path, char delimiter) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open equivalence pairs '" + path + "'");
    EquivalenceSet eq;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_line(line, delimiter);
        if (fields.size() != 2) {
            throw DataError("pairs line " + std::to_string(line_no) + ": expected 2 fields");
        }
        const std::string src = trim(fields[0]);
        const std::string dst = trim(fields[1]);
        if (line_no == 1 && src == "src_skill" && dst == "dst_skill") continue;  // optional header
        if (dst == "NONE") {
            eq.none_skills_src.insert(src);
        } else if (src == "NONE") {
            eq.none_skills_dst.insert(dst);
        } else {
            eq.pairs.insert({src, dst});
        }
    }
    eq.validate();
    return eq;
}

void write_equivalence_pairs(const EquivalenceSet& eq, const std::string& path, char delimiter) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << "src_skill" << delimiter << "dst_skill\n";
    for (const auto& [s, d] : eq.pairs) out << s << delimiter << d << '\n';
    for (const auto& s : eq.none_skills_src) out << s << delimiter << "NONE\n";
    for (const auto& d : eq.none_skills_dst) out << "NONE" << delimiter << d << '\n';
}

const std::vector<std::string>& default_stop_words() {
    static const std::vector<std::string> words = {
        "a",     "about", "above", "after", "again", "all",   "an",    "and",   "any",  "are",
        "as",    "at",    "be",    "been",  "being", "below", "both",  "but",   "by",   "can",
        "did",   "do",    "does",  "doing", "down",  "during","each",  "few",   "for",  "from",
        "had",   "has",   "have",  "having","he",    "her",   "here",  "hers",  "him",  "his",
        "how",   "i",     "if",    "in",    "into",  "is",    "it",    "its",   "just", "me",
        "more",  "most",  "my",    "no",    "nor",   "not",   "now",   "of",    "off",  "on",
        "once",  "only",  "or",    "other", "our",   "ours",  "out",   "over",  "own",  "s",
        "same",  "she",   "should","so",    "some",  "such",  "t",     "than",  "that", "the",
        "their", "theirs","them",  "then",  "there", "these", "they",  "this",  "those","through",
        "to",    "too",   "under", "until", "up",    "very",  "was",   "we",    "were", "what",
        "when",  "where", "which", "while", "who",   "whom",  "why",   "will",  "with", "you",
        "your",  "yours"};
    return words;
}

std::vector<std::string> tokenize(const std::string& text, const std::set<std::string>& stop_words) {
    static const std::string math_symbols = "+-*/=<>^%";
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&]() {
        if (!current.empty() && !stop_words.count(current)) tokens.push_back(current);
        current.clear();
    };
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            current += static_cast<char>(std::tolower(c));
        } else {
            flush();
            if (math_symbols.find(static_cast<char>(c)) != std::string::npos) {
                std::string sym(1, static_cast<char>(c));
                if (!stop_words.count(sym)) tokens.push_back(sym);
            }
        }
    }
    flush();
    return tokens;
}

PlatformCorpus preprocess(const PlatformCorpus& corpus, const PreprocessOptions& options) {
    const std::vector<std::string>& stop_src =
        options.stop_words.empty() ? default_stop_words() : options.stop_words;
    std::set<std::string> stops(stop_src.begin(), stop_src.end());

    // single-skill filter first, then the response threshold
    std::vector<Interaction> kept;
    for (const auto& it : corpus.interactions) {
        if (options.single_skill_only && it.skill_ids.size() > 1) continue;
        kept.push_back(it);
    }

    std::map<std::string, std::size_t> responses;
    for (const auto& it : kept) {
        for (const auto& s : it.skill_ids) ++responses[s];
    }
    std::set<std::string> surviving;
    for (const auto& [skill, n] : responses) {
        if (n >= options.min_responses_per_skill) surviving.insert(skill);
    }

    PlatformCorpus out;
    out.platform_name = corpus.platform_name;
    out.skills = surviving;
    for (auto& it : kept) {
        std::vector<std::string> skills;
        for (const auto& s : it.skill_ids) {
            if (surviving.count(s)) skills.push_back(s);
        }
        if (skills.empty()) continue;
        Interaction ni = it;
        ni.skill_ids = std::move(skills);
        ni.row_index = out.interactions.size();
        out.interactions.push_back(std::move(ni));
    }
    if (out.skills.empty()) {
        throw DataError("preprocessing removed every skill (threshold " +
                        std::to_string(options.min_responses_per_skill) + ")");
    }

    for (const auto& it : out.interactions) {
        auto pit = corpus.problems.find(it.problem_id);
        if (pit == corpus.problems.end()) continue;
        for (const auto& s : it.skill_ids) out.skill_to_problems[s].insert(it.problem_id);
        if (!out.problems.count(it.problem_id)) {
            Problem p;
            p.problem_id = it.problem_id;
            p.raw_text = pit->second.raw_text;
            p.tokens = tokenize(p.raw_text, stops);
            out.problems[p.problem_id] = std::move(p);
        }
    }
    return out;
}

std::vector<std::vector<std::string>> build_skill_sequences(const PlatformCorpus& corpus,
                                                            std::uint64_t seed) {
    std::map<std::string, std::vector<const Interaction*>> by_student;
    for (const auto& it : corpus.interactions) {
        by_student[it.student_id].push_back(&it);
    }

    std::mt19937_64 rng(seed);
    std::vector<std::vector<std::string>> sequences;
    sequences.reserve(by_student.size());
    for (auto& [student, items] : by_student) {
        std::stable_sort(items.begin(), items.end(), [](const Interaction* a, const Interaction* b) {
            if (a->start_time != b->start_time) return a->start_time < b->start_time;
            return a->row_index < b->row_index;
        });
        std::vector<std::string> seq;
        for (const Interaction* it : items) {
            std::vector<std::string> skills = it->skill_ids;
            if (skills.size() > 1) {
                std::shuffle(skills.begin(), skills.end(), rng);
            }
            seq.insert(seq.end(), skills.begin(), skills.end());
        }
        sequences.push_back(std::move(seq));
    }
    return sequences;
}

PlatformCorpus make_corpus(std::string platform_name, std::vector<Interaction> interactions,
                           const std::map<std::string, std::string>& problem_texts) {
    PlatformCorpus c;
    c.platform_name = std::move(platform_name);
    c.interactions = std::move(interactions);
    for (std::size_t i = 0; i < c.interactions.size(); ++i) c.interactions[i].row_index = i;
    for (const auto& [id, text] : problem_texts) {
        Problem p;
        p.problem_id = id;
        p.raw_text = text;
        c.problems[id] = std::move(p);
    }
    for (const auto& it : c.interactions) {
        for (const auto& s : it.skill_ids) {
            c.skills.insert(s);
            if (c.problems.count(it.problem_id)) {
                c.skill_to_problems[s].insert(it.problem_id);
            }
        }
    }
    return c;
}

}  // namespace skillmap
