#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace skillmap {

/// One row of a platform response log, reduced to the four columns the
/// pipeline consumes.
struct Interaction {
    std::string student_id;
    std::string problem_id;
    std::vector<std::string> skill_ids;  // non-empty after loading
    std::int64_t start_time = 0;         // epoch seconds
    std::size_t row_index = 0;           // original file order, tie-break for equal start_time
};

struct Problem {
    std::string problem_id;
    std::string raw_text;
    std::vector<std::string> tokens;  // lowercase, stop words removed
};

struct PlatformCorpus {
    std::string platform_name;
    std::set<std::string> skills;
    std::map<std::string, Problem> problems;
    std::map<std::string, std::set<std::string>> skill_to_problems;
    std::vector<Interaction> interactions;
    std::vector<std::vector<std::string>> sequences;  // one per student, built on demand
};

/// Ground-truth cross-platform skill pairs. One-to-many is legal; a skill
/// in a none set has no counterpart on the other side.
struct EquivalenceSet {
    std::set<std::pair<std::string, std::string>> pairs;
    std::set<std::string> none_skills_src;
    std::set<std::string> none_skills_dst;

    /// Destinations recorded for one source skill.
    std::set<std::string> destinations_of(const std::string& src) const;
    /// Source skills that occur in at least one pair.
    std::set<std::string> source_skills() const;
    EquivalenceSet reversed() const;
    void validate() const;  // throws DataError when a skill is both paired and none-marked
};

/// Maps logical columns onto the file's header names.
struct LogSchema {
    std::string student_col = "student_id";
    std::string problem_col = "problem_id";
    std::string skill_col = "skill_ids";
    std::string time_col = "start_time";
    char delimiter = ',';
    char skill_delimiter = '|';
    bool epoch_time = false;  // false: ISO-8601, true: integer epoch seconds
};

struct LoadStats {
    std::size_t rows_read = 0;
    std::size_t rows_without_skill = 0;
};

std::vector<Interaction> load_response_logs(const std::string& path, const LogSchema& schema,
                                            LoadStats* stats = nullptr);

/// JSON-lines records with fields "problem_id" and "text"; duplicate ids
/// keep the last record. warning_count, when given, receives the number of
/// overwritten duplicates.
std::map<std::string, std::string> load_problem_texts(const std::string& path,
                                                      std::size_t* warning_count = nullptr);

/// Two-column file src_skill<delim>dst_skill; the literal NONE in the dst
/// column marks an untranslatable source skill.
EquivalenceSet load_equivalence_pairs(const std::string& path, char delimiter = ',');
void write_equivalence_pairs(const EquivalenceSet& eq, const std::string& path, char delimiter = ',');

struct PreprocessOptions {
    std::size_t min_responses_per_skill = 1000;
    bool single_skill_only = false;
    std::vector<std::string> stop_words;  // empty: use the bundled English list
};

/// The bundled default English stop-word list.
const std::vector<std::string>& default_stop_words();

/// Lowercase, split on non-alphanumeric boundaries; digit runs and single
/// non-alphanumeric math symbols survive as tokens.
std::vector<std::string> tokenize(const std::string& text, const std::set<std::string>& stop_words);

/// Apply the single-skill filter, the per-skill response threshold, and
/// token cleaning; rebuilds skill_to_problems. Idempotent.
PlatformCorpus preprocess(const PlatformCorpus& corpus, const PreprocessOptions& options);

/// One skill sequence per student, interactions ordered by
/// (start_time, row_index); multiple skills on one interaction are emitted
/// in a seed-determined pseudo-random order. Sequence order follows
/// ascending student_id.
std::vector<std::vector<std::string>> build_skill_sequences(const PlatformCorpus& corpus,
                                                            std::uint64_t seed);

/// Assemble a PlatformCorpus from loaded parts; registers every referenced
/// skill and links problems to skills via interactions.
PlatformCorpus make_corpus(std::string platform_name, std::vector<Interaction> interactions,
                           const std::map<std::string, std::string>& problem_texts);

std::int64_t parse_timestamp(const std::string& value, bool epoch_time);

}  // namespace skillmap
