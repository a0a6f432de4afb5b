#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "skillmap/corpus.hpp"
#include "skillmap/embedding.hpp"
#include "skillmap/skipgram.hpp"

namespace skillmap {

/// Sorted union of both platforms' problem tokens; dense positions,
/// independent of platform iteration order.
struct JointVocabulary {
    std::vector<std::string> tokens;
    std::map<std::string, int> index;

    static JointVocabulary build(const PlatformCorpus& a, const PlatformCorpus& b);
};

/// Skills that ended up with zero vectors (no text-bearing problems, or
/// all tokens out of vocabulary). Such skills are excluded from ranking.
struct RepresentWarnings {
    std::vector<std::string> zero_vector_skills;
    std::size_t oov_problems = 0;
};

std::pair<EmbeddingSpace, EmbeddingSpace> bag_of_words_spaces(const PlatformCorpus& a,
                                                              const PlatformCorpus& b,
                                                              RepresentWarnings* warnings = nullptr);

/// TF(w,p) = ln(1 + freq(w,p)); IDF(w,P) = ln(|P| / df(w)) with P the
/// pooled problem set of both platforms.
std::pair<EmbeddingSpace, EmbeddingSpace> tfidf_spaces(const PlatformCorpus& a,
                                                       const PlatformCorpus& b,
                                                       RepresentWarnings* warnings = nullptr);

/// Problem vector = mean of in-vocabulary word vectors; skill vector =
/// mean of its problems' vectors.
std::pair<EmbeddingSpace, EmbeddingSpace> content2vec_spaces(const PlatformCorpus& a,
                                                             const PlatformCorpus& b,
                                                             const EmbeddingSpace& word_vectors,
                                                             RepresentWarnings* warnings = nullptr);

/// One token sequence per problem, both platforms pooled; the training
/// corpus for own-trained Content2vec word vectors.
std::vector<std::vector<std::string>> problem_token_sequences(const PlatformCorpus& a,
                                                              const PlatformCorpus& b);

EmbeddingSpace load_external_word_vectors(const std::string& path);

/// Skill2vec: skip-gram over the corpus' skill sequences. min_count is
/// forced to 0 so every skill keeps a vector. The result is
/// platform-local: translation is required before cross-platform use.
EmbeddingSpace skill2vec_space(const PlatformCorpus& corpus, SkipgramHyper hyper,
                               std::uint64_t sequence_seed);

/// Concatenated combined representation: source = [content | translated
/// context], destination = [content | context]; both shared-space.
std::pair<EmbeddingSpace, EmbeddingSpace> assemble_concat(const EmbeddingSpace& src_content,
                                                          const EmbeddingSpace& src_context_translated,
                                                          const EmbeddingSpace& dst_content,
                                                          const EmbeddingSpace& dst_context);

}  // namespace skillmap
