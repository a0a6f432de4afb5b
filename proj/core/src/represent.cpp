#include "skillmap/represent.hpp"

#include <cmath>
#include <set>

#include "skillmap/errors.hpp"

namespace skillmap {

JointVocabulary JointVocabulary::build(const PlatformCorpus& a, const PlatformCorpus& b) {
    std::set<std::string> uniq;
    for (const auto* corpus : {&a, &b}) {
        for (const auto& [id, problem] : corpus->problems) {
            uniq.insert(problem.tokens.begin(), problem.tokens.end());
        }
    }
    JointVocabulary v;
    v.tokens.assign(uniq.begin(), uniq.end());
    for (int i = 0; i < static_cast<int>(v.tokens.size()); ++i) v.index[v.tokens[i]] = i;
    return v;
}

namespace {

// mean of per-problem vectors over a skill's text-bearing problems;
// zero vector (and a warning) when it has none
EmbeddingSpace skill_space_from_problem_vectors(
    const PlatformCorpus& corpus, const std::map<std::string, Eigen::VectorXd>& problem_vectors,
    int dim, const std::string& name, const Provenance& prov, RepresentWarnings* warnings) {
    EmbeddingSpace space(name, dim, prov);
    for (const auto& skill : corpus.skills) {
        Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim);
        int n = 0;
        auto it = corpus.skill_to_problems.find(skill);
        if (it != corpus.skill_to_problems.end()) {
            for (const auto& pid : it->second) {
                auto pv = problem_vectors.find(pid);
                if (pv != problem_vectors.end()) {
                    sum += pv->second;
                    ++n;
                }
            }
        }
        const Eigen::VectorXd mean = n == 0 ? sum : Eigen::VectorXd(sum / n);
        if (warnings && mean.isZero(0.0)) {
            warnings->zero_vector_skills.push_back(corpus.platform_name + ":" + skill);
        }
        space.insert(skill, mean);
    }
    return space;
}

std::map<std::string, Eigen::VectorXd> bow_problem_vectors(const PlatformCorpus& corpus,
                                                           const JointVocabulary& vocab) {
    std::map<std::string, Eigen::VectorXd> out;
    for (const auto& [pid, problem] : corpus.problems) {
        if (problem.tokens.empty()) continue;
        Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<int>(vocab.tokens.size()));
        for (const auto& tok : problem.tokens) v[vocab.index.at(tok)] += 1.0;
        out[pid] = std::move(v);
    }
    return out;
}

}  // namespace

std::pair<EmbeddingSpace, EmbeddingSpace> bag_of_words_spaces(const PlatformCorpus& a,
                                                              const PlatformCorpus& b,
                                                              RepresentWarnings* warnings) {
    JointVocabulary vocab = JointVocabulary::build(a, b);
    if (vocab.tokens.empty()) throw DataError("no problem tokens in either corpus");
    const int dim = static_cast<int>(vocab.tokens.size());
    Provenance prov{"bow", true, "joint vocabulary size " + std::to_string(dim)};
    auto pa = bow_problem_vectors(a, vocab);
    auto pb = bow_problem_vectors(b, vocab);
    return {skill_space_from_problem_vectors(a, pa, dim, a.platform_name + ".bow", prov, warnings),
            skill_space_from_problem_vectors(b, pb, dim, b.platform_name + ".bow", prov, warnings)};
}

std::pair<EmbeddingSpace, EmbeddingSpace> tfidf_spaces(const PlatformCorpus& a,
                                                       const PlatformCorpus& b,
                                                       RepresentWarnings* warnings) {
    JointVocabulary vocab = JointVocabulary::build(a, b);
    if (vocab.tokens.empty()) throw DataError("no problem tokens in either corpus");
    const int dim = static_cast<int>(vocab.tokens.size());

    // document frequencies over the pooled problem set of both platforms
    std::size_t total_problems = 0;
    Eigen::VectorXd df = Eigen::VectorXd::Zero(dim);
    for (const auto* corpus : {&a, &b}) {
        for (const auto& [pid, problem] : corpus->problems) {
            ++total_problems;
            std::set<std::string> seen(problem.tokens.begin(), problem.tokens.end());
            for (const auto& tok : seen) df[vocab.index.at(tok)] += 1.0;
        }
    }
    Eigen::VectorXd idf(dim);
    for (int i = 0; i < dim; ++i) {
        idf[i] = std::log(static_cast<double>(total_problems) / df[i]);
    }

    auto tfidf_problem_vectors = [&](const PlatformCorpus& corpus) {
        std::map<std::string, Eigen::VectorXd> out;
        for (const auto& [pid, problem] : corpus.problems) {
            if (problem.tokens.empty()) continue;
            Eigen::VectorXd freq = Eigen::VectorXd::Zero(dim);
            for (const auto& tok : problem.tokens) freq[vocab.index.at(tok)] += 1.0;
            Eigen::VectorXd v(dim);
            for (int i = 0; i < dim; ++i) {
                v[i] = std::log(1.0 + freq[i]) * idf[i];
            }
            out[pid] = std::move(v);
        }
        return out;
    };

    Provenance prov{"tfidf", true, "joint vocabulary size " + std::to_string(dim)};
    auto pa = tfidf_problem_vectors(a);
    auto pb = tfidf_problem_vectors(b);
    return {skill_space_from_problem_vectors(a, pa, dim, a.platform_name + ".tfidf", prov, warnings),
            skill_space_from_problem_vectors(b, pb, dim, b.platform_name + ".tfidf", prov, warnings)};
}

std::pair<EmbeddingSpace, EmbeddingSpace> content2vec_spaces(const PlatformCorpus& a,
                                                             const PlatformCorpus& b,
                                                             const EmbeddingSpace& word_vectors,
                                                             RepresentWarnings* warnings) {
    if (word_vectors.empty()) throw DataError("word vector space is empty");
    const int dim = word_vectors.dimension();

    auto c2v_problem_vectors = [&](const PlatformCorpus& corpus) {
        std::map<std::string, Eigen::VectorXd> out;
        for (const auto& [pid, problem] : corpus.problems) {
            if (problem.tokens.empty()) continue;
            Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim);
            int in_vocab = 0;
            for (const auto& tok : problem.tokens) {
                if (word_vectors.contains(tok)) {
                    sum += word_vectors.at(tok);
                    ++in_vocab;
                }
            }
            if (in_vocab == 0) {
                if (warnings) ++warnings->oov_problems;
                out[pid] = sum;  // zero vector
            } else {
                out[pid] = sum / in_vocab;
            }
        }
        return out;
    };

    Provenance prov{"content2vec", true, "word vectors: " + word_vectors.name()};
    auto pa = c2v_problem_vectors(a);
    auto pb = c2v_problem_vectors(b);
    return {skill_space_from_problem_vectors(a, pa, dim, a.platform_name + ".content2vec", prov, warnings),
            skill_space_from_problem_vectors(b, pb, dim, b.platform_name + ".content2vec", prov, warnings)};
}

std::vector<std::vector<std::string>> problem_token_sequences(const PlatformCorpus& a,
                                                              const PlatformCorpus& b) {
    std::vector<std::vector<std::string>> out;
    for (const auto* corpus : {&a, &b}) {
        for (const auto& [pid, problem] : corpus->problems) {
            if (!problem.tokens.empty()) out.push_back(problem.tokens);
        }
    }
    return out;
}

EmbeddingSpace load_external_word_vectors(const std::string& path) {
    return read_embedding_file(path, "external_words");
}

EmbeddingSpace skill2vec_space(const PlatformCorpus& corpus, SkipgramHyper hyper,
                               std::uint64_t sequence_seed) {
    hyper.min_count = 0;  // every skill keeps a vector
    const auto sequences = corpus.sequences.empty()
                               ? build_skill_sequences(corpus, sequence_seed)
                               : corpus.sequences;
    EmbeddingSpace space = train_skipgram(sequences, hyper, corpus.platform_name + ".skill2vec");
    space.provenance().model_kind = "skill2vec";
    space.provenance().shared_space = false;
    return space;
}

std::pair<EmbeddingSpace, EmbeddingSpace> assemble_concat(const EmbeddingSpace& src_content,
                                                          const EmbeddingSpace& src_context_translated,
                                                          const EmbeddingSpace& dst_content,
                                                          const EmbeddingSpace& dst_context) {
    if (src_content.dimension() != dst_content.dimension()) {
        throw DataError("content spaces disagree on dimension");
    }
    if (src_context_translated.dimension() != dst_context.dimension()) {
        throw DataError("translated source context dimension does not match destination context");
    }
    const int content_dim = src_content.dimension();
    const int context_dim = dst_context.dimension();
    const int dim = content_dim + context_dim;

    auto concat_side = [&](const EmbeddingSpace& content, const EmbeddingSpace& context,
                           const std::string& name) {
        EmbeddingSpace out(name, dim, Provenance{"concat", true,
                                                 content.name() + " | " + context.name()});
        for (const auto& [skill, cv] : content.vectors()) {
            if (!context.contains(skill)) {
                throw DataError("skill '" + skill + "' missing from context space '" +
                                context.name() + "'");
            }
            Eigen::VectorXd v(dim);
            v.head(content_dim) = cv;
            v.tail(context_dim) = context.at(skill);
            out.insert(skill, v);
        }
        for (const auto& [skill, xv] : context.vectors()) {
            if (!content.contains(skill)) {
                throw DataError("skill '" + skill + "' missing from content space '" +
                                content.name() + "'");
            }
        }
        return out;
    };

    return {concat_side(src_content, src_context_translated, src_content.name() + "+context"),
            concat_side(dst_content, dst_context, dst_content.name() + "+context")};
}

}  // namespace skillmap
