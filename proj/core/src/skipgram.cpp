#include "skillmap/skipgram.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "skillmap/errors.hpp"

namespace skillmap {

namespace {

std::map<std::string, std::size_t> count_tokens(const std::vector<std::vector<std::string>>& sequences) {
    std::map<std::string, std::size_t> counts;
    for (const auto& seq : sequences) {
        for (const auto& tok : seq) ++counts[tok];
    }
    return counts;
}

double sigmoid(double x) {
    if (x > 30.0) return 1.0;
    if (x < -30.0) return 0.0;
    return 1.0 / (1.0 + std::exp(-x));
}

}  // namespace

std::vector<std::pair<std::string, std::string>> enumerate_context_pairs(
    const std::vector<std::vector<std::string>>& sequences, int window_size, int min_count) {
    auto counts = count_tokens(sequences);
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& seq : sequences) {
        std::vector<const std::string*> kept;
        for (const auto& tok : seq) {
            if (static_cast<int>(counts[tok]) >= min_count) kept.push_back(&tok);
        }
        const int n = static_cast<int>(kept.size());
        for (int i = 0; i < n; ++i) {
            const int lo = std::max(0, i - window_size);
            const int hi = std::min(n - 1, i + window_size);
            for (int j = lo; j <= hi; ++j) {
                if (j == i) continue;
                pairs.emplace_back(*kept[i], *kept[j]);
            }
        }
    }
    return pairs;
}

EmbeddingSpace train_skipgram(const std::vector<std::vector<std::string>>& sequences,
                              const SkipgramHyper& hyper, const std::string& space_name,
                              EmbeddingSpace* context_out) {
    if (hyper.vector_dimension < 1 || hyper.window_size < 1) {
        throw ConfigError("skip-gram needs vector_dimension >= 1 and window_size >= 1");
    }

    auto counts = count_tokens(sequences);
    std::vector<std::string> vocab;
    std::vector<std::size_t> vocab_counts;
    std::map<std::string, int> index;
    for (const auto& [tok, n] : counts) {
        if (static_cast<int>(n) >= hyper.min_count) {
            index[tok] = static_cast<int>(vocab.size());
            vocab.push_back(tok);
            vocab_counts.push_back(n);
        }
    }

    // token-index view of the corpus after min_count filtering
    std::vector<std::vector<int>> encoded;
    std::size_t pair_count = 0;
    for (const auto& seq : sequences) {
        std::vector<int> enc;
        for (const auto& tok : seq) {
            auto it = index.find(tok);
            if (it != index.end()) enc.push_back(it->second);
        }
        const int n = static_cast<int>(enc.size());
        for (int i = 0; i < n; ++i) {
            const int lo = std::max(0, i - hyper.window_size);
            const int hi = std::min(n - 1, i + hyper.window_size);
            pair_count += static_cast<std::size_t>(hi - lo);  // window minus the center itself
        }
        if (n >= 2) encoded.push_back(std::move(enc));
    }
    if (pair_count == 0) {
        throw DataError("no trainable skip-gram pairs (effective vocabulary size " +
                        std::to_string(vocab.size()) + ")");
    }

    const int dim = hyper.vector_dimension;
    const int vsize = static_cast<int>(vocab.size());

    std::mt19937_64 rng(hyper.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Eigen::MatrixXd center(dim, vsize);
    for (int j = 0; j < vsize; ++j) {
        for (int i = 0; i < dim; ++i) {
            center(i, j) = (unit(rng) - 0.5) / dim;
        }
    }
    Eigen::MatrixXd context = Eigen::MatrixXd::Zero(dim, vsize);

    // cumulative unigram^(3/4) table for negative sampling
    std::vector<double> cum(vsize);
    double acc = 0.0;
    for (int j = 0; j < vsize; ++j) {
        acc += std::pow(static_cast<double>(vocab_counts[j]), 0.75);
        cum[j] = acc;
    }
    auto sample_negative = [&]() {
        const double r = unit(rng) * acc;
        return static_cast<int>(std::upper_bound(cum.begin(), cum.end(), r) - cum.begin());
    };

    const double total_pairs = static_cast<double>(pair_count) * hyper.epochs;
    const double lr0 = hyper.initial_learning_rate;
    const double lr_min = lr0 * 1e-4;
    std::size_t processed = 0;

    Eigen::VectorXd grad_center(dim);
    for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
        for (const auto& seq : encoded) {
            const int n = static_cast<int>(seq.size());
            for (int i = 0; i < n; ++i) {
                const int c = seq[i];
                const int lo = std::max(0, i - hyper.window_size);
                const int hi = std::min(n - 1, i + hyper.window_size);
                for (int j = lo; j <= hi; ++j) {
                    if (j == i) continue;
                    const double lr = std::max(lr_min, lr0 * (1.0 - processed / total_pairs));
                    ++processed;
                    const int target = seq[j];
                    grad_center.setZero();
                    for (int s = 0; s <= hyper.negative_samples; ++s) {
                        int t;
                        double label;
                        if (s == 0) {
                            t = target;
                            label = 1.0;
                        } else {
                            t = sample_negative();
                            if (t == target) continue;
                            label = 0.0;
                        }
                        const double f = sigmoid(center.col(c).dot(context.col(t)));
                        const double g = (label - f) * lr;
                        grad_center += g * context.col(t);
                        context.col(t) += g * center.col(c);
                    }
                    center.col(c) += grad_center;
                }
            }
        }
    }

    Provenance prov{"skipgram", false,
                    "dim=" + std::to_string(dim) + " window=" + std::to_string(hyper.window_size) +
                        " min_count=" + std::to_string(hyper.min_count) +
                        " neg=" + std::to_string(hyper.negative_samples) +
                        " epochs=" + std::to_string(hyper.epochs)};
    EmbeddingSpace space(space_name, dim, prov);
    for (int j = 0; j < vsize; ++j) space.insert(vocab[j], center.col(j));

    if (context_out) {
        EmbeddingSpace ctx(space_name + ".context", dim, prov);
        for (int j = 0; j < vsize; ++j) ctx.insert(vocab[j], context.col(j));
        *context_out = std::move(ctx);
    }
    return space;
}

}  // namespace skillmap
