#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <map>
#include <string>

namespace skillmap {

/// Where the vectors of a space came from and whether two spaces sharing
/// the same basis can be compared without a learned translation.
struct Provenance {
    std::string model_kind;     // "bow", "tfidf", "content2vec", "skill2vec", "tamf", "concat", "translated", "external"
    bool shared_space = false;  // content-based spaces over a joint vocabulary are directly comparable
    std::string detail;         // free-form hyperparameter / source description
};

/// Named mapping from identifiers (skills or tokens) to fixed-dimension
/// real vectors. Immutable once built; std::map keeps iteration order
/// deterministic everywhere the space is serialized or ranked.
class EmbeddingSpace {
public:
    EmbeddingSpace() = default;
    EmbeddingSpace(std::string name, int dimension, Provenance prov = {})
        : name_(std::move(name)), dimension_(dimension), provenance_(std::move(prov)) {}

    const std::string& name() const { return name_; }
    int dimension() const { return dimension_; }
    const Provenance& provenance() const { return provenance_; }
    Provenance& provenance() { return provenance_; }

    std::size_t size() const { return vectors_.size(); }
    bool empty() const { return vectors_.empty(); }
    bool contains(const std::string& id) const { return vectors_.count(id) > 0; }

    // Throws DataError when the vector dimension disagrees or a component is non-finite.
    void insert(const std::string& id, const Eigen::VectorXd& v);

    const Eigen::VectorXd& at(const std::string& id) const;

    const std::map<std::string, Eigen::VectorXd>& vectors() const { return vectors_; }

private:
    std::string name_;
    int dimension_ = 0;
    Provenance provenance_;
    std::map<std::string, Eigen::VectorXd> vectors_;
};

/// Text format: first line "<count> <dimension>", then one line per vector:
/// "<identifier> <v1> ... <vd>". Identifiers with internal spaces are
/// written with spaces replaced by '_'.
void write_embedding_file(const EmbeddingSpace& space, std::ostream& out);
void write_embedding_file(const EmbeddingSpace& space, const std::string& path);

EmbeddingSpace read_embedding_file(std::istream& in, const std::string& name = "loaded");
EmbeddingSpace read_embedding_file(const std::string& path, const std::string& name = "loaded");

double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace skillmap
