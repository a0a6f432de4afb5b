#include "skillmap/embedding.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "skillmap/errors.hpp"

namespace skillmap {

void EmbeddingSpace::insert(const std::string& id, const Eigen::VectorXd& v) {
    if (v.size() != dimension_) {
        throw DataError("vector for '" + id + "' has dimension " + std::to_string(v.size()) +
                        ", space '" + name_ + "' expects " + std::to_string(dimension_));
    }
    if (!v.allFinite()) {
        throw DataError("vector for '" + id + "' contains non-finite components");
    }
    vectors_[id] = v;
}

const Eigen::VectorXd& EmbeddingSpace::at(const std::string& id) const {
    auto it = vectors_.find(id);
    if (it == vectors_.end()) {
        throw DataError("identifier '" + id + "' not present in space '" + name_ + "'");
    }
    return it->second;
}

static std::string escape_id(const std::string& id) {
    std::string out = id;
    for (char& c : out) {
        if (c == ' ') c = '_';
    }
    return out;
}

void write_embedding_file(const EmbeddingSpace& space, std::ostream& out) {
    out << space.size() << ' ' << space.dimension() << '\n';
    out << std::setprecision(17);
    for (const auto& [id, vec] : space.vectors()) {
        out << escape_id(id);
        for (Eigen::Index i = 0; i < vec.size(); ++i) {
            out << ' ' << vec[i];
        }
        out << '\n';
    }
}

void write_embedding_file(const EmbeddingSpace& space, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    write_embedding_file(space, out);
}

EmbeddingSpace read_embedding_file(std::istream& in, const std::string& name) {
    std::string header;
    if (!std::getline(in, header)) {
        throw DataError("embedding file is empty: expected '<count> <dimension>' header");
    }
    std::istringstream hs(header);
    long long count = -1;
    int dim = -1;
    if (!(hs >> count >> dim) || count < 0 || dim <= 0) {
        throw DataError("malformed embedding header: '" + header + "'");
    }

    EmbeddingSpace space(name, dim, Provenance{"external", false, "loaded from file"});
    std::string line;
    long long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string id;
        ls >> id;
        Eigen::VectorXd v(dim);
        for (int i = 0; i < dim; ++i) {
            if (!(ls >> v[i])) {
                throw DataError("line " + std::to_string(line_no) +
                                ": expected " + std::to_string(dim) + " components");
            }
        }
        double extra;
        if (ls >> extra) {
            throw DataError("line " + std::to_string(line_no) + ": more components than header dimension");
        }
        if (space.contains(id)) {
            throw DataError("line " + std::to_string(line_no) + ": duplicate identifier '" + id + "'");
        }
        space.insert(id, v);
    }
    if (static_cast<long long>(space.size()) != count) {
        throw DataError("header declares " + std::to_string(count) + " vectors but file has " +
                        std::to_string(space.size()));
    }
    return space;
}

EmbeddingSpace read_embedding_file(const std::string& path, const std::string& name) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open embedding file '" + path + "'");
    return read_embedding_file(in, name);
}

double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 || nb == 0.0) {
        throw NumericError("cosine similarity undefined for zero vector");
    }
    return a.dot(b) / (na * nb);
}

}  // namespace skillmap
