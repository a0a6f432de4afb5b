#include "skillmap/analysis.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <random>

#include "skillmap/errors.hpp"

namespace skillmap {

ClusterAssignment kmeans(const EmbeddingSpace& space, int k, std::uint64_t seed, int max_iter) {
    const int n = static_cast<int>(space.size());
    if (k < 1) throw ConfigError("kmeans needs k >= 1");
    if (k > n) throw DataError("kmeans: k=" + std::to_string(k) + " exceeds " +
                               std::to_string(n) + " points");

    std::vector<std::string> ids;
    std::vector<Eigen::VectorXd> points;
    ids.reserve(n);
    points.reserve(n);
    for (const auto& [id, v] : space.vectors()) {
        ids.push_back(id);
        points.push_back(v);
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // k-means++ seeding
    std::vector<Eigen::VectorXd> centroids;
    centroids.push_back(points[static_cast<std::size_t>(unit(rng) * n) % n]);
    std::vector<double> d2(n);
    while (static_cast<int>(centroids.size()) < k) {
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::max();
            for (const auto& c : centroids) {
                best = std::min(best, (points[i] - c).squaredNorm());
            }
            d2[i] = best;
            total += best;
        }
        if (total == 0.0) {
            // all remaining points coincide with existing centroids
            centroids.push_back(points[static_cast<std::size_t>(unit(rng) * n) % n]);
            continue;
        }
        double r = unit(rng) * total;
        int pick = n - 1;
        for (int i = 0; i < n; ++i) {
            r -= d2[i];
            if (r <= 0.0) {
                pick = i;
                break;
            }
        }
        centroids.push_back(points[pick]);
    }

    std::vector<int> assign(n, -1);
    double inertia = 0.0;
    for (int iter = 0; iter < max_iter; ++iter) {
        bool changed = false;
        inertia = 0.0;
        for (int i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::max();
            int best_c = 0;
            for (int c = 0; c < k; ++c) {
                const double d = (points[i] - centroids[c]).squaredNorm();
                if (d < best) {
                    best = d;
                    best_c = c;
                }
            }
            if (assign[i] != best_c) {
                assign[i] = best_c;
                changed = true;
            }
            inertia += best;
        }
        if (!changed && iter > 0) break;

        std::vector<Eigen::VectorXd> sums(k, Eigen::VectorXd::Zero(space.dimension()));
        std::vector<int> counts(k, 0);
        for (int i = 0; i < n; ++i) {
            sums[assign[i]] += points[i];
            ++counts[assign[i]];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[c] > 0) centroids[c] = sums[c] / counts[c];
            // empty clusters keep their previous centroid
        }
    }

    ClusterAssignment out;
    out.centroids = std::move(centroids);
    out.inertia = inertia;
    for (int i = 0; i < n; ++i) out.cluster_of[ids[i]] = assign[i];
    return out;
}

std::map<int, std::optional<double>> cluster_match_score(const ClusterAssignment& assignment,
                                                         const EquivalenceSet& truth) {
    // partners in both directions so either platform's members count
    std::map<std::string, std::set<std::string>> partners;
    for (const auto& [s, d] : truth.pairs) {
        partners[s].insert(d);
        partners[d].insert(s);
    }

    std::map<int, int> bearing, matched;
    for (const auto& [skill, cluster] : assignment.cluster_of) {
        auto it = partners.find(skill);
        if (it == partners.end()) continue;
        ++bearing[cluster];
        for (const auto& partner : it->second) {
            auto pc = assignment.cluster_of.find(partner);
            if (pc != assignment.cluster_of.end() && pc->second == cluster) {
                ++matched[cluster];
                break;  // one co-resident partner suffices
            }
        }
    }

    std::map<int, std::optional<double>> out;
    for (int c = 0; c < static_cast<int>(assignment.centroids.size()); ++c) {
        auto it = bearing.find(c);
        if (it == bearing.end()) {
            out[c] = std::nullopt;
        } else {
            out[c] = static_cast<double>(matched[c]) / static_cast<double>(it->second);
        }
    }
    return out;
}

void export_projection(const std::vector<std::pair<std::string, EmbeddingSpace>>& spaces,
                       const ClusterAssignment& assignment, const std::string& path,
                       char delimiter) {
    if (spaces.empty()) throw DataError("no spaces to export");
    const int dim = spaces.front().second.dimension();
    for (const auto& [platform, space] : spaces) {
        if (space.dimension() != dim) {
            throw DataError("space '" + space.name() + "' has dimension " +
                            std::to_string(space.dimension()) + ", expected " + std::to_string(dim));
        }
    }

    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << "platform" << delimiter << "skill" << delimiter << "cluster";
    for (int i = 0; i < dim; ++i) out << delimiter << 'v' << i;
    out << '\n';
    out << std::setprecision(6);
    for (const auto& [platform, space] : spaces) {
        for (const auto& [skill, v] : space.vectors()) {
            auto it = assignment.cluster_of.find(skill);
            const int cluster = it == assignment.cluster_of.end() ? -1 : it->second;
            out << platform << delimiter << skill << delimiter << cluster;
            for (int i = 0; i < dim; ++i) out << delimiter << v[i];
            out << '\n';
        }
    }
}

}  // namespace skillmap
