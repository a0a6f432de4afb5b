#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "skillmap/corpus.hpp"
#include "skillmap/embedding.hpp"

namespace skillmap {

struct ClusterAssignment {
    std::map<std::string, int> cluster_of;  // skill -> cluster id in 0..k-1
    std::vector<Eigen::VectorXd> centroids;
    double inertia = 0.0;  // sum of squared distances to assigned centroids
};

/// Lloyd iterations with k-means++ seeding; deterministic given seed.
ClusterAssignment kmeans(const EmbeddingSpace& space, int k = 20, std::uint64_t seed = 1,
                         int max_iter = 100);

/// Per cluster: over member skills with at least one truth partner, the
/// fraction whose partners include a skill in the same cluster. Clusters
/// without truth-bearing members have no score. The truth set is read in
/// both directions, so members from either platform count.
std::map<int, std::optional<double>> cluster_match_score(const ClusterAssignment& assignment,
                                                         const EquivalenceSet& truth);

/// Delimiter-separated export (header row; 6 significant digits) of
/// platform, skill, cluster id and vector components; input spaces must
/// share one dimension (a common projected space).
void export_projection(const std::vector<std::pair<std::string, EmbeddingSpace>>& spaces,
                       const ClusterAssignment& assignment, const std::string& path,
                       char delimiter = ',');

}  // namespace skillmap
