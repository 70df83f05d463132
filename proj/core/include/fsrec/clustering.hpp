#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "fsrec/corpus.hpp"

namespace fsrec {

enum class ClusterAlgorithm { kKMeans, kCMeans };

/// Result of hard or fuzzy clustering of the user profiles.
///
/// Memberships are row-stochastic (each row sums to 1). For K-means every row
/// is one-hot. `hard_assign[u]` is the argmax of row u, ties resolved towards
/// the lower cluster id. `objective_trace` holds one value per completed
/// iteration: within-cluster sum of squares for K-means, the fuzzy objective
/// sum_u sum_c mu_uc^m d_uc^2 for C-means.
struct ClusterModel {
  ClusterAlgorithm algorithm = ClusterAlgorithm::kKMeans;
  std::size_t num_clusters = 0;
  double fuzzifier = 2.0;
  Eigen::MatrixXd centroids;    // C x dim
  Eigen::MatrixXd memberships;  // p x C
  std::vector<std::size_t> hard_assign;
  std::vector<double> objective_trace;

  std::size_t num_users() const { return static_cast<std::size_t>(memberships.rows()); }
  bool is_one_hot() const;
};

struct ClusterParams {
  std::size_t num_clusters = 10;
  double fuzzifier = 2.0;
  std::size_t max_iter = 100;
  double tol = 1e-9;
  std::uint64_t seed = 0;
};

/// Tag profiles of every user as rows of a dense p x |tags| matrix, each row
/// L2-normalized (all-zero rows stay zero).
Eigen::MatrixXd normalized_profiles(const TagTensor& tensor);

/// Lloyd's algorithm with k-means++ seeding. Empty clusters are reseeded with
/// the point farthest from its assigned centroid.
ClusterModel kmeans(const Eigen::MatrixXd& profiles, const ClusterParams& params);

/// Fuzzy C-means with k-means++ seeding of the initial centroids.
ClusterModel cmeans(const Eigen::MatrixXd& profiles, const ClusterParams& params);

/// Membership of a single point given centroids, by the C-means update rule.
/// A point at zero distance from a centroid gets a one-hot row on the lowest
/// such cluster.
Eigen::VectorXd fuzzy_membership(const Eigen::VectorXd& point, const Eigen::MatrixXd& centroids, double fuzzifier);

/// Relabels clusters: new cluster `perm[c]` receives old cluster c.
ClusterModel permute_clusters(const ClusterModel& model, const std::vector<std::size_t>& perm);

/// `user_id\tmu_0...mu_{C-1}` per line.
void write_memberships(std::ostream& out, const ClusterModel& model);

/// Lossless text checkpoint of the full model.
void write_cluster_model(std::ostream& out, const ClusterModel& model);
ClusterModel read_cluster_model(std::istream& in);

}  // namespace fsrec
