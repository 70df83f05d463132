#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fsrec/clustering.hpp"
#include "fsrec/corpus.hpp"

namespace fsrec {

/// Cosine of two tag-count vectors; 0 when either is all-zero.
double cos_tags(const TagVector& a, const TagVector& b);

/// Averaging domain for the per-item cosines of a user pair: the co-tagged
/// set O(u) & O(f) (divisor |O(u) & O(f)|) or the whole catalog (divisor q).
enum class SimNorm { kCoTag, kCatalog };

std::string_view to_string(SimNorm norm);
SimNorm parse_sim_norm(std::string_view text);

/// Mean of cos(T_ui, T_fi) over the averaging domain; 0 on an empty domain.
double mean_item_cosine(UserId u, UserId f, const TagTensor& tensor, SimNorm norm = SimNorm::kCoTag);

/// k * mean cosine, with k = lambda for users in the same hard cluster and
/// 1 - lambda otherwise.
double sim_hard(UserId u, UserId f, const TagTensor& tensor, const ClusterModel& clusters, double lambda,
                SimNorm norm = SimNorm::kCoTag);

/// 1 - (1/C) sum_c |mu_uc - mu_fc|.
double membership_factor(UserId u, UserId f, const ClusterModel& clusters);

/// membership_factor * mean cosine.
double sim_soft(UserId u, UserId f, const TagTensor& tensor, const ClusterModel& clusters,
                SimNorm norm = SimNorm::kCoTag);

/// Mean of cos(T_fi, T_fj) over j in O(f); 0 when f never tagged i.
double corr(UserId f, ItemId i, const TagTensor& tensor);

enum class SimilarityMode { kHard, kSoft };

std::string_view to_string(SimilarityMode mode);

/// sim(u, f) over the edges of the friendship graph. Values are stored in
/// the order of each user's friend list, once per direction.
class SimilarityTable {
 public:
  SimilarityTable() = default;
  SimilarityTable(SimilarityMode mode, double lambda, std::vector<std::vector<double>> per_user)
      : mode_(mode), lambda_(lambda), values_(std::move(per_user)) {}

  SimilarityMode mode() const noexcept { return mode_; }
  double lambda() const noexcept { return lambda_; }

  /// Values aligned with graph.friends(u).
  const std::vector<double>& row(UserId u) const { return values_.at(u); }
  std::size_t num_users() const noexcept { return values_.size(); }

  /// sim(u, f); throws IndexError when (u, f) is not an edge of `graph`.
  double value(UserId u, UserId f, const FriendshipGraph& graph) const;

  /// Non-empty when the table was built in a degenerate configuration.
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }
  void add_warning(std::string w) { warnings_.push_back(std::move(w)); }

 private:
  SimilarityMode mode_ = SimilarityMode::kHard;
  double lambda_ = 0.8;
  std::vector<std::vector<double>> values_;
  std::vector<std::string> warnings_;
};

/// corr(f, i) for every user f with at least one friend and every i in O(f).
/// All other pairs are 0 and not stored.
class CorrelationTable {
 public:
  struct Cell {
    ItemId item;
    double value;
  };

  CorrelationTable() = default;
  explicit CorrelationTable(std::vector<std::vector<Cell>> per_user);

  std::size_t num_users() const noexcept { return cells_.size(); }
  const std::vector<Cell>& row(UserId f) const { return cells_.at(f); }
  double value(UserId f, ItemId i) const;
  /// sum_i corr(f, i) over stored cells.
  double row_sum(UserId f) const { return row_sums_.at(f); }
  std::size_t num_cells() const;

 private:
  std::vector<std::vector<Cell>> cells_;
  std::vector<double> row_sums_;
};

SimilarityTable build_similarity_table(const FriendshipGraph& graph, const TagTensor& tensor,
                                       const ClusterModel& clusters, SimilarityMode mode, double lambda,
                                       SimNorm norm = SimNorm::kCoTag);

CorrelationTable build_correlation_table(const FriendshipGraph& graph, const TagTensor& tensor);

/// `u\tf\tvalue` for u < f.
void write_similarity_table(std::ostream& out, const SimilarityTable& table, const FriendshipGraph& graph);
/// `f\ti\tvalue`.
void write_correlation_table(std::ostream& out, const CorrelationTable& table);

}  // namespace fsrec
