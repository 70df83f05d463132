#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fsrec/corpus.hpp"
#include "fsrec/factorizer.hpp"

namespace fsrec {

/// Uniform scoring interface used by the evaluator.
class Scorer {
 public:
  virtual ~Scorer() = default;

  virtual std::string_view name() const = 0;
  virtual std::size_t num_items() const = 0;
  /// Writes one finite score per candidate item into `out`.
  virtual void score(UserId u, std::span<const ItemId> items, std::span<double> out) const = 0;
};

/// p(i, u) = sum_t n_ut * n_ti over the tags u used.
double pop_score(UserId u, ItemId i, const TagTensor& tensor);

/// p(i, u) = sum_{v in N(u)} a_vi * cos(profile_u, profile_v), N(u) the k
/// users with the most similar tag profiles.
double ucf_score(UserId u, ItemId i, const TagTensor& tensor, std::size_t neighbors);

class PopScorer final : public Scorer {
 public:
  explicit PopScorer(const TagTensor& train);

  std::string_view name() const override { return "pop"; }
  std::size_t num_items() const override { return item_tags_.size(); }
  void score(UserId u, std::span<const ItemId> items, std::span<double> out) const override;

 private:
  std::vector<TagVector> user_tags_;
  std::vector<TagVector> item_tags_;
};

class UcfScorer final : public Scorer {
 public:
  struct Neighbor {
    UserId user;
    double similarity;
  };

  /// Clamps `neighbors` to p - 1 (with a warning) when it is too large.
  UcfScorer(const TagTensor& train, std::size_t neighbors);

  std::string_view name() const override { return "ucf"; }
  std::size_t num_items() const override { return train_.num_items(); }
  void score(UserId u, std::span<const ItemId> items, std::span<double> out) const override;

  const std::vector<Neighbor>& neighbors(UserId u) const { return neighbors_.at(u); }
  std::size_t neighborhood_size() const noexcept { return k_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

 private:
  const TagTensor& train_;
  std::size_t k_;
  std::vector<std::vector<Neighbor>> neighbors_;
  std::vector<std::string> warnings_;
};

/// Scores with S_u^T V_i from trained factors.
class FactorScorer final : public Scorer {
 public:
  FactorScorer(std::string name, LatentFactors factors) : name_(std::move(name)), factors_(std::move(factors)) {}

  std::string_view name() const override { return name_; }
  std::size_t num_items() const override { return factors_.num_items(); }
  void score(UserId u, std::span<const ItemId> items, std::span<double> out) const override;

  const LatentFactors& factors() const noexcept { return factors_; }

 private:
  std::string name_;
  LatentFactors factors_;
};

/// Social regularization without the user-item term: train() with alpha = 0.
TrainResult soreg_train(const TrainingData& data, TrainingConfig cfg);

}  // namespace fsrec
