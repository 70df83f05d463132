#include "fsrec/baselines.hpp"

#include <algorithm>

#include "fsrec/affinity.hpp"
#include "fsrec/errors.hpp"

namespace fsrec {
namespace {

double sparse_dot(const TagVector& a, const TagVector& b) {
  double dot = 0.0;
  auto x = a.begin();
  auto y = b.begin();
  while (x != a.end() && y != b.end()) {
    if (x->tag < y->tag) {
      ++x;
    } else if (y->tag < x->tag) {
      ++y;
    } else {
      dot += static_cast<double>(x->count) * y->count;
      ++x;
      ++y;
    }
  }
  return dot;
}

TagVector item_tag_profile(const TagTensor& tensor, ItemId i) {
  TagVector profile;
  for (UserId u : tensor.users_of(i)) accumulate(profile, *tensor.find(u, i));
  return profile;
}

std::vector<UcfScorer::Neighbor> top_neighbors(const std::vector<TagVector>& profiles, UserId u, std::size_t k) {
  std::vector<UcfScorer::Neighbor> all;
  all.reserve(profiles.size());
  for (UserId v = 0; v < profiles.size(); ++v) {
    if (v != u) all.push_back({v, cos_tags(profiles[u], profiles[v])});
  }
  const auto by_sim = [](const UcfScorer::Neighbor& a, const UcfScorer::Neighbor& b) {
    return a.similarity != b.similarity ? a.similarity > b.similarity : a.user < b.user;
  };
  const std::size_t keep = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(), by_sim);
  all.resize(keep);
  return all;
}

void check_sizes(std::span<const ItemId> items, std::span<double> out) {
  if (items.size() != out.size()) throw ShapeError("score output span does not match candidate count");
}

}  // namespace

double pop_score(UserId u, ItemId i, const TagTensor& tensor) {
  return sparse_dot(user_tag_profile(tensor, u), item_tag_profile(tensor, i));
}

double ucf_score(UserId u, ItemId i, const TagTensor& tensor, std::size_t neighbors) {
  std::vector<TagVector> profiles(tensor.num_users());
  for (UserId v = 0; v < tensor.num_users(); ++v) profiles[v] = user_tag_profile(tensor, v);
  double s = 0.0;
  for (const auto& n : top_neighbors(profiles, u, neighbors)) {
    if (tensor.contains(n.user, i)) s += n.similarity;
  }
  return s;
}

PopScorer::PopScorer(const TagTensor& train)
    : user_tags_(train.num_users()), item_tags_(train.num_items()) {
  for (UserId u = 0; u < train.num_users(); ++u) user_tags_[u] = user_tag_profile(train, u);
  for (ItemId i = 0; i < train.num_items(); ++i) item_tags_[i] = item_tag_profile(train, i);
}

void PopScorer::score(UserId u, std::span<const ItemId> items, std::span<double> out) const {
  check_sizes(items, out);
  const auto& profile = user_tags_.at(u);
  for (std::size_t k = 0; k < items.size(); ++k) out[k] = sparse_dot(profile, item_tags_.at(items[k]));
}

UcfScorer::UcfScorer(const TagTensor& train, std::size_t neighbors) : train_(train), k_(neighbors) {
  const std::size_t p = train.num_users();
  if (p > 0 && k_ >= p) {
    warnings_.push_back("u-CF neighborhood size " + std::to_string(k_) + " clamped to p - 1 = " +
                        std::to_string(p - 1));
    k_ = p - 1;
  }
  std::vector<TagVector> profiles(p);
  for (UserId v = 0; v < p; ++v) profiles[v] = user_tag_profile(train, v);
  neighbors_.resize(p);
  for (UserId u = 0; u < p; ++u) neighbors_[u] = top_neighbors(profiles, u, k_);
}

void UcfScorer::score(UserId u, std::span<const ItemId> items, std::span<double> out) const {
  check_sizes(items, out);
  const auto& hood = neighbors_.at(u);
  for (std::size_t k = 0; k < items.size(); ++k) {
    double s = 0.0;
    for (const auto& n : hood) {
      if (train_.contains(n.user, items[k])) s += n.similarity;
    }
    out[k] = s;
  }
}

void FactorScorer::score(UserId u, std::span<const ItemId> items, std::span<double> out) const {
  check_sizes(items, out);
  if (u >= factors_.S.cols()) throw IndexError("user " + std::to_string(u) + " out of range");
  const auto su = factors_.S.col(u);
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (items[k] >= factors_.V.cols()) throw IndexError("item " + std::to_string(items[k]) + " out of range");
    out[k] = su.dot(factors_.V.col(items[k]));
  }
}

TrainResult soreg_train(const TrainingData& data, TrainingConfig cfg) {
  cfg.alpha = 0.0;
  return train(data, cfg);
}

}  // namespace fsrec
