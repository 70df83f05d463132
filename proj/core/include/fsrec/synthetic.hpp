#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "fsrec/corpus.hpp"

namespace fsrec {

/// Generator for clustered user-item-tag corpora with a friendship graph.
///
/// Each cluster owns a pool of items and a pool of tags; items are grouped
/// into topics and every user prefers one topic per cluster. Core users draw
/// most of their items from their home cluster (a fraction `overlap` comes
/// from the other clusters); "between" users split their draws evenly over
/// two clusters. Friends are drawn from the home cluster with probability
/// `homophily`, otherwise from another cluster; a home-cluster friend shares
/// the user's topic with probability `topic_focus`.
struct SyntheticParams {
  std::size_t clusters = 2;
  std::size_t users_per_cluster = 100;
  std::size_t items_per_cluster = 150;
  std::size_t topics_per_cluster = 5;
  std::size_t tags_per_cluster = 30;
  std::size_t tags_per_item = 3;
  std::size_t min_items_per_user = 10;
  std::size_t max_items_per_user = 20;
  double overlap = 0.2;
  double between_fraction = 0.0;
  double topic_focus = 0.7;
  std::size_t friends_per_user = 8;
  double homophily = 0.7;
  std::uint64_t seed = 1;

  /// Throws ConfigError on an inconsistent parameter set.
  void validate() const;
};

struct SyntheticCorpus {
  Corpus corpus;
  FriendshipGraph graph;
  std::vector<std::size_t> home_cluster;  // per user
  std::vector<char> between;              // per user: 1 if placed between clusters
};

SyntheticCorpus generate_synthetic(const SyntheticParams& params);

}  // namespace fsrec
