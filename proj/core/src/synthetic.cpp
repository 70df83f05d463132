#include "fsrec/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <string>

#include "fsrec/errors.hpp"

namespace fsrec {
namespace {

std::string key(char prefix, std::size_t id) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%c%05zu", prefix, id);
  return buf;
}

}  // namespace

void SyntheticParams::validate() const {
  if (clusters < 1) throw ConfigError("clusters", "must be >= 1");
  if (users_per_cluster < 2) throw ConfigError("users_per_cluster", "must be >= 2");
  if (topics_per_cluster < 1 || topics_per_cluster > items_per_cluster) {
    throw ConfigError("topics_per_cluster", "must lie in [1, items_per_cluster]");
  }
  if (tags_per_item < 1 || tags_per_item > tags_per_cluster) {
    throw ConfigError("tags_per_item", "must lie in [1, tags_per_cluster]");
  }
  if (min_items_per_user < 1 || min_items_per_user > max_items_per_user) {
    throw ConfigError("min_items_per_user", "must lie in [1, max_items_per_user]");
  }
  if (max_items_per_user > items_per_cluster) throw ConfigError("max_items_per_user", "exceeds items_per_cluster");
  for (auto [name, v] : {std::pair{"overlap", overlap}, std::pair{"between_fraction", between_fraction},
                         std::pair{"topic_focus", topic_focus}, std::pair{"homophily", homophily}}) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(name, "must lie in [0, 1]");
  }
  if (clusters == 1 && between_fraction > 0.0) throw ConfigError("between_fraction", "needs at least 2 clusters");
}

SyntheticCorpus generate_synthetic(const SyntheticParams& params) {
  params.validate();
  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t k = params.clusters;
  const std::size_t p = k * params.users_per_cluster;
  const std::size_t items_per_topic = params.items_per_cluster / params.topics_per_cluster;

  // Item i of cluster c lives at global id c * items_per_cluster + i and
  // carries tags_per_item tags from its cluster's pool.
  std::vector<std::vector<std::size_t>> item_tags(k * params.items_per_cluster);
  std::vector<double> item_weight(item_tags.size());
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<std::size_t> pool(params.tags_per_cluster);
    for (std::size_t t = 0; t < pool.size(); ++t) pool[t] = c * params.tags_per_cluster + t;
    for (std::size_t i = 0; i < params.items_per_cluster; ++i) {
      const std::size_t id = c * params.items_per_cluster + i;
      std::shuffle(pool.begin(), pool.end(), rng);
      item_tags[id].assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(params.tags_per_item));
      // Long-tailed popularity.
      item_weight[id] = 1.0 / std::sqrt(1.0 + static_cast<double>(i % items_per_topic));
    }
  }

  SyntheticCorpus out;
  out.home_cluster.resize(p);
  out.between.assign(p, 0);
  std::vector<std::vector<double>> cluster_weight(p, std::vector<double>(k, 0.0));
  std::vector<std::vector<std::size_t>> topic(p, std::vector<std::size_t>(k, 0));
  std::uniform_int_distribution<std::size_t> pick_topic(0, params.topics_per_cluster - 1);
  for (std::size_t u = 0; u < p; ++u) {
    const std::size_t home = u / params.users_per_cluster;
    out.home_cluster[u] = home;
    for (std::size_t c = 0; c < k; ++c) topic[u][c] = pick_topic(rng);
    if (k > 1 && unit(rng) < params.between_fraction) {
      out.between[u] = 1;
      std::uniform_int_distribution<std::size_t> other(0, k - 2);
      std::size_t second = other(rng);
      if (second >= home) ++second;
      cluster_weight[u][home] = 0.5;
      cluster_weight[u][second] = 0.5;
    } else if (k > 1) {
      for (std::size_t c = 0; c < k; ++c) {
        cluster_weight[u][c] = c == home ? 1.0 - params.overlap : params.overlap / static_cast<double>(k - 1);
      }
    } else {
      cluster_weight[u][0] = 1.0;
    }
  }

  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> cells;
  std::uniform_int_distribution<std::size_t> count_dist(params.min_items_per_user, params.max_items_per_user);
  for (std::size_t u = 0; u < p; ++u) {
    const std::size_t n = count_dist(rng);
    std::set<std::size_t> chosen;
    std::discrete_distribution<std::size_t> which_cluster(cluster_weight[u].begin(), cluster_weight[u].end());
    for (std::size_t attempt = 0; chosen.size() < n && attempt < 50 * n; ++attempt) {
      const std::size_t c = which_cluster(rng);
      std::size_t lo = c * params.items_per_cluster;
      std::size_t hi = lo + params.items_per_cluster;
      if (unit(rng) < params.topic_focus) {
        lo += topic[u][c] * items_per_topic;
        hi = lo + items_per_topic;
      }
      std::discrete_distribution<std::size_t> which_item(item_weight.begin() + static_cast<std::ptrdiff_t>(lo),
                                                         item_weight.begin() + static_cast<std::ptrdiff_t>(hi));
      const std::size_t item = lo + which_item(rng);
      if (!chosen.insert(item).second) continue;
      // A non-empty random subset of the item's tags.
      const auto& tags = item_tags[item];
      std::vector<std::size_t> subset;
      for (std::size_t t : tags) {
        if (unit(rng) < 0.6) subset.push_back(t);
      }
      if (subset.empty()) subset.push_back(tags[std::uniform_int_distribution<std::size_t>(0, tags.size() - 1)(rng)]);
      cells[{u, item}] = std::move(subset);
    }
  }

  // Keys are interned in id order so dense ids equal generator ids for users;
  // items and tags are interned on first use.
  Corpus& corpus = out.corpus;
  for (std::size_t u = 0; u < p; ++u) corpus.users.intern(key('u', u));
  std::vector<std::vector<Entry>> rows(p);
  for (const auto& [cell, tags] : cells) {
    const auto item = corpus.items.intern(key('i', cell.second));
    Entry e{item, {}};
    for (std::size_t t : tags) e.tags.push_back({corpus.tags.intern(key('t', t)), 1});
    std::sort(e.tags.begin(), e.tags.end(), [](const TagCount& a, const TagCount& b) { return a.tag < b.tag; });
    rows[cell.first].push_back(std::move(e));
  }
  corpus.tensor = TagTensor(p, corpus.items.size(), corpus.tags.size(), std::move(rows));

  std::vector<std::pair<UserId, UserId>> edges;
  const std::size_t per_user = std::max<std::size_t>(1, params.friends_per_user / 2);
  for (std::size_t u = 0; u < p; ++u) {
    const std::size_t home = out.home_cluster[u];
    for (std::size_t e = 0; e < per_user; ++e) {
      std::size_t c = home;
      if (k > 1 && unit(rng) >= params.homophily) {
        c = std::uniform_int_distribution<std::size_t>(0, k - 2)(rng);
        if (c >= home) ++c;
      }
      const std::size_t base = c * params.users_per_cluster;
      std::size_t f = base + std::uniform_int_distribution<std::size_t>(0, params.users_per_cluster - 1)(rng);
      if (c == home && unit(rng) < params.topic_focus) {
        // Prefer a friend who shares u's topic in the home cluster.
        std::vector<std::size_t> same;
        for (std::size_t v = base; v < base + params.users_per_cluster; ++v) {
          if (v != u && topic[v][home] == topic[u][home]) same.push_back(v);
        }
        if (!same.empty()) f = same[std::uniform_int_distribution<std::size_t>(0, same.size() - 1)(rng)];
      }
      edges.emplace_back(static_cast<UserId>(u), static_cast<UserId>(f));
    }
  }
  out.graph = FriendshipGraph(p, edges);
  return out;
}

}  // namespace fsrec
