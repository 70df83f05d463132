#include "fsrec/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "fsrec/errors.hpp"

namespace fsrec {

void accumulate(TagVector& into, const TagVector& other) {
  TagVector merged;
  merged.reserve(into.size() + other.size());
  auto a = into.begin();
  auto b = other.begin();
  while (a != into.end() || b != other.end()) {
    if (b == other.end() || (a != into.end() && a->tag < b->tag)) {
      merged.push_back(*a++);
    } else if (a == into.end() || b->tag < a->tag) {
      merged.push_back(*b++);
    } else {
      merged.push_back({a->tag, a->count + b->count});
      ++a;
      ++b;
    }
  }
  into = std::move(merged);
}

std::uint64_t total_count(const TagVector& v) {
  std::uint64_t n = 0;
  for (const auto& tc : v) n += tc.count;
  return n;
}

std::string_view to_string(ScalarMode mode) {
  return mode == ScalarMode::kBinary ? "binary" : "tag-count";
}

ScalarMode parse_scalar_mode(std::string_view text) {
  if (text == "binary") return ScalarMode::kBinary;
  if (text == "tag-count") return ScalarMode::kTagCount;
  throw ConfigError("scalar_mode", "expected 'binary' or 'tag-count', got '" + std::string(text) + "'");
}

double scalar_value(const Entry& entry, ScalarMode mode) {
  if (mode == ScalarMode::kBinary) return 1.0;
  return static_cast<double>(total_count(entry.tags));
}

// ---------------------------------------------------------------------------
// TagTensor

TagTensor::TagTensor(std::size_t num_users, std::size_t num_items, std::size_t num_tags,
                     std::vector<std::vector<Entry>> rows)
    : num_tags_(num_tags), rows_(std::move(rows)), item_users_(num_items) {
  if (rows_.size() != num_users) {
    throw InvariantError("tensor row count " + std::to_string(rows_.size()) +
                         " does not match num_users " + std::to_string(num_users));
  }
  for (std::size_t u = 0; u < rows_.size(); ++u) {
    auto& row = rows_[u];
    std::sort(row.begin(), row.end(), [](const Entry& a, const Entry& b) { return a.item < b.item; });
    for (std::size_t k = 0; k < row.size(); ++k) {
      const Entry& e = row[k];
      if (e.item >= num_items) {
        throw InvariantError("entry (" + std::to_string(u) + "," + std::to_string(e.item) +
                             ") has item id out of range");
      }
      if (k > 0 && row[k - 1].item == e.item) {
        throw InvariantError("duplicate entry (" + std::to_string(u) + "," + std::to_string(e.item) + ")");
      }
      if (e.tags.empty()) {
        throw InvariantError("entry (" + std::to_string(u) + "," + std::to_string(e.item) +
                             ") has an empty tag vector");
      }
      for (std::size_t t = 0; t < e.tags.size(); ++t) {
        if (e.tags[t].count == 0 || e.tags[t].tag >= num_tags ||
            (t > 0 && e.tags[t - 1].tag >= e.tags[t].tag)) {
          throw InvariantError("entry (" + std::to_string(u) + "," + std::to_string(e.item) +
                               ") has a malformed tag vector");
        }
      }
      item_users_[e.item].push_back(static_cast<UserId>(u));
    }
    num_entries_ += row.size();
  }
}

std::span<const Entry> TagTensor::row(UserId u) const {
  if (u >= rows_.size()) throw IndexError("user id " + std::to_string(u) + " out of range");
  return rows_[u];
}

std::span<const UserId> TagTensor::users_of(ItemId i) const {
  if (i >= item_users_.size()) throw IndexError("item id " + std::to_string(i) + " out of range");
  return item_users_[i];
}

const TagVector* TagTensor::find(UserId u, ItemId i) const {
  const auto r = row(u);
  auto it = std::lower_bound(r.begin(), r.end(), i, [](const Entry& e, ItemId id) { return e.item < id; });
  if (it == r.end() || it->item != i) return nullptr;
  return &it->tags;
}

// ---------------------------------------------------------------------------
// FriendshipGraph

FriendshipGraph::FriendshipGraph(std::size_t num_users, std::span<const std::pair<UserId, UserId>> edges)
    : adjacency_(num_users) {
  for (auto [a, b] : edges) {
    if (a >= num_users || b >= num_users) {
      throw IndexError("friendship edge (" + std::to_string(a) + "," + std::to_string(b) +
                       ") references a user id >= " + std::to_string(num_users));
    }
    if (a == b) continue;
    adjacency_[a].push_back(b);
    adjacency_[b].push_back(a);
  }
  for (auto& list : adjacency_) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    num_edges_ += list.size();
  }
  num_edges_ /= 2;
}

std::span<const UserId> FriendshipGraph::friends(UserId u) const {
  if (u >= adjacency_.size()) throw IndexError("user id " + std::to_string(u) + " out of range");
  return adjacency_[u];
}

bool FriendshipGraph::are_friends(UserId u, UserId f) const {
  const auto list = friends(u);
  return std::binary_search(list.begin(), list.end(), f);
}

bool FriendshipGraph::is_valid() const {
  for (UserId u = 0; u < adjacency_.size(); ++u) {
    const auto& list = adjacency_[u];
    if (!std::is_sorted(list.begin(), list.end())) return false;
    for (UserId f : list) {
      if (f >= adjacency_.size() || f == u) return false;
      if (!std::binary_search(adjacency_[f].begin(), adjacency_[f].end(), u)) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// IdMap

std::uint32_t IdMap::intern(std::string_view key) {
  auto [it, inserted] = ids_.try_emplace(std::string(key), static_cast<std::uint32_t>(keys_.size()));
  if (inserted) keys_.emplace_back(key);
  return it->second;
}

const std::uint32_t* IdMap::lookup(std::string_view key) const {
  auto it = ids_.find(std::string(key));
  return it == ids_.end() ? nullptr : &it->second;
}

IdMap IdMap::subset(std::span<const std::uint32_t> kept) const {
  IdMap out;
  for (auto old_id : kept) out.intern(keys_.at(old_id));
  return out;
}

// ---------------------------------------------------------------------------
// prune

PruneResult prune(const TagTensor& tensor, const FriendshipGraph& graph, std::size_t min_items,
                  bool require_friends) {
  const std::size_t p = tensor.num_users();
  if (graph.num_users() != p) {
    throw ShapeError("friendship graph has " + std::to_string(graph.num_users()) +
                     " users but the tensor has " + std::to_string(p));
  }

  std::vector<char> alive(p, 1);
  for (UserId u = 0; u < p; ++u) {
    if (tensor.row(u).size() < min_items) alive[u] = 0;
  }
  if (require_friends) {
    // Removing a user can leave a friend with no surviving friends.
    bool changed = true;
    while (changed) {
      changed = false;
      for (UserId u = 0; u < p; ++u) {
        if (!alive[u]) continue;
        const auto fr = graph.friends(u);
        const bool has_friend = std::any_of(fr.begin(), fr.end(), [&](UserId f) { return alive[f] != 0; });
        if (!has_friend) {
          alive[u] = 0;
          changed = true;
        }
      }
    }
  }

  PruneResult out;
  std::vector<UserId> user_new(p, UINT32_MAX);
  for (UserId u = 0; u < p; ++u) {
    if (alive[u]) {
      user_new[u] = static_cast<UserId>(out.kept_users.size());
      out.kept_users.push_back(u);
    }
  }
  if (out.kept_users.empty()) throw EmptyCorpusError("pruning removed every user");

  std::vector<char> item_used(tensor.num_items(), 0);
  for (UserId u : out.kept_users) {
    for (const auto& e : tensor.row(u)) item_used[e.item] = 1;
  }
  std::vector<ItemId> item_new(tensor.num_items(), UINT32_MAX);
  for (ItemId i = 0; i < tensor.num_items(); ++i) {
    if (item_used[i]) {
      item_new[i] = static_cast<ItemId>(out.kept_items.size());
      out.kept_items.push_back(i);
    }
  }
  if (out.kept_items.empty()) throw EmptyCorpusError("pruning removed every item");

  std::vector<std::vector<Entry>> rows(out.kept_users.size());
  for (std::size_t nu = 0; nu < out.kept_users.size(); ++nu) {
    for (const auto& e : tensor.row(out.kept_users[nu])) rows[nu].push_back({item_new[e.item], e.tags});
  }
  out.tensor = TagTensor(out.kept_users.size(), out.kept_items.size(), tensor.num_tags(), std::move(rows));

  std::vector<std::pair<UserId, UserId>> edges;
  for (UserId u : out.kept_users) {
    for (UserId f : graph.friends(u)) {
      if (u < f && alive[f]) edges.emplace_back(user_new[u], user_new[f]);
    }
  }
  out.graph = FriendshipGraph(out.kept_users.size(), edges);
  return out;
}

// ---------------------------------------------------------------------------
// split

std::size_t DataSplit::num_test_entries() const {
  std::size_t n = 0;
  for (const auto& t : test) n += t.size();
  return n;
}

DataSplit split(const TagTensor& tensor, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test_fraction", "must lie in (0, 1), got " + std::to_string(test_fraction));
  }
  std::mt19937_64 rng(seed);
  std::vector<std::vector<Entry>> train(tensor.num_users());
  DataSplit out;
  out.seed = seed;
  out.test.resize(tensor.num_users());

  for (UserId u = 0; u < tensor.num_users(); ++u) {
    const auto row = tensor.row(u);
    const std::size_t n = row.size();
    std::size_t held = 0;
    if (n >= 2) {
      held = static_cast<std::size_t>(std::ceil(test_fraction * static_cast<double>(n)));
      held = std::min(held, n - 1);
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<char> is_test(n, 0);
    for (std::size_t k = 0; k < held; ++k) is_test[order[k]] = 1;
    for (std::size_t k = 0; k < n; ++k) {
      (is_test[k] ? out.test[u] : train[u]).push_back(row[k]);
    }
  }
  out.train = TagTensor(tensor.num_users(), tensor.num_items(), tensor.num_tags(), std::move(train));
  return out;
}

DataSplit split_from_pairs(const TagTensor& tensor, std::span<const std::pair<UserId, ItemId>> test_pairs,
                           std::uint64_t seed) {
  std::vector<std::vector<char>> held(tensor.num_users());
  for (UserId u = 0; u < tensor.num_users(); ++u) held[u].assign(tensor.row(u).size(), 0);
  for (auto [u, i] : test_pairs) {
    const auto row = tensor.row(u);
    auto it = std::lower_bound(row.begin(), row.end(), i, [](const Entry& e, ItemId id) { return e.item < id; });
    if (it == row.end() || it->item != i) {
      throw IndexError("held-out pair (" + std::to_string(u) + "," + std::to_string(i) +
                       ") is not an observed entry");
    }
    held[u][static_cast<std::size_t>(it - row.begin())] = 1;
  }
  DataSplit out;
  out.seed = seed;
  out.test.resize(tensor.num_users());
  std::vector<std::vector<Entry>> train(tensor.num_users());
  for (UserId u = 0; u < tensor.num_users(); ++u) {
    const auto row = tensor.row(u);
    for (std::size_t k = 0; k < row.size(); ++k) (held[u][k] ? out.test[u] : train[u]).push_back(row[k]);
    if (train[u].empty() && !out.test[u].empty()) {
      throw InvariantError("user " + std::to_string(u) + " has test items but no training items");
    }
  }
  out.train = TagTensor(tensor.num_users(), tensor.num_items(), tensor.num_tags(), std::move(train));
  return out;
}

TagVector user_tag_profile(const TagTensor& tensor, UserId u) {
  TagVector profile;
  for (const auto& e : tensor.row(u)) accumulate(profile, e.tags);
  return profile;
}

}  // namespace fsrec
