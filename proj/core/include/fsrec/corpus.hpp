#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace fsrec {

using UserId = std::uint32_t;
using ItemId = std::uint32_t;
using TagId = std::uint32_t;

struct TagCount {
  TagId tag;
  std::uint32_t count;

  friend bool operator==(const TagCount&, const TagCount&) = default;
};

/// Sparse tag-count vector, sorted by tag id, every count >= 1.
using TagVector = std::vector<TagCount>;

/// Adds `other` into `into`, keeping the result sorted.
void accumulate(TagVector& into, const TagVector& other);

/// Total number of tag occurrences in the vector.
std::uint64_t total_count(const TagVector& v);

/// One observed (user, item) cell: a_ui = 1 and T_ui is the tag vector.
struct Entry {
  ItemId item;
  TagVector tags;

  friend bool operator==(const Entry&, const Entry&) = default;
};

/// How the scalar target T_ui of the factorization term is read off a cell.
enum class ScalarMode { kBinary, kTagCount };

std::string_view to_string(ScalarMode mode);
ScalarMode parse_scalar_mode(std::string_view text);

double scalar_value(const Entry& entry, ScalarMode mode);

/// Sparse user x item -> tag-multiset store. Rows are kept sorted by item id;
/// an item -> users index is derived on construction.
class TagTensor {
 public:
  TagTensor() = default;

  /// Validates ids and tag vectors; throws InvariantError on violation.
  /// Rows are sorted by item id if they are not already.
  TagTensor(std::size_t num_users, std::size_t num_items, std::size_t num_tags,
            std::vector<std::vector<Entry>> rows);

  std::size_t num_users() const noexcept { return rows_.size(); }
  std::size_t num_items() const noexcept { return item_users_.size(); }
  std::size_t num_tags() const noexcept { return num_tags_; }
  std::size_t num_entries() const noexcept { return num_entries_; }

  /// O(u), as entries sorted by item id.
  std::span<const Entry> row(UserId u) const;
  /// Users that tagged item i, ascending.
  std::span<const UserId> users_of(ItemId i) const;

  /// Tag vector T_ui, or nullptr when a_ui = 0.
  const TagVector* find(UserId u, ItemId i) const;
  bool contains(UserId u, ItemId i) const { return find(u, i) != nullptr; }

  friend bool operator==(const TagTensor& a, const TagTensor& b) {
    return a.num_tags_ == b.num_tags_ && a.item_users_.size() == b.item_users_.size() &&
           a.rows_ == b.rows_;
  }

 private:
  std::size_t num_tags_ = 0;
  std::size_t num_entries_ = 0;
  std::vector<std::vector<Entry>> rows_;
  std::vector<std::vector<UserId>> item_users_;
};

/// Undirected, irreflexive user adjacency with sorted friend lists.
class FriendshipGraph {
 public:
  FriendshipGraph() = default;
  explicit FriendshipGraph(std::size_t num_users) : adjacency_(num_users) {}

  /// Builds the symmetric closure of `edges`; self-edges and duplicates are dropped.
  FriendshipGraph(std::size_t num_users, std::span<const std::pair<UserId, UserId>> edges);

  std::size_t num_users() const noexcept { return adjacency_.size(); }
  std::size_t num_edges() const noexcept { return num_edges_; }

  /// F(u), ascending.
  std::span<const UserId> friends(UserId u) const;
  bool are_friends(UserId u, UserId f) const;

  /// Full-scan check of symmetry, irreflexivity and id range.
  bool is_valid() const;

  friend bool operator==(const FriendshipGraph&, const FriendshipGraph&) = default;

 private:
  std::vector<std::vector<UserId>> adjacency_;
  std::size_t num_edges_ = 0;
};

/// Bidirectional map between original string keys and dense ids, in
/// first-seen order.
class IdMap {
 public:
  std::uint32_t intern(std::string_view key);
  const std::uint32_t* lookup(std::string_view key) const;
  const std::string& key(std::uint32_t id) const { return keys_.at(id); }
  std::size_t size() const noexcept { return keys_.size(); }
  const std::vector<std::string>& keys() const noexcept { return keys_; }

  /// Map restricted to `kept` (new id -> old id), re-densified.
  IdMap subset(std::span<const std::uint32_t> kept) const;

 private:
  std::vector<std::string> keys_;
  std::unordered_map<std::string, std::uint32_t> ids_;
};

struct Corpus {
  TagTensor tensor;
  IdMap users;
  IdMap items;
  IdMap tags;
};

/// Parses `<user> <item> <tag>` records (tab-, comma- or whitespace-separated,
/// `#` comments). Duplicate records aggregate into tag counts. Keys already
/// present in `seed` keep their ids, so a corpus written with its id maps
/// reloads with identical ids.
Corpus load_interactions(std::istream& in, Corpus seed = {});
Corpus load_interactions(const std::string& path, Corpus seed = {});

/// Parses friendship pairs or group lines (`group:<id> <user>...` or
/// `<id>: <user>...`) against the user id map of the interactions.
FriendshipGraph load_friendships(std::istream& in, const IdMap& users);
FriendshipGraph load_friendships(const std::string& path, const IdMap& users);

struct PruneResult {
  TagTensor tensor;
  FriendshipGraph graph;
  std::vector<UserId> kept_users;  // new id -> old id
  std::vector<ItemId> kept_items;  // new id -> old id
};

/// Removes users with |O(u)| < min_items and, when `require_friends` is set,
/// users without friends, iterating to a fixed point; drops empty items and
/// re-densifies ids preserving relative order.
PruneResult prune(const TagTensor& tensor, const FriendshipGraph& graph, std::size_t min_items,
                  bool require_friends);

struct DataSplit {
  TagTensor train;
  std::vector<std::vector<Entry>> test;  // per user, sorted by item id
  std::uint64_t seed = 0;

  std::size_t num_test_entries() const;
};

/// Per-user random holdout of ceil(fraction * |O(u)|) items, capped so at
/// least one item stays in train.
DataSplit split(const TagTensor& tensor, double test_fraction, std::uint64_t seed);

/// Rebuilds a split from explicit held-out (user, item) pairs.
DataSplit split_from_pairs(const TagTensor& tensor,
                           std::span<const std::pair<UserId, ItemId>> test_pairs,
                           std::uint64_t seed);

/// Sum of u's tag vectors over all items u tagged.
TagVector user_tag_profile(const TagTensor& tensor, UserId u);

// Writers for the text formats read above. Interactions are written one
// record per tag occurrence, rows in user-id order.
void write_interactions(std::ostream& out, const Corpus& corpus);
void write_friendships(std::ostream& out, const FriendshipGraph& graph, const IdMap& users);
/// `<dense-id>\t<original-key>` per line.
void write_id_map(std::ostream& out, const IdMap& map);
IdMap read_id_map(std::istream& in);

}  // namespace fsrec
