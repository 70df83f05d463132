#include "fsrec/affinity.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <vector>

#include "fsrec/errors.hpp"
#include "fsrec/text.hpp"

namespace fsrec {
namespace {

void check_lambda(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw ConfigError("lambda", "hard-similarity mix must lie in (0, 1), got " + std::to_string(lambda));
  }
}

void check_row(const ClusterModel& clusters, UserId u) {
  if (u >= clusters.memberships.rows()) throw IndexError("user " + std::to_string(u) + " has no membership row");
  const double s = clusters.memberships.row(u).sum();
  if (std::abs(s - 1.0) > 1e-9) {
    throw InvariantError("membership row of user " + std::to_string(u) + " sums to " + std::to_string(s));
  }
}

}  // namespace

double cos_tags(const TagVector& a, const TagVector& b) {
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (const auto& t : a) na += static_cast<double>(t.count) * t.count;
  for (const auto& t : b) nb += static_cast<double>(t.count) * t.count;
  if (na == 0.0 || nb == 0.0) return 0.0;
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
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::string_view to_string(SimNorm norm) { return norm == SimNorm::kCoTag ? "cotag" : "catalog"; }

SimNorm parse_sim_norm(std::string_view text) {
  if (text == "cotag") return SimNorm::kCoTag;
  if (text == "catalog") return SimNorm::kCatalog;
  throw ConfigError("sim_norm", "expected 'cotag' or 'catalog', got '" + std::string(text) + "'");
}

std::string_view to_string(SimilarityMode mode) { return mode == SimilarityMode::kHard ? "hard" : "soft"; }

double mean_item_cosine(UserId u, UserId f, const TagTensor& tensor, SimNorm norm) {
  const auto ru = tensor.row(u);
  const auto rf = tensor.row(f);
  double sum = 0.0;
  std::size_t shared = 0;
  auto a = ru.begin();
  auto b = rf.begin();
  while (a != ru.end() && b != rf.end()) {
    if (a->item < b->item) {
      ++a;
    } else if (b->item < a->item) {
      ++b;
    } else {
      sum += cos_tags(a->tags, b->tags);
      ++shared;
      ++a;
      ++b;
    }
  }
  const std::size_t divisor = norm == SimNorm::kCoTag ? shared : tensor.num_items();
  return divisor == 0 ? 0.0 : sum / static_cast<double>(divisor);
}

double sim_hard(UserId u, UserId f, const TagTensor& tensor, const ClusterModel& clusters, double lambda,
                SimNorm norm) {
  check_lambda(lambda);
  if (u >= clusters.hard_assign.size() || f >= clusters.hard_assign.size()) {
    throw IndexError("user id out of range of the cluster model");
  }
  const double k = clusters.hard_assign[u] == clusters.hard_assign[f] ? lambda : 1.0 - lambda;
  return k * mean_item_cosine(u, f, tensor, norm);
}

double membership_factor(UserId u, UserId f, const ClusterModel& clusters) {
  check_row(clusters, u);
  check_row(clusters, f);
  // Summed in sorted order so relabeling clusters cannot change a single bit.
  std::vector<double> diff(clusters.num_clusters);
  for (std::size_t c = 0; c < diff.size(); ++c) {
    const auto col = static_cast<Eigen::Index>(c);
    diff[c] = std::abs(clusters.memberships(u, col) - clusters.memberships(f, col));
  }
  std::sort(diff.begin(), diff.end());
  double l1 = 0.0;
  for (double d : diff) l1 += d;
  return 1.0 - l1 / static_cast<double>(clusters.num_clusters);
}

double sim_soft(UserId u, UserId f, const TagTensor& tensor, const ClusterModel& clusters, SimNorm norm) {
  return membership_factor(u, f, clusters) * mean_item_cosine(u, f, tensor, norm);
}

double corr(UserId f, ItemId i, const TagTensor& tensor) {
  if (i >= tensor.num_items()) throw IndexError("item id " + std::to_string(i) + " out of range");
  const TagVector* target = tensor.find(f, i);
  const auto row = tensor.row(f);
  if (target == nullptr || row.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& e : row) sum += cos_tags(*target, e.tags);
  return sum / static_cast<double>(row.size());
}

// ---------------------------------------------------------------------------

double SimilarityTable::value(UserId u, UserId f, const FriendshipGraph& graph) const {
  const auto fr = graph.friends(u);
  auto it = std::lower_bound(fr.begin(), fr.end(), f);
  if (it == fr.end() || *it != f) {
    throw IndexError("(" + std::to_string(u) + "," + std::to_string(f) + ") is not a friendship edge");
  }
  return values_.at(u).at(static_cast<std::size_t>(it - fr.begin()));
}

CorrelationTable::CorrelationTable(std::vector<std::vector<Cell>> per_user)
    : cells_(std::move(per_user)), row_sums_(cells_.size(), 0.0) {
  for (std::size_t f = 0; f < cells_.size(); ++f) {
    for (const auto& c : cells_[f]) row_sums_[f] += c.value;
  }
}

double CorrelationTable::value(UserId f, ItemId i) const {
  const auto& r = row(f);
  auto it = std::lower_bound(r.begin(), r.end(), i, [](const Cell& c, ItemId id) { return c.item < id; });
  return it == r.end() || it->item != i ? 0.0 : it->value;
}

std::size_t CorrelationTable::num_cells() const {
  std::size_t n = 0;
  for (const auto& r : cells_) n += r.size();
  return n;
}

SimilarityTable build_similarity_table(const FriendshipGraph& graph, const TagTensor& tensor,
                                       const ClusterModel& clusters, SimilarityMode mode, double lambda,
                                       SimNorm norm) {
  if (graph.num_users() != tensor.num_users() || clusters.num_users() != tensor.num_users()) {
    throw ShapeError("graph, tensor and cluster model disagree on the number of users");
  }
  if (mode == SimilarityMode::kHard) check_lambda(lambda);

  std::vector<std::vector<double>> values(graph.num_users());
  for (UserId u = 0; u < graph.num_users(); ++u) {
    const auto fr = graph.friends(u);
    values[u].resize(fr.size());
    for (std::size_t k = 0; k < fr.size(); ++k) {
      const UserId f = fr[k];
      if (f < u) {
        // Mirror the already computed (f, u) value so both directions are identical.
        values[u][k] = values[f][static_cast<std::size_t>(
            std::lower_bound(graph.friends(f).begin(), graph.friends(f).end(), u) - graph.friends(f).begin())];
        continue;
      }
      values[u][k] = mode == SimilarityMode::kHard ? sim_hard(u, f, tensor, clusters, lambda, norm)
                                                   : sim_soft(u, f, tensor, clusters, norm);
    }
  }
  SimilarityTable table(mode, lambda, std::move(values));
  if (mode == SimilarityMode::kSoft && clusters.is_one_hot()) {
    table.add_warning(
        "soft similarity built from a one-hot cluster model: the membership factor degenerates to 1 or 1 - 2/C");
  }
  if (mode == SimilarityMode::kSoft && clusters.num_clusters > 1) {
    const double uniform = 1.0 / static_cast<double>(clusters.num_clusters);
    if ((clusters.memberships.array() - uniform).abs().maxCoeff() < 1e-6) {
      table.add_warning(
          "soft similarity built from a collapsed fuzzy model (every membership is 1/C): the membership factor is 1 "
          "for all pairs; a smaller clustering.fuzzifier may separate the clusters");
    }
  }
  return table;
}

CorrelationTable build_correlation_table(const FriendshipGraph& graph, const TagTensor& tensor) {
  if (graph.num_users() != tensor.num_users()) {
    throw ShapeError("graph and tensor disagree on the number of users");
  }
  std::vector<std::vector<CorrelationTable::Cell>> cells(tensor.num_users());
  for (UserId f = 0; f < tensor.num_users(); ++f) {
    if (graph.friends(f).empty()) continue;
    const auto row = tensor.row(f);
    for (const auto& e : row) {
      double sum = 0.0;
      for (const auto& other : row) sum += cos_tags(e.tags, other.tags);
      cells[f].push_back({e.item, sum / static_cast<double>(row.size())});
    }
  }
  return CorrelationTable(std::move(cells));
}

void write_similarity_table(std::ostream& out, const SimilarityTable& table, const FriendshipGraph& graph) {
  for (UserId u = 0; u < graph.num_users(); ++u) {
    const auto fr = graph.friends(u);
    for (std::size_t k = 0; k < fr.size(); ++k) {
      if (u < fr[k]) out << u << '\t' << fr[k] << '\t' << format_double(table.row(u)[k]) << '\n';
    }
  }
}

void write_correlation_table(std::ostream& out, const CorrelationTable& table) {
  for (UserId f = 0; f < table.num_users(); ++f) {
    for (const auto& c : table.row(f)) out << f << '\t' << c.item << '\t' << format_double(c.value) << '\n';
  }
}

}  // namespace fsrec
