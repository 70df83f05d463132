#include "fsrec/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "fsrec/errors.hpp"
#include "fsrec/text.hpp"

namespace fsrec {

std::vector<ItemId> top_k(UserId u, const Scorer& scorer, std::size_t k, const TagTensor& train) {
  if (k == 0) return {};
  const auto seen = train.row(u);
  std::vector<ItemId> candidates;
  candidates.reserve(train.num_items());
  auto next_seen = seen.begin();
  for (ItemId i = 0; i < train.num_items(); ++i) {
    if (next_seen != seen.end() && next_seen->item == i) {
      ++next_seen;
      continue;
    }
    candidates.push_back(i);
  }
  std::vector<double> scores(candidates.size());
  scorer.score(u, candidates, scores);

  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t keep = std::min(k, order.size());
  // Candidates are in ascending id order, so index order breaks ties by id.
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                    [&](std::size_t a, std::size_t b) { return scores[a] != scores[b] ? scores[a] > scores[b] : a < b; });
  std::vector<ItemId> out(keep);
  for (std::size_t r = 0; r < keep; ++r) out[r] = candidates[order[r]];
  return out;
}

double EvalReport::metric(const std::string& name) const {
  for (const auto& [n, v] : metrics) {
    if (n == name) return v;
  }
  throw EvaluationError("metric '" + name + "' was not computed");
}

EvalReport evaluate(const Scorer& scorer, const DataSplit& split, std::span<const std::size_t> ks) {
  if (split.num_test_entries() == 0) throw EvaluationError("the test split is empty");
  if (ks.empty()) throw EvaluationError("no cut-offs requested");
  if (scorer.num_items() != split.train.num_items()) {
    throw ShapeError("scorer covers " + std::to_string(scorer.num_items()) + " items but the split has " +
                     std::to_string(split.train.num_items()));
  }

  EvalReport report;
  report.ks.assign(ks.begin(), ks.end());
  const std::size_t max_k = *std::max_element(ks.begin(), ks.end());
  std::vector<double> precision_sum(ks.size(), 0.0);
  std::vector<double> recall_sum(ks.size(), 0.0);

  for (UserId u = 0; u < split.train.num_users(); ++u) {
    const auto& held = split.test[u];
    if (held.empty()) {
      ++report.excluded["empty-test"];
      continue;
    }
    const auto ranked = top_k(u, scorer, max_k, split.train);
    if (ranked.empty()) {
      ++report.excluded["no-candidates"];
      continue;
    }
    UserEvaluation ue;
    ue.user = u;
    ue.num_test = held.size();
    std::size_t hits = 0;
    std::vector<std::size_t> prefix_hits(ranked.size() + 1, 0);
    for (std::size_t pos = 0; pos < ranked.size(); ++pos) {
      auto it = std::lower_bound(held.begin(), held.end(), ranked[pos],
                                 [](const Entry& e, ItemId id) { return e.item < id; });
      const bool hit = it != held.end() && it->item == ranked[pos];
      hits += hit ? 1 : 0;
      prefix_hits[pos + 1] = hits;
    }
    for (std::size_t c = 0; c < ks.size(); ++c) {
      const std::size_t len = std::min(ks[c], ranked.size());
      ue.hits.push_back(prefix_hits[len]);
      ue.list_size.push_back(len);
      precision_sum[c] += static_cast<double>(prefix_hits[len]) / static_cast<double>(len);
      recall_sum[c] += static_cast<double>(prefix_hits[len]) / static_cast<double>(held.size());
    }
    report.users.push_back(std::move(ue));
  }

  report.evaluated_users = report.users.size();
  if (report.evaluated_users == 0) throw EvaluationError("no user could be evaluated");
  const auto n = static_cast<double>(report.evaluated_users);
  for (std::size_t c = 0; c < ks.size(); ++c) report.metrics.emplace_back("P@" + std::to_string(ks[c]), precision_sum[c] / n);
  for (std::size_t c = 0; c < ks.size(); ++c) report.metrics.emplace_back("R@" + std::to_string(ks[c]), recall_sum[c] / n);
  return report;
}

void write_report(std::ostream& out, const EvalReport& report) {
  out << "metric\tvalue\n";
  for (const auto& [name, value] : report.metrics) out << name << '\t' << format_double(value) << '\n';
  out << "evaluated_users\t" << report.evaluated_users << '\n';
  for (const auto& [reason, count] : report.excluded) out << "excluded:" << reason << '\t' << count << '\n';
}

void write_user_detail(std::ostream& out, const EvalReport& report) {
  out << "user\tnum_test";
  for (auto k : report.ks) out << "\thits@" << k;
  out << '\n';
  for (const auto& ue : report.users) {
    out << ue.user << '\t' << ue.num_test;
    for (auto h : ue.hits) out << '\t' << h;
    out << '\n';
  }
}

}  // namespace fsrec
