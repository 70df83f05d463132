#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fsrec/baselines.hpp"
#include "fsrec/corpus.hpp"

namespace fsrec {

/// The k highest-scoring items u has not interacted with in `train`, best
/// first, ties broken by ascending item id.
std::vector<ItemId> top_k(UserId u, const Scorer& scorer, std::size_t k, const TagTensor& train);

struct UserEvaluation {
  UserId user = 0;
  std::size_t num_test = 0;
  std::vector<std::size_t> hits;       // |R(u) & T(u)| per cut-off
  std::vector<std::size_t> list_size;  // |R(u)| per cut-off
};

struct EvalReport {
  std::vector<std::size_t> ks;
  /// Macro-averaged metrics in output order: P@k for every k, then R@k.
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<UserEvaluation> users;
  std::size_t evaluated_users = 0;
  std::map<std::string, std::size_t> excluded;  // reason -> user count

  /// Throws EvaluationError for an unknown metric name.
  double metric(const std::string& name) const;
};

/// Precision and recall at each cut-off, averaged over users with held-out
/// items. R(u) is the top-k list; T(u) the user's held-out items.
EvalReport evaluate(const Scorer& scorer, const DataSplit& split, std::span<const std::size_t> ks);

/// `metric\tvalue` lines plus evaluated/excluded counts.
void write_report(std::ostream& out, const EvalReport& report);
/// `user\tnum_test\thits@k...` with a header line.
void write_user_detail(std::ostream& out, const EvalReport& report);

}  // namespace fsrec
