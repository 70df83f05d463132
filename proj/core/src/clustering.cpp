#include "fsrec/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "fsrec/errors.hpp"
#include "fsrec/text.hpp"

namespace fsrec {
namespace {

std::size_t count_distinct_rows(const Eigen::MatrixXd& x) {
  std::set<std::vector<double>> rows;
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    std::vector<double> v(static_cast<std::size_t>(x.cols()));
    for (Eigen::Index c = 0; c < x.cols(); ++c) v[static_cast<std::size_t>(c)] = x(r, c);
    rows.insert(std::move(v));
  }
  return rows.size();
}

void validate(const Eigen::MatrixXd& profiles, const ClusterParams& params) {
  if (profiles.rows() == 0) throw EmptyInputError("cannot cluster an empty profile list");
  if (params.num_clusters < 1) throw ConfigError("clusters", "cluster count must be >= 1");
  const std::size_t distinct = count_distinct_rows(profiles);
  if (params.num_clusters > distinct) {
    throw ConfigError("clusters", "cluster count " + std::to_string(params.num_clusters) +
                                      " exceeds the number of distinct profiles (" + std::to_string(distinct) + ")");
  }
}

double sq_dist(const Eigen::MatrixXd& x, Eigen::Index r, const Eigen::MatrixXd& centroids, Eigen::Index c) {
  return (x.row(r) - centroids.row(c)).squaredNorm();
}

// k-means++: first centre uniform, later ones with probability ~ D^2 to the
// nearest chosen centre.
Eigen::MatrixXd seed_centroids(const Eigen::MatrixXd& x, std::size_t k, std::mt19937_64& rng) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd centroids(static_cast<Eigen::Index>(k), x.cols());
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  centroids.row(0) = x.row(pick(rng));

  std::vector<double> d2(static_cast<std::size_t>(n));
  for (Eigen::Index r = 0; r < n; ++r) d2[static_cast<std::size_t>(r)] = sq_dist(x, r, centroids, 0);

  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (double d : d2) total += d;
    std::uniform_real_distribution<double> unif(0.0, total);
    const double target = unif(rng);
    Eigen::Index chosen = -1;
    double acc = 0.0;
    for (Eigen::Index r = 0; r < n; ++r) {
      const double d = d2[static_cast<std::size_t>(r)];
      if (d <= 0.0) continue;
      acc += d;
      chosen = r;
      if (acc > target) break;
    }
    // `chosen` is always set: C <= distinct profiles guarantees a positive D^2.
    centroids.row(static_cast<Eigen::Index>(c)) = x.row(chosen);
    for (Eigen::Index r = 0; r < n; ++r) {
      d2[static_cast<std::size_t>(r)] =
          std::min(d2[static_cast<std::size_t>(r)], sq_dist(x, r, centroids, static_cast<Eigen::Index>(c)));
    }
  }
  return centroids;
}

std::size_t row_argmax(const Eigen::MatrixXd& m, Eigen::Index r) {
  Eigen::Index best = 0;
  for (Eigen::Index c = 1; c < m.cols(); ++c) {
    if (m(r, c) > m(r, best)) best = c;
  }
  return static_cast<std::size_t>(best);
}

void fill_hard_assign(ClusterModel& model) {
  model.hard_assign.resize(static_cast<std::size_t>(model.memberships.rows()));
  for (Eigen::Index r = 0; r < model.memberships.rows(); ++r) {
    model.hard_assign[static_cast<std::size_t>(r)] = row_argmax(model.memberships, r);
  }
}

std::string algorithm_name(ClusterAlgorithm a) { return a == ClusterAlgorithm::kKMeans ? "kmeans" : "cmeans"; }

}  // namespace

bool ClusterModel::is_one_hot() const {
  for (Eigen::Index r = 0; r < memberships.rows(); ++r) {
    for (Eigen::Index c = 0; c < memberships.cols(); ++c) {
      const double v = memberships(r, c);
      if (v != 0.0 && v != 1.0) return false;
    }
    if (memberships.row(r).sum() != 1.0) return false;
  }
  return true;
}

Eigen::MatrixXd normalized_profiles(const TagTensor& tensor) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(tensor.num_users()),
                                            static_cast<Eigen::Index>(tensor.num_tags()));
  for (UserId u = 0; u < tensor.num_users(); ++u) {
    for (const auto& tc : user_tag_profile(tensor, u)) x(u, tc.tag) = static_cast<double>(tc.count);
    const double norm = x.row(u).norm();
    if (norm > 0.0) x.row(u) /= norm;
  }
  return x;
}

ClusterModel kmeans(const Eigen::MatrixXd& profiles, const ClusterParams& params) {
  validate(profiles, params);
  const Eigen::Index n = profiles.rows();
  const auto k = static_cast<Eigen::Index>(params.num_clusters);
  std::mt19937_64 rng(params.seed);

  ClusterModel model;
  model.algorithm = ClusterAlgorithm::kKMeans;
  model.num_clusters = params.num_clusters;
  model.fuzzifier = 1.0;
  model.centroids = seed_centroids(profiles, params.num_clusters, rng);

  std::vector<Eigen::Index> assign(static_cast<std::size_t>(n), 0);
  auto assign_nearest = [&] {
    for (Eigen::Index r = 0; r < n; ++r) {
      Eigen::Index best = 0;
      double best_d = sq_dist(profiles, r, model.centroids, 0);
      for (Eigen::Index c = 1; c < k; ++c) {
        const double d = sq_dist(profiles, r, model.centroids, c);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      assign[static_cast<std::size_t>(r)] = best;
    }
  };

  assign_nearest();
  for (std::size_t it = 0; it < params.max_iter; ++it) {
    if (it > 0) assign_nearest();

    std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
    for (auto a : assign) ++sizes[static_cast<std::size_t>(a)];
    for (Eigen::Index c = 0; c < k; ++c) {
      if (sizes[static_cast<std::size_t>(c)] > 0) continue;
      // Steal the point farthest from its centroid among clusters that can spare one.
      Eigen::Index far = -1;
      double far_d = -1.0;
      for (Eigen::Index r = 0; r < n; ++r) {
        const auto a = assign[static_cast<std::size_t>(r)];
        if (sizes[static_cast<std::size_t>(a)] < 2) continue;
        const double d = sq_dist(profiles, r, model.centroids, a);
        if (d > far_d) {
          far_d = d;
          far = r;
        }
      }
      --sizes[static_cast<std::size_t>(assign[static_cast<std::size_t>(far)])];
      assign[static_cast<std::size_t>(far)] = c;
      sizes[static_cast<std::size_t>(c)] = 1;
      model.centroids.row(c) = profiles.row(far);
    }

    model.centroids.setZero();
    for (Eigen::Index r = 0; r < n; ++r) model.centroids.row(assign[static_cast<std::size_t>(r)]) += profiles.row(r);
    for (Eigen::Index c = 0; c < k; ++c) model.centroids.row(c) /= static_cast<double>(sizes[static_cast<std::size_t>(c)]);

    double wcss = 0.0;
    for (Eigen::Index r = 0; r < n; ++r) wcss += sq_dist(profiles, r, model.centroids, assign[static_cast<std::size_t>(r)]);
    model.objective_trace.push_back(wcss);
    const auto& tr = model.objective_trace;
    if (tr.size() >= 2 && tr[tr.size() - 2] - wcss < params.tol) break;
  }

  model.memberships = Eigen::MatrixXd::Zero(n, k);
  for (Eigen::Index r = 0; r < n; ++r) model.memberships(r, assign[static_cast<std::size_t>(r)]) = 1.0;
  fill_hard_assign(model);
  return model;
}

Eigen::VectorXd fuzzy_membership(const Eigen::VectorXd& point, const Eigen::MatrixXd& centroids, double fuzzifier) {
  const Eigen::Index k = centroids.rows();
  Eigen::VectorXd d2(k);
  for (Eigen::Index c = 0; c < k; ++c) d2(c) = (centroids.row(c).transpose() - point).squaredNorm();

  Eigen::VectorXd mu = Eigen::VectorXd::Zero(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    if (d2(c) == 0.0) {
      mu(c) = 1.0;
      return mu;
    }
  }
  // mu_c = 1 / sum_j (d_c / d_j)^(2/(m-1)) = 1 / sum_j (d2_c / d2_j)^(1/(m-1))
  const double expo = 1.0 / (fuzzifier - 1.0);
  for (Eigen::Index c = 0; c < k; ++c) {
    double denom = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) denom += std::pow(d2(c) / d2(j), expo);
    mu(c) = 1.0 / denom;
  }
  mu /= mu.sum();
  return mu;
}

ClusterModel cmeans(const Eigen::MatrixXd& profiles, const ClusterParams& params) {
  if (!(params.fuzzifier > 1.0)) {
    throw ConfigError("fuzzifier", "fuzzifier m must be > 1, got " + std::to_string(params.fuzzifier));
  }
  validate(profiles, params);
  const Eigen::Index n = profiles.rows();
  const auto k = static_cast<Eigen::Index>(params.num_clusters);
  const double m = params.fuzzifier;
  std::mt19937_64 rng(params.seed);

  ClusterModel model;
  model.algorithm = ClusterAlgorithm::kCMeans;
  model.num_clusters = params.num_clusters;
  model.fuzzifier = m;
  model.centroids = seed_centroids(profiles, params.num_clusters, rng);
  model.memberships.resize(n, k);

  auto update_memberships = [&] {
    for (Eigen::Index r = 0; r < n; ++r) {
      model.memberships.row(r) = fuzzy_membership(profiles.row(r).transpose(), model.centroids, m).transpose();
    }
  };

  for (std::size_t it = 0; it < params.max_iter; ++it) {
    update_memberships();
    const Eigen::MatrixXd w = model.memberships.array().pow(m).matrix();
    for (Eigen::Index c = 0; c < k; ++c) {
      const double mass = w.col(c).sum();
      if (mass > 0.0) model.centroids.row(c) = (w.col(c).transpose() * profiles) / mass;
    }
    double objective = 0.0;
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < k; ++c) objective += w(r, c) * sq_dist(profiles, r, model.centroids, c);
    }
    model.objective_trace.push_back(objective);
    const auto& tr = model.objective_trace;
    if (tr.size() >= 2 && tr[tr.size() - 2] - objective < params.tol) break;
  }
  update_memberships();
  fill_hard_assign(model);
  return model;
}

ClusterModel permute_clusters(const ClusterModel& model, const std::vector<std::size_t>& perm) {
  if (perm.size() != model.num_clusters) throw ShapeError("permutation size does not match cluster count");
  ClusterModel out = model;
  for (std::size_t c = 0; c < perm.size(); ++c) {
    const auto from = static_cast<Eigen::Index>(c);
    const auto to = static_cast<Eigen::Index>(perm[c]);
    out.centroids.row(to) = model.centroids.row(from);
    out.memberships.col(to) = model.memberships.col(from);
  }
  fill_hard_assign(out);
  return out;
}

void write_memberships(std::ostream& out, const ClusterModel& model) {
  for (Eigen::Index r = 0; r < model.memberships.rows(); ++r) {
    out << r;
    for (Eigen::Index c = 0; c < model.memberships.cols(); ++c) out << '\t' << format_double(model.memberships(r, c));
    out << '\n';
  }
}

void write_cluster_model(std::ostream& out, const ClusterModel& model) {
  out << "fsrec-clusters 1\n";
  out << "algorithm " << algorithm_name(model.algorithm) << '\n';
  out << "clusters " << model.num_clusters << '\n';
  out << "fuzzifier " << format_double(model.fuzzifier) << '\n';
  out << "dim " << model.centroids.cols() << '\n';
  out << "users " << model.memberships.rows() << '\n';
  out << "trace " << model.objective_trace.size();
  for (double v : model.objective_trace) out << ' ' << format_double(v);
  out << '\n';
  for (Eigen::Index c = 0; c < model.centroids.rows(); ++c) {
    out << "centroid";
    for (Eigen::Index d = 0; d < model.centroids.cols(); ++d) out << ' ' << format_double(model.centroids(c, d));
    out << '\n';
  }
  for (Eigen::Index r = 0; r < model.memberships.rows(); ++r) {
    out << "membership";
    for (Eigen::Index c = 0; c < model.memberships.cols(); ++c) out << ' ' << format_double(model.memberships(r, c));
    out << '\n';
  }
}

ClusterModel read_cluster_model(std::istream& in) {
  std::size_t line_no = 0;
  std::string line;
  auto next_fields = [&](std::string_view expected) {
    if (!std::getline(in, line)) throw ParseError(line_no + 1, "unexpected end of cluster model");
    ++line_no;
    std::istringstream ss(line);
    std::vector<std::string> fields;
    for (std::string f; ss >> f;) fields.push_back(f);
    if (fields.empty() || fields.front() != expected) {
      throw ParseError(line_no, "expected '" + std::string(expected) + "'");
    }
    return fields;
  };
  auto number = [&](const std::string& s) {
    try {
      return parse_double(s, "cluster model");
    } catch (const ConfigError&) {
      throw ParseError(line_no, "malformed number '" + s + "'");
    }
  };

  auto header = next_fields("fsrec-clusters");
  if (header.size() != 2 || header[1] != "1") throw ParseError(line_no, "unsupported cluster model version");

  ClusterModel model;
  const auto algo = next_fields("algorithm");
  if (algo.size() != 2 || (algo[1] != "kmeans" && algo[1] != "cmeans")) throw ParseError(line_no, "bad algorithm");
  model.algorithm = algo[1] == "kmeans" ? ClusterAlgorithm::kKMeans : ClusterAlgorithm::kCMeans;
  model.num_clusters = static_cast<std::size_t>(number(next_fields("clusters").at(1)));
  model.fuzzifier = number(next_fields("fuzzifier").at(1));
  const auto dim = static_cast<Eigen::Index>(number(next_fields("dim").at(1)));
  const auto users = static_cast<Eigen::Index>(number(next_fields("users").at(1)));
  const auto trace = next_fields("trace");
  const auto trace_len = static_cast<std::size_t>(number(trace.at(1)));
  if (trace.size() != trace_len + 2) throw ParseError(line_no, "trace length mismatch");
  for (std::size_t t = 0; t < trace_len; ++t) model.objective_trace.push_back(number(trace[t + 2]));

  const auto k = static_cast<Eigen::Index>(model.num_clusters);
  model.centroids.resize(k, dim);
  for (Eigen::Index c = 0; c < k; ++c) {
    const auto f = next_fields("centroid");
    if (f.size() != static_cast<std::size_t>(dim) + 1) throw ParseError(line_no, "centroid width mismatch");
    for (Eigen::Index d = 0; d < dim; ++d) model.centroids(c, d) = number(f[static_cast<std::size_t>(d) + 1]);
  }
  model.memberships.resize(users, k);
  for (Eigen::Index r = 0; r < users; ++r) {
    const auto f = next_fields("membership");
    if (f.size() != static_cast<std::size_t>(k) + 1) throw ParseError(line_no, "membership width mismatch");
    for (Eigen::Index c = 0; c < k; ++c) model.memberships(r, c) = number(f[static_cast<std::size_t>(c) + 1]);
  }
  fill_hard_assign(model);
  return model;
}

}  // namespace fsrec
