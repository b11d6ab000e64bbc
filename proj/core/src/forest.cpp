#include "deskzone/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "deskzone/error.hpp"
#include "deskzone/rng.hpp"

namespace deskzone {

void validate(const RfConfig& c) {
  if (c.n_trees == 0) throw InputError("random forest needs at least one tree");
  if (c.min_leaf == 0) throw InputError("min_leaf must be at least 1");
  if (c.min_split < 2) throw InputError("min_split must be at least 2");
}

std::size_t RegressionTree::depth() const {
  if (nodes.empty()) return 0;
  std::size_t best = 0;
  std::vector<std::pair<std::uint32_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    if (nodes[i].feature >= 0) {
      stack.emplace_back(nodes[i].left, d + 1);
      stack.emplace_back(nodes[i].right, d + 1);
    }
  }
  return best;
}

double RegressionTree::predict(std::span<const double> x) const {
  std::uint32_t i = 0;
  while (nodes[i].feature >= 0)
    i = x[static_cast<std::size_t>(nodes[i].feature)] <= nodes[i].threshold ? nodes[i].left : nodes[i].right;
  return nodes[i].value;
}

double RfModel::predict(std::span<const double> x) const {
  if (x.size() != n_features) throw InputError("feature width does not match the forest");
  double s = 0.0;
  for (const auto& t : trees) s += t.predict(x);
  return s / static_cast<double>(trees.size());
}

namespace {

// Feature values replaced by their rank among the distinct training values, so
// split search can use either a sort or a histogram over ranks.
struct RankedFeatures {
  std::size_t n = 0, f = 0;
  std::vector<std::vector<double>> values;  // distinct sorted values per feature
  std::vector<std::uint32_t> rank;          // n x f, row-major
};

RankedFeatures rank_features(const Matrix& x) {
  RankedFeatures r;
  r.n = x.rows();
  r.f = x.cols();
  r.values.resize(r.f);
  r.rank.resize(r.n * r.f);
  for (std::size_t j = 0; j < r.f; ++j) {
    auto col = x.column(j);
    std::vector<double> u(col.begin(), col.end());
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
    for (std::size_t i = 0; i < r.n; ++i)
      r.rank[i * r.f + j] = static_cast<std::uint32_t>(std::lower_bound(u.begin(), u.end(), x(i, j)) - u.begin());
    r.values[j] = std::move(u);
  }
  return r;
}

struct Split {
  int feature = -1;
  std::uint32_t rank = 0;  // rows with rank <= this go left
  double gain = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const RankedFeatures& rf, std::span<const double> y, const RfConfig& config, std::vector<double>& gain)
      : rf_(rf), y_(y), config_(config), gain_(gain) {
    std::size_t max_u = 0;
    for (const auto& v : rf_.values) max_u = std::max(max_u, v.size());
    count_.assign(max_u, 0);
    sum_.assign(max_u, 0.0);
  }

  RegressionTree build(std::vector<std::uint32_t> sample) {
    tree_.nodes.clear();
    grow(sample, 0, sample.size(), 0);
    return std::move(tree_);
  }

 private:
  std::uint32_t grow(std::vector<std::uint32_t>& idx, std::size_t lo, std::size_t hi, std::size_t depth) {
    const auto node_id = static_cast<std::uint32_t>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    const std::size_t n = hi - lo;
    double total = 0.0;
    for (std::size_t k = lo; k < hi; ++k) total += y_[idx[k]];
    tree_.nodes[node_id].value = total / static_cast<double>(n);
    tree_.nodes[node_id].samples = static_cast<std::uint32_t>(n);

    if (n < config_.min_split || depth >= config_.max_depth || n < 2 * config_.min_leaf) return node_id;
    const Split s = best_split(idx, lo, hi, total);
    if (s.feature < 0) return node_id;

    const auto f = static_cast<std::size_t>(s.feature);
    const auto mid_it = std::stable_partition(idx.begin() + static_cast<std::ptrdiff_t>(lo),
                                              idx.begin() + static_cast<std::ptrdiff_t>(hi),
                                              [&](std::uint32_t i) { return rf_.rank[i * rf_.f + f] <= s.rank; });
    const auto mid = static_cast<std::size_t>(mid_it - idx.begin());
    gain_[f] += s.gain;
    const double threshold = 0.5 * (rf_.values[f][s.rank] + rf_.values[f][next_rank(idx, mid, hi, f)]);
    const auto left = grow(idx, lo, mid, depth + 1);
    const auto right = grow(idx, mid, hi, depth + 1);
    TreeNode& node = tree_.nodes[node_id];
    node.feature = s.feature;
    node.threshold = threshold;
    node.left = left;
    node.right = right;
    return node_id;
  }

  std::uint32_t next_rank(const std::vector<std::uint32_t>& idx, std::size_t lo, std::size_t hi, std::size_t f) const {
    std::uint32_t r = std::numeric_limits<std::uint32_t>::max();
    for (std::size_t k = lo; k < hi; ++k) r = std::min(r, rf_.rank[idx[k] * rf_.f + f]);
    return r;
  }

  // Exhaustive search over the boundaries between distinct values present in
  // the node. Gain is the squared-error decrease nL*nR/n * (meanL - meanR)^2.
  Split best_split(const std::vector<std::uint32_t>& idx, std::size_t lo, std::size_t hi, double total) {
    const std::size_t n = hi - lo;
    Split best;
    const double eps = 1e-12 * std::max(1.0, std::abs(total));
    std::vector<std::pair<std::uint32_t, double>> sorted;
    for (std::size_t f = 0; f < rf_.f; ++f) {
      const std::size_t u = rf_.values[f].size();
      if (u < 2) continue;
      auto consider = [&](std::uint32_t r, std::size_t nl, double sl) {
        const std::size_t nr = n - nl;
        if (nl < config_.min_leaf || nr < config_.min_leaf) return;
        const double ml = sl / static_cast<double>(nl), mr = (total - sl) / static_cast<double>(nr);
        const double g = static_cast<double>(nl) * static_cast<double>(nr) / static_cast<double>(n) * (ml - mr) * (ml - mr);
        if (g > best.gain + eps) best = Split{static_cast<int>(f), r, g};
      };
      const double log_n = std::log2(static_cast<double>(n) + 1.0);
      if (static_cast<double>(n) * log_n < static_cast<double>(u)) {
        sorted.clear();
        for (std::size_t k = lo; k < hi; ++k) sorted.emplace_back(rf_.rank[idx[k] * rf_.f + f], y_[idx[k]]);
        std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        std::size_t nl = 0;
        double sl = 0.0;
        for (std::size_t k = 0; k + 1 < sorted.size(); ++k) {
          ++nl;
          sl += sorted[k].second;
          if (sorted[k].first != sorted[k + 1].first) consider(sorted[k].first, nl, sl);
        }
      } else {
        std::fill_n(count_.begin(), u, 0);
        std::fill_n(sum_.begin(), u, 0.0);
        for (std::size_t k = lo; k < hi; ++k) {
          const auto r = rf_.rank[idx[k] * rf_.f + f];
          ++count_[r];
          sum_[r] += y_[idx[k]];
        }
        std::size_t nl = 0;
        double sl = 0.0;
        for (std::size_t r = 0; r < u; ++r) {
          if (count_[r] == 0) continue;
          nl += count_[r];
          sl += sum_[r];
          if (nl == n) break;
          consider(static_cast<std::uint32_t>(r), nl, sl);
        }
      }
    }
    return best;
  }

  const RankedFeatures& rf_;
  std::span<const double> y_;
  const RfConfig& config_;
  std::vector<double>& gain_;
  std::vector<std::size_t> count_;
  std::vector<double> sum_;
  RegressionTree tree_;
};

}  // namespace

RfModel fit_random_forest(const Matrix& x, std::span<const double> y, const RfConfig& config, std::uint64_t seed) {
  validate(config);
  if (x.rows() == 0) throw InputError("empty training set");
  if (y.size() != x.rows()) throw InputError("feature rows and targets differ in length");
  for (double v : x.data())
    if (!std::isfinite(v)) throw InputError("non-finite feature value");
  for (double v : y)
    if (!std::isfinite(v)) throw InputError("non-finite target");

  const RankedFeatures ranked = rank_features(x);
  RfModel model;
  model.config = config;
  model.seed = seed;
  model.n_features = x.cols();
  model.split_gain.assign(x.cols(), 0.0);
  model.trees.reserve(config.n_trees);
  TreeBuilder builder(ranked, y, config, model.split_gain);
  const auto n = static_cast<std::uint32_t>(x.rows());
  std::vector<std::uint32_t> sample(n);
  for (std::size_t t = 0; t < config.n_trees; ++t) {
    if (config.bootstrap) {
      Rng rng(mix_seed(seed, t));
      for (auto& s : sample) s = static_cast<std::uint32_t>(rng.below(n));
      // Row order inside a node never changes the chosen split, only speeds partitioning.
      std::sort(sample.begin(), sample.end());
    } else {
      std::iota(sample.begin(), sample.end(), 0u);
    }
    model.trees.push_back(builder.build(sample));
  }
  return model;
}

Matrix raw_feature_matrix(std::span<const FeatureRow> rows) {
  Matrix x(rows.size(), FeatureRow::kRawFeatures);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = rows[i].raw();
    std::copy(r.begin(), r.end(), x.row(i).begin());
  }
  return x;
}

RfModel fit_random_forest(std::span<const FeatureRow> rows, std::span<const double> y, const RfConfig& config,
                          std::uint64_t seed) {
  return fit_random_forest(raw_feature_matrix(rows), y, config, seed);
}

std::vector<double> feature_importance(const RfModel& model) {
  std::vector<double> imp = model.split_gain;
  const double total = std::accumulate(imp.begin(), imp.end(), 0.0);
  for (auto& v : imp) v = total > 0.0 ? v / total : 0.0;
  return imp;
}

}  // namespace deskzone
