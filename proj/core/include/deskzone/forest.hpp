#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "deskzone/features.hpp"

namespace deskzone {

struct RfConfig {
  std::size_t n_trees = 200;
  std::size_t min_split = 50;
  std::size_t min_leaf = 2;
  std::size_t max_depth = 300;
  bool bootstrap = true;
};

void validate(const RfConfig& config);

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  double value = 0.0;  // mean target of the node's training rows
  std::uint32_t left = 0, right = 0;
  std::uint32_t samples = 0;
};

/// Regression tree over feature vectors; `x <= threshold` goes left.
struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  std::size_t depth() const;
  double predict(std::span<const double> x) const;
};

struct RfModel {
  RfConfig config;
  std::uint64_t seed = 0;
  std::size_t n_features = 0;
  std::vector<RegressionTree> trees;
  /// Total squared-error decrease per feature summed over all splits.
  std::vector<double> split_gain;

  double predict(std::span<const double> x) const;
  double predict(const FeatureRow& row) const {
    const auto raw = row.raw();
    return predict(raw);
  }
};

/// Generic fit on an n x F feature matrix. Each tree t uses seed mix_seed(seed, t).
RfModel fit_random_forest(const Matrix& x, std::span<const double> y, const RfConfig& config, std::uint64_t seed);

/// Fit on the raw zone features (s1, s2, s3, hour, day_of_week, is_weekend, zone).
RfModel fit_random_forest(std::span<const FeatureRow> rows, std::span<const double> y, const RfConfig& config,
                          std::uint64_t seed);

Matrix raw_feature_matrix(std::span<const FeatureRow> rows);

/// Split gain per feature normalized to sum to 1; all zeros when no split was made.
std::vector<double> feature_importance(const RfModel& model);

}  // namespace deskzone
