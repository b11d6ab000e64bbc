#pragma once

#include <span>
#include <vector>

#include "deskzone/matrix.hpp"

namespace deskzone {

struct MlrModel {
  double intercept = 0.0;
  std::vector<double> coefficients;
  double ridge = 0.0;
  bool underdetermined = false;  // fewer rows than features plus intercept

  double predict(std::span<const double> x) const;
};

/// Least squares with an unpenalized intercept and a small ridge on the slopes.
/// Solved through the SVD of the centred design, dropping numerically null
/// directions, so collinear one-hot blocks are safe.
MlrModel fit_mlr(const Matrix& x, std::span<const double> y, double ridge = 1e-8);

}  // namespace deskzone
