#include "deskzone/mlr.hpp"

#include <cmath>

#include "deskzone/error.hpp"
#include "deskzone/reduce.hpp"

namespace deskzone {

double MlrModel::predict(std::span<const double> x) const {
  if (x.size() != coefficients.size()) throw InputError("feature width does not match the model");
  double v = intercept;
  for (std::size_t j = 0; j < x.size(); ++j) v += coefficients[j] * x[j];
  return v;
}

MlrModel fit_mlr(const Matrix& x, std::span<const double> y, double ridge) {
  const std::size_t n = x.rows(), p = x.cols();
  if (y.size() != n) throw InputError("design rows and targets differ in length");
  if (n < 2) throw InputError("regression needs at least 2 rows");
  if (!(ridge >= 0.0)) throw InputError("ridge must be non-negative");
  for (double v : x.data())
    if (!std::isfinite(v)) throw InputError("non-finite design entry");
  for (double v : y)
    if (!std::isfinite(v)) throw InputError("non-finite target");

  std::vector<double> xmean(p, 0.0);
  double ymean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ymean += y[i];
    for (std::size_t j = 0; j < p; ++j) xmean[j] += x(i, j);
  }
  ymean /= static_cast<double>(n);
  for (auto& m : xmean) m /= static_cast<double>(n);

  MlrModel model;
  model.ridge = ridge;
  model.underdetermined = n < p + 1;
  model.coefficients.assign(p, 0.0);

  if (p > 0) {
    Matrix xc(n, p);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < p; ++j) xc(i, j) = x(i, j) - xmean[j];
    // The SVD wants at least as many rows as columns; zero rows do not change
    // the least-squares problem.
    if (n < p) {
      Matrix padded(p, p);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) padded(i, j) = xc(i, j);
      xc = std::move(padded);
    }
    const SvdFactors f = svd_decompose(xc);
    for (std::size_t k = 0; k < f.rank(); ++k) {
      double uty = 0.0;
      for (std::size_t i = 0; i < n; ++i) uty += f.u(i, k) * (y[i] - ymean);
      const double s = f.sigma[k];
      const double scale = s / (s * s + ridge) * uty;
      for (std::size_t j = 0; j < p; ++j) model.coefficients[j] += f.v(j, k) * scale;
    }
  }
  model.intercept = ymean;
  for (std::size_t j = 0; j < p; ++j) model.intercept -= model.coefficients[j] * xmean[j];
  return model;
}

}  // namespace deskzone
