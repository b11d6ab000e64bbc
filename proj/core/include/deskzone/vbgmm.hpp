#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace deskzone {

/// Conjugate priors for the univariate Bayesian mixture. Unset mean and
/// scale are derived from the data (sample mean; degrees_of_freedom times the
/// sample variance), which keeps fits equivariant under rescaling of the data.
struct VbGmmPriors {
  double dirichlet_concentration = 1e-3;
  double mean_precision = 1.0;      // beta_0
  double degrees_of_freedom = 1.0;  // nu_0
  std::optional<double> mean;       // m_0
  std::optional<double> scale;      // inverse Gamma-rate term, W_0^{-1}
};

struct VbGmmConfig {
  int max_components = 10;
  VbGmmPriors priors;
  double tol = 1e-6;  // relative change in the variational bound
  int max_iter = 500;
};

/// Fitted mean-field posterior of a univariate Gaussian mixture with a
/// Dirichlet prior on the weights and a Gaussian-Gamma prior on each
/// component's mean and precision.
struct VbGmmModel {
  // Posterior summaries, one entry per component.
  std::vector<double> weights;     // E[phi_k]
  std::vector<double> means;       // m_k
  std::vector<double> precisions;  // E[Lambda_k] = nu_k W_k

  // Variational hyperparameters.
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<double> nu;
  std::vector<double> w;  // Gamma-rate scale W_k

  // Priors actually used.
  double prior_alpha = 0.0;
  double prior_beta = 0.0;
  double prior_mean = 0.0;
  double prior_nu = 0.0;
  double prior_scale = 0.0;

  std::vector<double> elbo_trace;
  int iterations = 0;
  bool converged = false;
  bool degenerate = false;
  std::uint64_t seed = 0;
  VbGmmConfig config;

  std::size_t components() const noexcept { return weights.size(); }

  /// Components with weight >= floor, in ascending order of mean.
  std::vector<std::size_t> active_components(double weight_floor) const;

  /// Index (into `among`) of the component with the largest responsibility
  /// for x. Ties go to the earlier entry.
  std::size_t assign(double x, std::span<const std::size_t> among) const;
};

VbGmmModel fit_vbgmm(std::span<const double> samples, const VbGmmConfig& config, std::uint64_t seed);

std::size_t effective_components(const VbGmmModel& model, double weight_floor);

std::string to_json(const VbGmmModel& model);
VbGmmModel vbgmm_from_json(const std::string& text);

}  // namespace deskzone
