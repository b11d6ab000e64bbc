#include "deskzone/vbgmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <boost/math/special_functions/digamma.hpp>
#include <nlohmann/json.hpp>

#include "deskzone/error.hpp"
#include "deskzone/rng.hpp"

namespace deskzone {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;
// Components below this weight hold (numerically) no data and are not merge
// candidates.
constexpr double kMergeFloor = 1e-6;

using boost::math::digamma;

// Per-component sufficient statistics of the responsibilities.
struct Stats {
  std::vector<double> n, xbar, s;
};

Stats suff_stats(std::span<const double> x, const std::vector<double>& r, std::size_t k_count) {
  const std::size_t n = x.size();
  Stats st{std::vector<double>(k_count, 0.0), std::vector<double>(k_count, 0.0), std::vector<double>(k_count, 0.0)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < k_count; ++k) {
      const double ri = r[i * k_count + k];
      st.n[k] += ri;
      st.xbar[k] += ri * x[i];
    }
  for (std::size_t k = 0; k < k_count; ++k) st.xbar[k] = st.n[k] > 0.0 ? st.xbar[k] / st.n[k] : 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < k_count; ++k) {
      const double d = x[i] - st.xbar[k];
      st.s[k] += r[i * k_count + k] * d * d;
    }
  for (std::size_t k = 0; k < k_count; ++k) st.s[k] = st.n[k] > 0.0 ? st.s[k] / st.n[k] : 0.0;
  return st;
}

void m_step(VbGmmModel& m, const Stats& st) {
  const std::size_t kc = st.n.size();
  for (std::size_t k = 0; k < kc; ++k) {
    m.alpha[k] = m.prior_alpha + st.n[k];
    m.beta[k] = m.prior_beta + st.n[k];
    m.means[k] = (m.prior_beta * m.prior_mean + st.n[k] * st.xbar[k]) / m.beta[k];
    const double dm = st.xbar[k] - m.prior_mean;
    const double w_inv =
        m.prior_scale + st.n[k] * st.s[k] + m.prior_beta * st.n[k] / (m.prior_beta + st.n[k]) * dm * dm;
    m.w[k] = 1.0 / w_inv;
    m.nu[k] = m.prior_nu + st.n[k];
  }
  const double alpha_sum = std::accumulate(m.alpha.begin(), m.alpha.end(), 0.0);
  for (std::size_t k = 0; k < kc; ++k) {
    m.weights[k] = m.alpha[k] / alpha_sum;
    m.precisions[k] = m.nu[k] * m.w[k];
  }
}

double log_lambda_tilde(const VbGmmModel& m, std::size_t k) {
  return digamma(0.5 * m.nu[k]) + std::numbers::ln2 + std::log(m.w[k]);
}

double log_pi_tilde(const VbGmmModel& m, std::size_t k, double alpha_sum) {
  return digamma(m.alpha[k]) - digamma(alpha_sum);
}

// log of the unnormalised responsibility of component k for x.
double log_rho(const VbGmmModel& m, std::size_t k, double x, double lpi, double llam) {
  const double d = x - m.means[k];
  return lpi + 0.5 * llam - 0.5 * kLog2Pi - 0.5 * (1.0 / m.beta[k] + m.nu[k] * m.w[k] * d * d);
}

void e_step(const VbGmmModel& m, std::span<const double> x, std::vector<double>& r) {
  const std::size_t kc = m.components();
  const double alpha_sum = std::accumulate(m.alpha.begin(), m.alpha.end(), 0.0);
  std::vector<double> lpi(kc), llam(kc), row(kc);
  for (std::size_t k = 0; k < kc; ++k) {
    lpi[k] = log_pi_tilde(m, k, alpha_sum);
    llam[k] = log_lambda_tilde(m, k);
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < kc; ++k) {
      row[k] = log_rho(m, k, x[i], lpi[k], llam[k]);
      mx = std::max(mx, row[k]);
    }
    double z = 0.0;
    for (std::size_t k = 0; k < kc; ++k) {
      row[k] = std::exp(row[k] - mx);
      z += row[k];
    }
    for (std::size_t k = 0; k < kc; ++k) r[i * kc + k] = row[k] / z;
  }
}

double log_b(double w, double nu) { return -0.5 * nu * std::log(w) - 0.5 * nu * std::numbers::ln2 - std::lgamma(0.5 * nu); }

// Variational lower bound for the current q given the responsibilities r
// that produced it (univariate specialisation of the standard bound).
double elbo(const VbGmmModel& m, const Stats& st, const std::vector<double>& r) {
  const std::size_t kc = m.components();
  const double alpha_sum = std::accumulate(m.alpha.begin(), m.alpha.end(), 0.0);
  const double w0_inv = m.prior_scale;
  const double w0 = 1.0 / w0_inv;

  double e_lik = 0.0, e_z = 0.0, e_pi = 0.0, e_mulam = 0.0, q_pi = 0.0, q_mulam = 0.0;
  double sum_lpi = 0.0, sum_llam = 0.0;
  for (std::size_t k = 0; k < kc; ++k) {
    const double llam = log_lambda_tilde(m, k);
    const double lpi = log_pi_tilde(m, k, alpha_sum);
    sum_lpi += lpi;
    sum_llam += llam;
    const double dx = st.xbar[k] - m.means[k];
    e_lik += 0.5 * st.n[k] *
             (llam - 1.0 / m.beta[k] - m.nu[k] * st.s[k] * m.w[k] - m.nu[k] * m.w[k] * dx * dx - kLog2Pi);
    e_z += st.n[k] * lpi;
    const double dm = m.means[k] - m.prior_mean;
    e_mulam += 0.5 * (std::log(m.prior_beta) - kLog2Pi + llam - m.prior_beta / m.beta[k] -
                      m.prior_beta * m.nu[k] * m.w[k] * dm * dm) -
               0.5 * m.nu[k] * w0_inv * m.w[k];
    q_pi += (m.alpha[k] - 1.0) * lpi;
    const double entropy_lam = -log_b(m.w[k], m.nu[k]) - 0.5 * (m.nu[k] - 2.0) * llam + 0.5 * m.nu[k];
    q_mulam += 0.5 * llam + 0.5 * (std::log(m.beta[k]) - kLog2Pi) - 0.5 - entropy_lam;
  }
  const double kd = static_cast<double>(kc);
  const double log_c0 = std::lgamma(kd * m.prior_alpha) - kd * std::lgamma(m.prior_alpha);
  double log_c = std::lgamma(alpha_sum);
  for (std::size_t k = 0; k < kc; ++k) log_c -= std::lgamma(m.alpha[k]);

  e_pi = log_c0 + (m.prior_alpha - 1.0) * sum_lpi;
  e_mulam += kd * log_b(w0, m.prior_nu) + 0.5 * (m.prior_nu - 2.0) * sum_llam;
  q_pi += log_c;

  double q_z = 0.0;
  for (double v : r)
    if (v > 0.0) q_z += v * std::log(v);

  return e_lik + e_z + e_pi + e_mulam - q_z - q_pi - q_mulam;
}

struct CaviResult {
  std::vector<double> trace;
  std::vector<double> responsibilities;
  int iterations = 0;
  bool converged = false;
};

// Coordinate ascent from the given responsibilities until the relative bound
// change drops below tol. `m` holds the final q; the returned responsibilities
// are those that produced it.
CaviResult run_cavi(VbGmmModel& m, std::span<const double> x, std::vector<double> r, const VbGmmConfig& config) {
  const std::size_t kc = m.components();
  CaviResult out;
  double prev = -std::numeric_limits<double>::infinity();
  std::vector<double> next(r.size());
  for (int it = 0; it < config.max_iter; ++it) {
    const Stats st = suff_stats(x, r, kc);
    m_step(m, st);
    const double bound = elbo(m, st, r);
    out.trace.push_back(bound);
    out.iterations = it + 1;
    if (it > 0 && std::abs(bound - prev) < config.tol * std::abs(bound)) {
      out.converged = true;
      break;
    }
    prev = bound;
    e_step(m, x, next);
    std::swap(r, next);
  }
  out.responsibilities = std::move(r);
  return out;
}

VbGmmModel make_degenerate(double value, const VbGmmConfig& config, std::uint64_t seed) {
  VbGmmModel m;
  m.config = config;
  m.seed = seed;
  m.degenerate = true;
  m.converged = true;
  m.weights = {1.0};
  m.means = {value};
  const double spread = 1e-6 * std::max(1.0, std::abs(value));
  m.precisions = {1.0 / (spread * spread)};
  m.alpha = {config.priors.dirichlet_concentration + 1.0};
  m.beta = {config.priors.mean_precision + 1.0};
  m.nu = {config.priors.degrees_of_freedom + 1.0};
  m.w = {m.precisions[0] / m.nu[0]};
  m.prior_alpha = config.priors.dirichlet_concentration;
  m.prior_beta = config.priors.mean_precision;
  m.prior_mean = config.priors.mean.value_or(value);
  m.prior_nu = config.priors.degrees_of_freedom;
  m.prior_scale = config.priors.scale.value_or(0.0);
  return m;
}

}  // namespace

std::vector<std::size_t> VbGmmModel::active_components(double weight_floor) const {
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < weights.size(); ++k)
    if (weights[k] >= weight_floor) idx.push_back(k);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return means[a] < means[b]; });
  return idx;
}

std::size_t VbGmmModel::assign(double x, std::span<const std::size_t> among) const {
  if (among.empty()) throw InputError("no components to assign to");
  if (degenerate) return 0;
  const double alpha_sum = std::accumulate(alpha.begin(), alpha.end(), 0.0);
  std::size_t best = 0;
  double best_v = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < among.size(); ++j) {
    const std::size_t k = among[j];
    const double v = log_rho(*this, k, x, log_pi_tilde(*this, k, alpha_sum), log_lambda_tilde(*this, k));
    if (v > best_v) {
      best_v = v;
      best = j;
    }
  }
  return best;
}

VbGmmModel fit_vbgmm(std::span<const double> samples, const VbGmmConfig& config, std::uint64_t seed) {
  if (config.max_components < 1) throw InputError("max_components must be >= 1");
  if (samples.empty()) throw InputError("cannot fit a mixture to zero samples");
  for (double v : samples)
    if (!std::isfinite(v)) throw InputError("non-finite sample in mixture fit");

  const std::size_t n = samples.size();
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(n);
  double var = 0.0;
  for (double v : samples) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
  if (*mn == *mx) return make_degenerate(*mn, config, seed);

  const std::size_t kc = static_cast<std::size_t>(config.max_components);
  VbGmmModel m;
  m.config = config;
  m.seed = seed;
  m.prior_alpha = config.priors.dirichlet_concentration;
  m.prior_beta = config.priors.mean_precision;
  m.prior_nu = config.priors.degrees_of_freedom;
  m.prior_mean = config.priors.mean.value_or(mean);
  m.prior_scale = config.priors.scale.value_or(config.priors.degrees_of_freedom * var);
  if (!(m.prior_alpha > 0.0 && m.prior_beta > 0.0 && m.prior_nu > 0.0 && m.prior_scale > 0.0))
    throw InputError("mixture priors must be positive");
  m.weights.assign(kc, 0.0);
  m.means.assign(kc, 0.0);
  m.precisions.assign(kc, 0.0);
  m.alpha.assign(kc, 0.0);
  m.beta.assign(kc, 0.0);
  m.nu.assign(kc, 0.0);
  m.w.assign(kc, 0.0);

  // Initial centres at spread quantiles plus a small seeded jitter; each
  // sample starts hard-assigned to its nearest centre.
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double sd = std::sqrt(var);
  Rng rng(seed);
  std::vector<double> centres(kc);
  for (std::size_t k = 0; k < kc; ++k) {
    const double q = (static_cast<double>(k) + 0.5) / static_cast<double>(kc);
    const auto pos = std::min(n - 1, static_cast<std::size_t>(q * static_cast<double>(n)));
    centres[k] = sorted[pos] + 1e-3 * sd * rng.normal();
  }
  std::vector<double> r(n * kc, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < kc; ++k)
      if (std::abs(samples[i] - centres[k]) < std::abs(samples[i] - centres[best])) best = k;
    r[i * kc + best] = 1.0;
  }

  CaviResult run = run_cavi(m, samples, r, config);
  m.elbo_trace = run.trace;
  m.iterations = run.iterations;
  m.converged = run.converged;

  // Mean-field updates leave a single mode split across several overlapping
  // components for a long time. Greedily merge neighbouring components
  // (by mean) and keep a merge whenever the refit bound is higher. The
  // component count stays fixed, so bounds are comparable across proposals.
  double bound = m.elbo_trace.back();
  bool merged = true;
  while (merged) {
    merged = false;
    const auto order = m.active_components(kMergeFloor);
    for (std::size_t j = 0; j + 1 < order.size(); ++j) {
      const std::size_t keep = order[j], drop = order[j + 1];
      std::vector<double> proposal = run.responsibilities;
      for (std::size_t i = 0; i < n; ++i) {
        proposal[i * kc + keep] += proposal[i * kc + drop];
        proposal[i * kc + drop] = 0.0;
      }
      VbGmmModel candidate = m;
      CaviResult refit = run_cavi(candidate, samples, proposal, config);
      if (refit.trace.back() > bound + std::abs(bound) * 1e-12) {
        m = std::move(candidate);
        m.elbo_trace.push_back(refit.trace.back());
        m.iterations += refit.iterations;
        m.converged = refit.converged;
        bound = refit.trace.back();
        run = std::move(refit);
        merged = true;
        break;
      }
    }
  }
  return m;
}
std::size_t effective_components(const VbGmmModel& model, double weight_floor) {
  return model.active_components(weight_floor).size();
}

std::string to_json(const VbGmmModel& m) {
  nlohmann::json j;
  j["weights"] = m.weights;
  j["means"] = m.means;
  j["precisions"] = m.precisions;
  j["hyperparameters"] = {{"alpha", m.alpha}, {"beta", m.beta}, {"nu", m.nu}, {"w", m.w}};
  j["priors"] = {{"dirichlet_concentration", m.prior_alpha},
                 {"mean_precision", m.prior_beta},
                 {"mean", m.prior_mean},
                 {"degrees_of_freedom", m.prior_nu},
                 {"scale", m.prior_scale}};
  j["config"] = {{"max_components", m.config.max_components},
                 {"tol", m.config.tol},
                 {"max_iter", m.config.max_iter}};
  j["elbo_trace"] = m.elbo_trace;
  j["iterations"] = m.iterations;
  j["converged"] = m.converged;
  j["degenerate"] = m.degenerate;
  j["seed"] = m.seed;
  return j.dump();
}

VbGmmModel vbgmm_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    VbGmmModel m;
    j.at("weights").get_to(m.weights);
    j.at("means").get_to(m.means);
    j.at("precisions").get_to(m.precisions);
    const auto& h = j.at("hyperparameters");
    h.at("alpha").get_to(m.alpha);
    h.at("beta").get_to(m.beta);
    h.at("nu").get_to(m.nu);
    h.at("w").get_to(m.w);
    const auto& p = j.at("priors");
    m.prior_alpha = p.at("dirichlet_concentration");
    m.prior_beta = p.at("mean_precision");
    m.prior_mean = p.at("mean");
    m.prior_nu = p.at("degrees_of_freedom");
    m.prior_scale = p.at("scale");
    const auto& c = j.at("config");
    m.config.max_components = c.at("max_components");
    m.config.tol = c.at("tol");
    m.config.max_iter = c.at("max_iter");
    m.config.priors.dirichlet_concentration = m.prior_alpha;
    m.config.priors.mean_precision = m.prior_beta;
    m.config.priors.degrees_of_freedom = m.prior_nu;
    j.at("elbo_trace").get_to(m.elbo_trace);
    m.iterations = j.at("iterations");
    m.converged = j.at("converged");
    m.degenerate = j.at("degenerate");
    m.seed = j.at("seed");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("invalid mixture model JSON: ") + e.what());
  }
}

}  // namespace deskzone
