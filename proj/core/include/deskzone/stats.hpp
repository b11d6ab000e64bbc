#pragma once

namespace deskzone::stats {

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

/// P(T <= t) for Student's t with `df` degrees of freedom.
double student_t_cdf(double t, double df);

/// Two-tailed p-value P(|T| >= |t|).
double student_t_two_tailed(double t, double df);

}  // namespace deskzone::stats
