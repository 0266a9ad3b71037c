#include "nashnewton/rates.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>

namespace nashnewton {

const char* to_string(RateEstimate::Class c) {
  switch (c) {
    case RateEstimate::Class::Quadratic: return "Quadratic";
    case RateEstimate::Class::Superlinear: return "Superlinear";
    case RateEstimate::Class::Linear: return "Linear";
    case RateEstimate::Class::Inconclusive: return "Inconclusive";
  }
  return "Unknown";
}

RateEstimate estimate_q_rate(const std::vector<double>& errors) {
  std::vector<double> e;
  for (double x : errors) {
    if (!(x > kErrorFloor) || !std::isfinite(x)) break;
    e.push_back(x);
  }
  if (e.size() < 4)
    throw EstimationError(EstimationError::Kind::TooFewPoints,
                          "rate estimate needs at least 4 errors above the floor, got " +
                              std::to_string(e.size()));
  RateEstimate est;
  for (std::size_t k = 0; k + 1 < e.size(); ++k) {
    est.quadratic_ratios.push_back(e[k + 1] / (e[k] * e[k]));
    est.linear_ratios.push_back(e[k + 1] / e[k]);
  }
  const std::size_t m = est.quadratic_ratios.size();
  const std::size_t tail = std::min<std::size_t>(3, m);
  est.tail_max = *std::max_element(est.quadratic_ratios.end() - tail,
                                   est.quadratic_ratios.end());

  // Empirical order from the last three usable errors.
  const std::size_t n = e.size();
  const double num = std::log(e[n - 1] / e[n - 2]);
  const double den = std::log(e[n - 2] / e[n - 3]);
  const double order = den != 0.0 ? num / den : 0.0;
  const double last_linear = est.linear_ratios.back();

  if (last_linear < 1.0 && std::isfinite(est.tail_max) && order >= 1.8) {
    est.classification = RateEstimate::Class::Quadratic;
  } else if (last_linear < 1.0 && order > 1.1) {
    est.classification = RateEstimate::Class::Superlinear;
  } else {
    const auto lo = *std::min_element(est.linear_ratios.end() - tail, est.linear_ratios.end());
    const auto hi = *std::max_element(est.linear_ratios.end() - tail, est.linear_ratios.end());
    if (hi < 1.0 && lo > 0.0 && hi <= 1.5 * lo)
      est.classification = RateEstimate::Class::Linear;
  }
  return est;
}

RateEstimate estimate_q_rate(const IterateTrace& trace) {
  if (!trace.error_to_ref)
    throw EstimationError(EstimationError::Kind::TooFewPoints,
                          "trace has no error-to-reference column");
  return estimate_q_rate(*trace.error_to_ref);
}

std::vector<IssSample> iss_samples(const IterateTrace& trace, int skip) {
  if (!trace.error_to_ref)
    throw EstimationError(EstimationError::Kind::TooFewPoints,
                          "trace has no error-to-reference column");
  const auto& err = *trace.error_to_ref;
  std::vector<IssSample> out;
  for (int k = std::max(0, skip); k + 1 < static_cast<int>(err.size()); ++k)
    out.push_back({err[k], err[k + 1], trace.perturbation_norm(k)});
  return out;
}

double slack_needed(double observed, double bound) {
  if (observed <= 0.0) return 0.0;
  if (bound <= 0.0) return std::numeric_limits<double>::infinity();
  return observed / bound;
}

IssFit estimate_iss_constants(const std::vector<IssSample>& samples,
                              IssModel model, double slack) {
  const int n = static_cast<int>(samples.size());
  if (n < 30)
    throw EstimationError(EstimationError::Kind::TooFewPoints,
                          "ISS fit needs at least 30 transitions, got " +
                              std::to_string(n));
  const bool any_v = std::any_of(samples.begin(), samples.end(),
                                 [](const IssSample& s) { return s.v > 0.0; });
  if (!any_v)
    throw EstimationError(EstimationError::Kind::DegenerateFit,
                          "all disturbances are zero; L_v is not identifiable");

  const int p = model == IssModel::Linear ? 1 : 2;
  Matrix X(n, 2);
  Vector y(n);
  for (int k = 0; k < n; ++k) {
    X(k, 0) = std::pow(samples[k].e, p);
    X(k, 1) = samples[k].v;
    y(k) = samples[k].e_next;
  }
  const Vector coef = X.colPivHouseholderQr().solve(y);

  IssFit fit;
  fit.model = model;
  fit.L_a = coef(0);
  fit.L_v = coef(1);
  fit.samples = n;
  fit.slack = slack;
  fit.fit_residual = std::sqrt((X * coef - y).squaredNorm() / n);
  for (int k = 0; k < n; ++k) {
    const double base = X.row(k).dot(coef);
    if (y(k) > slack * base) ++fit.violations;
    fit.required_slack = std::max(fit.required_slack, slack_needed(y(k), base));
  }
  fit.violation_fraction = static_cast<double>(fit.violations) / n;
  return fit;
}

}  // namespace nashnewton
