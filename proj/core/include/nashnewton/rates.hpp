#pragma once

#include "nashnewton/trace.hpp"

#include <vector>

namespace nashnewton {

/// Errors at or below this level are treated as floating-point floor and
/// excluded from rate estimates.
inline constexpr double kErrorFloor = 1e-13;

struct RateEstimate {
  enum class Class { Quadratic, Superlinear, Linear, Inconclusive };

  Class classification = Class::Inconclusive;
  /// e_{k+1} / e_k^2 over consecutive usable errors.
  std::vector<double> quadratic_ratios;
  /// e_{k+1} / e_k over consecutive usable errors.
  std::vector<double> linear_ratios;
  /// Largest quadratic ratio over the last three usable pairs.
  double tail_max = 0.0;
};

const char* to_string(RateEstimate::Class c);

/// Classifies an error sequence. The usable prefix is the run of errors
/// above kErrorFloor; at least four are required (TooFewPoints otherwise).
RateEstimate estimate_q_rate(const std::vector<double>& errors);
RateEstimate estimate_q_rate(const IterateTrace& trace);

/// One transition (e_k, e_{k+1}, |v_k|) of a perturbed run.
struct IssSample {
  double e = 0.0;
  double e_next = 0.0;
  double v = 0.0;
};

/// Transitions of a trace that carries error_to_ref.
std::vector<IssSample> iss_samples(const IterateTrace& trace, int skip = 0);

enum class IssModel { Linear, Quadratic };

struct IssFit {
  IssModel model = IssModel::Linear;
  /// Coefficient of e_k (or e_k^2 for the quadratic model).
  double L_a = 0.0;
  double L_v = 0.0;
  /// Root-mean-square residual of the least-squares fit.
  double fit_residual = 0.0;
  /// Fraction of samples with e_next > slack (L_a e_k^p + L_v |v_k|).
  double violation_fraction = 0.0;
  int violations = 0;
  int samples = 0;
  double slack = 1.1;
  /// Smallest slack that would cover every sample (inf if a sample sits
  /// above a nonpositive fitted bound).
  double required_slack = 0.0;
};

/// Ratio observed / bound, with 0 for observed <= 0 and inf when a
/// positive observation meets a nonpositive bound.
double slack_needed(double observed, double bound);

/// Least-squares fit of e_{k+1} ~ L_a e_k^p + L_v |v_k| with p = 1 (Linear)
/// or p = 2 (Quadratic). Needs at least 30 samples (TooFewPoints) and a
/// nonzero disturbance somewhere (DegenerateFit).
IssFit estimate_iss_constants(const std::vector<IssSample>& samples,
                              IssModel model = IssModel::Linear,
                              double slack = 1.1);

}  // namespace nashnewton
