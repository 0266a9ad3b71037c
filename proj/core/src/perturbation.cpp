#include "nashnewton/perturbation.hpp"

#include <cmath>

namespace nashnewton {

bool PerturbationSpec::inactive() const {
  return mode == Mode::None || effective_magnitude() == 0.0;
}

double PerturbationSpec::effective_magnitude() const {
  if (distribution == Distribution::FixedVector)
    return fixed.size() ? fixed.norm() : 0.0;
  return magnitude;
}

void PerturbationSpec::validate() const {
  if (!std::isfinite(magnitude) || magnitude < 0.0)
    throw InputError("perturbation magnitude must be finite and nonnegative");
  if (distribution == Distribution::FixedVector && mode != Mode::None &&
      !fixed.allFinite())
    throw InputError("fixed perturbation vector must be finite");
}

const char* to_string(PerturbationSpec::Mode mode) {
  switch (mode) {
    case PerturbationSpec::Mode::None: return "none";
    case PerturbationSpec::Mode::AdditiveGradient: return "additive_gradient";
    case PerturbationSpec::Mode::AdditiveHessian: return "additive_hessian";
    case PerturbationSpec::Mode::ResidualInjection: return "residual_injection";
  }
  return "unknown";
}

Vector sample_uniform_ball(int dim, double radius, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vector v(dim);
  double nrm = 0.0;
  do {
    for (int k = 0; k < dim; ++k) v(k) = normal(rng);
    nrm = v.norm();
  } while (nrm == 0.0);
  const double r = radius * std::pow(unif(rng), 1.0 / dim);
  return v * (r / nrm);
}

PerturbationSource::PerturbationSource(const PerturbationSpec& spec, int length)
    : spec_(spec), length_(length), rng_(spec.seed) {
  spec_.validate();
  if (!spec_.inactive() &&
      spec_.distribution == PerturbationSpec::Distribution::FixedVector &&
      spec_.fixed.size() != length)
    throw InputError("fixed perturbation has length " +
                     std::to_string(spec_.fixed.size()) + ", expected " +
                     std::to_string(length));
}

Vector PerturbationSource::draw() {
  if (spec_.inactive()) return Vector::Zero(length_);
  if (spec_.distribution == PerturbationSpec::Distribution::FixedVector)
    return spec_.fixed;
  return sample_uniform_ball(length_, spec_.magnitude, rng_);
}

}  // namespace nashnewton
