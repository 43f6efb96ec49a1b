#pragma once

#include <cstdint>
#include <random>

#include "marginlab/common.hpp"

namespace marginlab {

// Deterministic stream family. A (seed, stream) pair is mixed through
// splitmix64 into a single 64-bit state that seeds a mt19937_64, whose output
// is specified bit-exactly by the standard, so sequences agree across
// platforms and thread counts. Gaussian variates use the Marsaglia polar
// method (fixed choice; std::normal_distribution is implementation-defined).
class SeededStream {
 public:
  explicit SeededStream(std::uint64_t seed, std::uint64_t stream = 0);

  // Independent stream derived from this stream's identity; used to give each
  // trial / each augmentation source its own generator.
  SeededStream child(std::uint64_t index) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  double uniform();                       // [0, 1)
  double uniform(double lo, double hi);   // [lo, hi)
  std::uint64_t bits();
  double gaussian();

  // Uniform point on the sphere of radius r in dimension d: d gaussians
  // normalized to norm exactly r. d = 1 degenerates to +-r.
  Vec sphere(int d, double r);

 private:
  std::uint64_t seed_, stream_;
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

// Fraction of the unit sphere S^{d-1} with first coordinate >= eps, i.e. the
// probability that a uniform point z on a radius-gamma sphere has
// <a, z> >= eps * gamma for a fixed unit vector a.  Evaluated as
//   int_0^{arccos eps} sin^{d-2} t dt / int_0^pi sin^{d-2} t dt
// by adaptive Simpson quadrature (the substitution keeps the integrand smooth
// for every d >= 2, including the d = 2 endpoint singularity in the
// algebraic form).
double cap_fraction(int d, double eps);

// Probability that N i.i.d. uniform points on S^{d-1} lie in a common open
// hemisphere: 2^{1-N} * sum_{k=0}^{d-1} C(N-1, k). Evaluated in log space so
// N up to 1e4 is fine; returns exactly 1 when N <= d.
double wendel_probability(int d, int N);

}  // namespace marginlab
