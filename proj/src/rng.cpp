#include "marginlab/rng.hpp"

#include <cmath>

namespace marginlab {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

SeededStream::SeededStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream),
      engine_(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL))) {}

SeededStream SeededStream::child(std::uint64_t index) const {
  return SeededStream(splitmix64(seed_ ^ splitmix64(stream_)), index + 1);
}

std::uint64_t SeededStream::bits() { return engine_(); }

double SeededStream::uniform() {
  // 53 random bits -> [0, 1)
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double SeededStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

double SeededStream::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double m = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * m;
  have_spare_ = true;
  return u * m;
}

Vec SeededStream::sphere(int d, double r) {
  if (d < 1) throw invalid_input("sphere: dimension must be >= 1");
  if (!(r > 0.0)) throw invalid_input("sphere: radius must be > 0");
  Vec g(d);
  double norm;
  do {
    for (int i = 0; i < d; ++i) g[i] = gaussian();
    norm = g.norm();
  } while (norm == 0.0);
  return g * (r / norm);
}

namespace {

double simpson(double (*f)(double, int), int d, double a, double b,
               double fa, double fm, double fb, double whole, double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm, d), frm = f(rm, d);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * eps)
    return left + right + (left + right - whole) / 15.0;
  return simpson(f, d, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
         simpson(f, d, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

double sin_pow(double t, int d) { return std::pow(std::sin(t), d - 2); }

double integrate_sin_pow(int d, double a, double b) {
  if (b <= a) return 0.0;
  const double fa = sin_pow(a, d), fb = sin_pow(b, d);
  const double fm = sin_pow(0.5 * (a + b), d);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson(sin_pow, d, a, b, fa, fm, fb, whole, tol::cap_quadrature, 48);
}

}  // namespace

double cap_fraction(int d, double eps) {
  if (d < 2) throw invalid_input("cap_fraction: d must be >= 2");
  if (eps < 0.0 || eps > 1.0) throw invalid_input("cap_fraction: eps must be in [0, 1]");
  if (eps == 1.0) return 0.0;
  const double theta = std::acos(eps);
  const double num = integrate_sin_pow(d, 0.0, theta);
  const double den = integrate_sin_pow(d, 0.0, M_PI);
  return num / den;
}

double wendel_probability(int d, int N) {
  if (d < 1 || N < 1) throw invalid_input("wendel_probability: d, N must be >= 1");
  if (N > 10000) throw invalid_input("wendel_probability: N too large");
  if (N <= d) return 1.0;
  const double log2 = std::log(2.0);
  double p = 0.0;
  for (int k = 0; k <= d - 1; ++k) {
    const double logC = std::lgamma(N) - std::lgamma(k + 1) - std::lgamma(N - k);
    p += std::exp(logC + (1.0 - N) * log2);
  }
  return p < 1.0 ? p : 1.0;
}

}  // namespace marginlab
