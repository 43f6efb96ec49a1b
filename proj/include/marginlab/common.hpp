#pragma once

#include <Eigen/Dense>
#include <charconv>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace marginlab {

using Vec = Eigen::VectorXd;

// Central tolerance table. Every comparison in the library goes through these
// so that a tolerance change is a one-line edit.
namespace tol {
inline constexpr double feasibility = 1e-9;   // LP pivoting / constraint slack
inline constexpr double distance = 1e-8;      // geometric distances treated as zero
inline constexpr double duality_gap = 1e-10;  // Frank-Wolfe style convergence
// Region membership: the projection solver resolves a hull boundary only to
// about sqrt(duality_gap) in distance, so membership cannot use a tighter cut.
inline constexpr double membership = 1e-6;
inline constexpr double cap_quadrature = 1e-12;
inline constexpr double support_slack = 1e-9; // min-ball support point slack

// Combined absolute + relative comparison used by certification code.
inline bool ge(double a, double b, double scale = 1.0) {
  return a >= b - distance * std::max(1.0, std::abs(scale));
}
}  // namespace tol

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct invalid_input : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shortest round-trip decimal form; used by every writer so that reruns of the
// same build produce byte-identical files.
inline std::string format_double(double v) {
  char buf[40];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("format_double");
  return std::string(buf, end);
}

inline double sq(double x) { return x * x; }

// File helpers shared by the dataset / report writers.  Writes go through a
// temp file + rename so a crash never leaves a half-written output behind.
void atomic_write_text(const std::string& path, const std::string& body);
std::string read_text_file(const std::string& path);

}  // namespace marginlab
