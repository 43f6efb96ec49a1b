#include <algorithm>
#include <cmath>

#include "marginlab/geom.hpp"

namespace marginlab {

namespace {

// Dense two-phase simplex on max c.x s.t. Ax <= b, x >= 0, following the
// classic contest-codebook tableau scheme. Entering and leaving variables are
// chosen with (value, variable id) pair comparisons, so ties always resolve to
// the lowest index and runs are deterministic. An iteration cap guards the
// (rare) cycling case.
struct Simplex {
  static constexpr double EPS = tol::feasibility;
  int m, n;
  std::vector<int> N, B;
  std::vector<std::vector<double>> D;
  long pivots = 0, cap;

  Simplex(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
          const std::vector<double>& c)
      : m(static_cast<int>(b.size())), n(static_cast<int>(c.size())),
        N(n + 1), B(m), D(m + 2, std::vector<double>(n + 2, 0.0)),
        cap(20000 + 200L * (m + n)) {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) D[i][j] = A[i][j];
    for (int i = 0; i < m; ++i) {
      B[i] = n + i;
      D[i][n] = -1.0;
      D[i][n + 1] = b[i];
    }
    for (int j = 0; j < n; ++j) {
      N[j] = j;
      D[m][j] = -c[j];
    }
    N[n] = -1;
    D[m + 1][n] = 1.0;
  }

  void pivot(int r, int s) {
    ++pivots;
    auto& Dr = D[r];
    const double inv = 1.0 / Dr[s];
    for (int i = 0; i < m + 2; ++i) {
      if (i == r || std::abs(D[i][s]) <= 1e-14) continue;
      auto& Di = D[i];
      const double coef = Di[s] * inv;
      for (int j = 0; j < n + 2; ++j) Di[j] -= Dr[j] * coef;
      Di[s] = -coef;  // column of the leaving variable
    }
    for (int j = 0; j < n + 2; ++j)
      if (j != s) Dr[j] *= inv;
    Dr[s] = inv;
    std::swap(B[r], N[s]);
  }

  // phase 1 drives the artificial variable out, phase 2 optimizes. Returns
  // false on unboundedness, throws nothing; pivot cap turns into a flag.
  bool run(int phase, bool& capped) {
    const int x = m + phase - 1;
    for (;;) {
      if (pivots > cap) { capped = true; return true; }
      int s = -1;
      for (int j = 0; j <= n; ++j) {
        if (N[j] == -phase) continue;
        if (s == -1 || std::make_pair(D[x][j], N[j]) < std::make_pair(D[x][s], N[s])) s = j;
      }
      if (D[x][s] >= -EPS) return true;
      int r = -1;
      for (int i = 0; i < m; ++i) {
        if (D[i][s] <= EPS) continue;
        if (r == -1 || std::make_pair(D[i][n + 1] / D[i][s], B[i]) <
                           std::make_pair(D[r][n + 1] / D[r][s], B[r]))
          r = i;
      }
      if (r == -1) return false;
      pivot(r, s);
    }
  }

  // Returns status in LpResult terms; fills x (length n) on success.
  LpResult::Status solve(std::vector<double>& x, double& value) {
    bool capped = false;
    int r = 0;
    for (int i = 1; i < m; ++i)
      if (D[i][n + 1] < D[r][n + 1]) r = i;
    if (m > 0 && D[r][n + 1] < -EPS) {
      pivot(r, n);
      if (!run(2, capped) || D[m + 1][n + 1] < -EPS) return LpResult::Infeasible;
      if (capped) return LpResult::NumericalFailure;
      for (int i = 0; i < m; ++i)
        if (B[i] == -1) {
          int s = 0;
          for (int j = 1; j <= n; ++j)
            if (std::make_pair(D[i][j], N[j]) < std::make_pair(D[i][s], N[s])) s = j;
          pivot(i, s);
        }
    }
    const bool bounded = run(1, capped);
    if (capped) return LpResult::NumericalFailure;
    x.assign(n, 0.0);
    for (int i = 0; i < m; ++i)
      if (B[i] < n) x[B[i]] = D[i][n + 1];
    value = D[m][n + 1];
    return bounded ? LpResult::Feasible : LpResult::Unbounded;
  }
};

}  // namespace

LpResult solve_linear_program(int dim, const std::vector<LinearConstraint>& constraints,
                              const std::optional<Vec>& objective) {
  if (dim < 1) throw invalid_input("solve_linear_program: dim must be >= 1");
  for (const auto& con : constraints)
    if (con.a.size() != dim) throw invalid_input("solve_linear_program: constraint size mismatch");
  if (objective && objective->size() != dim)
    throw invalid_input("solve_linear_program: objective size mismatch");

  // Standard form: x = u - v with u, v >= 0; a.x >= c becomes -a.x <= -c;
  // equalities become two inequalities. Rows are rescaled to unit max entry,
  // which keeps the pivot tolerance meaningful for badly scaled inputs.
  std::vector<std::vector<double>> A;
  std::vector<double> b;
  auto add_le_row = [&](const Vec& a, double c) {
    double scale = std::abs(c);
    for (int j = 0; j < dim; ++j) scale = std::max(scale, std::abs(a[j]));
    if (scale <= 0.0) scale = 1.0;
    std::vector<double> row(2 * dim);
    for (int j = 0; j < dim; ++j) {
      row[j] = a[j] / scale;
      row[dim + j] = -a[j] / scale;
    }
    A.push_back(std::move(row));
    b.push_back(c / scale);
  };
  for (const auto& con : constraints) {
    add_le_row(-con.a, -con.c);
    if (con.rel == LinearConstraint::Eq) add_le_row(con.a, con.c);
  }

  std::vector<double> c(2 * dim, 0.0);
  if (objective)
    for (int j = 0; j < dim; ++j) {
      c[j] = (*objective)[j];
      c[dim + j] = -(*objective)[j];
    }

  Simplex solver(A, b, c);
  std::vector<double> raw;
  double value = 0.0;
  LpResult out;
  out.status = solver.solve(raw, value);
  if (out.status == LpResult::Feasible || out.status == LpResult::Unbounded) {
    out.x = Vec::Zero(dim);
    if (out.status == LpResult::Feasible)
      for (int j = 0; j < dim; ++j) out.x[j] = raw[j] - raw[dim + j];
    out.value = value;
  }
  return out;
}

Hemisphere in_common_hemisphere(const std::vector<Vec>& Z) {
  if (Z.empty()) throw invalid_input("in_common_hemisphere: empty input");
  const int d = static_cast<int>(Z.front().size());
  std::vector<LinearConstraint> cons;
  cons.reserve(Z.size());
  for (const auto& z : Z) {
    if (z.size() != d) throw invalid_input("in_common_hemisphere: dimension mismatch");
    const double nrm = z.norm();
    if (nrm <= 0.0) return {false, Vec()};  // the origin is in no open hemisphere
    cons.push_back({z / nrm, 1.0, LinearConstraint::Ge});
  }
  const auto lp = solve_linear_program(d, cons);
  Hemisphere out;
  out.inside = lp.status == LpResult::Feasible;
  if (out.inside) out.direction = lp.x / lp.x.norm();
  return out;
}

}  // namespace marginlab
