#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "eigenform/errors.hpp"
#include "eigenform/linalg.hpp"
#include "eigenform/pairs.hpp"
#include "eigenform/tolerances.hpp"

namespace eigenform {

// Energy E(u) = sum over pairs of E_d (u_{j1} - u_{j2})^2, stored as the
// coefficient vector E_d in lexicographic pair order. Membership in the
// nonnegative cone is a predicate, not a constructor invariant: trace
// extraction legitimately produces tiny negatives that callers inspect.
struct DirichletForm {
  int n_boundary = 0;
  Eigen::VectorXd coeffs;
};

inline DirichletForm make_form(int n_boundary, Eigen::VectorXd coeffs) {
  if (coeffs.size() != pair_count(n_boundary))
    throw DimensionError("form: coefficient count must be n(n-1)/2");
  for (int d = 0; d < coeffs.size(); ++d)
    if (!std::isfinite(coeffs(d)))
      throw DimensionError("form: coefficients must be finite");
  return DirichletForm{n_boundary, std::move(coeffs)};
}

inline DirichletForm make_form(int n_boundary, const std::vector<double>& c) {
  return make_form(n_boundary,
                   Eigen::Map<const Eigen::VectorXd>(c.data(), c.size()));
}

// Barycenter of the coefficient simplex.
inline DirichletForm uniform_form(int n_boundary) {
  const int m = pair_count(n_boundary);
  return DirichletForm{n_boundary,
                       Eigen::VectorXd::Constant(m, 1.0 / double(m))};
}

// |E| = sum of coefficients, summed left to right so the value is a
// reproducible function of the stored bytes.
inline double norm1(const DirichletForm& e) {
  double s = 0.0;
  for (int d = 0; d < e.coeffs.size(); ++d) s += e.coeffs(d);
  return s;
}

inline bool in_D(const DirichletForm& e) {
  return (e.coeffs.array() >= 0.0).all();
}

struct QuadraticFormMatrix {
  Eigen::MatrixXd Q;
  int vertex_count() const { return static_cast<int>(Q.rows()); }
};

// Largest deviations from the three representation invariants; tests and
// sanity checks compare these against sym/psd tolerances.
struct FormMatrixDefects {
  double asymmetry = 0.0;
  double row_sum = 0.0;
  double negative_eigenvalue = 0.0;  // max(0, -lambda_min)
};

inline FormMatrixDefects form_matrix_defects(const QuadraticFormMatrix& q) {
  FormMatrixDefects d;
  d.asymmetry = (q.Q - q.Q.transpose()).cwiseAbs().maxCoeff();
  d.row_sum = q.Q.rowwise().sum().cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetrized(q.Q));
  d.negative_eigenvalue = std::max(0.0, -es.eigenvalues().minCoeff());
  return d;
}

inline double eval_form(const DirichletForm& e, const Eigen::VectorXd& u) {
  if (u.size() != e.n_boundary)
    throw DimensionError("eval_form: vector length must equal n_boundary");
  double s = 0.0;
  int d = 0;
  for (int i = 0; i < e.n_boundary; ++i)
    for (int j = i + 1; j < e.n_boundary; ++j, ++d) {
      const double diff = u(i) - u(j);
      s += e.coeffs(d) * diff * diff;
    }
  return s;
}

// Conductance-matrix encoding: off-diagonal (j1,j2) entry is -E_{{j1,j2}},
// diagonals make row sums vanish, and u' Q u reproduces eval_form.
inline QuadraticFormMatrix laplacian(const DirichletForm& e) {
  const int n = e.n_boundary;
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
  int d = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j, ++d) {
      const double w = e.coeffs(d);
      q(i, i) += w;
      q(j, j) += w;
      q(i, j) -= w;
      q(j, i) -= w;
    }
  return {std::move(q)};
}

// Recover coefficients from a black-box quadratic evaluator by polarization
// with indicator probes: E_{{j1,j2}} = (q(chi_j1 - chi_j2) - q(chi_j1 + chi_j2)) / 4.
// Nothing is clamped here; negative outputs are how trace extraction detects
// numerical trouble.
template <class Q>
DirichletForm coefficients_from_form(int n_boundary, Q&& q) {
  const int m = pair_count(n_boundary);
  Eigen::VectorXd c(m);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n_boundary);
  int d = 0;
  for (int i = 0; i < n_boundary; ++i)
    for (int j = i + 1; j < n_boundary; ++j, ++d) {
      u(i) = 1.0;
      u(j) = -1.0;
      const double diff_probe = q(u);
      u(j) = 1.0;
      const double sum_probe = q(u);
      u(i) = 0.0;
      u(j) = 0.0;
      c(d) = 0.25 * (diff_probe - sum_probe);
    }
  return DirichletForm{n_boundary, std::move(c)};
}

// Connected components of the graph whose edges carry coefficients above
// zero_tol. Components are listed by smallest member, members ascending.
inline std::vector<std::vector<int>> positivity_graph_components(
    const DirichletForm& e, double zero_tol = tol::zero) {
  const int n = e.n_boundary;
  std::vector<int> comp(n, -1);
  std::vector<std::vector<int>> out;
  for (int seed = 0; seed < n; ++seed) {
    if (comp[seed] >= 0) continue;
    const int id = static_cast<int>(out.size());
    out.push_back({});
    std::vector<int> stack{seed};
    comp[seed] = id;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      out[id].push_back(v);
      for (int w = 0; w < n; ++w) {
        if (comp[w] >= 0 || w == v) continue;
        const int d = pair_linear(n, std::min(v, w), std::max(v, w));
        if (e.coeffs(d) > zero_tol) {
          comp[w] = id;
          stack.push_back(w);
        }
      }
    }
    std::sort(out[id].begin(), out[id].end());
  }
  return out;
}

inline bool is_irreducible(const DirichletForm& e,
                           double zero_tol = tol::zero) {
  return positivity_graph_components(e, zero_tol).size() == 1;
}

// Orthonormal basis of E^{-1}(0): normalized indicator vectors of the
// positivity components (disjoint supports, hence already orthogonal).
inline Eigen::MatrixXd kernel_basis(const DirichletForm& e,
                                    double zero_tol = tol::zero) {
  const auto comps = positivity_graph_components(e, zero_tol);
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(e.n_boundary, comps.size());
  for (size_t c = 0; c < comps.size(); ++c) {
    const double v = 1.0 / std::sqrt(double(comps[c].size()));
    for (int vert : comps[c]) k(vert, static_cast<int>(c)) = v;
  }
  return k;
}

struct RayleighExtremals {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  Eigen::VectorXd argmin;
  Eigen::VectorXd argmax;
};

// Extremal generalized eigenvalues of the pencil (Q_num, Q_den) restricted to
// subspace intersected with the orthogonal complement of constants. The
// denominator must be positive definite there.
inline RayleighExtremals rayleigh_extremals(
    const Eigen::MatrixXd& q_num, const Eigen::MatrixXd& q_den,
    const Eigen::MatrixXd& subspace, double def_tol = tol::definiteness) {
  if (q_num.rows() != q_den.rows() || q_num.rows() != subspace.rows())
    throw DimensionError("rayleigh: dimension mismatch");
  const Eigen::MatrixXd t = intersect_constants_perp(subspace);
  if (t.cols() == 0)
    throw TrivialKernel("rayleigh: no non-constant directions in subspace");
  const Eigen::MatrixXd a = symmetrized(t.transpose() * q_num * t);
  const Eigen::MatrixXd b = symmetrized(t.transpose() * q_den * t);
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esb(b);
    const double bmax = esb.eigenvalues().cwiseAbs().maxCoeff();
    if (esb.eigenvalues().minCoeff() <= def_tol * std::max(bmax, 1.0))
      throw DenominatorDegenerate(
          "rayleigh: denominator degenerate on the subspace");
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(a, b);
  const int last = static_cast<int>(ges.eigenvalues().size()) - 1;
  RayleighExtremals r;
  r.min_ratio = ges.eigenvalues()(0);
  r.max_ratio = ges.eigenvalues()(last);
  r.argmin = t * ges.eigenvectors().col(0);
  r.argmax = t * ges.eigenvectors().col(last);
  return r;
}

inline std::pair<double, double> rayleigh_bounds(
    const QuadraticFormMatrix& q_num, const QuadraticFormMatrix& q_den,
    const Eigen::MatrixXd& subspace, double def_tol = tol::definiteness) {
  const RayleighExtremals r =
      rayleigh_extremals(q_num.Q, q_den.Q, subspace, def_tol);
  return {r.min_ratio, r.max_ratio};
}

// Sharp two-sided constants c E1 <= E2 <= c' E1 for irreducible forms.
inline std::pair<double, double> comparability(const DirichletForm& e1,
                                               const DirichletForm& e2) {
  if (e1.n_boundary != e2.n_boundary)
    throw DimensionError("comparability: mismatched n_boundary");
  if (!is_irreducible(e1) || !is_irreducible(e2))
    throw NotIrreducible("comparability: both forms must be irreducible");
  return rayleigh_bounds(laplacian(e2), laplacian(e1),
                         Eigen::MatrixXd::Identity(e1.n_boundary, e1.n_boundary));
}

// Scale to |E| = 1 with the left-to-right sum landing on 1.0 exactly. The
// rounding residue is absorbed into the largest coefficient: it is at least
// 1/#pairs, so the few-ulp correction cannot drive any coefficient negative
// (the last coefficient could be a true zero).
inline std::pair<double, DirichletForm> norm_and_normalize(
    const DirichletForm& e, double zero_tol = tol::zero) {
  const double s = norm1(e);
  if (!(s > zero_tol)) throw ZeroForm("norm_and_normalize: |E| is zero");
  Eigen::VectorXd c = e.coeffs / s;
  int amax = 0;
  c.maxCoeff(&amax);
  for (int round = 0; round < 8; ++round) {
    double s2 = 0.0;
    for (int d = 0; d < c.size(); ++d) s2 += c(d);
    if (s2 == 1.0) return {s, DirichletForm{e.n_boundary, std::move(c)}};
    c(amax) -= (s2 - 1.0);
  }
  // Entries after amax can round the correction away and leave the loop
  // cycling one ulp around 1.0. Close the sum at the right end instead: a
  // slot that would need a negative value has a true share below summation
  // noise, so it is zeroed and the slot before it absorbs the remainder.
  for (int j = static_cast<int>(c.size()) - 1; j >= 0; --j) {
    double prefix = 0.0;
    for (int d = 0; d < j; ++d) prefix += c(d);
    const double need = 1.0 - prefix;
    if (need < 0.0) {
      c(j) = 0.0;
      continue;
    }
    c(j) = need;
    for (int round = 0; round < 8 && prefix + c(j) != 1.0; ++round) {
      c(j) -= (prefix + c(j)) - 1.0;
      if (!(c(j) >= 0.0)) {
        c(j) = 0.0;
        break;
      }
    }
    if (prefix + c(j) == 1.0) break;
    if (c(j) != 0.0) break;
  }
  return {s, DirichletForm{e.n_boundary, std::move(c)}};
}

inline DirichletForm normalized(const DirichletForm& e,
                                double zero_tol = tol::zero) {
  return norm_and_normalize(e, zero_tol).second;
}

inline double min_coefficient(const DirichletForm& e) {
  return e.coeffs.minCoeff();
}

}  // namespace eigenform
