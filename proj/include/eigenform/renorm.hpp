#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "eigenform/errors.hpp"
#include "eigenform/forms.hpp"
#include "eigenform/linalg.hpp"
#include "eigenform/tolerances.hpp"
#include "eigenform/triples.hpp"

namespace eigenform {

// Positive weight per cell.
struct Weights {
  Eigen::VectorXd r;
  int n_cells() const { return static_cast<int>(r.size()); }
};

inline Weights make_weights(const std::vector<double>& r) {
  Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(r.data(), r.size());
  for (int i = 0; i < v.size(); ++i)
    if (!(v(i) > 0.0) || !std::isfinite(v(i)))
      throw DimensionError("weights must be positive finite reals");
  return Weights{std::move(v)};
}

inline void check_dimensions(const FractalTriple& t, const Weights& w,
                             const DirichletForm& e) {
  if (w.n_cells() != t.n_cells())
    throw DimensionError("weights: need one weight per cell");
  if (e.n_boundary != t.n_boundary)
    throw DimensionError("form: n_boundary does not match triple");
}

// Level-1 energy sum_i r_i E(v o psi_i) as a conductance matrix on all M
// vertices: each cell stamps a weighted copy of E on its image vertices.
inline QuadraticFormMatrix assemble_S1(const FractalTriple& t,
                                       const Weights& w,
                                       const DirichletForm& e) {
  check_dimensions(t, w, e);
  const int n = t.n_boundary;
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(t.n_total, t.n_total);
  for (int i = 0; i < t.n_cells(); ++i) {
    int d = 0;
    for (int j1 = 0; j1 < n; ++j1)
      for (int j2 = j1 + 1; j2 < n; ++j2, ++d) {
        const double c = w.r(i) * e.coeffs(d);
        const int a = t.cell_maps[i][j1];
        const int b = t.cell_maps[i][j2];
        q(a, a) += c;
        q(b, b) += c;
        q(a, b) -= c;
        q(b, a) -= c;
      }
  }
  return {std::move(q)};
}

// Minimize over interior vertex values with boundary values fixed. The
// interior block is singular exactly when the input is reducible; the
// pseudoinverse Schur complement still attains the infimum.
inline QuadraticFormMatrix trace_to_boundary(const QuadraticFormMatrix& q,
                                             const FractalTriple& t,
                                             double rank_cutoff = -1.0) {
  if (q.vertex_count() != t.n_total)
    throw DimensionError("trace: matrix order does not match n_total");
  return {schur_to_leading(q.Q, t.n_boundary, rank_cutoff)};
}

struct LambdaDetail {
  DirichletForm raw;      // polarization output before clamping
  DirichletForm clamped;  // coefficients in [-markov_tol, 0) snapped to 0
  QuadraticFormMatrix boundary;
};

inline LambdaDetail lambda_r_detail(const FractalTriple& t, const Weights& w,
                                    const DirichletForm& e,
                                    double markov_tol = tol::markov,
                                    double rank_cutoff = -1.0) {
  QuadraticFormMatrix s1 = assemble_S1(t, w, e);
  QuadraticFormMatrix b = trace_to_boundary(s1, t, rank_cutoff);
  DirichletForm raw = coefficients_from_form(
      t.n_boundary,
      [&b](const Eigen::VectorXd& u) { return u.dot(b.Q * u); });
  DirichletForm clamped = raw;
  for (int d = 0; d < raw.coeffs.size(); ++d) {
    if (raw.coeffs(d) < -markov_tol) {
      auto p = make_pair_index(t.n_boundary, d);
      std::ostringstream os;
      os << "trace produced coefficient " << raw.coeffs(d) << " on pair {"
         << p.j1 << "," << p.j2 << "}";
      throw MarkovViolation(os.str());
    }
    if (clamped.coeffs(d) < 0.0) clamped.coeffs(d) = 0.0;
  }
  return {std::move(raw), std::move(clamped), std::move(b)};
}

inline DirichletForm lambda_r(const FractalTriple& t, const Weights& w,
                              const DirichletForm& e,
                              double markov_tol = tol::markov,
                              double rank_cutoff = -1.0) {
  return lambda_r_detail(t, w, e, markov_tol, rank_cutoff).clamped;
}

// (|Lambda_r(E)|, Lambda_r(E)/|Lambda_r(E)|). Undefined where the image
// vanishes: that is the stratum the normalized map cannot be extended to.
inline std::pair<double, DirichletForm> normalized_lambda(
    const FractalTriple& t, const Weights& w, const DirichletForm& e,
    double image_zero_tol = tol::image_zero,
    double markov_tol = tol::markov) {
  DirichletForm l = lambda_r(t, w, e, markov_tol);
  const double scale = norm1(l);
  if (scale <= image_zero_tol)
    throw DegenerateImage("normalized_lambda: |Lambda_r(E)| is zero");
  return {scale, normalized(l)};
}

enum class Stratum { D1, D2, D3, D4 };

inline const char* stratum_name(Stratum s) {
  switch (s) {
    case Stratum::D1: return "D1";
    case Stratum::D2: return "D2";
    case Stratum::D3: return "D3";
    default: return "D4";
  }
}

struct BoundaryClass {
  Stratum stratum = Stratum::D1;
  std::vector<std::vector<int>> components;
  double image_norm = 0.0;       // |Lambda_r(E)|
  double min_coefficient = 0.0;
};

// Stratify the normalized simplex: interior (all coefficients positive),
// irreducible boundary, reducible with nonzero image, reducible with zero
// image. The D3/D4 split is evaluated at the supplied r; callers wanting the
// r-independence cross-check simply classify again at another r.
inline BoundaryClass classify(const FractalTriple& t, const Weights& w,
                              const DirichletForm& e,
                              double zero_tol = tol::zero,
                              double image_zero_tol = tol::image_zero) {
  check_dimensions(t, w, e);
  if (std::abs(norm1(e) - 1.0) > 1e-6)
    throw Error("classify expects a normalized form (|E| = 1)");
  BoundaryClass bc;
  bc.components = positivity_graph_components(e, zero_tol);
  bc.min_coefficient = min_coefficient(e);
  bc.image_norm = norm1(lambda_r(t, w, e));
  if (bc.components.size() == 1)
    bc.stratum = bc.min_coefficient > zero_tol ? Stratum::D1 : Stratum::D2;
  else
    bc.stratum = bc.image_norm > image_zero_tol ? Stratum::D3 : Stratum::D4;
  return bc;
}

namespace detail {

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(int a, int b) { parent_[find(a)] = find(b); }

 private:
  std::vector<int> parent_;
};

// Positivity components recovered from the supports of a kernel_basis output
// (normalized indicators with disjoint supports).
inline std::vector<std::vector<int>> components_from_kernel(
    const Eigen::MatrixXd& kernel) {
  const int n = static_cast<int>(kernel.rows());
  const int s = static_cast<int>(kernel.cols());
  std::vector<std::vector<int>> comps(s);
  std::vector<char> assigned(n, 0);
  for (int c = 0; c < s; ++c)
    for (int v = 0; v < n; ++v)
      if (std::abs(kernel(v, c)) > 1e-9) {
        if (assigned[v])
          throw DimensionError(
              "constrained_form: kernel columns must be disjoint indicators");
        assigned[v] = 1;
        comps[c].push_back(v);
      }
  for (int v = 0; v < n; ++v)
    if (!assigned[v])
      throw DimensionError(
          "constrained_form: kernel columns must cover the boundary");
  return comps;
}

}  // namespace detail

// The trace constrained to extensions whose every cell restriction lies in
// the kernel of a reference boundary form. Feasibility is not automatic: the
// per-cell constancy constraints can force distinct kernel components to
// share a value, so the form lives on an explicit feasible subspace and
// counts the infeasible dimensions (treated as +infinity directions).
struct ConstrainedForm {
  Eigen::MatrixXd kernel;    // the input basis, N x s
  Eigen::MatrixXd feasible;  // s x f, orthonormal, in kernel coordinates
  Eigen::MatrixXd form;      // f x f PSD matrix on feasible coordinates
  int infeasible_dimensions = 0;

  // Value at the kernel element with the given kernel coordinates; +infinity
  // off the feasible subspace.
  double value(const Eigen::VectorXd& kernel_coords,
               double feas_tol = 1e-10) const {
    if (kernel_coords.size() != feasible.rows())
      throw DimensionError("constrained value: coordinate length mismatch");
    const Eigen::VectorXd z = feasible.transpose() * kernel_coords;
    const Eigen::VectorXd resid = kernel_coords - feasible * z;
    if (resid.lpNorm<Eigen::Infinity>() >
        feas_tol * std::max(1.0, kernel_coords.lpNorm<Eigen::Infinity>()))
      return std::numeric_limits<double>::infinity();
    return z.dot(form * z);
  }

  // Value at a boundary function u already lying in the kernel span.
  double value_at(const Eigen::VectorXd& u, double feas_tol = 1e-10) const {
    return value(kernel.transpose() * u, feas_tol);
  }
};

inline ConstrainedForm constrained_form(const FractalTriple& t,
                                        const Weights& w,
                                        const DirichletForm& e,
                                        const Eigen::MatrixXd& kernel) {
  check_dimensions(t, w, e);
  if (kernel.rows() != t.n_boundary)
    throw DimensionError("constrained_form: kernel rows must equal n_boundary");
  const auto comps = detail::components_from_kernel(kernel);
  const int s = static_cast<int>(comps.size());
  const int m = t.n_total;

  // Constancy groups on level-1 vertices: in every cell the image of each
  // kernel component must be constant.
  detail::UnionFind uf(m);
  for (int i = 0; i < t.n_cells(); ++i)
    for (const auto& comp : comps)
      for (size_t v = 1; v < comp.size(); ++v)
        uf.unite(t.cell_maps[i][comp[0]], t.cell_maps[i][comp[v]]);

  std::vector<int> group_of(m, -1);
  std::vector<std::vector<int>> groups;
  for (int v = 0; v < m; ++v) {
    int root = uf.find(v);
    if (group_of[root] < 0) {
      group_of[root] = static_cast<int>(groups.size());
      groups.push_back({});
    }
    group_of[v] = group_of[root];
    groups[group_of[v]].push_back(v);
  }
  const int g = static_cast<int>(groups.size());

  // Components whose boundary vertices fall into a common group are forced to
  // share their value: merge them into meta-components.
  std::vector<int> comp_of_boundary(t.n_boundary, -1);
  for (int c = 0; c < s; ++c)
    for (int v : comps[c]) comp_of_boundary[v] = c;
  detail::UnionFind meta(s);
  for (const auto& grp : groups) {
    int first_comp = -1;
    for (int v : grp) {
      if (v >= t.n_boundary) continue;
      const int c = comp_of_boundary[v];
      if (first_comp < 0)
        first_comp = c;
      else
        meta.unite(first_comp, c);
    }
  }
  std::vector<int> meta_of(s, -1);
  std::vector<std::vector<int>> metas;
  for (int c = 0; c < s; ++c) {
    int root = meta.find(c);
    if (meta_of[root] < 0) {
      meta_of[root] = static_cast<int>(metas.size());
      metas.push_back({});
    }
    meta_of[c] = meta_of[root];
    metas[meta_of[c]].push_back(c);
  }
  const int f = static_cast<int>(metas.size());

  // Feasible directions in kernel coordinates: a kernel element u = K y has
  // value y_c / sqrt(|comp_c|) on component c, so "equal values within a
  // meta-component" makes the normalized per-meta indicator vectors below an
  // orthonormal basis.
  Eigen::MatrixXd feas = Eigen::MatrixXd::Zero(s, f);
  std::vector<double> meta_sizes(f, 0.0);
  for (int mm = 0; mm < f; ++mm)
    for (int c : metas[mm]) meta_sizes[mm] += double(comps[c].size());
  for (int c = 0; c < s; ++c) {
    const int mm = meta_of[c];
    feas(c, mm) = std::sqrt(double(comps[c].size()) / meta_sizes[mm]);
  }

  // Reduce the level-1 energy to one variable per constancy group, pin the
  // groups containing boundary vertices, minimize over the rest.
  const QuadraticFormMatrix s1 = assemble_S1(t, w, e);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(m, g);
  for (int v = 0; v < m; ++v) p(v, group_of[v]) = 1.0;
  Eigen::MatrixXd qg = symmetrized(p.transpose() * s1.Q * p);

  std::vector<int> pinned, free_groups;
  std::vector<int> meta_of_group(g, -1);
  for (int gi = 0; gi < g; ++gi) {
    int bv = -1;
    for (int v : groups[gi])
      if (v < t.n_boundary) {
        bv = v;
        break;
      }
    if (bv >= 0) {
      pinned.push_back(gi);
      meta_of_group[gi] = meta_of[comp_of_boundary[bv]];
    } else {
      free_groups.push_back(gi);
    }
  }
  const int np = static_cast<int>(pinned.size());
  const int nf = static_cast<int>(free_groups.size());
  Eigen::MatrixXd perm = Eigen::MatrixXd::Zero(g, np + nf);
  for (int a = 0; a < np; ++a) perm(pinned[a], a) = 1.0;
  for (int b = 0; b < nf; ++b) perm(free_groups[b], np + b) = 1.0;
  Eigen::MatrixXd q_ord = perm.transpose() * qg * perm;
  Eigen::MatrixXd reduced = schur_to_leading(q_ord, np);

  // Pinned group values in terms of feasible coordinates z: the group's meta
  // value is z_m / sqrt(meta size).
  Eigen::MatrixXd lift = Eigen::MatrixXd::Zero(np, f);
  for (int a = 0; a < np; ++a) {
    const int mm = meta_of_group[pinned[a]];
    lift(a, mm) = 1.0 / std::sqrt(meta_sizes[mm]);
  }

  ConstrainedForm cf;
  cf.kernel = kernel;
  cf.feasible = std::move(feas);
  cf.form = symmetrized(lift.transpose() * reduced * lift);
  cf.infeasible_dimensions = s - f;
  return cf;
}

struct EtaExtremals {
  double eta_max = 0.0;  // the maximum of E / E_ref over non-constant kernel
  double eta_min = 0.0;  // directions; the minimum is what a lower bound needs
  Eigen::VectorXd maximizer;
};

// Extremal ratios of E against an irreducible reference over the non-constant
// part of a kernel. Both extremes are exposed because the two natural
// readings of the ratio bound disagree; eta() names the maximum.
inline EtaExtremals eta_extremals(const DirichletForm& e,
                                  const DirichletForm& e_ref,
                                  const Eigen::MatrixXd& kernel) {
  if (e.n_boundary != e_ref.n_boundary ||
      kernel.rows() != e.n_boundary)
    throw DimensionError("eta: dimension mismatch");
  if (kernel.cols() < 2)
    throw TrivialKernel("eta: kernel holds only constants");
  if (!is_irreducible(e_ref))
    throw NotIrreducible("eta: reference form must be irreducible");
  RayleighExtremals r =
      rayleigh_extremals(laplacian(e).Q, laplacian(e_ref).Q, kernel);
  return {r.max_ratio, r.min_ratio, r.argmax};
}

inline double eta(const DirichletForm& e, const DirichletForm& e_ref,
                  const Eigen::MatrixXd& kernel) {
  return eta_extremals(e, e_ref, kernel).eta_max;
}

}  // namespace eigenform
