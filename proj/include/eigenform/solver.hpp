#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "eigenform/errors.hpp"
#include "eigenform/forms.hpp"
#include "eigenform/renorm.hpp"
#include "eigenform/tolerances.hpp"
#include "eigenform/triples.hpp"

namespace eigenform {

struct SolverConfig {
  double tol = 1e-13;           // sup-norm step threshold
  double residual_tol = 1e-10;  // eigen-residual threshold
  long long max_iter = 100000;
  std::optional<DirichletForm> start;  // default: barycenter
  double degeneracy_floor = 1e-13;
  double damping = 1.0;  // theta in (0,1]; 1 is the undamped map
};

inline void validate_config(const SolverConfig& c) {
  if (!(c.tol > 0.0) || !(c.residual_tol > 0.0) ||
      !(c.degeneracy_floor > 0.0))
    throw DimensionError("solver config: tolerances must be positive");
  if (c.max_iter < 1)
    throw DimensionError("solver config: max_iter must be >= 1");
  if (!(c.damping > 0.0) || c.damping > 1.0)
    throw DimensionError("solver config: damping must lie in (0,1]");
}

enum class SolveStatus { converged, max_iter, degenerating, degenerate_image };

inline const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iter: return "max_iter";
    case SolveStatus::degenerating: return "degenerating";
    default: return "degenerate_image";
  }
}

struct TrajectoryPoint {
  double scale = 0.0;            // |Lambda_r(E)| at this iterate
  double min_coefficient = 0.0;  // of the iterate itself
};

struct EigenformResult {
  DirichletForm form;       // last iterate, normalized
  double eigenvalue = 0.0;  // |Lambda_r| at that iterate
  double residual = std::numeric_limits<double>::infinity();
  long long iterations = 0;
  SolveStatus status = SolveStatus::max_iter;
  double min_coefficient = 0.0;
  std::vector<TrajectoryPoint> trajectory;  // last <= 1000 iterations
};

// Damped normalized fixed-point iteration E <- (1-theta) E + theta
// Lambda_r(E)/|Lambda_r(E)|. An iterate counts as converged only when its own
// eigen-residual is small AND the previous step was small; a small step with
// a bad residual keeps iterating, so non-convergence surfaces as max_iter
// with diagnostics instead of a silently wrong fixed point. The step size is
// seeded at zero so a start point that already satisfies the eigenvalue
// equation (the one-pair simplex, symmetric fixtures) converges at
// iteration 1.
inline EigenformResult solve_eigenform(const FractalTriple& t,
                                       const Weights& w,
                                       const SolverConfig& config = {}) {
  validate_config(config);
  EigenformResult res;
  DirichletForm e = config.start ? normalized(*config.start)
                                 : uniform_form(t.n_boundary);
  check_dimensions(t, w, e);

  double last_change = 0.0;
  int degenerate_run = 0;

  for (long long iter = 1; iter <= config.max_iter; ++iter) {
    res.iterations = iter;
    DirichletForm l = lambda_r(t, w, e);
    const double scale = norm1(l);
    const double min_e = min_coefficient(e);
    res.trajectory.push_back({scale, min_e});

    if (scale <= tol::image_zero) {
      res.status = SolveStatus::degenerate_image;
      res.form = e;
      res.eigenvalue = scale;
      res.residual = std::numeric_limits<double>::infinity();
      break;
    }

    double resid = 0.0;
    for (int d = 0; d < l.coeffs.size(); ++d)
      resid = std::max(resid, std::abs(l.coeffs(d) - scale * e.coeffs(d)));

    if (resid <= config.residual_tol && last_change <= config.tol) {
      res.status = SolveStatus::converged;
      res.form = e;
      res.eigenvalue = scale;
      res.residual = resid;
      break;
    }

    DirichletForm next = normalized(DirichletForm{
        t.n_boundary, (1.0 - config.damping) * e.coeffs +
                          config.damping * (l.coeffs / scale)});
    last_change = (next.coeffs - e.coeffs).lpNorm<Eigen::Infinity>();
    e = std::move(next);

    if (min_coefficient(e) < config.degeneracy_floor) {
      if (++degenerate_run >= 100) {
        res.status = SolveStatus::degenerating;
        res.form = e;
        res.eigenvalue = scale;
        res.residual = resid;
        break;
      }
    } else {
      degenerate_run = 0;
    }

    if (iter == config.max_iter) {
      res.status = SolveStatus::max_iter;
      res.form = e;
      res.eigenvalue = scale;
      res.residual = resid;
    }
  }

  res.min_coefficient = min_coefficient(res.form);
  if (res.trajectory.size() > 1000)
    res.trajectory.erase(res.trajectory.begin(),
                         res.trajectory.end() - 1000);
  return res;
}

enum class FormKind { eigenform, degenerate_eigenform, non_eigenform };

inline const char* form_kind_name(FormKind k) {
  switch (k) {
    case FormKind::eigenform: return "eigenform";
    case FormKind::degenerate_eigenform: return "degenerate_eigenform";
    default: return "non_eigenform";
  }
}

struct VerifyReport {
  double rho = 0.0;
  double residual = 0.0;
  Eigen::VectorXd lambda_coeffs;
  Eigen::VectorXd ratios;  // Lambda_d / E_d; NaN where E_d is (near) zero
  FormKind kind = FormKind::non_eigenform;
  bool reducible = false;
};

// Check the eigenvalue equation at a given form. With no rho supplied the
// natural candidate |Lambda(E)| / |E| is used. A small residual certifies an
// eigenform; reducible ones are the degenerate kind.
inline VerifyReport verify_eigenform(const FractalTriple& t, const Weights& w,
                                     const DirichletForm& e,
                                     std::optional<double> rho_opt = {},
                                     double residual_tol = 1e-10,
                                     double zero_tol = tol::zero) {
  check_dimensions(t, w, e);
  const double norm = norm1(e);
  if (!(norm > zero_tol)) throw ZeroForm("verify_eigenform: |E| is zero");
  VerifyReport rep;
  DirichletForm l = lambda_r(t, w, e);
  rep.lambda_coeffs = l.coeffs;
  rep.rho = rho_opt ? *rho_opt : norm1(l) / norm;
  rep.residual = 0.0;
  rep.ratios = Eigen::VectorXd::Constant(
      l.coeffs.size(), std::numeric_limits<double>::quiet_NaN());
  for (int d = 0; d < l.coeffs.size(); ++d) {
    rep.residual =
        std::max(rep.residual, std::abs(l.coeffs(d) - rep.rho * e.coeffs(d)));
    if (e.coeffs(d) > zero_tol * norm)
      rep.ratios(d) = l.coeffs(d) / e.coeffs(d);
  }
  rep.reducible = positivity_graph_components(e, zero_tol * norm).size() > 1;
  if (rep.residual <= residual_tol)
    rep.kind = rep.reducible ? FormKind::degenerate_eigenform
                             : FormKind::eigenform;
  else
    rep.kind = FormKind::non_eigenform;
  return rep;
}

struct RepulsingReport {
  double rho = 0.0;  // eigenvalue of the degenerate eigenform
  double mu = 0.0;   // min of constrained trace of the reference against the
                     // reference itself over non-constant kernel directions;
                     // +infinity when no such direction is feasible
  int infeasible_directions = 0;
  bool repulsing_nonstrict = false;  // mu >= rho - check_tol
  bool repulsing_strict = false;     // mu >= rho + check_tol
};

// The boundary-repulsion certificate: the kernel-constrained trace of an
// interior reference must dominate rho times the reference on the kernel.
// Only the strict verdict licenses the existence argument; both are reported.
inline RepulsingReport repulsing_check(const FractalTriple& t,
                                       const Weights& w,
                                       const DirichletForm& e_deg,
                                       const DirichletForm& e_ref,
                                       double check_tol = tol::check,
                                       double residual_tol = 1e-10) {
  check_dimensions(t, w, e_deg);
  check_dimensions(t, w, e_ref);
  VerifyReport vr = verify_eigenform(t, w, e_deg, {}, residual_tol);
  if (vr.kind != FormKind::degenerate_eigenform)
    throw NotDegenerateEigenform(
        "repulsing_check: the probed form is not a degenerate eigenform");
  BoundaryClass bc = classify(t, w, normalized(e_deg));
  if (bc.stratum != Stratum::D3)
    throw NotD3("repulsing_check: the degenerate eigenform is not in D3");
  if (!(min_coefficient(e_ref) > 0.0))
    throw NotInterior("repulsing_check: reference must be interior");

  RepulsingReport rep;
  rep.rho = vr.rho;
  const Eigen::MatrixXd kernel = kernel_basis(e_deg);
  const ConstrainedForm cf = constrained_form(t, w, e_ref, kernel);
  rep.infeasible_directions = cf.infeasible_dimensions;
  const Eigen::MatrixXd k_feas = kernel * cf.feasible;  // orthonormal columns
  if (k_feas.cols() < 2) {
    // only constants are feasible: the minimum ranges over an empty set
    rep.mu = std::numeric_limits<double>::infinity();
  } else {
    const Eigen::MatrixXd q_num =
        k_feas * cf.form * k_feas.transpose();
    RayleighExtremals r =
        rayleigh_extremals(q_num, laplacian(e_ref).Q, k_feas);
    rep.mu = r.min_ratio;
  }
  rep.repulsing_nonstrict = rep.mu >= rep.rho - check_tol;
  rep.repulsing_strict = rep.mu >= rep.rho + check_tol;
  return rep;
}

struct ExistenceReport {
  EigenformResult solve;
  std::string outcome;
  std::optional<DirichletForm> limit;
  std::optional<VerifyReport> limit_verify;
  std::optional<BoundaryClass> limit_class;
  std::optional<RepulsingReport> limit_repulsing;
  std::string narrative;
};

// Run the solver; when the trajectory degenerates toward the simplex
// boundary, try to identify the limiting boundary form (zero out coefficients
// below the degeneracy floor, renormalize) and diagnose it against the
// existence hypothesis. This inspects only what the trajectory exposes; it is
// not an enumeration of all degenerate eigenforms.
inline ExistenceReport existence_report(const FractalTriple& t,
                                        const Weights& w,
                                        const SolverConfig& config = {},
                                        double check_tol = tol::check) {
  ExistenceReport rep;
  rep.solve = solve_eigenform(t, w, config);
  std::ostringstream story;
  switch (rep.solve.status) {
    case SolveStatus::converged:
      rep.outcome = "eigenform";
      story << "eigenform found with eigenvalue " << rep.solve.eigenvalue
            << " after " << rep.solve.iterations << " iterations";
      break;
    case SolveStatus::degenerate_image:
      rep.outcome = "degenerate_image";
      story << "iteration reached a form with zero trace; the normalized map "
               "is undefined there";
      break;
    case SolveStatus::max_iter:
      rep.outcome = "inconclusive";
      story << "no convergence within " << config.max_iter
            << " iterations; last residual " << rep.solve.residual;
      break;
    case SolveStatus::degenerating: {
      Eigen::VectorXd c = rep.solve.form.coeffs;
      for (int d = 0; d < c.size(); ++d)
        if (c(d) < config.degeneracy_floor) c(d) = 0.0;
      story << "trajectory degenerates toward the simplex boundary";
      if (!(c.sum() > 0.0)) {
        rep.outcome = "inconclusive";
        story << "; every coefficient collapsed, no limit candidate";
        break;
      }
      DirichletForm limit = normalized(DirichletForm{t.n_boundary, c});
      rep.limit = limit;
      rep.limit_verify = verify_eigenform(t, w, limit);
      if (rep.limit_verify->kind != FormKind::degenerate_eigenform) {
        rep.outcome = "boundary_limit_not_eigenform";
        story << "; the limit candidate does not satisfy the eigenvalue "
                 "equation (residual "
              << rep.limit_verify->residual << ")";
        break;
      }
      rep.limit_class = classify(t, w, limit);
      if (rep.limit_class->stratum != Stratum::D3) {
        rep.outcome = "degenerate_eigenform_d4";
        story << "; the limit is a degenerate eigenform with zero image, "
                 "outside the repulsion framework";
        break;
      }
      rep.limit_repulsing = repulsing_check(
          t, w, limit, uniform_form(t.n_boundary), check_tol);
      if (rep.limit_repulsing->repulsing_strict) {
        rep.outcome = "degenerate_eigenform_repulsing";
        story << "; the limit is a repulsing degenerate eigenform (mu "
              << rep.limit_repulsing->mu << " > rho "
              << rep.limit_repulsing->rho
              << "), so the trajectory outcome contradicts none of the "
                 "existence hypotheses yet the iteration still degenerated";
      } else {
        rep.outcome = "degenerate_eigenform_not_repulsing";
        story << "; the limit is a non-repulsing degenerate eigenform (mu "
              << rep.limit_repulsing->mu << " vs rho "
              << rep.limit_repulsing->rho
              << "), the failing hypothesis of the existence statement";
      }
      break;
    }
  }
  rep.narrative = story.str();
  return rep;
}

}  // namespace eigenform
