#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>

#include "eigenform/errors.hpp"
#include "eigenform/forms.hpp"
#include "eigenform/renorm.hpp"
#include "eigenform/rng.hpp"
#include "eigenform/tolerances.hpp"
#include "eigenform/triples.hpp"

namespace eigenform {

// Point of the affine slice {sum of coordinates = 1}. Simplex membership
// (all coordinates >= 0) is not required: ray computations walk outside.
struct SimplexPoint {
  Eigen::VectorXd x;
};

inline SimplexPoint make_simplex_point(Eigen::VectorXd x,
                                       double sum_tol = 1e-12) {
  double s = 0.0;
  for (int i = 0; i < x.size(); ++i) s += x(i);
  if (std::abs(s - 1.0) > sum_tol)
    throw DimensionError("simplex point: coordinates must sum to 1");
  return SimplexPoint{std::move(x)};
}

inline SimplexPoint simplex_point(const DirichletForm& e,
                                  double sum_tol = 1e-12) {
  return make_simplex_point(e.coeffs, sum_tol);
}

namespace detail {

inline void require_apart(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                          double ray_tol) {
  if ((a - b).lpNorm<Eigen::Infinity>() <= ray_tol)
    throw AtCenter("ray through the reference point is undefined");
}

inline void require_interior(const SimplexPoint& e_ref) {
  if (!(e_ref.x.minCoeff() > 0.0))
    throw NotInterior("reference point must have all coordinates positive");
}

}  // namespace detail

// Walk the ray from the interior reference through x until the first
// coordinate hits zero; that is where the ray leaves the simplex.
inline SimplexPoint project_to_boundary(const SimplexPoint& e_ref,
                                        const SimplexPoint& x,
                                        double ray_tol = tol::ray) {
  if (e_ref.x.size() != x.x.size())
    throw DimensionError("project: dimension mismatch");
  detail::require_interior(e_ref);
  detail::require_apart(x.x, e_ref.x, ray_tol);
  double t_star = std::numeric_limits<double>::infinity();
  for (int d = 0; d < x.x.size(); ++d)
    if (x.x(d) < e_ref.x(d))
      t_star = std::min(t_star, e_ref.x(d) / (e_ref.x(d) - x.x(d)));
  if (!std::isfinite(t_star))
    throw AtCenter("no coordinate decreases along the ray");
  return SimplexPoint{e_ref.x + t_star * (x.x - e_ref.x)};
}

struct ExtResult {
  bool contains = false;
  double t = 0.0;        // position of y along the ray through x
  double residual = 0.0; // sup-norm distance of y from the ray
};

// Is y on the open outward ray from e_ref through x (strictly beyond x)?
inline ExtResult ext_contains(const SimplexPoint& e_ref, const SimplexPoint& x,
                              const SimplexPoint& y,
                              double ext_tol = tol::ext,
                              double ray_tol = tol::ray) {
  if (e_ref.x.size() != x.x.size() || e_ref.x.size() != y.x.size())
    throw DimensionError("ext_contains: dimension mismatch");
  detail::require_apart(x.x, e_ref.x, ray_tol);
  const Eigen::VectorXd dx = x.x - e_ref.x;
  const Eigen::VectorXd dy = y.x - e_ref.x;
  ExtResult r;
  r.t = dy.dot(dx) / dx.squaredNorm();
  r.residual = (dy - r.t * dx).lpNorm<Eigen::Infinity>();
  r.contains = r.residual <= ext_tol && r.t > 1.0 + ext_tol;
  return r;
}

struct ProbeReport {
  long long hits = 0;
  long long samples = 0;
  double worst_t = 0.0;     // largest ray position seen among valid samples
  bool any_valid = false;   // false when every sample had a degenerate image
  long long degenerate_images = 0;
  std::uint64_t seed = 0;
};

// Sample the sup-ball around a boundary point intersected with the simplex
// and test whether the normalized trace ever maps a neighbor outward past
// itself. Zero hits is falsification-style evidence only: sampling cannot
// certify the property on a full neighborhood.
//
// Sampling draws all but the last coordinate uniformly in their per
// coordinate boxes and solves the affine constraint for the last; rejection
// then only concerns the last coordinate, which keeps the acceptance rate
// away from the radius^(dim-1) cliff of naive whole-simplex rejection. The
// result is still the uniform law on the intersection, which is the graph of
// a linear map over the box projection.
inline ProbeReport anti_attracting_probe(
    const FractalTriple& t, const Weights& w, const SimplexPoint& e_boundary,
    const SimplexPoint& e_ref, double radius, long long samples,
    std::uint64_t seed, double ext_tol = tol::ext,
    std::uint64_t draw_budget = 1000000) {
  const int m = static_cast<int>(e_boundary.x.size());
  if (m != pair_count(t.n_boundary))
    throw DimensionError("probe: form dimension does not match triple");
  if (samples < 1) throw DimensionError("probe: samples must be >= 1");
  if (!(radius > 0.0)) throw DimensionError("probe: radius must be positive");
  detail::require_interior(e_ref);
  if (e_boundary.x.minCoeff() > tol::zero)
    throw Error("probe: the probed point must lie on the simplex boundary");

  ProbeReport rep;
  rep.samples = samples;
  rep.seed = seed;
  rep.worst_t = -std::numeric_limits<double>::infinity();

  DetRng rng(seed);
  std::vector<Eigen::VectorXd> points;
  points.reserve(samples);
  std::uint64_t draws = 0;
  while (static_cast<long long>(points.size()) < samples) {
    if (++draws > draw_budget)
      throw SamplingExhausted("probe: rejection sampling exceeded its budget");
    Eigen::VectorXd c(m);
    double partial = 0.0;
    for (int d = 0; d + 1 < m; ++d) {
      const double lo = std::max(0.0, e_boundary.x(d) - radius);
      const double hi = std::min(1.0, e_boundary.x(d) + radius);
      c(d) = rng.uniform(lo, hi);
      partial += c(d);
    }
    const double last = 1.0 - partial;
    if (std::abs(last - e_boundary.x(m - 1)) > radius) continue;
    c(m - 1) = last;
    if (!(c.minCoeff() > 0.0)) continue;
    points.push_back(std::move(c));
  }

  for (const auto& c : points) {
    DirichletForm e{t.n_boundary, c};
    try {
      auto [scale, image] = normalized_lambda(t, w, e);
      (void)scale;
      ExtResult er = ext_contains(e_ref, SimplexPoint{c},
                                  simplex_point(image), ext_tol);
      if (er.contains) ++rep.hits;
      if (!rep.any_valid || er.t > rep.worst_t) rep.worst_t = er.t;
      rep.any_valid = true;
    } catch (const DegenerateImage&) {
      ++rep.degenerate_images;
    }
  }
  if (!rep.any_valid) rep.worst_t = 0.0;
  return rep;
}

}  // namespace eigenform
