#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "eigenform/forms.hpp"
#include "eigenform/renorm.hpp"
#include "eigenform/rng.hpp"
#include "eigenform/triples.hpp"

namespace testutil {

inline const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names{"interval", "gasket", "vicsek",
                                              "snowflake", "tripod"};
  return names;
}

// Normalized form with all coefficients positive (so in the irreducible cone).
inline eigenform::DirichletForm random_form(eigenform::DetRng& rng,
                                            int n_boundary) {
  const int m = eigenform::pair_count(n_boundary);
  Eigen::VectorXd c(m);
  for (int d = 0; d < m; ++d) c(d) = rng.uniform(0.05, 1.0);
  return eigenform::normalized(eigenform::DirichletForm{n_boundary, c});
}

inline eigenform::Weights random_weights(eigenform::DetRng& rng, int k,
                                         double lo = 0.1, double hi = 10.0) {
  std::vector<double> r(k);
  for (int i = 0; i < k; ++i) r[i] = rng.uniform(lo, hi);
  return eigenform::make_weights(r);
}

inline double sup_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).lpNorm<Eigen::Infinity>();
}

// Random vector with zero sum: a direction inside the affine slice.
inline Eigen::VectorXd random_slice_direction(eigenform::DetRng& rng, int m) {
  Eigen::VectorXd v(m);
  for (int d = 0; d < m; ++d) v(d) = rng.uniform(-1.0, 1.0);
  v.array() -= v.sum() / double(m);
  return v;
}

}  // namespace testutil
