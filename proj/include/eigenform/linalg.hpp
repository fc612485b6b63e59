#pragma once

#include <Eigen/Dense>
#include <limits>

#include "eigenform/errors.hpp"

namespace eigenform {

inline Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

// Moore-Penrose inverse of a symmetric PSD matrix via eigendecomposition.
// Eigenvalues below dim * eps * |lambda|_max are treated as exact zeros;
// a negative rank_cutoff selects that default.
inline Eigen::MatrixXd psd_pseudo_inverse(const Eigen::MatrixXd& a,
                                          double rank_cutoff = -1.0) {
  const Eigen::MatrixXd s = symmetrized(a);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  const Eigen::VectorXd& vals = es.eigenvalues();
  const double lmax = vals.cwiseAbs().maxCoeff();
  if (lmax == 0.0) return Eigen::MatrixXd::Zero(a.rows(), a.cols());
  const double cutoff =
      rank_cutoff >= 0.0
          ? rank_cutoff
          : static_cast<double>(a.rows()) *
                std::numeric_limits<double>::epsilon() * lmax;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(vals.size());
  for (int i = 0; i < vals.size(); ++i)
    if (vals(i) > cutoff) inv(i) = 1.0 / vals(i);
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

// Minimum of x' Q x over the trailing coordinates with the leading n_keep
// coordinates held fixed, as a form on those leading coordinates. For PSD Q
// the minimum is attained (the cross block's columns lie in the range of the
// trailing block), so the pseudoinverse Schur complement is exact.
inline Eigen::MatrixXd schur_to_leading(const Eigen::MatrixXd& q, int n_keep,
                                        double rank_cutoff = -1.0) {
  const int m = static_cast<int>(q.rows());
  if (n_keep < 0 || n_keep > m)
    throw DimensionError("schur_to_leading: bad block size");
  if (n_keep == m) return symmetrized(q);
  const auto a = q.topLeftCorner(n_keep, n_keep);
  const auto b = q.topRightCorner(n_keep, m - n_keep);
  const auto c = q.bottomRightCorner(m - n_keep, m - n_keep);
  return symmetrized(a - b * psd_pseudo_inverse(c, rank_cutoff) * b.transpose());
}

// Orthonormal basis of the column space (rank-revealing QR).
inline Eigen::MatrixXd orthonormal_columns(const Eigen::MatrixXd& s) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(s);
  const int rank = static_cast<int>(qr.rank());
  Eigen::MatrixXd q = qr.householderQ() *
                      Eigen::MatrixXd::Identity(s.rows(), rank);
  return q;
}

// Orthonormal basis of the hyperplane orthogonal to a unit vector: the last
// s-1 columns of the Householder reflector taking e1 to w.
inline Eigen::MatrixXd householder_complement(const Eigen::VectorXd& w_unit) {
  const int s = static_cast<int>(w_unit.size());
  Eigen::VectorXd v = w_unit;
  v(0) -= 1.0;
  const double nv = v.norm();
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(s, s);
  if (nv > 1e-12) h -= (2.0 / (nv * nv)) * v * v.transpose();
  return h.rightCols(s - 1);
}

// Orthonormal basis of span(subspace) intersected with the orthogonal
// complement of the constant vector.
inline Eigen::MatrixXd intersect_constants_perp(const Eigen::MatrixXd& subspace,
                                                double tol = 1e-12) {
  const Eigen::MatrixXd u = orthonormal_columns(subspace);
  if (u.cols() == 0) return u;
  Eigen::VectorXd ones =
      Eigen::VectorXd::Ones(u.rows()) / std::sqrt(double(u.rows()));
  Eigen::VectorXd w = u.transpose() * ones;
  const double nw = w.norm();
  if (nw <= tol) return u;  // subspace already orthogonal to constants
  return u * householder_complement(w / nw);
}

}  // namespace eigenform
