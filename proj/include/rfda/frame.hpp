#pragma once

// Measurable orthonormal frames along a curve and conversion between
// intrinsic vector fields and their frame coordinates.

#include <functional>
#include <vector>

#include "rfda/tensor_hilbert.hpp"

namespace rfda {

/// d orthonormal basis fields along a curve (d = intrinsic dimension).
struct Frame {
  ManifoldCurve curve;
  std::vector<VectorField> basis;

  int dim() const { return static_cast<int>(basis.size()); }
  /// Basis vector j at grid index i.
  const Eigen::MatrixXd& vec(int i, int j) const { return basis[j].vectors[i]; }
};

/// Frame coordinates of a vector field: one row per grid time, one column
/// per basis field.
struct CoordField {
  TimeGrid grid;
  Eigen::MatrixXd values;  // size() x d

  int size() const { return static_cast<int>(values.rows()); }
  int dim() const { return static_cast<int>(values.cols()); }
};

/// Linearly independent basis of the tangent space at p: the symmetric
/// elementary matrices e_k on Sym+ (k -> (N1,N2) walks the lower triangle
/// row by row), a Householder completion of p on the sphere, and the
/// standard basis in R^d.
inline std::vector<TangentVector> canonical_tangent_basis(const ManifoldPoint& p) {
  std::vector<TangentVector> out;
  const int d = p.spec.intrinsic_dim();
  out.reserve(d);
  switch (p.spec.kind) {
    case ManifoldKind::Spd: {
      const int m = p.spec.size;
      for (int k = 1; k <= d; ++k) {
        int n1 = 1;
        while (n1 * (n1 + 1) / 2 < k) ++n1;
        int n2 = k - n1 * (n1 - 1) / 2;
        Eigen::MatrixXd e = Eigen::MatrixXd::Zero(m, m);
        e(n1 - 1, n2 - 1) = 1.0;
        e(n2 - 1, n1 - 1) = 1.0;
        out.push_back({p, e});
      }
      break;
    }
    case ManifoldKind::Sphere: {
      // Reflect e1 onto -sign(p1) p; images of e2..e_{d+1} span the tangent space.
      Eigen::VectorXd w = p.value.col(0);
      double s = w(0) >= 0.0 ? 1.0 : -1.0;
      w(0) += s;
      double wn2 = w.squaredNorm();
      for (int j = 1; j <= d; ++j) {
        Eigen::VectorXd e = Eigen::VectorXd::Unit(d + 1, j);
        Eigen::VectorXd h = e - (2.0 * w.dot(e) / wn2) * w;
        out.push_back({p, h});
      }
      break;
    }
    case ManifoldKind::Euclidean:
      for (int j = 0; j < d; ++j)
        out.push_back({p, Eigen::VectorXd::Unit(d, j)});
      break;
  }
  return out;
}

namespace detail {

/// Modified Gram-Schmidt under the metric at p, with a second
/// re-orthogonalization pass when cancellation eats the projection norm.
inline std::vector<Eigen::MatrixXd> gram_schmidt_at(
    const ManifoldPoint& p, const std::vector<Eigen::MatrixXd>& raw) {
  const bool is_spd = p.spec.kind == ManifoldKind::Spd;
  SpdFactors f;
  if (is_spd) f = SpdFactors::of(p.value);
  auto inner = [&](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return is_spd ? spd_inner(f, a, b) : (a.array() * b.array()).sum();
  };

  std::vector<Eigen::MatrixXd> basis;
  basis.reserve(raw.size());
  for (const auto& r : raw) {
    Eigen::MatrixXd v = r;
    double initial = std::sqrt(std::max(0.0, inner(v, v)));
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) v -= inner(b, v) * b;
      double n = std::sqrt(std::max(0.0, inner(v, v)));
      if (n > 1e-8 * std::max(1.0, initial)) {
        v /= n;
        break;
      }
      if (pass == 1 || n <= 1e-14 * std::max(1.0, initial))
        throw FrameError("gram_schmidt: basis became numerically dependent");
      v /= n;  // re-orthogonalize from the normalized remainder
    }
    basis.push_back(v);
  }
  return basis;
}

}  // namespace detail

/// Orthonormal frame along a curve. SPD frames apply Gram-Schmidt to the
/// canonical basis pointwise; sphere frames parallel-transport the initial
/// basis along the curve (re-orthonormalized each step) so no orientation
/// flip can occur between neighboring grid points.
inline Frame frame_along_curve(const ManifoldCurve& curve) {
  const int d = curve.spec.intrinsic_dim();
  const int m = curve.size();
  std::vector<std::vector<Eigen::MatrixXd>> basis_vals(d);
  for (auto& b : basis_vals) b.reserve(m);

  switch (curve.spec.kind) {
    case ManifoldKind::Spd: {
      for (int i = 0; i < m; ++i) {
        auto canon = canonical_tangent_basis(curve.point(i));
        std::vector<Eigen::MatrixXd> raw;
        raw.reserve(d);
        for (auto& c : canon) raw.push_back(c.value);
        auto ortho = detail::gram_schmidt_at(curve.point(i), raw);
        for (int j = 0; j < d; ++j) basis_vals[j].push_back(ortho[j]);
      }
      break;
    }
    case ManifoldKind::Sphere: {
      auto canon = canonical_tangent_basis(curve.point(0));
      std::vector<Eigen::MatrixXd> prev;
      prev.reserve(d);
      for (auto& c : canon) prev.push_back(c.value);
      prev = detail::gram_schmidt_at(curve.point(0), prev);
      for (int j = 0; j < d; ++j) basis_vals[j].push_back(prev[j]);
      for (int i = 1; i < m; ++i) {
        std::vector<Eigen::MatrixXd> moved;
        moved.reserve(d);
        for (int j = 0; j < d; ++j)
          moved.push_back(transport_point(curve.point(i - 1), curve.point(i),
                                          {curve.point(i - 1), prev[j]})
                              .value);
        prev = detail::gram_schmidt_at(curve.point(i), moved);
        for (int j = 0; j < d; ++j) basis_vals[j].push_back(prev[j]);
      }
      break;
    }
    case ManifoldKind::Euclidean: {
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < d; ++j)
          basis_vals[j].push_back(Eigen::VectorXd::Unit(d, j));
      break;
    }
  }

  Frame frame{curve, {}};
  frame.basis.reserve(d);
  for (int j = 0; j < d; ++j) frame.basis.push_back({curve, std::move(basis_vals[j])});
  return frame;
}

/// New frame A with A_j(t) = sum_l O(t)_{lj} E_l(t); O(t) must be orthogonal.
inline Frame rotate_frame(const Frame& frame,
                          const std::function<Eigen::MatrixXd(double)>& rotation) {
  const int d = frame.dim();
  Frame out{frame.curve, std::vector<VectorField>(
                             d, VectorField{frame.curve,
                                            std::vector<Eigen::MatrixXd>(frame.curve.size())})};
  for (int i = 0; i < frame.curve.size(); ++i) {
    Eigen::MatrixXd o = rotation(frame.curve.grid.times(i));
    if (o.rows() != d || o.cols() != d)
      throw ConfigError("rotate_frame: rotation matrix has the wrong size");
    for (int j = 0; j < d; ++j) {
      Eigen::MatrixXd v = Eigen::MatrixXd::Zero(frame.curve.spec.rows(), frame.curve.spec.cols());
      for (int l = 0; l < d; ++l) v += o(l, j) * frame.vec(i, l);
      out.basis[j].vectors[i] = v;
    }
  }
  return out;
}

inline Frame rotate_frame(const Frame& frame, const Eigen::MatrixXd& rotation) {
  return rotate_frame(frame, [&](double) { return rotation; });
}

/// Coordinates of a field in a frame: values(i, j) = <U(t_i), E_j(t_i)>.
inline CoordField to_coordinates(const Frame& frame, const VectorField& u) {
  if (!same_curve(frame.curve, u.curve))
    throw ConfigError("to_coordinates: frame and field live along different curves");
  const int d = frame.dim();
  const int m = frame.curve.size();
  CoordField out{frame.curve.grid, Eigen::MatrixXd(m, d)};
  const bool is_spd = frame.curve.spec.kind == ManifoldKind::Spd;
  for (int i = 0; i < m; ++i) {
    if (is_spd) {
      SpdFactors f = SpdFactors::of(frame.curve.value(i));
      for (int j = 0; j < d; ++j)
        out.values(i, j) = spd_inner(f, u.vectors[i], frame.vec(i, j));
    } else {
      for (int j = 0; j < d; ++j)
        out.values(i, j) = (u.vectors[i].array() * frame.vec(i, j).array()).sum();
    }
  }
  return out;
}

/// Inverse of to_coordinates: U(t_i) = sum_j values(i,j) E_j(t_i).
inline VectorField from_coordinates(const Frame& frame, const CoordField& z) {
  if (z.size() != frame.curve.size() || z.dim() != frame.dim())
    throw ConfigError("from_coordinates: coordinate shape does not match the frame");
  VectorField out{frame.curve, {}};
  out.vectors.reserve(z.size());
  for (int i = 0; i < z.size(); ++i) {
    Eigen::MatrixXd v =
        Eigen::MatrixXd::Zero(frame.curve.spec.rows(), frame.curve.spec.cols());
    for (int j = 0; j < frame.dim(); ++j) v += z.values(i, j) * frame.vec(i, j);
    out.vectors.push_back(std::move(v));
  }
  return out;
}

/// Quadrature L2 norm of a coordinate field (equals vf_norm of the field it
/// represents in any orthonormal frame).
inline double coord_norm(const CoordField& z) {
  double acc = 0.0;
  for (int i = 0; i < z.size(); ++i)
    acc += z.grid.weights(i) * z.values.row(i).squaredNorm();
  return std::sqrt(std::max(0.0, acc));
}

inline double coord_inner(const CoordField& a, const CoordField& b) {
  if (a.size() != b.size() || a.dim() != b.dim())
    throw ConfigError("coord_inner: shape mismatch");
  double acc = 0.0;
  for (int i = 0; i < a.size(); ++i)
    acc += a.grid.weights(i) * a.values.row(i).dot(b.values.row(i));
  return acc;
}

}  // namespace rfda
