#pragma once

// Discrete tensor Hilbert space along a sampled curve: quadrature inner
// products of tangent vector fields and the parallel transporter of fields
// between the spaces of two curves (pointwise along minimizing geodesics).

#include <string>
#include <vector>

#include "rfda/curve.hpp"

namespace rfda {

/// <<U,V>> = sum_i w_i <U(t_i), V(t_i)>_{mu(t_i)}.
inline double vf_inner(const VectorField& u, const VectorField& v) {
  detail::require_same_curve(u, v, "vf_inner");
  const ManifoldCurve& c = u.curve;
  double acc = 0.0;
  switch (c.spec.kind) {
    case ManifoldKind::Sphere:
    case ManifoldKind::Euclidean:
      for (int i = 0; i < c.size(); ++i)
        acc += c.grid.weights(i) * (u.vectors[i].array() * v.vectors[i].array()).sum();
      break;
    case ManifoldKind::Spd:
      for (int i = 0; i < c.size(); ++i) {
        SpdFactors f = SpdFactors::of(c.value(i));
        acc += c.grid.weights(i) * spd_inner(f, u.vectors[i], v.vectors[i]);
      }
      break;
  }
  return acc;
}

inline double vf_norm(const VectorField& u) {
  double sq = vf_inner(u, u);
  return std::sqrt(sq < 0.0 ? 0.0 : sq);
}

/// Pointwise parallel transport of a whole field onto another curve with the
/// same grid and spec. Cut-locus failures report the offending time index.
inline VectorField transport_field(const VectorField& u, const ManifoldCurve& target) {
  if (u.curve.spec != target.spec || !same_grid(u.curve.grid, target.grid))
    throw ConfigError("transport_field: source and target curves are incompatible");
  VectorField out{target, {}};
  out.vectors.reserve(target.size());
  for (int i = 0; i < target.size(); ++i) {
    try {
      out.vectors.push_back(
          transport_point(u.curve.point(i), target.point(i), u.at(i)).value);
    } catch (const AntipodalError& e) {
      throw AntipodalError(std::string(e.what()) + " (while transporting at t = " +
                           std::to_string(u.curve.grid.times(i)) + ")");
    }
  }
  return out;
}

struct FieldDifference {
  VectorField field;  // along the curve of the second argument
  double norm = 0.0;
};

/// Transport-compare difference U (-)_Gamma V = Gamma_{f,h} U - V, returned
/// along the curve of V together with its norm.
inline FieldDifference diff_gamma(const VectorField& u, const VectorField& v) {
  VectorField moved = transport_field(u, v.curve);
  FieldDifference out{vf_sub(moved, v), 0.0};
  out.norm = vf_norm(out.field);
  return out;
}

}  // namespace rfda
