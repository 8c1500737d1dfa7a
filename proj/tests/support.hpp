#pragma once

// Shared helpers for the test suites: seeded random manifold inputs and a
// few quadrature utilities independent of the library internals.

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "rfda/manifold.hpp"
#include "rfda/tensor_hilbert.hpp"

namespace testsupport {

using rfda::ManifoldKind;
using rfda::ManifoldPoint;
using rfda::ManifoldSpec;
using rfda::TangentVector;

inline Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int r, int c, double scale = 1.0) {
  std::normal_distribution<double> gauss(0.0, scale);
  Eigen::MatrixXd m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = gauss(rng);
  return m;
}

/// Uniform-ish random point: normalized Gaussian (sphere), exp of a random
/// symmetric matrix (SPD, well conditioned), plain Gaussian (euclidean).
inline ManifoldPoint random_point(std::mt19937_64& rng, const ManifoldSpec& spec,
                                  double spread = 1.0) {
  switch (spec.kind) {
    case ManifoldKind::Sphere: {
      Eigen::MatrixXd v = random_matrix(rng, spec.rows(), 1);
      while (v.norm() < 1e-3) v = random_matrix(rng, spec.rows(), 1);
      return rfda::make_point(spec, v / v.norm());
    }
    case ManifoldKind::Spd: {
      Eigen::MatrixXd a = rfda::sym_part(random_matrix(rng, spec.size, spec.size, spread * 0.5));
      return rfda::make_point(spec, rfda::sym_exp(a));
    }
    case ManifoldKind::Euclidean:
      return rfda::make_point(spec, random_matrix(rng, spec.rows(), 1, spread));
  }
  throw std::logic_error("unreachable");
}

/// Random tangent vector at p with roughly the given metric norm scale.
inline TangentVector random_tangent(std::mt19937_64& rng, const ManifoldPoint& p,
                                    double scale = 1.0) {
  Eigen::MatrixXd raw = random_matrix(rng, p.spec.rows(), p.spec.cols(), scale);
  TangentVector v = rfda::project_tangent(p, raw);
  double n = rfda::tangent_norm(v);
  if (n > 1e-12) v.value *= scale / n;
  return v;
}

/// A nearby point reachable via a short geodesic (stays inside every
/// injectivity radius used in the tests).
inline ManifoldPoint random_nearby_point(std::mt19937_64& rng, const ManifoldPoint& p,
                                         double radius = 0.5) {
  std::uniform_real_distribution<double> unif(0.1 * radius, radius);
  TangentVector step = random_tangent(rng, p, unif(rng));
  return rfda::exp_map(p, step);
}

/// Smooth-ish random curve: start at a random point, take short geodesic
/// steps between grid times.
inline rfda::ManifoldCurve random_curve(std::mt19937_64& rng, const ManifoldSpec& spec,
                                        const rfda::TimeGrid& grid, double step = 0.15) {
  std::vector<Eigen::MatrixXd> pts;
  pts.reserve(grid.size());
  ManifoldPoint p = random_point(rng, spec);
  pts.push_back(p.value);
  for (int i = 1; i < grid.size(); ++i) {
    p = random_nearby_point(rng, p, step);
    pts.push_back(p.value);
  }
  return {spec, grid, std::move(pts)};
}

/// Pointwise perturbation of a curve (stays within radius of the original).
inline rfda::ManifoldCurve perturbed_curve(std::mt19937_64& rng, const rfda::ManifoldCurve& c,
                                           double radius = 0.4) {
  std::vector<Eigen::MatrixXd> pts;
  pts.reserve(c.size());
  for (int i = 0; i < c.size(); ++i)
    pts.push_back(random_nearby_point(rng, c.point(i), radius).value);
  return {c.spec, c.grid, std::move(pts)};
}

inline rfda::VectorField random_field(std::mt19937_64& rng, const rfda::ManifoldCurve& c,
                                      double scale = 1.0) {
  rfda::VectorField f = rfda::zero_field(c);
  for (int i = 0; i < c.size(); ++i) f.vectors[i] = random_tangent(rng, c.point(i), scale).value;
  return f;
}

/// Gram-Schmidt under the tensor Hilbert inner product.
inline std::vector<rfda::VectorField> orthonormal_fields(std::mt19937_64& rng,
                                                         const rfda::ManifoldCurve& c, int k) {
  std::vector<rfda::VectorField> out;
  while (static_cast<int>(out.size()) < k) {
    rfda::VectorField v = random_field(rng, c);
    for (const auto& b : out) v = rfda::vf_sub(v, rfda::vf_scale(b, rfda::vf_inner(b, v)));
    double n = rfda::vf_norm(v);
    if (n < 1e-6) continue;
    out.push_back(rfda::vf_scale(v, 1.0 / n));
  }
  return out;
}

}  // namespace testsupport
