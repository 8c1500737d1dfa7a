#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "rfda/errors.hpp"

namespace rfda {

enum class ManifoldKind { Sphere, Spd, Euclidean };

namespace tol {
inline constexpr double kUnitNorm = 1e-10;      // sphere point |norm - 1|
inline constexpr double kTangency = 1e-10;      // sphere tangent <p,v>
inline constexpr double kSymmetry = 1e-12;      // SPD (tangent) symmetry
inline constexpr double kSpdEigMin = 1e-12;     // SPD point smallest eigenvalue
inline constexpr double kAntipodal = 1e-12;     // reject log when <p,q> < -1 + this
inline constexpr double kProjectEigFloor = 1e-10;  // default clamp in project_point
inline constexpr double kPointEq = 1e-12;       // base-point agreement
}  // namespace tol

/// Identifies one of the three registered geometries together with its size
/// parameter: intrinsic dimension d for the sphere S^d and for R^d, matrix
/// size m for the SPD manifold Sym+(m) under the affine-invariant metric.
struct ManifoldSpec {
  ManifoldKind kind = ManifoldKind::Euclidean;
  int size = 1;

  static ManifoldSpec sphere(int d) {
    if (d < 1) throw ConfigError("sphere dimension must be >= 1");
    return {ManifoldKind::Sphere, d};
  }
  static ManifoldSpec spd(int m) {
    if (m < 1) throw ConfigError("SPD matrix size must be >= 1");
    return {ManifoldKind::Spd, m};
  }
  static ManifoldSpec euclidean(int d) {
    if (d < 1) throw ConfigError("euclidean dimension must be >= 1");
    return {ManifoldKind::Euclidean, d};
  }

  int intrinsic_dim() const {
    return kind == ManifoldKind::Spd ? size * (size + 1) / 2 : size;
  }
  // Shape of the representation array.
  int rows() const { return kind == ManifoldKind::Sphere ? size + 1 : size; }
  int cols() const { return kind == ManifoldKind::Spd ? size : 1; }

  // Lower bound on sectional curvature: +1 on the unit sphere, 0 in R^d,
  // -1/2 for Sym+(m) with the affine-invariant metric.
  double curvature_lower_bound() const {
    switch (kind) {
      case ManifoldKind::Sphere: return 1.0;
      case ManifoldKind::Spd: return -0.5;
      case ManifoldKind::Euclidean: return 0.0;
    }
    return 0.0;
  }
  bool nonnegative_curvature() const { return curvature_lower_bound() >= 0.0; }

  bool operator==(const ManifoldSpec& o) const {
    return kind == o.kind && size == o.size;
  }
  bool operator!=(const ManifoldSpec& o) const { return !(*this == o); }

  std::string name() const {
    switch (kind) {
      case ManifoldKind::Sphere: return "sphere" + std::to_string(size);
      case ManifoldKind::Spd: return "spd" + std::to_string(size);
      case ManifoldKind::Euclidean: return "euclidean" + std::to_string(size);
    }
    return "unknown";
  }
};

/// A point on a registered manifold. The representation is a unit column
/// vector (sphere), an SPD matrix (Sym+), or a plain column vector (R^d).
struct ManifoldPoint {
  ManifoldSpec spec;
  Eigen::MatrixXd value;
};

/// A tangent vector anchored at its base point; same shape as the base
/// representation.
struct TangentVector {
  ManifoldPoint base;
  Eigen::MatrixXd value;
};

inline Eigen::MatrixXd sym_part(const Eigen::MatrixXd& a) {
  return 0.5 * (a + a.transpose());
}

namespace detail {

inline void require_shape(const ManifoldSpec& spec, const Eigen::MatrixXd& value,
                          const char* what) {
  if (value.rows() != spec.rows() || value.cols() != spec.cols())
    throw GeometryError(std::string(what) + ": representation has shape " +
                        std::to_string(value.rows()) + "x" + std::to_string(value.cols()) +
                        ", expected " + std::to_string(spec.rows()) + "x" +
                        std::to_string(spec.cols()) + " on " + spec.name());
}

inline Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sym_eig(const Eigen::MatrixXd& s,
                                                              const char* what) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym_part(s));
  if (es.info() != Eigen::Success)
    throw GeometryError(std::string(what) + ": symmetric eigendecomposition failed");
  return es;
}

}  // namespace detail

/// Matrix exponential of a symmetric matrix.
inline Eigen::MatrixXd sym_exp(const Eigen::MatrixXd& a) {
  auto es = detail::sym_eig(a, "sym_exp");
  return es.eigenvectors() * es.eigenvalues().array().exp().matrix().asDiagonal() *
         es.eigenvectors().transpose();
}

/// Matrix logarithm of a symmetric positive-definite matrix.
inline Eigen::MatrixXd sym_log(const Eigen::MatrixXd& s) {
  auto es = detail::sym_eig(s, "sym_log");
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw GeometryError("sym_log: matrix is not positive definite (min eigenvalue " +
                        std::to_string(es.eigenvalues().minCoeff()) + ")");
  return es.eigenvectors() * es.eigenvalues().array().log().matrix().asDiagonal() *
         es.eigenvectors().transpose();
}

/// Principal square root of a symmetric positive-semidefinite matrix.
inline Eigen::MatrixXd sym_sqrt(const Eigen::MatrixXd& s) {
  auto es = detail::sym_eig(s, "sym_sqrt");
  if (es.eigenvalues().minCoeff() < 0.0)
    throw GeometryError("sym_sqrt: matrix has negative eigenvalues");
  return es.eigenvectors() * es.eigenvalues().array().sqrt().matrix().asDiagonal() *
         es.eigenvectors().transpose();
}

/// Cached S^{1/2} and S^{-1/2} of an SPD base point. All affine-invariant
/// kernels conjugate by these, so batched operations at one base reuse them.
struct SpdFactors {
  Eigen::MatrixXd sqrt;
  Eigen::MatrixXd inv_sqrt;

  static SpdFactors of(const Eigen::MatrixXd& s) {
    auto es = detail::sym_eig(s, "SpdFactors");
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw GeometryError("SpdFactors: base point is not positive definite");
    Eigen::ArrayXd root = es.eigenvalues().array().sqrt();
    const Eigen::MatrixXd& q = es.eigenvectors();
    SpdFactors f;
    f.sqrt = q * root.matrix().asDiagonal() * q.transpose();
    f.inv_sqrt = q * root.inverse().matrix().asDiagonal() * q.transpose();
    return f;
  }
};

// Affine-invariant kernels at a prefactored base point S.
// Log_S(Q) = S^{1/2} log(S^{-1/2} Q S^{-1/2}) S^{1/2}, Exp_S likewise with exp.
inline Eigen::MatrixXd spd_log(const SpdFactors& at, const Eigen::MatrixXd& q) {
  return sym_part(at.sqrt * sym_log(sym_part(at.inv_sqrt * q * at.inv_sqrt)) * at.sqrt);
}

inline Eigen::MatrixXd spd_exp(const SpdFactors& at, const Eigen::MatrixXd& u) {
  return sym_part(at.sqrt * sym_exp(sym_part(at.inv_sqrt * u * at.inv_sqrt)) * at.sqrt);
}

inline double spd_dist(const SpdFactors& at, const Eigen::MatrixXd& q) {
  return sym_log(sym_part(at.inv_sqrt * q * at.inv_sqrt)).norm();
}

struct SpdLogDist {
  Eigen::MatrixXd log;
  double dist = 0.0;
};

/// Log map and geodesic distance from one eigendecomposition.
inline SpdLogDist spd_log_dist(const SpdFactors& at, const Eigen::MatrixXd& q) {
  Eigen::MatrixXd whitened = sym_log(sym_part(at.inv_sqrt * q * at.inv_sqrt));
  SpdLogDist out;
  out.dist = whitened.norm();
  out.log = sym_part(at.sqrt * whitened * at.sqrt);
  return out;
}

/// <U,V>_S = tr(S^{-1} U S^{-1} V).
inline double spd_inner(const SpdFactors& at, const Eigen::MatrixXd& u,
                        const Eigen::MatrixXd& v) {
  Eigen::MatrixXd uw = at.inv_sqrt * u * at.inv_sqrt;
  Eigen::MatrixXd vw = at.inv_sqrt * v * at.inv_sqrt;
  return (uw.array() * vw.array()).sum();
}

/// Parallel transport along the minimizing geodesic from the base of
/// `from` to q: U -> E U E^T with E = S^{1/2} exp(Delta/2) S^{-1/2} and
/// Delta = log(S^{-1/2} Q S^{-1/2}).
inline Eigen::MatrixXd spd_transport(const SpdFactors& from, const Eigen::MatrixXd& q,
                                     const Eigen::MatrixXd& u) {
  Eigen::MatrixXd half = sym_exp(0.5 * sym_log(sym_part(from.inv_sqrt * q * from.inv_sqrt)));
  Eigen::MatrixXd e = from.sqrt * half * from.inv_sqrt;
  return sym_part(e * u * e.transpose());
}

/// Validates the manifold invariants of a point; throws GeometryError.
inline void check_point(const ManifoldPoint& p) {
  detail::require_shape(p.spec, p.value, "check_point");
  if (!p.value.allFinite()) throw GeometryError("check_point: non-finite entries");
  switch (p.spec.kind) {
    case ManifoldKind::Sphere: {
      double norm = p.value.norm();
      if (std::abs(norm - 1.0) > tol::kUnitNorm)
        throw GeometryError("check_point: sphere point norm " + std::to_string(norm));
      break;
    }
    case ManifoldKind::Spd: {
      if ((p.value - p.value.transpose()).cwiseAbs().maxCoeff() > tol::kSymmetry)
        throw GeometryError("check_point: SPD point is not symmetric");
      auto es = detail::sym_eig(p.value, "check_point");
      if (es.eigenvalues().minCoeff() <= tol::kSpdEigMin)
        throw GeometryError("check_point: SPD point has min eigenvalue " +
                            std::to_string(es.eigenvalues().minCoeff()));
      break;
    }
    case ManifoldKind::Euclidean: break;
  }
}

/// Constructs a point, symmetrizing SPD input, and validates it.
inline ManifoldPoint make_point(const ManifoldSpec& spec, const Eigen::MatrixXd& value) {
  detail::require_shape(spec, value, "make_point");
  ManifoldPoint p{spec, spec.kind == ManifoldKind::Spd ? sym_part(value) : value};
  check_point(p);
  return p;
}

inline bool same_point(const ManifoldPoint& a, const ManifoldPoint& b,
                       double eps = tol::kPointEq) {
  if (a.spec != b.spec) return false;
  double scale = std::max(1.0, std::max(a.value.cwiseAbs().maxCoeff(),
                                        b.value.cwiseAbs().maxCoeff()));
  return (a.value - b.value).cwiseAbs().maxCoeff() <= eps * scale;
}

namespace detail {
inline void require_base(const TangentVector& v, const ManifoldPoint& p, const char* what) {
  if (!same_point(v.base, p))
    throw BaseMismatchError(std::string(what) + ": tangent vector based at a different point");
}
}  // namespace detail

/// Constructs a tangent vector at p, validating tangency (sphere) or
/// symmetrizing (SPD).
inline TangentVector make_tangent(const ManifoldPoint& p, const Eigen::MatrixXd& value) {
  detail::require_shape(p.spec, value, "make_tangent");
  if (!value.allFinite()) throw GeometryError("make_tangent: non-finite entries");
  switch (p.spec.kind) {
    case ManifoldKind::Sphere: {
      double radial = (p.value.transpose() * value)(0, 0);
      if (std::abs(radial) > tol::kTangency * std::max(1.0, value.norm()))
        throw GeometryError("make_tangent: sphere vector is not tangent (radial part " +
                            std::to_string(radial) + ")");
      return {p, value};
    }
    case ManifoldKind::Spd: return {p, sym_part(value)};
    case ManifoldKind::Euclidean: return {p, value};
  }
  return {p, value};
}

/// Projects an arbitrary array onto the tangent space at p.
inline TangentVector project_tangent(const ManifoldPoint& p, const Eigen::MatrixXd& value) {
  detail::require_shape(p.spec, value, "project_tangent");
  switch (p.spec.kind) {
    case ManifoldKind::Sphere: {
      double radial = (p.value.transpose() * value)(0, 0);
      return {p, value - radial * p.value};
    }
    case ManifoldKind::Spd: return {p, sym_part(value)};
    case ManifoldKind::Euclidean: return {p, value};
  }
  return {p, value};
}

inline TangentVector zero_tangent(const ManifoldPoint& p) {
  return {p, Eigen::MatrixXd::Zero(p.spec.rows(), p.spec.cols())};
}

/// Riemannian inner product of two tangent vectors at p.
inline double metric_inner(const ManifoldPoint& p, const TangentVector& u,
                           const TangentVector& v) {
  detail::require_base(u, p, "metric_inner");
  detail::require_base(v, p, "metric_inner");
  switch (p.spec.kind) {
    case ManifoldKind::Sphere:
    case ManifoldKind::Euclidean:
      return (u.value.array() * v.value.array()).sum();
    case ManifoldKind::Spd:
      return spd_inner(SpdFactors::of(p.value), u.value, v.value);
  }
  return 0.0;
}

inline double tangent_norm(const TangentVector& v) {
  return std::sqrt(std::max(0.0, metric_inner(v.base, v, v)));
}

namespace detail {

inline double clamp_unit(double x) { return x < -1.0 ? -1.0 : (x > 1.0 ? 1.0 : x); }

// sin(t)/t with the small-angle series.
inline double sinc(double t) {
  if (std::abs(t) < 1e-8) return 1.0 - t * t / 6.0;
  return std::sin(t) / t;
}

inline Eigen::MatrixXd sphere_exp(const Eigen::MatrixXd& p, const Eigen::MatrixXd& v) {
  double theta = v.norm();
  if (theta >= M_PI)
    throw GeometryError("exp_map: sphere tangent norm " + std::to_string(theta) +
                        " exceeds the injectivity radius pi");
  Eigen::MatrixXd q = std::cos(theta) * p + sinc(theta) * v;
  q /= q.norm();
  return q;
}

// atan2 keeps the angle well conditioned near theta = 0, where acos loses
// half the significant digits.
inline double sphere_angle(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q) {
  double c = clamp_unit((p.transpose() * q)(0, 0));
  return std::atan2((q - c * p).norm(), c);
}

inline Eigen::MatrixXd sphere_log(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q) {
  double c = clamp_unit((p.transpose() * q)(0, 0));
  if (c < -1.0 + tol::kAntipodal)
    throw AntipodalError("log_map: points are antipodal on the sphere (cut locus)");
  Eigen::MatrixXd u = q - c * p;
  double un = u.norm();
  if (un < 1e-14) return Eigen::MatrixXd::Zero(p.rows(), p.cols());
  return (std::atan2(un, c) / un) * u;
}

}  // namespace detail

/// Riemannian exponential map: endpoint of the geodesic from p with initial
/// velocity v.
inline ManifoldPoint exp_map(const ManifoldPoint& p, const TangentVector& v) {
  detail::require_base(v, p, "exp_map");
  switch (p.spec.kind) {
    case ManifoldKind::Sphere: return {p.spec, detail::sphere_exp(p.value, v.value)};
    case ManifoldKind::Spd: return {p.spec, spd_exp(SpdFactors::of(p.value), v.value)};
    case ManifoldKind::Euclidean: return {p.spec, p.value + v.value};
  }
  return p;
}

/// Riemannian logarithm map: the tangent vector at p whose exponential is q.
inline TangentVector log_map(const ManifoldPoint& p, const ManifoldPoint& q) {
  if (p.spec != q.spec) throw GeometryError("log_map: points on different manifolds");
  switch (p.spec.kind) {
    case ManifoldKind::Sphere: return {p, detail::sphere_log(p.value, q.value)};
    case ManifoldKind::Spd: return {p, spd_log(SpdFactors::of(p.value), q.value)};
    case ManifoldKind::Euclidean: return {p, q.value - p.value};
  }
  return zero_tangent(p);
}

/// Geodesic distance.
inline double dist(const ManifoldPoint& p, const ManifoldPoint& q) {
  if (p.spec != q.spec) throw GeometryError("dist: points on different manifolds");
  switch (p.spec.kind) {
    case ManifoldKind::Sphere:
      return detail::sphere_angle(p.value, q.value);
    case ManifoldKind::Spd: return spd_dist(SpdFactors::of(p.value), q.value);
    case ManifoldKind::Euclidean: return (q.value - p.value).norm();
  }
  return 0.0;
}

/// Point at parameter s in [0,1] on the minimizing geodesic from p to q.
inline ManifoldPoint geodesic_point(const ManifoldPoint& p, const ManifoldPoint& q, double s) {
  TangentVector v = log_map(p, q);
  v.value *= s;
  return exp_map(p, v);
}

/// Parallel transport of v from p to q along the minimizing geodesic.
inline TangentVector transport_point(const ManifoldPoint& p, const ManifoldPoint& q,
                                     const TangentVector& v) {
  detail::require_base(v, p, "transport_point");
  if (p.spec != q.spec) throw GeometryError("transport_point: mismatched manifolds");
  switch (p.spec.kind) {
    case ManifoldKind::Sphere: {
      Eigen::MatrixXd u = detail::sphere_log(p.value, q.value);
      double theta = u.norm();
      if (theta < 1e-14) return {q, v.value};
      Eigen::MatrixXd e = u / theta;
      double a = (e.transpose() * v.value)(0, 0);
      Eigen::MatrixXd perp = v.value - a * e;
      Eigen::MatrixXd moved = perp + a * (std::cos(theta) * e - std::sin(theta) * p.value);
      return {q, moved};
    }
    case ManifoldKind::Spd: {
      // Pointwise log existence always holds on Sym+, but validate q.
      return {q, spd_transport(SpdFactors::of(p.value), q.value, v.value)};
    }
    case ManifoldKind::Euclidean: return {q, v.value};
  }
  return {q, v.value};
}

/// Robust ingestion: normalizes sphere input, symmetrizes and clamps SPD
/// input at the eigenvalue floor.
inline ManifoldPoint project_point(const ManifoldSpec& spec, const Eigen::MatrixXd& raw,
                                   double spd_eig_floor = tol::kProjectEigFloor) {
  detail::require_shape(spec, raw, "project_point");
  if (!raw.allFinite()) throw GeometryError("project_point: non-finite entries");
  switch (spec.kind) {
    case ManifoldKind::Sphere: {
      double norm = raw.norm();
      if (norm < 1e-14)
        throw GeometryError("project_point: cannot normalize a zero vector onto the sphere");
      return {spec, raw / norm};
    }
    case ManifoldKind::Spd: {
      auto es = detail::sym_eig(raw, "project_point");
      Eigen::ArrayXd clamped = es.eigenvalues().array().max(spd_eig_floor);
      Eigen::MatrixXd s = es.eigenvectors() * clamped.matrix().asDiagonal() *
                          es.eigenvectors().transpose();
      return {spec, sym_part(s)};
    }
    case ManifoldKind::Euclidean: return {spec, raw};
  }
  return {spec, raw};
}

}  // namespace rfda
