#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "rfda/manifold.hpp"

namespace rfda {

/// Sorted sampling times in [0,1] with quadrature weights (composite
/// trapezoid by default, so the weights sum to the span exactly).
struct TimeGrid {
  Eigen::VectorXd times;
  Eigen::VectorXd weights;

  int size() const { return static_cast<int>(times.size()); }
  double span() const { return times(times.size() - 1) - times(0); }

  static TimeGrid from_times(const Eigen::VectorXd& t) {
    int m = static_cast<int>(t.size());
    if (m < 2) throw ConfigError("TimeGrid: need at least two time points");
    for (int i = 1; i < m; ++i)
      if (!(t(i) > t(i - 1))) throw ConfigError("TimeGrid: times must be strictly increasing");
    Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
    for (int i = 0; i + 1 < m; ++i) {
      double h = 0.5 * (t(i + 1) - t(i));
      w(i) += h;
      w(i + 1) += h;
    }
    return {t, w};
  }

  static TimeGrid uniform(int m, double a = 0.0, double b = 1.0) {
    if (m < 2) throw ConfigError("TimeGrid: need at least two time points");
    return from_times(Eigen::VectorXd::LinSpaced(m, a, b));
  }

  void validate() const {
    if (times.size() != weights.size() || times.size() < 2)
      throw ConfigError("TimeGrid: times/weights size mismatch");
    for (int i = 1; i < size(); ++i)
      if (!(times(i) > times(i - 1)))
        throw ConfigError("TimeGrid: times must be strictly increasing");
    if (weights.minCoeff() <= 0.0) throw ConfigError("TimeGrid: weights must be positive");
    if (std::abs(weights.sum() - span()) > 1e-12 * std::max(1.0, span()))
      throw ConfigError("TimeGrid: weights do not sum to the span");
  }
};

inline bool same_grid(const TimeGrid& a, const TimeGrid& b, double eps = 1e-12) {
  return a.times.size() == b.times.size() &&
         (a.times - b.times).cwiseAbs().maxCoeff() <= eps;
}

/// A manifold-valued curve sampled on a time grid. All points share one
/// ManifoldSpec by construction.
struct ManifoldCurve {
  ManifoldSpec spec;
  TimeGrid grid;
  std::vector<Eigen::MatrixXd> points;

  int size() const { return static_cast<int>(points.size()); }
  const Eigen::MatrixXd& value(int i) const { return points[i]; }
  ManifoldPoint point(int i) const { return {spec, points[i]}; }
};

inline ManifoldCurve make_curve(const ManifoldSpec& spec, const TimeGrid& grid,
                                std::vector<Eigen::MatrixXd> points) {
  grid.validate();
  if (static_cast<int>(points.size()) != grid.size())
    throw ConfigError("make_curve: number of points does not match the grid");
  ManifoldCurve c{spec, grid, std::move(points)};
  for (int i = 0; i < c.size(); ++i) check_point(c.point(i));
  return c;
}

/// Constant curve sitting at one point.
inline ManifoldCurve constant_curve(const ManifoldPoint& p, const TimeGrid& grid) {
  return {p.spec, grid, std::vector<Eigen::MatrixXd>(grid.size(), p.value)};
}

inline bool compatible_curves(const ManifoldCurve& a, const ManifoldCurve& b) {
  return a.spec == b.spec && same_grid(a.grid, b.grid);
}

inline bool same_curve(const ManifoldCurve& a, const ManifoldCurve& b,
                       double eps = tol::kPointEq) {
  if (!compatible_curves(a, b)) return false;
  for (int i = 0; i < a.size(); ++i)
    if (!same_point(a.point(i), b.point(i), eps)) return false;
  return true;
}

/// A field of tangent vectors along a curve: vectors[i] is tangent at
/// curve.points[i].
struct VectorField {
  ManifoldCurve curve;
  std::vector<Eigen::MatrixXd> vectors;

  int size() const { return static_cast<int>(vectors.size()); }
  TangentVector at(int i) const { return {curve.point(i), vectors[i]}; }
};

inline VectorField zero_field(const ManifoldCurve& curve) {
  return {curve, std::vector<Eigen::MatrixXd>(
                     curve.size(), Eigen::MatrixXd::Zero(curve.spec.rows(), curve.spec.cols()))};
}

inline VectorField make_field(const ManifoldCurve& curve,
                              std::vector<Eigen::MatrixXd> vectors) {
  if (static_cast<int>(vectors.size()) != curve.size())
    throw ConfigError("make_field: number of vectors does not match the curve");
  VectorField f{curve, std::move(vectors)};
  for (int i = 0; i < f.size(); ++i) f.vectors[i] = make_tangent(curve.point(i), f.vectors[i]).value;
  return f;
}

namespace detail {
inline void require_same_curve(const VectorField& u, const VectorField& v, const char* what) {
  if (!same_curve(u.curve, v.curve))
    throw ConfigError(std::string(what) + ": fields live along different curves");
}
}  // namespace detail

inline VectorField vf_add(const VectorField& u, const VectorField& v) {
  detail::require_same_curve(u, v, "vf_add");
  VectorField out = u;
  for (int i = 0; i < out.size(); ++i) out.vectors[i] += v.vectors[i];
  return out;
}

inline VectorField vf_sub(const VectorField& u, const VectorField& v) {
  detail::require_same_curve(u, v, "vf_sub");
  VectorField out = u;
  for (int i = 0; i < out.size(); ++i) out.vectors[i] -= v.vectors[i];
  return out;
}

inline VectorField vf_scale(const VectorField& u, double a) {
  VectorField out = u;
  for (auto& v : out.vectors) v *= a;
  return out;
}

}  // namespace rfda
