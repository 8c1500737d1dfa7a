#pragma once

// Pointwise Frechet (Karcher) mean estimation: fixed-point iteration
// p <- Exp_p(step * sum_i w_i Log_p x_i) with step halving on objective
// increase.

#include <optional>
#include <vector>

#include "rfda/curve.hpp"
#include "rfda/parallel.hpp"

namespace rfda {

struct FrechetOptions {
  double step_size = 1.0;
  double grad_tol = 1e-10;
  int max_iters = 200;
  bool warm_start = true;  // curve mode: seed each t from the previous mean
  int threads = 1;         // used only when warm_start is off

  void validate() const {
    if (!(step_size > 0.0 && step_size < 2.0))
      throw ConfigError("FrechetOptions: step_size must lie in (0, 2)");
    if (!(grad_tol > 0.0)) throw ConfigError("FrechetOptions: grad_tol must be positive");
    if (max_iters < 1) throw ConfigError("FrechetOptions: max_iters must be >= 1");
  }
};

/// n curves sharing one grid and spec.
struct Sample {
  std::vector<ManifoldCurve> curves;

  int n() const { return static_cast<int>(curves.size()); }
  const ManifoldSpec& spec() const { return curves.front().spec; }
  const TimeGrid& grid() const { return curves.front().grid; }

  void validate() const {
    if (curves.empty()) throw ConfigError("Sample: need at least one curve");
    for (const auto& c : curves)
      if (!compatible_curves(c, curves.front()))
        throw ConfigError("Sample: curves must share one grid and manifold");
  }
};

namespace detail {

struct MeanObjective {
  double value = 0.0;            // F_n(p) = sum_i w_i d^2(x_i, p)
  Eigen::MatrixXd gradient;      // sum_i w_i Log_p x_i (tangent at p)
  double gradient_norm = 0.0;
};

// One evaluation of F_n and its tangent-space gradient; SPD points share the
// base factorization so each sample costs one eigendecomposition.
inline MeanObjective eval_mean_objective(const ManifoldPoint& p,
                                         const std::vector<const Eigen::MatrixXd*>& xs,
                                         const std::vector<double>& w) {
  MeanObjective out;
  out.gradient = Eigen::MatrixXd::Zero(p.spec.rows(), p.spec.cols());
  switch (p.spec.kind) {
    case ManifoldKind::Sphere: {
      for (size_t i = 0; i < xs.size(); ++i) {
        Eigen::MatrixXd lg = sphere_log(p.value, *xs[i]);
        out.value += w[i] * lg.squaredNorm();
        out.gradient += w[i] * lg;
      }
      out.gradient_norm = out.gradient.norm();
      break;
    }
    case ManifoldKind::Spd: {
      SpdFactors f = SpdFactors::of(p.value);
      Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(p.spec.size, p.spec.size);
      for (size_t i = 0; i < xs.size(); ++i) {
        Eigen::MatrixXd whitened = sym_log(sym_part(f.inv_sqrt * (*xs[i]) * f.inv_sqrt));
        out.value += w[i] * whitened.squaredNorm();
        acc += w[i] * whitened;
      }
      out.gradient_norm = acc.norm();  // conjugation by f is an isometry here
      out.gradient = sym_part(f.sqrt * acc * f.sqrt);
      break;
    }
    case ManifoldKind::Euclidean: {
      for (size_t i = 0; i < xs.size(); ++i) {
        Eigen::MatrixXd diff = *xs[i] - p.value;
        out.value += w[i] * diff.squaredNorm();
        out.gradient += w[i] * diff;
      }
      out.gradient_norm = out.gradient.norm();
      break;
    }
  }
  return out;
}

inline ManifoldPoint chordal_start(const ManifoldSpec& spec,
                                   const std::vector<const Eigen::MatrixXd*>& xs,
                                   const std::vector<double>& w) {
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(spec.rows(), spec.cols());
  for (size_t i = 0; i < xs.size(); ++i) acc += w[i] * (*xs[i]);
  if (spec.kind == ManifoldKind::Sphere && acc.norm() < 1e-10) return {spec, *xs[0]};
  return project_point(spec, acc);
}

inline ManifoldPoint frechet_mean_impl(const ManifoldSpec& spec,
                                       const std::vector<const Eigen::MatrixXd*>& xs,
                                       const std::vector<double>& w,
                                       const FrechetOptions& opts,
                                       const ManifoldPoint* init) {
  ManifoldPoint p = init ? *init : chordal_start(spec, xs, w);

  if (spec.kind == ManifoldKind::Sphere) {
    for (size_t i = 0; i < xs.size(); ++i) {
      double c = detail::clamp_unit((p.value.transpose() * (*xs[i]))(0, 0));
      if (c < -1.0 + 1e-9)
        throw DispersedDataError(
            "frechet_mean: a sample point is antipodal to the initial estimate");
    }
  }

  MeanObjective cur = eval_mean_objective(p, xs, w);
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    if (cur.gradient_norm <= opts.grad_tol) return p;
    double step = opts.step_size;
    bool accepted = false;
    for (int halving = 0; halving <= 10; ++halving) {
      ManifoldPoint cand = exp_map(p, TangentVector{p, step * cur.gradient});
      MeanObjective next = eval_mean_objective(cand, xs, w);
      if (next.value <= cur.value * (1.0 + 1e-14) + 1e-300) {
        p = cand;
        cur = next;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted)
      throw ConvergenceError("frechet_mean: objective stalled at gradient norm " +
                             std::to_string(cur.gradient_norm));
  }
  if (cur.gradient_norm <= opts.grad_tol) return p;
  throw ConvergenceError("frechet_mean: iteration budget exhausted at gradient norm " +
                         std::to_string(cur.gradient_norm));
}

}  // namespace detail

/// Weighted Frechet mean of a point cloud. Weights must be nonnegative and
/// sum to one.
inline ManifoldPoint frechet_mean_point(const std::vector<ManifoldPoint>& points,
                                        const std::vector<double>& weights,
                                        const FrechetOptions& opts = {},
                                        const ManifoldPoint* init = nullptr) {
  opts.validate();
  if (points.empty()) throw ConfigError("frechet_mean_point: empty point set");
  if (weights.size() != points.size())
    throw ConfigError("frechet_mean_point: weight count mismatch");
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw ConfigError("frechet_mean_point: negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-8)
    throw ConfigError("frechet_mean_point: weights must sum to one");
  const ManifoldSpec& spec = points.front().spec;
  std::vector<const Eigen::MatrixXd*> xs;
  xs.reserve(points.size());
  for (const auto& q : points) {
    if (q.spec != spec) throw ConfigError("frechet_mean_point: mixed manifolds");
    xs.push_back(&q.value);
  }
  return detail::frechet_mean_impl(spec, xs, weights, opts, init);
}

inline ManifoldPoint frechet_mean_point(const std::vector<ManifoldPoint>& points,
                                        const FrechetOptions& opts = {}) {
  return frechet_mean_point(
      points, std::vector<double>(points.size(), 1.0 / points.size()), opts);
}

/// Pointwise Frechet mean curve of a sample. Warm-start mode runs the grid
/// serially, seeding each time point with the previous mean; otherwise every
/// time point starts from the chordal projection and may run concurrently.
inline ManifoldCurve frechet_mean_curve(const Sample& sample, const FrechetOptions& opts = {}) {
  opts.validate();
  sample.validate();
  const int m = sample.grid().size();
  const int n = sample.n();
  const ManifoldSpec& spec = sample.spec();
  std::vector<double> w(n, 1.0 / n);
  std::vector<Eigen::MatrixXd> mean_points(m);

  auto solve_at = [&](int i, const ManifoldPoint* init) {
    std::vector<const Eigen::MatrixXd*> xs;
    xs.reserve(n);
    for (const auto& c : sample.curves) xs.push_back(&c.points[i]);
    try {
      return detail::frechet_mean_impl(spec, xs, w, opts, init);
    } catch (const ConvergenceError& e) {
      throw ConvergenceError(std::string(e.what()) + " at t = " +
                             std::to_string(sample.grid().times(i)));
    } catch (const DispersedDataError& e) {
      throw DispersedDataError(std::string(e.what()) + " at t = " +
                               std::to_string(sample.grid().times(i)));
    }
  };

  if (opts.warm_start) {
    ManifoldPoint seed = sample.curves.front().point(0);
    for (int i = 0; i < m; ++i) {
      ManifoldPoint mu = solve_at(i, &seed);
      mean_points[i] = mu.value;
      seed = mu;
    }
  } else {
    parallel_for(m, opts.threads, [&](int i) { mean_points[i] = solve_at(i, nullptr).value; });
  }
  return {spec, sample.grid(), std::move(mean_points)};
}

}  // namespace rfda
