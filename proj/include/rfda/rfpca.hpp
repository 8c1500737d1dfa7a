#pragma once

// Intrinsic Riemannian functional PCA: log-process extraction, coordinate
// covariance field, weighted discretized eigenproblem, scores, truncated
// reconstruction, and intrinsic/ambient error metrics for eigenfields.

#include <algorithm>
#include <numeric>
#include <vector>

#include "rfda/frame.hpp"
#include "rfda/mean.hpp"

namespace rfda {

/// Discretized d x d matrix-valued covariance function, stored flattened:
/// entry ((s*d + a), (t*d + b)) holds C(s, t)[a, b].
struct CovField {
  TimeGrid grid;
  int dim = 0;
  Eigen::MatrixXd flat;

  Eigen::MatrixXd block(int s, int t) const {
    return flat.block(s * dim, t * dim, dim, dim);
  }
};

/// Fitted intrinsic eigenstructure: mean curve, frame, eigenvalues and
/// coordinate eigenfunctions (each a grid-length x d matrix).
struct EigenSystem {
  ManifoldCurve mean;
  Frame frame;
  Eigen::VectorXd eigenvalues;
  std::vector<Eigen::MatrixXd> eigenfuncs;
  int n_used = 0;

  int rank() const { return static_cast<int>(eigenvalues.size()); }
  CoordField coord_field(int k) const { return {mean.grid, eigenfuncs[k]}; }
};

using ScoreMatrix = Eigen::MatrixXd;  // n x K

/// Log-process of a sample at a candidate mean curve. Cut-locus failures
/// report the sample index and time.
inline std::vector<VectorField> log_process(const Sample& sample, const ManifoldCurve& mean) {
  sample.validate();
  if (sample.spec() != mean.spec || !same_grid(sample.grid(), mean.grid))
    throw ConfigError("log_process: sample and mean are incompatible");
  std::vector<VectorField> out;
  out.reserve(sample.n());
  for (int i = 0; i < sample.n(); ++i) out.push_back(zero_field(mean));
  for (int t = 0; t < mean.size(); ++t) {
    ManifoldPoint base = mean.point(t);
    if (mean.spec.kind == ManifoldKind::Spd) {
      SpdFactors f = SpdFactors::of(base.value);
      for (int i = 0; i < sample.n(); ++i)
        out[i].vectors[t] = spd_log(f, sample.curves[i].points[t]);
    } else {
      for (int i = 0; i < sample.n(); ++i) {
        try {
          out[i].vectors[t] = log_map(base, sample.curves[i].point(t)).value;
        } catch (const AntipodalError& e) {
          throw AntipodalError(std::string(e.what()) + " (sample " + std::to_string(i) +
                               ", t = " + std::to_string(mean.grid.times(t)) + ")");
        }
      }
    }
  }
  return out;
}

/// Frame coordinates of the log-process, computed without materializing the
/// tangent fields. One eigendecomposition per (sample, time) on Sym+.
inline std::vector<CoordField> log_coordinates(const Sample& sample, const ManifoldCurve& mean,
                                               const Frame& frame) {
  sample.validate();
  if (!same_curve(frame.curve, mean))
    throw ConfigError("log_coordinates: frame is not along the mean curve");
  if (sample.spec() != mean.spec || !same_grid(sample.grid(), mean.grid))
    throw ConfigError("log_coordinates: sample and mean are incompatible");
  const int n = sample.n();
  const int m = mean.size();
  const int d = mean.spec.intrinsic_dim();
  std::vector<CoordField> out(n, CoordField{mean.grid, Eigen::MatrixXd(m, d)});

  if (mean.spec.kind == ManifoldKind::Spd) {
    for (int t = 0; t < m; ++t) {
      SpdFactors f = SpdFactors::of(mean.value(t));
      std::vector<Eigen::MatrixXd> whitened_basis(d);
      for (int j = 0; j < d; ++j)
        whitened_basis[j] = f.inv_sqrt * frame.vec(t, j) * f.inv_sqrt;
      for (int i = 0; i < n; ++i) {
        Eigen::MatrixXd a =
            sym_log(sym_part(f.inv_sqrt * sample.curves[i].points[t] * f.inv_sqrt));
        for (int j = 0; j < d; ++j)
          out[i].values(t, j) = (a.array() * whitened_basis[j].array()).sum();
      }
    }
  } else {
    for (int t = 0; t < m; ++t) {
      ManifoldPoint base = mean.point(t);
      for (int i = 0; i < n; ++i) {
        Eigen::MatrixXd lg;
        try {
          lg = log_map(base, sample.curves[i].point(t)).value;
        } catch (const AntipodalError& e) {
          throw AntipodalError(std::string(e.what()) + " (sample " + std::to_string(i) +
                               ", t = " + std::to_string(mean.grid.times(t)) + ")");
        }
        for (int j = 0; j < d; ++j)
          out[i].values(t, j) = (lg.array() * frame.vec(t, j).array()).sum();
      }
    }
  }
  return out;
}

namespace detail {
inline Eigen::VectorXd flatten_coords(const CoordField& z) {
  const int m = z.size(), d = z.dim();
  Eigen::VectorXd v(m * d);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < d; ++j) v(i * d + j) = z.values(i, j);
  return v;
}

inline Eigen::MatrixXd unflatten_coords(const Eigen::VectorXd& v, int m, int d) {
  Eigen::MatrixXd z(m, d);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < d; ++j) z(i, j) = v(i * d + j);
  return z;
}
}  // namespace detail

/// C_E(s,t) = n^{-1} sum_i Z_i(s) Z_i(t)^T.
inline CovField sample_covariance(const std::vector<CoordField>& coords) {
  if (coords.size() < 2)
    throw ConfigError("sample_covariance: need at least two coordinate fields");
  const int m = coords.front().size();
  const int d = coords.front().dim();
  Eigen::MatrixXd z(coords.size(), m * d);
  for (size_t i = 0; i < coords.size(); ++i) {
    if (coords[i].size() != m || coords[i].dim() != d)
      throw ConfigError("sample_covariance: coordinate shape mismatch");
    z.row(i) = detail::flatten_coords(coords[i]).transpose();
  }
  CovField out{coords.front().grid, d, Eigen::MatrixXd()};
  out.flat = (z.transpose() * z) / static_cast<double>(coords.size());
  out.flat = 0.5 * (out.flat + out.flat.transpose()).eval();
  return out;
}

/// Solves the weighted discretized eigenproblem of a covariance field via
/// W^{1/2} C W^{1/2}: eigenfunctions come out orthonormal under the grid
/// quadrature. Negative numerical eigenvalues are clamped to zero and each
/// eigenfunction is scaled so its largest-magnitude entry is positive.
inline EigenSystem eigensystem(const CovField& c, const ManifoldCurve& mean,
                               const Frame& frame, int k) {
  const int m = c.grid.size();
  const int d = c.dim;
  const int full = m * d;
  if (k < 1 || k > full)
    throw ConfigError("eigensystem: rank must lie in [1, grid_size * dim]");
  if (mean.size() != m || frame.dim() != d)
    throw ConfigError("eigensystem: mean/frame incompatible with the covariance field");

  Eigen::VectorXd wrep(full);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < d; ++j) wrep(i * d + j) = c.grid.weights(i);
  Eigen::VectorXd wsqrt = wrep.cwiseSqrt();

  Eigen::MatrixXd b = wsqrt.asDiagonal() * c.flat * wsqrt.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (b + b.transpose()));
  if (es.info() != Eigen::Success) throw Error("eigensystem: eigensolver failed");

  // Eigen returns ascending order; take the top k from the back.
  EigenSystem sys{mean, frame, Eigen::VectorXd(k), {}, 0};
  sys.eigenfuncs.reserve(k);
  for (int r = 0; r < k; ++r) {
    int src = full - 1 - r;
    double lambda = es.eigenvalues()(src);
    sys.eigenvalues(r) = lambda < 0.0 ? 0.0 : lambda;
    Eigen::VectorXd coord = es.eigenvectors().col(src).cwiseQuotient(wsqrt);
    // Sign convention: largest-magnitude coordinate entry made positive.
    int arg = 0;
    for (int a = 1; a < full; ++a)
      if (std::abs(coord(a)) > std::abs(coord(arg))) arg = a;
    if (coord(arg) < 0.0) coord = -coord;
    sys.eigenfuncs.push_back(detail::unflatten_coords(coord, m, d));
  }

  // Deterministic order for numerically tied eigenvalues.
  for (int r = 0; r + 1 < k; ++r) {
    if (std::abs(sys.eigenvalues(r) - sys.eigenvalues(r + 1)) <=
        1e-13 * std::max(1.0, std::abs(sys.eigenvalues(0)))) {
      Eigen::VectorXd a = detail::flatten_coords({c.grid, sys.eigenfuncs[r]});
      Eigen::VectorXd bb = detail::flatten_coords({c.grid, sys.eigenfuncs[r + 1]});
      for (int i = 0; i < full; ++i) {
        if (a(i) == bb(i)) continue;
        if (a(i) < bb(i)) std::swap(sys.eigenfuncs[r], sys.eigenfuncs[r + 1]);
        break;
      }
    }
  }
  return sys;
}

/// iRFPC scores: xi_{ik} = <<Z_i, phi_k>> under the grid quadrature.
inline ScoreMatrix scores(const std::vector<CoordField>& coords, const EigenSystem& sys) {
  if (coords.empty()) throw ConfigError("scores: empty coordinate list");
  const int m = sys.mean.size();
  const int d = sys.mean.spec.intrinsic_dim();
  const int k = sys.rank();
  Eigen::MatrixXd proj(m * d, k);
  Eigen::VectorXd wrep(m * d);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < d; ++j) wrep(i * d + j) = sys.mean.grid.weights(i);
  for (int r = 0; r < k; ++r)
    proj.col(r) = detail::flatten_coords({sys.mean.grid, sys.eigenfuncs[r]}).cwiseProduct(wrep);
  ScoreMatrix out(coords.size(), k);
  for (size_t i = 0; i < coords.size(); ++i) {
    if (coords[i].size() != m || coords[i].dim() != d)
      throw ConfigError("scores: coordinate shape mismatch");
    out.row(i) = detail::flatten_coords(coords[i]).transpose() * proj;
  }
  return out;
}

/// Truncated intrinsic reconstruction: Exp_mean sum_k xi_k phi_k.
inline ManifoldCurve reconstruct(const EigenSystem& sys, const Eigen::VectorXd& score_row) {
  if (score_row.size() > sys.rank())
    throw ConfigError("reconstruct: more scores than eigenfunctions");
  const int m = sys.mean.size();
  const int d = sys.mean.spec.intrinsic_dim();
  Eigen::MatrixXd coords = Eigen::MatrixXd::Zero(m, d);
  for (int r = 0; r < score_row.size(); ++r) coords += score_row(r) * sys.eigenfuncs[r];
  VectorField field = from_coordinates(sys.frame, {sys.mean.grid, coords});
  std::vector<Eigen::MatrixXd> pts(m);
  for (int i = 0; i < m; ++i)
    pts[i] = exp_map(sys.mean.point(i), field.at(i)).value;
  return {sys.mean.spec, sys.mean.grid, std::move(pts)};
}

/// Fraction-of-variance rank selection helper.
inline int select_rank_fve(const Eigen::VectorXd& eigenvalues, double fraction = 0.95) {
  double total = eigenvalues.sum();
  if (total <= 0.0) return 1;
  double acc = 0.0;
  for (int k = 0; k < eigenvalues.size(); ++k) {
    acc += eigenvalues(k);
    if (acc >= fraction * total) return k + 1;
  }
  return static_cast<int>(eigenvalues.size());
}

/// Transport of a whole eigensystem onto another curve: eigenvalues and
/// coordinates are untouched, the frame fields are parallel transported
/// (coordinates against a transported frame represent the transported
/// eigenfields exactly).
inline EigenSystem transport_eigensystem(const EigenSystem& sys, const ManifoldCurve& target) {
  if (sys.mean.spec != target.spec || !same_grid(sys.mean.grid, target.grid))
    throw ConfigError("transport_eigensystem: incompatible target curve");
  EigenSystem out{target, Frame{target, {}}, sys.eigenvalues, sys.eigenfuncs, sys.n_used};
  out.frame.basis.reserve(sys.frame.dim());
  for (const auto& e : sys.frame.basis) out.frame.basis.push_back(transport_field(e, target));
  return out;
}

namespace detail {
/// Materializes eigenfield k of `sys` as a vector field along target (which
/// must equal sys.mean or be reachable by pointwise transport).
inline VectorField eigenfield_along(const EigenSystem& sys, int k, const ManifoldCurve& target) {
  VectorField own = from_coordinates(sys.frame, sys.coord_field(k));
  if (same_curve(sys.mean, target)) return own;
  return transport_field(own, target);
}
}  // namespace detail

/// Hilbert-Schmidt discrepancy || Phi A (-) B || between two rank-truncated
/// covariance operators, computed in factored form after transporting A onto
/// the mean curve of B. Both systems must hold orthonormal eigenfields.
inline double hs_distance(const EigenSystem& a, const EigenSystem& b) {
  if (a.mean.spec != b.mean.spec || !same_grid(a.mean.grid, b.mean.grid))
    throw ConfigError("hs_distance: incompatible systems");
  const int ka = a.rank(), kb = b.rank();
  std::vector<VectorField> af, bf;
  af.reserve(ka);
  bf.reserve(kb);
  for (int k = 0; k < ka; ++k) af.push_back(detail::eigenfield_along(a, k, b.mean));
  for (int k = 0; k < kb; ++k) bf.push_back(from_coordinates(b.frame, b.coord_field(k)));
  double acc = a.eigenvalues.squaredNorm() + b.eigenvalues.squaredNorm();
  for (int i = 0; i < ka; ++i)
    for (int j = 0; j < kb; ++j) {
      double cross = vf_inner(af[i], bf[j]);
      acc -= 2.0 * a.eigenvalues(i) * b.eigenvalues(j) * cross * cross;
    }
  return std::sqrt(std::max(0.0, acc));
}

/// Per-replicate intrinsic eigenfield error || est_k (-)_Gamma truth_k ||
/// after transport to the truth curve and sign alignment.
inline double irmise(const EigenSystem& est, const EigenSystem& truth, int k) {
  if (k < 1 || k > est.rank() || k > truth.rank())
    throw ConfigError("irmise: component index out of range");
  VectorField moved = detail::eigenfield_along(est, k - 1, truth.mean);
  VectorField target = from_coordinates(truth.frame, truth.coord_field(k - 1));
  if (vf_inner(moved, target) < 0.0) moved = vf_scale(moved, -1.0);
  return vf_norm(vf_sub(moved, target));
}

/// Per-replicate ambient eigenfield error on Euclidean submanifolds: plain
/// integrated difference of the ambient representations, no transport. Sign
/// alignment matches irmise (via the transported inner product).
inline double armise(const EigenSystem& est, const EigenSystem& truth, int k) {
  if (est.mean.spec.kind == ManifoldKind::Spd)
    throw ConfigError("armise: no isometric ambient representation for Sym+");
  if (k < 1 || k > est.rank() || k > truth.rank())
    throw ConfigError("armise: component index out of range");
  VectorField est_amb = from_coordinates(est.frame, est.coord_field(k - 1));
  VectorField truth_amb = from_coordinates(truth.frame, truth.coord_field(k - 1));
  VectorField moved = detail::eigenfield_along(est, k - 1, truth.mean);
  double sign = vf_inner(moved, truth_amb) < 0.0 ? -1.0 : 1.0;
  double acc = 0.0;
  for (int i = 0; i < est.mean.size(); ++i)
    acc += est.mean.grid.weights(i) *
           (sign * est_amb.vectors[i] - truth_amb.vectors[i]).squaredNorm();
  return std::sqrt(std::max(0.0, acc));
}

/// Full pipeline convenience: mean, frame, coordinates, covariance,
/// eigensystem with k components.
struct FpcaFit {
  EigenSystem system;
  std::vector<CoordField> coords;
  ScoreMatrix score_matrix;
};

inline FpcaFit fit_fpca(const Sample& sample, int k, const FrechetOptions& opts = {}) {
  sample.validate();
  if (sample.n() < 2) throw ConfigError("fit_fpca: need at least two curves");
  ManifoldCurve mean = frechet_mean_curve(sample, opts);
  Frame frame = frame_along_curve(mean);
  std::vector<CoordField> coords = log_coordinates(sample, mean, frame);
  CovField c = sample_covariance(coords);
  int kk = std::min<int>(k, c.grid.size() * c.dim);
  EigenSystem sys = eigensystem(c, mean, frame, kk);
  sys.n_used = sample.n();
  FpcaFit fit{std::move(sys), std::move(coords), {}};
  fit.score_matrix = scores(fit.coords, fit.system);
  return fit;
}

}  // namespace rfda
