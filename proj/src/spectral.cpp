#include "nsgfb/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "nsgfb/errors.hpp"

namespace nsgfb {

GraphFilter laplacian_sym(const Graph& g) {
  const std::size_t n = g.size();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(n + 2 * g.edge_count());
  for (std::size_t i = 0; i < n; ++i) {
    const auto vi = static_cast<Vertex>(i);
    triplets.emplace_back(vi, vi, 1.0);
    const double di = static_cast<double>(g.degree(vi));
    for (Vertex j : g.neighbors(vi)) {
      triplets.emplace_back(vi, j, -1.0 / std::sqrt(di * static_cast<double>(g.degree(j))));
    }
  }
  GraphFilter l;
  l.matrix.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  l.matrix.setFromTriplets(triplets.begin(), triplets.end());
  l.bandwidth = 1;
  return l;
}

Vector normalized_constant(const Graph& g) {
  Vector v(static_cast<Eigen::Index>(g.size()));
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = std::sqrt(static_cast<double>(g.degree(i)));
  return v;
}

Vector apply_polynomial(const SparseMatrix& laplacian, const Polynomial& p, const Vector& x) {
  if (x.size() != laplacian.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "signal length differs from vertex count");
  }
  if (p.is_zero()) return Vector::Zero(x.size());
  const auto& c = p.coefficients();
  Vector y = c.back() * x;
  for (int k = static_cast<int>(c.size()) - 2; k >= 0; --k) {
    Vector next = laplacian * y;
    next += c[k] * x;
    y.swap(next);
  }
  return y;
}

Vector apply_polynomial(const Graph& g, const Polynomial& p, const Vector& x) {
  return apply_polynomial(laplacian_sym(g).matrix, p, x);
}

GraphFilter materialize_polynomial(const Graph& g, const Polynomial& p,
                                   const MaterializeOptions& options) {
  return materialize_polynomial(g, laplacian_sym(g).matrix, p, options);
}

GraphFilter materialize_polynomial(const Graph& g, const SparseMatrix& laplacian, const Polynomial& p,
                                   const MaterializeOptions& options) {
  const auto n = static_cast<Eigen::Index>(g.size());
  const int radius = p.degree();
  std::vector<Eigen::Triplet<double>> triplets;
  Vector unit = Vector::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    unit[j] = 1.0;
    const Vector column = apply_polynomial(laplacian, p, unit);
    unit[j] = 0.0;
    // Outside B(j, deg p) the column is structurally zero.
    const auto dist = g.distances_from(static_cast<Vertex>(j), radius);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (dist[i] >= 0 && column[i] != 0.0) triplets.emplace_back(i, j, column[i]);
    }
    if (triplets.size() > options.max_nonzeros) {
      throw Error(ErrorKind::BudgetExceeded, "materialized filter exceeds nonzero budget");
    }
  }
  GraphFilter f;
  f.matrix.resize(n, n);
  f.matrix.setFromTriplets(triplets.begin(), triplets.end());
  f.bandwidth = radius;
  return f;
}

Spectrum eigendecompose(const Graph& g, const EigenOptions& options) {
  if (g.size() > options.max_vertices) {
    throw Error(ErrorKind::BudgetExceeded, "dense eigendecomposition above vertex ceiling");
  }
  const Matrix dense = Matrix(laplacian_sym(g).matrix);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(dense);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::ConvergenceFailure, "symmetric eigensolver did not converge");
  }
  Spectrum s{solver.eigenvalues(), solver.eigenvectors(), 0.0};
  for (Eigen::Index m = 0; m < s.eigenvalues.size(); ++m) {
    const double clamped = std::clamp(s.eigenvalues[m], 0.0, 2.0);
    s.max_clamp = std::max(s.max_clamp, std::abs(clamped - s.eigenvalues[m]));
    s.eigenvalues[m] = clamped;
  }
  return s;
}

Vector spectral_apply(const Spectrum& spectrum, const Polynomial& p, const Vector& x) {
  Vector coeffs = spectrum.eigenvectors.transpose() * x;
  for (Eigen::Index m = 0; m < coeffs.size(); ++m) coeffs[m] *= p(spectrum.eigenvalues[m]);
  return spectrum.eigenvectors * coeffs;
}

double row_sum_norm(const SparseMatrix& a) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < a.outerSize(); ++i) {
    double sum = 0.0;
    for (SparseMatrix::InnerIterator it(a, i); it; ++it) sum += std::abs(it.value());
    best = std::max(best, sum);
  }
  return best;
}

double column_sum_norm(const SparseMatrix& a) {
  std::vector<double> sums(static_cast<std::size_t>(a.cols()), 0.0);
  for (Eigen::Index i = 0; i < a.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(a, i); it; ++it) sums[it.col()] += std::abs(it.value());
  }
  return sums.empty() ? 0.0 : *std::max_element(sums.begin(), sums.end());
}

double schur_norm(const SparseMatrix& a) { return std::max(row_sum_norm(a), column_sum_norm(a)); }

double max_abs_entry(const SparseMatrix& a) {
  double best = 0.0;
  for (Eigen::Index i = 0; i < a.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(a, i); it; ++it) best = std::max(best, std::abs(it.value()));
  }
  return best;
}

int measured_bandwidth(const Graph& g, const SparseMatrix& a) {
  int sigma = 0;
  for (Eigen::Index i = 0; i < a.outerSize(); ++i) {
    std::vector<int> dist;
    for (SparseMatrix::InnerIterator it(a, i); it; ++it) {
      if (it.value() == 0.0 || it.col() == i) continue;
      if (dist.empty()) dist = g.distances_from(static_cast<Vertex>(i));
      sigma = std::max(sigma, dist[it.col()]);
    }
  }
  return sigma;
}

double l2_filter_bound(const Spectrum& spectrum, const Polynomial& p) {
  double best = 0.0;
  for (Eigen::Index m = 0; m < spectrum.eigenvalues.size(); ++m) {
    best = std::max(best, std::abs(p(spectrum.eigenvalues[m])));
  }
  return best;
}

}  // namespace nsgfb
