#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "nsgfb/graph.hpp"
#include "nsgfb/polynomial.hpp"

namespace nsgfb {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

inline constexpr int kFullBandwidth = -1;

/// Vertex-indexed sparse filter A = (a(i,j)) with a(i,j) = 0 whenever
/// rho(i,j) > bandwidth. kFullBandwidth marks a filter with no such bound.
struct GraphFilter {
  SparseMatrix matrix;
  int bandwidth = kFullBandwidth;

  Vector operator*(const Vector& x) const { return matrix * x; }
};

/// L_sym = I - D^{-1/2} A D^{-1/2}, bandwidth 1.
GraphFilter laplacian_sym(const Graph& g);

/// D^{1/2} 1, the eigenvector of L_sym for eigenvalue 0 (unnormalized).
Vector normalized_constant(const Graph& g);

/// P(L) x by Horner's scheme with sparse matvecs only.
Vector apply_polynomial(const SparseMatrix& laplacian, const Polynomial& p, const Vector& x);
Vector apply_polynomial(const Graph& g, const Polynomial& p, const Vector& x);

struct MaterializeOptions {
  std::size_t max_nonzeros = 50'000'000;
};

/// Explicit P(L) assembled column by column from apply_polynomial on unit
/// vectors; bandwidth = deg(p).
GraphFilter materialize_polynomial(const Graph& g, const Polynomial& p,
                                   const MaterializeOptions& options = {});
GraphFilter materialize_polynomial(const Graph& g, const SparseMatrix& laplacian, const Polynomial& p,
                                   const MaterializeOptions& options = {});

/// L_sym = U diag(eigenvalues) U^T with eigenvectors as columns of U.
struct Spectrum {
  Vector eigenvalues;  // ascending, clamped into [0, 2]
  Matrix eigenvectors;
  double max_clamp = 0.0;  // largest amount any eigenvalue was moved by clamping
};

struct EigenOptions {
  std::size_t max_vertices = 5000;
};

/// Dense oracle; never used by the main pipelines.
Spectrum eigendecompose(const Graph& g, const EigenOptions& options = {});

/// U P(Lambda) U^T x
Vector spectral_apply(const Spectrum& spectrum, const Polynomial& p, const Vector& x);

/// max(max absolute row sum, max absolute column sum).
double schur_norm(const SparseMatrix& a);
inline double schur_norm(const GraphFilter& f) { return schur_norm(f.matrix); }
/// ||A||_{B_inf}: max absolute row sum.
double row_sum_norm(const SparseMatrix& a);
/// ||A||_{B_1}: max absolute column sum.
double column_sum_norm(const SparseMatrix& a);
/// ||A||_inf in the entrywise sense: sup |a(i,j)|.
double max_abs_entry(const SparseMatrix& a);

/// Smallest sigma with a(i,j) = 0 for rho(i,j) > sigma (exact zeros only).
int measured_bandwidth(const Graph& g, const SparseMatrix& a);

/// ||P(L)||_{B_2} = max over eigenvalues |P(lambda)|.
double l2_filter_bound(const Spectrum& spectrum, const Polynomial& p);

}  // namespace nsgfb
