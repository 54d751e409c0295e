#pragma once

#include <optional>
#include <vector>

#include "nsgfb/filterbank.hpp"

namespace nsgfb {

enum class LsMode { DenseOracle, Implicit };

/// Least-squares synthesis G_l = H^{-1} H_l^T with H = H0^T H0 + H1^T H1.
/// In Implicit mode only H and its conditioning are kept; the synthesis is
/// then carried out by the distributed solver.
struct LsSynthesis {
  AnalysisBank analysis;
  SparseMatrix h;
  LsMode mode = LsMode::Implicit;
  Matrix g0;  // dense, DenseOracle mode only
  Matrix g1;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double kappa = 1.0;
  double theta = 0.0;
  KappaSource kappa_source = KappaSource::Exact;

  /// ||H^{-1}||_{B_2}
  double inverse_norm() const { return 1.0 / lambda_min; }
};

struct LsOptions {
  std::size_t dense_ceiling = 5000;
  StabilityOptions stability{};
};

LsSynthesis ls_synthesis_dense(const AnalysisBank& analysis, const LsOptions& options = {});

/// Spline bank of order n with LS synthesis; dense when N fits the ceiling.
LsSynthesis spline_ls_synthesis(const Graph& g, int n, const LsOptions& options = {});

/// Conditioning only (no dense G).
LsSynthesis ls_synthesis_implicit(const AnalysisBank& analysis, const StabilityOptions& options = {});

/// x_tilde = H^{-1}(H0^T z0 + H1^T z1) by sparse Cholesky; exact reference for
/// large graphs where the dense oracle is too expensive.
class LsDirectSolver {
 public:
  explicit LsDirectSolver(const AnalysisBank& analysis);
  Vector solve(const Vector& z0, const Vector& z1) const;

 private:
  SparseMatrix h0t_, h1t_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor_;
};

struct DecaySample {
  Vertex i;
  Vertex j;
  int rho;
  double abs_g0;
  double abs_g1;
  double bound0;
  double bound1;
};

struct DecayCertificate {
  std::vector<DecaySample> samples;
  std::size_t violations = 0;
  double worst_ratio = 0.0;  // max over samples and l of |g_l| / bound_l (0 when bound is 0 and g is 0)
  bool banded_case = false;  // kappa == 1: bound is constant inside the bandwidth, 0 outside
  KappaSource kappa_source = KappaSource::Exact;
};

struct DecayOptions {
  double slack = 1e-12;
  std::size_t exhaustive_limit = 1000;  // above this N, sample pairs at random
  std::size_t sample_pairs = 200'000;
  std::uint64_t seed = 1;
};

/// Checks |g_l(i,j)| against
/// D1 (sigma+1)^d (1-1/kappa)^{-1/2} ||H^{-1}||_{B_2} ||H_l||_inf exp(-theta rho(i,j) / (2 sigma)).
/// For kappa == 1 the banded bound ||H^{-1}||_{B_2} ||H_l||_inf [rho <= sigma] is used.
DecayCertificate decay_certificate(const Graph& g, const LsSynthesis& ls, const GrowthProfile& growth,
                                   const DecayOptions& options = {});

/// Contraction factor of the distributed iteration at radius r:
/// D1^2 (2 sigma+1)^d kappa^2 / (kappa-1) exp(-theta r / (2 sigma)) (3r + 2 sigma + 1)^d.
/// Returns 0 for kappa <= 1.
double contraction_factor(const GrowthProfile& growth, int sigma, double kappa, int r);

/// Smallest r in [0, r_max] with contraction_factor < target, if any.
std::optional<int> smallest_radius(const GrowthProfile& growth, int sigma, double kappa, double target,
                                   int r_max = 10'000);

/// l^p filter bound of G_{l,L}:
/// d! 2^d D1^2 (sigma+1)^{2d} kappa^{d+1} (1-1/kappa)^{-1/2} ||H^{-1}||_{B_2} ||H_l||_inf.
double ls_filter_bound(const GrowthProfile& growth, int sigma, double kappa, double inverse_norm,
                       double h_max_entry);

/// Output error bound under subband perturbations of size eps (same constant
/// with ||H0||_inf + ||H1||_inf).
double ls_error_bound(const GrowthProfile& growth, int sigma, double kappa, double inverse_norm,
                      double h0_max_entry, double h1_max_entry, double eps);

}  // namespace nsgfb
