#pragma once

#include <optional>
#include <string>
#include <utility>

#include "nsgfb/graph.hpp"
#include "nsgfb/polynomial.hpp"
#include "nsgfb/spectral.hpp"

namespace nsgfb {

/// Analysis pair (H0, H1). Assumptions on the pair are not enforced here;
/// check_assumptions reports them.
struct AnalysisBank {
  GraphFilter h0;
  GraphFilter h1;
  int bandwidth = 0;
  /// Present when H_l = P_l(L_sym).
  std::optional<std::pair<Polynomial, Polynomial>> polynomials;

  std::size_t size() const { return static_cast<std::size_t>(h0.matrix.rows()); }
};

/// Bank from explicit matrices; bandwidth measured on g.
AnalysisBank make_analysis_bank(const Graph& g, SparseMatrix h0, SparseMatrix h1);

/// Bank H_l = P_l(L_sym) materialized on g.
AnalysisBank polynomial_analysis(const Graph& g, const Polynomial& p0, const Polynomial& p1);

/// P0 = (1 - t/2)^n, P1 = (t/2)^n.
AnalysisBank spline_analysis(const Graph& g, int n);

enum class SynthesisProvenance { Bezout, LiftedBezout, LeastSquares };
std::string to_string(SynthesisProvenance p);
SynthesisProvenance synthesis_provenance_from_string(const std::string& s);

/// Polynomial synthesis pair G_l = Q_l(L_sym). Graph independent; use
/// materialize_synthesis to get explicit filters on a particular graph.
struct SynthesisBank {
  Polynomial q0;
  Polynomial q1;
  SynthesisProvenance provenance = SynthesisProvenance::Bezout;

  int bandwidth() const { return std::max(q0.degree(), q1.degree()); }
};

/// Closed-form spline Bezout pair of order n.
SynthesisBank bezout_synthesis_spline(int n);

struct BezoutOptions {
  /// |resultant| below this (after scaling each polynomial to unit max
  /// coefficient) is treated as a common root.
  double resultant_tolerance = 1e-12;
};

/// Canonical Bezout solution normalized so Q1(0) = 0, with deg Q0 <= deg P1 and
/// deg Q1 <= deg P0, followed by the residual freedom
/// Q0 += R P1, Q1 -= R P0.
SynthesisBank bezout_synthesis_general(const Polynomial& p0, const Polynomial& p1,
                                       const Polynomial& residual = {},
                                       const BezoutOptions& options = {});

/// Resultant of the two polynomials after unit-max-coefficient scaling.
double scaled_resultant(const Polynomial& p0, const Polynomial& p1);

/// G0 + Q1(0) H1, G1 - Q1(0) H0 (carried out on the polynomials).
SynthesisBank lift(const SynthesisBank& bank, const AnalysisBank& analysis);

std::pair<GraphFilter, GraphFilter> materialize_synthesis(const Graph& g, const SynthesisBank& bank);

/// G0 z0 + G1 z1 evaluated with polynomial matvecs.
Vector synthesize(const SparseMatrix& laplacian, const SynthesisBank& bank, const Vector& z0,
                  const Vector& z1);

/// Per-vertex form x(k) = sum over rho(j,k) <= bandwidth of g0(k,j) z0(j) + g1(k,j) z1(j).
Vector synthesize_local(const GraphFilter& g0, const GraphFilter& g1, const Vector& z0, const Vector& z1);

/// H = H0^T H0 + H1^T H1 (bandwidth 2 sigma).
SparseMatrix frame_operator(const AnalysisBank& bank);

enum class KappaSource { Exact, Lanczos };
std::string to_string(KappaSource s);

struct StabilityReport {
  double c2 = 0.0;
  double d2 = 0.0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double kappa = 1.0;
  double theta = 0.0;  // +inf when kappa == 1
  KappaSource kappa_source = KappaSource::Exact;
  double schur_h0 = 0.0;
  double schur_h1 = 0.0;
  int bandwidth = 0;
  bool bandwidth_ok = false;        // sigma >= 1
  bool passes_constant = false;     // H0 D^{1/2} 1 = D^{1/2} 1
  bool blocks_constant = false;     // H1 D^{1/2} 1 = 0
  /// Certified l^p stability bounds (valid for every p), present when a
  /// growth profile was supplied. These are bounds, not optimal constants.
  std::optional<double> lp_lower_bound;
  std::optional<double> lp_upper_bound;
};

struct StabilityOptions {
  std::size_t dense_ceiling = 2500;
  double lanczos_tolerance = 1e-6;
  double constant_tolerance = 1e-9;
};

/// Extremal eigenvalues of a symmetric positive semidefinite sparse matrix.
struct ExtremalEigenvalues {
  double min = 0.0;
  double max = 0.0;
  KappaSource source = KappaSource::Exact;
};
ExtremalEigenvalues extremal_eigenvalues(const SparseMatrix& h, const StabilityOptions& options = {});

/// Throws NotPositiveDefinite when H is singular.
StabilityReport check_assumptions(const Graph& g, const AnalysisBank& bank,
                                  const std::optional<GrowthProfile>& growth = std::nullopt,
                                  const StabilityOptions& options = {});

/// sup over ||delta_l||_inf <= eps of ||x_tilde - x||_p is bounded by
/// D1 (sigma_tilde + 1)^d (||G0||_inf + ||G1||_inf) eps.
double bezout_error_bound(const GrowthProfile& growth, int synthesis_bandwidth, double g0_max_entry,
                          double g1_max_entry, double eps);

}  // namespace nsgfb
