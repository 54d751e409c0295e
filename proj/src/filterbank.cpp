#include "nsgfb/filterbank.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "nsgfb/errors.hpp"

namespace nsgfb {

namespace {

double binomial(int n, int k) {
  double result = 1.0;
  for (int i = 1; i <= k; ++i) result = result * (n - k + i) / i;
  return result;
}

Matrix sylvester(const Polynomial& p0, const Polynomial& p1) {
  const int a = p0.degree();
  const int b = p1.degree();
  Matrix m = Matrix::Zero(a + b, a + b);
  for (int i = 0; i < b; ++i) {
    for (int k = 0; k <= a; ++k) m(i + k, i) = p0.coefficient(k);
  }
  for (int i = 0; i < a; ++i) {
    for (int k = 0; k <= b; ++k) m(i + k, b + i) = p1.coefficient(k);
  }
  return m;
}

}  // namespace

AnalysisBank make_analysis_bank(const Graph& g, SparseMatrix h0, SparseMatrix h1) {
  if (h0.rows() != static_cast<Eigen::Index>(g.size()) || h1.rows() != h0.rows() ||
      h0.cols() != h0.rows() || h1.cols() != h1.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "analysis filters must be N x N");
  }
  AnalysisBank bank;
  bank.h0 = {std::move(h0), 0};
  bank.h1 = {std::move(h1), 0};
  bank.h0.bandwidth = measured_bandwidth(g, bank.h0.matrix);
  bank.h1.bandwidth = measured_bandwidth(g, bank.h1.matrix);
  bank.bandwidth = std::max(bank.h0.bandwidth, bank.h1.bandwidth);
  return bank;
}

AnalysisBank polynomial_analysis(const Graph& g, const Polynomial& p0, const Polynomial& p1) {
  const SparseMatrix l = laplacian_sym(g).matrix;
  AnalysisBank bank;
  bank.h0 = materialize_polynomial(g, l, p0);
  bank.h1 = materialize_polynomial(g, l, p1);
  bank.bandwidth = std::max(bank.h0.bandwidth, bank.h1.bandwidth);
  bank.polynomials = std::make_pair(p0, p1);
  return bank;
}

AnalysisBank spline_analysis(const Graph& g, int n) {
  if (n < 1) throw Error(ErrorKind::InvariantViolation, "spline order must be >= 1");
  return polynomial_analysis(g, spline_lowpass(n), spline_highpass(n));
}

std::string to_string(SynthesisProvenance p) {
  switch (p) {
    case SynthesisProvenance::Bezout: return "Bezout";
    case SynthesisProvenance::LiftedBezout: return "Lifted-Bezout";
    case SynthesisProvenance::LeastSquares: return "LeastSquares";
  }
  return "Bezout";
}

SynthesisProvenance synthesis_provenance_from_string(const std::string& s) {
  if (s == "Bezout") return SynthesisProvenance::Bezout;
  if (s == "Lifted-Bezout") return SynthesisProvenance::LiftedBezout;
  if (s == "LeastSquares") return SynthesisProvenance::LeastSquares;
  throw Error(ErrorKind::ParseError, "unknown synthesis provenance \"" + s + "\"");
}

SynthesisBank bezout_synthesis_spline(int n) {
  if (n < 1) throw Error(ErrorKind::InvariantViolation, "spline order must be >= 1");
  const Polynomial low = Polynomial({1.0, -0.5});  // 1 - t/2
  const Polynomial high = Polynomial({0.0, 0.5});  // t/2
  auto power = [](const Polynomial& p, int k) {
    Polynomial r = Polynomial::constant(1.0);
    for (int i = 0; i < k; ++i) r = r * p;
    return r;
  };
  Polynomial q0, q1;
  for (int l = 0; l < n; ++l) {
    const double c = binomial(2 * n - 1, l);
    q0 = q0 + power(low, n - 1 - l) * power(high, l) * c;
    q1 = q1 + power(high, n - 1 - l) * power(low, l) * c;
  }
  const double middle = binomial(2 * n - 1, n - 1);
  q0 = q0 + power(high, n) * middle;
  q1 = q1 - power(low, n) * middle;
  return {q0, q1, SynthesisProvenance::Bezout};
}

double scaled_resultant(const Polynomial& p0, const Polynomial& p1) {
  if (p0.is_zero() || p1.is_zero()) return 0.0;
  const Polynomial s0 = p0 * (1.0 / p0.max_abs_coefficient());
  const Polynomial s1 = p1 * (1.0 / p1.max_abs_coefficient());
  if (s0.degree() + s1.degree() == 0) return 1.0;
  return sylvester(s0, s1).determinant();
}

SynthesisBank bezout_synthesis_general(const Polynomial& p0, const Polynomial& p1,
                                       const Polynomial& residual, const BezoutOptions& options) {
  if (p0.is_zero() || p1.is_zero()) {
    throw Error(ErrorKind::Degenerate, "Bezout synthesis needs two nonzero polynomials");
  }
  const double res = scaled_resultant(p0, p1);
  if (std::abs(res) < options.resultant_tolerance) {
    throw Error(ErrorKind::CommonRoot, "analysis polynomials share a root (|resultant| = " +
                                           std::to_string(std::abs(res)) + ")");
  }
  const int a = p0.degree();
  const int b = p1.degree();
  Polynomial q0, q1;
  if (a + b == 0) {
    q0 = Polynomial::constant(1.0 / p0.coefficient(0));
  } else {
    Vector rhs = Vector::Zero(a + b);
    rhs[0] = 1.0;
    const Vector sol = sylvester(p0, p1).fullPivLu().solve(rhs);
    q0 = Polynomial(std::vector<double>(sol.data(), sol.data() + b));
    q1 = Polynomial(std::vector<double>(sol.data() + b, sol.data() + a + b));
  }
  // Constant residual that moves Q1(0) to zero; raises degrees by at most one.
  if (const double p00 = p0(0.0); p00 != 0.0) {
    const double c = q1(0.0) / p00;
    q0 = q0 + p1 * c;
    q1 = q1 - p0 * c;
  }
  if (!residual.is_zero()) {
    q0 = q0 + residual * p1;
    q1 = q1 - residual * p0;
  }
  return {q0, q1, SynthesisProvenance::Bezout};
}

SynthesisBank lift(const SynthesisBank& bank, const AnalysisBank& analysis) {
  if (!analysis.polynomials) {
    throw Error(ErrorKind::Degenerate, "lifting needs a polynomial analysis bank");
  }
  const auto& [p0, p1] = *analysis.polynomials;
  const double c = bank.q1(0.0);
  SynthesisBank out = bank;
  if (c != 0.0) {
    out.q0 = bank.q0 + p1 * c;
    out.q1 = bank.q1 - p0 * c;
  }
  out.provenance = SynthesisProvenance::LiftedBezout;
  return out;
}

std::pair<GraphFilter, GraphFilter> materialize_synthesis(const Graph& g, const SynthesisBank& bank) {
  const SparseMatrix l = laplacian_sym(g).matrix;
  return {materialize_polynomial(g, l, bank.q0), materialize_polynomial(g, l, bank.q1)};
}

Vector synthesize(const SparseMatrix& laplacian, const SynthesisBank& bank, const Vector& z0,
                  const Vector& z1) {
  return apply_polynomial(laplacian, bank.q0, z0) + apply_polynomial(laplacian, bank.q1, z1);
}

Vector synthesize_local(const GraphFilter& g0, const GraphFilter& g1, const Vector& z0, const Vector& z1) {
  const Eigen::Index n = g0.matrix.rows();
  if (z0.size() != n || z1.size() != n) {
    throw Error(ErrorKind::DimensionMismatch, "subband length differs from vertex count");
  }
  Vector x(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    double acc = 0.0;
    for (SparseMatrix::InnerIterator it(g0.matrix, k); it; ++it) acc += it.value() * z0[it.col()];
    for (SparseMatrix::InnerIterator it(g1.matrix, k); it; ++it) acc += it.value() * z1[it.col()];
    x[k] = acc;
  }
  return x;
}

SparseMatrix frame_operator(const AnalysisBank& bank) {
  SparseMatrix h = SparseMatrix(bank.h0.matrix.transpose()) * bank.h0.matrix;
  h += SparseMatrix(SparseMatrix(bank.h1.matrix.transpose()) * bank.h1.matrix);
  h.prune(0.0);
  return h;
}

std::string to_string(KappaSource s) { return s == KappaSource::Exact ? "exact" : "lanczos"; }

ExtremalEigenvalues extremal_eigenvalues(const SparseMatrix& h, const StabilityOptions& options) {
  const auto n = h.rows();
  if (static_cast<std::size_t>(n) <= options.dense_ceiling) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(Matrix(h), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
      throw Error(ErrorKind::ConvergenceFailure, "dense eigensolver failed on H");
    }
    return {solver.eigenvalues()[0], solver.eigenvalues()[n - 1], KappaSource::Exact};
  }

  // Lanczos with full reorthogonalization; extremal Ritz values converge first.
  const Eigen::Index max_steps = std::min<Eigen::Index>(n, 600);
  Matrix basis(n, max_steps);
  std::vector<double> alpha, beta;
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> normal;
  Vector q(n);
  for (auto& v : q) v = normal(rng);
  q.normalize();
  double prev_min = 0.0, prev_max = 0.0;
  ExtremalEigenvalues out{0.0, 0.0, KappaSource::Lanczos};
  for (Eigen::Index k = 0; k < max_steps; ++k) {
    basis.col(k) = q;
    Vector w = h * q;
    alpha.push_back(q.dot(w));
    for (int pass = 0; pass < 2; ++pass) {
      w -= basis.leftCols(k + 1) * (basis.leftCols(k + 1).transpose() * w);
    }
    const double b = w.norm();
    const bool exhausted = b < 1e-12 * std::abs(alpha.back()) || k + 1 == max_steps;
    if ((k + 1) % 10 == 0 || exhausted) {
      Eigen::SelfAdjointEigenSolver<Matrix> tri;
      Vector diag = Eigen::Map<Vector>(alpha.data(), static_cast<Eigen::Index>(alpha.size()));
      Vector off = Eigen::Map<Vector>(beta.data(), static_cast<Eigen::Index>(beta.size()));
      tri.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
      out.min = tri.eigenvalues()[0];
      out.max = tri.eigenvalues()[diag.size() - 1];
      const double tol = options.lanczos_tolerance;
      if (exhausted || (k > 10 && std::abs(out.min - prev_min) <= tol * std::abs(out.min) &&
                        std::abs(out.max - prev_max) <= tol * std::abs(out.max))) {
        return out;
      }
      prev_min = out.min;
      prev_max = out.max;
    }
    beta.push_back(b);
    q = w / b;
  }
  return out;
}

StabilityReport check_assumptions(const Graph& g, const AnalysisBank& bank,
                                  const std::optional<GrowthProfile>& growth,
                                  const StabilityOptions& options) {
  StabilityReport report;
  report.bandwidth = bank.bandwidth;
  report.bandwidth_ok = bank.bandwidth >= 1;
  const Vector c = normalized_constant(g);
  const double scale = c.cwiseAbs().maxCoeff();
  report.passes_constant =
      (bank.h0 * c - c).cwiseAbs().maxCoeff() <= options.constant_tolerance * scale;
  report.blocks_constant = (bank.h1 * c).cwiseAbs().maxCoeff() <= options.constant_tolerance * scale;
  report.schur_h0 = schur_norm(bank.h0);
  report.schur_h1 = schur_norm(bank.h1);

  const SparseMatrix h = frame_operator(bank);
  const auto ext = extremal_eigenvalues(h, options);
  if (!(ext.min > 1e-12 * std::max(ext.max, 1.0))) {
    throw Error(ErrorKind::NotPositiveDefinite,
                "H0^T H0 + H1^T H1 is singular (lambda_min = " + std::to_string(ext.min) + ")");
  }
  report.lambda_min = ext.min;
  report.lambda_max = ext.max;
  report.kappa_source = ext.source;
  report.c2 = std::sqrt(ext.min);
  report.d2 = std::sqrt(ext.max);
  report.kappa = std::max(1.0, ext.max / ext.min);
  report.theta = report.kappa > 1.0 ? std::log(report.kappa / (report.kappa - 1.0))
                                    : std::numeric_limits<double>::infinity();
  if (growth) {
    const double d = growth->dimension;
    const double d1 = growth->density;
    const double sigma = bank.bandwidth;
    const double root = std::sqrt(ext.max);
    report.lp_upper_bound = 2.0 * d1 * std::pow(sigma + 1.0, d) * root;
    report.lp_lower_bound = root / (std::tgamma(d + 1.0) * std::pow(2.0, d + 1.0) * d1 * d1 *
                                    std::pow(sigma + 1.0, 2.0 * d) * std::pow(report.kappa, d + 2.0));
  }
  return report;
}

double bezout_error_bound(const GrowthProfile& growth, int synthesis_bandwidth, double g0_max_entry,
                          double g1_max_entry, double eps) {
  return growth.density * std::pow(synthesis_bandwidth + 1.0, growth.dimension) *
         (g0_max_entry + g1_max_entry) * eps;
}

}  // namespace nsgfb
