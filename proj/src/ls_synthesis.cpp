#include "nsgfb/ls_synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "nsgfb/errors.hpp"

namespace nsgfb {

namespace {

void set_conditioning(LsSynthesis& ls, double lmin, double lmax, KappaSource source) {
  if (!(lmin > 1e-12 * std::max(lmax, 1.0))) {
    throw Error(ErrorKind::NotPositiveDefinite, "H is singular (lambda_min = " + std::to_string(lmin) + ")");
  }
  ls.lambda_min = lmin;
  ls.lambda_max = lmax;
  ls.kappa_source = source;
  ls.kappa = std::max(1.0, lmax / lmin);
  ls.theta = ls.kappa > 1.0 ? std::log(ls.kappa / (ls.kappa - 1.0)) : std::numeric_limits<double>::infinity();
}

}  // namespace

LsSynthesis ls_synthesis_dense(const AnalysisBank& analysis, const LsOptions& options) {
  if (analysis.size() > options.dense_ceiling) {
    throw Error(ErrorKind::BudgetExceeded, "dense least-squares synthesis above vertex ceiling");
  }
  LsSynthesis ls;
  ls.analysis = analysis;
  ls.h = frame_operator(analysis);
  ls.mode = LsMode::DenseOracle;
  const Matrix h = Matrix(ls.h);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(h, Eigen::EigenvaluesOnly);
  const auto n = h.rows();
  set_conditioning(ls, eig.eigenvalues()[0], eig.eigenvalues()[n - 1], KappaSource::Exact);
  Eigen::LLT<Matrix> llt(h);
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::NotPositiveDefinite, "Cholesky of H failed");
  ls.g0 = llt.solve(Matrix(analysis.h0.matrix.transpose()));
  ls.g1 = llt.solve(Matrix(analysis.h1.matrix.transpose()));
  return ls;
}

LsSynthesis ls_synthesis_implicit(const AnalysisBank& analysis, const StabilityOptions& options) {
  LsSynthesis ls;
  ls.analysis = analysis;
  ls.h = frame_operator(analysis);
  ls.mode = LsMode::Implicit;
  const auto ext = extremal_eigenvalues(ls.h, options);
  set_conditioning(ls, ext.min, ext.max, ext.source);
  return ls;
}

LsSynthesis spline_ls_synthesis(const Graph& g, int n, const LsOptions& options) {
  auto analysis = spline_analysis(g, n);
  if (g.size() <= options.dense_ceiling) return ls_synthesis_dense(analysis, options);
  return ls_synthesis_implicit(analysis, options.stability);
}

LsDirectSolver::LsDirectSolver(const AnalysisBank& analysis)
    : h0t_(analysis.h0.matrix.transpose()), h1t_(analysis.h1.matrix.transpose()) {
  factor_.compute(Eigen::SparseMatrix<double>(frame_operator(analysis)));
  if (factor_.info() != Eigen::Success) {
    throw Error(ErrorKind::NotPositiveDefinite, "sparse factorization of H failed");
  }
}

Vector LsDirectSolver::solve(const Vector& z0, const Vector& z1) const {
  const Vector rhs = h0t_ * z0 + h1t_ * z1;
  return factor_.solve(rhs);
}

DecayCertificate decay_certificate(const Graph& g, const LsSynthesis& ls, const GrowthProfile& growth,
                                   const DecayOptions& options) {
  if (ls.mode != LsMode::DenseOracle) {
    throw Error(ErrorKind::BudgetExceeded, "decay certificate needs the dense oracle");
  }
  DecayCertificate cert;
  cert.kappa_source = ls.kappa_source;
  cert.banded_case = ls.kappa <= 1.0;
  const double sigma = std::max(1, ls.analysis.bandwidth);
  const double h0_inf = max_abs_entry(ls.analysis.h0.matrix);
  const double h1_inf = max_abs_entry(ls.analysis.h1.matrix);
  const double inv = ls.inverse_norm();

  double prefactor = inv;
  if (!cert.banded_case) {
    prefactor *= growth.density * std::pow(sigma + 1.0, growth.dimension) /
                 std::sqrt(1.0 - 1.0 / ls.kappa);
  }
  auto bound_at = [&](int rho, double h_inf) {
    if (cert.banded_case) return rho <= ls.analysis.bandwidth ? inv * h_inf : 0.0;
    return prefactor * h_inf * std::exp(-ls.theta * rho / (2.0 * sigma));
  };

  auto record = [&](Vertex i, Vertex j, int rho) {
    DecaySample s{i, j, rho, std::abs(ls.g0(i, j)), std::abs(ls.g1(i, j)), bound_at(rho, h0_inf),
                  bound_at(rho, h1_inf)};
    for (auto [value, bound] : {std::pair{s.abs_g0, s.bound0}, std::pair{s.abs_g1, s.bound1}}) {
      if (value > bound + options.slack) ++cert.violations;
      if (bound > 0.0) {
        cert.worst_ratio = std::max(cert.worst_ratio, value / bound);
      } else if (value > options.slack) {
        cert.worst_ratio = std::numeric_limits<double>::infinity();
      }
    }
    cert.samples.push_back(s);
  };

  const std::size_t n = g.size();
  if (n <= options.exhaustive_limit) {
    cert.samples.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto dist = g.distances_from(static_cast<Vertex>(i));
      for (std::size_t j = 0; j < n; ++j) record(static_cast<Vertex>(i), static_cast<Vertex>(j), dist[j]);
    }
  } else {
    std::mt19937_64 rng(options.seed);
    std::uniform_int_distribution<Vertex> pick(0, static_cast<Vertex>(n - 1));
    const std::size_t per_row = std::max<std::size_t>(1, options.sample_pairs / n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto dist = g.distances_from(static_cast<Vertex>(i));
      for (std::size_t s = 0; s < per_row; ++s) {
        const Vertex j = pick(rng);
        record(static_cast<Vertex>(i), j, dist[j]);
      }
    }
  }
  return cert;
}

double contraction_factor(const GrowthProfile& growth, int sigma, double kappa, int r) {
  if (kappa <= 1.0) return 0.0;
  const double d = growth.dimension;
  const double theta = std::log(kappa / (kappa - 1.0));
  return growth.density * growth.density * std::pow(2.0 * sigma + 1.0, d) * kappa * kappa / (kappa - 1.0) *
         std::exp(-theta * r / (2.0 * sigma)) * std::pow(3.0 * r + 2.0 * sigma + 1.0, d);
}

std::optional<int> smallest_radius(const GrowthProfile& growth, int sigma, double kappa, double target,
                                   int r_max) {
  for (int r = 0; r <= r_max; ++r) {
    if (contraction_factor(growth, sigma, kappa, r) < target) return r;
  }
  return std::nullopt;
}

double ls_filter_bound(const GrowthProfile& growth, int sigma, double kappa, double inverse_norm,
                       double h_max_entry) {
  const double d = growth.dimension;
  const double decay = kappa > 1.0 ? 1.0 / std::sqrt(1.0 - 1.0 / kappa) : 1.0;
  return std::tgamma(d + 1.0) * std::pow(2.0, d) * growth.density * growth.density *
         std::pow(sigma + 1.0, 2.0 * d) * std::pow(kappa, d + 1.0) * decay * inverse_norm * h_max_entry;
}

double ls_error_bound(const GrowthProfile& growth, int sigma, double kappa, double inverse_norm,
                      double h0_max_entry, double h1_max_entry, double eps) {
  return ls_filter_bound(growth, sigma, kappa, inverse_norm, h0_max_entry + h1_max_entry) * eps;
}

}  // namespace nsgfb
