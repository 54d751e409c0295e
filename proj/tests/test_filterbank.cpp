#include <doctest.h>

#include <cmath>
#include <random>

#include "nsgfb/errors.hpp"
#include "nsgfb/filterbank.hpp"

using namespace nsgfb;

namespace {

Vector random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector x(static_cast<Eigen::Index>(n));
  for (auto& v : x) v = u(rng);
  return x;
}

double identity_residual(const Polynomial& p0, const Polynomial& p1, const SynthesisBank& s, int samples = 50) {
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double t = 2.0 * k / (samples - 1);
    worst = std::max(worst, std::abs(p0(t) * s.q0(t) + p1(t) * s.q1(t) - 1.0));
  }
  return worst;
}

SparseMatrix scaled_identity(std::size_t n, double c) {
  SparseMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  m.setIdentity();
  return m * c;
}

}  // namespace

TEST_CASE("spline analysis bank") {
  SUBCASE("order 1 on a single edge") {
    const auto bank = spline_analysis(path_graph(2), 1);
    const Matrix h0 = Matrix(bank.h0.matrix);
    const Matrix h1 = Matrix(bank.h1.matrix);
    CHECK(h0(0, 0) == doctest::Approx(0.5));
    CHECK(h0(0, 1) == doctest::Approx(0.5));
    CHECK(h1(0, 0) == doctest::Approx(0.5));
    CHECK(h1(0, 1) == doctest::Approx(-0.5));
    CHECK(bank.bandwidth == 1);
  }
  SUBCASE("order 2 is the square of order 1") {
    auto g = generate_rgg(64, 12).graph;
    const Matrix a = Matrix(spline_analysis(g, 1).h0.matrix);
    const Matrix b = Matrix(spline_analysis(g, 2).h0.matrix);
    CHECK((a * a - b).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("l2 norms at most 1") {
    auto g = generate_rgg(64, 12).graph;
    for (int n = 1; n <= 3; ++n) {
      const auto bank = spline_analysis(g, n);
      Eigen::SelfAdjointEigenSolver<Matrix> e0(Matrix(bank.h0.matrix), Eigen::EigenvaluesOnly);
      Eigen::SelfAdjointEigenSolver<Matrix> e1(Matrix(bank.h1.matrix), Eigen::EigenvaluesOnly);
      CHECK(e0.eigenvalues().cwiseAbs().maxCoeff() <= 1 + 1e-12);
      CHECK(e1.eigenvalues().cwiseAbs().maxCoeff() <= 1 + 1e-12);
    }
  }
  CHECK_THROWS_AS(spline_analysis(path_graph(3), 0), Error);
}

TEST_CASE("spline Bezout synthesis") {
  SUBCASE("order 1 closed form") {
    const auto s = bezout_synthesis_spline(1);
    CHECK(s.q0.coefficients() == std::vector<double>{1.0, 0.5});
    CHECK(s.q1.coefficients() == std::vector<double>{0.0, 0.5});
  }
  SUBCASE("identity for n <= 5") {
    for (int n = 1; n <= 5; ++n) {
      const auto s = bezout_synthesis_spline(n);
      CHECK(identity_residual(spline_lowpass(n), spline_highpass(n), s) < 1e-10);
      CHECK(s.q1(0.0) == 0.0);
      CHECK(s.q0.degree() <= n);
      CHECK(s.q1.degree() <= n);
    }
  }
  SUBCASE("G1 blocks D^1/2 1") {
    auto g = generate_rgg(64, 2).graph;
    const auto [g0, g1] = materialize_synthesis(g, bezout_synthesis_spline(3));
    const Vector c = normalized_constant(g);
    CHECK((g1 * c).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((g0 * c - c).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("general Bezout synthesis") {
  SUBCASE("recovers the spline pair") {
    for (int n = 1; n <= 4; ++n) {
      const auto a = bezout_synthesis_general(spline_lowpass(n), spline_highpass(n));
      const auto b = bezout_synthesis_spline(n);
      for (int k = 0; k <= n; ++k) {
        CHECK(a.q0.coefficient(k) == doctest::Approx(b.q0.coefficient(k)).epsilon(1e-12));
        CHECK(a.q1.coefficient(k) == doctest::Approx(b.q1.coefficient(k)).epsilon(1e-12));
      }
    }
  }
  SUBCASE("common root") {
    try {
      bezout_synthesis_general(Polynomial::monomial(1), Polynomial::monomial(1));
      FAIL("expected CommonRoot");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::CommonRoot);
    }
  }
  SUBCASE("zero residual leaves the canonical pair") {
    const Polynomial p0({1.0, -0.3, 0.02});
    const Polynomial p1({0.0, 0.4, 0.1});
    const auto a = bezout_synthesis_general(p0, p1);
    const auto b = bezout_synthesis_general(p0, p1, Polynomial());
    CHECK(a.q0.coefficients() == b.q0.coefficients());
    CHECK(a.q1.coefficients() == b.q1.coefficients());
    CHECK(identity_residual(p0, p1, a) < 1e-10);
  }
  SUBCASE("residual keeps the identity") {
    const Polynomial p0 = spline_lowpass(2);
    const Polynomial p1 = spline_highpass(2);
    const auto s = bezout_synthesis_general(p0, p1, Polynomial({0.3, -0.1}));
    CHECK(identity_residual(p0, p1, s) < 1e-10);
    CHECK(s.q0.degree() == 3);
  }
  SUBCASE("degenerate input") {
    CHECK_THROWS_AS(bezout_synthesis_general(Polynomial(), Polynomial::constant(1)), Error);
  }
}

TEST_CASE("lifting") {
  auto g = generate_rgg(64, 21).graph;
  const auto analysis = spline_analysis(g, 2);
  SUBCASE("Q1(0) = 0 is a fixed point") {
    const auto s = bezout_synthesis_spline(2);
    const auto lifted = lift(s, analysis);
    CHECK(lifted.q0.coefficients() == s.q0.coefficients());
    CHECK(lifted.q1.coefficients() == s.q1.coefficients());
    CHECK(lifted.provenance == SynthesisProvenance::LiftedBezout);
  }
  SUBCASE("lifting a pair with Q1(0) != 0") {
    auto s = bezout_synthesis_spline(2);
    const Polynomial r = Polynomial::constant(0.3);
    s.q0 = s.q0 + r * analysis.polynomials->second;
    s.q1 = s.q1 - r * analysis.polynomials->first;
    CHECK(s.q1(0.0) == doctest::Approx(-0.3));
    const auto lifted = lift(s, analysis);
    const Vector c = normalized_constant(g);
    const auto [g0, g1] = materialize_synthesis(g, lifted);
    CHECK((g1 * c).cwiseAbs().maxCoeff() < 1e-10);
    const auto [b0, b1] = materialize_synthesis(g, s);
    const auto n = static_cast<Eigen::Index>(g.size());
    const Matrix id = Matrix::Identity(n, n);
    const Matrix before = Matrix(b0.matrix * analysis.h0.matrix + b1.matrix * analysis.h1.matrix) - id;
    const Matrix after = Matrix(g0.matrix * analysis.h0.matrix + g1.matrix * analysis.h1.matrix) - id;
    CHECK(before.cwiseAbs().maxCoeff() < 1e-8);
    CHECK(after.cwiseAbs().maxCoeff() < 1e-8);
  }
  SUBCASE("needs polynomial analysis") {
    auto bank = make_analysis_bank(g, analysis.h0.matrix, analysis.h1.matrix);
    try {
      lift(bezout_synthesis_spline(2), bank);
      FAIL("expected Degenerate");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Degenerate);
    }
  }
}

TEST_CASE("synthesis routes agree") {
  auto g = generate_rgg(64, 30).graph;
  const auto l = laplacian_sym(g).matrix;
  const auto bank = bezout_synthesis_spline(2);
  const auto [g0, g1] = materialize_synthesis(g, bank);
  const Vector z0 = random_vector(64, 1);
  const Vector z1 = random_vector(64, 2);
  const Vector a = synthesize(l, bank, z0, z1);
  const Vector b = synthesize_local(g0, g1, z0, z1);
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-13);
  CHECK(g0.bandwidth == bank.bandwidth());
}

TEST_CASE("frame operator and assumptions") {
  SUBCASE("spline bounds") {
    auto g = generate_rgg(256, 4).graph;
    for (int n = 1; n <= 3; ++n) {
      const auto r = check_assumptions(g, spline_analysis(g, n));
      CHECK(r.c2 >= std::pow(2.0, -n + 0.5) - 1e-9);
      CHECK(r.d2 <= 1 + 1e-9);
      CHECK(r.kappa <= std::pow(2.0, 2 * n - 1) + 1e-9);
      CHECK(r.passes_constant);
      CHECK(r.blocks_constant);
      CHECK(r.bandwidth == n);
      CHECK(r.bandwidth_ok);
    }
  }
  SUBCASE("scaled identity pair") {
    const Graph g = path_graph(4);
    const auto bank = make_analysis_bank(g, scaled_identity(4, 1 / std::sqrt(2.0)), scaled_identity(4, 1 / std::sqrt(2.0)));
    const auto r = check_assumptions(g, bank);
    CHECK(r.kappa == doctest::Approx(1));
    CHECK(r.c2 == doctest::Approx(1));
    CHECK(r.d2 == doctest::Approx(1));
    CHECK(std::isinf(r.theta));
    CHECK_FALSE(r.bandwidth_ok);
  }
  SUBCASE("singular frame") {
    const Graph g = path_graph(3);
    const auto bank = make_analysis_bank(g, scaled_identity(3, 0.0), laplacian_sym(g).matrix);
    try {
      check_assumptions(g, bank);
      FAIL("expected NotPositiveDefinite");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NotPositiveDefinite);
    }
  }
  SUBCASE("certified lp bounds bracket the l2 constants") {
    auto g = generate_rgg(64, 4).graph;
    const auto r = check_assumptions(g, spline_analysis(g, 1), estimate_growth(g, 8));
    REQUIRE(r.lp_lower_bound);
    CHECK(*r.lp_lower_bound <= r.c2);
    CHECK(*r.lp_upper_bound >= r.d2);
  }
  SUBCASE("Lanczos agrees with the dense solver") {
    auto g = generate_rgg(400, 6).graph;
    const SparseMatrix h = frame_operator(spline_analysis(g, 2));
    StabilityOptions dense;
    StabilityOptions lanczos;
    lanczos.dense_ceiling = 10;
    const auto a = extremal_eigenvalues(h, dense);
    const auto b = extremal_eigenvalues(h, lanczos);
    CHECK(a.source == KappaSource::Exact);
    CHECK(b.source == KappaSource::Lanczos);
    CHECK(b.min == doctest::Approx(a.min).epsilon(1e-5));
    CHECK(b.max == doctest::Approx(a.max).epsilon(1e-5));
  }
}

TEST_CASE("Bezout error bound dominates actual perturbation error") {
  auto g = generate_rgg(256, 8).graph;
  const auto growth = estimate_growth(g, 10);
  const auto analysis = spline_analysis(g, 1);
  const auto bank = bezout_synthesis_spline(1);
  const auto [g0, g1] = materialize_synthesis(g, bank);
  const auto l = laplacian_sym(g).matrix;
  const double eps = 1e-3;
  const double bound = bezout_error_bound(growth, bank.bandwidth(), max_abs_entry(g0.matrix), max_abs_entry(g1.matrix), eps);
  const Vector x = random_vector(256, 3);
  const Vector z0 = analysis.h0 * x + eps * random_vector(256, 4);
  const Vector z1 = analysis.h1 * x + eps * random_vector(256, 5);
  const Vector y = synthesize(l, bank, z0, z1);
  CHECK((y - x).cwiseAbs().maxCoeff() <= bound);
}
