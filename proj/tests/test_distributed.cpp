#include <doctest.h>

#include <cmath>
#include <random>

#include "nsgfb/distributed.hpp"
#include "nsgfb/errors.hpp"
#include "nsgfb/ls_synthesis.hpp"

using namespace nsgfb;

namespace {

Vector random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector x(static_cast<Eigen::Index>(n));
  for (auto& v : x) v = u(rng);
  return x;
}

Vector dense_ls(const AnalysisBank& bank, const Vector& z0, const Vector& z1) {
  const Matrix h = Matrix(frame_operator(bank));
  const Vector rhs = bank.h0.matrix.transpose() * z0 + bank.h1.matrix.transpose() * z1;
  return h.llt().solve(rhs);
}

}  // namespace

TEST_CASE("local solve") {
  const Graph p5 = path_graph(5);
  const auto bank = spline_analysis(p5, 1);
  const Vector z0 = random_vector(5, 1);
  const Vector z1 = random_vector(5, 2);
  const Matrix h = Matrix(frame_operator(bank));
  const Vector rhs = bank.h0.matrix.transpose() * z0 + bank.h1.matrix.transpose() * z1;

  SUBCASE("ball covering the graph gives the global solution") {
    const Vector v = local_solve(bank, p5, 2, 2, z0, z1);
    CHECK((v - dense_ls(bank, z0, z1)).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("r = 0 is the Jacobi update") {
    for (Vertex k = 0; k < 5; ++k) {
      const Vector v = local_solve(bank, p5, k, 0, z0, z1);
      CHECK(v[k] == doctest::Approx(rhs[k] / h(k, k)).epsilon(1e-14));
      CHECK(v.cwiseAbs().sum() == doctest::Approx(std::abs(v[k])));
    }
  }
  SUBCASE("P5, k = 2, r = 1 matches the principal submatrix solve") {
    // B(2, 2) = {0, ..., 4}; use k = 0 as well, where B(0, 2) = {0, 1, 2}.
    const Vector v = local_solve(bank, p5, 0, 1, z0, z1);
    const Matrix sub = h.topLeftCorner(3, 3);
    const Vector expect = sub.inverse() * rhs.head(3);
    CHECK((v.head(3) - expect).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(v.tail(2).cwiseAbs().maxCoeff() == 0.0);
    const Vector w = local_solve(bank, p5, 2, 1, z0, z1);
    CHECK((w - h.inverse() * rhs).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("singular principal submatrix") {
    const Graph p3 = path_graph(3);
    SparseMatrix zero(3, 3);
    SparseMatrix diag(3, 3);
    diag.insert(0, 0) = 1.0;
    diag.insert(1, 1) = 1.0;
    diag.makeCompressed();
    const auto bad = make_analysis_bank(p3, zero, diag);
    try {
      local_solve(bad, p3, 2, 0, Vector::Zero(3), Vector::Zero(3));
      FAIL("expected LocalSingular");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::LocalSingular);
    }
    CHECK_THROWS_AS(DistributedReconstructor(p3, bad, 0), Error);
  }
}

TEST_CASE("patching") {
  const Graph p5 = path_graph(5);
  SUBCASE("identical locals") {
    const Vector w = random_vector(5, 3);
    const std::vector<Vector> locals(5, w);
    for (int r = 0; r <= 3; ++r) CHECK((patch(p5, r, locals) - w).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("r = 0 picks the own value") {
    std::vector<Vector> locals;
    for (int k = 0; k < 5; ++k) locals.push_back(random_vector(5, 10 + k));
    const Vector v = patch(p5, 0, locals);
    for (int k = 0; k < 5; ++k) CHECK(v[k] == locals[k][k]);
  }
  SUBCASE("P5, r = 1 by hand") {
    std::vector<Vector> locals;
    for (int k = 0; k < 5; ++k) locals.push_back(random_vector(5, 20 + k));
    const Vector v = patch(p5, 1, locals);
    CHECK(v[0] == doctest::Approx((locals[0][0] + locals[1][0]) / 2));
    CHECK(v[2] == doctest::Approx((locals[1][2] + locals[2][2] + locals[3][2]) / 3));
    CHECK(v[4] == doctest::Approx((locals[3][4] + locals[4][4]) / 2));
  }
}

TEST_CASE("patched update equals local solves plus patching") {
  auto g = generate_rgg(64, 8).graph;
  const auto bank = spline_analysis(g, 1);
  const Vector z0 = random_vector(64, 1);
  const Vector z1 = random_vector(64, 2);
  for (int r : {0, 1, 2}) {
    DistributedReconstructor solver(g, bank, r);
    std::vector<Vector> locals;
    for (Vertex k = 0; k < 64; ++k) locals.push_back(local_solve(bank, g, k, r, z0, z1));
    CHECK((solver.apply_j(z0, z1) - patch(g, r, locals)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("distributed reconstruction") {
  SUBCASE("single edge converges in one iteration") {
    const Graph g = path_graph(2);
    const auto bank = spline_analysis(g, 1);
    const Vector z0 = random_vector(2, 1);
    const Vector z1 = random_vector(2, 2);
    const Vector ref = dense_ls(bank, z0, z1);
    for (int r = 1; r <= 3; ++r) {
      const auto res = run_distributed(bank, g, r, z0, z1, {}, ref);
      CHECK(res.status == RunStatus::Converged);
      CHECK(res.trace.records.front().err_inf < 1e-14);
      CHECK((res.x - ref).cwiseAbs().maxCoeff() < 1e-14);
    }
  }
  SUBCASE("r = 2 error after two iterations is small") {
    auto g = generate_rgg(1024, 5).graph;
    const auto bank = spline_analysis(g, 1);
    const Vector x = random_vector(1024, 7);
    RunOptions opts;
    opts.max_iter = 2;
    const auto res = run_distributed(bank, g, 2, bank.h0 * x, bank.h1 * x, opts, x);
    const double e2 = res.trace.records[1].rel_err_inf;
    MESSAGE("E_{2,2} = " << e2);
    CHECK(e2 >= 0.0007 / 10);
    CHECK(e2 <= 0.0007 * 10);
  }
  SUBCASE("order 2 with r = 0 diverges") {
    auto g = generate_rgg(1024, 5).graph;
    const auto bank = spline_analysis(g, 2);
    const Vector x = random_vector(1024, 7);
    RunOptions opts;
    opts.max_iter = 14;
    opts.on_divergence = DivergencePolicy::Stop;
    const auto res = run_distributed(bank, g, 0, bank.h0 * x, bank.h1 * x, opts, x);
    CHECK(res.trace.records.back().rel_err_inf > 10.0);
    RunOptions strict;
    try {
      run_distributed(bank, g, 0, bank.h0 * x, bank.h1 * x, strict, x);
      FAIL("expected Diverged");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Diverged);
    }
  }
  SUBCASE("converges to the least-squares solution") {
    auto g = generate_rgg(256, 2).graph;
    const auto bank = spline_analysis(g, 2);
    const Vector z0 = random_vector(256, 3);
    const Vector z1 = random_vector(256, 4);
    const Vector ref = dense_ls(bank, z0, z1);
    const auto res = run_distributed(bank, g, 2, z0, z1, {}, ref);
    CHECK(res.status == RunStatus::Converged);
    CHECK((res.x - ref).cwiseAbs().maxCoeff() < 1e-9);
  }
  SUBCASE("dimension mismatch") {
    const Graph g = path_graph(3);
    CHECK_THROWS_AS(run_distributed(spline_analysis(g, 1), g, 1, Vector::Zero(2), Vector::Zero(3)), Error);
  }
}

TEST_CASE("global and message-passing execution are bit-identical") {
  auto g = generate_rgg(128, 6).graph;
  for (int n = 1; n <= 2; ++n) {
    const auto bank = spline_analysis(g, n);
    const Vector z0 = random_vector(128, 10 + n);
    const Vector z1 = random_vector(128, 20 + n);
    for (int r : {0, 1, 2}) {
      DistributedReconstructor solver(g, bank, r);
      RunOptions opts;
      opts.max_iter = 12;
      opts.on_divergence = DivergencePolicy::Stop;
      const auto a = solver.run(z0, z1, opts);
      opts.mode = ExecutionMode::MessagePassing;
      const auto b = solver.run(z0, z1, opts);
      REQUIRE(a.trace.records.size() == b.trace.records.size());
      CHECK((a.x.array() == b.x.array()).all());
      CHECK((a.z0.array() == b.z0.array()).all());
      CHECK((a.z1.array() == b.z1.array()).all());
      for (std::size_t m = 0; m < a.trace.records.size(); ++m) {
        const auto& ra = a.trace.records[m];
        const auto& rb = b.trace.records[m];
        CHECK(ra.update_inf == rb.update_inf);
        CHECK(ra.messages == rb.messages);
        CHECK(rb.max_recipient_hops <= 2 * r + 2 * bank.bandwidth);
        CHECK(rb.broadcasts <= 2 * g.size());
      }
    }
  }
}

TEST_CASE("residual identity") {
  auto g = generate_rgg(128, 9).graph;
  const auto bank = spline_analysis(g, 1);
  const Vector z0 = random_vector(128, 1);
  const Vector z1 = random_vector(128, 2);
  const Vector ref = dense_ls(bank, z0, z1);
  DistributedReconstructor solver(g, bank, 1);
  for (int m = 1; m <= 6; ++m) {
    RunOptions opts;
    opts.max_iter = m;
    opts.stop_eps = 0.0;
    const auto res = solver.run(z0, z1, opts);
    const Vector lhs0 = res.z0 - (z0 - bank.h0 * ref);
    const Vector lhs1 = res.z1 - (z1 - bank.h1 * ref);
    const Vector err = res.x - ref;
    CHECK((lhs0 + bank.h0 * err).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((lhs1 + bank.h1 * err).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("agent storage stays local") {
  auto g = generate_rgg(128, 4).graph;
  const auto bank = spline_analysis(g, 1);
  DistributedReconstructor solver(g, bank, 2);
  for (const auto& agent : solver.agents()) {
    CHECK(agent.ball_count == agent.inner.size());
    for (int hop : agent.wide_hops) CHECK(hop <= 2 * 2 + 2 * 1);
    CHECK(agent.gain[0].rows() == static_cast<Eigen::Index>(agent.inner.size()));
    CHECK(agent.gain[0].cols() == static_cast<Eigen::Index>(agent.row_set.size()));
  }
  SetupOptions tight;
  tight.storage_budget = 100;
  try {
    DistributedReconstructor(g, bank, 2, tight);
    FAIL("expected BudgetExceeded");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BudgetExceeded);
  }
}

TEST_CASE("contraction verification") {
  SUBCASE("vacuous when delta >= 1") {
    IterationTrace trace;
    const auto report = verify_contraction(trace, 1.5);
    CHECK(report.vacuous);
    CHECK(report.checked == 0);
  }
  SUBCASE("radius with delta < 1 on a cycle") {
    const Graph g = cycle_graph(12);
    const auto bank = spline_analysis(g, 1);
    const auto ls = spline_ls_synthesis(g, 1);
    const auto growth = estimate_growth(g, 10);
    const auto r = smallest_radius(growth, bank.bandwidth, ls.kappa, 1.0);
    REQUIRE(r);
    const double delta = contraction_factor(growth, bank.bandwidth, ls.kappa, *r);
    const Vector z0 = random_vector(12, 1);
    const Vector z1 = random_vector(12, 2);
    const Vector ref = ls.g0 * z0 + ls.g1 * z1;
    RunOptions opts;
    opts.max_iter = 20;
    opts.stop_eps = 0.0;
    const auto res = run_distributed(bank, g, *r, z0, z1, opts, ref);
    const auto report = verify_contraction(res.trace, delta);
    CHECK_FALSE(report.vacuous);
    CHECK(report.violations == 0);
  }
  SUBCASE("zero solution has zero error") {
    const Graph g = cycle_graph(8);
    const auto bank = spline_analysis(g, 1);
    RunOptions opts;
    opts.max_iter = 5;
    const Vector zero = Vector::Zero(8);
    const auto res = run_distributed(bank, g, 1, zero, zero, opts, zero);
    for (const auto& rec : res.trace.records) {
      CHECK(rec.err_inf == 0.0);
      CHECK(rec.err_2 == 0.0);
    }
    CHECK(verify_contraction(res.trace, 0.5).violations == 0);
  }
  SUBCASE("violations are reported") {
    IterationTrace trace;
    trace.has_oracle = true;
    trace.oracle_norm_2 = 1.0;
    trace.oracle_norm_inf = 1.0;
    IterationRecord rec;
    rec.iter = 1;
    rec.err_2 = 0.9;
    rec.err_inf = 0.1;
    trace.records.push_back(rec);
    try {
      verify_contraction(trace, 0.5);
      FAIL("expected BoundViolated");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::BoundViolated);
    }
  }
}
