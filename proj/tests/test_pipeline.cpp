#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "nsgfb/errors.hpp"
#include "nsgfb/io.hpp"
#include "nsgfb/pipeline.hpp"

using namespace nsgfb;

namespace {

Vector random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector x(static_cast<Eigen::Index>(n));
  for (auto& v : x) v = u(rng);
  return x;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("nsgfb_test_" + name);
}

}  // namespace

TEST_CASE("thresholding") {
  Vector z(5);
  z << 0.3, -0.05, 0.1, -0.4, 0.0;
  const Vector y = hard_threshold(z, 0.1);
  CHECK(y[0] == doctest::Approx(0.2));
  CHECK(y[1] == 0.0);
  CHECK(y[2] == 0.0);
  CHECK(y[3] == doctest::Approx(-0.3));
  CHECK(y[4] == 0.0);
  CHECK((hard_threshold(z, 0.0) - z).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("signal to noise ratio") {
  Vector x(4);
  x << 1, 1, 1, 1;
  Vector y = x;
  y[0] += 0.1;
  y[1] -= 0.1;
  y[2] += 0.1;
  y[3] -= 0.1;
  CHECK(snr(x, y, 2) == doctest::Approx(20.0));
  CHECK(snr(x, y, kInfNorm) == doctest::Approx(20.0));
  CHECK(snr(x, y, 1) == doctest::Approx(20.0));
  CHECK(std::isinf(snr(x, x, 2)));
  try {
    snr(Vector::Zero(4), y, 2);
    FAIL("expected ZeroReference");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ZeroReference);
  }

  const Vector a = random_vector(500, 1);
  const Vector b = a + 1e-3 * random_vector(500, 2);
  long double na = 0, nd = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    na += static_cast<long double>(a[i]) * a[i];
    const long double d = static_cast<long double>(b[i]) - a[i];
    nd += d * d;
  }
  const double expect = static_cast<double>(10.0L * std::log10(na / nd));
  CHECK(snr(a, b, 2) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("noise model") {
  const NoiseModel noise{0.25, 7};
  const Vector e = noise.sample(1000);
  CHECK(e.cwiseAbs().maxCoeff() <= 0.25);
  CHECK((e - noise.sample(1000)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
}

TEST_CASE("piecewise signals") {
  SUBCASE("strip values") {
    CHECK(strip_value({0.1, 0.1}, StripLayout::Vertical) == doctest::Approx(0.3));
    CHECK(strip_value({0.3, 0.2}, StripLayout::Vertical) == doctest::Approx(0.63));
    CHECK(strip_index({0.9, 0.9}, StripLayout::Diagonal) == 0);
    CHECK(strip_index({0.05, 0.05}, StripLayout::Diagonal) == 3);
  }
  SUBCASE("constant labels give a constant signal") {
    const Graph g = path_graph(6);
    SignalSpec spec;
    spec.kind = SignalKind::BlockwiseConstant;
    spec.labels.assign(6, 0);
    const Vector x = make_signal(g, spec);
    CHECK((x.array() == 1.0).all());
    spec.labels = {0, 0, 1, 1, 2, 2};
    const Vector y = make_signal(g, spec);
    CHECK(y[2] == -1.0);
    CHECK(y[5] == 1.0);
  }
  SUBCASE("missing inputs") {
    const Graph g = path_graph(4);
    SignalSpec spec;
    spec.kind = SignalKind::BlockwiseConstant;
    try {
      make_signal(g, spec);
      FAIL("expected MissingLabels");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::MissingLabels);
    }
    spec.kind = SignalKind::BlockwisePolynomial;
    try {
      make_signal(g, spec);
      FAIL("expected MissingCoordinates");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::MissingCoordinates);
    }
  }
  SUBCASE("synthetic blocks") {
    auto g = generate_rgg(256, 3).graph;
    const auto labels = synthetic_block_labels(g);
    CHECK(std::count(labels.begin(), labels.end(), 2) == 1);
    CHECK(std::count(labels.begin(), labels.end(), 0) > 0);
    CHECK(std::count(labels.begin(), labels.end(), 1) > 0);
  }
  SUBCASE("labels file") {
    const auto path = temp_path("labels.txt");
    {
      std::ofstream out(path);
      out << "0 1\n1 0\n2 1\n";
    }
    const auto labels = load_labels(path, 3);
    CHECK(labels == std::vector<int>{1, 0, 1});
    std::filesystem::remove(path);
  }
}

TEST_CASE("noiseless denoising reconstructs exactly") {
  auto g = generate_rgg(256, 4).graph;
  const Vector x = random_vector(256, 5);
  for (const std::string label : {"B1", "B2", "L1", "L2"}) {
    DenoiseConfig cfg = parse_bank_label(label);
    CHECK(bank_label(cfg) == label);
    cfg.tau = 0.0;
    const Vector y = denoise(g, cfg, x);
    CHECK((y - x).cwiseAbs().maxCoeff() < 1e-8);
    cfg.solver = LsSolverKind::Distributed;
    if (cfg.kind == BankKind::LeastSquares) CHECK((denoise(g, cfg, x) - x).cwiseAbs().maxCoeff() < 1e-8);
  }
  CHECK_THROWS_AS(parse_bank_label("X3"), Error);
}

TEST_CASE("denoising error bound") {
  auto g = generate_rgg(512, 6).graph;
  SignalSpec spec;
  spec.kind = SignalKind::BlockwisePolynomial;
  const Vector xo = make_signal(g, spec);
  for (const std::string label : {"B1", "L1"}) {
    const double eta = 0.25;
    Denoiser d(g, parse_bank_label(label));
    d.set_tau(3 * eta);
    const Vector xn = xo + NoiseModel{eta, 11}.sample(512);
    const Vector xt = d.denoise(xn);
    CHECK((xt - xo).cwiseAbs().maxCoeff() <= d.error_bound(eta));
  }
}

TEST_CASE("input noise level") {
  auto g = generate_rgg(4096, 1).graph;
  SignalSpec spec;
  spec.kind = SignalKind::BlockwisePolynomial;
  const Vector xo = make_signal(g, spec);
  double sum = 0;
  for (int t = 0; t < 10; ++t) sum += snr(xo, xo + NoiseModel{0.125, derive_seed(3, t)}.sample(4096), 2);
  CHECK(sum / 10 == doctest::Approx(23.0).epsilon(0.5 / 23.0));
}

TEST_CASE("table experiments are deterministic") {
  ExperimentConfig cfg;
  cfg.vertices = 256;
  cfg.trials = 1;
  SUBCASE("reconstruction") {
    cfg.table = 3;
    cfg.radii = {0, 1};
    cfg.iterations = {1, 2};
    const auto a = run_table_experiment(cfg);
    const auto b = run_table_experiment(cfg);
    CHECK(a.csv == b.csv);
    CHECK(a.csv.rfind("n,m,r,E", 0) == 0);
    CHECK(a.reconstruction.size() == 2u * 2u * 2u);
  }
  SUBCASE("denoising") {
    cfg.table = 5;
    cfg.etas = {0.125};
    const auto a = run_table_experiment(cfg);
    const auto b = run_table_experiment(cfg);
    CHECK(a.csv == b.csv);
    CHECK(a.csv.rfind("row,eta,snr_db", 0) == 0);
    CHECK(a.denoising.size() == 5u);
    for (const auto& c : a.denoising) CHECK(c.max_bound_ratio <= 1.0);
  }
}

TEST_CASE("serialization") {
  SUBCASE("config round trip") {
    ExperimentConfig cfg;
    cfg.table = 6;
    cfg.trials = 7;
    cfg.etas = {0.5};
    cfg.banks = {"L2"};
    cfg.strips = StripLayout::Vertical;
    const auto back = config_from_json(config_to_json(cfg));
    CHECK(config_to_json(back) == config_to_json(cfg));
    CHECK(back.trials == 7);
    CHECK(back.strips == StripLayout::Vertical);
    CHECK_THROWS_AS(config_from_json(R"({"tabel": 3})"), Error);
  }
  SUBCASE("bank round trip") {
    for (auto prov : {SynthesisProvenance::Bezout, SynthesisProvenance::LiftedBezout, SynthesisProvenance::LeastSquares}) {
      const auto bank = spline_bank_spec(2, prov);
      const auto back = bank_from_json(bank_to_json(bank));
      CHECK(back.order == 2);
      CHECK(back.provenance == prov);
      CHECK(back.p0.coefficients() == bank.p0.coefficients());
      CHECK(back.synthesis.has_value() == bank.synthesis.has_value());
      if (bank.synthesis) CHECK(back.synthesis->q1.coefficients() == bank.synthesis->q1.coefficients());
    }
  }
  SUBCASE("vector csv round trip") {
    const auto path = temp_path("vec.csv");
    const Vector v = random_vector(50, 9);
    write_vector_csv(path, v);
    CHECK((read_vector_csv(path).array() == v.array()).all());
    std::filesystem::remove(path);
    CHECK_THROWS_AS(read_vector_csv(path), Error);
  }
}
