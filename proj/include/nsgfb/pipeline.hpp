#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nsgfb/distributed.hpp"
#include "nsgfb/filterbank.hpp"
#include "nsgfb/ls_synthesis.hpp"

namespace nsgfb {

/// Seed for stream (a, b) of a master seed; counter based, so trials can run
/// in any order.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

/// i.i.d. uniform noise on [-eta, eta].
struct NoiseModel {
  double eta = 0.0;
  std::uint64_t seed = 0;

  Vector sample(std::size_t n) const;
};

/// T_tau(t) = sgn(t) (|t| - tau)_+
Vector hard_threshold(const Vector& z, double tau);

inline constexpr double kInfNorm = std::numeric_limits<double>::infinity();

/// 20 log10(||x_o||_p / ||x_hat - x_o||_p); +inf when x_hat == x_o.
/// p is 1, 2 or kInfNorm.
double snr(const Vector& x_o, const Vector& x_hat, double p);

enum class SignalKind { BlockwiseConstant, BlockwisePolynomial, RandomUniform, File };
enum class StripLayout { Diagonal, Vertical };

std::string to_string(SignalKind k);
SignalKind signal_kind_from_string(const std::string& s);
std::string to_string(StripLayout s);
StripLayout strip_layout_from_string(const std::string& s);

struct SignalSpec {
  SignalKind kind = SignalKind::RandomUniform;
  /// Block id per vertex (blockwise-constant).
  std::vector<int> labels;
  /// Labels file for blockwise-constant, values file for File.
  std::filesystem::path path;
  /// Value of block b; default (-1)^b.
  std::vector<double> block_values;
  StripLayout strips = StripLayout::Diagonal;
  double low = -1.0;
  double high = 1.0;
  std::uint64_t seed = 0;
};

/// Strip index 0..3 of a point in [0,1]^2.
/// Diagonal: equal-width bands of c_x + c_y counted from the (1,1) corner.
/// Vertical: bands of c_x counted from c_x = 0.
int strip_index(const Point& c, StripLayout layout);

/// 0.5 - 2 c_x on strips 0 and 2, 0.5 + c_x^2 + c_y^2 on strips 1 and 3.
double strip_value(const Point& c, StripLayout layout);

Vector make_signal(const Graph& g, const SignalSpec& spec);

/// Labels file: one label per line (row = vertex) or "vertex label" pairs.
std::vector<int> load_labels(const std::filesystem::path& path, std::size_t n);

/// Two BFS halves grown from a pair of far-apart vertices (labels 0 and 1),
/// plus the seed of the second half as a singleton block (label 2).
std::vector<int> synthetic_block_labels(const Graph& g);

enum class BankKind { Bezout, LeastSquares };
enum class LsSolverKind { Auto, Distributed, Direct };

struct DenoiseConfig {
  BankKind kind = BankKind::Bezout;
  int order = 1;
  double tau = 0.0;
  int radius = 2;
  int trials = 1;
  LsSolverKind solver = LsSolverKind::Auto;
  /// Auto uses the direct solver below this many vertices.
  std::size_t direct_below = 2000;
  double stop_eps = 1e-10;
  int max_iter = 200;
};

std::string bank_label(const DenoiseConfig& cfg);
/// "B1", "L2", ...
DenoiseConfig parse_bank_label(const std::string& label);

/// Spline analysis, low-pass kept, high-pass hard-thresholded, then either the
/// banded Bezout synthesis or the least-squares synthesis.
class Denoiser {
 public:
  Denoiser(const Graph& g, DenoiseConfig cfg);

  const DenoiseConfig& config() const noexcept { return cfg_; }
  void set_tau(double tau);

  Vector denoise(const Vector& x) const;

  /// Bound on ||x_tilde - x_o||_inf when ||x - x_o||_inf <= eta:
  /// eta + ||G1||_{B_inf} tau (LS: filter bound in place of ||G1||_{B_inf}).
  double error_bound(double eta) const;

  /// Iterations used by the last distributed solve (0 otherwise).
  int last_iterations() const noexcept { return last_iterations_; }

 private:
  const Graph* graph_;
  DenoiseConfig cfg_;
  GraphFilter laplacian_;
  Polynomial p0_, p1_;
  SynthesisBank bezout_;
  double g1_row_norm_ = 0.0;
  std::unique_ptr<DistributedReconstructor> distributed_;
  std::unique_ptr<LsDirectSolver> direct_;
  mutable int last_iterations_ = 0;
};

/// One-shot wrapper; checks the output error bound against `eta` when given.
Vector denoise(const Graph& g, const DenoiseConfig& cfg, const Vector& x_noisy);

struct ExperimentConfig {
  int table = 3;
  std::string graph;        // edge-list path; empty means a generated RGG
  std::string coordinates;  // CSV sidecar for edge-list graphs
  std::string labels;       // block labels for the blockwise-constant signal
  std::size_t vertices = 4096;
  std::uint64_t graph_seed = 1;
  std::uint64_t seed = 2024;
  int trials = 50;
  std::vector<int> orders{1, 2};
  std::vector<int> radii;       // empty: table default
  std::vector<int> iterations;  // empty: table default
  std::vector<double> etas{1.0 / 32, 1.0 / 16, 1.0 / 8, 1.0 / 4, 1.0 / 2, 1.0};
  double tau_factor = 3.0;
  std::vector<std::string> banks{"B1", "B2", "L1", "L2"};
  int ls_radius = 2;
  StripLayout strips = StripLayout::Diagonal;
  double signal_low = -1.0;
  double signal_high = 1.0;
};

struct ReconstructionCell {
  int order = 0;
  int m = 0;
  int r = 0;
  double error = 0.0;  // average relative l_inf error; +inf once diverged
  int diverged_trials = 0;
};

struct DenoiseCell {
  std::string row;  // "Input", "NSGFB-B1", ...
  double eta = 0.0;
  double snr_2 = 0.0;
  double snr_inf = 0.0;
  double max_bound_ratio = 0.0;  // max over trials of ||x_tilde - x_o||_inf / error_bound
};

struct TableReport {
  int table = 0;
  std::vector<ReconstructionCell> reconstruction;
  std::vector<DenoiseCell> denoising;
  std::string csv;
  std::string text;
  std::size_t graph_vertices = 0;
  std::size_t repaired_vertices = 0;
};

/// Tables 2-3: E_{m,r} from random-uniform signals; tables 4-6: input and
/// output SNR per eta and bank. Deterministic in (config, seeds).
TableReport run_table_experiment(const ExperimentConfig& cfg);

/// Graph named by the config (loaded or generated, with coordinates).
Graph experiment_graph(const ExperimentConfig& cfg, std::size_t* repaired = nullptr);

}  // namespace nsgfb
