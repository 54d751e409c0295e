#pragma once

#include <optional>
#include <vector>

#include "nsgfb/filterbank.hpp"

namespace nsgfb {

/// Local row-compressed block: rows follow one index set, `cols` index
/// another (both ascending by global vertex id).
struct LocalSparse {
  std::vector<std::size_t> offsets;
  std::vector<std::uint32_t> cols;
  std::vector<double> values;
};

/// Everything agent k stores for the iterative reconstruction.
///
/// Index sets are balls around k, ascending by vertex id:
///   inner     B(k, r)            -- agents whose patches cover k
///   solve_set B(k, 2r)           -- support of the local least-squares solution
///   row_set   B(k, 2r + sigma)   -- subband samples the local problem reads
///   wide_set  B(k, 2r + 2 sigma) -- communication range
///
/// Only the rows of the local gain F_k^{-1} H_{l,k}^T that belong to B(k, r)
/// are kept, since only those values are ever transmitted.
struct AgentState {
  Vertex vertex = 0;
  std::size_t ball_count = 0;  // m_k = mu(B(k, r))
  std::vector<Vertex> inner;
  std::vector<Vertex> solve_set;
  std::vector<Vertex> row_set;
  std::vector<Vertex> wide_set;
  std::vector<int> wide_hops;  // hop distance from k for each wide_set entry
  std::vector<std::uint32_t> row_in_wide;  // position of row_set[b] inside wide_set
  std::vector<std::uint32_t> inner_in_wide;
  LocalSparse h_wide[2];  // H~_{l,k}: row_set x wide_set
  Matrix gain[2];         // inner x row_set rows of F_k^{-1} H_{l,k}^T

  // Message-passing buffers.
  Vector z[2];  // subband residual slices over row_set
  Vector x;     // accumulator over wide_set

  std::size_t stored_doubles() const;
};

enum class ExecutionMode { Global, MessagePassing };

enum class DivergencePolicy { Throw, Stop };

enum class RunStatus { Converged, MaxIterations, Diverged };
std::string to_string(RunStatus s);

struct RunOptions {
  double stop_eps = 1e-10;
  int max_iter = 200;
  /// Diverged once ||v^(m)||_inf exceeds this multiple of ||v^(1)||_inf.
  double divergence_factor = 1e6;
  DivergencePolicy on_divergence = DivergencePolicy::Throw;
  ExecutionMode mode = ExecutionMode::Global;
};

struct IterationRecord {
  int iter = 0;
  double update_inf = 0.0;
  double err_inf = 0.0;  // ||x^(m) - x_ref||, oracle mode only
  double err_2 = 0.0;
  double rel_err_inf = 0.0;
  double rel_err_2 = 0.0;
  std::size_t messages = 0;
  std::size_t bytes = 0;
  std::size_t broadcasts = 0;  // per iteration, all agents
  int max_recipient_hops = 0;
};

struct IterationTrace {
  std::vector<IterationRecord> records;
  bool has_oracle = false;
  double oracle_norm_inf = 0.0;
  double oracle_norm_2 = 0.0;
  int radius = 0;
  int sigma = 0;
};

struct DistributedResult {
  Vector x;
  IterationTrace trace;
  RunStatus status = RunStatus::MaxIterations;
  /// Residual subbands z~_l^(m) at exit.
  Vector z0;
  Vector z1;
};

struct SetupOptions {
  /// Upper bound on doubles stored across all agents.
  std::size_t storage_budget = 400'000'000;
};

/// Precomputed agent network for a fixed analysis bank, graph and radius.
class DistributedReconstructor {
 public:
  DistributedReconstructor(const Graph& g, const AnalysisBank& bank, int radius,
                           const SetupOptions& options = {});

  int radius() const noexcept { return radius_; }
  int sigma() const noexcept { return sigma_; }
  const std::vector<AgentState>& agents() const noexcept { return agents_; }
  std::size_t stored_doubles() const;

  /// Runs the four-line recursion from x^(0) = 0. When `reference` is given
  /// the trace records errors against it.
  DistributedResult run(const Vector& z0, const Vector& z1, const RunOptions& options = {},
                        const std::optional<Vector>& reference = std::nullopt);

  /// One application of the patching operator J to b = H0^T z0 + H1^T z1.
  Vector apply_j(const Vector& z0, const Vector& z1) const;

 private:
  Vector patched_update_global(const Vector& z0, const Vector& z1) const;
  void residual_update_global(Vector& z0, Vector& z1, const Vector& v) const;

  const Graph* graph_;
  SparseMatrix h_[2];
  int radius_;
  int sigma_;
  std::vector<AgentState> agents_;
  std::size_t messages_per_iter_ = 0;
};

/// v_{k,r}: solution of the least-squares problem restricted to B(k, 2r),
/// returned as a length-N vector supported there.
Vector local_solve(const AnalysisBank& bank, const Graph& g, Vertex k, int r, const Vector& z0,
                   const Vector& z1);

/// v(i) = (1 / mu(B(i,r))) sum over k in B(i,r) of locals[k](i), summed in
/// ascending k.
Vector patch(const Graph& g, int r, const std::vector<Vector>& locals);

/// One-shot convenience wrapper.
DistributedResult run_distributed(const AnalysisBank& bank, const Graph& g, int r, const Vector& z0,
                                  const Vector& z1, const RunOptions& options = {},
                                  const std::optional<Vector>& reference = std::nullopt);

struct ContractionReport {
  bool vacuous = false;  // delta >= 1
  std::size_t checked = 0;
  std::size_t violations = 0;
  double worst_ratio = 0.0;  // max error / (delta^m ||x_ref||)
};

/// Checks ||x^(m) - x_ref||_p <= delta^m ||x_ref||_p for p in {2, inf};
/// throws BoundViolated on any violation.
ContractionReport verify_contraction(const IterationTrace& trace, double delta, double slack = 1e-12);

}  // namespace nsgfb
