#include "nsgfb/distributed.hpp"

#include <algorithm>
#include <cmath>

#include "nsgfb/errors.hpp"

namespace nsgfb {

namespace {

constexpr std::uint32_t kAbsent = 0xffffffffu;

double dot_sparse_row(const LocalSparse& block, std::size_t row, const Vector& values) {
  double acc = 0.0;
  for (std::size_t e = block.offsets[row]; e < block.offsets[row + 1]; ++e) {
    acc += block.values[e] * values[block.cols[e]];
  }
  return acc;
}

// u_k(i) for i in B(k, r), read from subband values addressed through `fetch`.
template <class Fetch>
void inner_solution(const AgentState& agent, Fetch&& fetch, std::vector<double>& out) {
  const auto rows = agent.gain[0].rows();
  const auto cols = agent.gain[0].cols();
  out.assign(static_cast<std::size_t>(rows), 0.0);
  for (Eigen::Index a = 0; a < rows; ++a) {
    double acc = 0.0;
    for (Eigen::Index b = 0; b < cols; ++b) acc += agent.gain[0](a, b) * fetch(0, b);
    for (Eigen::Index b = 0; b < cols; ++b) acc += agent.gain[1](a, b) * fetch(1, b);
    out[a] = acc;
  }
}

double norm_inf(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

// Sequential sum of squares, to keep norms independent of Eigen's vectorized reductions.
double norm_2(const Vector& v) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) acc += v[i] * v[i];
  return std::sqrt(acc);
}

}  // namespace

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Converged: return "converged";
    case RunStatus::MaxIterations: return "max-iterations";
    case RunStatus::Diverged: return "diverged";
  }
  return "unknown";
}

std::size_t AgentState::stored_doubles() const {
  std::size_t total = static_cast<std::size_t>(gain[0].size() + gain[1].size());
  for (const auto& block : h_wide) total += block.values.size();
  return total + 1;
}

DistributedReconstructor::DistributedReconstructor(const Graph& g, const AnalysisBank& bank, int radius,
                                                   const SetupOptions& options)
    : graph_(&g), radius_(radius), sigma_(bank.bandwidth) {
  if (radius < 0) throw Error(ErrorKind::InvariantViolation, "radius must be nonnegative");
  if (bank.size() != g.size()) throw Error(ErrorKind::DimensionMismatch, "bank and graph sizes differ");
  h_[0] = bank.h0.matrix;
  h_[1] = bank.h1.matrix;
  const std::size_t n = g.size();
  const int r = radius;
  const int s = sigma_;
  agents_.resize(n);

  std::vector<std::uint32_t> wide_pos(n, kAbsent);
  std::size_t stored = 0;
  for (std::size_t k = 0; k < n; ++k) {
    AgentState& agent = agents_[k];
    agent.vertex = static_cast<Vertex>(k);
    const auto dist = g.distances_from(agent.vertex, 2 * r + 2 * s);
    for (std::size_t v = 0; v < n; ++v) {
      const int d = dist[v];
      if (d < 0) continue;
      const auto vv = static_cast<Vertex>(v);
      wide_pos[v] = static_cast<std::uint32_t>(agent.wide_set.size());
      agent.wide_set.push_back(vv);
      agent.wide_hops.push_back(d);
      if (d <= 2 * r + s) {
        agent.row_in_wide.push_back(wide_pos[v]);
        agent.row_set.push_back(vv);
      }
      if (d <= 2 * r) agent.solve_set.push_back(vv);
      if (d <= r) {
        agent.inner.push_back(vv);
        agent.inner_in_wide.push_back(wide_pos[v]);
      }
    }
    agent.ball_count = agent.inner.size();

    // Position of each solve-set vertex inside the solve set.
    std::vector<std::uint32_t> solve_pos_of_wide(agent.wide_set.size(), kAbsent);
    for (std::size_t p = 0, q = 0; p < agent.wide_set.size(); ++p) {
      if (agent.wide_hops[p] <= 2 * r) solve_pos_of_wide[p] = static_cast<std::uint32_t>(q++);
    }

    const auto rows = static_cast<Eigen::Index>(agent.row_set.size());
    const auto ssize = static_cast<Eigen::Index>(agent.solve_set.size());
    Matrix local[2];
    for (int l = 0; l < 2; ++l) {
      LocalSparse& block = agent.h_wide[l];
      block.offsets.assign(1, 0);
      local[l] = Matrix::Zero(rows, ssize);
      for (Eigen::Index b = 0; b < rows; ++b) {
        for (SparseMatrix::InnerIterator it(h_[l], agent.row_set[b]); it; ++it) {
          const std::uint32_t p = wide_pos[it.col()];
          if (p == kAbsent) {
            throw Error(ErrorKind::InvariantViolation, "analysis filter reaches outside its bandwidth");
          }
          block.cols.push_back(p);
          block.values.push_back(it.value());
          if (solve_pos_of_wide[p] != kAbsent) local[l](b, solve_pos_of_wide[p]) = it.value();
        }
        block.offsets.push_back(block.cols.size());
      }
    }

    const Matrix f = local[0].transpose() * local[0] + local[1].transpose() * local[1];
    Eigen::LLT<Matrix> llt(f);
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorKind::LocalSingular, "local matrix F_k not positive definite at vertex " +
                                                std::to_string(k));
    }
    // Rows of F^{-1} for the inner vertices (F symmetric, so solve for columns).
    Matrix selector = Matrix::Zero(ssize, static_cast<Eigen::Index>(agent.inner.size()));
    for (std::size_t a = 0; a < agent.inner.size(); ++a) {
      const auto p = solve_pos_of_wide[agent.inner_in_wide[a]];
      selector(p, static_cast<Eigen::Index>(a)) = 1.0;
    }
    const Matrix inv_rows = llt.solve(selector).transpose();
    for (int l = 0; l < 2; ++l) agent.gain[l] = inv_rows * local[l].transpose();

    for (Vertex v : agent.wide_set) wide_pos[v] = kAbsent;
    stored += agent.stored_doubles();
    if (stored > options.storage_budget) {
      throw Error(ErrorKind::BudgetExceeded, "agent storage exceeds budget at radius " + std::to_string(r));
    }
    messages_per_iter_ += (agent.inner.size() - 1) + (agent.wide_set.size() - 1);
  }
}

std::size_t DistributedReconstructor::stored_doubles() const {
  std::size_t total = 0;
  for (const auto& a : agents_) total += a.stored_doubles();
  return total;
}

Vector DistributedReconstructor::patched_update_global(const Vector& z0, const Vector& z1) const {
  const auto n = static_cast<Eigen::Index>(agents_.size());
  Vector acc = Vector::Zero(n);
  std::vector<double> u;
  for (const AgentState& agent : agents_) {
    const Vector* z[2] = {&z0, &z1};
    inner_solution(agent, [&](int l, Eigen::Index b) { return (*z[l])[agent.row_set[b]]; }, u);
    for (std::size_t a = 0; a < agent.inner.size(); ++a) acc[agent.inner[a]] += u[a];
  }
  for (Eigen::Index i = 0; i < n; ++i) acc[i] /= static_cast<double>(agents_[i].ball_count);
  return acc;
}

void DistributedReconstructor::residual_update_global(Vector& z0, Vector& z1, const Vector& v) const {
  Vector* z[2] = {&z0, &z1};
  for (int l = 0; l < 2; ++l) {
    Vector delta(z[l]->size());
    for (Eigen::Index i = 0; i < delta.size(); ++i) {
      double acc = 0.0;
      for (SparseMatrix::InnerIterator it(h_[l], i); it; ++it) acc += it.value() * v[it.col()];
      delta[i] = acc;
    }
    *z[l] -= delta;
  }
}

Vector DistributedReconstructor::apply_j(const Vector& z0, const Vector& z1) const {
  return patched_update_global(z0, z1);
}

DistributedResult DistributedReconstructor::run(const Vector& z0_in, const Vector& z1_in,
                                                const RunOptions& options,
                                                const std::optional<Vector>& reference) {
  const auto n = static_cast<Eigen::Index>(agents_.size());
  if (z0_in.size() != n || z1_in.size() != n || (reference && reference->size() != n)) {
    throw Error(ErrorKind::DimensionMismatch, "subband length differs from vertex count");
  }
  DistributedResult result;
  result.trace.radius = radius_;
  result.trace.sigma = sigma_;
  if (reference) {
    result.trace.has_oracle = true;
    result.trace.oracle_norm_inf = norm_inf(*reference);
    result.trace.oracle_norm_2 = norm_2(*reference);
  }

  Vector z0 = z0_in;
  Vector z1 = z1_in;
  Vector x = Vector::Zero(n);
  const bool messaging = options.mode == ExecutionMode::MessagePassing;
  if (messaging) {
    for (AgentState& agent : agents_) {
      for (int l = 0; l < 2; ++l) {
        const Vector& src = l == 0 ? z0_in : z1_in;
        agent.z[l].resize(static_cast<Eigen::Index>(agent.row_set.size()));
        for (std::size_t b = 0; b < agent.row_set.size(); ++b) agent.z[l][b] = src[agent.row_set[b]];
      }
      agent.x = Vector::Zero(static_cast<Eigen::Index>(agent.wide_set.size()));
    }
  }

  // Mailboxes for message passing: (sender, value) pairs per recipient.
  std::vector<std::vector<std::pair<Vertex, double>>> inbox(messaging ? agents_.size() : 0);
  std::vector<double> u;
  double first_update = 0.0;
  result.status = RunStatus::MaxIterations;

  for (int m = 1; m <= options.max_iter; ++m) {
    IterationRecord rec;
    rec.iter = m;
    Vector v(n);
    if (!messaging) {
      v = patched_update_global(z0, z1);
      residual_update_global(z0, z1, v);
      x += v;
      rec.messages = messages_per_iter_;
      rec.broadcasts = 2 * agents_.size();
      rec.max_recipient_hops = 2 * radius_ + 2 * sigma_;
    } else {
      // Steps 1-2: local solutions, sent to the centers they cover.
      for (auto& box : inbox) box.clear();
      auto send = [&](const AgentState& from, std::uint32_t wide_index, double value,
                      std::vector<std::vector<std::pair<Vertex, double>>>& boxes) {
        const Vertex to = from.wide_set[wide_index];
        rec.max_recipient_hops = std::max(rec.max_recipient_hops, from.wide_hops[wide_index]);
        if (to != from.vertex) ++rec.messages;
        boxes[to].emplace_back(from.vertex, value);
      };
      for (const AgentState& agent : agents_) {
        inner_solution(agent, [&](int l, Eigen::Index b) { return agent.z[l][b]; }, u);
        for (std::size_t a = 0; a < agent.inner.size(); ++a) send(agent, agent.inner_in_wide[a], u[a], inbox);
        ++rec.broadcasts;
      }
      // Step 3: patch in ascending sender order.
      for (std::size_t i = 0; i < agents_.size(); ++i) {
        auto& box = inbox[i];
        std::sort(box.begin(), box.end(), [](auto& a, auto& b) { return a.first < b.first; });
        double acc = 0.0;
        for (auto& [sender, value] : box) acc += value;
        v[static_cast<Eigen::Index>(i)] = acc / static_cast<double>(agents_[i].ball_count);
      }
      // Step 4: broadcast v(k) to B(k, 2r + 2 sigma); step 5: local updates.
      for (auto& box : inbox) box.clear();
      for (const AgentState& agent : agents_) {
        for (std::uint32_t p = 0; p < agent.wide_set.size(); ++p) {
          send(agent, p, v[agent.vertex], inbox);
        }
        ++rec.broadcasts;
      }
      for (std::size_t k = 0; k < agents_.size(); ++k) {
        AgentState& agent = agents_[k];
        Vector local_v(static_cast<Eigen::Index>(agent.wide_set.size()));
        std::vector<bool> filled(agent.wide_set.size(), false);
        for (auto& [sender, value] : inbox[k]) {
          auto it = std::lower_bound(agent.wide_set.begin(), agent.wide_set.end(), sender);
          if (it == agent.wide_set.end() || *it != sender) {
            throw Error(ErrorKind::InvariantViolation, "message from outside the communication range");
          }
          const auto p = static_cast<std::size_t>(it - agent.wide_set.begin());
          local_v[static_cast<Eigen::Index>(p)] = value;
          filled[p] = true;
        }
        if (std::find(filled.begin(), filled.end(), false) != filled.end()) {
          throw Error(ErrorKind::InvariantViolation, "agent missing neighbor updates");
        }
        agent.x += local_v;
        for (int l = 0; l < 2; ++l) {
          Vector delta(agent.z[l].size());
          for (std::size_t b = 0; b < agent.row_set.size(); ++b) delta[b] = dot_sparse_row(agent.h_wide[l], b, local_v);
          agent.z[l] -= delta;
        }
      }
      for (std::size_t k = 0; k < agents_.size(); ++k) {
        const AgentState& agent = agents_[k];
        const auto self = std::lower_bound(agent.wide_set.begin(), agent.wide_set.end(), agent.vertex) -
                          agent.wide_set.begin();
        x[static_cast<Eigen::Index>(k)] = agent.x[self];
      }
    }
    rec.bytes = rec.messages * sizeof(double);
    rec.update_inf = norm_inf(v);
    if (reference) {
      const Vector err = x - *reference;
      rec.err_inf = norm_inf(err);
      rec.err_2 = norm_2(err);
      rec.rel_err_inf = result.trace.oracle_norm_inf > 0 ? rec.err_inf / result.trace.oracle_norm_inf : rec.err_inf;
      rec.rel_err_2 = result.trace.oracle_norm_2 > 0 ? rec.err_2 / result.trace.oracle_norm_2 : rec.err_2;
    }
    result.trace.records.push_back(rec);

    if (m == 1) first_update = rec.update_inf;
    if (!std::isfinite(rec.update_inf) ||
        (first_update > 0 && rec.update_inf > options.divergence_factor * first_update)) {
      result.status = RunStatus::Diverged;
      if (options.on_divergence == DivergencePolicy::Throw) {
        throw Error(ErrorKind::Diverged, "update magnitude grew past the divergence threshold at iteration " +
                                             std::to_string(m));
      }
      break;
    }
    if (rec.update_inf <= options.stop_eps) {
      result.status = RunStatus::Converged;
      break;
    }
  }

  if (messaging) {
    // Residual slices are consistent across agents; read each entry from its own vertex.
    for (std::size_t k = 0; k < agents_.size(); ++k) {
      const AgentState& agent = agents_[k];
      const auto self = std::lower_bound(agent.row_set.begin(), agent.row_set.end(), agent.vertex) -
                        agent.row_set.begin();
      z0[static_cast<Eigen::Index>(k)] = agent.z[0][self];
      z1[static_cast<Eigen::Index>(k)] = agent.z[1][self];
    }
  }
  result.x = std::move(x);
  result.z0 = std::move(z0);
  result.z1 = std::move(z1);
  return result;
}

Vector local_solve(const AnalysisBank& bank, const Graph& g, Vertex k, int r, const Vector& z0,
                   const Vector& z1) {
  const auto n = static_cast<Eigen::Index>(g.size());
  if (z0.size() != n || z1.size() != n) {
    throw Error(ErrorKind::DimensionMismatch, "subband length differs from vertex count");
  }
  const auto ball = geodesic_ball(g, k, 2 * r).members;
  const SparseMatrix h = frame_operator(bank);
  const Vector rhs = bank.h0.matrix.transpose() * z0 + bank.h1.matrix.transpose() * z1;
  const auto m = static_cast<Eigen::Index>(ball.size());
  Matrix f(m, m);
  Vector b(m);
  for (Eigen::Index a = 0; a < m; ++a) {
    b[a] = rhs[ball[a]];
    for (Eigen::Index c = 0; c < m; ++c) f(a, c) = h.coeff(ball[a], ball[c]);
  }
  Eigen::LLT<Matrix> llt(f);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::LocalSingular, "principal submatrix not positive definite at vertex " +
                                              std::to_string(k));
  }
  const Vector sol = llt.solve(b);
  Vector out = Vector::Zero(n);
  for (Eigen::Index a = 0; a < m; ++a) out[ball[a]] = sol[a];
  return out;
}

Vector patch(const Graph& g, int r, const std::vector<Vector>& locals) {
  const auto n = static_cast<Eigen::Index>(g.size());
  if (static_cast<Eigen::Index>(locals.size()) != n) {
    throw Error(ErrorKind::DimensionMismatch, "one local solution per vertex is required");
  }
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto ball = geodesic_ball(g, static_cast<Vertex>(i), r).members;
    double acc = 0.0;
    for (Vertex k : ball) acc += locals[k][i];
    v[i] = acc / static_cast<double>(ball.size());
  }
  return v;
}

DistributedResult run_distributed(const AnalysisBank& bank, const Graph& g, int r, const Vector& z0,
                                  const Vector& z1, const RunOptions& options,
                                  const std::optional<Vector>& reference) {
  DistributedReconstructor solver(g, bank, r);
  return solver.run(z0, z1, options, reference);
}

ContractionReport verify_contraction(const IterationTrace& trace, double delta, double slack) {
  ContractionReport report;
  if (!(delta < 1.0)) {
    report.vacuous = true;
    return report;
  }
  if (!trace.has_oracle) throw Error(ErrorKind::InvariantViolation, "contraction check needs an oracle trace");
  for (const auto& rec : trace.records) {
    const double factor = std::pow(delta, rec.iter);
    for (auto [err, norm] : {std::pair{rec.err_2, trace.oracle_norm_2}, std::pair{rec.err_inf, trace.oracle_norm_inf}}) {
      const double bound = factor * norm;
      ++report.checked;
      if (err > bound + slack * std::max(norm, 1.0)) ++report.violations;
      if (bound > 0) report.worst_ratio = std::max(report.worst_ratio, err / bound);
    }
  }
  if (report.violations > 0) {
    throw Error(ErrorKind::BoundViolated, std::to_string(report.violations) +
                                              " iterations exceed the contraction bound");
  }
  return report;
}

}  // namespace nsgfb
