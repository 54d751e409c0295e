#include "nsgfb/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "nsgfb/errors.hpp"
#include "nsgfb/io.hpp"

namespace nsgfb {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(master), hi(master), lo(a), hi(a), lo(b), hi(b)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

Vector NoiseModel::sample(std::size_t n) const {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-eta, eta);
  Vector e(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < e.size(); ++i) e[i] = eta > 0 ? dist(rng) : 0.0;
  return e;
}

Vector hard_threshold(const Vector& z, double tau) {
  Vector out(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double mag = std::abs(z[i]) - tau;
    out[i] = mag > 0 ? std::copysign(mag, z[i]) : 0.0;
  }
  return out;
}

namespace {

double lp_norm(const Vector& v, double p) {
  if (std::isinf(p)) return v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
  if (p == 1.0) return v.cwiseAbs().sum();
  if (p == 2.0) return v.norm();
  throw Error(ErrorKind::InvariantViolation, "snr supports p in {1, 2, inf}");
}

std::string fmt(const char* format, double v) {
  if (std::isnan(v)) return "n/a";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string eta_label(double eta) {
  if (eta > 0 && eta < 1) {
    const double inv = 1.0 / eta;
    if (std::abs(inv - std::round(inv)) < 1e-12) return "1/" + std::to_string(static_cast<long>(std::round(inv)));
  }
  return fmt("%g", eta);
}

}  // namespace

double snr(const Vector& x_o, const Vector& x_hat, double p) {
  if (x_o.size() != x_hat.size()) throw Error(ErrorKind::DimensionMismatch, "snr vectors differ in length");
  const double ref = lp_norm(x_o, p);
  if (ref == 0.0) throw Error(ErrorKind::ZeroReference, "reference signal is zero");
  const double err = lp_norm(x_hat - x_o, p);
  if (err == 0.0) return std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(ref / err);
}

std::string to_string(SignalKind k) {
  switch (k) {
    case SignalKind::BlockwiseConstant: return "blockwise-constant";
    case SignalKind::BlockwisePolynomial: return "blockwise-polynomial";
    case SignalKind::RandomUniform: return "random-uniform";
    case SignalKind::File: return "file";
  }
  return "unknown";
}

SignalKind signal_kind_from_string(const std::string& s) {
  for (auto k : {SignalKind::BlockwiseConstant, SignalKind::BlockwisePolynomial, SignalKind::RandomUniform,
                 SignalKind::File}) {
    if (to_string(k) == s) return k;
  }
  throw Error(ErrorKind::ParseError, "unknown signal kind '" + s + "'");
}

std::string to_string(StripLayout s) { return s == StripLayout::Diagonal ? "diagonal" : "vertical"; }

StripLayout strip_layout_from_string(const std::string& s) {
  if (s == "diagonal") return StripLayout::Diagonal;
  if (s == "vertical") return StripLayout::Vertical;
  throw Error(ErrorKind::ParseError, "unknown strip layout '" + s + "'");
}

int strip_index(const Point& c, StripLayout layout) {
  if (layout == StripLayout::Vertical) return std::clamp(static_cast<int>(std::floor(c.x / 0.25)), 0, 3);
  const double s = c.x + c.y;
  return 3 - std::clamp(static_cast<int>(std::floor(s / 0.5)), 0, 3);
}

double strip_value(const Point& c, StripLayout layout) {
  return strip_index(c, layout) % 2 == 0 ? 0.5 - 2.0 * c.x : 0.5 + c.x * c.x + c.y * c.y;
}

Vector make_signal(const Graph& g, const SignalSpec& spec) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Vector x(n);
  switch (spec.kind) {
    case SignalKind::BlockwiseConstant: {
      std::vector<int> labels = spec.labels;
      if (labels.empty()) {
        if (spec.path.empty()) throw Error(ErrorKind::MissingLabels, "blockwise-constant signal needs block labels");
        labels = load_labels(spec.path, g.size());
      }
      if (static_cast<Eigen::Index>(labels.size()) != n) {
        throw Error(ErrorKind::DimensionMismatch, "label count differs from vertex count");
      }
      for (Eigen::Index i = 0; i < n; ++i) {
        const int b = labels[i];
        if (b >= 0 && static_cast<std::size_t>(b) < spec.block_values.size()) {
          x[i] = spec.block_values[b];
        } else {
          x[i] = (b % 2 == 0) ? 1.0 : -1.0;
        }
      }
      return x;
    }
    case SignalKind::BlockwisePolynomial: {
      if (!g.has_coordinates()) throw Error(ErrorKind::MissingCoordinates, "blockwise-polynomial signal needs coordinates");
      for (Eigen::Index i = 0; i < n; ++i) x[i] = strip_value(g.coordinates()[i], spec.strips);
      return x;
    }
    case SignalKind::RandomUniform: {
      std::mt19937_64 rng(spec.seed);
      std::uniform_real_distribution<double> dist(spec.low, spec.high);
      for (Eigen::Index i = 0; i < n; ++i) x[i] = dist(rng);
      return x;
    }
    case SignalKind::File: {
      x = read_vector_csv(spec.path);
      if (x.size() != n) throw Error(ErrorKind::DimensionMismatch, "signal file length differs from vertex count");
      return x;
    }
  }
  return x;
}

std::vector<int> load_labels(const std::filesystem::path& path, std::size_t n) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::MissingLabels, "cannot open labels file " + path.string());
  std::vector<int> labels(n, -1);
  std::string line;
  std::size_t row = 0;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    std::vector<long> tokens;
    long v;
    while (ss >> v) tokens.push_back(v);
    if (tokens.empty()) continue;
    std::size_t vertex = row;
    long label = tokens[0];
    if (tokens.size() >= 2) {
      vertex = static_cast<std::size_t>(tokens[0]);
      label = tokens[1];
    }
    if (vertex >= n) throw Error(ErrorKind::ParseError, "label line " + std::to_string(line_no) + " out of range");
    labels[vertex] = static_cast<int>(label);
    ++row;
  }
  if (std::find(labels.begin(), labels.end(), -1) != labels.end()) {
    throw Error(ErrorKind::MissingLabels, "labels file does not cover every vertex");
  }
  return labels;
}

std::vector<int> synthetic_block_labels(const Graph& g) {
  auto farthest = [&](Vertex from) {
    const auto d = g.distances_from(from);
    return static_cast<Vertex>(std::max_element(d.begin(), d.end()) - d.begin());
  };
  const Vertex a = farthest(0);
  const Vertex b = farthest(a);
  const auto da = g.distances_from(a);
  const auto db = g.distances_from(b);
  std::vector<int> labels(g.size());
  for (std::size_t v = 0; v < g.size(); ++v) labels[v] = db[v] < da[v] ? 1 : 0;
  if (g.size() > 2) labels[b] = 2;
  return labels;
}

std::string bank_label(const DenoiseConfig& cfg) {
  return std::string(cfg.kind == BankKind::Bezout ? "B" : "L") + std::to_string(cfg.order);
}

DenoiseConfig parse_bank_label(const std::string& label) {
  std::string s = label;
  if (s.rfind("NSGFB-", 0) == 0) s = s.substr(6);
  if (s.size() < 2 || (s[0] != 'B' && s[0] != 'L')) throw Error(ErrorKind::ParseError, "bad bank label '" + label + "'");
  DenoiseConfig cfg;
  cfg.kind = s[0] == 'B' ? BankKind::Bezout : BankKind::LeastSquares;
  try {
    cfg.order = std::stoi(s.substr(1));
  } catch (const std::exception&) {
    throw Error(ErrorKind::ParseError, "bad bank label '" + label + "'");
  }
  if (cfg.order < 1) throw Error(ErrorKind::ParseError, "bank order must be positive");
  return cfg;
}

Denoiser::Denoiser(const Graph& g, DenoiseConfig cfg) : graph_(&g), cfg_(cfg) {
  if (cfg_.tau < 0) throw Error(ErrorKind::InvariantViolation, "tau must be nonnegative");
  if (cfg_.trials < 1) throw Error(ErrorKind::InvariantViolation, "trials must be positive");
  laplacian_ = laplacian_sym(g);
  p0_ = spline_lowpass(cfg_.order);
  p1_ = spline_highpass(cfg_.order);
  if (cfg_.kind == BankKind::Bezout) {
    bezout_ = bezout_synthesis_spline(cfg_.order);
    g1_row_norm_ = row_sum_norm(materialize_synthesis(g, bezout_).second.matrix);
    return;
  }
  const AnalysisBank bank = spline_analysis(g, cfg_.order);
  const bool direct = cfg_.solver == LsSolverKind::Direct ||
                      (cfg_.solver == LsSolverKind::Auto && g.size() < cfg_.direct_below);
  if (direct) {
    direct_ = std::make_unique<LsDirectSolver>(bank);
  } else {
    distributed_ = std::make_unique<DistributedReconstructor>(g, bank, cfg_.radius);
  }
  const auto ext = extremal_eigenvalues(frame_operator(bank));
  if (!(ext.min > 0)) throw Error(ErrorKind::NotPositiveDefinite, "frame operator is singular");
  const GrowthProfile growth = estimate_growth(g, 10);
  g1_row_norm_ = ls_filter_bound(growth, bank.bandwidth, std::max(1.0, ext.max / ext.min), 1.0 / ext.min,
                                 max_abs_entry(bank.h1.matrix));
}

void Denoiser::set_tau(double tau) {
  if (tau < 0) throw Error(ErrorKind::InvariantViolation, "tau must be nonnegative");
  cfg_.tau = tau;
}

Vector Denoiser::denoise(const Vector& x) const {
  if (x.size() != static_cast<Eigen::Index>(graph_->size())) {
    throw Error(ErrorKind::DimensionMismatch, "signal length differs from vertex count");
  }
  const Vector z0 = apply_polynomial(laplacian_.matrix, p0_, x);
  const Vector z1 = hard_threshold(apply_polynomial(laplacian_.matrix, p1_, x), cfg_.tau);
  last_iterations_ = 0;
  if (cfg_.kind == BankKind::Bezout) return synthesize(laplacian_.matrix, bezout_, z0, z1);
  if (direct_) return direct_->solve(z0, z1);
  RunOptions opts;
  opts.stop_eps = cfg_.stop_eps;
  opts.max_iter = cfg_.max_iter;
  auto result = distributed_->run(z0, z1, opts);
  if (result.status != RunStatus::Converged) {
    throw Error(ErrorKind::ConvergenceFailure, "distributed synthesis did not reach the stop tolerance");
  }
  last_iterations_ = static_cast<int>(result.trace.records.size());
  return result.x;
}

double Denoiser::error_bound(double eta) const {
  // Distributed synthesis stops at ||v||_inf <= eps; allow for the remainder.
  const double solver_slack = distributed_ ? 1e3 * cfg_.stop_eps : 1e-9;
  return eta + g1_row_norm_ * cfg_.tau + solver_slack;
}

Vector denoise(const Graph& g, const DenoiseConfig& cfg, const Vector& x_noisy) {
  Denoiser d(g, cfg);
  return d.denoise(x_noisy);
}

Graph experiment_graph(const ExperimentConfig& cfg, std::size_t* repaired) {
  if (repaired) *repaired = 0;
  if (cfg.graph.empty()) {
    auto rgg = generate_rgg(cfg.vertices, cfg.graph_seed);
    if (repaired) *repaired = rgg.repaired_vertices;
    return std::move(rgg.graph);
  }
  auto loaded = load_edge_list(cfg.graph);
  if (cfg.coordinates.empty()) return std::move(loaded.graph);
  auto coords = load_coordinates(cfg.coordinates, loaded.graph.size());
  return Graph(loaded.graph.size(), loaded.graph.edges(), std::move(coords));
}

namespace {

void run_reconstruction(const ExperimentConfig& cfg, const Graph& g, TableReport& report) {
  std::vector<int> radii = cfg.radii;
  std::vector<int> ms = cfg.iterations;
  if (radii.empty()) radii = cfg.table == 2 ? std::vector<int>{0, 1, 2, 3, 4, 6} : std::vector<int>{0, 1, 2, 3};
  if (ms.empty()) {
    ms = cfg.table == 2 ? std::vector<int>{1, 2, 3, 4, 5, 7, 10, 14} : std::vector<int>{1, 2, 3, 4, 5, 8, 10, 19};
  }
  std::sort(ms.begin(), ms.end());
  const int max_m = ms.back();
  const auto n = g.size();

  std::vector<Vector> signals;
  for (int t = 0; t < cfg.trials; ++t) {
    SignalSpec spec;
    spec.kind = SignalKind::RandomUniform;
    spec.low = cfg.signal_low;
    spec.high = cfg.signal_high;
    spec.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(t));
    signals.push_back(make_signal(g, spec));
  }

  for (int order : cfg.orders) {
    const AnalysisBank bank = spline_analysis(g, order);
    for (int r : radii) {
      std::vector<double> sums(ms.size(), 0.0);
      std::vector<int> diverged(ms.size(), 0);
      bool unavailable = false;
      std::unique_ptr<DistributedReconstructor> solver;
      try {
        solver = std::make_unique<DistributedReconstructor>(g, bank, r);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::BudgetExceeded) throw;
        unavailable = true;
      }
      for (int t = 0; t < cfg.trials && !unavailable; ++t) {
        const Vector& x = signals[t];
        const Vector z0 = bank.h0.matrix * x;
        const Vector z1 = bank.h1.matrix * x;
        RunOptions opts;
        opts.stop_eps = 0.0;
        opts.max_iter = max_m;
        opts.on_divergence = DivergencePolicy::Stop;
        const auto result = solver->run(z0, z1, opts, x);
        const auto& recs = result.trace.records;
        for (std::size_t c = 0; c < ms.size(); ++c) {
          const auto m = static_cast<std::size_t>(ms[c]);
          if (m <= recs.size()) {
            sums[c] += recs[m - 1].rel_err_inf;
          } else if (result.status == RunStatus::Diverged) {
            sums[c] = std::numeric_limits<double>::infinity();
            ++diverged[c];
          } else {
            sums[c] += recs.empty() ? 1.0 : recs.back().rel_err_inf;
          }
        }
      }
      for (std::size_t c = 0; c < ms.size(); ++c) {
        ReconstructionCell cell;
        cell.order = order;
        cell.m = ms[c];
        cell.r = r;
        cell.error = unavailable ? std::numeric_limits<double>::quiet_NaN() : sums[c] / cfg.trials;
        cell.diverged_trials = diverged[c];
        report.reconstruction.push_back(cell);
      }
    }
  }

  std::ostringstream csv;
  csv << "n,m,r,E\n";
  for (const auto& c : report.reconstruction) {
    csv << c.order << ',' << c.m << ',' << c.r << ',' << fmt("%.6f", c.error) << '\n';
  }
  std::ostringstream text;
  text << "Table " << cfg.table << ": average E_{m,r} over " << cfg.trials << " trials, N = " << n << "\n";
  for (int order : cfg.orders) {
    text << "\nn = " << order << "\n" << pad("m \\ r", 8);
    for (int r : radii) text << pad(std::to_string(r), 12);
    text << '\n';
    for (int m : ms) {
      text << pad(std::to_string(m), 8);
      for (int r : radii) {
        for (const auto& c : report.reconstruction) {
          if (c.order == order && c.m == m && c.r == r) text << pad(fmt("%.4f", c.error), 12);
        }
      }
      text << '\n';
    }
  }
  report.csv = csv.str();
  report.text = text.str();
}

void run_denoising(const ExperimentConfig& cfg, const Graph& g, TableReport& report) {
  SignalSpec spec;
  if (cfg.table == 4) {
    spec.kind = SignalKind::BlockwiseConstant;
    spec.labels = cfg.labels.empty() ? synthetic_block_labels(g) : load_labels(cfg.labels, g.size());
  } else {
    spec.kind = SignalKind::BlockwisePolynomial;
    spec.strips = cfg.strips;
  }
  const Vector x_o = make_signal(g, spec);
  const auto n = g.size();

  std::vector<std::unique_ptr<Denoiser>> denoisers;
  std::vector<std::string> rows{"Input"};
  for (const auto& label : cfg.banks) {
    DenoiseConfig dc = parse_bank_label(label);
    dc.radius = cfg.ls_radius;
    denoisers.push_back(std::make_unique<Denoiser>(g, dc));
    rows.push_back("NSGFB-" + bank_label(dc));
  }

  for (std::size_t e = 0; e < cfg.etas.size(); ++e) {
    const double eta = cfg.etas[e];
    std::vector<DenoiseCell> cells(rows.size());
    for (std::size_t b = 0; b < rows.size(); ++b) {
      cells[b].row = rows[b];
      cells[b].eta = eta;
    }
    for (auto& d : denoisers) d->set_tau(cfg.tau_factor * eta);
    for (int t = 0; t < cfg.trials; ++t) {
      const NoiseModel noise{eta, derive_seed(cfg.seed, static_cast<std::uint64_t>(t), e + 1)};
      const Vector x = x_o + noise.sample(n);
      cells[0].snr_2 += snr(x_o, x, 2.0);
      cells[0].snr_inf += snr(x_o, x, kInfNorm);
      for (std::size_t b = 0; b < denoisers.size(); ++b) {
        const Vector out = denoisers[b]->denoise(x);
        auto& cell = cells[b + 1];
        cell.snr_2 += snr(x_o, out, 2.0);
        cell.snr_inf += snr(x_o, out, kInfNorm);
        const double ratio = (out - x_o).cwiseAbs().maxCoeff() / denoisers[b]->error_bound(eta);
        cell.max_bound_ratio = std::max(cell.max_bound_ratio, ratio);
        if (ratio > 1.0) {
          throw Error(ErrorKind::BoundViolated, "denoising error exceeds the bank error bound for " + cell.row);
        }
      }
    }
    for (auto& c : cells) {
      c.snr_2 /= cfg.trials;
      c.snr_inf /= cfg.trials;
      report.denoising.push_back(c);
    }
  }

  const bool inf_norm = cfg.table == 6;
  const std::string metric = inf_norm ? "l_inf-SNR" : "l2-SNR";
  std::ostringstream csv;
  csv << "row,eta,snr_db\n";
  for (const auto& c : report.denoising) {
    csv << c.row << ',' << fmt("%.8g", c.eta) << ',' << fmt("%.4f", inf_norm ? c.snr_inf : c.snr_2) << '\n';
  }
  std::ostringstream text;
  text << "Table " << cfg.table << ": average " << metric << " (dB) over " << cfg.trials << " trials, N = " << n
       << ", tau = " << fmt("%g", cfg.tau_factor) << " eta\n\n";
  text << pad("eta", 14);
  for (double eta : cfg.etas) text << pad(eta_label(eta), 10);
  text << '\n';
  for (const auto& row : rows) {
    text << pad(row == "Input" ? "Input " + metric : row, 14);
    for (const auto& c : report.denoising) {
      if (c.row == row) text << pad(fmt("%.2f", inf_norm ? c.snr_inf : c.snr_2), 10);
    }
    text << '\n';
  }
  report.csv = csv.str();
  report.text = text.str();
}

}  // namespace

TableReport run_table_experiment(const ExperimentConfig& cfg) {
  if (cfg.table < 2 || cfg.table > 6) throw Error(ErrorKind::InvariantViolation, "table must be in 2..6");
  if (cfg.trials < 1) throw Error(ErrorKind::InvariantViolation, "trials must be positive");
  TableReport report;
  report.table = cfg.table;
  const Graph g = experiment_graph(cfg, &report.repaired_vertices);
  report.graph_vertices = g.size();
  if (cfg.table <= 3) {
    run_reconstruction(cfg, g, report);
  } else {
    run_denoising(cfg, g, report);
  }
  return report;
}

}  // namespace nsgfb
