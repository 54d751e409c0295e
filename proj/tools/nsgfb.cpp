#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nsgfb/distributed.hpp"
#include "nsgfb/errors.hpp"
#include "nsgfb/filterbank.hpp"
#include "nsgfb/io.hpp"
#include "nsgfb/ls_synthesis.hpp"
#include "nsgfb/pipeline.hpp"

using namespace nsgfb;

namespace {

Graph load_graph(const std::string& edges, const std::string& coords) {
  auto loaded = load_edge_list(edges);
  if (coords.empty()) return std::move(loaded.graph);
  auto points = load_coordinates(coords, loaded.graph.size());
  return Graph(loaded.graph.size(), loaded.graph.edges(), std::move(points));
}

AnalysisBank analysis_of(const Graph& g, const BankSpec& spec) { return polynomial_analysis(g, spec.p0, spec.p1); }

void print_report(const StabilityReport& r) {
  std::printf("lambda_min  %.10g\nlambda_max  %.10g\nc2          %.10g\nd2          %.10g\n", r.lambda_min,
              r.lambda_max, r.c2, r.d2);
  std::printf("kappa       %.10g (%s)\ntheta       %.10g\n", r.kappa, to_string(r.kappa_source).c_str(), r.theta);
  std::printf("schur       %.10g %.10g\nbandwidth   %d%s\n", r.schur_h0, r.schur_h1, r.bandwidth,
              r.bandwidth_ok ? "" : " (not >= 1)");
  std::printf("H0 passes D^1/2 1: %s\nH1 blocks D^1/2 1: %s\n", r.passes_constant ? "yes" : "no",
              r.blocks_constant ? "yes" : "no");
  if (r.lp_lower_bound) std::printf("lp bounds   [%.6g, %.6g]\n", *r.lp_lower_bound, *r.lp_upper_bound);
}

SynthesisProvenance parse_synthesis(const std::string& s) {
  if (s == "bezout") return SynthesisProvenance::Bezout;
  if (s == "lifted") return SynthesisProvenance::LiftedBezout;
  if (s == "ls") return SynthesisProvenance::LeastSquares;
  throw Error(ErrorKind::ParseError, "synthesis must be bezout, lifted or ls");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonsubsampled graph filter banks: spline banks, distributed reconstruction, denoising"};
  app.require_subcommand(1);

  // graph
  auto* graph_cmd = app.add_subcommand("graph", "Generate or inspect graphs");
  graph_cmd->require_subcommand(1);
  std::size_t gen_n = 4096;
  std::uint64_t gen_seed = 1;
  std::string gen_out, gen_coords;
  auto* gen = graph_cmd->add_subcommand("gen", "Random geometric graph on [0,1]^2");
  gen->add_option("--n", gen_n, "Vertex count")->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "Seed");
  gen->add_option("--out", gen_out, "Edge-list output")->required();
  gen->add_option("--coords", gen_coords, "Coordinate CSV (default: <out>.coords.csv)");

  std::string stats_edges;
  int stats_radius = 10;
  double stats_dim = 2.0;
  auto* stats = graph_cmd->add_subcommand("stats", "Size, degrees, diameter and growth estimate");
  stats->add_option("edges", stats_edges)->required();
  stats->add_option("--max-radius", stats_radius, "Largest radius for the density estimate");
  stats->add_option("--dim", stats_dim, "Dimension used by the density estimate");

  // spectral
  auto* spectral_cmd = app.add_subcommand("spectral", "Dense spectral tools");
  spectral_cmd->require_subcommand(1);
  std::string eig_edges, eig_out, eig_bank;
  auto* eig = spectral_cmd->add_subcommand("eig", "Eigenvalues of L_sym");
  eig->add_option("edges", eig_edges)->required();
  eig->add_option("--out", eig_out, "Eigenvalue CSV")->required();
  eig->add_option("--bank", eig_bank, "Write the frequency response of this bank instead");

  // bank
  auto* bank_cmd = app.add_subcommand("bank", "Filter banks");
  bank_cmd->require_subcommand(1);
  int spline_n = 1;
  std::string spline_edges, spline_out, spline_synth = "bezout";
  auto* spline = bank_cmd->add_subcommand("spline", "Spline bank of order n");
  spline->add_option("--n", spline_n, "Order")->check(CLI::PositiveNumber);
  spline->add_option("edges", spline_edges, "Graph used to report stability");
  spline->add_option("--synthesis", spline_synth, "bezout, lifted or ls");
  spline->add_option("--out", spline_out, "Bank file")->required();

  std::string check_bank, check_edges;
  int check_radius = 10;
  auto* check = bank_cmd->add_subcommand("check", "Assumptions, stability and perfect reconstruction");
  check->add_option("bank", check_bank)->required();
  check->add_option("edges", check_edges)->required();
  check->add_option("--max-radius", check_radius, "Radius for the density estimate");

  // ls
  auto* ls_cmd = app.add_subcommand("ls", "Least-squares synthesis");
  ls_cmd->require_subcommand(1);
  std::string cert_bank, cert_edges, cert_out;
  int cert_radius = 10;
  auto* certify = ls_cmd->add_subcommand("certify", "Off-diagonal decay certificate (dense)");
  certify->add_option("bank", cert_bank)->required();
  certify->add_option("edges", cert_edges)->required();
  certify->add_option("--out", cert_out, "Certificate CSV")->required();
  certify->add_option("--max-radius", cert_radius, "Radius for the density estimate");

  int delta_r = 0, delta_sigma = 1;
  double delta_kappa = 2.0, delta_d1 = 1.0, delta_dim = 2.0;
  auto* delta = ls_cmd->add_subcommand("delta", "Contraction factor of the distributed iteration");
  delta->add_option("--r", delta_r)->required();
  delta->add_option("--sigma", delta_sigma)->required();
  delta->add_option("--kappa", delta_kappa)->required();
  delta->add_option("--d1", delta_d1)->required();
  delta->add_option("--dim", delta_dim);

  // reconstruct
  std::string rec_edges, rec_bank, rec_z0, rec_z1, rec_oracle, rec_out, rec_x, rec_mode = "global";
  int rec_r = 2, rec_iter = 200;
  double rec_eps = 1e-10;
  auto* rec = app.add_subcommand("reconstruct", "Iterative distributed reconstruction");
  rec->add_option("edges", rec_edges)->required();
  rec->add_option("bank", rec_bank)->required();
  rec->add_option("--r", rec_r, "Radius")->check(CLI::NonNegativeNumber);
  rec->add_option("--z0", rec_z0)->required();
  rec->add_option("--z1", rec_z1)->required();
  rec->add_option("--oracle", rec_oracle, "Reference solution for error tracking");
  rec->add_option("--out", rec_out, "Trace CSV")->required();
  rec->add_option("--x-out", rec_x, "Reconstructed signal CSV");
  rec->add_option("--eps", rec_eps, "Stop tolerance on ||v||_inf");
  rec->add_option("--max-iter", rec_iter);
  rec->add_option("--mode", rec_mode, "global or message");

  // denoise
  std::string dn_edges, dn_in, dn_out, dn_clean, dn_bank = "B1";
  double dn_tau = 0.0;
  int dn_r = 2;
  auto* dn = app.add_subcommand("denoise", "Threshold the high-pass subband and resynthesize");
  dn->add_option("edges", dn_edges)->required();
  dn->add_option("--input", dn_in, "Noisy signal CSV")->required();
  dn->add_option("--out", dn_out, "Denoised signal CSV")->required();
  dn->add_option("--bank", dn_bank, "B<n> or L<n>");
  dn->add_option("--tau", dn_tau, "Threshold")->check(CLI::NonNegativeNumber);
  dn->add_option("--r", dn_r, "Radius of the distributed least-squares solver");
  dn->add_option("--clean", dn_clean, "Original signal, to report SNRs");

  // table
  int table_which = 3;
  std::string table_config, table_out, table_dump;
  int table_trials = 0;
  std::uint64_t table_seed = 0;
  bool seed_given = false;
  auto* table = app.add_subcommand("table", "Reproduce a reconstruction or denoising table");
  table->add_option("--which", table_which)->check(CLI::Range(2, 6))->required();
  table->add_option("--config", table_config, "JSON config");
  table->add_option("--trials", table_trials, "Override trial count");
  auto* seed_opt = table->add_option("--seed", table_seed, "Override master seed");
  table->add_option("--out", table_out, "Output prefix (<prefix>.csv, <prefix>.txt)");
  table->add_option("--dump-config", table_dump, "Write the effective config");

  CLI11_PARSE(app, argc, argv);
  seed_given = seed_opt->count() > 0;

  try {
    if (*gen) {
      auto rgg = generate_rgg(gen_n, gen_seed);
      save_edge_list(rgg.graph, gen_out);
      save_coordinates(rgg.graph, gen_coords.empty() ? gen_out + ".coords.csv" : gen_coords);
      std::printf("N %zu  edges %zu  seed %llu  attempts %d  repaired %zu\n", rgg.graph.size(),
                  rgg.graph.edge_count(), static_cast<unsigned long long>(rgg.final_seed), rgg.attempts,
                  rgg.repaired_vertices);
    } else if (*stats) {
      const Graph g = load_graph(stats_edges, "");
      const auto growth = estimate_growth(g, stats_radius, stats_dim);
      std::printf("N %zu\nedges %zu\nmax degree %zu\ndiameter %d\ndensity %.6g (dim %.3g, r <= %d)\n", g.size(),
                  g.edge_count(), g.max_degree(), diameter(g), growth.density, growth.dimension, growth.max_radius);
    } else if (*eig) {
      const Graph g = load_graph(eig_edges, "");
      const Spectrum s = eigendecompose(g);
      if (eig_bank.empty()) {
        write_vector_csv(eig_out, s.eigenvalues);
      } else {
        write_text(eig_out, frequency_response_csv(s.eigenvalues, load_bank(eig_bank)));
      }
      std::printf("%ld eigenvalues in [%.6g, %.6g]\n", static_cast<long>(s.eigenvalues.size()), s.eigenvalues[0],
                  s.eigenvalues[s.eigenvalues.size() - 1]);
    } else if (*spline) {
      const BankSpec spec = spline_bank_spec(spline_n, parse_synthesis(spline_synth));
      save_bank(spec, spline_out);
      std::printf("P0 = %s\nP1 = %s\n", spec.p0.to_string().c_str(), spec.p1.to_string().c_str());
      if (spec.synthesis) {
        std::printf("Q0 = %s\nQ1 = %s\n", spec.synthesis->q0.to_string().c_str(),
                    spec.synthesis->q1.to_string().c_str());
      }
      if (!spline_edges.empty()) {
        const Graph g = load_graph(spline_edges, "");
        print_report(check_assumptions(g, spline_analysis(g, spline_n)));
      }
    } else if (*check) {
      const BankSpec spec = load_bank(check_bank);
      const Graph g = load_graph(check_edges, "");
      const AnalysisBank bank = analysis_of(g, spec);
      print_report(check_assumptions(g, bank, estimate_growth(g, check_radius)));
      if (spec.synthesis) {
        const Polynomial id = spec.p0 * spec.synthesis->q0 + spec.p1 * spec.synthesis->q1 - Polynomial::constant(1.0);
        std::printf("max |P0 Q0 + P1 Q1 - 1| on [0,2]: %.3e\n", sup_abs_on_grid(id, 0.0, 2.0, 2001));
      }
    } else if (*certify) {
      const BankSpec spec = load_bank(cert_bank);
      const Graph g = load_graph(cert_edges, "");
      const LsSynthesis ls = ls_synthesis_dense(analysis_of(g, spec));
      const auto cert = decay_certificate(g, ls, estimate_growth(g, cert_radius));
      write_text(cert_out, decay_csv(cert));
      std::printf("kappa %.10g  theta %.6g  pairs %zu  violations %zu  worst ratio %.6g\n", ls.kappa, ls.theta,
                  cert.samples.size(), cert.violations, cert.worst_ratio);
      return cert.violations == 0 ? 0 : 3;
    } else if (*delta) {
      GrowthProfile growth{delta_dim, delta_d1, 0};
      std::printf("%.10g\n", contraction_factor(growth, delta_sigma, delta_kappa, delta_r));
    } else if (*rec) {
      const Graph g = load_graph(rec_edges, "");
      const BankSpec spec = load_bank(rec_bank);
      const Vector z0 = read_vector_csv(rec_z0);
      const Vector z1 = read_vector_csv(rec_z1);
      std::optional<Vector> oracle;
      if (!rec_oracle.empty()) oracle = read_vector_csv(rec_oracle);
      RunOptions opts;
      opts.stop_eps = rec_eps;
      opts.max_iter = rec_iter;
      if (rec_mode == "message") opts.mode = ExecutionMode::MessagePassing;
      else if (rec_mode != "global") throw Error(ErrorKind::ParseError, "mode must be global or message");
      const auto result = run_distributed(analysis_of(g, spec), g, rec_r, z0, z1, opts, oracle);
      write_text(rec_out, trace_csv(result.trace));
      if (!rec_x.empty()) write_vector_csv(rec_x, result.x);
      std::printf("%s after %zu iterations\n", to_string(result.status).c_str(), result.trace.records.size());
    } else if (*dn) {
      const Graph g = load_graph(dn_edges, "");
      DenoiseConfig cfg = parse_bank_label(dn_bank);
      cfg.tau = dn_tau;
      cfg.radius = dn_r;
      const Vector x = read_vector_csv(dn_in);
      const Vector out = denoise(g, cfg, x);
      write_vector_csv(dn_out, out);
      if (!dn_clean.empty()) {
        const Vector x_o = read_vector_csv(dn_clean);
        std::printf("input  l2-SNR %.4f  l_inf-SNR %.4f\noutput l2-SNR %.4f  l_inf-SNR %.4f\n", snr(x_o, x, 2.0),
                    snr(x_o, x, kInfNorm), snr(x_o, out, 2.0), snr(x_o, out, kInfNorm));
      }
    } else if (*table) {
      ExperimentConfig cfg;
      if (!table_config.empty()) cfg = config_from_json(read_text(table_config));
      cfg.table = table_which;
      if (table_trials > 0) cfg.trials = table_trials;
      if (seed_given) cfg.seed = table_seed;
      if (!table_dump.empty()) write_text(table_dump, config_to_json(cfg));
      const TableReport report = run_table_experiment(cfg);
      if (!table_out.empty()) {
        write_text(table_out + ".csv", report.csv);
        write_text(table_out + ".txt", report.text);
      }
      std::cout << report.text;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
