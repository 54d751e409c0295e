#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "nsgfb/distributed.hpp"
#include "nsgfb/filterbank.hpp"
#include "nsgfb/ls_synthesis.hpp"
#include "nsgfb/pipeline.hpp"

namespace nsgfb {

/// One value per line, row = vertex id ("%.17g").
void write_vector_csv(const std::filesystem::path& path, const Vector& v);
Vector read_vector_csv(const std::filesystem::path& path);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// Serializable bank: analysis polynomials plus synthesis (Bezout pair or
/// least-squares marker).
struct BankSpec {
  std::string family = "spline";
  int order = 1;
  Polynomial p0;
  Polynomial p1;
  SynthesisProvenance provenance = SynthesisProvenance::Bezout;
  std::optional<SynthesisBank> synthesis;  // absent for least squares
};

BankSpec spline_bank_spec(int n, SynthesisProvenance provenance);
std::string bank_to_json(const BankSpec& bank);
BankSpec bank_from_json(const std::string& text);
void save_bank(const BankSpec& bank, const std::filesystem::path& path);
BankSpec load_bank(const std::filesystem::path& path);

std::string config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const std::string& text);

/// "iter,rel_err_inf,rel_err_2,update_inf,msgs"
std::string trace_csv(const IterationTrace& trace);

/// "lambda,P0,P1,Q0,Q1" sampled at the given eigenvalues.
std::string frequency_response_csv(const Vector& lambdas, const BankSpec& bank);

/// "i,j,rho,abs_g,bound", one row per pair using the filter with the larger
/// ratio |g| / bound.
std::string decay_csv(const DecayCertificate& cert);

}  // namespace nsgfb
