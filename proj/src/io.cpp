#include "nsgfb/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nsgfb/errors.hpp"

namespace nsgfb {

using nlohmann::json;

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Polynomial poly_from(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) throw Error(ErrorKind::ParseError, std::string("missing array '") + key + "'");
  return Polynomial(j[key].get<std::vector<double>>());
}

}  // namespace

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_vector_csv(const std::filesystem::path& path, const Vector& v) {
  std::string text;
  for (Eigen::Index i = 0; i < v.size(); ++i) text += num(v[i]) + '\n';
  write_text(path, text);
}

Vector read_vector_csv(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      std::size_t used = 0;
      values.push_back(std::stod(line, &used));
      if (line.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw Error(ErrorKind::ParseError, path.string() + ":" + std::to_string(line_no) + ": expected one number");
    }
  }
  return Eigen::Map<Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

BankSpec spline_bank_spec(int n, SynthesisProvenance provenance) {
  BankSpec spec;
  spec.order = n;
  spec.p0 = spline_lowpass(n);
  spec.p1 = spline_highpass(n);
  spec.provenance = provenance;
  if (provenance == SynthesisProvenance::Bezout) {
    spec.synthesis = bezout_synthesis_spline(n);
  } else if (provenance == SynthesisProvenance::LiftedBezout) {
    const SynthesisBank base = bezout_synthesis_spline(n);
    const double c = base.q1(0.0);
    spec.synthesis = SynthesisBank{base.q0 + c * spec.p1, base.q1 - c * spec.p0, SynthesisProvenance::LiftedBezout};
  }
  return spec;
}

std::string bank_to_json(const BankSpec& bank) {
  json j;
  j["family"] = bank.family;
  j["order"] = bank.order;
  j["analysis"] = {{"p0", bank.p0.coefficients()}, {"p1", bank.p1.coefficients()}};
  json s;
  s["provenance"] = to_string(bank.provenance);
  if (bank.synthesis) {
    s["q0"] = bank.synthesis->q0.coefficients();
    s["q1"] = bank.synthesis->q1.coefficients();
  }
  j["synthesis"] = s;
  return j.dump(2) + "\n";
}

BankSpec bank_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("bank file: ") + e.what());
  }
  BankSpec bank;
  try {
    bank.family = j.value("family", std::string("polynomial"));
    bank.order = j.value("order", 0);
    bank.p0 = poly_from(j.at("analysis"), "p0");
    bank.p1 = poly_from(j.at("analysis"), "p1");
    const auto& s = j.at("synthesis");
    bank.provenance = synthesis_provenance_from_string(s.at("provenance").get<std::string>());
    if (bank.provenance != SynthesisProvenance::LeastSquares) {
      bank.synthesis = SynthesisBank{poly_from(s, "q0"), poly_from(s, "q1"), bank.provenance};
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("bank file: ") + e.what());
  }
  return bank;
}

void save_bank(const BankSpec& bank, const std::filesystem::path& path) { write_text(path, bank_to_json(bank)); }

BankSpec load_bank(const std::filesystem::path& path) { return bank_from_json(read_text(path)); }

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["table"] = cfg.table;
  j["graph"] = cfg.graph;
  j["coordinates"] = cfg.coordinates;
  j["labels"] = cfg.labels;
  j["vertices"] = cfg.vertices;
  j["graph_seed"] = cfg.graph_seed;
  j["seed"] = cfg.seed;
  j["trials"] = cfg.trials;
  j["orders"] = cfg.orders;
  j["radii"] = cfg.radii;
  j["iterations"] = cfg.iterations;
  j["etas"] = cfg.etas;
  j["tau_factor"] = cfg.tau_factor;
  j["banks"] = cfg.banks;
  j["ls_radius"] = cfg.ls_radius;
  j["strips"] = to_string(cfg.strips);
  j["signal_low"] = cfg.signal_low;
  j["signal_high"] = cfg.signal_high;
  return j.dump(2) + "\n";
}

ExperimentConfig config_from_json(const std::string& text) {
  ExperimentConfig cfg;
  try {
    const json j = json::parse(text);
    for (const auto& [key, value] : j.items()) {
      if (key == "table") cfg.table = value.get<int>();
      else if (key == "graph") cfg.graph = value.get<std::string>();
      else if (key == "coordinates") cfg.coordinates = value.get<std::string>();
      else if (key == "labels") cfg.labels = value.get<std::string>();
      else if (key == "vertices") cfg.vertices = value.get<std::size_t>();
      else if (key == "graph_seed") cfg.graph_seed = value.get<std::uint64_t>();
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "trials") cfg.trials = value.get<int>();
      else if (key == "orders") cfg.orders = value.get<std::vector<int>>();
      else if (key == "radii") cfg.radii = value.get<std::vector<int>>();
      else if (key == "iterations") cfg.iterations = value.get<std::vector<int>>();
      else if (key == "etas") cfg.etas = value.get<std::vector<double>>();
      else if (key == "tau_factor") cfg.tau_factor = value.get<double>();
      else if (key == "banks") cfg.banks = value.get<std::vector<std::string>>();
      else if (key == "ls_radius") cfg.ls_radius = value.get<int>();
      else if (key == "strips") cfg.strips = strip_layout_from_string(value.get<std::string>());
      else if (key == "signal_low") cfg.signal_low = value.get<double>();
      else if (key == "signal_high") cfg.signal_high = value.get<double>();
      else throw Error(ErrorKind::ParseError, "unknown config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("config: ") + e.what());
  }
  return cfg;
}

std::string trace_csv(const IterationTrace& trace) {
  std::string out = "iter,rel_err_inf,rel_err_2,update_inf,msgs\n";
  for (const auto& r : trace.records) {
    out += std::to_string(r.iter) + ',' + (trace.has_oracle ? num(r.rel_err_inf) : "") + ',' +
           (trace.has_oracle ? num(r.rel_err_2) : "") + ',' + num(r.update_inf) + ',' + std::to_string(r.messages) +
           '\n';
  }
  return out;
}

std::string frequency_response_csv(const Vector& lambdas, const BankSpec& bank) {
  std::string out = "lambda,P0,P1,Q0,Q1\n";
  for (Eigen::Index i = 0; i < lambdas.size(); ++i) {
    const double t = lambdas[i];
    out += num(t) + ',' + num(bank.p0(t)) + ',' + num(bank.p1(t)) + ',';
    out += bank.synthesis ? num(bank.synthesis->q0(t)) + ',' + num(bank.synthesis->q1(t)) : std::string(",");
    out += '\n';
  }
  return out;
}

std::string decay_csv(const DecayCertificate& cert) {
  std::string out = "i,j,rho,abs_g,bound\n";
  auto ratio = [](double g, double b) { return b > 0 ? g / b : (g > 0 ? INFINITY : 0.0); };
  for (const auto& s : cert.samples) {
    const bool first = ratio(s.abs_g0, s.bound0) >= ratio(s.abs_g1, s.bound1);
    out += std::to_string(s.i) + ',' + std::to_string(s.j) + ',' + std::to_string(s.rho) + ',' +
           num(first ? s.abs_g0 : s.abs_g1) + ',' + num(first ? s.bound0 : s.bound1) + '\n';
  }
  return out;
}

}  // namespace nsgfb
