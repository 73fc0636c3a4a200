#include "qeilab/cli/report.hpp"

#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>

namespace qeilab::cli {

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  for (const auto& h : header) cell(h);
  end_row();
  rows_ = 0;
}

void CsvWriter::sep() {
  if (filled_ == columns_) throw std::logic_error("csv row has too many cells");
  if (filled_ > 0) out_ += ',';
  ++filled_;
}

CsvWriter& CsvWriter::cell(double v) {
  sep();
  out_ += format_double(v);
  return *this;
}

CsvWriter& CsvWriter::cell(int v) {
  sep();
  out_ += std::to_string(v);
  return *this;
}

CsvWriter& CsvWriter::cell(bool v) {
  sep();
  out_ += v ? "true" : "false";
  return *this;
}

CsvWriter& CsvWriter::cell(const std::string& v) {
  sep();
  if (v.find_first_of(",\"\n") == std::string::npos) {
    out_ += v;
    return *this;
  }
  out_ += '"';
  for (char c : v) {
    if (c == '"') out_ += '"';
    out_ += c;
  }
  out_ += '"';
  return *this;
}

void CsvWriter::end_row() {
  if (filled_ != columns_) throw std::logic_error("csv row has too few cells");
  out_ += '\n';
  filled_ = 0;
  ++rows_;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

std::string hex_hash(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) s[static_cast<std::size_t>(i)] = digits[h & 0xf];
  return s;
}

json report_header(const ExperimentConfig& cfg) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = cfg.kind;
  j["label"] = cfg.label;
  j["seed"] = cfg.seed;
  j["config_hash"] = hex_hash(config_hash(cfg));
  return j;
}

json state_to_json(const field::StateSpec& s) {
  json j;
  j["kind"] = field::kind(s);
  if (const auto* th = std::get_if<field::Thermal>(&s)) j["beta"] = th->beta;
  if (const auto* co = std::get_if<field::Coherent>(&s)) {
    json modes = json::array();
    for (const auto& a : co->amplitudes)
      modes.push_back({{"n", a.n}, {"re", a.a.real()}, {"im", a.a.imag()}});
    j["amplitudes"] = modes;
  }
  if (const auto* pa = std::get_if<field::Particles>(&s)) {
    json occ = json::array();
    for (const auto& o : pa->occupations) occ.push_back({{"n", o.n}, {"count", o.count}});
    j["occupations"] = occ;
  }
  return j;
}

std::vector<bounds::LabeledState> state_family(const StatesSection& s, const field::ModeBasis& b,
                                               std::uint64_t seed) {
  if (s.mode_range > b.N_max)
    throw ConfigError(0, "states.mode_range", "mode range exceeds the mode cutoff N_max");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> mode(-s.mode_range, s.mode_range);
  const auto phase = [&] { return std::polar(1.0, 2 * std::numbers::pi * unit(rng)); };
  std::vector<bounds::LabeledState> out;

  if (s.vacuum) out.push_back({"vacuum", field::Vacuum{}, 0.0});

  for (int i = 0; i < s.thermal_count; ++i) {
    const double u = s.thermal_count > 1 ? static_cast<double>(i) / (s.thermal_count - 1) : 0.0;
    const double beta = s.beta_min * std::pow(s.beta_max / s.beta_min, u);
    out.push_back({"thermal_" + std::to_string(i), field::Thermal{beta}, beta});
  }

  // Random coherent states; the first one sits at the top of the amplitude range.
  for (int i = 0; i < s.coherent_count; ++i) {
    const double A = i == 0 ? s.amplitude_max : s.amplitude_max * (1.0 - unit(rng));
    std::vector<double> weights;
    double total = 0;
    for (int q = 0; q < s.coherent_modes; ++q) total += weights.emplace_back(unit(rng) + 0.05);
    field::Coherent c;
    for (int q = 0; q < s.coherent_modes; ++q)
      c.amplitudes.push_back({mode(rng), A * std::sqrt(weights[static_cast<std::size_t>(q)] / total) * phase()});
    const auto merged = field::make_solution(b, c.amplitudes).amplitudes;
    double norm = 0;
    for (const auto& a : merged) norm += std::norm(a.a);
    out.push_back({"coherent_" + std::to_string(i), field::Coherent{merged}, std::sqrt(norm)});
  }

  for (std::size_t i = 0; i < s.zero_mode_amplitudes.size(); ++i) {
    const double A = s.zero_mode_amplitudes[i];
    out.push_back({"zero_mode_" + std::to_string(i),
                   field::Coherent{field::zero_mode_solution(b, A).amplitudes}, A});
  }

  // Boosted: consecutive positive modes starting at a random offset.
  for (int i = 0; i < s.boosted_count; ++i) {
    std::uniform_int_distribution<int> start(1, std::max(1, s.mode_range - s.coherent_modes + 1));
    const int n0 = start(rng);
    const double A = s.amplitude_max * (1.0 - unit(rng));
    field::Coherent c;
    const double share = A / std::sqrt(static_cast<double>(s.coherent_modes));
    for (int q = 0; q < s.coherent_modes; ++q)
      c.amplitudes.push_back({std::min(n0 + q, b.N_max), share * phase()});
    const auto merged = field::make_solution(b, c.amplitudes).amplitudes;
    out.push_back({"boosted_" + std::to_string(i), field::Coherent{merged}, A});
  }

  const auto energy = [&](const field::Particles& p) {
    double e = 0;
    for (const auto& o : p.occupations) e += o.count * b.omega(o.n);
    return e;
  };
  for (int i = 0; i < s.one_particle_count; ++i) {
    const field::Particles p{{{mode(rng), 1}}};
    out.push_back({"one_particle_" + std::to_string(i), p, energy(p)});
  }
  for (int i = 0; i < s.two_particle_count; ++i) {
    const int n1 = mode(rng);
    int n2 = mode(rng);
    field::Particles p;
    if (i % 2 == 0 || n1 == n2)
      p.occupations = {{n1, 2}};
    else
      p.occupations = {{std::min(n1, n2), 1}, {std::max(n1, n2), 1}};
    out.push_back({"two_particle_" + std::to_string(i), p, energy(p)});
  }
  return out;
}

}  // namespace qeilab::cli
