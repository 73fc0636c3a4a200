#pragma once

// CSV and JSON emission, run manifests and the seeded state families.

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qeilab/bounds.hpp"
#include "qeilab/cli/experiment.hpp"

namespace qeilab::cli {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kArtifactVersion = "0.1.0";

// Fixed column order; floats in shortest round-trip form.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  CsvWriter& cell(double v);
  CsvWriter& cell(int v);
  CsvWriter& cell(bool v);
  CsvWriter& cell(const std::string& v);
  CsvWriter& cell(const char* v) { return cell(std::string(v)); }
  void end_row();

  std::size_t rows() const { return rows_; }
  const std::string& str() const { return out_; }

 private:
  void sep();
  std::size_t columns_;
  std::size_t filled_ = 0;
  std::size_t rows_ = 0;
  std::string out_;
};

void write_text(const std::string& path, const std::string& text);

// Header common to every report: schema version, kind, label, seed, config hash.
json report_header(const ExperimentConfig& cfg);

std::string hex_hash(std::uint64_t h);

json state_to_json(const field::StateSpec& s);

// Vacuum, log-spaced thermal states, seeded random coherent states, fixed
// zero-mode coherent states, boosted multi-mode coherent states and 1- and
// 2-particle states, in that order. Pure function of (section, basis, seed).
std::vector<bounds::LabeledState> state_family(const StatesSection& s, const field::ModeBasis& b,
                                               std::uint64_t seed);

}  // namespace qeilab::cli
