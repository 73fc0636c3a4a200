#pragma once

// Typed experiment configuration. Every field has a default; a config file
// only needs the keys it changes. Serialization writes every field, so
// parse(serialize(c)) == c.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qeilab/cli/config.hpp"

namespace qeilab::cli {

struct GridSection {
  double L = 6.283185307179586;
  double T = 2.0;
  int Nt = 304;
  int Nx = 128;
  bool operator==(const GridSection&) const = default;
};

struct FieldSection {
  std::vector<double> masses{1.0};
  int N_max = 56;
  int order = 3;  // symbol order l
  bool operator==(const FieldSection&) const = default;
};

struct TestFunctionSection {
  double t0 = 0;
  double x0 = 0;
  double r_t = 1.2;
  double r_x = 1.0;
  bool operator==(const TestFunctionSection&) const = default;
};

// F is a time plateau constant over the circle.
struct PlateauSection {
  double inner = 1.25;
  double outer = 1.9;
  bool operator==(const PlateauSection&) const = default;
};

struct StatesSection {
  bool vacuum = true;
  int thermal_count = 12;
  double beta_min = 0.5;
  double beta_max = 5.0;
  int coherent_count = 25;
  double amplitude_max = 25.0;
  int coherent_modes = 3;  // modes per random coherent state
  int mode_range = 6;      // |n| <= mode_range for random states
  int one_particle_count = 6;
  int two_particle_count = 6;
  std::vector<double> zero_mode_amplitudes{};
  int boosted_count = 0;  // multi-mode coherent states with a common momentum offset
  bool operator==(const StatesSection&) const = default;
};

struct RegionSection {
  double t0 = 0;
  double x0 = 0;
  double R = 0.5;
  bool operator==(const RegionSection&) const = default;
};

struct ToleranceSection {
  double margin = 1e-6;     // relative slack of every checked inequality
  double stability = 1e-4;  // relative change allowed under grid doubling
  bool operator==(const ToleranceSection&) const = default;
};

struct CheckSection {
  bool doubling = false;  // rerun at twice (Nt, Nx, N_max) and compare margins
  bool operator==(const CheckSection&) const = default;
};

struct OverrideSection {
  std::optional<double> c;          // pointwise constant c
  std::optional<double> delta_max;  // smeared inequality discretization allowance
  bool operator==(const OverrideSection&) const = default;
};

struct ScanSection {
  std::vector<int> orders{1, 2, 3};
  double slope_tolerance = 0.5;
  double ratio_threshold = 1e-2;
  // localized symbol
  int v_points = 8192;
  double v_spacing = 0.02;
  double v_window = 1.0;
  // vacuum two-point function in difference variables
  double vacuum_T = 4.0;
  int vacuum_Nt = 512;
  int vacuum_Nx = 256;
  int vacuum_N_max = 64;
  double vacuum_window = 1.0;
  double vacuum_alpha = 0.25;
  double s_bounded = 0.4;
  double s_growing = 0.6;
  std::vector<double> vacuum_cutoffs{8, 16, 32, 64};
  // v (x) delta cone equivalence
  int product_order = 2;
  double product_s = 1.0;
  double product_alpha = 0.5;
  std::vector<double> product_cutoffs{5, 10, 20, 40};
  // smooth control
  double bump_s = 2.0;
  bool operator==(const ScanSection&) const = default;
};

struct SchurSection {
  int pairs = 100;
  int min_size = 16;
  int max_size = 64;
  double tolerance = 1e-8;
  bool inject_non_psd = false;
  std::vector<double> ladder{0.6, 0.3, 0.15};
  bool operator==(const SchurSection&) const = default;
};

struct ExperimentConfig {
  std::string kind = "qei";  // qei | pointwise | scan | schur
  std::string label = "experiment";
  std::uint64_t seed = 42;
  std::string output = "out";
  GridSection grid;
  FieldSection field;
  TestFunctionSection test_function;
  PlateauSection plateau;
  StatesSection states;
  RegionSection region;
  ToleranceSection tolerances;
  CheckSection checks;
  OverrideSection overrides;
  ScanSection scan;
  SchurSection schur;

  bool operator==(const ExperimentConfig&) const = default;
};

// Throws ConfigError with the offending line and field.
ExperimentConfig from_config(const ConfigFile& file);
ExperimentConfig parse_experiment(std::string_view text);
ExperimentConfig load_experiment(const std::string& path);

ConfigFile to_config(const ExperimentConfig& cfg);
std::string serialize(const ExperimentConfig& cfg);

// Multiplies (Nt, Nx, N_max) by `factor`.
ExperimentConfig refined(ExperimentConfig cfg, int factor);

// The config with run.output cleared: where results go does not change them.
ExperimentConfig canonical(ExperimentConfig cfg);

// 64-bit FNV-1a of the serialized canonical config.
std::uint64_t config_hash(const ExperimentConfig& cfg);

}  // namespace qeilab::cli
