#include "qeilab/cli/experiment.hpp"

#include <algorithm>

namespace qeilab::cli {

namespace {

// Visits every field as (section, key, member). Reading and writing share
// this table so the two directions cannot drift apart.
template <class Cfg, class V>
void visit(Cfg& c, V&& v) {
  v("run", "kind", c.kind);
  v("run", "label", c.label);
  v("run", "seed", c.seed);
  v("run", "output", c.output);

  v("grid", "L", c.grid.L);
  v("grid", "T", c.grid.T);
  v("grid", "Nt", c.grid.Nt);
  v("grid", "Nx", c.grid.Nx);

  v("field", "masses", c.field.masses);
  v("field", "N_max", c.field.N_max);
  v("field", "order", c.field.order);

  v("test_function", "t0", c.test_function.t0);
  v("test_function", "x0", c.test_function.x0);
  v("test_function", "r_t", c.test_function.r_t);
  v("test_function", "r_x", c.test_function.r_x);

  v("plateau", "inner", c.plateau.inner);
  v("plateau", "outer", c.plateau.outer);

  v("states", "vacuum", c.states.vacuum);
  v("states", "thermal_count", c.states.thermal_count);
  v("states", "beta_min", c.states.beta_min);
  v("states", "beta_max", c.states.beta_max);
  v("states", "coherent_count", c.states.coherent_count);
  v("states", "amplitude_max", c.states.amplitude_max);
  v("states", "coherent_modes", c.states.coherent_modes);
  v("states", "mode_range", c.states.mode_range);
  v("states", "one_particle_count", c.states.one_particle_count);
  v("states", "two_particle_count", c.states.two_particle_count);
  v("states", "zero_mode_amplitudes", c.states.zero_mode_amplitudes);
  v("states", "boosted_count", c.states.boosted_count);

  v("region", "t0", c.region.t0);
  v("region", "x0", c.region.x0);
  v("region", "R", c.region.R);

  v("tolerances", "margin", c.tolerances.margin);
  v("tolerances", "stability", c.tolerances.stability);

  v("checks", "doubling", c.checks.doubling);

  v("override", "c", c.overrides.c);
  v("override", "delta_max", c.overrides.delta_max);

  v("scan", "orders", c.scan.orders);
  v("scan", "slope_tolerance", c.scan.slope_tolerance);
  v("scan", "ratio_threshold", c.scan.ratio_threshold);
  v("scan", "v_points", c.scan.v_points);
  v("scan", "v_spacing", c.scan.v_spacing);
  v("scan", "v_window", c.scan.v_window);
  v("scan", "vacuum_T", c.scan.vacuum_T);
  v("scan", "vacuum_Nt", c.scan.vacuum_Nt);
  v("scan", "vacuum_Nx", c.scan.vacuum_Nx);
  v("scan", "vacuum_N_max", c.scan.vacuum_N_max);
  v("scan", "vacuum_window", c.scan.vacuum_window);
  v("scan", "vacuum_alpha", c.scan.vacuum_alpha);
  v("scan", "s_bounded", c.scan.s_bounded);
  v("scan", "s_growing", c.scan.s_growing);
  v("scan", "vacuum_cutoffs", c.scan.vacuum_cutoffs);
  v("scan", "product_order", c.scan.product_order);
  v("scan", "product_s", c.scan.product_s);
  v("scan", "product_alpha", c.scan.product_alpha);
  v("scan", "product_cutoffs", c.scan.product_cutoffs);
  v("scan", "bump_s", c.scan.bump_s);

  v("schur", "pairs", c.schur.pairs);
  v("schur", "min_size", c.schur.min_size);
  v("schur", "max_size", c.schur.max_size);
  v("schur", "tolerance", c.schur.tolerance);
  v("schur", "inject_non_psd", c.schur.inject_non_psd);
  v("schur", "ladder", c.schur.ladder);
}

void read(const ConfigEntry& e, std::string& out) { out = e.value; }
void read(const ConfigEntry& e, double& out) { out = parse_double(e); }
void read(const ConfigEntry& e, bool& out) { out = parse_bool(e); }
void read(const ConfigEntry& e, std::uint64_t& out) { out = parse_u64(e); }
void read(const ConfigEntry& e, std::vector<double>& out) { out = parse_double_list(e); }
void read(const ConfigEntry& e, std::vector<int>& out) { out = parse_int_list(e); }
void read(const ConfigEntry& e, int& out) {
  const long long v = parse_int(e);
  if (v < -1000000000 || v > 1000000000)
    throw ConfigError(e.line, e.section + "." + e.key, "integer out of range");
  out = static_cast<int>(v);
}
void read(const ConfigEntry& e, std::optional<double>& out) {
  if (e.value == "none")
    out.reset();
  else
    out = parse_double(e);
}

std::string write(const std::string& v) { return v; }
std::string write(double v) { return format_double(v); }
std::string write(bool v) { return v ? "true" : "false"; }
std::string write(int v) { return std::to_string(v); }
std::string write(std::uint64_t v) { return std::to_string(v); }
std::string write(const std::optional<double>& v) { return v ? format_double(*v) : "none"; }
template <class T>
std::string write(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + write(v[i]);
  return out;
}

struct Validator {
  const ConfigFile& file;

  int line(const char* section, const char* key) const {
    const auto* e = file.find(section, key);
    return e ? e->line : 0;
  }
  void check(bool ok, const char* section, const char* key, const std::string& what) const {
    if (!ok) throw ConfigError(line(section, key), std::string(section) + "." + key, what);
  }
};

void validate(const ExperimentConfig& c, const ConfigFile& file) {
  const Validator v{file};
  const auto& kinds = {"qei", "pointwise", "scan", "schur"};
  v.check(std::find(kinds.begin(), kinds.end(), c.kind) != kinds.end(), "run", "kind",
          "kind must be one of qei, pointwise, scan, schur");
  v.check(!c.output.empty(), "run", "output", "output directory must not be empty");
  v.check(c.tolerances.margin > 0, "tolerances", "margin", "tolerance must be strictly positive");
  v.check(c.tolerances.stability > 0, "tolerances", "stability",
          "tolerance must be strictly positive");
  v.check(c.scan.slope_tolerance > 0, "scan", "slope_tolerance",
          "tolerance must be strictly positive");
  v.check(c.scan.ratio_threshold > 0, "scan", "ratio_threshold",
          "tolerance must be strictly positive");
  v.check(c.schur.tolerance > 0, "schur", "tolerance", "tolerance must be strictly positive");

  v.check(c.grid.L > 0, "grid", "L", "circumference must be positive");
  v.check(c.grid.T > 0, "grid", "T", "time half-width must be positive");
  v.check(c.grid.Nt >= 8 && c.grid.Nt % 2 == 0, "grid", "Nt", "must be even and at least 8");
  v.check(c.grid.Nx >= 8 && c.grid.Nx % 2 == 0, "grid", "Nx", "must be even and at least 8");
  v.check(!c.field.masses.empty(), "field", "masses", "at least one mass is required");
  for (double m : c.field.masses) v.check(m > 0, "field", "masses", "masses must be positive");
  v.check(c.field.N_max >= 1, "field", "N_max", "must be at least 1");
  v.check(c.field.order >= 1, "field", "order", "must be at least 1");

  v.check(c.test_function.r_t > 0, "test_function", "r_t", "radius must be positive");
  v.check(c.test_function.r_x > 0, "test_function", "r_x", "radius must be positive");
  v.check(c.plateau.inner > 0, "plateau", "inner", "must be positive");
  v.check(c.plateau.outer > c.plateau.inner, "plateau", "outer", "must exceed inner");

  const auto& s = c.states;
  for (const auto& [count, key] :
       {std::pair{s.thermal_count, "thermal_count"}, {s.coherent_count, "coherent_count"},
        {s.one_particle_count, "one_particle_count"}, {s.two_particle_count, "two_particle_count"},
        {s.boosted_count, "boosted_count"}})
    v.check(count >= 0, "states", key, "count must be non-negative");
  v.check(s.beta_min > 0, "states", "beta_min", "must be positive");
  v.check(s.beta_max >= s.beta_min, "states", "beta_max", "must not be below beta_min");
  v.check(s.amplitude_max >= 0, "states", "amplitude_max", "must be non-negative");
  v.check(s.coherent_modes >= 1, "states", "coherent_modes", "must be at least 1");
  v.check(s.mode_range >= 0, "states", "mode_range", "must be non-negative");
  v.check(c.region.R > 0, "region", "R", "must be positive");

  v.check(!c.scan.orders.empty(), "scan", "orders", "at least one order is required");
  for (int l : c.scan.orders) v.check(l >= 1, "scan", "orders", "orders must be at least 1");
  v.check(c.schur.pairs >= 1, "schur", "pairs", "must be at least 1");
  v.check(c.schur.min_size >= 2 && c.schur.max_size >= c.schur.min_size, "schur", "max_size",
          "need 2 <= min_size <= max_size");
  v.check(!c.schur.ladder.empty(), "schur", "ladder", "ladder must not be empty");
}

}  // namespace

ExperimentConfig from_config(const ConfigFile& file) {
  ExperimentConfig c;
  std::vector<const ConfigEntry*> seen;
  visit(c, [&](const char* section, const char* key, auto& member) {
    if (const auto* e = file.find(section, key)) {
      read(*e, member);
      seen.push_back(e);
    }
  });
  for (const auto& e : file.entries())
    if (std::find(seen.begin(), seen.end(), &e) == seen.end())
      throw ConfigError(e.line, e.section + "." + e.key, "unknown key");
  validate(c, file);
  return c;
}

ExperimentConfig parse_experiment(std::string_view text) {
  return from_config(ConfigFile::parse(text));
}

ExperimentConfig load_experiment(const std::string& path) {
  return from_config(ConfigFile::load(path));
}

ConfigFile to_config(const ExperimentConfig& cfg) {
  ConfigFile f;
  visit(cfg, [&](const char* section, const char* key, const auto& member) {
    f.set(section, key, write(member));
  });
  return f;
}

std::string serialize(const ExperimentConfig& cfg) { return to_config(cfg).serialize(); }

ExperimentConfig refined(ExperimentConfig cfg, int factor) {
  if (factor < 1) throw ConfigError(0, "refine", "refinement factor must be at least 1");
  cfg.grid.Nt *= factor;
  cfg.grid.Nx *= factor;
  cfg.field.N_max *= factor;
  return cfg;
}

ExperimentConfig canonical(ExperimentConfig cfg) {
  cfg.output.clear();
  return cfg;
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : serialize(canonical(cfg))) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace qeilab::cli
