#include "pwfwi/run_config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pwfwi/errors.hpp"
#include "pwfwi/synth.hpp"

namespace pwfwi {
namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

double parse_double(const std::string& text, const std::string& what) {
  try {
    size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(what + ": not a number: '" + text + "'");
  }
}

long long parse_integer(const std::string& text, const std::string& what) {
  try {
    size_t pos = 0;
    const long long v = std::stoll(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(what + ": not an integer: '" + text + "'");
  }
}

}  // namespace

const std::vector<ConfigKey>& RunConfig::registry() {
  static const std::vector<ConfigKey> keys = {
      {"grid", "nx", "", "grid points along x (required)"},
      {"grid", "nz", "1", "grid points along z; 1 selects a 1D profile"},
      {"grid", "spacing", "", "grid spacing h in meters (required)"},
      {"grid", "pml_width", "10", "absorbing-layer width in cells per side (0 disables)"},
      {"grid", "pml_reflection_target", "1e-3", "design reflection coefficient of the layer"},
      {"grid", "true_model", "", "true-model reference (see model references)"},
      {"grid", "initial_model", "mean-of-true",
       "initial-model reference (see model references)"},
      {"acquisition", "sources", "", "source positions (position list)"},
      {"acquisition", "receivers", "", "receiver positions (position list)"},
      {"acquisition", "source_amplitude", "1", "point-source amplitude scale"},
      {"acquisition", "wavelet_f0", "0",
       "Ricker peak frequency in Hz; 0 selects a flat unit spectrum"},
      {"acquisition", "data", "", "observed-data CSV path"},
      {"schedule", "batches", "", "frequency batches, e.g. '3,3.5;4,5' (required)"},
      {"schedule", "paths", "1", "number of sweeps through the batch list"},
      {"schedule", "max_iterations", "15",
       "outer-iteration cap per batch; ';'-separated per batch or one value for all"},
      {"schedule", "eps_background", "1e-3",
       "wave-equation residual threshold; ';'-separated per batch or one value"},
      {"schedule", "eps_data", "1e-5",
       "data residual threshold; ';'-separated per batch or one value"},
      {"schedule", "bound_activation_iteration", "0",
       "completed outer iterations before box bounds engage"},
      {"regularizer", "kind", "tt", "dmp | tikhonov | tv | jtt | tt | tgv"},
      {"regularizer", "alpha", "0.5", "first-order weight of the compound kinds"},
      {"regularizer", "mixed_hessian", "false", "include the cross xz term in 2D"},
      {"regularizer", "inner_iterations", "1", "inner model-update iterations per outer step"},
      {"regularizer", "epsilon_factor", "1e-8",
       "relative damping added to the split model system"},
      {"regularizer", "compare_kinds", "dmp,tikhonov,tv,jtt,tt,tgv",
       "kinds swept by the compare command"},
      {"regularizer", "compare_alphas", "0.1,0.3,0.5,0.7,0.9",
       "alpha grid searched for the compound kinds"},
      {"penalties", "lambda_over_gamma", "100", "data-term weight ratio lambda/gamma"},
      {"penalties", "gamma_scale", "1",
       "target of gamma * max_cell sum |L|^2 in normalized model units"},
      {"penalties", "penalty_ratio", "0.1", "zeta = eta = ratio * gamma_scale"},
      {"penalties", "zeta2_ratio", "0.1", "second split penalty, zeta2 = ratio * gamma_scale"},
      {"penalties", "quadratic_weight", "1",
       "scale of the DMP/Tikhonov/TT quadratic term in normalized units"},
      {"bounds", "mode", "none", "none | benchmark | explicit"},
      {"bounds", "lower_fraction", "0.5",
       "benchmark mode: lower velocity bound as a fraction of the true minimum"},
      {"bounds", "upper_fraction", "1.5",
       "benchmark mode: upper velocity bound as a fraction of the true maximum"},
      {"bounds", "v_min", "", "explicit mode: lower velocity bound in m/s"},
      {"bounds", "v_max", "", "explicit mode: upper velocity bound in m/s"},
      {"output", "prefix", "run", "basename prefix of every file the run writes"},
      {"output", "write_batch_models", "false", "write a model raster after every batch"},
  };
  return keys;
}

namespace {

const ConfigKey* find_key(const std::string& section, const std::string& key) {
  for (const auto& k : RunConfig::registry())
    if (k.section == section && k.key == key) return &k;
  return nullptr;
}

}  // namespace

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_string(buf.str(), path);
}

RunConfig RunConfig::from_string(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    const std::string where = origin + ":" + std::to_string(line_no);
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError(where + ": malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty()) throw ConfigError(where + ": empty section name");
      bool known = false;
      for (const ConfigKey& k : registry())
        if (k.section == section) {
          known = true;
          break;
        }
      if (!known) throw ConfigError(where + ": unknown config section '" + section + "'");
      continue;
    }
    const size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(where + ": expected 'key = value'");
    if (section.empty())
      throw ConfigError(where + ": key outside any [section]");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (!find_key(section, key))
      throw ConfigError(where + ": unknown config key '" + section + "." + key + "'");
    const std::string id = section + "." + key;
    if (cfg.values_.count(id))
      throw ConfigError(where + ": duplicate config key '" + id + "'");
    cfg.values_[id] = value;
  }
  return cfg;
}

bool RunConfig::is_set(const std::string& section, const std::string& key) const {
  return values_.count(section + "." + key) > 0;
}

void RunConfig::set(const std::string& section, const std::string& key,
                    const std::string& value) {
  if (!find_key(section, key))
    throw ConfigError("unknown config key '" + section + "." + key + "'");
  values_[section + "." + key] = value;
}

std::string RunConfig::str(const std::string& section, const std::string& key,
                           bool required) const {
  const ConfigKey* reg = find_key(section, key);
  if (!reg) throw ConfigError("unknown config key '" + section + "." + key + "'");
  const auto it = values_.find(section + "." + key);
  if (it != values_.end()) return it->second;
  if (!reg->default_value.empty()) return reg->default_value;
  if (required)
    throw ConfigError("missing required config key '" + section + "." + key + "'");
  return "";
}

long long RunConfig::integer(const std::string& section, const std::string& key,
                             bool required) const {
  return parse_integer(str(section, key, required), section + "." + key);
}

double RunConfig::number(const std::string& section, const std::string& key,
                         bool required) const {
  return parse_double(str(section, key, required), section + "." + key);
}

bool RunConfig::boolean(const std::string& section, const std::string& key,
                        bool required) const {
  const std::string v = lower(str(section, key, required));
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(section + "." + key + ": not a boolean: '" + v + "'");
}

std::string RunConfig::echo() const {
  std::ostringstream out;
  for (const auto& k : registry()) {
    const auto it = values_.find(k.section + "." + k.key);
    std::string value;
    if (it != values_.end())
      value = it->second;
    else if (!k.default_value.empty())
      value = k.default_value;
    else
      value = "<unset>";
    out << k.section << "." << k.key << " = " << value << "\n";
  }
  return out.str();
}

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> items;
  std::string current;
  for (char c : text) {
    if (c == sep) {
      items.push_back(trim(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  items.push_back(trim(current));
  for (const auto& item : items)
    if (item.empty())
      throw ConfigError("list contains an empty item: '" + text + "'");
  return items;
}

std::vector<double> parse_number_list(const std::string& text, char sep,
                                      const std::string& what) {
  std::vector<double> out;
  for (const auto& item : split_list(text, sep)) {
    if (item.empty()) throw ConfigError(what + ": empty item in list '" + text + "'");
    out.push_back(parse_double(item, what));
  }
  return out;
}

ModelGrid config_grid(const RunConfig& cfg) {
  const long long nx = cfg.integer("grid", "nx", true);
  const long long nz = cfg.integer("grid", "nz", true);
  const double h = cfg.number("grid", "spacing", true);
  if (nx < 1 || nx > 1000000 || nz < 1 || nz > 1000000)
    throw ConfigError("grid.nx/grid.nz out of range");
  return ModelGrid(static_cast<int>(nx), static_cast<int>(nz), h);
}

PmlSpec config_pml(const RunConfig& cfg) {
  PmlSpec pml;
  pml.width = static_cast<int>(cfg.integer("grid", "pml_width", true));
  pml.reflection_target = cfg.number("grid", "pml_reflection_target", true);
  pml.validate();
  return pml;
}

namespace {

// One coordinate: "7" or "0:99" or "0:99:3" (inclusive, step >= 1).
std::vector<int> expand_coordinate(const std::string& text, int limit,
                                   const std::string& what) {
  const std::vector<std::string> parts = split_list(text, ':');
  if (parts.size() > 3) throw ConfigError(what + ": malformed coordinate '" + text + "'");
  std::vector<long long> nums;
  for (const auto& p : parts) nums.push_back(parse_integer(p, what));
  std::vector<int> out;
  if (nums.size() == 1) {
    out.push_back(static_cast<int>(nums[0]));
  } else {
    const long long start = nums[0];
    const long long end = nums[1];
    const long long step = nums.size() == 3 ? nums[2] : 1;
    if (step < 1) throw ConfigError(what + ": range step must be >= 1");
    if (end < start) throw ConfigError(what + ": range end before start in '" + text + "'");
    for (long long v = start; v <= end; v += step) out.push_back(static_cast<int>(v));
  }
  for (int v : out)
    if (v < 0 || v >= limit)
      throw ConfigError(what + ": index " + std::to_string(v) + " outside [0, " +
                        std::to_string(limit - 1) + "]");
  return out;
}

}  // namespace

std::vector<int> parse_positions(const std::string& text, const ModelGrid& grid,
                                 const std::string& key_name) {
  std::vector<int> cells;
  for (const auto& item : split_list(text, ';')) {
    if (item.empty()) throw ConfigError(key_name + ": empty position item");
    const std::vector<std::string> coords = split_list(item, ',');
    if (coords.size() > 2)
      throw ConfigError(key_name + ": position '" + item + "' has more than two coordinates");
    const std::vector<int> xs = expand_coordinate(coords[0], grid.nx, key_name);
    const std::vector<int> zs = coords.size() == 2
                                    ? expand_coordinate(coords[1], grid.nz, key_name)
                                    : std::vector<int>{0};
    for (int ix : xs)
      for (int iz : zs) cells.push_back(grid.index(ix, iz));
  }
  if (cells.empty()) throw ConfigError(key_name + ": no positions given");
  return cells;
}

Acquisition config_acquisition(const RunConfig& cfg, const ModelGrid& grid) {
  Acquisition acq;
  acq.source_cells =
      parse_positions(cfg.str("acquisition", "sources", true), grid, "acquisition.sources");
  acq.receiver_cells = parse_positions(cfg.str("acquisition", "receivers", true), grid,
                                       "acquisition.receivers");
  const double amp = cfg.number("acquisition", "source_amplitude", true);
  acq.source_amplitudes.assign(acq.source_cells.size(), Complex(amp, 0.0));
  acq.validate(grid);
  return acq;
}

ContinuationSchedule config_schedule(const RunConfig& cfg) {
  ContinuationSchedule sched;
  const std::string batches = cfg.str("schedule", "batches", true);
  for (const auto& item : split_list(batches, ';')) {
    if (item.empty()) throw ConfigError("schedule.batches: empty batch");
    FrequencyBatch fb;
    fb.frequencies_hz = parse_number_list(item, ',', "schedule.batches");
    sched.batches.push_back(std::move(fb));
  }

  const size_t nb = sched.batches.size();
  const auto broadcast = [&](const std::string& key) {
    const std::vector<double> vals =
        parse_number_list(cfg.str("schedule", key, true), ';', "schedule." + key);
    if (vals.size() != 1 && vals.size() != nb)
      throw ConfigError("schedule." + key + ": expected 1 or " + std::to_string(nb) +
                        " values, got " + std::to_string(vals.size()));
    std::vector<double> out(nb);
    for (size_t i = 0; i < nb; ++i) out[i] = vals.size() == 1 ? vals[0] : vals[i];
    return out;
  };

  const std::vector<double> kmax = broadcast("max_iterations");
  const std::vector<double> eps_b = broadcast("eps_background");
  const std::vector<double> eps_d = broadcast("eps_data");
  for (size_t i = 0; i < nb; ++i) {
    if (kmax[i] != std::floor(kmax[i]) || kmax[i] < 1)
      throw ConfigError("schedule.max_iterations: must be positive integers");
    sched.batches[i].stop.k_max = static_cast<int>(kmax[i]);
    sched.batches[i].stop.eps_b = eps_b[i];
    sched.batches[i].stop.eps_d = eps_d[i];
  }
  sched.paths = static_cast<int>(cfg.integer("schedule", "paths", true));
  sched.bound_activation_iteration =
      static_cast<int>(cfg.integer("schedule", "bound_activation_iteration", true));
  sched.validate();
  return sched;
}

RegularizerSpec config_regularizer(const RunConfig& cfg) {
  RegularizerSpec spec;
  spec.kind = parse_regularizer_kind(cfg.str("regularizer", "kind", true));
  spec.alpha = cfg.number("regularizer", "alpha", true);
  spec.mixed_hessian = cfg.boolean("regularizer", "mixed_hessian", true);
  spec.validate();
  return spec;
}

std::optional<ScalarField> config_true_model(const RunConfig& cfg, const ModelGrid& grid,
                                             std::uint64_t seed) {
  if (!cfg.is_set("grid", "true_model")) return std::nullopt;
  return model_from_reference(cfg.str("grid", "true_model"), grid, seed, nullptr);
}

ScalarField config_initial_model(const RunConfig& cfg, const ModelGrid& grid,
                                 const ScalarField* true_model, std::uint64_t seed) {
  const std::string ref = cfg.str("grid", "initial_model", true);
  return model_from_reference(ref, grid, seed, true_model);
}

BoxBounds config_bounds(const RunConfig& cfg, const ModelGrid& grid,
                        const ScalarField* true_model) {
  const std::string mode = lower(cfg.str("bounds", "mode", true));
  if (mode == "none") return BoxBounds::none();
  double v_lo = 0.0, v_hi = 0.0;
  if (mode == "benchmark") {
    if (!true_model)
      throw ConfigError("bounds.mode = benchmark requires grid.true_model");
    const VectorXd vel = true_model->values.array().rsqrt().matrix();
    v_lo = cfg.number("bounds", "lower_fraction", true) * vel.minCoeff();
    v_hi = cfg.number("bounds", "upper_fraction", true) * vel.maxCoeff();
  } else if (mode == "explicit") {
    v_lo = cfg.number("bounds", "v_min", true);
    v_hi = cfg.number("bounds", "v_max", true);
  } else {
    throw ConfigError("bounds.mode: expected none, benchmark, or explicit");
  }
  if (!(v_lo > 0.0) || !(v_hi > v_lo))
    throw ConfigError("bounds: need 0 < v_min < v_max");
  return BoxBounds::uniform(grid.cell_count(), 1.0 / (v_hi * v_hi), 1.0 / (v_lo * v_lo));
}

}  // namespace pwfwi
