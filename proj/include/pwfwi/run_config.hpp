#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pwfwi/irwri.hpp"

namespace pwfwi {

// One registered configuration key.  The registry is the single source of
// truth: parsing rejects keys not listed here, and the run header echoes
// every entry with its resolved value.
struct ConfigKey {
  std::string section;
  std::string key;
  std::string default_value;  // empty string = no default (may stay unset)
  std::string doc;
};

// INI-style run configuration:
//   [section]
//   key = value
// Lines whose first non-blank character is '#' or ';' are comments (no
// inline comments: ';' appears inside position lists).  Unknown keys,
// unknown sections, and duplicate keys are rejected.
class RunConfig {
public:
  static const std::vector<ConfigKey>& registry();
  static RunConfig from_file(const std::string& path);
  static RunConfig from_string(const std::string& text,
                               const std::string& origin = "<string>");

  bool is_set(const std::string& section, const std::string& key) const;
  // Resolved value (explicit or default).  Throws ConfigError naming the key
  // when it is unregistered, or unset without a default and `required`.
  std::string str(const std::string& section, const std::string& key,
                  bool required = false) const;
  long long integer(const std::string& section, const std::string& key,
                    bool required = false) const;
  double number(const std::string& section, const std::string& key,
                bool required = false) const;
  bool boolean(const std::string& section, const std::string& key,
               bool required = false) const;

  void set(const std::string& section, const std::string& key, const std::string& value);

  // Every registered key with its resolved value, in registry order:
  // "section.key = value" lines ("<unset>" when optional and absent).
  std::string echo() const;

private:
  std::map<std::string, std::string> values_;  // "section.key" -> raw value
};

// List helpers shared by the builders (strict: empty items are errors).
std::vector<std::string> split_list(const std::string& text, char sep);
std::vector<double> parse_number_list(const std::string& text, char sep,
                                      const std::string& what);

// Semantic builders on top of the raw key/value view.
ModelGrid config_grid(const RunConfig& cfg);
PmlSpec config_pml(const RunConfig& cfg);
Acquisition config_acquisition(const RunConfig& cfg, const ModelGrid& grid);
ContinuationSchedule config_schedule(const RunConfig& cfg);
RegularizerSpec config_regularizer(const RunConfig& cfg);

// Model fields come from reference strings (see model_from_reference in
// synth.hpp); the seed feeds the randomized synthetic kinds.
std::optional<ScalarField> config_true_model(const RunConfig& cfg, const ModelGrid& grid,
                                             std::uint64_t seed);
ScalarField config_initial_model(const RunConfig& cfg, const ModelGrid& grid,
                                 const ScalarField* true_model, std::uint64_t seed);

// Bounds: mode none | benchmark | explicit.  Benchmark mode scales the true
// model's velocity range by lower/upper fractions; explicit mode takes
// velocities v_min/v_max directly.  Velocity bounds [v_lo, v_hi] map to
// squared-slowness bounds [1/v_hi^2, 1/v_lo^2].
BoxBounds config_bounds(const RunConfig& cfg, const ModelGrid& grid,
                        const ScalarField* true_model);

// Position list DSL for sources/receivers: items separated by ';', each item
// "x,z" (a bare "x" means z = 0) with every coordinate either an integer or
// an inclusive range "start:end[:step]".  Range items expand as a cartesian
// product, x varying slowest.
std::vector<int> parse_positions(const std::string& text, const ModelGrid& grid,
                                 const std::string& key_name);

}  // namespace pwfwi
