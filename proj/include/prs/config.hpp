#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "prs/fiber.hpp"

namespace prs {

/// Flat key = value configuration: file lines plus command-line overrides.
/// '#' starts a comment; keys carry explicit units in their names.
class KeyValueConfig {
 public:
  static KeyValueConfig from_file(const std::string& path);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  /// Parses one "key=value" token.
  void set_override(const std::string& token);
  void merge_defaults(const KeyValueConfig& defaults);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::string get_str(const std::string& key, const std::string& fallback = "") const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::vector<double> get_double_list(const std::string& key,
                                      const std::vector<double>& fallback) const;

  /// Sorted "key = value" lines; identical configs hash identically.
  std::string canonical() const;
  std::uint64_t hash() const;  // FNV-1a on canonical()

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

WdmSpec wdm_from_config(const KeyValueConfig& cfg);
FiberLinkSpec link_from_config(const KeyValueConfig& cfg);
PmdSpec pmd_from_config(const KeyValueConfig& cfg);

namespace presets {

/// Desk-scale: 3 channels, 2^14 symbols, 0.5 km steps, 8 samples/symbol.
KeyValueConfig desk_scale();
/// Parameters as used at full scale: 11 channels, 2^16 symbols, 0.1 km steps.
KeyValueConfig paper_scale();

}  // namespace presets

}  // namespace prs
