#include "prs/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace prs {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  KeyValueConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: missing '=' at " + path + ":" + std::to_string(lineno));
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

void KeyValueConfig::set_override(const std::string& token) {
  const auto eq = token.find('=');
  if (eq == std::string::npos)
    throw std::runtime_error("config override must look like key=value: " + token);
  set(trim(token.substr(0, eq)), trim(token.substr(eq + 1)));
}

void KeyValueConfig::merge_defaults(const KeyValueConfig& defaults) {
  for (const auto& [k, v] : defaults.values_)
    if (!has(k)) values_[k] = v;
}

std::string KeyValueConfig::get_str(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  return std::stod(it->second);
}

std::int64_t KeyValueConfig::get_int(const std::string& key, std::int64_t fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  return std::stoll(it->second);
}

std::vector<double> KeyValueConfig::get_double_list(const std::string& key,
                                                    const std::vector<double>& fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<double> out;
  std::stringstream ss(it->second);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (!tok.empty()) out.push_back(std::stod(tok));
  }
  return out;
}

std::string KeyValueConfig::canonical() const {
  std::string out;
  for (const auto& [k, v] : values_) {
    out += k;
    out += " = ";
    out += v;
    out += "\n";
  }
  return out;
}

std::uint64_t KeyValueConfig::hash() const {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const char c : canonical()) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

WdmSpec wdm_from_config(const KeyValueConfig& cfg) {
  WdmSpec w;
  w.n_channels = static_cast<int>(cfg.get_int("wdm.n_channels", w.n_channels));
  w.symbol_rate_hz = cfg.get_double("wdm.symbol_rate_hz", w.symbol_rate_hz);
  w.spacing_hz = cfg.get_double("wdm.spacing_hz", w.spacing_hz);
  w.rolloff = cfg.get_double("wdm.rolloff", w.rolloff);
  w.p_ch_dbm = cfg.get_double("wdm.p_ch_dbm", w.p_ch_dbm);
  w.n_symbols = static_cast<int>(cfg.get_int("wdm.n_symbols", w.n_symbols));
  w.samples_per_symbol = static_cast<int>(cfg.get_int("wdm.samples_per_symbol", w.samples_per_symbol));
  return w;
}

FiberLinkSpec link_from_config(const KeyValueConfig& cfg) {
  FiberLinkSpec l;
  l.span_length_km = cfg.get_double("link.span_length_km", l.span_length_km);
  l.n_spans = static_cast<int>(cfg.get_int("link.n_spans", l.n_spans));
  l.step_km = cfg.get_double("link.step_km", l.step_km);
  l.attenuation_db_per_km = cfg.get_double("link.attenuation_db_per_km", l.attenuation_db_per_km);
  l.dispersion_ps_nm_km = cfg.get_double("link.dispersion_ps_nm_km", l.dispersion_ps_nm_km);
  l.gamma_per_w_km = cfg.get_double("link.gamma_per_w_km", l.gamma_per_w_km);
  l.edfa_nf_db = cfg.get_double("link.edfa_nf_db", l.edfa_nf_db);
  l.center_frequency_hz = cfg.get_double("link.center_frequency_hz", l.center_frequency_hz);
  return l;
}

PmdSpec pmd_from_config(const KeyValueConfig& cfg) {
  PmdSpec p;
  p.pmd_ps_sqrt_km = cfg.get_double("pmd.pmd_ps_sqrt_km", p.pmd_ps_sqrt_km);
  p.section_km = cfg.get_double("pmd.section_km", p.section_km);
  p.dgd_rel_std = cfg.get_double("pmd.dgd_rel_std", p.dgd_rel_std);
  p.seed = static_cast<std::uint64_t>(cfg.get_int("pmd.seed", 0));
  return p;
}

namespace presets {

KeyValueConfig desk_scale() {
  KeyValueConfig c;
  c.set("scale", "desk");
  c.set("wdm.n_channels", "3");
  c.set("wdm.symbol_rate_hz", "45e9");
  c.set("wdm.spacing_hz", "50e9");
  c.set("wdm.rolloff", "0.1");
  c.set("wdm.p_ch_dbm", "0");
  c.set("wdm.n_symbols", "16384");
  c.set("wdm.samples_per_symbol", "8");
  c.set("link.span_length_km", "80");
  c.set("link.n_spans", "10");
  c.set("link.step_km", "0.5");
  c.set("link.attenuation_db_per_km", "0.2");
  c.set("link.dispersion_ps_nm_km", "17");
  c.set("link.gamma_per_w_km", "1.3");
  c.set("link.edfa_nf_db", "5");
  c.set("pmd.pmd_ps_sqrt_km", "0");
  c.set("pmd.section_km", "1");
  c.set("pmd.dgd_rel_std", "0.2");
  c.set("fig5.n_realizations", "3");
  return c;
}

KeyValueConfig paper_scale() {
  KeyValueConfig c;
  c.set("scale", "paper");
  c.set("wdm.n_channels", "11");
  c.set("wdm.symbol_rate_hz", "45e9");
  c.set("wdm.spacing_hz", "50e9");
  c.set("wdm.rolloff", "0.1");
  c.set("wdm.p_ch_dbm", "0");
  c.set("wdm.n_symbols", "65536");
  c.set("wdm.samples_per_symbol", "16");
  c.set("link.span_length_km", "80");
  c.set("link.n_spans", "100");
  c.set("link.step_km", "0.1");
  c.set("link.attenuation_db_per_km", "0.2");
  c.set("link.dispersion_ps_nm_km", "17");
  c.set("link.gamma_per_w_km", "1.3");
  c.set("link.edfa_nf_db", "5");
  c.set("pmd.pmd_ps_sqrt_km", "0");
  c.set("pmd.section_km", "1");
  c.set("pmd.dgd_rel_std", "0.2");
  c.set("fig5.n_realizations", "50");
  return c;
}

}  // namespace presets

}  // namespace prs
