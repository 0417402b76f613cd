#include "prs/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace prs {

using nlohmann::json;

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : path_(path) {
  std::string line;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) line += ",";
    line += header[i];
  }
  buffer_ = line + "\n";
}

CsvWriter::~CsvWriter() {
  std::ofstream out(path_, std::ios::binary);
  out << buffer_;
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ",";
    line += cells[i];
  }
  buffer_ += line + "\n";
}

std::string CsvWriter::num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string CsvWriter::num(std::int64_t v) { return std::to_string(v); }

namespace {

std::string label_string(std::uint32_t label, int m) {
  std::string s(m, '0');
  for (int i = 0; i < m; ++i)
    if ((label >> (m - 1 - i)) & 1) s[i] = '1';
  return s;
}

}  // namespace

void export_constellation_csv(const LabeledConstellation& c, const std::string& path) {
  std::vector<std::string> header;
  for (int d = 0; d < c.dim(); ++d) header.push_back("dim_" + std::to_string(d));
  header.push_back("label_bits");
  CsvWriter w(path, header);
  for (int i = 0; i < c.size(); ++i) {
    std::vector<std::string> cells;
    for (int d = 0; d < c.dim(); ++d) cells.push_back(CsvWriter::num(c.points(i, d)));
    cells.push_back(label_string(c.labels[i], c.bits_per_symbol));
    w.row(cells);
  }
}

void export_constellation_json(const LabeledConstellation& c, const std::string& path) {
  json j;
  j["name"] = c.name;
  j["m"] = c.bits_per_symbol;
  j["N"] = c.dim();
  j["energy_norm"] = c.energy_per_slot();
  json pts = json::array();
  for (int i = 0; i < c.size(); ++i) {
    json p = json::array();
    for (int d = 0; d < c.dim(); ++d) p.push_back(c.points(i, d));
    pts.push_back({{"point", p}, {"label_bits", label_string(c.labels[i], c.bits_per_symbol)}});
  }
  j["points"] = pts;
  std::ofstream out(path, std::ios::binary);
  out << j.dump(2) << "\n";
}

std::string to_hex(const std::vector<std::uint8_t>& bits) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve((bits.size() + 3) / 4);
  std::uint32_t nib = 0;
  int count = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    nib = (nib << 1) | bits[i];
    if (++count == 4) {
      out += digits[nib];
      nib = 0;
      count = 0;
    }
  }
  if (count) out += digits[nib << (4 - count)];
  return out;
}

std::vector<std::uint8_t> from_hex(const std::string& hex, std::size_t n_bits) {
  std::vector<std::uint8_t> bits;
  bits.reserve(n_bits);
  for (const char c : hex) {
    const int v = c <= '9' ? c - '0' : c - 'a' + 10;
    for (int b = 3; b >= 0; --b) {
      if (bits.size() == n_bits) return bits;
      bits.push_back(static_cast<std::uint8_t>((v >> b) & 1));
    }
  }
  if (bits.size() != n_bits) throw std::runtime_error("from_hex: bit count mismatch");
  return bits;
}

void write_field_dump(const std::string& prefix, const DualPolField& field,
                      const TxRecord& record, int spans_elapsed) {
  {
    std::ofstream out(prefix + ".bin", std::ios::binary);
    const Eigen::Index n = field.size();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double vals[4] = {field.x[i].real(), field.x[i].imag(), field.y[i].real(),
                              field.y[i].imag()};
      out.write(reinterpret_cast<const char*>(vals), sizeof(vals));
    }
  }
  json j;
  j["n_samples"] = field.size();
  j["sample_rate_hz"] = field.sample_rate_hz;
  j["spans_elapsed"] = spans_elapsed;
  j["format"] = record.format_name;
  j["seed"] = record.seed;
  j["wdm"] = {{"n_channels", record.wdm.n_channels},
              {"symbol_rate_hz", record.wdm.symbol_rate_hz},
              {"spacing_hz", record.wdm.spacing_hz},
              {"rolloff", record.wdm.rolloff},
              {"p_ch_dbm", record.wdm.p_ch_dbm},
              {"n_symbols", record.wdm.n_symbols},
              {"samples_per_symbol", record.wdm.samples_per_symbol}};
  j["link"] = {{"span_length_km", record.link.span_length_km},
               {"n_spans", record.link.n_spans},
               {"step_km", record.link.step_km},
               {"attenuation_db_per_km", record.link.attenuation_db_per_km},
               {"dispersion_ps_nm_km", record.link.dispersion_ps_nm_km},
               {"gamma_per_w_km", record.link.gamma_per_w_km},
               {"edfa_nf_db", record.link.edfa_nf_db},
               {"center_frequency_hz", record.link.center_frequency_hz}};
  j["pmd"] = {{"pmd_ps_sqrt_km", record.pmd.pmd_ps_sqrt_km},
              {"section_km", record.pmd.section_km},
              {"dgd_rel_std", record.pmd.dgd_rel_std},
              {"seed", record.pmd.seed ? record.pmd.seed : record.seed}};
  json bits = json::array();
  for (const auto& b : record.bits)
    bits.push_back({{"n_bits", b.size()}, {"hex", to_hex(b)}});
  j["bits"] = bits;
  std::ofstream out(prefix + ".json", std::ios::binary);
  out << j.dump(2) << "\n";
}

std::pair<DualPolField, TxRecord> read_field_dump(const std::string& prefix) {
  std::ifstream meta(prefix + ".json");
  if (!meta) throw std::runtime_error("read_field_dump: missing " + prefix + ".json");
  json j;
  meta >> j;

  TxRecord rec;
  rec.format_name = j["format"].get<std::string>();
  rec.seed = j["seed"].get<std::uint64_t>();
  const auto& jw = j["wdm"];
  rec.wdm.n_channels = jw["n_channels"].get<int>();
  rec.wdm.symbol_rate_hz = jw["symbol_rate_hz"].get<double>();
  rec.wdm.spacing_hz = jw["spacing_hz"].get<double>();
  rec.wdm.rolloff = jw["rolloff"].get<double>();
  rec.wdm.p_ch_dbm = jw["p_ch_dbm"].get<double>();
  rec.wdm.n_symbols = jw["n_symbols"].get<int>();
  rec.wdm.samples_per_symbol = jw["samples_per_symbol"].get<int>();
  const auto& jl = j["link"];
  rec.link.span_length_km = jl["span_length_km"].get<double>();
  rec.link.n_spans = jl["n_spans"].get<int>();
  rec.link.step_km = jl["step_km"].get<double>();
  rec.link.attenuation_db_per_km = jl["attenuation_db_per_km"].get<double>();
  rec.link.dispersion_ps_nm_km = jl["dispersion_ps_nm_km"].get<double>();
  rec.link.gamma_per_w_km = jl["gamma_per_w_km"].get<double>();
  rec.link.edfa_nf_db = jl["edfa_nf_db"].get<double>();
  rec.link.center_frequency_hz = jl["center_frequency_hz"].get<double>();
  const auto& jp = j["pmd"];
  rec.pmd.pmd_ps_sqrt_km = jp["pmd_ps_sqrt_km"].get<double>();
  rec.pmd.section_km = jp["section_km"].get<double>();
  rec.pmd.dgd_rel_std = jp["dgd_rel_std"].get<double>();
  rec.pmd.seed = jp["seed"].get<std::uint64_t>();

  const Format f = make_format(rec.format_name);
  for (const auto& jb : j["bits"]) {
    rec.bits.push_back(from_hex(jb["hex"].get<std::string>(), jb["n_bits"].get<std::size_t>()));
    rec.tx_symbols.push_back(map_bits_to_slots(f, rec.bits.back(), rec.wdm.n_symbols));
  }
  if (rec.pmd.enabled()) {
    const int per_span =
        static_cast<int>(std::round(rec.link.span_length_km / rec.pmd.section_km));
    rec.pmd_real = pmd_sections(rec.pmd, per_span * rec.link.n_spans, rec.pmd.seed);
  }

  DualPolField field;
  field.sample_rate_hz = j["sample_rate_hz"].get<double>();
  const Eigen::Index n = j["n_samples"].get<Eigen::Index>();
  field.x.resize(n);
  field.y.resize(n);
  std::ifstream in(prefix + ".bin", std::ios::binary);
  if (!in) throw std::runtime_error("read_field_dump: missing " + prefix + ".bin");
  for (Eigen::Index i = 0; i < n; ++i) {
    double vals[4];
    in.read(reinterpret_cast<char*>(vals), sizeof(vals));
    field.x[i] = {vals[0], vals[1]};
    field.y[i] = {vals[2], vals[3]};
  }
  return {std::move(field), std::move(rec)};
}

int read_field_dump_spans(const std::string& prefix) {
  std::ifstream meta(prefix + ".json");
  if (!meta) throw std::runtime_error("read_field_dump_spans: missing " + prefix + ".json");
  json j;
  meta >> j;
  return j["spans_elapsed"].get<int>();
}

}  // namespace prs
