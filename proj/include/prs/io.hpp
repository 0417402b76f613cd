#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prs/constellation.hpp"
#include "prs/fiber.hpp"

namespace prs {

/// Deterministic CSV writer: doubles via "%.12g", no locale, no timestamps.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  ~CsvWriter();
  void row(const std::vector<std::string>& cells);
  static std::string num(double v);
  static std::string num(std::int64_t v);

 private:
  std::string path_;
  std::string buffer_;
};

/// Constellation export: CSV columns dim_0..dim_{N-1}, label_bits
/// (MSB-first string) plus a JSON variant with metadata.
void export_constellation_csv(const LabeledConstellation& c, const std::string& path);
void export_constellation_json(const LabeledConstellation& c, const std::string& path);

/// Field dump: little-endian f64 interleaved xRe,xIm,yRe,yIm with a JSON
/// sidecar carrying the full transmit record (bits hex-encoded).
void write_field_dump(const std::string& prefix, const DualPolField& field,
                      const TxRecord& record, int spans_elapsed);
std::pair<DualPolField, TxRecord> read_field_dump(const std::string& prefix);
int read_field_dump_spans(const std::string& prefix);

std::string to_hex(const std::vector<std::uint8_t>& bits);
std::vector<std::uint8_t> from_hex(const std::string& hex, std::size_t n_bits);

}  // namespace prs
