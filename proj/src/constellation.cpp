#include "prs/constellation.hpp"

#include <cmath>
#include <complex>
#include <cstring>
#include <stdexcept>

namespace prs {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

using cplx = std::complex<double>;

// Gray ring on quadrant index 0..3 (counterclockwise, quadrant 0 = (+,+)).
constexpr int kGray4[4] = {0b00, 0b01, 0b11, 0b10};

int popcount6(std::uint32_t v) { return __builtin_popcount(v & 0x3F); }

Eigen::Vector4d to4(cplx x, cplx y) {
  return Eigen::Vector4d(x.real(), x.imag(), y.real(), y.imag());
}

// Signs of quadrant q: (re, im).
std::pair<double, double> quadrant_signs(int q) {
  const double sr = (q == 0 || q == 3) ? 1.0 : -1.0;
  const double si = (q == 0 || q == 1) ? 1.0 : -1.0;
  return {sr, si};
}

// Binary-reflected Gray code of a 3-bit value and its inverse.
int gray3(int v) { return v ^ (v >> 1); }
int gray3_inverse(int g) {
  int v = g;
  v ^= v >> 1;
  v ^= v >> 2;
  return v;
}

}  // namespace

PrsParams PrsParams::normalized() const {
  if (!(nu1 >= 0.0) || !(nu2 > 0.0) || !(nu3 >= 0.0))
    throw std::invalid_argument("PrsParams: require nu1 >= 0, nu2 > 0, nu3 >= 0");
  const double e = r1_squared() + r2_squared();
  if (!(e > 0.0)) throw std::invalid_argument("PrsParams: degenerate coordinates");
  const double s = std::sqrt(e / 2.0);
  return {nu1 / s, nu2 / s, nu3 / s};
}

int LabeledConstellation::index_of_label(std::uint32_t label) const {
  if (label_index_.empty()) {
    label_index_.reserve(labels.size());
    for (int i = 0; i < size(); ++i) label_index_.emplace(labels[i], i);
  }
  auto it = label_index_.find(label);
  return it == label_index_.end() ? -1 : it->second;
}

LabeledConstellation build_pm8qam() {
  // Star 8QAM: inner QPSK at 45°+90°k, outer QPSK at 90°k,
  // r2/r1 = (√2+√6)/2 makes all nearest-neighbor distances equal.
  const double rho = (std::sqrt(2.0) + std::sqrt(6.0)) / 2.0;
  const double r1 = std::sqrt(2.0 / (1.0 + rho * rho));
  const double r2 = r1 * rho;

  cplx pt2d[8];
  for (int q = 0; q < 4; ++q) {
    const cplx inner = r1 * std::exp(cplx(0.0, kPi / 4.0 + kPi / 2.0 * q));
    const cplx outer = r2 * std::exp(cplx(0.0, kPi / 2.0 * q));
    pt2d[(kGray4[q] << 1) | 0] = inner;
    pt2d[(kGray4[q] << 1) | 1] = outer;
  }

  LabeledConstellation c;
  c.name = "pm-8qam";
  c.points.resize(64, 4);
  c.labels.resize(64);
  c.bits_per_symbol = 6;
  c.slot_dim = 4;
  int i = 0;
  for (std::uint32_t lx = 0; lx < 8; ++lx)
    for (std::uint32_t ly = 0; ly < 8; ++ly, ++i) {
      c.points.row(i) = to4(pt2d[lx], pt2d[ly]);
      c.labels[i] = (lx << 3) | ly;
    }
  return c;
}

LabeledConstellation build_4d64prs(const PrsParams& raw) {
  const PrsParams p = raw.normalized();
  if (std::abs(p.nu1 - p.nu3) < 1e-12)
    throw std::invalid_argument("build_4d64prs: nu1 == nu3 produces coincident points");

  // Ring-8 point of quadrant q, type t (0: |Re|>|Im|, 1: |Im|>|Re|).
  auto ring8 = [&](int q, int t) {
    auto [sr, si] = quadrant_signs(q);
    return t == 0 ? cplx(sr * p.nu1, si * p.nu3) : cplx(sr * p.nu3, si * p.nu1);
  };
  auto qpsk = [&](int q) {
    auto [sr, si] = quadrant_signs(q);
    return cplx(sr * p.nu2, si * p.nu2);
  };

  // Label layout (MSB-first b1..b6): b1 b2 = x quadrant (Gray), b3 = pol^type,
  // b4 b5 = y quadrant (Gray), b6 = type.  b3^b6 tells which polarization
  // carries the 8-point ring (0: x), so the two parity classes of the 8D
  // set-partitioning split cleanly along rings and quadrant parity.
  LabeledConstellation c;
  c.name = "4d-64prs";
  c.points.resize(64, 4);
  c.labels.resize(64);
  c.bits_per_symbol = 6;
  c.slot_dim = 4;
  int i = 0;
  for (int qx = 0; qx < 4; ++qx)
    for (int qy = 0; qy < 4; ++qy)
      for (int pol = 0; pol < 2; ++pol)
        for (int t = 0; t < 2; ++t, ++i) {
          const int b3 = pol ^ t;
          const int b6 = t;
          const std::uint32_t lab = (static_cast<std::uint32_t>(kGray4[qx]) << 4) |
                                    (static_cast<std::uint32_t>(b3) << 3) |
                                    (static_cast<std::uint32_t>(kGray4[qy]) << 1) |
                                    static_cast<std::uint32_t>(b6);
          const cplx x = pol == 0 ? ring8(qx, t) : qpsk(qx);
          const cplx y = pol == 0 ? qpsk(qy) : ring8(qy, t);
          c.points.row(i) = to4(x, y);
          c.labels[i] = lab;
        }
  return c;
}

LabeledConstellation build_2a8psk(A8pskVariant variant, double ring_ratio) {
  if (!(ring_ratio > 0.0 && ring_ratio < 1.0))
    throw std::invalid_argument("build_2a8psk: ring_ratio must be in (0,1)");
  const double r2 = std::sqrt(2.0 / (1.0 + ring_ratio * ring_ratio));
  const double r1 = ring_ratio * r2;

  auto phase8 = [&](int bits3) {
    return std::exp(cplx(0.0, 2.0 * kPi * gray3_inverse(bits3) / 8.0));
  };

  LabeledConstellation c;
  c.slot_dim = 4;
  if (variant == A8pskVariant::SixBit) {
    // b1b2b3 -> x phase (Gray), b4b5b6 -> y phase (Gray); the ring
    // assignment is the XOR of all six bits, so every single bit flip
    // switches rings on both polarizations.
    c.name = "4d-2a8psk-6b";
    c.bits_per_symbol = 6;
    c.points.resize(64, 4);
    c.labels.resize(64);
    for (std::uint32_t w = 0; w < 64; ++w) {
      const int bx = (w >> 3) & 7, by = w & 7;
      const int s = popcount6(w) & 1;
      const double rx = s == 0 ? r1 : r2;
      const double ry = s == 0 ? r2 : r1;
      c.points.row(w) = to4(rx * phase8(bx), ry * phase8(by));
      c.labels[w] = w;
    }
  } else {
    // Five information bits: b1b2b3 -> x phase; the y phase LSB is the
    // parity b1^b2^b3 and the ring assignment the XOR of all five bits.
    c.name = "4d-2a8psk-5b";
    c.bits_per_symbol = 5;
    c.points.resize(32, 4);
    c.labels.resize(32);
    for (std::uint32_t w = 0; w < 32; ++w) {
      const int b1 = (w >> 4) & 1, b2 = (w >> 3) & 1, b3 = (w >> 2) & 1;
      const int b4 = (w >> 1) & 1, b5 = w & 1;
      const int yl = b1 ^ b2 ^ b3;
      const int bx = (b1 << 2) | (b2 << 1) | b3;
      const int by = (b4 << 2) | (b5 << 1) | yl;
      const int s = b1 ^ b2 ^ b3 ^ b4 ^ b5;
      const double rx = s == 0 ? r1 : r2;
      const double ry = s == 0 ? r2 : r1;
      c.points.row(w) = to4(rx * phase8(bx), ry * phase8(by));
      c.labels[w] = w;
    }
  }
  return c;
}

std::pair<LabeledConstellation, LabeledConstellation> build_tdh_5p5b(double ring_ratio_5b,
                                                                     double ring_ratio_6b) {
  return {build_2a8psk(A8pskVariant::FiveBit, ring_ratio_5b),
          build_2a8psk(A8pskVariant::SixBit, ring_ratio_6b)};
}

int parity_bit(ParityType type, std::uint32_t bits11) {
  if (type == ParityType::T1) return 1 ^ (__builtin_popcount(bits11 & 0x7FF) & 1);
  // bits11 is MSB-first b1..b11: b3 is bit 8, b6 bit 5, b9 bit 2.
  const int b3 = (bits11 >> 8) & 1;
  const int b6 = (bits11 >> 5) & 1;
  const int b9 = (bits11 >> 2) & 1;
  return 1 ^ (b3 ^ b6 ^ b9);
}

LabeledConstellation build_8d2048prs(ParityType type, const LabeledConstellation& base) {
  if (base.size() != 64 || base.bits_per_symbol != 6)
    throw std::invalid_argument("build_8d2048prs: base must have 64 points and 6-bit labels");

  LabeledConstellation c;
  c.name = type == ParityType::T1 ? "8d-2048prs-t1" : "8d-2048prs-t2";
  c.bits_per_symbol = 11;
  c.slot_dim = 4;
  c.points.resize(2048, 8);
  c.labels.resize(2048);
  for (std::uint32_t info = 0; info < 2048; ++info) {
    const std::uint32_t word = (info << 1) | static_cast<std::uint32_t>(parity_bit(type, info));
    const std::uint32_t w1 = (word >> 6) & 0x3F;
    const std::uint32_t w2 = word & 0x3F;
    const int i1 = base.index_of_label(w1);
    const int i2 = base.index_of_label(w2);
    if (i1 < 0 || i2 < 0) throw std::invalid_argument("build_8d2048prs: base label table incomplete");
    c.points.row(info).head<4>() = base.points.row(i1);
    c.points.row(info).tail<4>() = base.points.row(i2);
    c.labels[info] = info;
  }
  return c;
}

Eigen::VectorXd bits_to_symbol(const LabeledConstellation& c, std::uint32_t label) {
  const int i = c.index_of_label(label);
  if (i < 0) throw std::invalid_argument("bits_to_symbol: label not in constellation");
  return c.points.row(i);
}

std::uint32_t symbol_to_bits(const LabeledConstellation& c, const Eigen::VectorXd& point) {
  if (point.size() != c.dim()) throw std::invalid_argument("symbol_to_bits: dimension mismatch");
  for (int i = 0; i < c.size(); ++i) {
    if (std::memcmp(c.points.row(i).data(), point.data(), sizeof(double) * c.dim()) == 0)
      return c.labels[i];
  }
  throw std::invalid_argument("symbol_to_bits: point not in constellation");
}

LabeledConstellation build_bpsk() {
  LabeledConstellation c;
  c.name = "bpsk";
  c.bits_per_symbol = 1;
  c.slot_dim = 1;
  c.points.resize(2, 1);
  c.points << 1.0, -1.0;
  c.labels = {0, 1};
  return c;
}

LabeledConstellation build_qpsk() {
  LabeledConstellation c;
  c.name = "qpsk";
  c.bits_per_symbol = 2;
  c.slot_dim = 2;
  c.points.resize(4, 2);
  c.labels.resize(4);
  const double a = std::sqrt(0.5);
  // Gray: b1 = Re sign, b2 = Im sign.
  int i = 0;
  for (std::uint32_t b1 = 0; b1 < 2; ++b1)
    for (std::uint32_t b2 = 0; b2 < 2; ++b2, ++i) {
      c.points.row(i) << (b1 ? -a : a), (b2 ? -a : a);
      c.labels[i] = (b1 << 1) | b2;
    }
  return c;
}

LabeledConstellation build_8psk() {
  LabeledConstellation c;
  c.name = "8psk";
  c.bits_per_symbol = 3;
  c.slot_dim = 2;
  c.points.resize(8, 2);
  c.labels.resize(8);
  for (int i = 0; i < 8; ++i) {
    const double ph = 2.0 * kPi * i / 8.0;
    c.points.row(i) << std::cos(ph), std::sin(ph);
    c.labels[i] = static_cast<std::uint32_t>(gray3(i));
  }
  return c;
}

namespace presets {

PrsParams prs_4d() { return PrsParams{1.150000, 0.506211, 0.406202}.normalized(); }
PrsParams prs_t1() { return PrsParams{1.156873, 0.503463, 0.393366}.normalized(); }
PrsParams prs_t2() { return PrsParams{1.141512, 0.503463, 0.435890}.normalized(); }
double ring_ratio_5b() { return 0.65; }
double ring_ratio_6b() { return 0.65; }

}  // namespace presets

int Format::bits_per_two_slots() const {
  switch (kind) {
    case Kind::Parity8D:
      return 11;
    case Kind::Tdh:
      return parts[0].bits_per_symbol + parts[1].bits_per_symbol;
    case Kind::Single:
    default:
      return 2 * parts[0].bits_per_symbol;
  }
}

Format make_format(const std::string& name) {
  Format f;
  f.name = name;
  if (name == "pm-8qam") {
    f.parts = {build_pm8qam()};
  } else if (name == "4d-64prs") {
    f.parts = {build_4d64prs(presets::prs_4d())};
  } else if (name == "4d-2a8psk-5b") {
    f.parts = {build_2a8psk(A8pskVariant::FiveBit, presets::ring_ratio_5b())};
  } else if (name == "4d-2a8psk-6b") {
    f.parts = {build_2a8psk(A8pskVariant::SixBit, presets::ring_ratio_6b())};
  } else if (name == "tdh-5p5b") {
    auto [a, b] = build_tdh_5p5b(presets::ring_ratio_5b(), presets::ring_ratio_6b());
    f.kind = Format::Kind::Tdh;
    f.parts = {std::move(a), std::move(b)};
  } else if (name == "8d-2048prs-t1" || name == "8d-2048prs-t2") {
    f.kind = Format::Kind::Parity8D;
    f.parity = name.back() == '1' ? ParityType::T1 : ParityType::T2;
    f.base = build_4d64prs(f.parity == ParityType::T1 ? presets::prs_t1() : presets::prs_t2());
    f.parts = {build_8d2048prs(f.parity, f.base)};
  } else if (name == "bpsk") {
    f.parts = {build_bpsk()};
  } else if (name == "qpsk") {
    f.parts = {build_qpsk()};
  } else if (name == "8psk") {
    f.parts = {build_8psk()};
  } else {
    throw std::invalid_argument("unknown format: " + name);
  }
  return f;
}

std::vector<std::string> known_formats() {
  return {"pm-8qam",  "4d-64prs",      "4d-2a8psk-5b",  "4d-2a8psk-6b",
          "tdh-5p5b", "8d-2048prs-t1", "8d-2048prs-t2"};
}

}  // namespace prs
