#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace prs {

/// Ring coordinates of the polarization-ring-switching family.
/// The 8-point ring is {±nu1±j nu3, ±nu3±j nu1} (radius R1, R1² = nu1²+nu3²),
/// the 4-point ring is {nu2(±1±j)} (radius R2, R2² = 2 nu2²).  Construction
/// normalizes so that R1² + R2² = 2 (unit average energy per polarization).
struct PrsParams {
  double nu1 = 0.0;
  double nu2 = 0.0;
  double nu3 = 0.0;

  /// Returns a copy rescaled so R1² + R2² = 2.
  PrsParams normalized() const;
  double r1_squared() const { return nu1 * nu1 + nu3 * nu3; }
  double r2_squared() const { return 2.0 * nu2 * nu2; }
};

/// A set of M points in real N-space with an m-bit label per point.
/// Labels are stored MSB-first: bit b1 of the spec'd labeling is the
/// most significant of the m bits.
struct LabeledConstellation {
  std::string name;
  Eigen::MatrixXd points;            // M x N, row per symbol
  std::vector<std::uint32_t> labels; // size M
  int bits_per_symbol = 0;           // m
  int slot_dim = 4;                  // dimensions per modulation slot (4 for DP formats)

  int size() const { return static_cast<int>(points.rows()); }
  int dim() const { return static_cast<int>(points.cols()); }
  int slots() const { return dim() / slot_dim; }
  double average_energy() const { return points.rowwise().squaredNorm().mean(); }
  /// Average energy per modulation slot.
  double energy_per_slot() const { return average_energy() / slots(); }

  /// Index of the point carrying `label`, or -1.
  int index_of_label(std::uint32_t label) const;

 private:
  mutable std::unordered_map<std::uint32_t, int> label_index_;
};

enum class ParityType { T1, T2 };
enum class A8pskVariant { FiveBit, SixBit };

/// PM-8QAM: per-polarization star 8QAM (QPSK plus a 45°-rotated QPSK with
/// ring ratio (√2+√6)/2), Gray labeling, unit average 2D energy.
LabeledConstellation build_pm8qam();

/// 64-point polarization-ring-switching format; constant modulus 2.
LabeledConstellation build_4d64prs(const PrsParams& params);

/// Dual-polarization two-amplitude 8PSK.  ring_ratio = r1/r2 in (0,1);
/// parity bits tie the (r1,r2)/(r2,r1) ring assignment (and, for the 5-bit
/// variant, the y-polarization phase LSB) to the information bits.
LabeledConstellation build_2a8psk(A8pskVariant variant, double ring_ratio);

/// Time-domain hybrid at 1:1 ratio: even slots use the 5-bit variant, odd
/// slots the 6-bit one; 11 bits per two slots.
std::pair<LabeledConstellation, LabeledConstellation> build_tdh_5p5b(
    double ring_ratio_5b, double ring_ratio_6b);

/// Parity bit b12 from the 11 information bits (MSB-first in `bits11`).
/// T1: negation of XOR(b1..b11); T2: negation of XOR(b3,b6,b9).
int parity_bit(ParityType type, std::uint32_t bits11);

/// 2048-point 8D format: 11 information bits extend to 12 via parity_bit,
/// the 12 bits index two consecutive symbols of the 64-point base.
LabeledConstellation build_8d2048prs(ParityType type, const LabeledConstellation& base);

/// Label -> point (throws on unknown label, e.g. a 12-bit word violating
/// the parity equation of an 8D format).
Eigen::VectorXd bits_to_symbol(const LabeledConstellation& c, std::uint32_t label);

/// Point -> label by exact coordinate match (points are constructed, never
/// quantized); throws if the point is not in the constellation.
std::uint32_t symbol_to_bits(const LabeledConstellation& c, const Eigen::VectorXd& point);

/// Small reference constellations used by estimator oracles.
LabeledConstellation build_bpsk();
LabeledConstellation build_qpsk();
LabeledConstellation build_8psk();

namespace presets {

/// Ring coordinates shipped as defaults.  The 4D set comes from GMI
/// maximization near the NGMI = 0.85 operating point; the T1/T2 sets are
/// re-tuned per format (see optimize_prs_params).
PrsParams prs_4d();
PrsParams prs_t1();
PrsParams prs_t2();
double ring_ratio_5b();
double ring_ratio_6b();

}  // namespace presets

/// A modulation scheme as consumed by the AWGN and fiber engines.
struct Format {
  enum class Kind { Single, Parity8D, Tdh };

  Kind kind = Kind::Single;
  std::string name;
  std::vector<LabeledConstellation> parts;  // Single/Parity8D: 1; Tdh: {even, odd}
  ParityType parity = ParityType::T1;       // Parity8D only
  LabeledConstellation base;                // Parity8D only: the 64-point parent

  /// Bits per two consecutive 4D slots (the natural accounting unit).
  int bits_per_two_slots() const;
  /// Spectral efficiency in bits per 4D symbol.
  double se_bits_per_4d() const { return bits_per_two_slots() / 2.0; }
};

/// Formats by CLI name: pm-8qam | 4d-64prs | 4d-2a8psk-5b | 4d-2a8psk-6b |
/// tdh-5p5b | 8d-2048prs-t1 | 8d-2048prs-t2 (toys: bpsk, qpsk, 8psk).
Format make_format(const std::string& name);
std::vector<std::string> known_formats();

}  // namespace prs
