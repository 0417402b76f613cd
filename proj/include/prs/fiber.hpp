#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "prs/constellation.hpp"

namespace prs {

/// Dual-polarization sampled field; |x|²+|y|² is instantaneous power in W.
struct DualPolField {
  Eigen::ArrayXcd x, y;
  double sample_rate_hz = 0.0;

  Eigen::Index size() const { return x.size(); }
  double mean_power_w() const { return (x.abs2() + y.abs2()).mean(); }
  double energy() const { return (x.abs2() + y.abs2()).sum(); }
};

struct WdmSpec {
  int n_channels = 11;
  double symbol_rate_hz = 45e9;
  double spacing_hz = 50e9;
  double rolloff = 0.1;
  double p_ch_dbm = 0.0;
  int n_symbols = 1 << 16;  // 4D symbols per channel (power of two)
  int samples_per_symbol = 16;

  double sample_rate_hz() const { return symbol_rate_hz * samples_per_symbol; }
  double p_ch_w() const { return 1e-3 * std::pow(10.0, p_ch_dbm / 10.0); }
  void validate() const;
};

struct FiberLinkSpec {
  double span_length_km = 80.0;
  int n_spans = 1;
  double step_km = 0.1;
  double attenuation_db_per_km = 0.2;
  double dispersion_ps_nm_km = 17.0;
  double gamma_per_w_km = 1.3;
  double edfa_nf_db = 5.0;
  double center_frequency_hz = 193.4144890e12;  // ~1550 nm

  double alpha_np_per_km() const { return attenuation_db_per_km * 0.23025850929940457; }
  double beta2_s2_per_km() const;
  double span_gain_db() const { return attenuation_db_per_km * span_length_km; }
  void validate() const;
};

struct PmdSpec {
  double pmd_ps_sqrt_km = 0.0;  // 0 disables PMD
  double section_km = 1.0;
  double dgd_rel_std = 0.2;
  std::uint64_t seed = 0;

  bool enabled() const { return pmd_ps_sqrt_km > 0.0; }
};

/// One coarse-step section: Haar-uniform SU(2) rotation followed by a
/// frequency-domain DGD retardation diag(e^{+jωτ/2}, e^{-jωτ/2}).
struct PmdSection {
  Eigen::Matrix2cd rotation;
  double dgd_s = 0.0;
};

struct PmdRealization {
  std::vector<PmdSection> sections;  // whole link, propagation order
  double section_km = 1.0;
};

/// Sections with mean per-section DGD calibrated so the ensemble mean link
/// DGD equals pmd·sqrt(L); negatives truncated to zero.
PmdRealization pmd_sections(const PmdSpec& pmd, int n_sections, std::uint64_t seed);

/// Frequency-domain RRC shaping with circular convolution; output has unit
/// average power.  `symbols` is n_slots x 4 (4D slot per row).
DualPolField rrc_shape(const Eigen::MatrixXd& symbols, int sps, double rolloff,
                       double symbol_rate_hz);

/// Sum of frequency-shifted channels, each scaled to p_ch_w.  Offsets are
/// quantized to integer FFT bins so periodic blocks stay periodic.
DualPolField wdm_mux(const std::vector<DualPolField>& channels, double spacing_hz,
                     double p_ch_w);

/// EDFA: amplitude gain plus per-polarization circular Gaussian ASE with
/// PSD (G-1) h f_c n_sp, n_sp = 10^(NF/10)/2.  Deterministic given (seed, tag).
void edfa(DualPolField& field, double gain_db, double nf_db, double center_frequency_hz,
          std::uint64_t seed, std::uint64_t tag);

struct TxRecord {
  WdmSpec wdm;
  FiberLinkSpec link;
  PmdSpec pmd;
  std::string format_name;
  std::vector<std::vector<std::uint8_t>> bits;  // per channel
  std::vector<Eigen::MatrixXd> tx_symbols;      // per channel, n_slots x 4
  PmdRealization pmd_real;
  std::uint64_t seed = 0;
};

/// Transmitter plus split-step Manakov propagation, one span at a time.
class FiberSim {
 public:
  FiberSim(const WdmSpec& wdm, const FiberLinkSpec& link, const PmdSpec& pmd,
           const Format& format, std::uint64_t seed);

  const TxRecord& record() const { return record_; }
  /// Builds the multiplexed launch field.
  DualPolField launch() const;
  /// Propagates one span in place (SSFM + PMD sections + EDFA).
  /// Throws on non-finite field values, reporting the span index.
  void propagate_span(DualPolField& field, int span_index) const;

 private:
  TxRecord record_;
  Format format_;
};

/// Full chain: generate bits, map, shape, mux, propagate all spans.
std::pair<TxRecord, DualPolField> transmit(const WdmSpec& wdm, const FiberLinkSpec& link,
                                           const PmdSpec& pmd, const Format& format,
                                           std::uint64_t seed);

/// Bit-to-slot mapping used by the transmitter (exposed for the receiver
/// and tests): consumes bits MSB-first, two slots at a time.
Eigen::MatrixXd map_bits_to_slots(const Format& f, const std::vector<std::uint8_t>& bits,
                                  int n_slots);

namespace fftutil {
void fwd(Eigen::ArrayXcd& a);
void inv(Eigen::ArrayXcd& a);
/// Frequency of FFT bin k at sample rate fs (two-sided, Hz).
double bin_freq(Eigen::Index k, Eigen::Index n, double fs);
/// Circular bin shift: positive `bins` moves content up in frequency.
void shift_bins(Eigen::ArrayXcd& spectrum, Eigen::Index bins);
}  // namespace fftutil

}  // namespace prs
