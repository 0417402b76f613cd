#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "prs/constellation.hpp"
#include "prs/fiber.hpp"

namespace prs {

struct RxMetrics {
  double snr_eff_db = 0.0;
  double gmi = 0.0;   // bits per two slots for two-slot formats, per slot otherwise
  double ngmi = 0.0;
  int n_symbols_used = 0;
};

/// Frequency shift of channel `channel_index` to baseband plus brick-wall
/// selection of width (1+rolloff)*symbol_rate.  Throws on an out-of-grid index.
DualPolField extract_channel(const DualPolField& rx, const WdmSpec& wdm, int channel_index);

/// Exact inverse of the accumulated linear channel: every PMD section
/// operator in reverse order, then the accumulated dispersion conjugate.
/// `n_spans` limits how much of the realization has been traversed.
DualPolField ideal_linear_compensation(const DualPolField& field, const FiberLinkSpec& link,
                                       const PmdRealization& pmd_real, int n_spans);

/// RRC matched filter plus decimation at symbol instants; rows are 4D slots.
Eigen::MatrixXd matched_filter_downsample(const DualPolField& field, int sps, double rolloff,
                                          double symbol_rate_hz);

/// Data-aided single rotation per polarization: phi = arg sum rx conj(tx).
Eigen::MatrixXd ideal_phase_compensation(const Eigen::MatrixXd& rx_symbols,
                                         const Eigen::MatrixXd& tx_symbols);

/// Joint complex least-squares scale over both polarizations;
/// SNR_eff = |a|^2 E||tx||^2 / E||rx - a tx||^2 in dB, capped at 60 dB.
double effective_snr(const Eigen::MatrixXd& rx_symbols, const Eigen::MatrixXd& tx_symbols);

/// Gaussian auxiliary-channel GMI of the measured symbols at the noise
/// variance implied by SNR_eff; same estimator family as the AWGN engine.
RxMetrics ngmi_from_rx(const Eigen::MatrixXd& rx_symbols, const std::vector<std::uint8_t>& tx_bits,
                       const Format& f);

/// Full genie receiver for the center channel of a recorded transmission.
RxMetrics evaluate_link(const DualPolField& rx_field, const TxRecord& record, int n_spans,
                        int channel_index);

struct ReachPoint {
  std::string format;
  int spans = 0;
  double distance_km = 0.0;
  double best_p_ch_dbm = 0.0;
  double ngmi = 0.0;
  double snr_eff_db = 0.0;
};

struct ReachResult {
  std::string format;
  int reach_spans = 0;  // max spans with NGMI >= target (0 when never met)
  std::vector<ReachPoint> points;
};

/// For each format: maximize NGMI over the launch-power grid at every span
/// count, then report the longest distance meeting the target.
std::vector<ReachResult> reach_sweep(const std::vector<std::string>& format_names,
                                     WdmSpec wdm, FiberLinkSpec link, const PmdSpec& pmd,
                                     const std::vector<double>& p_ch_grid_dbm,
                                     double ngmi_target, std::uint64_t seed);

}  // namespace prs
