#include "prs/rxdsp.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "prs/air.hpp"

namespace prs {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
using cplx = std::complex<double>;

double rc_mag_sq(double f, double rate, double rolloff) {
  const double af = std::abs(f);
  const double f1 = 0.5 * rate * (1.0 - rolloff);
  const double f2 = 0.5 * rate * (1.0 + rolloff);
  if (af <= f1) return 1.0;
  if (af >= f2) return 0.0;
  const double c = std::cos(kPi / 2.0 * (af - f1) / (f2 - f1));
  return c;  // sqrt(RC); matched filter reuses the RRC magnitude
}

Eigen::MatrixXd slots_from_complex(const Eigen::ArrayXcd& x, const Eigen::ArrayXcd& y, int sps) {
  const Eigen::Index n_sym = x.size() / sps;
  Eigen::MatrixXd out(n_sym, 4);
  for (Eigen::Index k = 0; k < n_sym; ++k) {
    const cplx xv = x[k * sps], yv = y[k * sps];
    out.row(k) << xv.real(), xv.imag(), yv.real(), yv.imag();
  }
  return out;
}

}  // namespace

DualPolField extract_channel(const DualPolField& rx, const WdmSpec& wdm, int channel_index) {
  if (channel_index < 0 || channel_index >= wdm.n_channels)
    throw std::invalid_argument("extract_channel: index out of grid");
  const Eigen::Index n = rx.size();
  const double fs = rx.sample_rate_hz;
  const double df = fs / static_cast<double>(n);
  const double offset = (channel_index - (wdm.n_channels - 1) / 2.0) * wdm.spacing_hz;
  const Eigen::Index bins = static_cast<Eigen::Index>(std::llround(offset / df));

  DualPolField out;
  out.sample_rate_hz = fs;
  out.x = rx.x;
  out.y = rx.y;
  fftutil::fwd(out.x);
  fftutil::fwd(out.y);
  fftutil::shift_bins(out.x, -bins);
  fftutil::shift_bins(out.y, -bins);
  const double half_band = 0.5 * wdm.symbol_rate_hz * (1.0 + wdm.rolloff);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (std::abs(fftutil::bin_freq(k, n, fs)) > half_band) {
      out.x[k] = 0.0;
      out.y[k] = 0.0;
    }
  }
  fftutil::inv(out.x);
  fftutil::inv(out.y);
  return out;
}

DualPolField ideal_linear_compensation(const DualPolField& field, const FiberLinkSpec& link,
                                       const PmdRealization& pmd_real, int n_spans) {
  const Eigen::Index n = field.size();
  const double fs = field.sample_rate_hz;
  const double total_km = link.span_length_km * n_spans;
  const double beta2 = link.beta2_s2_per_km();

  int n_sections = 0;
  if (!pmd_real.sections.empty()) {
    const double per_span = link.span_length_km / pmd_real.section_km;
    n_sections = static_cast<int>(std::round(per_span)) * n_spans;
    if (n_sections > static_cast<int>(pmd_real.sections.size()))
      throw std::invalid_argument("ideal_linear_compensation: realization shorter than link");
  }

  DualPolField out;
  out.sample_rate_hz = fs;
  out.x = field.x;
  out.y = field.y;
  fftutil::fwd(out.x);
  fftutil::fwd(out.y);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double w = 2.0 * kPi * fftutil::bin_freq(k, n, fs);
    cplx xv = out.x[k], yv = out.y[k];
    // PMD inverse: sections in reverse order, adjoint of each operator.
    for (int s = n_sections - 1; s >= 0; --s) {
      const PmdSection& sec = pmd_real.sections[s];
      const cplx ph = std::exp(cplx(0, -0.5 * w * sec.dgd_s));
      const cplx xd = xv * ph;
      const cplx yd = yv * std::conj(ph);
      const Eigen::Matrix2cd& r = sec.rotation;
      xv = std::conj(r(0, 0)) * xd + std::conj(r(1, 0)) * yd;
      yv = std::conj(r(0, 1)) * xd + std::conj(r(1, 1)) * yd;
    }
    const cplx cd = std::exp(cplx(0, -(beta2 / 2.0) * w * w * total_km));
    out.x[k] = xv * cd;
    out.y[k] = yv * cd;
  }
  fftutil::inv(out.x);
  fftutil::inv(out.y);
  return out;
}

Eigen::MatrixXd matched_filter_downsample(const DualPolField& field, int sps, double rolloff,
                                          double symbol_rate_hz) {
  const Eigen::Index n = field.size();
  Eigen::ArrayXcd x = field.x, y = field.y;
  fftutil::fwd(x);
  fftutil::fwd(y);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double h = rc_mag_sq(fftutil::bin_freq(k, n, field.sample_rate_hz), symbol_rate_hz,
                               rolloff);
    x[k] *= h;
    y[k] *= h;
  }
  fftutil::inv(x);
  fftutil::inv(y);
  return slots_from_complex(x, y, sps);
}

Eigen::MatrixXd ideal_phase_compensation(const Eigen::MatrixXd& rx_symbols,
                                         const Eigen::MatrixXd& tx_symbols) {
  if (rx_symbols.rows() != tx_symbols.rows())
    throw std::invalid_argument("ideal_phase_compensation: length mismatch");
  Eigen::MatrixXd out = rx_symbols;
  for (int pol = 0; pol < 2; ++pol) {
    cplx corr(0, 0);
    for (Eigen::Index k = 0; k < rx_symbols.rows(); ++k) {
      const cplx r(rx_symbols(k, 2 * pol), rx_symbols(k, 2 * pol + 1));
      const cplx t(tx_symbols(k, 2 * pol), tx_symbols(k, 2 * pol + 1));
      corr += r * std::conj(t);
    }
    if (std::abs(corr) == 0.0)
      throw std::runtime_error("ideal_phase_compensation: zero correlation");
    const cplx rot = std::conj(corr) / std::abs(corr);
    for (Eigen::Index k = 0; k < out.rows(); ++k) {
      const cplx r(rx_symbols(k, 2 * pol), rx_symbols(k, 2 * pol + 1));
      const cplx c = r * rot;
      out(k, 2 * pol) = c.real();
      out(k, 2 * pol + 1) = c.imag();
    }
  }
  return out;
}

double effective_snr(const Eigen::MatrixXd& rx_symbols, const Eigen::MatrixXd& tx_symbols) {
  if (rx_symbols.rows() != tx_symbols.rows() || rx_symbols.rows() < 1)
    throw std::invalid_argument("effective_snr: bad inputs");
  const double tx_energy = tx_symbols.squaredNorm();
  if (!(tx_energy > 0.0)) throw std::invalid_argument("effective_snr: degenerate tx energy");
  // Complex scale a = <rx,tx>/<tx,tx> jointly over both polarizations.
  cplx num(0, 0);
  for (Eigen::Index k = 0; k < rx_symbols.rows(); ++k)
    for (int pol = 0; pol < 2; ++pol) {
      const cplx r(rx_symbols(k, 2 * pol), rx_symbols(k, 2 * pol + 1));
      const cplx t(tx_symbols(k, 2 * pol), tx_symbols(k, 2 * pol + 1));
      num += r * std::conj(t);
    }
  const cplx a = num / tx_energy;
  double err = 0.0;
  for (Eigen::Index k = 0; k < rx_symbols.rows(); ++k)
    for (int pol = 0; pol < 2; ++pol) {
      const cplx r(rx_symbols(k, 2 * pol), rx_symbols(k, 2 * pol + 1));
      const cplx t(tx_symbols(k, 2 * pol), tx_symbols(k, 2 * pol + 1));
      err += std::norm(r - a * t);
    }
  const double snr = std::norm(a) * tx_energy / err;
  const double snr_db = 10.0 * std::log10(snr);
  return std::min(snr_db, 60.0);
}

namespace {

/// Shared GMI accumulation on measured samples with a Gaussian auxiliary
/// channel; mirrors the Monte Carlo estimator but walks recorded symbols.
double log1pexp(double x) {
  if (x > 35.0) return x;
  if (x < -35.0) return std::exp(x);
  return std::log1p(std::exp(x));
}
constexpr double kLn2 = 0.6931471805599453094172321214581766;

int class_of(ParityType type, std::uint32_t w) {
  if (type == ParityType::T1) return __builtin_popcount(w & 0x3F) & 1;
  return ((w >> 3) ^ w) & 1;
}

double gmi_single_measured(const LabeledConstellation& c, const Eigen::MatrixXd& rx,
                           const std::vector<std::uint32_t>& tx_labels, double sig2, int stride,
                           int offset) {
  double total = 0.0;
  int count = 0;
  const int m = c.bits_per_symbol;
  for (Eigen::Index k = offset; k < rx.rows(); k += stride, ++count) {
    const Eigen::VectorXd y = rx.row(k).transpose();
    const Eigen::VectorXd llr = bit_llrs(c, y, sig2);
    const std::uint32_t lab = tx_labels[k];
    for (int b = 0; b < m; ++b) {
      const bool bit = (lab >> (m - 1 - b)) & 1;
      total += log1pexp(bit ? llr[b] : -llr[b]);
    }
  }
  return m - total / kLn2 / count;
}

}  // namespace

RxMetrics ngmi_from_rx(const Eigen::MatrixXd& rx_symbols, const std::vector<std::uint8_t>& tx_bits,
                       const Format& f) {
  RxMetrics out;
  out.n_symbols_used = static_cast<int>(rx_symbols.rows());

  // Rebuild transmitted slots from the bits (genie) to scale and measure.
  const int n_slots = static_cast<int>(rx_symbols.rows());
  Eigen::MatrixXd tx = map_bits_to_slots(f, tx_bits, n_slots);

  // LS scale so measured samples live on the constellation grid.
  cplx num(0, 0);
  double den = tx.squaredNorm();
  for (Eigen::Index k = 0; k < rx_symbols.rows(); ++k)
    for (int pol = 0; pol < 2; ++pol) {
      const cplx r(rx_symbols(k, 2 * pol), rx_symbols(k, 2 * pol + 1));
      const cplx t(tx(k, 2 * pol), tx(k, 2 * pol + 1));
      num += r * std::conj(t);
    }
  const cplx a = num / den;
  Eigen::MatrixXd scaled(rx_symbols.rows(), 4);
  for (Eigen::Index k = 0; k < rx_symbols.rows(); ++k)
    for (int pol = 0; pol < 2; ++pol) {
      const cplx r(rx_symbols(k, 2 * pol), rx_symbols(k, 2 * pol + 1));
      const cplx c = r / a;
      scaled(k, 2 * pol) = c.real();
      scaled(k, 2 * pol + 1) = c.imag();
    }
  out.snr_eff_db = effective_snr(rx_symbols, tx);
  const double sig2 = (scaled - tx).squaredNorm() / (4.0 * scaled.rows());

  const int m = f.bits_per_two_slots();
  switch (f.kind) {
    case Format::Kind::Parity8D: {
      // 8D detection over the full 2048-point set per two-slot block.
      const LabeledConstellation& base = f.base;
      int label_row[64];
      for (int i = 0; i < 64; ++i) label_row[base.labels[i]] = i;
      int cls[64];
      for (int w = 0; w < 64; ++w) cls[w] = class_of(f.parity, w);

      double total = 0.0;
      int blocks = 0;
      std::size_t bitpos = 0;
      Eigen::VectorXd met1(64), met2(64), e1(64), e2(64);
      for (int s = 0; s + 1 < n_slots; s += 2, ++blocks) {
        std::uint32_t info = 0;
        for (int i = 0; i < 11; ++i) info = (info << 1) | tx_bits[bitpos++];
        const std::uint32_t word =
            (info << 1) | static_cast<std::uint32_t>(parity_bit(f.parity, info));
        const std::uint32_t w1 = (word >> 6) & 0x3F, w2 = word & 0x3F;
        const Eigen::Vector4d y1 = scaled.row(s).transpose();
        const Eigen::Vector4d y2 = scaled.row(s + 1).transpose();
        met1 = -(base.points.rowwise() - y1.transpose()).rowwise().squaredNorm() / (2.0 * sig2);
        met2 = -(base.points.rowwise() - y2.transpose()).rowwise().squaredNorm() / (2.0 * sig2);
        const double mx1 = met1.maxCoeff(), mx2 = met2.maxCoeff();
        for (int w = 0; w < 64; ++w) {
          e1[w] = std::exp(met1[label_row[w]] - mx1);
          e2[w] = std::exp(met2[label_row[w]] - mx2);
        }
        double E1[2] = {0, 0}, E2[2] = {0, 0};
        for (int w = 0; w < 64; ++w) {
          E1[cls[w]] += e1[w];
          E2[cls[w]] += e2[w];
        }
        for (int k = 0; k < 6; ++k) {
          const std::uint32_t mask = 1u << (5 - k);
          double s0[2] = {0, 0}, s1[2] = {0, 0};
          for (int w = 0; w < 64; ++w) (w & mask ? s1 : s0)[cls[w]] += e1[w];
          const double llr =
              std::log(s0[0] * E2[1] + s0[1] * E2[0]) - std::log(s1[0] * E2[1] + s1[1] * E2[0]);
          total += log1pexp((w1 & mask) ? llr : -llr);
        }
        for (int k = 0; k < 5; ++k) {
          const std::uint32_t mask = 1u << (5 - k);
          double s0[2] = {0, 0}, s1[2] = {0, 0};
          for (int w = 0; w < 64; ++w) (w & mask ? s1 : s0)[cls[w]] += e2[w];
          const double llr =
              std::log(E1[1] * s0[0] + E1[0] * s0[1]) - std::log(E1[1] * s1[0] + E1[0] * s1[1]);
          total += log1pexp((w2 & mask) ? llr : -llr);
        }
      }
      out.gmi = 11.0 - total / kLn2 / blocks;
      break;
    }
    case Format::Kind::Tdh: {
      std::vector<std::uint32_t> lab_even(n_slots, 0), lab_odd(n_slots, 0);
      std::size_t bitpos = 0;
      for (int s = 0; s < n_slots; ++s) {
        const LabeledConstellation& c = f.parts[s % 2];
        std::uint32_t v = 0;
        for (int i = 0; i < c.bits_per_symbol; ++i) v = (v << 1) | tx_bits[bitpos++];
        (s % 2 == 0 ? lab_even : lab_odd)[s] = v;
      }
      const double g5 = gmi_single_measured(f.parts[0], scaled, lab_even, sig2, 2, 0);
      const double g6 = gmi_single_measured(f.parts[1], scaled, lab_odd, sig2, 2, 1);
      out.gmi = g5 + g6;
      break;
    }
    case Format::Kind::Single:
    default: {
      const LabeledConstellation& c = f.parts[0];
      std::vector<std::uint32_t> labs(n_slots);
      std::size_t bitpos = 0;
      for (int s = 0; s < n_slots; ++s) {
        std::uint32_t v = 0;
        for (int i = 0; i < c.bits_per_symbol; ++i) v = (v << 1) | tx_bits[bitpos++];
        labs[s] = v;
      }
      out.gmi = 2.0 * gmi_single_measured(c, scaled, labs, sig2, 1, 0);
      break;
    }
  }
  out.ngmi = out.gmi / m;
  return out;
}

RxMetrics evaluate_link(const DualPolField& rx_field, const TxRecord& record, int n_spans,
                        int channel_index) {
  const WdmSpec& wdm = record.wdm;
  DualPolField comp = ideal_linear_compensation(rx_field, record.link, record.pmd_real, n_spans);
  DualPolField chan = extract_channel(comp, wdm, channel_index);
  Eigen::MatrixXd rx =
      matched_filter_downsample(chan, wdm.samples_per_symbol, wdm.rolloff, wdm.symbol_rate_hz);
  const Eigen::MatrixXd& tx = record.tx_symbols[channel_index];
  rx = ideal_phase_compensation(rx, tx);
  Format f = make_format(record.format_name);
  RxMetrics m = ngmi_from_rx(rx, record.bits[channel_index], f);
  return m;
}

std::vector<ReachResult> reach_sweep(const std::vector<std::string>& format_names, WdmSpec wdm,
                                     FiberLinkSpec link, const PmdSpec& pmd,
                                     const std::vector<double>& p_ch_grid_dbm, double ngmi_target,
                                     std::uint64_t seed) {
  std::vector<ReachResult> results;
  const int center = (wdm.n_channels - 1) / 2;
  for (const auto& name : format_names) {
    ReachResult rr;
    rr.format = name;
    // best NGMI per span count across the power grid
    std::vector<ReachPoint> best(link.n_spans);
    for (double p : p_ch_grid_dbm) {
      WdmSpec w = wdm;
      w.p_ch_dbm = p;
      Format f = make_format(name);
      FiberSim sim(w, link, pmd, f, seed);
      DualPolField field = sim.launch();
      for (int s = 0; s < link.n_spans; ++s) {
        sim.propagate_span(field, s);
        RxMetrics m = evaluate_link(field, sim.record(), s + 1, center);
        ReachPoint& b = best[s];
        if (m.ngmi > b.ngmi) {
          b.format = name;
          b.spans = s + 1;
          b.distance_km = (s + 1) * link.span_length_km;
          b.best_p_ch_dbm = p;
          b.ngmi = m.ngmi;
          b.snr_eff_db = m.snr_eff_db;
        }
      }
    }
    rr.points = best;
    for (int s = 0; s < link.n_spans; ++s)
      if (best[s].ngmi >= ngmi_target) rr.reach_spans = s + 1;
    results.push_back(std::move(rr));
  }
  return results;
}

}  // namespace prs
