#include "prs/fiber.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <stdexcept>

#include "prs/rng.hpp"

namespace prs {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kPlanck = 6.62607015e-34;
constexpr double kLightSpeed = 2.99792458e8;  // m/s

using cplx = std::complex<double>;

bool is_pow2(std::int64_t v) { return v > 0 && (v & (v - 1)) == 0; }

/// sqrt raised-cosine magnitude at frequency f for symbol rate R.
double rrc_mag(double f, double rate, double rolloff) {
  const double af = std::abs(f);
  const double f1 = 0.5 * rate * (1.0 - rolloff);
  const double f2 = 0.5 * rate * (1.0 + rolloff);
  if (af <= f1) return 1.0;
  if (af >= f2) return 0.0;
  const double arg = kPi / 2.0 * (af - f1) / (f2 - f1);
  return std::cos(arg);  // sqrt of cos^2 taper
}

}  // namespace

namespace fftutil {

namespace {
Eigen::FFT<double>& engine() {
  thread_local Eigen::FFT<double> fft;
  return fft;
}
}  // namespace

void fwd(Eigen::ArrayXcd& a) {
  Eigen::VectorXcd in = a.matrix();
  Eigen::VectorXcd out(in.size());
  engine().fwd(out, in);
  a = out.array();
}

void inv(Eigen::ArrayXcd& a) {
  Eigen::VectorXcd in = a.matrix();
  Eigen::VectorXcd out(in.size());
  engine().inv(out, in);
  a = out.array();
}

double bin_freq(Eigen::Index k, Eigen::Index n, double fs) {
  const Eigen::Index half = n / 2;
  const double idx = k < half ? static_cast<double>(k) : static_cast<double>(k - n);
  return idx * fs / static_cast<double>(n);
}

void shift_bins(Eigen::ArrayXcd& spectrum, Eigen::Index bins) {
  const Eigen::Index n = spectrum.size();
  Eigen::Index s = ((bins % n) + n) % n;
  if (s == 0) return;
  Eigen::ArrayXcd out(n);
  out.tail(n - s) = spectrum.head(n - s);
  out.head(s) = spectrum.tail(s);
  spectrum.swap(out);
}

}  // namespace fftutil

void WdmSpec::validate() const {
  if (n_channels < 1) throw std::invalid_argument("WdmSpec: n_channels >= 1");
  if (!is_pow2(n_symbols)) throw std::invalid_argument("WdmSpec: n_symbols must be a power of two");
  if (samples_per_symbol < 2) throw std::invalid_argument("WdmSpec: samples_per_symbol >= 2");
  if (!(rolloff > 0.0 && rolloff <= 1.0)) throw std::invalid_argument("WdmSpec: rolloff in (0,1]");
  if (spacing_hz < symbol_rate_hz * (1.0 + rolloff))
    throw std::invalid_argument("WdmSpec: spacing below occupied channel bandwidth");
  const double half_band = (n_channels - 1) / 2.0 * spacing_hz +
                           0.5 * symbol_rate_hz * (1.0 + rolloff);
  if (half_band > sample_rate_hz() / 2.0)
    throw std::invalid_argument("WdmSpec: WDM band exceeds Nyquist; raise samples_per_symbol");
}

double FiberLinkSpec::beta2_s2_per_km() const {
  const double lambda_m = kLightSpeed / center_frequency_hz;
  const double d_s_per_m2_km = dispersion_ps_nm_km * 1e-12 / 1e-9;  // s per m per km
  return -d_s_per_m2_km * lambda_m * lambda_m / (2.0 * kPi * kLightSpeed);
}

void FiberLinkSpec::validate() const {
  if (span_length_km <= 0 || step_km <= 0) throw std::invalid_argument("FiberLinkSpec: positive lengths");
  if (n_spans < 0) throw std::invalid_argument("FiberLinkSpec: n_spans >= 0");
  const double steps = span_length_km / step_km;
  if (std::abs(steps - std::round(steps)) > 1e-9)
    throw std::invalid_argument("FiberLinkSpec: step must divide span length");
}

PmdRealization pmd_sections(const PmdSpec& pmd, int n_sections, std::uint64_t seed) {
  PmdRealization real;
  real.section_km = pmd.section_km;
  real.sections.resize(n_sections);
  if (!pmd.enabled()) {
    for (auto& s : real.sections) {
      s.rotation = Eigen::Matrix2cd::Identity();
      s.dgd_s = 0.0;
    }
    return real;
  }
  // Mean per-section DGD so that the ensemble mean of ||sum of isotropic
  // section vectors|| equals pmd*sqrt(L): Maxwellian E||.|| = sqrt(8 N E[tau^2]/(3 pi)).
  const double rel = pmd.dgd_rel_std;
  const double tau_bar_ps = pmd.pmd_ps_sqrt_km * std::sqrt(pmd.section_km) *
                            std::sqrt(3.0 * kPi / 8.0) / std::sqrt(1.0 + rel * rel);
  const CounterRng rot_rng(seed, 101);
  const CounterRng dgd_rng(seed, 102);
  for (int i = 0; i < n_sections; ++i) {
    // Haar-uniform SU(2) from two Gaussian pairs.
    auto [a, b] = rot_rng.normal_pair(2 * i);
    auto [c, d] = rot_rng.normal_pair(2 * i + 1);
    cplx u(a, b), v(c, d);
    const double norm = std::sqrt(std::norm(u) + std::norm(v));
    u /= norm;
    v /= norm;
    Eigen::Matrix2cd rot;
    rot << u, -std::conj(v), v, std::conj(u);
    real.sections[i].rotation = rot;
    const double g = dgd_rng.normal_pair(i).first;
    real.sections[i].dgd_s = std::max(0.0, tau_bar_ps * (1.0 + rel * g)) * 1e-12;
  }
  return real;
}

DualPolField rrc_shape(const Eigen::MatrixXd& symbols, int sps, double rolloff,
                       double symbol_rate_hz) {
  const Eigen::Index n_sym = symbols.rows();
  if (!is_pow2(n_sym)) throw std::invalid_argument("rrc_shape: symbol count must be a power of two");
  if (sps < 2) throw std::invalid_argument("rrc_shape: sps >= 2");
  if (!(rolloff > 0.0 && rolloff <= 1.0)) throw std::invalid_argument("rrc_shape: rolloff in (0,1]");

  const Eigen::Index n = n_sym * sps;
  DualPolField f;
  f.sample_rate_hz = symbol_rate_hz * sps;
  f.x = Eigen::ArrayXcd::Zero(n);
  f.y = Eigen::ArrayXcd::Zero(n);
  for (Eigen::Index k = 0; k < n_sym; ++k) {
    f.x[k * sps] = cplx(symbols(k, 0), symbols(k, 1));
    f.y[k * sps] = cplx(symbols(k, 2), symbols(k, 3));
  }
  fftutil::fwd(f.x);
  fftutil::fwd(f.y);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double h = rrc_mag(fftutil::bin_freq(k, n, f.sample_rate_hz), symbol_rate_hz, rolloff);
    f.x[k] *= h;
    f.y[k] *= h;
  }
  fftutil::inv(f.x);
  fftutil::inv(f.y);
  const double p = f.mean_power_w();
  const double scale = 1.0 / std::sqrt(p);
  f.x *= scale;
  f.y *= scale;
  return f;
}

DualPolField wdm_mux(const std::vector<DualPolField>& channels, double spacing_hz,
                     double p_ch_w) {
  if (channels.empty()) throw std::invalid_argument("wdm_mux: no channels");
  const Eigen::Index n = channels[0].size();
  const double fs = channels[0].sample_rate_hz;
  const double df = fs / static_cast<double>(n);
  const int n_ch = static_cast<int>(channels.size());

  DualPolField out;
  out.sample_rate_hz = fs;
  Eigen::ArrayXcd sx = Eigen::ArrayXcd::Zero(n), sy = Eigen::ArrayXcd::Zero(n);
  const double amp = std::sqrt(p_ch_w);
  for (int c = 0; c < n_ch; ++c) {
    if (channels[c].size() != n || channels[c].sample_rate_hz != fs)
      throw std::invalid_argument("wdm_mux: channel grids differ");
    const double offset = (c - (n_ch - 1) / 2.0) * spacing_hz;
    if (std::abs(offset) + 0.0 > fs / 2.0)
      throw std::invalid_argument("wdm_mux: channel offset beyond Nyquist");
    const Eigen::Index bins = static_cast<Eigen::Index>(std::llround(offset / df));
    Eigen::ArrayXcd cx = channels[c].x * amp;
    Eigen::ArrayXcd cy = channels[c].y * amp;
    fftutil::fwd(cx);
    fftutil::fwd(cy);
    fftutil::shift_bins(cx, bins);
    fftutil::shift_bins(cy, bins);
    sx += cx;
    sy += cy;
  }
  fftutil::inv(sx);
  fftutil::inv(sy);
  out.x = sx;
  out.y = sy;
  return out;
}

void edfa(DualPolField& field, double gain_db, double nf_db, double center_frequency_hz,
          std::uint64_t seed, std::uint64_t tag) {
  const double g_lin = std::pow(10.0, gain_db / 10.0);
  field.x *= std::sqrt(g_lin);
  field.y *= std::sqrt(g_lin);
  const double n_sp = std::pow(10.0, nf_db / 10.0) / 2.0;
  const double psd = (g_lin - 1.0) * kPlanck * center_frequency_hz * n_sp;  // W/Hz per pol
  const double var_c = psd * field.sample_rate_hz;
  if (var_c <= 0.0) return;
  const double sigma = std::sqrt(var_c / 2.0);
  const CounterRng rng_x(seed, CounterRng::mix(0xA5E0000 + 2 * tag));
  const CounterRng rng_y(seed, CounterRng::mix(0xA5E0000 + 2 * tag + 1));
  for (Eigen::Index i = 0; i < field.size(); ++i) {
    auto [a, b] = rng_x.normal_pair(i);
    auto [c, d] = rng_y.normal_pair(i);
    field.x[i] += cplx(sigma * a, sigma * b);
    field.y[i] += cplx(sigma * c, sigma * d);
  }
}

Eigen::MatrixXd map_bits_to_slots(const Format& f, const std::vector<std::uint8_t>& bits,
                                  int n_slots) {
  if (n_slots % 2 != 0) throw std::invalid_argument("map_bits_to_slots: slot count must be even");
  Eigen::MatrixXd out(n_slots, 4);
  std::size_t pos = 0;
  auto take = [&](int count) {
    std::uint32_t v = 0;
    for (int i = 0; i < count; ++i) v = (v << 1) | bits.at(pos++);
    return v;
  };
  switch (f.kind) {
    case Format::Kind::Parity8D: {
      for (int s = 0; s < n_slots; s += 2) {
        const std::uint32_t info = take(11);
        const std::uint32_t word =
            (info << 1) | static_cast<std::uint32_t>(parity_bit(f.parity, info));
        out.row(s) = bits_to_symbol(f.base, (word >> 6) & 0x3F).transpose();
        out.row(s + 1) = bits_to_symbol(f.base, word & 0x3F).transpose();
      }
      break;
    }
    case Format::Kind::Tdh: {
      for (int s = 0; s < n_slots; ++s) {
        const LabeledConstellation& c = f.parts[s % 2];
        out.row(s) = bits_to_symbol(c, take(c.bits_per_symbol)).transpose();
      }
      break;
    }
    case Format::Kind::Single:
    default: {
      const LabeledConstellation& c = f.parts[0];
      if (c.dim() != 4) throw std::invalid_argument("map_bits_to_slots: need a 4D constellation");
      for (int s = 0; s < n_slots; ++s)
        out.row(s) = bits_to_symbol(c, take(c.bits_per_symbol)).transpose();
      break;
    }
  }
  return out;
}

FiberSim::FiberSim(const WdmSpec& wdm, const FiberLinkSpec& link, const PmdSpec& pmd,
                   const Format& format, std::uint64_t seed)
    : format_(format) {
  wdm.validate();
  link.validate();
  record_.wdm = wdm;
  record_.link = link;
  record_.pmd = pmd;
  record_.format_name = format.name;
  record_.seed = seed;

  const int n_slots = wdm.n_symbols;
  const int bits_per_pair = format.bits_per_two_slots();
  const int n_bits = bits_per_pair * n_slots / 2;
  record_.bits.resize(wdm.n_channels);
  record_.tx_symbols.resize(wdm.n_channels);
  for (int c = 0; c < wdm.n_channels; ++c) {
    const CounterRng bit_rng(seed, CounterRng::mix(0xB175000 + c));
    auto& bv = record_.bits[c];
    bv.resize(n_bits);
    for (int i = 0; i < n_bits; ++i) bv[i] = static_cast<std::uint8_t>(bit_rng.u64(i) >> 63);
    record_.tx_symbols[c] = map_bits_to_slots(format, bv, n_slots);
  }

  if (pmd.enabled()) {
    const double steps = pmd.section_km / link.step_km;
    if (std::abs(steps - std::round(steps)) > 1e-9)
      throw std::invalid_argument("FiberSim: step must divide PMD section length");
    const double sect = link.span_length_km / pmd.section_km;
    if (std::abs(sect - std::round(sect)) > 1e-9)
      throw std::invalid_argument("FiberSim: PMD section must divide span length");
    const int per_span = static_cast<int>(std::round(sect));
    record_.pmd_real = pmd_sections(pmd, per_span * link.n_spans, pmd.seed ? pmd.seed : seed);
  }
}

DualPolField FiberSim::launch() const {
  const WdmSpec& wdm = record_.wdm;
  std::vector<DualPolField> chans;
  chans.reserve(wdm.n_channels);
  for (int c = 0; c < wdm.n_channels; ++c)
    chans.push_back(rrc_shape(record_.tx_symbols[c], wdm.samples_per_symbol, wdm.rolloff,
                              wdm.symbol_rate_hz));
  return wdm_mux(chans, wdm.spacing_hz, wdm.p_ch_w());
}

void FiberSim::propagate_span(DualPolField& field, int span_index) const {
  const FiberLinkSpec& link = record_.link;
  const PmdSpec& pmd = record_.pmd;
  const Eigen::Index n = field.size();
  const double fs = field.sample_rate_hz;
  const double h = link.step_km;
  const int steps = static_cast<int>(std::round(link.span_length_km / h));
  const double alpha = link.alpha_np_per_km();
  const double beta2 = link.beta2_s2_per_km();
  const double att_half = std::exp(-alpha * h / 4.0);   // amplitude, half step
  const double att_full = att_half * att_half;
  const double h_eff = alpha > 0 ? (1.0 - std::exp(-alpha * h)) / alpha : h;
  const double c_nl = (8.0 / 9.0) * link.gamma_per_w_km * h_eff * std::exp(alpha * h / 2.0);

  // Frequency-domain phase per unit length.
  Eigen::ArrayXd w2(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double w = 2.0 * kPi * fftutil::bin_freq(k, n, fs);
    w2[k] = w * w;
  }
  const Eigen::ArrayXcd lin_half =
      (cplx(0, 1) * (beta2 / 2.0) * w2 * (h / 2.0)).exp() * att_half;
  const Eigen::ArrayXcd lin_full = lin_half * lin_half;

  int steps_per_section = 0, section_base = 0;
  if (pmd.enabled()) {
    steps_per_section = static_cast<int>(std::round(pmd.section_km / h));
    section_base = span_index * static_cast<int>(std::round(link.span_length_km / pmd.section_km));
  }
  Eigen::ArrayXd w_grid(n);
  for (Eigen::Index k = 0; k < n; ++k)
    w_grid[k] = 2.0 * kPi * fftutil::bin_freq(k, n, fs);

  auto apply_section = [&](int section_index) {
    const PmdSection& s = record_.pmd_real.sections.at(section_index);
    // rotation (frequency-flat) then DGD retardation
    const Eigen::Matrix2cd& r = s.rotation;
    for (Eigen::Index k = 0; k < n; ++k) {
      const cplx xv = field.x[k], yv = field.y[k];
      const cplx xr = r(0, 0) * xv + r(0, 1) * yv;
      const cplx yr = r(1, 0) * xv + r(1, 1) * yv;
      const cplx ph = std::exp(cplx(0, 0.5 * w_grid[k] * s.dgd_s));
      field.x[k] = xr * ph;
      field.y[k] = yr * std::conj(ph);
    }
  };

  fftutil::fwd(field.x);
  fftutil::fwd(field.y);
  field.x *= lin_half;
  field.y *= lin_half;
  for (int t = 0; t < steps; ++t) {
    fftutil::inv(field.x);
    fftutil::inv(field.y);
    const Eigen::ArrayXd phase = c_nl * (field.x.abs2() + field.y.abs2());
    const Eigen::ArrayXcd rot = (cplx(0, 1) * phase).exp();
    field.x *= rot;
    field.y *= rot;
    fftutil::fwd(field.x);
    fftutil::fwd(field.y);
    const bool last = t + 1 == steps;
    field.x *= last ? lin_half : lin_full;
    field.y *= last ? lin_half : lin_full;
    if (steps_per_section > 0 && (t + 1) % steps_per_section == 0)
      apply_section(section_base + (t + 1) / steps_per_section - 1);
  }
  fftutil::inv(field.x);
  fftutil::inv(field.y);

  if (!field.x.isFinite().all() || !field.y.isFinite().all())
    throw std::runtime_error("propagate_span: non-finite field after span " +
                             std::to_string(span_index));

  edfa(field, link.span_gain_db(), link.edfa_nf_db, link.center_frequency_hz, record_.seed,
       static_cast<std::uint64_t>(span_index));
}

std::pair<TxRecord, DualPolField> transmit(const WdmSpec& wdm, const FiberLinkSpec& link,
                                           const PmdSpec& pmd, const Format& format,
                                           std::uint64_t seed) {
  FiberSim sim(wdm, link, pmd, format, seed);
  DualPolField field = sim.launch();
  for (int s = 0; s < link.n_spans; ++s) sim.propagate_span(field, s);
  return {sim.record(), std::move(field)};
}

}  // namespace prs
