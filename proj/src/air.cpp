#include "prs/air.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <iostream>
#include <stdexcept>

#include "prs/rng.hpp"

namespace prs {

namespace {

double log1pexp(double x) {
  if (x > 35.0) return x;
  if (x < -35.0) return std::exp(x);
  return std::log1p(std::exp(x));
}

constexpr double kLn2 = 0.6931471805599453094172321214581766;

/// Gaussian noise on `dims` dimensions for sample `i`.
inline void draw_noise(const CounterRng& rng, std::int64_t i, int dims, double sigma,
                       double* out) {
  const int pairs = (dims + 1) / 2;
  for (int p = 0; p < pairs; ++p) {
    auto [a, b] = rng.normal_pair(static_cast<std::uint64_t>(i) * pairs + p);
    out[2 * p] = sigma * a;
    if (2 * p + 1 < dims) out[2 * p + 1] = sigma * b;
  }
}

/// Per-bit coset log-sum-exp over metric values; returns LLRs.
void coset_llrs(const Eigen::VectorXd& met, const std::vector<std::uint32_t>& labels, int m,
                double* llr) {
  const int M = static_cast<int>(met.size());
  for (int k = 0; k < m; ++k) {
    const std::uint32_t mask = 1u << (m - 1 - k);
    double mx0 = -1e308, mx1 = -1e308;
    for (int i = 0; i < M; ++i) {
      const double v = met[i];
      if (labels[i] & mask) {
        if (v > mx1) mx1 = v;
      } else if (v > mx0) {
        mx0 = v;
      }
    }
    double s0 = 0.0, s1 = 0.0;
    for (int i = 0; i < M; ++i) {
      const double v = met[i];
      if (labels[i] & mask)
        s1 += std::exp(v - mx1);
      else
        s0 += std::exp(v - mx0);
    }
    llr[k] = (mx0 + std::log(s0)) - (mx1 + std::log(s1));
  }
}

struct Welford {
  double sum = 0.0, sum_sq = 0.0;
  std::int64_t n = 0;
  void add(double v) {
    sum += v;
    sum_sq += v * v;
    ++n;
  }
  double mean() const { return sum / n; }
  double stderr_mean() const {
    const double var = sum_sq / n - mean() * mean();
    return std::sqrt(std::max(0.0, var) / n);
  }
};

/// GMI of one labeled constellation (one modulation slot per symbol).
AirResult gmi_mc_single(const LabeledConstellation& c, double snr_db, std::int64_t n,
                        std::uint64_t seed, std::uint64_t stream) {
  const AwgnSpec spec = AwgnSpec::from_snr(snr_db, c.energy_per_slot());
  const double sig2 = spec.noise_var_per_dim;
  const double sigma = std::sqrt(sig2);
  const int M = c.size(), D = c.dim(), m = c.bits_per_symbol;
  if ((M & (M - 1)) != 0) throw std::invalid_argument("gmi_mc: constellation size must be 2^m");

  const CounterRng sym_rng(seed, 2 * stream);
  const CounterRng noise_rng(seed, 2 * stream + 1);

  Eigen::VectorXd y(D), met(M), llr(m);
  double noise[8];
  Welford acc;
  for (std::int64_t i = 0; i < n; ++i) {
    const int idx = static_cast<int>(sym_rng.u64(i) >> (64 - m));
    draw_noise(noise_rng, i, D, sigma, noise);
    for (int d = 0; d < D; ++d) y[d] = c.points(idx, d) + noise[d];
    met = -(c.points.rowwise() - y.transpose()).rowwise().squaredNorm() / (2.0 * sig2);
    coset_llrs(met, c.labels, m, llr.data());
    const std::uint32_t lab = c.labels[idx];
    double penalty = 0.0;
    for (int k = 0; k < m; ++k) {
      const bool bit = (lab >> (m - 1 - k)) & 1;
      penalty += log1pexp(bit ? llr[k] : -llr[k]);
    }
    acc.add(penalty / kLn2);
  }
  AirResult r;
  r.snr_db = snr_db;
  r.gmi = m - acc.mean();
  r.ngmi = r.gmi / m;
  r.stderr_gmi = acc.stderr_mean();
  r.n_samples = n;
  r.seed = seed;
  return r;
}

int class_of(ParityType type, std::uint32_t w) {
  if (type == ParityType::T1) return __builtin_popcount(w & 0x3F) & 1;
  return ((w >> 3) ^ w) & 1;  // b3 ^ b6
}

/// GMI of a parity-selected two-slot format, factorized per slot: the 2048
/// 8D metrics are products of per-slot metrics over opposite parity classes,
/// so coset sums reduce to 64-term slot sums.
AirResult gmi_mc_parity8d(const Format& f, double snr_db, std::int64_t n, std::uint64_t seed) {
  const LabeledConstellation& base = f.base;
  const ParityType type = f.parity;
  const AwgnSpec spec = AwgnSpec::from_snr(snr_db, 2.0);
  const double sig2 = spec.noise_var_per_dim;
  const double sigma = std::sqrt(sig2);

  // base label -> row index, class per row
  int label_row[64];
  int cls[64];
  for (int i = 0; i < 64; ++i) label_row[base.labels[i]] = i;
  for (int w = 0; w < 64; ++w) cls[w] = class_of(type, static_cast<std::uint32_t>(w));

  const CounterRng sym_rng(seed, 0);
  const CounterRng noise_rng(seed, 1);

  Eigen::VectorXd met1(64), met2(64), e1(64), e2(64);
  double noise[8];
  Welford acc;
  for (std::int64_t i = 0; i < n; ++i) {
    const std::uint32_t info = static_cast<std::uint32_t>(sym_rng.u64(i) >> (64 - 11));
    const std::uint32_t word = (info << 1) | static_cast<std::uint32_t>(parity_bit(type, info));
    const std::uint32_t w1 = (word >> 6) & 0x3F, w2 = word & 0x3F;
    draw_noise(noise_rng, i, 8, sigma, noise);
    Eigen::Vector4d y1 = base.points.row(label_row[w1]).transpose() + Eigen::Map<Eigen::Vector4d>(noise);
    Eigen::Vector4d y2 =
        base.points.row(label_row[w2]).transpose() + Eigen::Map<Eigen::Vector4d>(noise + 4);

    met1 = -(base.points.rowwise() - y1.transpose()).rowwise().squaredNorm() / (2.0 * sig2);
    met2 = -(base.points.rowwise() - y2.transpose()).rowwise().squaredNorm() / (2.0 * sig2);
    // label-indexed, stabilized exponentials
    const double mx1 = met1.maxCoeff(), mx2 = met2.maxCoeff();
    for (int w = 0; w < 64; ++w) {
      e1[w] = std::exp(met1[label_row[w]] - mx1);
      e2[w] = std::exp(met2[label_row[w]] - mx2);
    }
    double E1[2] = {0.0, 0.0}, E2[2] = {0.0, 0.0};
    for (int w = 0; w < 64; ++w) {
      E1[cls[w]] += e1[w];
      E2[cls[w]] += e2[w];
    }
    double penalty = 0.0;
    // slot-1 bits b1..b6
    for (int k = 0; k < 6; ++k) {
      const std::uint32_t mask = 1u << (5 - k);
      double num = 0.0, den = 0.0;
      double s0[2] = {0.0, 0.0}, s1[2] = {0.0, 0.0};
      for (int w = 0; w < 64; ++w) {
        if (w & mask)
          s1[cls[w]] += e1[w];
        else
          s0[cls[w]] += e1[w];
      }
      num = s0[0] * E2[1] + s0[1] * E2[0];
      den = s1[0] * E2[1] + s1[1] * E2[0];
      const double llr = std::log(num) - std::log(den);
      const bool bit = (w1 & mask) != 0;
      penalty += log1pexp(bit ? llr : -llr);
    }
    // slot-2 information bits b7..b11 (bit positions 5..1 of w2)
    for (int k = 0; k < 5; ++k) {
      const std::uint32_t mask = 1u << (5 - k);
      double s0[2] = {0.0, 0.0}, s1[2] = {0.0, 0.0};
      for (int w = 0; w < 64; ++w) {
        if (w & mask)
          s1[cls[w]] += e2[w];
        else
          s0[cls[w]] += e2[w];
      }
      const double num = E1[1] * s0[0] + E1[0] * s0[1];
      const double den = E1[1] * s1[0] + E1[0] * s1[1];
      const double llr = std::log(num) - std::log(den);
      const bool bit = (w2 & mask) != 0;
      penalty += log1pexp(bit ? llr : -llr);
    }
    acc.add(penalty / kLn2);
  }
  AirResult r;
  r.snr_db = snr_db;
  r.gmi = 11.0 - acc.mean();
  r.ngmi = r.gmi / 11.0;
  r.stderr_gmi = acc.stderr_mean();
  r.n_samples = n;
  r.seed = seed;
  return r;
}

}  // namespace

AwgnSpec AwgnSpec::from_snr(double snr_db, double energy_per_slot) {
  if (std::isnan(snr_db)) throw std::invalid_argument("AwgnSpec: NaN SNR");
  AwgnSpec s;
  s.snr_db = snr_db;
  s.noise_var_per_dim = energy_per_slot / (2.0 * std::pow(10.0, snr_db / 10.0));
  return s;
}

Eigen::VectorXd bit_llrs(const LabeledConstellation& c, const Eigen::VectorXd& y,
                         double noise_var_per_dim) {
  if (!(noise_var_per_dim > 0.0)) throw std::invalid_argument("bit_llrs: noise_var must be > 0");
  Eigen::VectorXd met =
      -(c.points.rowwise() - y.transpose()).rowwise().squaredNorm() / (2.0 * noise_var_per_dim);
  Eigen::VectorXd llr(c.bits_per_symbol);
  coset_llrs(met, c.labels, c.bits_per_symbol, llr.data());
  return llr;
}

AirResult gmi_mc(const Format& f, double snr_db, std::int64_t n_samples, std::uint64_t seed) {
  switch (f.kind) {
    case Format::Kind::Parity8D:
      return gmi_mc_parity8d(f, snr_db, n_samples, seed);
    case Format::Kind::Tdh: {
      const AirResult a = gmi_mc_single(f.parts[0], snr_db, n_samples, seed, 0);
      const AirResult b = gmi_mc_single(f.parts[1], snr_db, n_samples, seed, 1);
      AirResult r;
      r.snr_db = snr_db;
      r.gmi = a.gmi + b.gmi;  // per two slots
      r.ngmi = r.gmi / f.bits_per_two_slots();
      r.stderr_gmi = std::hypot(a.stderr_gmi, b.stderr_gmi);
      r.n_samples = n_samples;
      r.seed = seed;
      r.gmi_per_4d = r.gmi / 2.0;
      return r;
    }
    case Format::Kind::Single:
    default: {
      AirResult r = gmi_mc_single(f.parts[0], snr_db, n_samples, seed, 0);
      r.gmi_per_4d = r.gmi;
      return r;
    }
  }
}

double gmi_quadrature_1d2d(const LabeledConstellation& c, double snr_db, int nodes) {
  const int D = c.dim();
  if (D > 2) throw std::invalid_argument("gmi_quadrature_1d2d: only 1D/2D supported");
  const double sig2 = AwgnSpec::from_snr(snr_db, c.energy_per_slot()).noise_var_per_dim;
  const double sigma = std::sqrt(sig2);

  // Gauss-Hermite nodes/weights by Golub-Welsch.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(nodes, nodes);
  for (int i = 1; i < nodes; ++i) J(i, i - 1) = J(i - 1, i) = std::sqrt(i / 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  Eigen::VectorXd t = es.eigenvalues();
  Eigen::VectorXd w(nodes);
  const double sqrt_pi = std::sqrt(3.141592653589793238462643383279502884);
  for (int i = 0; i < nodes; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    w[i] = v0 * v0;  // weights normalized so sum == 1 (absorbs 1/sqrt(pi))
  }

  const int M = c.size(), m = c.bits_per_symbol;
  Eigen::VectorXd met(M);
  const double inv_m = 1.0 / M;
  double gmi = m;
  // GMI = m - E[ sum_k log2( sum_x exp / sum_{x: b_k = b} exp ) ]
  auto accum = [&](const Eigen::VectorXd& y, std::uint32_t lab, double weight) {
    met = -(c.points.rowwise() - y.transpose()).rowwise().squaredNorm() / (2.0 * sig2);
    const double mx = met.maxCoeff();
    double total = 0.0;
    double coset[32] = {0};  // per bit, sum over matching-coset points
    for (int i = 0; i < M; ++i) {
      const double e = std::exp(met[i] - mx);
      total += e;
      for (int k = 0; k < m; ++k) {
        const std::uint32_t mask = 1u << (m - 1 - k);
        if (((c.labels[i] ^ lab) & mask) == 0) coset[k] += e;
      }
    }
    double pen = 0.0;
    for (int k = 0; k < m; ++k) pen += std::log(total / coset[k]);
    gmi -= weight * inv_m * pen / kLn2;
  };

  for (int s = 0; s < M; ++s) {
    const std::uint32_t lab = c.labels[s];
    if (D == 1) {
      for (int i = 0; i < nodes; ++i) {
        Eigen::VectorXd y(1);
        y[0] = c.points(s, 0) + std::sqrt(2.0) * sigma * t[i];
        accum(y, lab, w[i]);
      }
    } else {
      for (int i = 0; i < nodes; ++i)
        for (int j = 0; j < nodes; ++j) {
          Eigen::VectorXd y(2);
          y[0] = c.points(s, 0) + std::sqrt(2.0) * sigma * t[i];
          y[1] = c.points(s, 1) + std::sqrt(2.0) * sigma * t[j];
          accum(y, lab, w[i] * w[j]);
        }
    }
  }
  return gmi;
}

double required_snr(const Format& f, double target_ngmi, double tol_db, double lo_db,
                    double hi_db, std::int64_t n_samples, std::uint64_t seed) {
  if (!(target_ngmi > 0.0 && target_ngmi < 1.0))
    throw std::invalid_argument("required_snr: target must be in (0,1)");
  auto eval = [&](double s) { return gmi_mc(f, s, n_samples, seed).ngmi; };
  double flo = eval(lo_db), fhi = eval(hi_db);
  if (!(flo < target_ngmi && fhi >= target_ngmi)) {
    throw std::runtime_error("required_snr: target " + std::to_string(target_ngmi) +
                             " not bracketed: NGMI(" + std::to_string(lo_db) +
                             ") = " + std::to_string(flo) + ", NGMI(" + std::to_string(hi_db) +
                             ") = " + std::to_string(fhi));
  }
  while (hi_db - lo_db > tol_db) {
    const double mid = 0.5 * (lo_db + hi_db);
    if (eval(mid) >= target_ngmi)
      hi_db = mid;
    else
      lo_db = mid;
  }
  return 0.5 * (lo_db + hi_db);
}

double crossover_point(const std::vector<double>& snr_grid, const std::vector<double>& ngmi_a,
                       const std::vector<double>& ngmi_b) {
  if (snr_grid.size() != ngmi_a.size() || snr_grid.size() != ngmi_b.size())
    throw std::invalid_argument("crossover_point: size mismatch");
  bool identical = true;
  for (std::size_t i = 0; i < snr_grid.size(); ++i)
    if (std::abs(ngmi_a[i] - ngmi_b[i]) > 1e-12) identical = false;
  if (identical) throw std::runtime_error("crossover_point: curves identical, no crossing");
  for (std::size_t i = 0; i + 1 < snr_grid.size(); ++i) {
    const double d0 = ngmi_a[i] - ngmi_b[i];
    const double d1 = ngmi_a[i + 1] - ngmi_b[i + 1];
    if (d0 == 0.0) return snr_grid[i];
    if (d0 < 0.0 && d1 >= 0.0) {
      return snr_grid[i] + (snr_grid[i + 1] - snr_grid[i]) * (-d0) / (d1 - d0);
    }
  }
  throw std::runtime_error("crossover_point: no sign change in grid");
}

PrsParams optimize_prs_params(double target_snr_db, const PrsOptimOptions& opts) {
  auto objective = [&](double tau, double r2sq, std::int64_t n) {
    const double nu1 = std::sqrt((2.0 - r2sq) / (1.0 + tau * tau));
    PrsParams p{nu1, std::sqrt(r2sq / 2.0), tau * nu1};
    Format f;
    f.name = "4d-64prs";
    f.parts = {build_4d64prs(p)};
    return gmi_mc(f, target_snr_db, n, opts.seed).gmi;
  };

  const double tau_lo = 0.24, tau_hi = 0.52;
  const double r2_lo = 0.34, r2_hi = 0.66;
  double best_tau = 0.0, best_r2 = 0.0, best = -1e300;
  for (int i = 0; i < opts.grid_tau; ++i)
    for (int j = 0; j < opts.grid_r2; ++j) {
      const double tau = tau_lo + (tau_hi - tau_lo) * i / (opts.grid_tau - 1);
      const double r2 = r2_lo + (r2_hi - r2_lo) * j / (opts.grid_r2 - 1);
      const double g = objective(tau, r2, opts.n_coarse);
      if (g > best) {
        best = g;
        best_tau = tau;
        best_r2 = r2;
      }
    }
  if (best_tau == tau_lo || best_tau == tau_hi || best_r2 == r2_lo || best_r2 == r2_hi)
    std::cerr << "optimize_prs_params: warning: optimum on grid boundary\n";

  double step_tau = (tau_hi - tau_lo) / (opts.grid_tau - 1);
  double step_r2 = (r2_hi - r2_lo) / (opts.grid_r2 - 1);
  for (int round = 0; round < opts.refine_rounds; ++round) {
    step_tau /= 2.0;
    step_r2 /= 2.0;
    best = objective(best_tau, best_r2, opts.n_refine);
    for (int di = -1; di <= 1; ++di)
      for (int dj = -1; dj <= 1; ++dj) {
        if (di == 0 && dj == 0) continue;
        const double tau = best_tau + di * step_tau;
        const double r2 = best_r2 + dj * step_r2;
        if (tau <= 0.05 || tau >= 0.95 || r2 <= 0.1 || r2 >= 1.9) continue;
        const double g = objective(tau, r2, opts.n_refine);
        if (g > best) {
          best = g;
          best_tau = tau;
          best_r2 = r2;
        }
      }
  }
  const double nu1 = std::sqrt((2.0 - best_r2) / (1.0 + best_tau * best_tau));
  return PrsParams{nu1, std::sqrt(best_r2 / 2.0), best_tau * nu1}.normalized();
}

}  // namespace prs
