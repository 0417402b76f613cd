#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "prs/constellation.hpp"

namespace prs {

/// AWGN noise level for a constellation at a given Es/N0 per slot.
/// With Es the average slot energy, the per-real-dimension variance is
/// Es / (2 * 10^(snr_db/10)).
struct AwgnSpec {
  double snr_db = 0.0;
  double noise_var_per_dim = 0.0;

  static AwgnSpec from_snr(double snr_db, double energy_per_slot);
};

struct AirResult {
  double snr_db = 0.0;
  double gmi = 0.0;           // bits per (8D formats: 8D) symbol
  double ngmi = 0.0;          // gmi / m
  double gmi_per_4d = 0.0;    // SE-normalized
  double stderr_gmi = 0.0;    // Monte Carlo standard error on gmi
  std::int64_t n_samples = 0;
  std::uint64_t seed = 0;
};

/// Exact log-sum-exp bit LLRs, log(P(b_k=0|y)/P(b_k=1|y)) under uniform
/// input, for one received point.
Eigen::VectorXd bit_llrs(const LabeledConstellation& c, const Eigen::VectorXd& y,
                         double noise_var_per_dim);

/// Monte Carlo GMI over the AWGN channel.  Deterministic in (seed, n).
/// For two-slot formats (8D parity, TDH) the SNR applies per 4D slot.
AirResult gmi_mc(const Format& f, double snr_db, std::int64_t n_samples, std::uint64_t seed);

/// Gauss-Hermite GMI for 1D/2D constellations (cross-validation oracle).
double gmi_quadrature_1d2d(const LabeledConstellation& c, double snr_db, int nodes = 64);

/// Smallest SNR with NGMI >= target, by bisection with fixed per-evaluation
/// seeds; bracket [lo_db, hi_db].  Throws if the target is not bracketed.
double required_snr(const Format& f, double target_ngmi, double tol_db, double lo_db,
                    double hi_db, std::int64_t n_samples, std::uint64_t seed);

/// SNR where ngmi_a - ngmi_b changes sign on a shared grid (linear
/// interpolation).  Throws when no sign change exists.
double crossover_point(const std::vector<double>& snr_grid, const std::vector<double>& ngmi_a,
                       const std::vector<double>& ngmi_b);

struct PrsOptimOptions {
  std::int64_t n_coarse = 50000;
  std::int64_t n_refine = 200000;
  std::uint64_t seed = 1;
  int grid_tau = 9;     // nu3/nu1 axis
  int grid_r2 = 8;      // R2² axis
  int refine_rounds = 3;
};

/// Grid search plus local refinement of the two free PRS ratios under the
/// R1²+R2² = 2 constraint, maximizing gmi_mc of the 64-point format.
PrsParams optimize_prs_params(double target_snr_db, const PrsOptimOptions& opts = {});

}  // namespace prs
