#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "prs/constellation.hpp"

namespace prs {

/// S = (|X|²-|Y|², 2Re{XY*}, 2Im{XY*}) of a 4D symbol (xr, xi, yr, yi).
Eigen::Vector3d stokes(const Eigen::Vector4d& s);

/// Two-slot degree of polarization: ||S_t1 + S_t2|| over the total energy
/// of both slots.  Throws on zero-energy input.
double dop(const Eigen::Vector4d& slot1, const Eigen::Vector4d& slot2);

/// Exact minimum squared Euclidean distance over all unordered point pairs.
double min_squared_ed(const LabeledConstellation& c);

/// (max, mean) DOP.  4D constellations enumerate all M² ordered two-slot
/// pairs; 8D constellations use their M points directly.
std::pair<double, double> dop_stats(const LabeledConstellation& c);

/// Mixed-slot variant for time-domain hybrids (every even/odd slot pair).
std::pair<double, double> dop_stats(const LabeledConstellation& even,
                                    const LabeledConstellation& odd);

struct FormatMetrics {
  std::string name;
  double se = 0.0;        // bits per 4D symbol
  double d_e2 = 0.0;      // min squared Euclidean distance
  double alpha = 0.0;     // max DOP
  double beta = 0.0;      // mean DOP
  bool constant_modulus = false;
};

FormatMetrics format_metrics(const Format& f);

/// The five-row comparison table (PM-8QAM, 4D-2A8PSK, 4D-64PRS, T1, T2).
std::vector<FormatMetrics> metrics_report();

/// True when all per-4D-slot energies agree within `tol`.
bool is_constant_modulus(const LabeledConstellation& c, double tol = 1e-9);

}  // namespace prs
