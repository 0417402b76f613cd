#include "prs/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace prs {

Eigen::Vector3d stokes(const Eigen::Vector4d& s) {
  const double xr = s[0], xi = s[1], yr = s[2], yi = s[3];
  return Eigen::Vector3d(xr * xr + xi * xi - yr * yr - yi * yi,
                         2.0 * (xr * yr + xi * yi),
                         2.0 * (xi * yr - xr * yi));
}

double dop(const Eigen::Vector4d& slot1, const Eigen::Vector4d& slot2) {
  const double energy = slot1.squaredNorm() + slot2.squaredNorm();
  if (!(energy > 0.0)) throw std::invalid_argument("dop: zero-energy input");
  return (stokes(slot1) + stokes(slot2)).norm() / energy;
}

double min_squared_ed(const LabeledConstellation& c) {
  const int n = c.size();
  if (n < 2) throw std::invalid_argument("min_squared_ed: need at least 2 points");
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double d = (c.points.row(i) - c.points.row(j)).squaredNorm();
      if (d < best) best = d;
    }
  return best;
}

namespace {

std::pair<double, double> dop_over_pairs(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  // Ordered pairs (i from a, j from b).
  const auto rows_a = a.rows(), rows_b = b.rows();
  Eigen::MatrixXd sa(rows_a, 3), sb(rows_b, 3);
  Eigen::VectorXd ea(rows_a), eb(rows_b);
  for (Eigen::Index i = 0; i < rows_a; ++i) {
    sa.row(i) = stokes(a.row(i).head<4>());
    ea[i] = a.row(i).squaredNorm();
  }
  for (Eigen::Index j = 0; j < rows_b; ++j) {
    sb.row(j) = stokes(b.row(j).head<4>());
    eb[j] = b.row(j).squaredNorm();
  }
  double mx = 0.0, sum = 0.0;
  for (Eigen::Index i = 0; i < rows_a; ++i)
    for (Eigen::Index j = 0; j < rows_b; ++j) {
      const double p = (sa.row(i) + sb.row(j)).norm() / (ea[i] + eb[j]);
      sum += p;
      if (p > mx) mx = p;
    }
  return {mx, sum / static_cast<double>(rows_a * rows_b)};
}

}  // namespace

std::pair<double, double> dop_stats(const LabeledConstellation& c) {
  if (c.dim() == 8) {
    double mx = 0.0, sum = 0.0;
    for (int i = 0; i < c.size(); ++i) {
      const double p = dop(c.points.row(i).head<4>(), c.points.row(i).tail<4>());
      sum += p;
      if (p > mx) mx = p;
    }
    return {mx, sum / c.size()};
  }
  if (c.dim() == 4) return dop_over_pairs(c.points, c.points);
  throw std::invalid_argument("dop_stats: constellation must be 4D or 8D");
}

std::pair<double, double> dop_stats(const LabeledConstellation& even,
                                    const LabeledConstellation& odd) {
  if (even.dim() != 4 || odd.dim() != 4)
    throw std::invalid_argument("dop_stats: hybrid slots must be 4D");
  return dop_over_pairs(even.points, odd.points);
}

bool is_constant_modulus(const LabeledConstellation& c, double tol) {
  const int slots = c.slots();
  const double ref = c.points.row(0).head(c.slot_dim).squaredNorm();
  for (int i = 0; i < c.size(); ++i)
    for (int s = 0; s < slots; ++s) {
      const double e = c.points.row(i).segment(s * c.slot_dim, c.slot_dim).squaredNorm();
      if (std::abs(e - ref) > tol) return false;
    }
  return true;
}

FormatMetrics format_metrics(const Format& f) {
  FormatMetrics m;
  m.name = f.name;
  m.se = f.se_bits_per_4d();
  if (f.kind == Format::Kind::Tdh) {
    // Hybrid: distances within each slot type; DOP over the 32x64 product.
    m.d_e2 = std::min(min_squared_ed(f.parts[0]), min_squared_ed(f.parts[1]));
    std::tie(m.alpha, m.beta) = dop_stats(f.parts[0], f.parts[1]);
    m.constant_modulus = is_constant_modulus(f.parts[0]) && is_constant_modulus(f.parts[1]);
  } else {
    m.d_e2 = min_squared_ed(f.parts[0]);
    std::tie(m.alpha, m.beta) = dop_stats(f.parts[0]);
    m.constant_modulus = is_constant_modulus(f.parts[0]);
  }
  return m;
}

std::vector<FormatMetrics> metrics_report() {
  std::vector<FormatMetrics> rows;
  for (const auto& name :
       {"pm-8qam", "4d-2a8psk-6b", "4d-64prs", "8d-2048prs-t1", "8d-2048prs-t2"})
    rows.push_back(format_metrics(make_format(name)));
  return rows;
}

}  // namespace prs
