#include <doctest.h>

#include <array>
#include <cmath>
#include <map>
#include <set>

#include "prs/constellation.hpp"
#include "prs/metrics.hpp"

using namespace prs;

namespace {

// Independent brute-force min squared distance (test-side oracle).
double brute_min_d2(const Eigen::MatrixXd& pts) {
  double best = 1e300;
  for (Eigen::Index i = 0; i < pts.rows(); ++i)
    for (Eigen::Index j = i + 1; j < pts.rows(); ++j)
      best = std::min(best, (pts.row(i) - pts.row(j)).squaredNorm());
  return best;
}

}  // namespace

TEST_CASE("pm-8qam geometry and labeling") {
  const auto c = build_pm8qam();
  CHECK(c.size() == 64);
  CHECK(c.bits_per_symbol == 6);
  std::set<std::uint32_t> labs(c.labels.begin(), c.labels.end());
  CHECK(labs.size() == 64);
  CHECK(c.average_energy() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(brute_min_d2(c.points) == doctest::Approx(0.84).epsilon(0.015));
  // declared reference point for label 000000: inner ring at 45 deg, both pols
  const Eigen::VectorXd ref = bits_to_symbol(c, 0);
  const double r1 = std::sqrt(2.0 / (1.0 + std::pow((std::sqrt(2.0) + std::sqrt(6.0)) / 2.0, 2)));
  CHECK(ref[0] == doctest::Approx(r1 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(ref[1] == doctest::Approx(r1 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(ref[2] == doctest::Approx(ref[0]));
  CHECK(ref[3] == doctest::Approx(ref[1]));
}

TEST_CASE("4d-64prs structure") {
  const auto c = build_4d64prs(presets::prs_4d());
  REQUIRE(c.size() == 64);
  // constant modulus: every 4D energy exactly 2
  for (int i = 0; i < 64; ++i)
    CHECK(c.points.row(i).squaredNorm() == doctest::Approx(2.0).epsilon(1e-12));
  // 16 distinct SOPs
  std::set<std::array<long long, 3>> sops;
  for (int i = 0; i < 64; ++i) {
    const Eigen::Vector3d s = stokes(c.points.row(i).transpose());
    sops.insert({std::llround(s[0] * 1e9), std::llround(s[1] * 1e9), std::llround(s[2] * 1e9)});
  }
  CHECK(sops.size() == 16);
  CHECK(brute_min_d2(c.points) == doctest::Approx(0.66).epsilon(0.03));
}

TEST_CASE("4d-64prs rejects coincident rings") {
  CHECK_THROWS(build_4d64prs(PrsParams{0.8, 0.5, 0.8}));
  CHECK_THROWS(build_4d64prs(PrsParams{0.8, 0.0, 0.3}));
}

TEST_CASE("2a8psk variants") {
  const auto c6 = build_2a8psk(A8pskVariant::SixBit, presets::ring_ratio_6b());
  CHECK(c6.size() == 64);
  for (int i = 0; i < c6.size(); ++i)
    CHECK(c6.points.row(i).squaredNorm() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(brute_min_d2(c6.points) == doctest::Approx(0.88).epsilon(0.04));
  const auto [alpha6, beta6] = dop_stats(c6);
  CHECK(alpha6 == doctest::Approx(1.0).epsilon(0.02));
  CHECK(beta6 == doctest::Approx(0.65).epsilon(0.04));

  // 5b: brute-force enumeration of the parity constraints gives 32 words
  const auto c5 = build_2a8psk(A8pskVariant::FiveBit, presets::ring_ratio_5b());
  CHECK(c5.size() == 32);
  CHECK(c5.bits_per_symbol == 5);
  std::set<std::uint32_t> labs(c5.labels.begin(), c5.labels.end());
  CHECK(labs.size() == 32);
  for (int i = 0; i < c5.size(); ++i)
    CHECK(c5.points.row(i).squaredNorm() == doctest::Approx(2.0).epsilon(1e-12));

  CHECK_THROWS(build_2a8psk(A8pskVariant::SixBit, 0.0));
  CHECK_THROWS(build_2a8psk(A8pskVariant::SixBit, 1.0));
}

TEST_CASE("tdh pair") {
  const auto [even, odd] = build_tdh_5p5b(presets::ring_ratio_5b(), presets::ring_ratio_6b());
  CHECK(even.bits_per_symbol + odd.bits_per_symbol == 11);
  CHECK(even.energy_per_slot() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(odd.energy_per_slot() == doctest::Approx(2.0).epsilon(1e-12));
  const Format f = make_format("tdh-5p5b");
  CHECK(f.se_bits_per_4d() == doctest::Approx(5.5));
  CHECK(f.parts[0].bits_per_symbol == 5);  // even-indexed slots
  CHECK(f.parts[1].bits_per_symbol == 6);
}

TEST_CASE("parity bit equations") {
  CHECK(parity_bit(ParityType::T1, 0) == 1);             // negation of XOR of zeros
  CHECK(parity_bit(ParityType::T1, 1u << 10) == 0);      // exactly one bit set
  CHECK(parity_bit(ParityType::T1, 1u << 0) == 0);
  // T2: b3=1, b6=0, b9=0 (others arbitrary) -> 0
  const std::uint32_t w = (1u << 8) | (1u << 10) | (1u << 0);  // b1 and b11 set too
  CHECK(parity_bit(ParityType::T2, w) == 0);
  CHECK(parity_bit(ParityType::T2, 0) == 1);
}

TEST_CASE("8d-2048prs construction") {
  for (const ParityType type : {ParityType::T1, ParityType::T2}) {
    const auto base =
        build_4d64prs(type == ParityType::T1 ? presets::prs_t1() : presets::prs_t2());
    const auto c = build_8d2048prs(type, base);
    REQUIRE(c.size() == 2048);
    CHECK(c.bits_per_symbol == 11);

    // every 12-bit word satisfies its parity equation and no point repeats
    // the same 4D symbol in both slots
    int repeats = 0;
    for (int i = 0; i < 2048; ++i) {
      const std::uint32_t info = c.labels[i];
      const std::uint32_t word = (info << 1) | parity_bit(type, info);
      if (type == ParityType::T1) {
        CHECK((__builtin_popcount(word) & 1) == 1);
      } else {
        const int b3 = (word >> 9) & 1, b6 = (word >> 6) & 1;
        const int b9 = (word >> 3) & 1, b12 = word & 1;
        CHECK((b3 ^ b6 ^ b9 ^ b12) == 1);
      }
      if ((c.points.row(i).head<4>() - c.points.row(i).tail<4>()).norm() < 1e-12) ++repeats;
      // per-slot constant modulus
      CHECK(c.points.row(i).head<4>().squaredNorm() == doctest::Approx(2.0).epsilon(1e-12));
      CHECK(c.points.row(i).tail<4>().squaredNorm() == doctest::Approx(2.0).epsilon(1e-12));
    }
    CHECK(repeats == 0);

    // kept words and their parity-flipped complements partition the 4096 set
    std::set<std::uint32_t> kept;
    for (int i = 0; i < 2048; ++i)
      kept.insert((c.labels[i] << 1) | parity_bit(type, c.labels[i]));
    CHECK(kept.size() == 2048);
    for (std::uint32_t w = 0; w < 4096; ++w) {
      const bool in_kept = kept.count(w) != 0;
      const bool parity_ok =
          static_cast<std::uint32_t>(parity_bit(type, w >> 1)) == (w & 1);
      CHECK(in_kept == parity_ok);
    }
  }
}

TEST_CASE("8d d_E^2 against table values") {
  const auto t1 = build_8d2048prs(ParityType::T1, build_4d64prs(presets::prs_t1()));
  const auto t2 = build_8d2048prs(ParityType::T2, build_4d64prs(presets::prs_t2()));
  CHECK(min_squared_ed(t1) == doctest::Approx(1.15).epsilon(0.03));
  CHECK(min_squared_ed(t2) == doctest::Approx(0.76).epsilon(0.04));
}

TEST_CASE("8d builder rejects bad base") {
  auto base = build_pm8qam();
  base.points.conservativeResize(32, 4);
  base.labels.resize(32);
  CHECK_THROWS(build_8d2048prs(ParityType::T1, base));
}

TEST_CASE("bits_to_symbol round trip") {
  const auto t1 = build_8d2048prs(ParityType::T1, build_4d64prs(presets::prs_t1()));
  for (std::uint32_t info = 0; info < 2048; ++info) {
    const Eigen::VectorXd p = bits_to_symbol(t1, info);
    CHECK(symbol_to_bits(t1, p) == info);
  }
  // a 12-bit word violating T1 parity is not in the 2048-point set: the
  // 8D labels are the 11 information bits, so an out-of-range label throws
  CHECK_THROWS(bits_to_symbol(t1, 4096));
  // unknown point
  Eigen::VectorXd bogus = Eigen::VectorXd::Zero(8);
  CHECK_THROWS(symbol_to_bits(t1, bogus));
}

TEST_CASE("labeling checksums: SOP alignment of parity classes") {
  // The two class functions behind T1/T2 set-partitioning must be constant
  // on each SOP (guards the labeling transcription).
  const auto c = build_4d64prs(presets::prs_4d());
  auto sop_key = [&](int i) {
    const Eigen::Vector3d s = stokes(c.points.row(i).transpose());
    return std::array<long long, 3>{std::llround(s[0] * 1e9), std::llround(s[1] * 1e9),
                                    std::llround(s[2] * 1e9)};
  };
  std::map<std::array<long long, 3>, std::set<int>> q1_by_sop, q2_by_sop;
  for (int i = 0; i < 64; ++i) {
    const std::uint32_t w = c.labels[i];
    q1_by_sop[sop_key(i)].insert(__builtin_popcount(w) & 1);
    q2_by_sop[sop_key(i)].insert(((w >> 3) ^ w) & 1);
  }
  for (const auto& [k, v] : q1_by_sop) CHECK(v.size() == 1);
  for (const auto& [k, v] : q2_by_sop) CHECK(v.size() == 1);
}

TEST_CASE("labeling checksums: Gray-adjacent near pairs") {
  // Hamming-1 label pairs realize the minimum distance on the 8D bases.
  for (const auto& preset : {presets::prs_t1(), presets::prs_t2()}) {
    const auto c = build_4d64prs(preset);
    const double d2 = brute_min_d2(c.points);
    bool has_h1_min = false;
    for (int i = 0; i < 64; ++i)
      for (int j = i + 1; j < 64; ++j) {
        const double d = (c.points.row(i) - c.points.row(j)).squaredNorm();
        if (std::abs(d - d2) < 1e-9 &&
            __builtin_popcount(c.labels[i] ^ c.labels[j]) == 1)
          has_h1_min = true;
      }
    CHECK(has_h1_min);
  }
}
