#include "prs/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

#include "prs/air.hpp"
#include "prs/io.hpp"
#include "prs/metrics.hpp"
#include "prs/rxdsp.hpp"

namespace prs {

namespace {

namespace fs = std::filesystem;

std::string join(const std::string& dir, const std::string& file) {
  return (fs::path(dir) / file).string();
}

void ensure_dir(const std::string& dir) { fs::create_directories(dir); }

std::string hash_str(const KeyValueConfig& cfg) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(cfg.hash()));
  return buf;
}

struct Table1Target {
  const char* format;
  double se, d_e2, alpha, beta;
  bool constant_modulus;
};

constexpr Table1Target kTable1[] = {
    {"pm-8qam", 6.0, 0.84, 1.00, 0.70, false},
    {"4d-2a8psk-6b", 6.0, 0.88, 1.00, 0.65, true},
    {"4d-64prs", 6.0, 0.66, 1.00, 0.65, true},
    {"8d-2048prs-t1", 5.5, 1.15, 0.96, 0.64, true},
    {"8d-2048prs-t2", 5.5, 0.76, 0.87, 0.55, true},
};

std::vector<double> snr_grid_from(const KeyValueConfig& cfg, double lo, double hi, double step) {
  const double a = cfg.get_double("fig3.snr_start_db", lo);
  const double b = cfg.get_double("fig3.snr_stop_db", hi);
  const double s = cfg.get_double("fig3.snr_step_db", step);
  std::vector<double> g;
  for (double v = a; v <= b + 1e-9; v += s) g.push_back(v);
  return g;
}

void maybe_warn_paper_scale(const KeyValueConfig& cfg) {
  if (cfg.get_str("scale") == "paper") {
    const double spans = cfg.get_double("link.n_spans", 100);
    const double steps = spans * cfg.get_double("link.span_length_km", 80) /
                         cfg.get_double("link.step_km", 0.1);
    std::cerr << "warning: paper-scale run requested (" << steps
              << " SSFM steps per propagation); expect hours of runtime per format/power point\n";
  }
}

}  // namespace

void apply_scale(KeyValueConfig& cfg, const std::string& scale) {
  if (scale == "desk")
    cfg.merge_defaults(presets::desk_scale());
  else if (scale == "paper")
    cfg.merge_defaults(presets::paper_scale());
  else if (!scale.empty())
    throw std::runtime_error("unknown scale preset: " + scale);
}

int run_constellation(const std::string& format, const std::string& out_prefix) {
  const Format f = make_format(format);
  if (f.kind == Format::Kind::Tdh) {
    export_constellation_csv(f.parts[0], out_prefix + "-even.csv");
    export_constellation_json(f.parts[0], out_prefix + "-even.json");
    export_constellation_csv(f.parts[1], out_prefix + "-odd.csv");
    export_constellation_json(f.parts[1], out_prefix + "-odd.json");
  } else {
    export_constellation_csv(f.parts[0], out_prefix + ".csv");
    export_constellation_json(f.parts[0], out_prefix + ".json");
  }
  return 0;
}

int run_table1(const KeyValueConfig& cfg, const std::string& out_dir, bool check) {
  ensure_dir(out_dir);
  const std::string h = hash_str(cfg);
  CsvWriter csv(join(out_dir, "table1.csv"),
                {"format", "se_bits_per_4d", "d_e2", "alpha", "beta", "constant_modulus",
                 "config_hash"});
  std::printf("%-16s %6s %8s %7s %7s %s\n", "format", "SE", "d_E^2", "alpha", "beta", "modulus");
  bool ok = true;
  for (const auto& t : kTable1) {
    const FormatMetrics m = format_metrics(make_format(t.format));
    csv.row({m.name, CsvWriter::num(m.se), CsvWriter::num(m.d_e2), CsvWriter::num(m.alpha),
             CsvWriter::num(m.beta), m.constant_modulus ? "constant" : "not-constant", h});
    std::printf("%-16s %6.1f %8.4f %7.4f %7.4f %s\n", m.name.c_str(), m.se, m.d_e2, m.alpha,
                m.beta, m.constant_modulus ? "constant" : "not-constant");
    if (check) {
      const bool row_ok = std::abs(m.d_e2 - t.d_e2) <= 0.03 && std::abs(m.alpha - t.alpha) <= 0.02 &&
                          std::abs(m.beta - t.beta) <= 0.02 && m.se == t.se &&
                          m.constant_modulus == t.constant_modulus;
      if (!row_ok) {
        std::fprintf(stderr, "table1 check failed for %s\n", t.format);
        ok = false;
      }
    }
  }
  return ok ? 0 : 1;
}

int run_awgn_sweep(const KeyValueConfig& cfg, const std::string& out_dir) {
  ensure_dir(out_dir);
  const std::string format = cfg.get_str("format", "pm-8qam");
  const double start = cfg.get_double("snr_start_db", 5.0);
  const double stop = cfg.get_double("snr_stop_db", 16.0);
  const double step = cfg.get_double("snr_step_db", 0.5);
  const std::int64_t samples = cfg.get_int("samples", 100000);
  const std::uint64_t seed = cfg.get_int("seed", 1);
  const Format f = make_format(format);
  const std::string h = hash_str(cfg);
  CsvWriter csv(join(out_dir, "awgn-" + format + ".csv"),
                {"snr_db", "gmi", "ngmi", "stderr_estimate", "seed", "config_hash"});
  for (double s = start; s <= stop + 1e-9; s += step) {
    const AirResult r = gmi_mc(f, s, samples, seed);
    csv.row({CsvWriter::num(r.snr_db), CsvWriter::num(r.gmi), CsvWriter::num(r.ngmi),
             CsvWriter::num(r.stderr_gmi), CsvWriter::num(static_cast<std::int64_t>(seed)), h});
  }
  return 0;
}

int run_fig3(const KeyValueConfig& cfg, const std::string& out_dir, bool check) {
  ensure_dir(out_dir);
  const std::int64_t samples = cfg.get_int("fig3.samples", 200000);
  const std::int64_t req_samples = cfg.get_int("fig3.required_snr_samples", samples);
  const std::uint64_t seed = cfg.get_int("seed", 1);
  const std::string h = hash_str(cfg);
  const std::vector<std::string> formats = {"pm-8qam", "tdh-5p5b", "8d-2048prs-t1",
                                            "8d-2048prs-t2"};
  const std::vector<double> grid = snr_grid_from(cfg, 5.0, 16.0, 0.5);

  CsvWriter curves(join(out_dir, "fig3-ngmi-vs-snr.csv"),
                   {"format", "snr_db", "gmi", "ngmi", "stderr_estimate", "seed", "config_hash"});
  std::vector<std::vector<double>> ngmi(formats.size());
  for (std::size_t fi = 0; fi < formats.size(); ++fi) {
    const Format f = make_format(formats[fi]);
    for (const double s : grid) {
      const AirResult r = gmi_mc(f, s, samples, seed);
      ngmi[fi].push_back(r.ngmi);
      curves.row({formats[fi], CsvWriter::num(r.snr_db), CsvWriter::num(r.gmi),
                  CsvWriter::num(r.ngmi), CsvWriter::num(r.stderr_gmi),
                  CsvWriter::num(static_cast<std::int64_t>(seed)), h});
    }
  }

  CsvWriter req(join(out_dir, "fig3-required-snr.csv"),
                {"format", "target_ngmi", "required_snr_db", "seed", "config_hash"});
  double rs[4][2];
  const double targets[2] = {0.85, 0.965};
  for (std::size_t fi = 0; fi < formats.size(); ++fi) {
    const Format f = make_format(formats[fi]);
    for (int t = 0; t < 2; ++t) {
      rs[fi][t] = required_snr(f, targets[t], 0.02, 5.0, 18.0, req_samples, seed);
      req.row({formats[fi], CsvWriter::num(targets[t]), CsvWriter::num(rs[fi][t]),
               CsvWriter::num(static_cast<std::int64_t>(seed)), h});
    }
  }
  const double cross = crossover_point(grid, ngmi[2], ngmi[3]);
  {
    CsvWriter cw(join(out_dir, "fig3-crossover.csv"), {"snr_db", "config_hash"});
    cw.row({CsvWriter::num(cross), h});
  }

  const double gap_pm_085 = rs[0][0] - rs[2][0];
  const double gap_tdh_085 = rs[1][0] - rs[2][0];
  const double gap_pm_0965 = rs[0][1] - rs[2][1];
  const double gap_tdh_0965 = rs[1][1] - rs[2][1];
  std::printf("required-SNR gaps vs 8d-2048prs-t1 [dB]:\n");
  std::printf("  NGMI 0.85 : pm-8qam %.3f, tdh-5p5b %.3f\n", gap_pm_085, gap_tdh_085);
  std::printf("  NGMI 0.965: pm-8qam %.3f, tdh-5p5b %.3f\n", gap_pm_0965, gap_tdh_0965);
  std::printf("  T1/T2 NGMI crossover at %.3f dB\n", cross);

  if (check) {
    const bool ok = std::abs(gap_pm_085 - 1.15) <= 0.15 && std::abs(gap_tdh_085 - 0.25) <= 0.10 &&
                    std::abs(gap_pm_0965 - 1.6) <= 0.2 && std::abs(gap_tdh_0965 - 0.7) <= 0.15;
    if (!ok) {
      std::fprintf(stderr, "fig3 gap check failed\n");
      return 1;
    }
  }
  return 0;
}

int run_fiber_sim(const KeyValueConfig& cfg, const std::string& out_dir) {
  ensure_dir(out_dir);
  maybe_warn_paper_scale(cfg);
  const WdmSpec wdm = wdm_from_config(cfg);
  const FiberLinkSpec link = link_from_config(cfg);
  const PmdSpec pmd = pmd_from_config(cfg);
  const std::string format = cfg.get_str("format", "pm-8qam");
  const std::uint64_t seed = cfg.get_int("seed", 1);
  auto [record, field] = transmit(wdm, link, pmd, make_format(format), seed);
  write_field_dump(join(out_dir, "fiber-" + format), field, record, link.n_spans);
  std::printf("fiber-sim: %s, %d spans, mean rx power %.3f dBm\n", format.c_str(), link.n_spans,
              10.0 * std::log10(field.mean_power_w() / 1e-3));
  return 0;
}

int run_evaluate(const std::string& in_prefix, const std::string& out_dir) {
  ensure_dir(out_dir);
  auto [field, record] = read_field_dump(in_prefix);
  const int spans = read_field_dump_spans(in_prefix);
  const int center = (record.wdm.n_channels - 1) / 2;
  const RxMetrics m = evaluate_link(field, record, spans, center);
  CsvWriter csv(join(out_dir, "evaluate.csv"),
                {"distance_km", "p_ch_dbm", "format", "snr_eff_db", "gmi", "ngmi", "seed"});
  csv.row({CsvWriter::num(spans * record.link.span_length_km),
           CsvWriter::num(record.wdm.p_ch_dbm), record.format_name, CsvWriter::num(m.snr_eff_db),
           CsvWriter::num(m.gmi), CsvWriter::num(m.ngmi),
           CsvWriter::num(static_cast<std::int64_t>(record.seed))});
  std::printf("evaluate: %s after %d spans: SNR_eff %.3f dB, NGMI %.4f\n",
              record.format_name.c_str(), spans, m.snr_eff_db, m.ngmi);
  return 0;
}

int run_fig4(const KeyValueConfig& cfg, const std::string& out_dir, bool check) {
  ensure_dir(out_dir);
  maybe_warn_paper_scale(cfg);
  const WdmSpec wdm = wdm_from_config(cfg);
  const FiberLinkSpec link = link_from_config(cfg);
  const PmdSpec pmd = pmd_from_config(cfg);
  const std::uint64_t seed = cfg.get_int("seed", 1);
  const std::string h = hash_str(cfg);
  const std::vector<std::string> formats = {"pm-8qam", "tdh-5p5b", "8d-2048prs-t1",
                                            "8d-2048prs-t2"};
  CsvWriter csv(join(out_dir, "fig4-snreff-vs-distance.csv"),
                {"distance_km", "p_ch_dbm", "format", "snr_eff_db", "gmi", "ngmi", "seed",
                 "config_hash"});
  const int center = (wdm.n_channels - 1) / 2;
  std::vector<double> final_snr(formats.size());
  for (std::size_t fi = 0; fi < formats.size(); ++fi) {
    FiberSim sim(wdm, link, pmd, make_format(formats[fi]), seed);
    DualPolField field = sim.launch();
    for (int s = 0; s < link.n_spans; ++s) {
      sim.propagate_span(field, s);
      const RxMetrics m = evaluate_link(field, sim.record(), s + 1, center);
      if (s + 1 == link.n_spans) final_snr[fi] = m.snr_eff_db;
      csv.row({CsvWriter::num((s + 1) * link.span_length_km), CsvWriter::num(wdm.p_ch_dbm),
               formats[fi], CsvWriter::num(m.snr_eff_db), CsvWriter::num(m.gmi),
               CsvWriter::num(m.ngmi), CsvWriter::num(static_cast<std::int64_t>(seed)), h});
      std::printf("fig4 %-14s span %2d: SNR_eff %.3f dB\n", formats[fi].c_str(), s + 1,
                  m.snr_eff_db);
    }
  }
  if (check) {
    // Ordering at the final distance: T2 > T1 > TDH > PM-8QAM.
    const bool ok = final_snr[3] > final_snr[2] && final_snr[2] > final_snr[1] &&
                    final_snr[1] > final_snr[0];
    if (!ok) {
      std::fprintf(stderr, "fig4 ordering check failed\n");
      return 1;
    }
  }
  return 0;
}

int run_fig5(const KeyValueConfig& cfg, const std::string& out_dir, bool check) {
  ensure_dir(out_dir);
  maybe_warn_paper_scale(cfg);
  const WdmSpec wdm = wdm_from_config(cfg);
  const FiberLinkSpec link = link_from_config(cfg);
  const std::uint64_t seed = cfg.get_int("seed", 1);
  const int n_real = static_cast<int>(cfg.get_int("fig5.n_realizations", 3));
  const std::vector<double> pmd_grid =
      cfg.get_double_list("fig5.pmd_grid_ps_sqrt_km", {0.05, 0.1, 0.2});
  const std::string h = hash_str(cfg);
  const std::vector<std::string> formats = {"pm-8qam", "8d-2048prs-t2"};
  CsvWriter csv(join(out_dir, "fig5-snreff-vs-pmd.csv"),
                {"format", "pmd_ps_sqrt_km", "n_realizations", "avg_snr_eff_db", "min_snr_eff_db",
                 "max_snr_eff_db", "seed", "config_hash"});
  const int center = (wdm.n_channels - 1) / 2;
  bool ok = true;
  for (const auto& name : formats) {
    // PMD-off reference.
    PmdSpec off;
    auto [rec0, f0] = transmit(wdm, link, off, make_format(name), seed);
    const double ref = evaluate_link(f0, rec0, link.n_spans, center).snr_eff_db;
    csv.row({name, CsvWriter::num(0.0), CsvWriter::num(static_cast<std::int64_t>(1)),
             CsvWriter::num(ref), CsvWriter::num(ref), CsvWriter::num(ref),
             CsvWriter::num(static_cast<std::int64_t>(seed)), h});
    std::printf("fig5 %-14s pmd off : SNR_eff %.3f dB\n", name.c_str(), ref);
    for (const double pmd_val : pmd_grid) {
      double sum = 0.0, mn = 1e9, mx = -1e9;
      for (int r = 0; r < n_real; ++r) {
        PmdSpec pmd;
        pmd.pmd_ps_sqrt_km = pmd_val;
        pmd.section_km = cfg.get_double("pmd.section_km", 1.0);
        pmd.dgd_rel_std = cfg.get_double("pmd.dgd_rel_std", 0.2);
        pmd.seed = seed * 1000 + 17 * r + 1;
        auto [rec, field] = transmit(wdm, link, pmd, make_format(name), seed);
        const double snr = evaluate_link(field, rec, link.n_spans, center).snr_eff_db;
        sum += snr;
        mn = std::min(mn, snr);
        mx = std::max(mx, snr);
      }
      const double avg = sum / n_real;
      csv.row({name, CsvWriter::num(pmd_val), CsvWriter::num(static_cast<std::int64_t>(n_real)),
               CsvWriter::num(avg), CsvWriter::num(mn), CsvWriter::num(mx),
               CsvWriter::num(static_cast<std::int64_t>(seed)), h});
      std::printf("fig5 %-14s pmd %.2f: avg SNR_eff %.3f dB (ref %.3f)\n", name.c_str(), pmd_val,
                  avg, ref);
      if (check && avg < ref - 0.05) ok = false;
    }
  }
  if (check && !ok) {
    std::fprintf(stderr, "fig5 check failed: PMD reduced SNR_eff\n");
    return 1;
  }
  return 0;
}

int run_fig6(const KeyValueConfig& cfg, const std::string& out_dir, bool check) {
  ensure_dir(out_dir);
  maybe_warn_paper_scale(cfg);
  WdmSpec wdm = wdm_from_config(cfg);
  FiberLinkSpec link = link_from_config(cfg);
  PmdSpec pmd;  // reach curves are computed without PMD
  const std::uint64_t seed = cfg.get_int("seed", 1);
  const double target = cfg.get_double("fig6.ngmi_target", 0.85);
  const std::vector<double> p_grid = cfg.get_double_list("fig6.p_ch_grid_dbm", {-14, -12, -10});
  const std::string h = hash_str(cfg);
  const std::vector<std::string> formats = {"pm-8qam", "tdh-5p5b", "8d-2048prs-t1",
                                            "8d-2048prs-t2"};
  const auto results = reach_sweep(formats, wdm, link, pmd, p_grid, target, seed);

  CsvWriter csv(join(out_dir, "fig6-ngmi-vs-distance.csv"),
                {"distance_km", "p_ch_dbm", "format", "snr_eff_db", "ngmi", "seed", "config_hash"});
  CsvWriter reach(join(out_dir, "fig6-reach.csv"),
                  {"format", "ngmi_target", "reach_spans", "reach_km", "seed", "config_hash"});
  std::map<std::string, int> reach_spans;
  for (const auto& r : results) {
    for (const auto& p : r.points)
      csv.row({CsvWriter::num(p.distance_km), CsvWriter::num(p.best_p_ch_dbm), r.format,
               CsvWriter::num(p.snr_eff_db), CsvWriter::num(p.ngmi),
               CsvWriter::num(static_cast<std::int64_t>(seed)), h});
    reach.row({r.format, CsvWriter::num(target), CsvWriter::num(static_cast<std::int64_t>(r.reach_spans)),
               CsvWriter::num(r.reach_spans * link.span_length_km),
               CsvWriter::num(static_cast<std::int64_t>(seed)), h});
    reach_spans[r.format] = r.reach_spans;
    std::printf("fig6 %-14s reach at NGMI %.2f: %d spans (%.0f km)\n", r.format.c_str(), target,
                r.reach_spans, r.reach_spans * link.span_length_km);
  }
  if (check) {
    const bool ok = reach_spans["8d-2048prs-t1"] > reach_spans["tdh-5p5b"] &&
                    reach_spans["8d-2048prs-t2"] > reach_spans["tdh-5p5b"] &&
                    reach_spans["tdh-5p5b"] > reach_spans["pm-8qam"];
    if (!ok) {
      std::fprintf(stderr, "fig6 reach ordering check failed\n");
      return 1;
    }
  }
  return 0;
}

}  // namespace prs
