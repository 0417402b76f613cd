#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "prs/experiments.hpp"

namespace {

prs::KeyValueConfig load_config(const std::string& config_path, const std::string& scale,
                                const std::vector<std::string>& overrides, long long seed) {
  prs::KeyValueConfig cfg;
  if (!config_path.empty()) cfg = prs::KeyValueConfig::from_file(config_path);
  for (const auto& o : overrides) cfg.set_override(o);
  if (seed >= 0) cfg.set("seed", std::to_string(seed));
  prs::apply_scale(cfg, scale.empty() ? cfg.get_str("scale", "desk") : scale);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Workbench for polarization-ring-switching modulation formats: "
               "construction, Stokes/distance metrics, AWGN information rates and "
               "split-step WDM fiber evaluation"};
  app.require_subcommand(1);

  std::string config_path, scale, out_dir = "out", format = "pm-8qam", in_prefix;
  long long seed = -1;
  bool check = false;
  std::vector<std::string> overrides;

  auto add_common = [&](CLI::App* sub, bool with_check = true) {
    sub->add_option("--config", config_path, "flat key = value config file");
    sub->add_option("--seed", seed, "master seed (overrides config)");
    sub->add_option("--scale", scale, "scale preset: desk | paper")
        ->check(CLI::IsMember({"desk", "paper"}));
    sub->add_option("--out-dir", out_dir, "output directory");
    sub->add_option("--set", overrides, "config override key=value (repeatable)");
    if (with_check) sub->add_flag("--check", check, "exit nonzero when targets missed");
  };

  auto* c_const = app.add_subcommand("constellation", "export a constellation as CSV + JSON");
  c_const->add_option("--format", format, "format name")->required();
  std::string out_prefix = "constellation";
  c_const->add_option("--out", out_prefix, "output path prefix");

  auto* c_metrics = app.add_subcommand("metrics", "five-format comparison table");
  add_common(c_metrics);
  auto* c_table1 = app.add_subcommand("table1", "alias of metrics");
  add_common(c_table1);

  auto* c_awgn = app.add_subcommand("awgn-sweep", "NGMI vs SNR for one format");
  add_common(c_awgn, false);
  double snr_start = 5.0, snr_stop = 16.0, snr_step = 0.5;
  long long samples = 100000;
  c_awgn->add_option("--format", format, "format name");
  c_awgn->add_option("--snr-start", snr_start, "first SNR (dB)");
  c_awgn->add_option("--snr-stop", snr_stop, "last SNR (dB)");
  c_awgn->add_option("--snr-step", snr_step, "SNR step (dB)");
  c_awgn->add_option("--samples", samples, "Monte Carlo samples per point");

  auto* c_fig3 = app.add_subcommand("fig3", "AWGN NGMI curves, required-SNR gaps, T1/T2 crossover");
  add_common(c_fig3);

  auto* c_fiber = app.add_subcommand("fiber-sim", "WDM split-step run; dumps the received field");
  add_common(c_fiber, false);
  c_fiber->add_option("--format", format, "format name");

  auto* c_eval = app.add_subcommand("evaluate", "genie receiver on a dumped field");
  c_eval->add_option("--in", in_prefix, "field dump prefix (no extension)")->required();
  c_eval->add_option("--out-dir", out_dir, "output directory");

  auto* c_fig4 = app.add_subcommand("fig4", "effective SNR vs distance");
  add_common(c_fig4);
  auto* c_fig5 = app.add_subcommand("fig5", "average effective SNR vs PMD parameter");
  add_common(c_fig5);
  auto* c_fig6 = app.add_subcommand("fig6", "NGMI vs distance and reach at target");
  add_common(c_fig6);

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_const->parsed()) return prs::run_constellation(format, out_prefix);
    const prs::KeyValueConfig cfg = load_config(config_path, scale, overrides, seed);
    if (c_metrics->parsed() || c_table1->parsed()) return prs::run_table1(cfg, out_dir, check);
    if (c_awgn->parsed()) {
      prs::KeyValueConfig c = cfg;
      c.set("format", format);
      c.set("snr_start_db", std::to_string(snr_start));
      c.set("snr_stop_db", std::to_string(snr_stop));
      c.set("snr_step_db", std::to_string(snr_step));
      c.set("samples", std::to_string(samples));
      return prs::run_awgn_sweep(c, out_dir);
    }
    if (c_fig3->parsed()) return prs::run_fig3(cfg, out_dir, check);
    if (c_fiber->parsed()) {
      prs::KeyValueConfig c = cfg;
      c.set("format", format);
      return prs::run_fiber_sim(c, out_dir);
    }
    if (c_eval->parsed()) return prs::run_evaluate(in_prefix, out_dir);
    if (c_fig4->parsed()) return prs::run_fig4(cfg, out_dir, check);
    if (c_fig5->parsed()) return prs::run_fig5(cfg, out_dir, check);
    if (c_fig6->parsed()) return prs::run_fig6(cfg, out_dir, check);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
