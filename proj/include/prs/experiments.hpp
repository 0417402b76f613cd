#pragma once

#include <string>

#include "prs/config.hpp"

namespace prs {

/// Experiment recipes behind the CLI subcommands.  Every CSV row carries
/// the seed and config hash that produced it; reruns with identical
/// configuration are byte-identical.

int run_constellation(const std::string& format, const std::string& out_prefix);
int run_table1(const KeyValueConfig& cfg, const std::string& out_dir, bool check);
int run_awgn_sweep(const KeyValueConfig& cfg, const std::string& out_dir);
int run_fig3(const KeyValueConfig& cfg, const std::string& out_dir, bool check);
int run_fiber_sim(const KeyValueConfig& cfg, const std::string& out_dir);
int run_evaluate(const std::string& in_prefix, const std::string& out_dir);
int run_fig4(const KeyValueConfig& cfg, const std::string& out_dir, bool check);
int run_fig5(const KeyValueConfig& cfg, const std::string& out_dir, bool check);
int run_fig6(const KeyValueConfig& cfg, const std::string& out_dir, bool check);

/// Applies the named scale preset (desk|paper) as defaults.
void apply_scale(KeyValueConfig& cfg, const std::string& scale);

}  // namespace prs
