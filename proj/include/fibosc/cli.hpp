// cli.hpp — command implementations behind the fibosc executable. Kept in the
// library so tests can drive them against in-memory streams.

#pragma once

#include <optional>
#include <ostream>
#include <string>

namespace fibosc::cli {

struct Range {
    double start = 0.0;
    double stop = 0.0;
    int count = 0;
};

// Flat configuration: config file `key = value` lines (# comments), then
// command-line flags override. Outputs are byte-deterministic: fixed row
// order, floats at 17 significant digits.
struct RunConfig {
    std::optional<double> r;
    std::optional<double> q;
    std::optional<double> beta;
    int levels = 64;
    double t_max = 10.0;
    double dt = 0.0; // 0 = pick the stability-bound step automatically
    std::string format = "csv"; // csv | json (gap command)
    std::string out;            // empty = stdout
    int workers = 1;
    std::string init = "level:1"; // ground | level:n | thermal | coherence:j,k
    int figure = 1;
    double bohr_tol = 1e-9;
    std::optional<Range> r_range;
    std::optional<Range> q_range;
    std::optional<Range> beta_range;
};

// Merge `key = value` lines from path into cfg (unknown keys are an error).
void load_config_file(RunConfig& cfg, const std::string& path);

// Each command writes its table to `os` and returns a process exit code:
// 0 success, 2 validation failure, 3 numerical failure. Diagnostics naming
// the violated condition go to `err`.
int cmd_spectrum(const RunConfig& cfg, std::ostream& os, std::ostream& err);
int cmd_rates(const RunConfig& cfg, std::ostream& os, std::ostream& err);
int cmd_bohr(const RunConfig& cfg, std::ostream& os, std::ostream& err);
int cmd_gap(const RunConfig& cfg, std::ostream& os, std::ostream& err);
int cmd_simulate(const RunConfig& cfg, std::ostream& os, std::ostream& err);
int cmd_sweep(const RunConfig& cfg, std::ostream& os, std::ostream& err);
int cmd_figure(const RunConfig& cfg, std::ostream& os, std::ostream& err);

// Shared 17-significant-digit float formatting (bit-stable across runs).
std::string num17(double v);

// argv-level entry point used by tools/fibosc_main.cpp.
int run(int argc, char** argv);

} // namespace fibosc::cli
