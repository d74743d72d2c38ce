// Command line front end for the benchmark cases.
//
//   ncdg vortex --method mortar --p 5 --q 12 --cycles 2 --out runs/
//   ncdg convergence --grids 9,15,21,27 --orders 3,5
//   ncdg free-stream --method p2p --model advection
//
// A JSON config (keys as in CaseConfig) may supply any field; flags given on
// the command line override it.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ncdg/harness.hpp"

namespace {

using namespace ncdg;
using namespace ncdg::harness;

struct Flags {
  std::vector<std::string> methods;
  int p = 0;
  int q = 0;
  std::string q_rule;
  int nx = 0;
  int ny = 0;
  double shift = 0.0;
  std::string layout;
  double dt = 0.0;
  double cycles = 0.0;
  double t_final = 0.0;
  std::string out;
  double sample_every = 0.0;
  int threads = 0;
  std::string config;
  std::string profile = "desk";
  std::vector<int> grids;
  std::vector<int> orders;
  std::string model;
  int steps = 0;
  bool record_defect = false;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--method", f.methods, "conformal, mortar or p2p; repeat or comma-separate to run several")
      ->delimiter(',')
      ->check(CLI::IsMember({"conformal", "mortar", "p2p"}));
  sub->add_option("--p", f.p, "polynomial order P")->check(CLI::PositiveNumber);
  sub->add_option("--q", f.q, "quadrature points per direction (overrides --q-rule)");
  sub->add_option("--q-rule", f.q_rule, "p+2 or 2p+2")->check(CLI::IsMember({"p+2", "2p+2"}));
  sub->add_option("--nx", f.nx, "cells across")->check(CLI::PositiveNumber);
  sub->add_option("--ny", f.ny, "cells up")->check(CLI::PositiveNumber);
  sub->add_option("--shift", f.shift, "vertical offset of shifted columns, in cell heights");
  sub->add_option("--layout", f.layout, "cartesian, halves or thirds")
      ->check(CLI::IsMember({"auto", "cartesian", "halves", "thirds"}));
  sub->add_option("--dt", f.dt, "largest time step");
  sub->add_option("--cycles", f.cycles, "run length in cycles");
  sub->add_option("--t-final", f.t_final, "run length in time units (overrides --cycles)");
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--sample-every", f.sample_every, "cycles between samples");
  sub->add_option("--threads", f.threads, "worker threads per run")->check(CLI::PositiveNumber);
  sub->add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
  sub->add_option("--profile", f.profile, "desk (minutes) or full (hours) defaults")
      ->check(CLI::IsMember({"desk", "full", "paper"}));
  sub->add_flag("--record-defect", f.record_defect, "write the interface conservation defect every step");
}

/// Config file first, then every flag that was actually given.
CaseConfig build_config(CLI::App* sub, CaseKind kind, const Flags& f) {
  CaseConfig c;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::parse, f.config + ": " + e.what());
    }
    c = from_json(j);
  }
  c.kind = kind;
  auto given = [&](const char* name) { return sub->get_option_no_throw(name) && sub->count(name) > 0; };
  if (given("--p")) c.P = f.p;
  if (given("--q")) {
    c.Q = f.q;
    c.q_rule = QRule::fixed;
  } else if (given("--q-rule")) {
    c.q_rule = parse_q_rule(f.q_rule);
  }
  if (given("--nx")) c.nx = f.nx;
  if (given("--ny")) c.ny = f.ny;
  if (given("--shift")) c.shift = f.shift;
  if (given("--layout")) c.layout = parse_layout(f.layout);
  if (given("--dt")) c.dt = f.dt;
  if (given("--t-final")) {
    c.t_final = f.t_final;
    c.cycles.reset();
  } else if (given("--cycles")) {
    c.cycles = f.cycles;
    c.t_final.reset();
  }
  if (given("--out")) c.out_dir = f.out;
  if (given("--sample-every")) c.sample_every = f.sample_every;
  if (given("--threads")) c.threads = f.threads;
  if (given("--record-defect")) c.record_defect = true;
  if (given("--grids")) c.grids = f.grids;
  if (given("--orders")) c.orders = f.orders;
  if (given("--model")) c.fs_model = parse_free_stream_model(f.model);
  if (given("--steps")) c.steps = f.steps;
  return c;
}

std::vector<InterfaceMethod> methods_of(const Flags& f, const CaseConfig& c) {
  std::vector<InterfaceMethod> m;
  for (const auto& s : f.methods) m.push_back(parse_method(s));
  if (m.empty()) m.push_back(c.method);
  return m;
}

void report_timing(const std::vector<RunRecord>& runs, const std::string& dir) {
  const TimingTable t = emit_timing_table(runs);
  const std::string text = t.format();
  std::cout << text;
  std::ofstream(std::filesystem::path(dir) / "timing.txt") << text;
}

int run_convergence_cmd(CLI::App* sub, const Flags& f) {
  CaseConfig c = build_config(sub, CaseKind::convergence, f);
  if (!f.methods.empty()) {
    // Keep the default quadrature pairing per method, restricted to the
    // methods asked for; an explicit --q-rule applies to all of them.
    std::vector<StudySeries> series;
    const bool rule_given = sub->count("--q-rule") > 0 || sub->count("--q") > 0;
    for (auto m : methods_of(f, c)) {
      if (rule_given) {
        series.push_back({m, c.q_rule});
      } else {
        series.push_back({m, QRule::p_plus_2});
        if (m == InterfaceMethod::p2p) series.push_back({m, QRule::two_p_plus_2});
      }
    }
    c.series = series;
  } else if (sub->count("--q-rule") > 0 || sub->count("--q") > 0) {
    for (auto& s : c.series) s.q_rule = c.q_rule;
  }
  c = resolve(c, parse_profile(f.profile));
  validate(c);
  const ConvergenceResult res = run_convergence(c);
  nlohmann::json fits = nlohmann::json::array();
  for (const auto& fit : res.fits) {
    std::printf("%-9s %-5s P=%-2d Q=%-2d rate %s\n", std::string(to_string(fit.series.method)).c_str(),
                std::string(to_string(fit.series.q_rule)).c_str(), fit.P, fit.Q, format_double(fit.fit.rate).c_str());
    fits.push_back({{"method", to_string(fit.series.method)},
                    {"q_rule", to_string(fit.series.q_rule)},
                    {"P", fit.P},
                    {"Q", fit.Q},
                    {"rate", fit.fit.ok() ? nlohmann::json(fit.fit.rate) : nlohmann::json(nullptr)},
                    {"points_used", fit.fit.used.size()}});
  }
  write_outputs(c.out_dir, "convergence", c, res.runs, res.rows(), {{"fits", fits}});
  bool diverged = false;
  for (const auto& r : res.runs) diverged = diverged || r.diverged;
  return diverged ? 1 : 0;
}

template <class Runner>
int run_series_cmd(CLI::App* sub, CaseKind kind, const Flags& f, Runner runner) {
  const CaseConfig base = build_config(sub, kind, f);
  std::vector<RunRecord> runs;
  int status = 0;
  for (auto m : methods_of(f, base)) {
    CaseConfig c = base;
    c.method = m;
    c = resolve(c, parse_profile(f.profile));
    validate(c);
    RunRecord r = runner(c, status);
    write_outputs(c.out_dir, run_stem(r), c, {r}, r.rows);
    std::printf("%s %s: %s", std::string(to_string(kind)).c_str(), run_stem(r).c_str(), r.status().c_str());
    if (r.diverged) std::printf(" at t=%s (%s)", format_double(r.divergence_time).c_str(), r.failure.c_str());
    std::printf("\n");
    if (r.diverged) status = 1;
    runs.push_back(std::move(r));
  }
  report_timing(runs, runs.front().config.out_dir);
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nodal DG benchmark harness for conformal, mortar and point-to-point interfaces"};
  app.require_subcommand(1);
  Flags f;
  auto* conv = app.add_subcommand("convergence", "advection h-convergence study with fitted rates");
  auto* gauss = app.add_subcommand("gaussian", "rotating Gaussian peak decay");
  auto* vortex = app.add_subcommand("vortex", "isentropic vortex L2 density error");
  auto* fs = app.add_subcommand("free-stream", "constant-state preservation check");
  for (auto* sub : {conv, gauss, vortex, fs}) add_common(sub, f);
  conv->add_option("--grids", f.grids, "cells per side, multiples of 3")->delimiter(',');
  conv->add_option("--orders", f.orders, "polynomial orders")->delimiter(',');
  fs->add_option("--model", f.model, "euler or advection")->check(CLI::IsMember({"euler", "advection"}));
  fs->add_option("--steps", f.steps, "number of steps")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);
  try {
    if (conv->parsed()) return run_convergence_cmd(conv, f);
    if (gauss->parsed()) {
      return run_series_cmd(gauss, CaseKind::gaussian, f, [](const CaseConfig& c, int&) { return run_gaussian(c); });
    }
    if (vortex->parsed()) {
      return run_series_cmd(vortex, CaseKind::vortex, f, [](const CaseConfig& c, int&) { return run_vortex(c); });
    }
    if (fs->parsed()) {
      return run_series_cmd(fs, CaseKind::free_stream, f, [](const CaseConfig& c, int& status) {
        FreeStreamReport rep = run_free_stream(c);
        std::printf("%s\n", rep.message.c_str());
        if (!rep.pass) status = 1;
        return std::move(rep.record);
      });
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
