#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "ncdg/harness.hpp"

using namespace ncdg;
using namespace ncdg::harness;

namespace {

CaseConfig resolved(CaseKind kind, InterfaceMethod m = InterfaceMethod::conformal) {
  CaseConfig c;
  c.kind = kind;
  c.method = m;
  return resolve(c);
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("ncdg_harness_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

TEST(Config, VortexDefaults) {
  const CaseConfig c = resolved(CaseKind::vortex, InterfaceMethod::mortar);
  EXPECT_EQ(c.P, 5);
  EXPECT_EQ(c.Q, 12);
  EXPECT_EQ(c.nx, 21);
  EXPECT_EQ(c.ny, 21);
  EXPECT_EQ(c.layout, MeshLayout::thirds);
  EXPECT_DOUBLE_EQ(*c.shift, 0.5);
  EXPECT_DOUBLE_EQ(duration(c), 20.0);
  EXPECT_EQ(mesh_label(c), "21x21-thirds@0.5");
  EXPECT_NO_THROW(validate(c));
}

TEST(Config, ConformalRunsOnPlainGrid) {
  const CaseConfig c = resolved(CaseKind::vortex);
  EXPECT_EQ(c.layout, MeshLayout::cartesian);
  EXPECT_DOUBLE_EQ(*c.shift, 0.0);
  EXPECT_EQ(build_case_mesh(c).num_elements(), 21 * 21);
  EXPECT_EQ(mesh_label(c), "21x21");
}

TEST(Config, GaussianDefaults) {
  const CaseConfig c = resolved(CaseKind::gaussian, InterfaceMethod::p2p);
  EXPECT_EQ(c.nx, 16);
  EXPECT_EQ(c.Q, c.P + 2);
  EXPECT_EQ(c.layout, MeshLayout::halves);
  EXPECT_NEAR(duration(c), 10 * 2 * std::numbers::pi, 1e-12);
  const Mesh m = build_case_mesh(c);
  EXPECT_EQ(m.zones().size(), 1u);
  // Shifted right half gains one partial row.
  EXPECT_EQ(m.num_elements(), 16 * 8 + 17 * 8);
}

TEST(Config, FullProfileRestoresLongRuns) {
  CaseConfig g;
  g.kind = CaseKind::gaussian;
  EXPECT_DOUBLE_EQ(*resolve(g, Profile::full).cycles, 100.0);
  CaseConfig v;
  v.kind = CaseKind::vortex;
  EXPECT_DOUBLE_EQ(*resolve(v, Profile::full).cycles, 100.0);
  CaseConfig c;
  c.kind = CaseKind::convergence;
  const CaseConfig pc = resolve(c, Profile::full);
  EXPECT_EQ(pc.grids.back(), 150);
  EXPECT_EQ(pc.grids.front(), 9);
  EXPECT_EQ(pc.orders.back(), 11);
  EXPECT_EQ(parse_profile("full"), Profile::full);
  EXPECT_EQ(parse_profile("paper"), Profile::full);
  EXPECT_THROW(parse_profile("ci"), Error);
}

TEST(Config, ConvergenceDeskStudy) {
  const CaseConfig c = resolved(CaseKind::convergence);
  EXPECT_EQ(c.grids, (std::vector<int>{9, 15, 21, 27}));
  EXPECT_EQ(c.orders, (std::vector<int>{3, 5}));
  EXPECT_EQ(c.series.size(), 4u);
  EXPECT_DOUBLE_EQ(duration(c), 1.0);
  const CaseConfig s = series_config(c, {InterfaceMethod::p2p, QRule::two_p_plus_2}, 5, 15);
  EXPECT_EQ(s.Q, 12);
  EXPECT_EQ(s.layout, MeshLayout::thirds);
  EXPECT_DOUBLE_EQ(*s.shift, 0.5);
  const CaseConfig k = series_config(c, {InterfaceMethod::conformal, QRule::p_plus_2}, 3, 9);
  EXPECT_EQ(k.Q, 5);
  EXPECT_EQ(k.layout, MeshLayout::cartesian);
  EXPECT_NO_THROW(validate(s));
  EXPECT_NO_THROW(validate(k));
}

TEST(Config, ValidationRejectsBadInvariants) {
  auto expect_invalid = [](CaseConfig c) {
    try {
      validate(c);
      ADD_FAILURE() << "accepted";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::invalid_argument);
    }
  };
  CaseConfig c = resolved(CaseKind::vortex, InterfaceMethod::mortar);
  CaseConfig bad = c;
  bad.Q = bad.P + 1;
  expect_invalid(bad);
  bad = c;
  bad.dt = 0.0;
  expect_invalid(bad);
  bad = c;
  bad.dt = -1e-3;
  expect_invalid(bad);
  bad = c;
  bad.nx = 20;  // not a multiple of three columns
  expect_invalid(bad);
  bad = resolved(CaseKind::vortex);
  bad.shift = 0.5;  // conformal with a shift
  expect_invalid(bad);
  bad = c;
  bad.shift = 1.0;
  expect_invalid(bad);
  bad = resolved(CaseKind::convergence);
  bad.grids = {10};
  expect_invalid(bad);
}

TEST(Config, JsonRoundTrip) {
  CaseConfig c = resolved(CaseKind::convergence);
  c.seed = 42;
  c.record_defect = true;
  c.shift = 0.25;
  const CaseConfig back = from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
  EXPECT_EQ(back.series, c.series);
  EXPECT_EQ(back.seed, 42u);
}

TEST(Config, JsonPartialOverridesAndUnknownKeys) {
  const auto j = nlohmann::json::parse(R"({"case": "gaussian", "method": "p2p", "P": 7, "cycles": 3})");
  const CaseConfig c = resolve(from_json(j));
  EXPECT_EQ(c.kind, CaseKind::gaussian);
  EXPECT_EQ(c.method, InterfaceMethod::p2p);
  EXPECT_EQ(c.P, 7);
  EXPECT_EQ(c.Q, 9);
  EXPECT_DOUBLE_EQ(*c.cycles, 3.0);
  try {
    from_json(nlohmann::json::parse(R"({"nxx": 3})"));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::parse);
  }
  EXPECT_THROW(from_json(nlohmann::json::parse(R"({"P": "five"})")), Error);
  EXPECT_THROW(from_json(nlohmann::json::parse(R"({"method": "hybrid"})")), Error);
}

// ---------------------------------------------------------------------------
// CSV

std::vector<CsvRow> golden_rows() {
  return {{"convergence", "conformal", 3, 5, "9x9", 1, 1.0, "l2_error", 0.1},
          {"convergence", "p2p", 5, 12, "27x27-thirds@0.5", 1, 1.0, "l2_error", 1.0 / 3.0},
          {"convergence", "mortar", 5, 7, "fit", 0, 1.0, "rate", 6.3012345678901234},
          {"gaussian", "mortar", 4, 6, "16x16-halves@0.5", 0, 0.0, "peak", 0.96744100000000001},
          {"gaussian", "mortar", 4, 6, "16x16-halves@0.5", 1, 6.283185307179586, "peak", 0.9},
          {"vortex", "p2p", 5, 12, "21x21-thirds@0.5", 2, 20.0, "l2_rho", 1e-17},
          {"vortex", "conformal", 5, 12, "21x21", 3, 25.5, "diverged", -2.5},
          {"free-stream", "p2p", 3, 5, "9x9-thirds@0.5", 1, 0.1, "drift", 12345678901234567890.0}};
}

TEST(Csv, MatchesGoldenFile) {
  std::ostringstream os;
  write_csv(os, golden_rows());
  EXPECT_EQ(os.str(), slurp(std::string(NCDG_TEST_DATA_DIR) + "/golden.csv"));
}

TEST(Csv, GoldenFileReadsBack) {
  const auto rows = read_csv_file(std::string(NCDG_TEST_DATA_DIR) + "/golden.csv");
  EXPECT_EQ(rows, golden_rows());
}

TEST(Csv, HeaderIsExactlyTheSchema) {
  std::ostringstream os;
  write_csv(os, {});
  EXPECT_EQ(os.str(), "case,method,P,Q,mesh,sample_index,time,metric_name,metric_value\n");
}

TEST(Csv, DoublesRoundTripBitExactly) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> ex(-300, 300);
  std::vector<CsvRow> rows;
  for (int k = 0; k < 1000; ++k) {
    rows.push_back({"vortex", "mortar", 5, 12, "m", k, mant(rng) * 100.0, "x", std::ldexp(mant(rng), ex(rng))});
  }
  std::stringstream ss;
  write_csv(ss, rows);
  EXPECT_EQ(read_csv(ss), rows);
}

TEST(Csv, SchemaMismatchNamesTheColumn) {
  std::istringstream wrong("case,method,P,Q,mesh,sample,time,metric_name,metric_value\n");
  try {
    read_csv(wrong);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::parse);
    EXPECT_NE(std::string(e.what()).find("sample_index"), std::string::npos);
  }
  std::istringstream short_header("case,method\n");
  EXPECT_THROW(read_csv(short_header), Error);
  std::istringstream empty("");
  EXPECT_THROW(read_csv(empty), Error);
  std::istringstream bad_value("case,method,P,Q,mesh,sample_index,time,metric_name,metric_value\na,b,x,1,m,0,0,n,1\n");
  EXPECT_THROW(read_csv(bad_value), Error);
}

TEST(Csv, RejectsSeparatorsInTextFields) {
  std::ostringstream os;
  EXPECT_THROW(write_csv_row(os, {"a,b", "m", 1, 3, "x", 0, 0.0, "n", 1.0}), Error);
}

// ---------------------------------------------------------------------------
// Rates

TEST(Rates, TwoPointArithmetic) {
  const RateFit f = fit_rate({{1.0, 1e-2}, {0.5, 1e-3}});
  EXPECT_NEAR(f.rate, std::log2(10.0), 1e-12);
}

TEST(Rates, RecoversExactPowerLaw) {
  std::vector<ErrorPoint> pts;
  for (int n : {9, 15, 21, 27}) pts.push_back({10.0 / n, 3.7 * std::pow(10.0 / n, 5.19)});
  const RateFit f = fit_rate(pts);
  EXPECT_NEAR(f.rate, 5.19, 1e-12);
  ASSERT_EQ(f.used.size(), 3u);
  EXPECT_DOUBLE_EQ(f.used.back().h, 10.0 / 27);
  EXPECT_DOUBLE_EQ(f.used.front().h, 10.0 / 15);
}

TEST(Rates, ScaleInvariant) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(1e-9, 1e-1);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<ErrorPoint> pts;
    for (int n : {9, 15, 21, 27}) pts.push_back({10.0 / n, d(rng)});
    std::sort(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.error > b.error; });
    for (std::size_t k = 0; k < pts.size(); ++k) pts[k].h = 10.0 / (9 + 6 * k);
    std::vector<ErrorPoint> scaled = pts;
    for (auto& p : scaled) p.error *= 123.456;
    EXPECT_NEAR(fit_rate(pts).rate, fit_rate(scaled).rate, 1e-12);
  }
}

TEST(Rates, DropsPlateauAndTurnover) {
  // Finest point sits on the round-off plateau; next one has turned over.
  std::vector<ErrorPoint> pts{{1.0, 1e-2}, {0.5, 1e-4}, {0.25, 1e-6}, {0.125, 5e-6}, {0.0625, 1e-13}};
  const RateFit f = fit_rate(pts);
  ASSERT_EQ(f.used.size(), 3u);
  EXPECT_DOUBLE_EQ(f.used.back().h, 0.25);
  EXPECT_NEAR(f.rate, std::log2(100.0), 1e-12);
}

TEST(Rates, ExcludesDivergedAndNeedsTwoPoints) {
  std::vector<ErrorPoint> pts{{1.0, 1e-2}, {0.5, 1e-3}, {0.25, 1e-4, true}};
  const RateFit f = fit_rate(pts);
  EXPECT_EQ(f.used.size(), 2u);
  EXPECT_NEAR(f.rate, std::log2(10.0), 1e-12);
  EXPECT_FALSE(fit_rate({{1.0, 1e-2}}).ok());
  EXPECT_FALSE(fit_rate({{1.0, 1e-13}, {0.5, 1e-14}}).ok());
  EXPECT_FALSE(fit_rate({{1.0, std::nan("")}, {0.5, 1e-3}}).ok());
}

// ---------------------------------------------------------------------------
// Runs

TEST(Runs, SampleScheduleEndsAtDuration) {
  const auto t = harness::detail::sample_schedule(10.0, 25.0);
  EXPECT_EQ(t, (std::vector<double>{0.0, 10.0, 20.0, 25.0}));
  EXPECT_EQ(harness::detail::sample_schedule(10.0, 20.0), (std::vector<double>{0.0, 10.0, 20.0}));
  EXPECT_EQ(harness::detail::sample_schedule(10.0, 0.0), (std::vector<double>{0.0}));
}

TEST(Runs, GaussianInitialPeakMatchesProjectionOracle) {
  // The Gaussian is separable and centred in a cell, so the exact L2
  // projection peaks at the square of the 1D projection at the cell centre
  // (Legendre expansion with a 60-point Gauss rule): 0.9985643 for P = 6, 7
  // and 0.9998902 for P = 8, 9. Q = P + 2 GLL quadrature in the projection
  // moves these by about 1e-4.
  const std::vector<std::pair<int, double>> oracle{{7, 0.9985643161832208}, {8, 0.9998902279601312}};
  for (const auto& [P, expected] : oracle) {
    CaseConfig c;
    c.kind = CaseKind::gaussian;
    c.P = P;
    c.t_final = 0.0;
    const RunRecord r = run_gaussian(resolve(c));
    const auto peak = r.series("peak");
    ASSERT_EQ(peak.size(), 1u);
    EXPECT_NEAR(peak[0], expected, 3e-4) << "P=" << P;
    if (P >= 8) {
      EXPECT_GE(peak[0], 0.999);
    }
  }
}

TEST(Runs, VortexInitialErrorIsProjectionError) {
  CaseConfig c;
  c.kind = CaseKind::vortex;
  c.t_final = 0.0;
  const RunRecord r = run_vortex(resolve(c));
  const auto e = r.series("l2_rho");
  ASSERT_EQ(e.size(), 1u);
  EXPECT_GT(e[0], 0.0);
  EXPECT_LE(e[0], 1e-4);
}

TEST(Runs, RowsMonotoneAndTimingsConsistent) {
  CaseConfig c;
  c.kind = CaseKind::gaussian;
  c.method = InterfaceMethod::mortar;
  c.P = 3;
  c.t_final = 0.05 * 2 * std::numbers::pi;
  c.sample_every = 0.01;
  c.record_defect = true;
  const RunRecord r = run_gaussian(resolve(c));
  EXPECT_FALSE(r.diverged);
  const auto peaks = r.series("peak");
  EXPECT_EQ(peaks.size(), 6u);
  for (std::size_t k = 1; k < r.rows.size(); ++k) EXPECT_GE(r.rows[k].time, r.rows[k - 1].time - 1e-15);
  EXPECT_EQ(static_cast<long>(r.series("conservation_defect").size()), r.timings.steps);
  for (double d : r.series("conservation_defect")) EXPECT_LE(std::abs(d), 1e-12);
  const auto& t = r.timings;
  const double phases = t.setup + t.volume + t.surface + t.interface + t.integration;
  EXPECT_GE(r.wall_seconds, 0.99 * phases);
  EXPECT_GT(t.steps, 0);
  EXPECT_EQ(t.rhs_evaluations, 4 * t.steps);
}

TEST(Runs, DivergenceIsRecordedNotThrown) {
  CaseConfig c;
  c.kind = CaseKind::vortex;
  c.P = 3;
  c.nx = 9;
  c.dt = 2.0;
  c.t_final = 200.0;
  const RunRecord r = run_vortex(resolve(c));
  EXPECT_TRUE(r.diverged);
  EXPECT_EQ(r.status(), "diverged");
  EXPECT_FALSE(r.failure.empty());
  ASSERT_FALSE(r.series("diverged").empty());
  EXPECT_LT(r.divergence_time, 200.0);
  EXPECT_EQ(r.rows.back().metric_name, "diverged");
}

TEST(Runs, AlignedZonesReproduceConformalSeries) {
  // shift = 0 interfaces carry the same metric series as the plain grid.
  CaseConfig base;
  base.kind = CaseKind::gaussian;
  base.P = 4;
  base.t_final = 0.3;
  base.sample_every = 0.01;
  const RunRecord ref = run_gaussian(resolve(base));
  for (auto m : {InterfaceMethod::mortar, InterfaceMethod::p2p}) {
    CaseConfig c = base;
    c.method = m;
    c.shift = 0.0;
    const RunRecord r = run_gaussian(resolve(c));
    const auto a = ref.series("peak"), b = r.series("peak");
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-10) << to_string(m);
  }
}

TEST(Runs, SmallConvergenceStudy) {
  CaseConfig c;
  c.kind = CaseKind::convergence;
  c.grids = {6, 12};
  c.orders = {2};
  c.series = {{InterfaceMethod::conformal, QRule::p_plus_2}, {InterfaceMethod::p2p, QRule::two_p_plus_2}};
  c.t_final = 0.02;
  const ConvergenceResult res = run_convergence(resolve(c));
  EXPECT_EQ(res.runs.size(), 4u);
  ASSERT_EQ(res.fits.size(), 2u);
  EXPECT_EQ(res.fits[1].Q, 6);
  for (const auto& f : res.fits) {
    EXPECT_TRUE(f.fit.ok());
    EXPECT_GT(f.fit.rate, 1.0);
  }
  const auto rows = res.rows();
  EXPECT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows.back().metric_name, "rate");
  EXPECT_EQ(rows.back().mesh, "fit");
  EXPECT_NE(res.find(InterfaceMethod::p2p, QRule::two_p_plus_2, 2), nullptr);
  EXPECT_EQ(res.find(InterfaceMethod::mortar, QRule::p_plus_2, 2), nullptr);
}

TEST(Runs, OutputsAndManifest) {
  CaseConfig c;
  c.kind = CaseKind::gaussian;
  c.P = 2;
  c.nx = 4;
  c.t_final = 0.01;
  c = resolve(c);
  const RunRecord r = run_gaussian(c);
  const auto dir = scratch_dir("outputs");
  write_outputs(dir.string(), run_stem(r), c, {r}, r.rows);
  EXPECT_EQ(run_stem(r), "gaussian_conformal_P2Q4_4x4");
  EXPECT_EQ(read_csv_file((dir / (run_stem(r) + ".csv")).string()), r.rows);
  std::ifstream mf(dir / (run_stem(r) + ".json"));
  const auto m = nlohmann::json::parse(mf);
  EXPECT_EQ(m["status"], "ok");
  EXPECT_EQ(m["config"]["case"], "gaussian");
  ASSERT_EQ(m["runs"].size(), 1u);
  EXPECT_EQ(m["runs"][0]["timings"]["steps"], r.timings.steps);
  EXPECT_TRUE(m["runs"][0]["timings"].contains("setup"));
  EXPECT_TRUE(m["runs"][0]["divergence_time"].is_null());
  std::filesystem::remove_all(dir);
}

// ---------------------------------------------------------------------------
// Free stream

CaseConfig small_free_stream(InterfaceMethod m, FreeStreamModel model) {
  CaseConfig c;
  c.kind = CaseKind::free_stream;
  c.method = m;
  c.fs_model = model;
  c.P = 3;
  c.Q = 5;
  c.nx = 9;
  return resolve(c);
}

TEST(FreeStream, PassesOnShiftedMeshes) {
  for (auto model : {FreeStreamModel::euler, FreeStreamModel::advection}) {
    for (auto m : {InterfaceMethod::mortar, InterfaceMethod::p2p}) {
      const FreeStreamReport rep = run_free_stream(small_free_stream(m, model));
      EXPECT_TRUE(rep.pass) << rep.message;
      EXPECT_LE(rep.drift, 1e-10);
      EXPECT_LE(rep.max_rate, model == FreeStreamModel::euler ? 1e-11 : 1e-12) << rep.message;
      EXPECT_EQ(rep.record.series("pass"), std::vector<double>{1.0});
    }
  }
}

TEST(FreeStream, CorruptedP2PRowFailsWithLocalizedEdge) {
  const CaseConfig c = small_free_stream(InterfaceMethod::p2p, FreeStreamModel::euler);
  int corrupted_edge = -1;
  FreeStreamHooks hooks;
  hooks.euler = [&](DGOperator<EulerModel>& op) {
    auto* p2p = dynamic_cast<P2PHandler<EulerModel>*>(op.handlers()[0].get());
    ASSERT_NE(p2p, nullptr);
    const std::size_t entry = 2 * op.disc().nq() + 1;
    corrupted_edge = p2p->map().edges[entry / op.disc().nq()];
    p2p->corrupt_entry_for_testing(entry, 1.01);
  };
  const FreeStreamReport rep = run_free_stream(c, hooks);
  EXPECT_FALSE(rep.pass);
  EXPECT_GT(rep.drift, 1e-10);
  EXPECT_EQ(rep.worst_edge, corrupted_edge);
  EXPECT_TRUE(rep.worst_edge_on_interface);
  EXPECT_EQ(rep.worst_element, edge_element(corrupted_edge));
  EXPECT_NE(rep.message.find("worst edge " + std::to_string(corrupted_edge)), std::string::npos);
}

// ---------------------------------------------------------------------------
// Timing table

RunRecord fake_record(InterfaceMethod m, int P, int Q, double per_step, long steps, double setup) {
  RunRecord r;
  r.config.method = m;
  r.config.P = P;
  r.config.Q = Q;
  r.timings.volume = per_step * steps;
  r.timings.steps = steps;
  r.timings.setup = setup;
  return r;
}

TEST(Timing, SingleRecordIsOneByOne) {
  const TimingTable t = emit_timing_table({fake_record(InterfaceMethod::mortar, 3, 5, 2e-3, 10, 5.0)});
  EXPECT_EQ(t.methods, std::vector<std::string>{"mortar"});
  EXPECT_EQ(t.columns, std::vector<std::string>{"P3Q5"});
  EXPECT_NEAR(t.cell("mortar", "P3Q5")->per_step, 2e-3, 1e-15);
  EXPECT_FALSE(t.ratio("mortar", "P3Q5").has_value());
  EXPECT_THROW(emit_timing_table({}), Error);
}

TEST(Timing, RatiosAgainstConformalPerColumn) {
  const TimingTable t = emit_timing_table({fake_record(InterfaceMethod::p2p, 3, 5, 1.5e-3, 10, 1.0),
                                           fake_record(InterfaceMethod::conformal, 3, 5, 1e-3, 10, 1.0),
                                           fake_record(InterfaceMethod::mortar, 3, 5, 4e-3, 10, 1.0),
                                           fake_record(InterfaceMethod::conformal, 5, 12, 2e-3, 10, 1.0),
                                           fake_record(InterfaceMethod::mortar, 5, 12, 3e-3, 10, 1.0)});
  EXPECT_EQ(t.methods, (std::vector<std::string>{"conformal", "mortar", "p2p"}));
  EXPECT_EQ(t.columns, (std::vector<std::string>{"P3Q5", "P5Q12"}));
  EXPECT_NEAR(*t.ratio("mortar", "P3Q5"), 4.0, 1e-12);
  EXPECT_NEAR(*t.ratio("p2p", "P3Q5"), 1.5, 1e-12);
  EXPECT_NEAR(*t.ratio("mortar", "P5Q12"), 1.5, 1e-12);
  EXPECT_FALSE(t.cell("p2p", "P5Q12").has_value());
  const std::string text = t.format();
  EXPECT_NE(text.find("P5Q12"), std::string::npos);
  EXPECT_NE(text.find("4.000"), std::string::npos);
}

TEST(Timing, SetupExcludedFromPerStep) {
  const TimingTable a = emit_timing_table({fake_record(InterfaceMethod::mortar, 3, 5, 1e-3, 100, 0.0)});
  const TimingTable b = emit_timing_table({fake_record(InterfaceMethod::mortar, 3, 5, 1e-3, 100, 50.0)});
  EXPECT_DOUBLE_EQ(a.cell("mortar", "P3Q5")->per_step, b.cell("mortar", "P3Q5")->per_step);
  EXPECT_DOUBLE_EQ(b.cell("mortar", "P3Q5")->setup, 50.0);
}

TEST(Timing, PoolsRunsOfOneCell) {
  const TimingTable t = emit_timing_table({fake_record(InterfaceMethod::mortar, 3, 5, 1e-3, 100, 1.0),
                                           fake_record(InterfaceMethod::mortar, 3, 5, 3e-3, 300, 1.0)});
  EXPECT_NEAR(t.cell("mortar", "P3Q5")->per_step, (0.1 + 0.9) / 400, 1e-15);
  EXPECT_EQ(t.cell("mortar", "P3Q5")->runs, 2);
}
