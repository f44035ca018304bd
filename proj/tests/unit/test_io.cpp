#include <gtest/gtest.h>

#include <charconv>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "bresse/errors.hpp"
#include "bresse/io.hpp"
#include "test_support.hpp"

using namespace bresse;
using testing_support::scratch_dir;
using testing_support::slurp;

namespace {

std::string base_config(const std::string& outputs, const std::string& extra = "") {
  return R"({"params":{"rho1":1,"rho2":1,"kappa":1,"kappa0":1,"b":1,"l":0.5,"L":1},
    "profile":{"alpha":0.25,"beta":0.75,"a0":1},
    "bc":"DNN","n":12,"dt":"auto","T":2,"seed":3,"outputs":")" +
         outputs + "\"" + extra + "}";
}

}  // namespace

TEST(Config, ParsesDefaultsAndAuto) {
  const RunConfig c = parse_config(base_config("x"));
  EXPECT_EQ(c.bc, BoundaryCondition::DNN);
  EXPECT_EQ(c.n, 12);
  EXPECT_FALSE(c.dt.has_value());
  EXPECT_FALSE(c.lambda_grid.max.has_value());
  EXPECT_EQ(c.initial.kind, "random_smooth");
  EXPECT_EQ(c.config_id.size(), 16u);
}

TEST(Config, RoundTrip) {
  RunConfig c = parse_config(base_config(
      "out/a", R"(,"initial":{"kind":"modal","index":2},"lambda_grid":{"min":0.5,"max":30,"count":7}, "dt":0.001)"));
  EXPECT_EQ(parse_config(serialize_config(c)), c);
  c = parse_config(base_config("o", R"(,"initial":{"kind":"random_smooth","seed":99,"cutoff":0.25})"));
  EXPECT_EQ(parse_config(serialize_config(c)), c);
}

TEST(Config, IdIgnoresOutputsButTracksContent) {
  const RunConfig a = parse_config(base_config("one"));
  const RunConfig b = parse_config(base_config("two"));
  EXPECT_EQ(a.config_id, b.config_id);
  const RunConfig c = parse_config(base_config("one", R"(,"sample_stride":2)"));
  EXPECT_NE(a.config_id, c.config_id);
  EXPECT_EQ(compute_config_id(a), a.config_id);
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(parse_config("{not json"), InvalidInput);
  EXPECT_THROW(parse_config(base_config("x", R"(,"bogus":1)")), InvalidInput);
  EXPECT_THROW(parse_config(base_config("x", R"(,"T":-1)")), InvalidInput);
  EXPECT_THROW(parse_config(base_config("x", R"(,"initial":{"kind":"wavelet"})")), InvalidInput);
  EXPECT_THROW(parse_config(base_config("x", R"(,"config_id":"0000000000000000")")),
               InvalidInput);
  std::string bad_n = base_config("x");
  bad_n.replace(bad_n.find("\"n\":12"), 6, "\"n\":2");
  EXPECT_THROW(parse_config(bad_n), InvalidInput);
}

TEST(Config, DegenerateNeumannLengthNamesCondition) {
  const std::string text =
      R"({"params":{"rho1":1,"rho2":1,"kappa":1,"kappa0":1,"b":1,"l":1,"L":3.141592653589793},
          "profile":{"alpha":1,"beta":2,"a0":1},"bc":"DNN","n":20})";
  try {
    parse_config(text);
    FAIL() << "expected rejection";
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("n*pi/l"), std::string::npos) << e.what();
  }
}

TEST(Format, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(format_double(-2.5e-300), "-2.5e-300");
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    const std::string s = format_double(x);
    double y = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), y);
    EXPECT_EQ(x, y);
  }
}

TEST(Writers, CsvHeaders) {
  EnergyTimeSeries s;
  s.times = {0.0, 0.5};
  s.energy = {1.0, 0.25};
  s.dissipation = {0.0, 0.125};
  std::ostringstream e;
  write_energy_csv(e, s);
  EXPECT_EQ(e.str(), "t,energy,dissipation\n0,1,0\n0.5,0.25,0.125\n");
  std::ostringstream r;
  write_resolvent_csv(r, {{1.0, 2.0}});
  EXPECT_EQ(r.str(), "lambda,resolvent_norm\n1,2\n");
  std::ostringstream ev;
  write_eigenvalues_csv(ev, {{-1.0, 3.0}});
  EXPECT_EQ(ev.str(), "re,im\n-1,3\n");
}

TEST(Writers, MatrixMarket) {
  Eigen::MatrixXd m(2, 2);
  m << 2.0, -1.0, -1.0, 0.0;
  std::ostringstream gen, sym;
  write_matrix_market(gen, m, false);
  write_matrix_market(sym, m, true);
  EXPECT_EQ(gen.str(),
            "%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 2\n2 1 -1\n1 2 -1\n");
  EXPECT_EQ(sym.str(), "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 2\n2 1 -1\n");
}

TEST(Commands, SimulateWritesReport) {
  const auto dir = scratch_dir();
  const RunConfig c = parse_config(base_config((dir / "run").string()));
  const auto out = run_simulate(c, true);
  EXPECT_EQ(out.regime, Regime::EqualSpeed);
  for (const char* f : {"energy.csv", "report.json", "A.mtx", "M.mtx"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / "run" / f)) << f;
  }
  const std::string report = slurp(dir / "run" / "report.json");
  EXPECT_NE(report.find("\"regime\": \"EqualSpeed\""), std::string::npos);
  EXPECT_NE(report.find("\"law\": \"Exponential\""), std::string::npos);
  EXPECT_NE(report.find(c.config_id), std::string::npos);
}

TEST(Commands, SpectrumWritesSummary) {
  const auto dir = scratch_dir();
  const RunConfig c = parse_config(base_config((dir / "s").string(), R"(,"lambda_grid":{"count":20})"));
  const auto out = run_spectrum(c, 1);
  EXPECT_LT(out.report.spectral_abscissa, 0.0);
  for (const char* f : {"spectrum.json", "eigenvalues.csv", "resolvent.csv", "summary.json"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / "s" / f)) << f;
  }
}

TEST(Plots, EmptyDirectoryListsAllInputs) {
  const auto dir = scratch_dir();
  try {
    emit_plots(dir);
    FAIL() << "expected an error";
  } catch (const InvalidInput& e) {
    const std::string msg = e.what();
    for (const char* f : {"energy.csv", "report.json", "eigenvalues.csv", "resolvent.csv"}) {
      EXPECT_NE(msg.find(f), std::string::npos) << f;
    }
  }
}

TEST(Plots, ScriptsReferenceCsvFiles) {
  const auto dir = scratch_dir();
  const RunConfig c = parse_config(base_config(dir.string()));
  run_simulate(c);
  const auto written = emit_plots(dir);
  EXPECT_EQ(written, (std::vector<std::string>{"energy_semilog.plt", "energy_loglog.plt"}));
  EXPECT_NE(slurp(dir / "energy_semilog.plt").find("'energy.csv'"), std::string::npos);
}

TEST(Sweep, TwoByTwoRegimes) {
  const auto dir = scratch_dir();
  const std::string text = R"({"base":)" + base_config("ignored") +
                           R"(,"grid":{"params.kappa0":[1,2],"params.b":[1,2]},"outputs":")" +
                           (dir / "sw").string() + R"(","commands":["spectrum"]})";
  SweepConfig sweep = parse_sweep(text);
  const auto rows = run_sweep(sweep, 1);
  ASSERT_EQ(rows.size(), 4u);
  std::multiset<std::string> regimes;
  for (const auto& r : rows) {
    regimes.insert(r.regime);
    EXPECT_EQ(r.status, "ok");
  }
  EXPECT_EQ(regimes, (std::multiset<std::string>{"EqualSpeed", "EqualKappaOnly", "General",
                                                 "General"}));
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LT(rows[i - 1].config_id, rows[i].config_id);
  EXPECT_TRUE(std::filesystem::exists(dir / "sw" / "atlas.csv"));
}

TEST(Sweep, RowFailuresAreRecorded) {
  const auto dir = scratch_dir();
  const std::string text = R"({"base":)" + base_config("ignored") +
                           R"(,"grid":{"n":[2,8]},"outputs":")" + (dir / "sw").string() +
                           R"(","commands":["simulate"]})";
  const auto rows = run_sweep(parse_sweep(text), 2);
  ASSERT_EQ(rows.size(), 2u);
  int failed = 0;
  for (const auto& r : rows) failed += r.status.rfind("invalid", 0) == 0;
  EXPECT_EQ(failed, 1);
}

TEST(Sweep, GridCap) {
  const std::string text = R"({"base":)" + base_config("ignored") +
                           R"(,"grid":{"params.b":[1,2,3]},"max_points":2})";
  EXPECT_THROW(run_sweep(parse_sweep(text), 1), InvalidInput);
}

TEST(Sweep, ParallelMatchesSerial) {
  const auto dir = scratch_dir();
  auto make = [&](const std::string& name) {
    return parse_sweep(R"({"base":)" + base_config("ignored") +
                       R"(,"grid":{"params.kappa0":[1,2],"profile.a0":[0.5,1]},"outputs":")" +
                       (dir / name).string() + "\"}");
  };
  run_sweep(make("serial"), 1);
  run_sweep(make("parallel"), 4);
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir / "serial")) {
    if (!entry.is_regular_file()) continue;
    const auto rel = std::filesystem::relative(entry.path(), dir / "serial");
    EXPECT_EQ(slurp(entry.path()), slurp(dir / "parallel" / rel)) << rel;
  }
}
