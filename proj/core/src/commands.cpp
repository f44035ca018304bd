#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "bresse/errors.hpp"
#include "bresse/io.hpp"
#include "bresse/parallel.hpp"
#include "json_util.hpp"

namespace bresse {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// NaN and infinities have no JSON literal; they are written as null.
json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json decay_law_json(const DecayLaw& law) {
  const auto exponent = law.energy_exponent();
  return {{"law", std::string(to_string(law.kind))},
          {"resolvent_order", law.resolvent_order},
          {"energy_exponent", exponent ? number(*exponent) : json(nullptr)}};
}

json fit_json(const DecayFit& f) {
  return {{"law", std::string(to_string(f.law))},
          {"rate", number(f.rate)},
          {"prefactor", number(f.prefactor)},
          {"relative_prefactor", number(f.relative_prefactor)},
          {"r_squared", number(f.r_squared)},
          {"window", {number(f.window.t_lo), number(f.window.t_hi)}},
          {"samples", f.samples}};
}

json optional_fit(const std::optional<DecayFit>& f) { return f ? fit_json(*f) : json(nullptr); }

void write_json(const fs::path& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

template <typename Writer>
void write_stream(const fs::path& path, Writer&& writer) {
  std::ostringstream ss;
  writer(ss);
  write_text_file(path, ss.str());
}

void dump_operators(const fs::path& dir, const DiscreteSystem& sys) {
  write_stream(dir / "A.mtx", [&](std::ostream& os) { write_matrix_market(os, sys.A, false); });
  write_stream(dir / "M.mtx", [&](std::ostream& os) { write_matrix_market(os, sys.M, true); });
}

DiscreteSystem assemble_for(const RunConfig& c) {
  return assemble(c.params, c.profile, c.bc, c.n);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (const char ch : s) {
    if (ch == '"') out += '"';
    out += (ch == '\n' || ch == '\r') ? ' ' : ch;
  }
  return out + "\"";
}

}  // namespace

SimulateOutcome run_simulate(const RunConfig& config, bool dump) {
  const DiscreteSystem sys = assemble_for(config);
  const Eigen::VectorXd u0 = make_initial(sys, initial_data(config));
  const double dt = resolve_time_step(config, sys);

  SimulateOutcome out;
  out.regime = classify_regime(config.params);
  out.result = simulate(sys, u0, dt, config.T, config.sample_stride, config.config_id);
  out.classification = classify_decay(out.result.series);

  const fs::path dir(config.outputs);
  fs::create_directories(dir);
  write_stream(dir / "energy.csv",
               [&](std::ostream& os) { write_energy_csv(os, out.result.series); });

  const auto& series = out.result.series;
  const auto& cls = out.classification;
  json report;
  report["config_id"] = config.config_id;
  report["config"] = config_to_json(config);
  report["regime"] = std::string(to_string(out.regime));
  report["predicted"] = decay_law_json(predicted_decay(out.regime));
  report["dt"] = number(dt);
  report["steps"] = out.result.steps;
  report["dimension"] = sys.dim();
  report["initial_energy"] = number(series.energy.front());
  report["final_energy"] = number(series.energy.back());
  report["energy_balance"] = {
      {"max_residual", number(out.result.balance.max_midpoint_residual)},
      {"max_trapezoid_residual", number(out.result.balance.max_trapezoid_residual)},
      {"accumulated_trapezoid_residual",
       number(out.result.balance.accumulated_trapezoid_residual)}};
  report["decay"] = {{"verdict", std::string(to_string(cls.verdict))},
                     {"exponential", optional_fit(cls.exponential)},
                     {"polynomial", optional_fit(cls.polynomial)},
                     {"diagnostics", cls.diagnostics}};
  write_json(dir / "report.json", report);
  if (dump) dump_operators(dir, sys);
  return out;
}

SpectrumOutcome run_spectrum(const RunConfig& config, int threads, bool dump) {
  const DiscreteSystem sys = assemble_for(config);
  SpectrumOutcome out;
  out.regime = classify_regime(config.params);
  out.report = analyze(sys, spectrum_options(config, threads));
  const SpectralReport& rep = out.report;

  const fs::path dir(config.outputs);
  fs::create_directories(dir);

  json eig = json::array();
  for (const auto& z : rep.eigenvalues) eig.push_back({number(z.real()), number(z.imag())});
  write_json(dir / "spectrum.json", {{"config_id", config.config_id},
                                     {"eigenvalues", eig},
                                     {"spectral_abscissa", number(rep.spectral_abscissa)},
                                     {"resolved_abscissa", number(rep.resolved_abscissa)},
                                     {"frequency_cap", number(rep.frequency_cap)}});
  write_stream(dir / "eigenvalues.csv",
               [&](std::ostream& os) { write_eigenvalues_csv(os, rep.eigenvalues); });
  write_stream(dir / "resolvent.csv",
               [&](std::ostream& os) { write_resolvent_csv(os, rep.axis_samples); });

  json flags = json::array();
  if (rep.conservative) flags.push_back("conservative: no decay expected");
  if (rep.spectral_abscissa > rep.resolved_abscissa) {
    flags.push_back("weakest mode lies above the frequency cap");
  }
  json summary;
  summary["config_id"] = config.config_id;
  summary["regime"] = std::string(to_string(out.regime));
  summary["predicted"] = decay_law_json(predicted_decay(out.regime));
  summary["dimension"] = sys.dim();
  summary["abscissa"] = number(rep.spectral_abscissa);
  summary["resolved_abscissa"] = number(rep.resolved_abscissa);
  summary["frequency_cap"] = number(rep.frequency_cap);
  summary["growth_ratio"] = number(rep.growth_ratio);
  summary["max_resolvent_norm"] = number(rep.axis_samples[rep.argmax].r);
  summary["argmax_lambda"] = number(rep.axis_samples[rep.argmax].lambda);
  if (rep.growth) {
    summary["alpha_fit"] = number(rep.growth->alpha);
    summary["alpha_ci"] = {number(rep.growth->ci_low), number(rep.growth->ci_high)};
    summary["alpha_samples"] = rep.growth->samples;
    summary["bt_map"] = rep.growth->alpha > 0.0 ? number(bt_map(rep.growth->alpha)) : json(nullptr);
  } else {
    summary["alpha_fit"] = nullptr;
    summary["alpha_ci"] = nullptr;
    summary["bt_map"] = nullptr;
    summary["growth_error"] = rep.growth_error;
  }
  summary["conservative"] = rep.conservative;
  summary["flags"] = flags;
  write_json(dir / "summary.json", summary);
  if (dump) dump_operators(dir, sys);
  return out;
}

SweepConfig parse_sweep(std::string_view text) {
  const json j = parse_json_text(text, "sweep file");
  if (!j.is_object()) throw InvalidInput("sweep file must hold a JSON object");
  for (const auto& [key, _] : j.items()) {
    static const std::set<std::string> allowed = {"base", "grid", "outputs", "max_points",
                                                  "commands"};
    if (!allowed.count(key)) throw InvalidInput("unknown key '" + key + "' in sweep file");
  }
  SweepConfig s;
  if (!j.contains("base") || !j["base"].is_object()) {
    throw InvalidInput("sweep file needs a 'base' configuration object");
  }
  json base = j["base"];
  base.erase("config_id");
  base.erase("outputs");
  s.base_json = base.dump();
  if (!j.contains("grid") || !j["grid"].is_object() || j["grid"].empty()) {
    throw InvalidInput("sweep file needs a non-empty 'grid' object");
  }
  for (const auto& [key, values] : j["grid"].items()) {
    if (!values.is_array() || values.empty()) {
      throw InvalidInput("grid entry '" + key + "' must be a non-empty array");
    }
    for (const auto& v : values) {
      if (!v.is_number()) throw InvalidInput("grid entry '" + key + "' must hold numbers");
      s.grid[key].push_back(v.get<double>());
    }
  }
  if (j.contains("outputs")) {
    if (!j["outputs"].is_string()) throw InvalidInput("'outputs' must be a string");
    s.outputs = j["outputs"].get<std::string>();
  }
  if (j.contains("max_points")) {
    if (!j["max_points"].is_number_integer() || j["max_points"].get<int>() < 1) {
      throw InvalidInput("'max_points' must be a positive integer");
    }
    s.max_points = j["max_points"].get<int>();
  }
  if (j.contains("commands")) {
    if (!j["commands"].is_array()) throw InvalidInput("'commands' must be an array");
    s.simulate = s.spectrum = false;
    for (const auto& c : j["commands"]) {
      const std::string name = c.is_string() ? c.get<std::string>() : "";
      if (name == "simulate") {
        s.simulate = true;
      } else if (name == "spectrum") {
        s.spectrum = true;
      } else {
        throw InvalidInput("sweep commands must be \"simulate\" or \"spectrum\"");
      }
    }
  }
  return s;
}

SweepConfig load_sweep(const fs::path& path) { return parse_sweep(read_text_file(path)); }

namespace {

const std::set<std::string> kIntegerKeys = {"n", "seed", "sample_stride", "lambda_grid.count",
                                            "initial.index", "initial.seed"};

void set_path(json& root, const std::string& dotted, double value) {
  json* node = &root;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = dotted.find('.', start);
    const std::string part = dotted.substr(start, dot == std::string::npos ? dotted.npos : dot - start);
    if (part.empty()) throw InvalidInput("malformed grid key '" + dotted + "'");
    if (dot == std::string::npos) {
      if (kIntegerKeys.count(dotted)) {
        if (value != std::floor(value)) {
          throw InvalidInput("grid key '" + dotted + "' needs integer values");
        }
        (*node)[part] = static_cast<std::int64_t>(value);
      } else {
        (*node)[part] = value;
      }
      return;
    }
    if (!node->contains(part)) (*node)[part] = json::object();
    node = &(*node)[part];
    if (!node->is_object()) throw InvalidInput("grid key '" + dotted + "' is not a nested field");
    start = dot + 1;
  }
}

struct PendingRow {
  SweepRow row;
  std::optional<RunConfig> config;
};

std::string hash_hex(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream hex;
  hex << std::hex;
  hex.width(16);
  hex.fill('0');
  hex << h;
  return hex.str();
}

std::string failure(const char* kind, const std::exception& e) {
  return std::string(kind) + ": " + e.what();
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepConfig& sweep, int threads) {
  std::size_t total = 1;
  for (const auto& [_, values] : sweep.grid) total *= values.size();
  if (total > static_cast<std::size_t>(sweep.max_points)) {
    throw InvalidInput("sweep grid has " + std::to_string(total) + " points, cap is " +
                       std::to_string(sweep.max_points));
  }

  const json base = parse_json_text(sweep.base_json, "sweep base");
  std::vector<PendingRow> rows;
  std::set<std::string> seen;
  for (std::size_t flat = 0; flat < total; ++flat) {
    PendingRow pending;
    json row = base;
    std::size_t rest = flat;
    try {
      for (const auto& [key, values] : sweep.grid) {
        const double v = values[rest % values.size()];
        rest /= values.size();
        pending.row.values[key] = v;
        set_path(row, key, v);
      }
      pending.config = parse_config_json(row);
      pending.row.config_id = pending.config->config_id;
      pending.row.regime = std::string(to_string(classify_regime(pending.config->params)));
    } catch (const InvalidInput& e) {
      pending.row.config_id = hash_hex(row.dump());
      pending.row.status = failure("invalid", e);
      pending.config.reset();
    }
    if (seen.insert(pending.row.config_id).second) rows.push_back(std::move(pending));
  }
  std::sort(rows.begin(), rows.end(), [](const PendingRow& a, const PendingRow& b) {
    return a.row.config_id < b.row.config_id;
  });

  const fs::path root(sweep.outputs);
  fs::create_directories(root);

  parallel_for(rows.size(), threads, [&](std::size_t i) {
    PendingRow& p = rows[i];
    if (!p.config) return;
    RunConfig config = *p.config;
    config.outputs = (root / config.config_id).string();
    std::vector<std::string> problems;
    if (sweep.simulate) {
      try {
        const SimulateOutcome sim = run_simulate(config);
        p.row.decay = std::string(to_string(sim.classification.verdict));
      } catch (const InvalidInput& e) {
        problems.push_back(failure("invalid", e));
      } catch (const NumericalFailure& e) {
        problems.push_back(failure("numerical", e));
      } catch (const std::exception& e) {
        problems.push_back(failure("error", e));
      }
    }
    if (sweep.spectrum) {
      try {
        const SpectrumOutcome spec = run_spectrum(config, 1);
        p.row.abscissa = spec.report.spectral_abscissa;
        if (spec.report.growth) p.row.alpha_fit = spec.report.growth->alpha;
      } catch (const InvalidInput& e) {
        problems.push_back(failure("invalid", e));
      } catch (const NumericalFailure& e) {
        problems.push_back(failure("numerical", e));
      } catch (const std::exception& e) {
        problems.push_back(failure("error", e));
      }
    }
    if (!problems.empty()) {
      std::string joined;
      for (const auto& s : problems) joined += (joined.empty() ? "" : "; ") + s;
      p.row.status = joined;
    }
  });

  std::ostringstream atlas;
  atlas << "config_id";
  for (const auto& [key, _] : sweep.grid) atlas << ',' << csv_field(key);
  atlas << ",regime,abscissa,alpha_fit,decay,status\n";
  std::vector<SweepRow> out;
  for (auto& p : rows) {
    const SweepRow& r = p.row;
    atlas << r.config_id;
    for (const auto& [key, _] : sweep.grid) atlas << ',' << format_double(r.values.at(key));
    atlas << ',' << r.regime << ',' << (r.abscissa ? format_double(*r.abscissa) : "") << ','
          << (r.alpha_fit ? format_double(*r.alpha_fit) : "") << ',' << r.decay << ','
          << csv_field(r.status) << '\n';
    out.push_back(std::move(p.row));
  }
  write_text_file(root / "atlas.csv", atlas.str());
  return out;
}

namespace {

const char* kPlotHeader =
    "set datafile separator ','\n"
    "set key autotitle columnhead\n"
    "set terminal pngcairo size 900,600\n";

std::optional<json> read_report(const fs::path& path) {
  if (!fs::exists(path)) return std::nullopt;
  try {
    return json::parse(read_text_file(path));
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

// Fitted curve from report.json, if the fit is present and finite.
std::string fit_overlay(const std::optional<json>& report, const char* which) {
  if (!report || !report->contains("decay")) return {};
  const json& fit = (*report)["decay"][which];
  if (!fit.is_object() || !fit["rate"].is_number() || !fit["prefactor"].is_number()) return {};
  std::ostringstream s;
  const double rate = fit["rate"].get<double>();
  const double pre = fit["prefactor"].get<double>();
  if (std::string(which) == "exponential") {
    s << ", " << format_double(pre) << "*exp(-" << format_double(rate)
      << "*x) with lines dashtype 2 title 'exponential fit'";
  } else {
    s << ", " << format_double(pre) << "*x**(-" << format_double(rate)
      << ") with lines dashtype 2 title 'power-law fit'";
  }
  return s.str();
}

}  // namespace

std::vector<std::string> emit_plots(const fs::path& dir) {
  const bool has_energy = fs::exists(dir / "energy.csv");
  const bool has_report = fs::exists(dir / "report.json");
  const bool has_eigs = fs::exists(dir / "eigenvalues.csv");
  const bool has_resolvent = fs::exists(dir / "resolvent.csv");
  if (!has_energy && !has_eigs && !has_resolvent) {
    std::string missing;
    for (const char* name : {"energy.csv", "report.json", "eigenvalues.csv", "resolvent.csv"}) {
      if (!fs::exists(dir / name)) missing += std::string(missing.empty() ? "" : ", ") + name;
    }
    throw InvalidInput("nothing to plot in " + dir.string() + "; missing inputs: " + missing);
  }

  std::vector<std::string> written;
  auto emit = [&](const std::string& name, const std::string& body) {
    write_text_file(dir / name, std::string(kPlotHeader) + body);
    written.push_back(name);
  };

  if (has_energy) {
    const auto report = has_report ? read_report(dir / "report.json") : std::nullopt;
    emit("energy_semilog.plt",
         "set output 'energy_semilog.png'\n"
         "set logscale y\n"
         "set xlabel 't'\nset ylabel 'E(t)'\n"
         "plot 'energy.csv' using 1:2 with lines" +
             fit_overlay(report, "exponential") + "\n");
    emit("energy_loglog.plt",
         "set output 'energy_loglog.png'\n"
         "set logscale xy\n"
         "set xlabel 't'\nset ylabel 'E(t)'\n"
         "plot 'energy.csv' using 1:2 with lines" +
             fit_overlay(report, "polynomial") + "\n");
  }
  if (has_eigs) {
    emit("spectrum.plt",
         "set output 'spectrum.png'\n"
         "set xlabel 'Re'\nset ylabel 'Im'\n"
         "plot 'eigenvalues.csv' using 1:2 with points pt 7 ps 0.5\n");
  }
  if (has_resolvent) {
    emit("resolvent.plt",
         "set output 'resolvent.png'\n"
         "set logscale xy\n"
         "set xlabel 'lambda'\nset ylabel 'resolvent norm'\n"
         "plot 'resolvent.csv' using 1:2 with linespoints pt 7 ps 0.5\n");
  }
  return written;
}

}  // namespace bresse
