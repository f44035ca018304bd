#include "bresse/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "bresse/errors.hpp"
#include "json_util.hpp"

namespace bresse {

using nlohmann::json;

namespace {

const std::set<std::string> kTopKeys = {"params", "profile", "bc",          "n",
                                        "dt",     "T",       "seed",        "lambda_grid",
                                        "outputs", "initial", "sample_stride", "config_id"};

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) {
      throw InvalidInput("unknown key '" + key + "' in " + where);
    }
  }
}

const json& require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw InvalidInput(where + " must be a JSON object");
  return j;
}

double get_number(const json& obj, const std::string& key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw InvalidInput("missing key '" + key + "' in " + where);
  if (!it->is_number()) throw InvalidInput("'" + key + "' in " + where + " must be a number");
  return it->get<double>();
}

double get_number_or(const json& obj, const std::string& key, double fallback,
                     const std::string& where) {
  return obj.contains(key) ? get_number(obj, key, where) : fallback;
}

std::int64_t get_integer(const json& obj, const std::string& key, std::int64_t fallback,
                         const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_integer()) {
    throw InvalidInput("'" + key + "' in " + where + " must be an integer");
  }
  return it->get<std::int64_t>();
}

std::uint64_t get_unsigned(const json& obj, const std::string& key, std::uint64_t fallback,
                           const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number_unsigned()) {
    throw InvalidInput("'" + key + "' in " + where + " must be a non-negative integer");
  }
  return it->get<std::uint64_t>();
}

std::string get_string(const json& obj, const std::string& key, const std::string& fallback,
                       const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_string()) throw InvalidInput("'" + key + "' in " + where + " must be a string");
  return it->get<std::string>();
}

std::optional<double> get_number_or_auto(const json& obj, const std::string& key,
                                         const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) return std::nullopt;
  if (it->is_string() && it->get<std::string>() == "auto") return std::nullopt;
  if (!it->is_number()) {
    throw InvalidInput("'" + key + "' in " + where + " must be a number or \"auto\"");
  }
  return it->get<double>();
}

BeamParameters parse_params(const json& j) {
  require_object(j, "params");
  reject_unknown(j, {"rho1", "rho2", "kappa", "kappa0", "b", "l", "L"}, "params");
  BeamParameters p;
  p.rho1 = get_number(j, "rho1", "params");
  p.rho2 = get_number(j, "rho2", "params");
  p.kappa = get_number(j, "kappa", "params");
  p.kappa0 = get_number(j, "kappa0", "params");
  p.b = get_number(j, "b", "params");
  p.l = get_number(j, "l", "params");
  p.L = get_number(j, "L", "params");
  return p;
}

DampingProfile parse_profile(const json& j) {
  require_object(j, "profile");
  reject_unknown(j, {"alpha", "beta", "a0", "shape", "ramp_width"}, "profile");
  DampingProfile d;
  d.alpha = get_number(j, "alpha", "profile");
  d.beta = get_number(j, "beta", "profile");
  d.a0 = get_number(j, "a0", "profile");
  d.shape = parse_damping_shape(get_string(j, "shape", "PiecewiseConstant", "profile"));
  d.ramp_width = get_number_or(j, "ramp_width", 0.0, "profile");
  return d;
}

LambdaGridConfig parse_lambda_grid(const json& j) {
  require_object(j, "lambda_grid");
  reject_unknown(j, {"min", "max", "count", "spacing"}, "lambda_grid");
  LambdaGridConfig g;
  g.min = get_number_or(j, "min", g.min, "lambda_grid");
  g.max = get_number_or_auto(j, "max", "lambda_grid");
  g.count = static_cast<int>(get_integer(j, "count", g.count, "lambda_grid"));
  g.spacing = get_string(j, "spacing", g.spacing, "lambda_grid");
  return g;
}

InitialConfig parse_initial(const json& j) {
  require_object(j, "initial");
  InitialConfig init;
  init.kind = get_string(j, "kind", "", "initial");
  if (init.kind == "modal") {
    reject_unknown(j, {"kind", "index"}, "initial");
    init.index = static_cast<int>(get_integer(j, "index", 1, "initial"));
  } else if (init.kind == "random_smooth") {
    reject_unknown(j, {"kind", "seed", "cutoff"}, "initial");
    if (j.contains("seed")) init.seed = get_unsigned(j, "seed", 0, "initial");
    init.cutoff = get_number_or(j, "cutoff", init.cutoff, "initial");
  } else if (init.kind == "custom") {
    reject_unknown(j, {"kind", "state"}, "initial");
    const auto it = j.find("state");
    if (it == j.end() || !it->is_array()) {
      throw InvalidInput("custom initial data needs a 'state' array");
    }
    for (const auto& v : *it) {
      if (!v.is_number()) throw InvalidInput("custom initial state entries must be numbers");
      init.state.push_back(v.get<double>());
    }
  } else {
    throw InvalidInput("initial.kind must be modal, random_smooth or custom (got '" + init.kind +
                       "')");
  }
  return init;
}

void validate_config(const RunConfig& c) {
  validate(c.params);
  validate(c.profile, c.params.L);
  if (c.n < kMinCells) {
    throw InvalidInput("n must be >= " + std::to_string(kMinCells) + " (got " +
                       std::to_string(c.n) + ")");
  }
  if (c.bc == BoundaryCondition::DNN) {
    const Admissibility adm = check_dnn_admissible(c.params);
    if (!adm.ok) {
      std::ostringstream msg;
      msg << "DNN requires L != n*pi/l; L=" << c.params.L << " equals " << adm.nearest_n
          << "*pi/l";
      throw InvalidInput(msg.str());
    }
  }
  if (c.dt && (!(*c.dt > 0.0) || !std::isfinite(*c.dt))) {
    throw InvalidInput("dt must be > 0 or \"auto\"");
  }
  if (!(c.T > 0.0) || !std::isfinite(c.T)) throw InvalidInput("T must be > 0");
  if (c.lambda_grid.spacing != "log") {
    throw InvalidInput("lambda_grid.spacing must be \"log\"");
  }
  if (!(c.lambda_grid.min > 0.0) || !std::isfinite(c.lambda_grid.min)) {
    throw InvalidInput("lambda_grid.min must be > 0");
  }
  if (c.lambda_grid.max && !(*c.lambda_grid.max > c.lambda_grid.min)) {
    throw InvalidInput("lambda_grid.max must exceed lambda_grid.min");
  }
  if (c.lambda_grid.count < 1) throw InvalidInput("lambda_grid.count must be >= 1");
  if (c.outputs.empty()) throw InvalidInput("outputs must name a directory");
  if (c.sample_stride < 1) throw InvalidInput("sample_stride must be >= 1");
  if (c.initial.kind == "modal" && c.initial.index < 1) {
    throw InvalidInput("initial.index must be >= 1");
  }
  if (c.initial.kind == "random_smooth" &&
      !(c.initial.cutoff > 0.0 && c.initial.cutoff <= 1.0)) {
    throw InvalidInput("initial.cutoff must lie in (0, 1]");
  }
}

json to_json(const RunConfig& c, bool with_outputs) {
  json j;
  j["params"] = {{"rho1", c.params.rho1},     {"rho2", c.params.rho2}, {"kappa", c.params.kappa},
                 {"kappa0", c.params.kappa0}, {"b", c.params.b},       {"l", c.params.l},
                 {"L", c.params.L}};
  j["profile"] = {{"alpha", c.profile.alpha},
                  {"beta", c.profile.beta},
                  {"a0", c.profile.a0},
                  {"shape", std::string(to_string(c.profile.shape))},
                  {"ramp_width", c.profile.ramp_width}};
  j["bc"] = std::string(to_string(c.bc));
  j["n"] = c.n;
  j["dt"] = c.dt ? json(*c.dt) : json("auto");
  j["T"] = c.T;
  j["seed"] = c.seed;
  j["lambda_grid"] = {{"min", c.lambda_grid.min},
                      {"max", c.lambda_grid.max ? json(*c.lambda_grid.max) : json("auto")},
                      {"count", c.lambda_grid.count},
                      {"spacing", c.lambda_grid.spacing}};
  json init = {{"kind", c.initial.kind}};
  if (c.initial.kind == "modal") {
    init["index"] = c.initial.index;
  } else if (c.initial.kind == "random_smooth") {
    init["cutoff"] = c.initial.cutoff;
    if (c.initial.seed) init["seed"] = *c.initial.seed;
  } else {
    init["state"] = c.initial.state;
  }
  j["initial"] = init;
  j["sample_stride"] = c.sample_stride;
  if (with_outputs) {
    j["outputs"] = c.outputs;
    j["config_id"] = c.config_id;
  }
  return j;
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

RunConfig parse_config_json(const json& j) {
  require_object(j, "configuration");
  reject_unknown(j, kTopKeys, "configuration");
  RunConfig c;
  if (!j.contains("params")) throw InvalidInput("missing key 'params'");
  c.params = parse_params(j.at("params"));
  if (j.contains("profile")) c.profile = parse_profile(j.at("profile"));
  if (!j.contains("bc")) throw InvalidInput("missing key 'bc'");
  c.bc = parse_boundary_condition(get_string(j, "bc", "", "configuration"));
  if (!j.contains("n")) throw InvalidInput("missing key 'n'");
  c.n = static_cast<int>(get_integer(j, "n", 0, "configuration"));
  c.dt = get_number_or_auto(j, "dt", "configuration");
  c.T = get_number_or(j, "T", c.T, "configuration");
  c.seed = get_unsigned(j, "seed", 0, "configuration");
  if (j.contains("lambda_grid")) c.lambda_grid = parse_lambda_grid(j.at("lambda_grid"));
  c.outputs = get_string(j, "outputs", c.outputs, "configuration");
  if (j.contains("initial")) c.initial = parse_initial(j.at("initial"));
  c.sample_stride = static_cast<int>(get_integer(j, "sample_stride", 1, "configuration"));
  validate_config(c);
  c.config_id = compute_config_id(c);
  if (j.contains("config_id")) {
    const std::string given = get_string(j, "config_id", "", "configuration");
    if (given != c.config_id) {
      throw InvalidInput("config_id '" + given + "' does not match the content hash " +
                         c.config_id);
    }
  }
  return c;
}

RunConfig parse_config(std::string_view json_text) {
  return parse_config_json(parse_json_text(json_text, "configuration"));
}

RunConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_text_file(path));
}

std::string serialize_config(const RunConfig& config) {
  return to_json(config, true).dump(2) + "\n";
}

std::string compute_config_id(const RunConfig& config) {
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0')
      << fnv1a64(to_json(config, false).dump());
  return hex.str();
}

json config_to_json(const RunConfig& config) {
  json j = to_json(config, false);
  j["config_id"] = config.config_id;
  return j;
}

InitialData initial_data(const RunConfig& config) {
  const InitialConfig& init = config.initial;
  if (init.kind == "modal") return ModalInit{init.index};
  if (init.kind == "custom") {
    return CustomInit{Eigen::Map<const Eigen::VectorXd>(init.state.data(),
                                                        static_cast<Eigen::Index>(init.state.size()))};
  }
  return RandomSmoothInit{init.seed.value_or(config.seed), init.cutoff};
}

double resolve_time_step(const RunConfig& config, const DiscreteSystem& sys) {
  return config.dt.value_or(default_time_step(sys));
}

SpectrumOptions spectrum_options(const RunConfig& config, int threads) {
  SpectrumOptions opt;
  opt.lambda_min = config.lambda_grid.min;
  opt.lambda_max = config.lambda_grid.max;
  opt.count = config.lambda_grid.count;
  opt.threads = threads;
  return opt;
}

json parse_json_text(std::string_view text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(what + " is not valid JSON: " + e.what());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_energy_csv(std::ostream& out, const EnergyTimeSeries& s) {
  out << "t,energy,dissipation\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    out << format_double(s.times[i]) << ',' << format_double(s.energy[i]) << ','
        << format_double(s.dissipation[i]) << '\n';
  }
}

void write_eigenvalues_csv(std::ostream& out, const std::vector<Complex>& eigs) {
  out << "re,im\n";
  for (const auto& z : eigs) {
    out << format_double(z.real()) << ',' << format_double(z.imag()) << '\n';
  }
}

void write_resolvent_csv(std::ostream& out, const std::vector<AxisSample>& samples) {
  out << "lambda,resolvent_norm\n";
  for (const auto& s : samples) {
    out << format_double(s.lambda) << ',' << format_double(s.r) << '\n';
  }
}

void write_matrix_market(std::ostream& out, const Eigen::MatrixXd& m, bool symmetric) {
  std::vector<std::tuple<Eigen::Index, Eigen::Index, double>> entries;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = symmetric ? j : 0; i < m.rows(); ++i) {
      if (m(i, j) != 0.0) entries.emplace_back(i, j, m(i, j));
    }
  }
  out << "%%MatrixMarket matrix coordinate real " << (symmetric ? "symmetric" : "general")
      << '\n'
      << m.rows() << ' ' << m.cols() << ' ' << entries.size() << '\n';
  for (const auto& [i, j, v] : entries) {
    out << i + 1 << ' ' << j + 1 << ' ' << format_double(v) << '\n';
  }
}

}  // namespace bresse
