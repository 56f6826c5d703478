#include "app/run_config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <set>
#include <sstream>
#include <string_view>
#include <type_traits>

namespace radtrans::app {

namespace {

struct Settings {
  std::string mode = "grey";
  bool diffusion = false;
  double R = 0.4;
  double H = 0.3;
  long n = 64;
  double L = 1.0;
  std::array<double, 5> kappa{0.5, 0.0, 0.0, 0.0, 0.0};
  double albedo = 0.0;
  double nu_min = 0.01;
  double nu_max = 15.0;
  long n_nu = 100;
  std::string moments = "published";
  double Q0 = 5.74e-5;
  double T_s = 1.209;
  double T0 = 0.01;
  std::optional<double> T_max;
  long max_iters = 50;
  double tol = 1e-4;
  long n_theta = 60;
  std::optional<double> r_cut;
  std::string origin = "cutoff";
  bool circular_fft = false;
  bool lagged_inversion = false;
  double kappa_T = 0.01 * kSigma;
  double T_E = 0.06;
  long max_picard = 50;
  double picard_tol = 1e-8;
  std::string outer_bc = "neumann";
  std::string linearization = "lagged";
  bool code_heat_variant = false;
  long polar_n_r = 36;
  long polar_n_theta = 120;
  std::string out = "radtrans_out";
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_real(std::string_view text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw std::invalid_argument("expected a finite number");
  }
  return value;
}

long parse_count(std::string_view text) {
  long value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || value < 0) {
    throw std::invalid_argument("expected a nonnegative integer");
  }
  return value;
}

bool parse_switch(std::string_view text) {
  if (text == "on" || text == "true" || text == "yes" || text == "1") return true;
  if (text == "off" || text == "false" || text == "no" || text == "0") return false;
  throw std::invalid_argument("expected on or off");
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

using Setter = std::function<void(Settings&, std::string_view)>;

struct Key {
  std::string name;
  Setter set;
  std::function<std::string(const Settings&)> show;
};

template <typename T>
Key real_key(std::string name, T Settings::*field) {
  return {std::move(name), [field](Settings& s, std::string_view v) { s.*field = parse_real(v); },
          [field](const Settings& s) {
            if constexpr (std::is_same_v<T, std::optional<double>>) {
              return (s.*field) ? format_real(*(s.*field)) : std::string("auto");
            } else {
              return format_real(s.*field);
            }
          }};
}

Key count_key(std::string name, long Settings::*field) {
  return {std::move(name), [field](Settings& s, std::string_view v) { s.*field = parse_count(v); },
          [field](const Settings& s) { return std::to_string(s.*field); }};
}

Key switch_key(std::string name, bool Settings::*field) {
  return {std::move(name),
          [field](Settings& s, std::string_view v) { s.*field = parse_switch(v); },
          [field](const Settings& s) { return std::string(s.*field ? "on" : "off"); }};
}

Key choice_key(std::string name, std::string Settings::*field,
               std::initializer_list<std::string_view> allowed) {
  std::vector<std::string_view> options(allowed);
  return {std::move(name),
          [field, options](Settings& s, std::string_view v) {
            for (auto a : options) {
              if (v == a) {
                s.*field = std::string(v);
                return;
              }
            }
            std::string msg = "expected one of";
            for (auto a : options) msg += " " + std::string(a);
            throw std::invalid_argument(msg);
          },
          [field](const Settings& s) { return s.*field; }};
}

Key kappa_key(std::size_t k) {
  return {"kappa" + std::to_string(k),
          [k](Settings& s, std::string_view v) { s.kappa[k] = parse_real(v); },
          [k](const Settings& s) { return format_real(s.kappa[k]); }};
}

const std::vector<Key>& key_table() {
  static const std::vector<Key> table = [] {
    std::vector<Key> t;
    t.push_back(choice_key("mode", &Settings::mode, {"grey", "spectral"}));
    t.push_back(switch_key("diffusion", &Settings::diffusion));
    t.push_back(real_key("R", &Settings::R));
    t.push_back(real_key("H", &Settings::H));
    t.push_back(count_key("n", &Settings::n));
    t.push_back(real_key("L", &Settings::L));
    for (std::size_t k = 0; k < 5; ++k) t.push_back(kappa_key(k));
    t.push_back(real_key("albedo", &Settings::albedo));
    t.push_back(real_key("nu_min", &Settings::nu_min));
    t.push_back(real_key("nu_max", &Settings::nu_max));
    t.push_back(count_key("n_nu", &Settings::n_nu));
    t.push_back(choice_key("moments", &Settings::moments, {"published", "exact"}));
    t.push_back(real_key("Q0", &Settings::Q0));
    t.push_back(real_key("T_s", &Settings::T_s));
    t.push_back(real_key("T0", &Settings::T0));
    t.push_back(real_key("T_max", &Settings::T_max));
    t.push_back(count_key("max_iters", &Settings::max_iters));
    t.push_back(real_key("tol", &Settings::tol));
    t.push_back(count_key("n_theta", &Settings::n_theta));
    t.push_back(real_key("r_cut", &Settings::r_cut));
    t.push_back(choice_key("origin", &Settings::origin, {"cutoff", "cell-average"}));
    t.push_back(switch_key("circular_fft", &Settings::circular_fft));
    t.push_back(switch_key("lagged_inversion", &Settings::lagged_inversion));
    t.push_back(real_key("kappa_T", &Settings::kappa_T));
    t.push_back(real_key("T_E", &Settings::T_E));
    t.push_back(count_key("max_picard", &Settings::max_picard));
    t.push_back(real_key("picard_tol", &Settings::picard_tol));
    t.push_back(choice_key("outer_bc", &Settings::outer_bc, {"neumann", "dirichlet"}));
    t.push_back(choice_key("linearization", &Settings::linearization, {"lagged", "newton"}));
    t.push_back(switch_key("code_heat_variant", &Settings::code_heat_variant));
    t.push_back(count_key("polar_n_r", &Settings::polar_n_r));
    t.push_back(count_key("polar_n_theta", &Settings::polar_n_theta));
    t.push_back({"out", [](Settings& s, std::string_view v) { s.out = std::string(v); },
                 [](const Settings& s) { return s.out; }});
    return t;
  }();
  return table;
}

RunConfig build(const Settings& s, const std::string& origin) {
  auto fail = [&](const std::exception& e) -> ConfigError {
    return ConfigError(origin + ": " + e.what());
  };
  try {
    if (s.max_iters > 1000000) throw std::invalid_argument("max_iters is unreasonably large");
    std::vector<double> coeffs(s.kappa.begin(), s.kappa.end());
    while (coeffs.size() > 1 && coeffs.back() == 0.0) coeffs.pop_back();
    if (s.n_nu < 2) throw std::invalid_argument("n_nu must be at least 2");
    if (!(s.T_s > 0.0)) throw std::invalid_argument("T_s must be positive");

    RunConfig cfg{
        ProblemConfig{
            AnnulusDomain(s.R, s.H),
            CartesianGrid(static_cast<std::size_t>(s.n), s.L),
            SpectralModel(coeffs, s.albedo, s.nu_min, s.nu_max, static_cast<std::size_t>(s.n_nu),
                          s.moments == "exact" ? MomentConstants::kExact
                                               : MomentConstants::kPublished),
            BoundaryIllumination{s.Q0, RescaledTemperature(s.T_s)},
            s.T0,
            RescaledTemperature(s.T_max.value_or(s.T_s)),
            static_cast<int>(s.max_iters),
            s.tol,
            SolverOptions{},
        },
        s.mode == "spectral" ? Mode::kSpectral : Mode::kGrey,
        std::nullopt,
        s.out,
        {},
    };
    auto& opt = cfg.problem.options;
    opt.n_theta = static_cast<std::size_t>(s.n_theta);
    opt.r_cut = s.r_cut;
    opt.origin = s.origin == "cell-average" ? OriginTreatment::kCellAverage : OriginTreatment::kCutoff;
    opt.layout = s.circular_fft ? ConvolutionLayout::kCircular : ConvolutionLayout::kLinear;
    opt.inversion = s.lagged_inversion ? InversionScheme::kLagged : InversionScheme::kNewton;
    opt.polar_radial = static_cast<std::size_t>(s.polar_n_r);
    opt.polar_angular = static_cast<std::size_t>(s.polar_n_theta);

    if (s.diffusion) {
      DiffusionConfig d;
      d.kappa_T = s.kappa_T;
      d.T_E = s.T_E;
      d.max_picard = static_cast<int>(std::min(s.max_picard, 1000000L));
      d.picard_tol = s.picard_tol;
      d.outer = s.outer_bc == "dirichlet" ? OuterBoundary::kDirichlet : OuterBoundary::kNeumann;
      d.linearization =
          s.linearization == "newton" ? Linearization::kNewton : Linearization::kLagged;
      d.relaxation_variant = s.code_heat_variant;
      d.validate();
      PolarGrid check(cfg.problem.domain, opt.polar_radial, opt.polar_angular);
      cfg.diffusion = d;
    }
    if (cfg.mode == Mode::kGrey && !cfg.problem.model.is_grey()) {
      throw std::invalid_argument("mode = grey needs kappa1 .. kappa4 = 0");
    }
    cfg.problem.validate();
    for (const auto& key : key_table()) cfg.effective.emplace_back(key.name, key.show(s));
    return cfg;
  } catch (const std::invalid_argument& e) {
    throw fail(e);
  } catch (const std::domain_error& e) {
    throw fail(e);
  }
}

}  // namespace

const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& k : key_table()) out.push_back(k.name);
    return out;
  }();
  return names;
}

RunConfig parse_run_config(std::istream& in, const std::string& origin) {
  Settings s;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text(line);
    if (const auto hash = text.find('#'); hash != std::string_view::npos) {
      text = text.substr(0, hash);
    }
    text = trim(text);
    if (text.empty()) continue;
    const std::string where = origin + ":" + std::to_string(line_no);
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(where + ": expected 'key = value', got '" + std::string(text) + "'");
    }
    const std::string key(trim(text.substr(0, eq)));
    const std::string_view value = trim(text.substr(eq + 1));
    const auto& table = key_table();
    const auto it = std::find_if(table.begin(), table.end(),
                                 [&](const Key& k) { return k.name == key; });
    if (it == table.end()) throw ConfigError(where + ": unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError(where + ": key '" + key + "' given twice");
    if (value.empty()) throw ConfigError(where + ": key '" + key + "' has no value");
    try {
      it->set(s, value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + ": invalid value '" + std::string(value) + "' for key '" + key +
                        "': " + e.what());
    }
  }
  return build(s, origin);
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_run_config(in, path.filename().string());
}

}  // namespace radtrans::app
