#include "omit/config.hpp"

#include "omit/errors.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace omit {
namespace {

struct Unit {
  std::string_view suffix;
  double factor;
};

constexpr Unit kHz{"_hz", constants::two_pi};
constexpr Unit kRadS{"_rad_s", 1.0};
constexpr Unit kNone{"", 1.0};
constexpr Unit kRad{"_rad", 1.0};

struct Quantity {
  std::string_view name;
  std::string_view slot;  // quantities sharing a slot replace each other
  std::array<Unit, 2> units;
};

constexpr Quantity kQuantities[] = {
    {"wavelength", "wavelength", {Unit{"_nm", 1e-9}, Unit{"_m", 1.0}}},
    {"cavity_length", "cavity_length", {Unit{"_mm", 1e-3}, Unit{"_m", 1.0}}},
    {"omega_m1", "omega_m1", {kHz, kRadS}},
    {"omega_m2", "omega_m2", {kHz, kRadS}},
    {"mass1", "mass1", {Unit{"_ng", 1e-12}, Unit{"_kg", 1.0}}},
    {"mass2", "mass2", {Unit{"_ng", 1e-12}, Unit{"_kg", 1.0}}},
    {"quality_factor", "quality_factor", {kNone, kNone}},
    {"gamma1", "gamma1", {kHz, kRadS}},
    {"gamma2", "gamma2", {kHz, kRadS}},
    {"kappa", "kappa", {kHz, kRadS}},
    {"eta_c", "eta_c", {kNone, kNone}},
    {"g", "g", {kHz, kRadS}},
    {"lambda", "lambda", {kHz, kRadS}},
    {"coulomb_r0", "coulomb_r0", {Unit{"_mm", 1e-3}, Unit{"_m", 1.0}}},
    {"coulomb_c1", "coulomb_c1", {Unit{"_nf", 1e-9}, Unit{"_f", 1.0}}},
    {"coulomb_c2", "coulomb_c2", {Unit{"_nf", 1e-9}, Unit{"_f", 1.0}}},
    {"coulomb_v1", "coulomb_v1", {Unit{"_v", 1.0}, Unit{"_v", 1.0}}},
    {"coulomb_v2", "coulomb_v2", {Unit{"_v", 1.0}, Unit{"_v", 1.0}}},
    {"pump_power", "pump_power", {Unit{"_mw", 1e-3}, Unit{"_w", 1.0}}},
    {"delta_c", "delta_c", {kHz, kRadS}},
    {"eps_p_ratio", "eps_p_ratio", {kNone, kNone}},
    {"eps1_ratio", "eps1_ratio", {kNone, kNone}},
    {"eps2_ratio", "eps2_ratio", {kNone, kNone}},
    {"delta_p_ratio", "delta_p_ratio", {kNone, kNone}},
    {"phi_l", "phi_l", {kRad, kRad}},
    {"phi_p", "phi_p", {kRad, kRad}},
    {"phi1", "phi1", {kRad, kRad}},
    {"phi2", "phi2", {kRad, kRad}},
    {"mixing_phase1", "phi1", {kRad, kRad}},
    {"mixing_phase2", "phi2", {kRad, kRad}},
};

constexpr std::string_view kSwitches[] = {"pump-convention", "lambda-is-angular", "detuning-mode",
                                          "branch-policy"};

struct KeyMatch {
  const Quantity* q = nullptr;
  Unit unit{};
};

std::optional<KeyMatch> match_key(std::string_view key) {
  for (const Quantity& q : kQuantities) {
    if (key.substr(0, q.name.size()) != q.name) continue;
    const std::string_view rest = key.substr(q.name.size());
    for (const Unit& u : q.units) {
      if (rest == u.suffix) return KeyMatch{&q, u};
    }
  }
  return std::nullopt;
}

bool is_switch(std::string_view key) {
  return std::find(std::begin(kSwitches), std::end(kSwitches), key) != std::end(kSwitches);
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(std::string_view key, std::string_view v) {
  double out = 0.0;
  std::string_view s = v;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty() || !std::isfinite(out)) {
    throw ConfigError(std::string(key) + ": not a finite number: '" + std::string(v) + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(std::string(key) + ": expected true/false, got '" + std::string(v) + "'");
}

void validate_switch(std::string_view key, std::string_view v) {
  auto bad = [&](std::string_view allowed) {
    throw ConfigError(std::string(key) + ": '" + std::string(v) + "' is not one of " + std::string(allowed));
  };
  if (key == "pump-convention") {
    if (v != "2kappa" && v != "eta-kappa") bad("{2kappa, eta-kappa}");
  } else if (key == "detuning-mode") {
    if (v != "red-sideband" && v != "fixed-delta-c") bad("{red-sideband, fixed-delta-c}");
  } else if (key == "branch-policy") {
    if (v != "adiabatic-lower" && v != "middle" && v != "upper") bad("{adiabatic-lower, middle, upper}");
  } else if (key == "lambda-is-angular") {
    parse_bool(key, v);
  }
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

bool is_numeric_config_key(std::string_view key) { return match_key(key).has_value(); }

std::vector<std::string> config_quantities() {
  std::vector<std::string> out;
  for (const Quantity& q : kQuantities) out.emplace_back(q.name);
  return out;
}

Config Config::parse(std::string_view text, std::string_view origin) {
  Config cfg;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(std::string(origin) + ":" + std::to_string(line_no) + ": expected key = value");
    }
    try {
      cfg.set(std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))));
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(origin) + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read config file " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse(ss.str(), path);
}

Config Config::paper_defaults() { return parse(paper_params_text(), "paper-params"); }

void Config::set(const std::string& key, const std::string& value) {
  std::string_view slot;
  if (is_switch(key)) {
    validate_switch(key, value);
    slot = key;
  } else if (const auto m = match_key(key)) {
    parse_number(key, value);
    slot = m->q->slot;
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
  for (ConfigEntry& e : entries_) {
    const std::string_view existing = is_switch(e.key) ? std::string_view(e.key) : match_key(e.key)->q->slot;
    if (existing == slot) {
      e = {key, value};
      return;
    }
  }
  entries_.push_back({key, value});
}

void Config::set_assignment(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + assignment + "'");
  set(std::string(trim(std::string_view(assignment).substr(0, eq))),
      std::string(trim(std::string_view(assignment).substr(eq + 1))));
}

bool Config::has(std::string_view key) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const ConfigEntry& e) { return e.key == key; });
}

bool Config::lambda_is_angular() const {
  for (const ConfigEntry& e : entries_) {
    if (e.key == "lambda-is-angular") return parse_bool(e.key, e.value);
  }
  return false;
}

std::optional<double> Config::si_value(std::string_view quantity) const {
  for (const ConfigEntry& e : entries_) {
    if (is_switch(e.key)) continue;
    const KeyMatch m = *match_key(e.key);
    if (m.q->name != quantity) continue;
    double factor = m.unit.factor;
    // With lambda-is-angular the number under lambda_hz is already rad/s.
    if (quantity == "lambda" && m.unit.suffix == "_hz" && lambda_is_angular()) factor = 1.0;
    return parse_number(e.key, e.value) * factor;
  }
  return std::nullopt;
}

std::string Config::emit() const {
  std::string out;
  for (const ConfigEntry& e : entries_) {
    out += e.key;
    out += " = ";
    out += is_switch(e.key) ? e.value : format_number(parse_number(e.key, e.value));
    out += '\n';
  }
  return out;
}

RawInputs Config::raw_inputs() const {
  auto required = [&](std::string_view q, std::string_view hint) {
    const auto v = si_value(q);
    if (!v) throw ConfigError("missing required key " + std::string(hint));
    return *v;
  };
  RawInputs raw;
  raw.wavelength = required("wavelength", "wavelength_nm");
  raw.cavity_length = required("cavity_length", "cavity_length_mm");
  raw.omega_m = {required("omega_m1", "omega_m1_hz"), required("omega_m2", "omega_m2_hz")};
  raw.mass = {required("mass1", "mass1_ng"), required("mass2", "mass2_ng")};
  raw.kappa = required("kappa", "kappa_hz");
  raw.quality_factor = si_value("quality_factor");
  const auto g1 = si_value("gamma1"), g2 = si_value("gamma2");
  if (g1.has_value() != g2.has_value()) throw ConfigError("gamma1/gamma2: give both or neither");
  if (g1) raw.gamma = std::array<double, 2>{*g1, *g2};
  if (const auto v = si_value("eta_c")) raw.eta_c = *v;
  raw.lambda = si_value("lambda");
  raw.g_override = si_value("g");

  const char* coulomb_keys[] = {"coulomb_r0", "coulomb_c1", "coulomb_c2", "coulomb_v1", "coulomb_v2"};
  int present = 0;
  for (const char* k : coulomb_keys) present += si_value(k).has_value();
  if (present > 0) {
    for (const char* k : coulomb_keys) {
      if (!si_value(k)) throw ConfigError(std::string(k) + ": Coulomb route needs r0, c1, c2, v1 and v2");
    }
    CoulombParams cp;
    cp.r0 = *si_value("coulomb_r0");
    cp.capacitance = {*si_value("coulomb_c1"), *si_value("coulomb_c2")};
    cp.voltage = {*si_value("coulomb_v1"), *si_value("coulomb_v2")};
    raw.coulomb = cp;
  }
  return raw;
}

DriveSettings Config::drive_settings() const {
  DriveSettings ds;
  if (const auto v = si_value("pump_power")) ds.pump_power = *v;
  if (const auto v = si_value("delta_c")) ds.delta_c = *v;
  if (const auto v = si_value("eps_p_ratio")) ds.eps_p_ratio = *v;
  if (const auto v = si_value("eps1_ratio")) ds.eps_ratio[0] = *v;
  if (const auto v = si_value("eps2_ratio")) ds.eps_ratio[1] = *v;
  if (const auto v = si_value("delta_p_ratio")) ds.delta_p_ratio = *v;
  if (const auto v = si_value("phi_l")) ds.phi_l = *v;
  if (const auto v = si_value("phi_p")) ds.phi_p = *v;
  if (const auto v = si_value("phi1")) ds.phi[0] = *v;
  if (const auto v = si_value("phi2")) ds.phi[1] = *v;
  // Phi_i = phi_i + phi_l - phi_p
  if (const auto v = si_value("mixing_phase1")) ds.phi[0] = *v - ds.phi_l + ds.phi_p;
  if (const auto v = si_value("mixing_phase2")) ds.phi[1] = *v - ds.phi_l + ds.phi_p;
  if (ds.pump_power < 0.0 || ds.eps_p_ratio < 0.0 || ds.eps_ratio[0] < 0.0 || ds.eps_ratio[1] < 0.0) {
    throw ConfigError("pump_power and drive ratios must be non-negative");
  }
  for (const ConfigEntry& e : entries_) {
    if (e.key == "pump-convention") {
      ds.convention = e.value == "eta-kappa" ? PumpConvention::eta_kappa : PumpConvention::two_kappa;
    } else if (e.key == "detuning-mode") {
      ds.detuning_mode = e.value == "fixed-delta-c" ? DetuningMode::fixed_delta_c : DetuningMode::red_sideband;
    } else if (e.key == "branch-policy") {
      ds.branch = e.value == "middle"  ? BranchPolicy::middle
                  : e.value == "upper" ? BranchPolicy::upper
                                       : BranchPolicy::adiabatic_lower;
    }
  }
  return ds;
}

nlohmann::json Config::resolved_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const ConfigEntry& e : entries_) {
    if (is_switch(e.key)) {
      j[e.key] = e.value;
      continue;
    }
    const KeyMatch m = *match_key(e.key);
    const std::string_view unit = m.unit.suffix == "_hz" ? "_rad_s" : m.unit.suffix;
    std::string si_key(m.q->name);
    if (unit == "_nm" || unit == "_mm") si_key += "_m";
    else if (unit == "_ng") si_key += "_kg";
    else if (unit == "_mw") si_key += "_w";
    else if (unit == "_nf") si_key += "_f";
    else si_key += unit;
    j[si_key] = *si_value(m.q->name);
  }
  return j;
}

}  // namespace omit
