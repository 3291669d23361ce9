#include "omit/scan.hpp"

#include "omit/errors.hpp"
#include "omit/params.hpp"
#include "omit/sideband.hpp"
#include "omit/stability.hpp"
#include "omit/steady_state.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <ctime>
#include <fstream>
#include <limits>
#include <thread>

namespace omit {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct KindInfo {
  ScanKind kind;
  std::string_view name;
};

constexpr KindInfo kKinds[] = {
    {ScanKind::spectrum, "spectrum"},           {ScanKind::amplitude, "amplitude"},
    {ScanKind::phase_map, "phase-map"},         {ScanKind::delay_vs_power, "delay-vs-power"},
    {ScanKind::sideband2, "sideband2"},         {ScanKind::bistability, "bistability"},
    {ScanKind::stability_map, "stability-map"}, {ScanKind::coulomb, "coulomb"},
};

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string column_for_axis(const std::string& key) { return key == "pump_power_mw" ? "P_L_mW" : key; }

std::vector<std::string> value_columns(ScanKind kind) {
  switch (kind) {
    case ScanKind::spectrum:
    case ScanKind::amplitude:
    case ScanKind::phase_map:
      return {"t2", "arg_t", "eta", "delta_eff_rad_s", "closed_form_rel_diff"};
    case ScanKind::delay_vs_power: return {"tau_g_us", "tau_g_err_us", "tau_g_analytic_us", "t2"};
    case ScanKind::sideband2: return {"eta", "eta_pct", "t2", "closed_form2_rel_diff"};
    case ScanKind::bistability: return {"x_lower", "x_middle", "x_upper", "n_roots", "n_stable", "fold"};
    case ScanKind::stability_map:
      return {"n_roots", "stable", "max_re_eig_over_kappa", "rh_stable", "agreement", "printed_stable"};
    case ScanKind::coulomb: return {"lambda_rad_s", "lambda_over_kappa"};
  }
  return {};
}

struct PointOutcome {
  std::vector<double> values;
  std::string status = "ok";
};

std::string status_for(const NumericalError& e) {
  switch (e.kind()) {
    case NumericalError::Kind::singular: return "singular";
    case NumericalError::Kind::branch_unavailable: return "no-branch";
    case NumericalError::Kind::nonfinite:
    case NumericalError::Kind::inconsistent:
    case NumericalError::Kind::no_convergence: return "nonfinite";
  }
  return "nonfinite";
}

struct Model {
  SystemParams sp;
  DriveSettings ds;
  DriveConfig dc;
};

Model build_model(const Config& cfg) {
  Model m;
  m.sp = derive_params(cfg.raw_inputs()).params;
  m.ds = cfg.drive_settings();
  m.dc = resolve_drive(m.sp, m.ds);
  return m;
}

bool eigen_stable(const SystemParams& sp, const SteadyState& ss) {
  return eigen_max_real(fluctuation_matrix(sp, ss)) < 0.0;
}

PointOutcome evaluate(ScanKind kind, const Config& cfg) {
  PointOutcome out;
  const std::size_t ncol = value_columns(kind).size();
  out.values.assign(ncol, kNaN);
  try {
    if (kind == ScanKind::coulomb) {
      const RawInputs raw = cfg.raw_inputs();
      if (!raw.coulomb) throw ConfigError("coulomb scan needs coulomb_r0, coulomb_c1/c2 and coulomb_v1/v2");
      RawInputs direct = raw;
      direct.lambda.reset();
      const SystemParams sp = derive_params(direct).params;
      out.values = {sp.lambda, sp.lambda / sp.kappa};
      return out;
    }

    Model m = build_model(cfg);
    if (kind == ScanKind::bistability) {
      if (m.ds.detuning_mode == DetuningMode::red_sideband) {
        m.ds.detuning_mode = DetuningMode::fixed_delta_c;
        m.ds.delta_c = m.sp.omega_m[0];
        m.dc = resolve_drive(m.sp, m.ds);
      }
      const PhotonBranches br = photon_number_branches(cubic_coeffs(m.sp, m.dc));
      const auto& x = br.x;
      int n_stable = 0;
      for (double xi : x) n_stable += eigen_stable(m.sp, steady_state_at(m.sp, m.dc, xi));
      out.values[0] = x.front();
      if (x.size() == 3) out.values[1] = x[1];
      if (x.size() >= 2) out.values[2] = x.back();
      out.values[3] = static_cast<double>(x.size());
      out.values[4] = n_stable;
      out.values[5] = br.fold ? 1.0 : 0.0;
      return out;
    }

    const SteadyState ss = solve_steady(m.sp, m.dc, m.ds.branch);
    if (kind == ScanKind::stability_map) {
      const PhotonBranches br = photon_number_branches(cubic_coeffs(m.sp, m.dc));
      const StabilityReport r = analyze_stability(m.sp, ss);
      out.values = {static_cast<double>(br.x.size()), r.stable ? 1.0 : 0.0, r.max_re_eig / m.sp.kappa,
                    r.rh_stable ? 1.0 : 0.0, r.method_agreement ? 1.0 : 0.0, r.printed_stable ? 1.0 : 0.0};
      return out;
    }

    const bool stable = eigen_stable(m.sp, ss);
    switch (kind) {
      case ScanKind::spectrum:
      case ScanKind::amplitude:
      case ScanKind::phase_map: {
        const SidebandSolution sol = solve_sidebands(m.sp, ss, m.dc);
        out.values = {std::norm(sol.transmission_t), std::arg(sol.transmission_t), sol.efficiency_eta,
                      ss.delta_eff, sol.first.closed_discrepancy};
        break;
      }
      case ScanKind::delay_vs_power: {
        const GroupDelay gd = group_delay(m.sp, ss, m.dc);
        const FirstOrderBlock f = solve_first_order(m.sp, ss, m.dc);
        out.values = {gd.tau * 1e6, gd.error * 1e6, gd.tau_analytic * 1e6, transmission(m.sp, m.dc, f)};
        break;
      }
      case ScanKind::sideband2: {
        const SidebandSolution sol = solve_sidebands(m.sp, ss, m.dc);
        out.values = {sol.efficiency_eta, 100.0 * sol.efficiency_eta, std::norm(sol.transmission_t),
                      sol.second.closed_discrepancy};
        break;
      }
      default: break;
    }
    for (double v : out.values) {
      if (!std::isfinite(v) && v == v) throw NumericalError(NumericalError::Kind::nonfinite, "non-finite output");
    }
    if (!stable) out.status = "unstable-branch";
  } catch (const NumericalError& e) {
    out.values.assign(ncol, kNaN);
    out.status = status_for(e);
  }
  return out;
}

nlohmann::json axis_json(const Axis& a) {
  return {{"key", a.key}, {"start", a.start}, {"stop", a.stop}, {"count", a.count}, {"scale", a.log ? "log" : "linear"}};
}

nlohmann::json build_metadata(const ScanSpec& spec, const std::vector<Axis>& axes) {
  nlohmann::json md;
  md["tool"] = "omit-lab";
  md["version"] = std::string(tool_version);
  md["scan_kind"] = std::string(to_string(spec.kind));
  auto& ax = md["axes"] = nlohmann::json::array();
  for (const Axis& a : axes) ax.push_back(axis_json(a));
  md["config"] = spec.config.resolved_json();
  md["config_text"] = spec.config.emit();
  const DriveSettings ds = spec.config.drive_settings();
  md["eps_p_over_eps_l"] = ds.eps_p_ratio;
  md["pump_convention"] = ds.convention == PumpConvention::two_kappa ? "2kappa" : "eta-kappa";
  md["lambda_is_angular"] = spec.config.lambda_is_angular();
  try {
    const DerivedParams dp = derive_params(spec.config.raw_inputs());
    const DriveConfig dc = resolve_drive(dp.params, ds);
    md["derived"] = {{"g_rad_s", dp.params.g},           {"gamma1_rad_s", dp.params.gamma[0]},
                     {"gamma2_rad_s", dp.params.gamma[1]}, {"lambda_rad_s", dp.params.lambda},
                     {"eps_l", dc.eps_l},                  {"delta_c_rad_s", dc.delta_c},
                     {"xi_rad_s", dc.xi}};
    md["warnings"] = dp.warnings;
  } catch (const NumericalError&) {
    md["derived"] = nullptr;
  }
  if (spec.point) md["point"] = {(*spec.point)[0], (*spec.point)[1]};
  return md;
}

}  // namespace

std::string_view to_string(ScanKind k) {
  for (const KindInfo& ki : kKinds)
    if (ki.kind == k) return ki.name;
  return "unknown";
}

ScanKind parse_scan_kind(std::string_view name) {
  for (const KindInfo& ki : kKinds)
    if (ki.name == name) return ki.kind;
  throw ConfigError("unknown scan kind '" + std::string(name) + "'");
}

std::vector<std::string_view> scan_kind_names() {
  std::vector<std::string_view> out;
  for (const KindInfo& ki : kKinds) out.push_back(ki.name);
  return out;
}

double Axis::value(int i) const {
  const double f = static_cast<double>(i) / static_cast<double>(count - 1);
  if (i == count - 1) return stop;
  if (log) return start * std::pow(stop / start, f);
  return start + (stop - start) * f;
}

Axis parse_axis(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) throw ConfigError("axis: expected key=start:stop:count[:log]");
  Axis a;
  a.key = std::string(text.substr(0, eq));
  if (!is_numeric_config_key(a.key)) throw ConfigError("axis: '" + a.key + "' is not a numeric config key");
  std::vector<std::string_view> parts;
  std::string_view rest = text.substr(eq + 1);
  while (true) {
    const auto c = rest.find(':');
    parts.push_back(rest.substr(0, c));
    if (c == std::string_view::npos) break;
    rest = rest.substr(c + 1);
  }
  if (parts.size() != 3 && parts.size() != 4) throw ConfigError("axis " + a.key + ": expected start:stop:count[:log]");
  auto num = [&](std::string_view s, const char* what) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty() || !std::isfinite(v)) {
      throw ConfigError("axis " + a.key + ": bad " + what + " '" + std::string(s) + "'");
    }
    return v;
  };
  a.start = num(parts[0], "start");
  a.stop = num(parts[1], "stop");
  const double cnt = num(parts[2], "count");
  if (cnt != std::floor(cnt) || cnt < 2 || cnt > static_cast<double>(max_scan_points)) {
    throw ConfigError("axis " + a.key + ": count must be an integer >= 2");
  }
  a.count = static_cast<int>(cnt);
  if (parts.size() == 4) {
    if (parts[3] == "log") a.log = true;
    else if (parts[3] != "linear") throw ConfigError("axis " + a.key + ": scale must be linear or log");
  }
  if (a.log && (a.start <= 0.0 || a.stop <= 0.0)) throw ConfigError("axis " + a.key + ": log scale needs positive bounds");
  return a;
}

std::vector<Axis> default_axes(ScanKind kind) {
  const double two_pi = constants::two_pi;
  switch (kind) {
    case ScanKind::spectrum: return {{"delta_p_ratio", -0.4, 0.4, 401}};
    case ScanKind::amplitude: return {{"eps1_ratio", 0.0, 1.0, 201}};
    case ScanKind::phase_map: return {{"delta_p_ratio", -0.4, 0.4, 161}, {"mixing_phase1_rad", 0.0, two_pi, 121}};
    case ScanKind::delay_vs_power: return {{"pump_power_mw", 0.1, 7.0, 70}};
    case ScanKind::sideband2: return {{"delta_p_ratio", -0.4, 0.4, 401}};
    case ScanKind::bistability: return {{"pump_power_mw", 0.1, 30.0, 300}};
    case ScanKind::stability_map: return {{"pump_power_mw", 0.1, 20.0, 41}, {"lambda_hz", 0.0, 0.3e6, 31}};
    case ScanKind::coulomb: return {{"coulomb_v1_v", 0.1, 10.0, 100}};
  }
  return {};
}

ScanResult run_scan(const ScanSpec& spec) {
  const std::vector<Axis> axes = spec.axes.empty() ? default_axes(spec.kind) : spec.axes;
  if (axes.empty() || axes.size() > 2) throw ConfigError("scan: between 1 and 2 axes required");
  std::size_t total = 1;
  for (const Axis& a : axes) {
    if (a.count < 2) throw ConfigError("axis " + a.key + ": count must be >= 2");
    if (!is_numeric_config_key(a.key)) throw ConfigError("axis: '" + a.key + "' is not a numeric config key");
    total *= static_cast<std::size_t>(a.count);
    if (total > max_scan_points) {
      throw ConfigError("scan: grid exceeds " + std::to_string(max_scan_points) + " points (size guard)");
    }
  }
  if (axes.size() == 2 && axes[0].key == axes[1].key) throw ConfigError("scan: both axes use " + axes[0].key);
  if (spec.workers < 1) throw ConfigError("workers: must be >= 1");

  std::vector<std::array<int, 2>> indices;
  if (spec.point) {
    const auto [i, j] = *spec.point;
    if (i < 0 || i >= axes[0].count || (axes.size() == 2 ? (j < 0 || j >= axes[1].count) : j != 0)) {
      throw ConfigError("point: index out of range");
    }
    indices.push_back(*spec.point);
  } else {
    for (int i = 0; i < axes[0].count; ++i) {
      if (axes.size() == 1) indices.push_back({i, 0});
      else
        for (int j = 0; j < axes[1].count; ++j) indices.push_back({i, j});
    }
  }

  ScanResult res;
  for (const Axis& a : axes) res.columns.push_back(column_for_axis(a.key));
  for (const std::string& c : value_columns(spec.kind)) res.columns.push_back(c);

  Config base = spec.config;
  if (spec.kind == ScanKind::coulomb) {
    const std::pair<const char*, const char*> reference[] = {{"coulomb_r0_mm", "2"},   {"coulomb_c1_nf", "27.5"},
                                                             {"coulomb_c2_nf", "27.5"}, {"coulomb_v1_v", "1"},
                                                             {"coulomb_v2_v", "1"}};
    for (const auto& [key, value] : reference) {
      const std::string q = std::string(key).substr(0, 10);
      if (!base.si_value(q)) base.set(key, value);
    }
  }

  // Point configs are built up front so config errors surface before any work starts.
  std::vector<Config> configs;
  configs.reserve(indices.size());
  for (const auto& idx : indices) {
    Config c = base;
    for (std::size_t k = 0; k < axes.size(); ++k) c.set(axes[k].key, format_double(axes[k].value(idx[k])));
    configs.push_back(std::move(c));
  }
  // Validates parameters once; per-point failures below are numerical only.
  derive_params(configs.front().raw_inputs());
  configs.front().drive_settings();

  std::vector<PointOutcome> outcomes(indices.size());
  ScanSpec resolved = spec;
  resolved.config = base;
  res.metadata = build_metadata(resolved, axes);

  std::vector<std::exception_ptr> errors(indices.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t k = next++; k < indices.size(); k = next++) {
      try {
        outcomes[k] = evaluate(spec.kind, configs[k]);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int n_threads = std::min<int>(spec.workers, static_cast<int>(indices.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  res.rows.reserve(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    std::vector<double> row;
    for (std::size_t a = 0; a < axes.size(); ++a) row.push_back(axes[a].value(indices[k][a]));
    row.insert(row.end(), outcomes[k].values.begin(), outcomes[k].values.end());
    res.rows.push_back(std::move(row));
    res.status.push_back(outcomes[k].status);
  }
  return res;
}

std::string to_csv(const ScanResult& r) {
  std::string out;
  out += "# omit-lab " + r.metadata.value("version", std::string()) + "\n";
  out += "# scan_kind: " + r.metadata.value("scan_kind", std::string()) + "\n";
  if (r.metadata.contains("axes")) {
    for (const auto& a : r.metadata["axes"]) out += "# axis: " + a.dump() + "\n";
  }
  if (r.metadata.contains("derived") && !r.metadata["derived"].is_null()) {
    out += "# derived: " + r.metadata["derived"].dump() + "\n";
  }
  if (r.metadata.contains("config_text")) {
    const std::string text = r.metadata["config_text"].get<std::string>();
    std::size_t pos = 0;
    while (pos < text.size()) {
      const auto nl = text.find('\n', pos);
      out += "# config: " + text.substr(pos, nl - pos) + "\n";
      if (nl == std::string::npos) break;
      pos = nl + 1;
    }
  }
  for (const std::string& c : r.columns) out += c + ",";
  out += "status\n";
  for (std::size_t k = 0; k < r.rows.size(); ++k) {
    for (double v : r.rows[k]) {
      if (std::isfinite(v)) out += format_double(v);
      out += ',';
    }
    out += r.status[k];
    out += '\n';
  }
  return out;
}

std::string to_json_text(const ScanResult& r) {
  nlohmann::json j;
  j["metadata"] = r.metadata;
  std::time_t now = std::time(nullptr);
  if (const char* sde = std::getenv("SOURCE_DATE_EPOCH")) now = static_cast<std::time_t>(std::strtoll(sde, nullptr, 10));
  char ts[32];
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::strftime(ts, sizeof ts, "%Y-%m-%dT%H:%M:%SZ", &tm);
  j["metadata"]["timestamp"] = ts;
  j["columns"] = r.columns;
  auto& rows = j["rows"] = nlohmann::json::array();
  for (const auto& row : r.rows) {
    auto jr = nlohmann::json::array();
    for (double v : row) {
      if (std::isfinite(v)) jr.push_back(v);
      else jr.push_back(nullptr);
    }
    rows.push_back(std::move(jr));
  }
  j["status"] = r.status;
  return j.dump(2) + "\n";
}

ScanResult parse_csv(std::string_view text) {
  ScanResult r;
  bool header = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string_view> cells;
    while (true) {
      const auto c = line.find(',');
      cells.push_back(line.substr(0, c));
      if (c == std::string_view::npos) break;
      line = line.substr(c + 1);
    }
    if (cells.empty() || cells.back() == "") throw ConfigError("parse_csv: malformed line");
    if (!header) {
      for (std::size_t k = 0; k + 1 < cells.size(); ++k) r.columns.emplace_back(cells[k]);
      header = true;
      continue;
    }
    if (cells.size() != r.columns.size() + 1) throw ConfigError("parse_csv: ragged row");
    std::vector<double> row;
    for (std::size_t k = 0; k + 1 < cells.size(); ++k) {
      double v = kNaN;
      if (!cells[k].empty()) {
        const auto [p, ec] = std::from_chars(cells[k].data(), cells[k].data() + cells[k].size(), v);
        if (ec != std::errc() || p != cells[k].data() + cells[k].size()) throw ConfigError("parse_csv: bad number");
      }
      row.push_back(v);
    }
    r.rows.push_back(std::move(row));
    r.status.emplace_back(cells.back());
  }
  return r;
}

void write_file(const std::string& path, std::string_view text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!os) throw IoError("write failed: " + path);
}

}  // namespace omit
