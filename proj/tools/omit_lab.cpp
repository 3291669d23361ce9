#include "omit/config.hpp"
#include "omit/errors.hpp"
#include "omit/scan.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

namespace {

enum Exit { ok = 0, config_error = 2, numerical_error = 3, io_error = 4 };

std::array<int, 2> parse_point(const std::string& s) {
  const auto comma = s.find(',');
  try {
    std::size_t used = 0;
    const int i = std::stoi(s.substr(0, comma), &used);
    if (used != (comma == std::string::npos ? s.size() : comma)) throw std::invalid_argument(s);
    int j = 0;
    if (comma != std::string::npos) {
      const std::string rest = s.substr(comma + 1);
      j = std::stoi(rest, &used);
      if (used != rest.size()) throw std::invalid_argument(s);
    }
    return {i, j};
  } catch (const std::logic_error&) {
    throw omit::ConfigError("--point expects i or i,j, got '" + s + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sideband response, stability and parameter scans for a cavity with two coupled resonators"};
  app.require_subcommand(1);

  std::string config_path, out_path, format = "csv", point;
  std::vector<std::string> sets, axes;
  int workers = 1;

  for (std::string_view name : omit::scan_kind_names()) {
    CLI::App* sub = app.add_subcommand(std::string(name), std::string(name) + " scan");
    sub->add_option("--config", config_path, "key = value config file (default: built-in reference parameters)");
    sub->add_option("--set", sets, "override, key=value (repeatable)");
    sub->add_option("--axis", axes, "sweep axis, key=start:stop:count[:log] (at most two)");
    sub->add_option("--out", out_path, "output file (default: stdout)");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--point", point, "evaluate one grid point i[,j]");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? Exit::ok : Exit::config_error;
  }

  try {
    omit::ScanSpec spec;
    spec.kind = omit::parse_scan_kind(app.get_subcommands().front()->get_name());
    spec.config = config_path.empty() ? omit::Config::paper_defaults() : omit::Config::load(config_path);
    for (const std::string& s : sets) spec.config.set_assignment(s);
    for (const std::string& a : axes) spec.axes.push_back(omit::parse_axis(a));
    spec.workers = workers;
    if (!point.empty()) spec.point = parse_point(point);

    const omit::ScanResult result = omit::run_scan(spec);
    const std::string text = format == "json" ? omit::to_json_text(result) : omit::to_csv(result);
    if (out_path.empty() || out_path == "-") {
      std::cout << text;
      if (!std::cout) throw omit::IoError("write to stdout failed");
    } else {
      omit::write_file(out_path, text);
    }
  } catch (const omit::ConfigError& e) {
    std::cerr << "omit-lab: config error: " << e.what() << "\n";
    return Exit::config_error;
  } catch (const omit::NumericalError& e) {
    std::cerr << "omit-lab: numerical failure: " << e.what() << "\n";
    return Exit::numerical_error;
  } catch (const omit::IoError& e) {
    std::cerr << "omit-lab: " << e.what() << "\n";
    return Exit::io_error;
  }
  return Exit::ok;
}
