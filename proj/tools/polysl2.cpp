// polysl2 spectrum|compare|dynamics --config <path> [--out <path>] [--format csv|json] [--workers N]

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "polysl2/commands.hpp"

namespace {

enum ExitCode { ok = 0, usage = 2, compute = 3, io_failure = 4 };

int exit_code_for(polysl2::ErrorCode c) {
  using polysl2::ErrorCode;
  switch (c) {
    case ErrorCode::config_parse:
    case ErrorCode::config_value: return usage;
    case ErrorCode::io: return io_failure;
    default: return compute;
  }
}

void report(std::string_view code, const std::string& message) {
  std::cerr << nlohmann::json{{"error", code}, {"message", message}}.dump() << '\n';
}

polysl2::Format pick_format(const std::string& flag, const std::string& out) {
  if (flag == "json") return polysl2::Format::Json;
  if (flag == "csv") return polysl2::Format::Csv;
  if (!out.empty() && std::filesystem::path(out).extension() == ".json") return polysl2::Format::Json;
  return polysl2::Format::Csv;
}

void emit(const polysl2::Table& t, const std::string& out, polysl2::Format f) {
  if (out.empty() || out == "-") {
    polysl2::write_table(std::cout, t, f);
    std::cout.flush();
    if (!std::cout) throw polysl2::Error(polysl2::ErrorCode::io, "write to stdout failed");
  } else {
    polysl2::write_table_file(out, t, f);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectra and dynamics of polynomially deformed sl(2) models"};
  app.require_subcommand(1);
  std::string config, out, format;
  int workers = 1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "model/run configuration file")->required();
    sub->add_option("--out", out, "output file (stdout if omitted)");
    sub->add_option("--format", format, "csv or json (default: from --out extension, else csv)")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--workers", workers, "sweep points evaluated concurrently")->check(CLI::PositiveNumber);
  };
  auto* spectrum = app.add_subcommand("spectrum", "energy levels per method");
  auto* compare = app.add_subcommand("compare", "errors of approximate methods against exact levels");
  auto* dynamics = app.add_subcommand("dynamics", "time series of observables");
  for (auto* sub : {spectrum, compare, dynamics}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report("usage", e.what());
    return usage;
  }

  try {
    const auto cfg = polysl2::load_config(config);
    const auto fmt = pick_format(format, out);
    if (spectrum->parsed()) {
      emit(polysl2::cmd_spectrum(cfg, workers), out, fmt);
    } else if (compare->parsed()) {
      emit(polysl2::cmd_compare(cfg, workers), out, fmt);
    } else {
      const auto res = polysl2::cmd_dynamics(cfg, workers);
      if (res.spacing) {
        const auto& path = cfg.dynamics.spacing_out;
        polysl2::write_table_file(path, *res.spacing, pick_format("", path));
      }
      emit(res.series, out, fmt);
    }
  } catch (const polysl2::Error& e) {
    report(polysl2::to_string(e.code()), e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    report("internal", e.what());
    return compute;
  }
  return ok;
}
