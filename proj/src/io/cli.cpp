#include "amc/io/cli.hpp"

#include <CLI11.hpp>
#include <map>

#include "amc/io/commands.hpp"

namespace amc::io {

namespace {

struct Subcommand {
  CLI::App* app = nullptr;
  Command command = Command::evolve;
  std::string config_path;
  std::map<std::string, std::string> values;  // key -> raw flag value
  std::map<std::string, CLI::Option*> options;
};

std::string flag_name(std::string_view key) {
  std::string out(key);
  for (char& ch : out) {
    if (ch == '_') ch = '-';
  }
  return out;
}

RunConfig resolve(const Subcommand& sub) {
  RunConfig cfg = sub.config_path.empty() ? RunConfig{} : parse_config(read_file(sub.config_path));
  cfg.command = sub.command;
  for (const ConfigKey& k : config_keys()) {
    const auto it = sub.options.find(std::string(k.name));
    if (it == sub.options.end() || it->second->count() == 0) continue;
    try {
      set_value(cfg, k.name, sub.values.at(std::string(k.name)));
    } catch (const ConfigError& e) {
      throw ConfigError("--" + flag_name(k.name) + ": " + e.what());
    }
  }
  return cfg;
}

void report(std::ostream& out, const RunResult& result) {
  for (const std::string& f : result.files) out << (result.directory / f).string() << '\n';
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mean-field atom-molecule conversion with loss", std::string(kToolName)};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  std::vector<std::unique_ptr<Subcommand>> subs;
  const std::pair<Command, const char*> commands[] = {
      {Command::evolve, "Integrate the amplitude equations"},
      {Command::fixed_points, "Fixed points of the reduced flow with stability"},
      {Command::regimes, "Regime map of the (C, R) plane with boundaries"},
      {Command::sweep, "Conversion efficiency of linear R sweeps"},
      {Command::trap, "Self-trapping runs"},
      {Command::portrait, "Phase portrait of the reduced flow"},
  };
  for (const auto& [command, help] : commands) {
    auto sub = std::make_unique<Subcommand>();
    sub->command = command;
    sub->app = app.add_subcommand(std::string(to_string(command)), help);
    sub->app->add_option("--config", sub->config_path, "Config file")->check(CLI::ExistingFile);
    for (const ConfigKey& k : config_keys()) {
      if (k.name == "command") continue;
      const std::string key(k.name);
      sub->options[key] = sub->app->add_option("--" + flag_name(key), sub->values[key], std::string(k.help));
    }
    subs.push_back(std::move(sub));
  }
  std::string manifest;
  std::string rerun_output;
  CLI::App* rerun_app = app.add_subcommand("rerun", "Repeat the run recorded in a manifest");
  rerun_app->add_option("manifest", manifest, "manifest.json of an earlier run")->required();
  CLI::Option* rerun_out = rerun_app->add_option("--output", rerun_output, "Write to this directory instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (rerun_app->parsed()) {
      report(out, rerun(manifest, rerun_out->count() ? std::optional<std::string>(rerun_output) : std::nullopt));
      return kExitOk;
    }
    for (const auto& sub : subs) {
      if (sub->app->parsed()) report(out, run(resolve(*sub)));
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical failure at t = " << e.time() << ": " << e.what() << '\n';
    return kExitNumerical;
  } catch (const DomainError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  }
}

}  // namespace amc::io
