// Command-line front end. Talks to the simulator only through the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cstirap/cstirap.h"

namespace {

struct Options {
  std::string config;
  std::vector<std::string> sets;
  std::optional<unsigned long long> seed;
  std::optional<std::string> out;
  std::optional<unsigned> threads;
  std::optional<std::string> map;
  bool dual = false;
  bool flip = false;
  bool dump = false;
};

using ConfigPtr = std::unique_ptr<cstirap_config, decltype(&cstirap_config_destroy)>;
using ResultPtr = std::unique_ptr<cstirap_result, decltype(&cstirap_result_destroy)>;

int report(cstirap_status s) {
  std::cerr << "cstirap: " << cstirap_status_name(s) << ": " << cstirap_last_error() << '\n';
  return static_cast<int>(s);
}

void add_options(CLI::App* cmd, Options& o) {
  cmd->add_option("-c,--config", o.config, "INI configuration file")->check(CLI::ExistingFile);
  cmd->add_option("-s,--set", o.sets, "Override a key, e.g. --set protocol.kappa=2")->allow_extra_args(false);
  cmd->add_option("--seed", o.seed, "Noise seed");
  cmd->add_option("-o,--out", o.out, "Output CSV path ('-' for stdout)");
  cmd->add_option("-j,--threads", o.threads, "Worker threads (0: CSTIRAP_THREADS or hardware)");
  cmd->add_flag("--dual", o.dual, "Use the always-on pump dual protocol");
  cmd->add_flag("--flip-detunings", o.flip, "Negate the ideal detuning ramps");
  cmd->add_flag("--dump-config", o.dump, "Print the effective configuration and exit");
}

int run(const std::string& command, const Options& o) {
  cstirap_config* raw = nullptr;
  cstirap_status s = o.config.empty() ? cstirap_config_create(&raw) : cstirap_config_load(o.config.c_str(), &raw);
  if (s != CSTIRAP_OK) return report(s);
  ConfigPtr cfg(raw, cstirap_config_destroy);

  auto set = [&](const std::string& key, const std::string& value) {
    const cstirap_status st = cstirap_config_set(cfg.get(), key.c_str(), value.c_str());
    return st == CSTIRAP_OK ? 0 : report(st);
  };
  for (const auto& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::cerr << "cstirap: --set expects KEY=VALUE, got '" << kv << "'\n";
      return CSTIRAP_E_INVALID_ARGUMENT;
    }
    if (int rc = set(kv.substr(0, eq), kv.substr(eq + 1))) return rc;
  }
  if (o.seed)
    if (int rc = set("noise.seed", std::to_string(*o.seed))) return rc;
  if (o.out)
    if (int rc = set("run.out", *o.out == "-" ? "" : *o.out)) return rc;
  if (o.threads)
    if (int rc = set("run.threads", std::to_string(*o.threads))) return rc;
  if (o.map)
    if (int rc = set("linewidth.map", *o.map)) return rc;
  if (o.dual && (s = cstirap_config_transform(cfg.get(), "dual")) != CSTIRAP_OK) return report(s);
  if (o.flip && (s = cstirap_config_transform(cfg.get(), "flip")) != CSTIRAP_OK) return report(s);

  if (o.dump) {
    char* text = nullptr;
    if ((s = cstirap_config_dump(cfg.get(), &text)) != CSTIRAP_OK) return report(s);
    std::cout << text;
    cstirap_string_free(text);
    return 0;
  }

  cstirap_result* rraw = nullptr;
  s = cstirap_run(cfg.get(), command.c_str(), &rraw);
  if (!rraw) return report(s);
  ResultPtr result(rraw, cstirap_result_destroy);
  const std::string run_error = cstirap_last_error();

  size_t needed = 0;
  cstirap_config_get(cfg.get(), "run.out", nullptr, 0, &needed);
  std::string out(needed, '\0');
  cstirap_config_get(cfg.get(), "run.out", out.data(), out.size(), &needed);
  out.resize(needed - 1);

  if (out.empty()) {
    std::cout << cstirap_result_csv(result.get()) << std::flush;
  } else {
    std::ofstream f(out, std::ios::binary);
    f << cstirap_result_csv(result.get());
    if (!f) {
      std::cerr << "cstirap: cannot write '" << out << "'\n";
      return CSTIRAP_E_IO;
    }
  }
  if (s != CSTIRAP_OK) {
    std::cerr << "cstirap: " << cstirap_status_name(s) << ": " << run_error << '\n';
    return static_cast<int>(s);
  }
  if (*cstirap_result_note(result.get())) std::cerr << "cstirap: " << cstirap_result_note(result.get()) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chirped STIRAP simulator"};
  app.set_version_flag("--version", std::string(cstirap_version()));
  app.require_subcommand(1);

  Options opts;
  const std::vector<std::pair<const char*, const char*>> commands = {
      {"simulate", "Population histories with leakage estimates"},
      {"spectrum", "Stokes and full-Hamiltonian eigenvalues with the schedule"},
      {"sweep", "Efficiency over one or two parameter axes"},
      {"noise", "Quasistatic average of the efficiency over stray detunings"},
      {"linewidth", "Width of the high-efficiency region of a map"},
      {"crossing", "Crossing times of the stray-free schedule"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* cmd = app.add_subcommand(name, help);
    add_options(cmd, opts);
    if (std::string(name) == "linewidth") cmd->add_option("--map", opts.map, "Map CSV written by 'sweep'");
  }

  CLI11_PARSE(app, argc, argv);
  for (CLI::App* sub : app.get_subcommands()) return run(sub->get_name(), opts);
  return 1;
}
