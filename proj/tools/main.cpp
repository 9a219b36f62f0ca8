// soliton-stability: command-line front end over the lagstab C API.
#include "lagstab/lagstab.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

constexpr int kConfigError = 2;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> count;
  std::optional<int> workers;
  std::string out;
  std::string format;
  bool demonstrate_failure = false;
};

bool read_file(const std::string& path, std::string& text) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  text = ss.str();
  return true;
}

int run(const std::string& command, const Options& opt) {
  std::string config;
  if (!opt.config_path.empty() && !read_file(opt.config_path, config)) {
    std::cerr << "error: cannot read config '" << opt.config_path << "'\n";
    return kConfigError;
  }

  nlohmann::json overrides = nlohmann::json::object();
  if (opt.seed) {
    if (command == "section4") overrides["section4"]["seed"] = *opt.seed;
    else overrides["variation"]["seed"] = *opt.seed;
  }
  if (opt.count) {
    if (command == "section4") overrides["section4"]["pairs"] = *opt.count;
    else overrides["variation"]["count"] = *opt.count;
  }
  if (opt.workers) overrides["workers"] = *opt.workers;
  if (!opt.format.empty()) overrides["output"]["format"] = opt.format;
  if (opt.demonstrate_failure) overrides["demonstrate_failure"] = true;

  std::string out_path = opt.out;
  if (out_path.empty() && !config.empty()) {
    // honour output.path from the config file; malformed JSON is reported below
    const auto j = nlohmann::json::parse(config, nullptr, false);
    if (j.is_object() && j.contains("output") && j["output"].is_object() &&
        j["output"].contains("path") && j["output"]["path"].is_string())
      out_path = j["output"]["path"].get<std::string>();
  }

  int exit_code = 0;
  char* report = nullptr;
  const std::string patch = overrides.dump();
  const lagstab_status st =
      lagstab_run_command(command.c_str(), config.c_str(), patch.c_str(), &exit_code, &report);
  if (st != LAGSTAB_OK) {
    std::cerr << "error (" << lagstab_status_name(st) << "): " << lagstab_last_error() << "\n";
    return 1;
  }
  const std::string text(report);
  lagstab_string_free(report);

  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out || !(out << text)) {
      std::cerr << "error: cannot write '" << out_path << "'\n";
      return kConfigError;
    }
  }
  return exit_code;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical verification of translating-soliton stability"};
  app.require_subcommand(1);

  Options opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "JSON run config")->check(CLI::ExistingFile);
    sub->add_option("--seed", opt.seed, "base seed for random suites");
    sub->add_option("--count", opt.count, "number of random variations / pairs")
        ->check(CLI::PositiveNumber);
    sub->add_option("--workers", opt.workers, "worker threads (1 = deterministic)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", opt.out, "write the report here instead of stdout");
    sub->add_option("--format", opt.format, "report format")
        ->check(CLI::IsMember({"json", "csv"}));
  };

  auto* verify = app.add_subcommand("verify-soliton", "soliton residual and Lagrangian defect");
  auto* second = app.add_subcommand("second-variation", "second variation by every route");
  auto* section4 = app.add_subcommand("section4", "Grim Reaper stability pipeline");
  for (auto* sub : {verify, second, section4}) add_common(sub);
  second->add_flag("--demonstrate-failure", opt.demonstrate_failure,
                   "use non-closed variations and require the square route to break");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  for (auto* sub : {verify, second, section4})
    if (sub->parsed()) return run(sub->get_name(), opt);
  return kConfigError;
}
