// npusim: replay register-transaction scripts and run neural workloads
// against the cycle-accounting NPU tile model.

#include <cstdio>
#include <fstream>
#include <string>

#include <CLI11.hpp>

#include "npusim/log.hpp"
#include "npusim/register_file.hpp"
#include "npusim/script.hpp"
#include "npusim/soc.hpp"
#include "npusim/workload.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRunFailure = 1;   // expect mismatch, poll timeout, oracle fail
constexpr int kExitUsageError = 2;   // parse/config/file errors

struct CommonOpts {
  std::string config_path;
  uint64_t seed = 0;
  std::string log_level = "info";
};

npusim::LogLevel to_level(const std::string& s) {
  return s == "debug" ? npusim::LogLevel::Debug : npusim::LogLevel::Info;
}

int run_script_cmd(const std::string& path, const CommonOpts& opts) {
  npusim::EngineConfig engine;
  npusim::StallModel stall;
  if (!opts.config_path.empty()) {
    if (const auto err = npusim::apply_config_file(opts.config_path, engine, stall)) {
      std::fprintf(stderr, "config error: %s\n", err->c_str());
      return kExitUsageError;
    }
  }

  const auto parsed = npusim::parse_script_file(path);
  if (!parsed.ok()) {
    std::fprintf(stderr, "%s:%d:%d: %s\n", path.c_str(), parsed.error->line,
                 parsed.error->column, parsed.error->message.c_str());
    return kExitUsageError;
  }

  npusim::SocSimulator sim(npusim::SocConfig{engine, stall});
  npusim::Logger log(to_level(opts.log_level), stdout);
  const auto stats = npusim::run_script(sim, parsed.commands, log);
  return stats.exit_status();
}

int run_workload_cmd(const std::string& path, const std::string& report_path,
                     const CommonOpts& opts) {
  npusim::EngineConfig engine;
  npusim::StallModel stall;
  if (!opts.config_path.empty()) {
    if (const auto err = npusim::apply_config_file(opts.config_path, engine, stall)) {
      std::fprintf(stderr, "config error: %s\n", err->c_str());
      return kExitUsageError;
    }
  }

  const auto parsed = npusim::parse_workload_file(path, engine, stall);
  if (!parsed.ok()) {
    std::fprintf(stderr, "%s: %s\n", path.c_str(), parsed.error->c_str());
    return kExitUsageError;
  }

  npusim::Logger log(to_level(opts.log_level), stdout);
  const auto report = npusim::run_workload(parsed.manifest, opts.seed, log);
  const std::string text = report.to_text();

  if (report_path.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    std::ofstream out(report_path, std::ios::binary | std::ios::trunc);
    if (!out || !out.write(text.data(), static_cast<std::streamsize>(text.size()))) {
      std::fprintf(stderr, "cannot write report %s\n", report_path.c_str());
      return kExitUsageError;
    }
    std::printf("report written to %s (exit %d)\n", report_path.c_str(),
                report.exit_status());
  }
  return report.exit_status() == 0 ? kExitOk : kExitRunFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"npusim: NPU tile simulator (MAC-array engine, scratchpad/DMA, "
               "MMIO register protocol, PCPI bridge)"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  CommonOpts opts;
  app.add_option("--config", opts.config_path, "engine/stall config file");
  app.add_option("--seed", opts.seed, "64-bit seed for all generated data");
  app.add_option("--log-level", opts.log_level, "info|debug")
      ->check(CLI::IsMember({"info", "debug"}));

  std::string script_path;
  auto* script = app.add_subcommand("run-script", "replay a register-transaction script");
  script->add_option("path", script_path, "script file")->required();

  std::string workload_path;
  std::string report_path;
  auto* workload = app.add_subcommand("run-workload", "execute a workload manifest");
  workload->add_option("path", workload_path, "manifest file")->required();
  workload->add_option("--report", report_path, "write the run report to a file");

  auto* regmap = app.add_subcommand("regmap", "print the register reference");

  CLI11_PARSE(app, argc, argv);

  if (script->parsed()) return run_script_cmd(script_path, opts);
  if (workload->parsed()) return run_workload_cmd(workload_path, report_path, opts);
  if (regmap->parsed()) {
    std::fputs(npusim::register_reference_text().c_str(), stdout);
    return kExitOk;
  }
  return kExitUsageError;
}
