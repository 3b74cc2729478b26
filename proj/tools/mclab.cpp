// mclab: batch runner for the experiment configs.
//
//   mclab <run|enumerate|verify|report|construct> --config cfg.json [options]
//
// Exit status: 0 all asserted checks passed, 1 an asserted check failed,
// 2 bad config or arguments, 3 I/O failure, 4 budget or cap violation.

#include "mclab/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

enum Exit { kOk = 0, kAssertFailed = 1, kConfig = 2, kIo = 3, kBudget = 4 };

struct Options {
  std::string config;
  std::string cache_dir;
  std::optional<std::size_t> L;
  std::optional<std::size_t> S;
  std::optional<std::uint64_t> seed;
  std::string format = "tabular";
  bool quiet = false;
};

int run(mclab::Subcommand cmd, const Options& opt) {
  mclab::ExperimentConfig config = mclab::load_config(opt.config);
  if (opt.L) config.L = *opt.L;
  if (opt.S) config.S = *opt.S;
  if (opt.seed) config.seed = *opt.seed;
  if (config.L > mclab::kHardLengthCap)
    throw mclab::BudgetError("budget L above hard cap " + std::to_string(mclab::kHardLengthCap));

  std::optional<mclab::WitnessCache> cache;
  if (!opt.cache_dir.empty()) cache.emplace(opt.cache_dir);
  else if (const char* env = std::getenv("MCLAB_CACHE_DIR"); env && *env) cache.emplace(env);

  const auto result = mclab::run_experiment(config, cmd, cache ? &*cache : nullptr, opt.quiet ? nullptr : &std::cerr);
  if (!opt.quiet) {
    const auto format = opt.format == "structured" ? mclab::ReportFormat::Structured : mclab::ReportFormat::Tabular;
    std::cout << mclab::render_reports(result.reports, format);
  }
  std::size_t asserted = 0;
  std::size_t failed = 0;
  for (const auto& r : result.reports) {
    if (r.verdict != mclab::Verdict::AssertedExact) continue;
    ++asserted;
    if (!r.passed) ++failed;
  }
  std::cerr << result.reports.size() << " reports, " << asserted << " asserted, " << failed << " failed\n";
  return failed == 0 ? kOk : kAssertFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Budgeted machine-relative complexity and prediction-bound experiments"};
  app.require_subcommand(1);
  Options opt;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"run", "run every selected experiment"},
      {"enumerate", "build (and cache) witness sets and check their Kraft sums"},
      {"verify", "run the asserted checks"},
      {"report", "run the measured-only theorem reports"},
      {"construct", "build the nu tables and check them"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--cache-dir", opt.cache_dir, "witness snapshot directory (else MCLAB_CACHE_DIR)");
    sub->add_option("--budget-L", opt.L, "program length budget (bits)");
    sub->add_option("--budget-S", opt.S, "step budget");
    sub->add_option("--seed", opt.seed, "override the config seed");
    sub->add_option("--format", opt.format, "stdout format")->check(CLI::IsMember({"tabular", "structured"}));
    sub->add_flag("--quiet,-q", opt.quiet, "print only the summary line");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    return run(mclab::subcommand_from_string(cmd), opt);
  } catch (const mclab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const mclab::BudgetError& e) {
    std::cerr << "budget error: " << e.what() << "\n";
    return kBudget;
  } catch (const mclab::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  }
}
