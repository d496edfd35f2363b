#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "smoothkl/config.hpp"
#include "smoothkl/dataset.hpp"
#include "smoothkl/errors.hpp"
#include "smoothkl/experiments.hpp"
#include "smoothkl/numfmt.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string out;
  std::size_t sample_n = 1000;
};

void add_common(CLI::App* cmd, Options& opt) {
  cmd->add_option("--config", opt.config, "INI configuration file");
  cmd->add_option("--seed", opt.seed, "Random seed (overrides SMOOTHKL_SEED and the config)");
  cmd->add_option("--out", opt.out, "Output CSV path (default: standard output)");
  cmd->add_option("--threads", opt.threads, "Worker threads (0 = all cores)");
}

std::uint64_t resolve_seed(const Options& opt, const smoothkl::ExperimentConfig& cfg) {
  if (opt.seed) return *opt.seed;
  if (const char* env = std::getenv("SMOOTHKL_SEED")) {
    try {
      const long long v = smoothkl::parse_integer(env);
      if (v < 0) throw std::invalid_argument("negative");
      return static_cast<std::uint64_t>(v);
    } catch (const std::invalid_argument&) {
      throw smoothkl::ConfigError(std::string("SMOOTHKL_SEED is not a nonnegative integer: '") + env + "'");
    }
  }
  return cfg.seed;
}

int run(const std::string& command, const Options& opt) {
  const smoothkl::ExperimentConfig cfg =
      opt.config.empty() ? smoothkl::default_config() : smoothkl::load_config_file(opt.config);
  const std::uint64_t seed = resolve_seed(opt, cfg);
  const unsigned threads = opt.threads ? *opt.threads : cfg.threads;

  std::ostringstream buf;
  if (command == "are-table") {
    smoothkl::write_are_table(buf, smoothkl::run_are_table(cfg.are_table, threads), seed);
  } else if (command == "efficiency") {
    smoothkl::write_efficiency(buf, smoothkl::run_efficiency(cfg.efficiency, seed, threads), seed);
  } else if (command == "robustness") {
    smoothkl::write_robustness(buf, smoothkl::run_robustness(cfg.robustness, seed, threads), seed);
  } else if (command == "multiclass") {
    smoothkl::write_multiclass(buf, smoothkl::run_multiclass(cfg.multiclass, seed, threads), seed);
  } else if (command == "rho-curves") {
    smoothkl::write_rho_curves(buf, smoothkl::run_rho_curves(cfg.rho_curves), seed);
  } else if (command == "rlogit-range") {
    smoothkl::write_rlogit_range(buf, smoothkl::run_rlogit_range(cfg.rlogit_range), seed);
  } else if (command == "sample") {
    const auto measure = smoothkl::CovariateMeasure::intercept_and_normal();
    const smoothkl::TrueParameter beta(cfg.efficiency.beta);
    smoothkl::write_csv(buf, smoothkl::sample_nominal(measure, beta, opt.sample_n, seed));
  } else if (command == "defaults") {
    buf << smoothkl::default_config_text();
  }

  if (opt.out.empty()) {
    std::cout << buf.str();
    std::cout.flush();
    return std::cout ? 0 : 1;
  }
  std::ofstream file(opt.out, std::ios::binary);
  if (!file) throw smoothkl::ConfigError("cannot open output file '" + opt.out + "'");
  file << buf.str();
  return file ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Label-smoothing surrogate losses: efficiency and robustness experiments"};
  app.require_subcommand(1);
  Options opt;

  const std::pair<const char*, const char*> commands[] = {
      {"are-table", "Asymptotic relative efficiencies of MLSLR and LSQLR"},
      {"efficiency", "Bias and test error against the training size"},
      {"robustness", "Bias and test error under point-mass contamination"},
      {"multiclass", "Dense-network comparison of LSLR and MLSLR on Gaussian clusters"},
      {"rho-curves", "Rescaled rho-transformation curves"},
      {"rlogit-range", "Range endpoints of the R-logit model against the smoothing level"},
      {"sample", "Draw a dataset from the nominal model"},
      {"defaults", "Print the default configuration"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* cmd = app.add_subcommand(name, help);
    add_common(cmd, opt);
    if (std::string(name) == "sample") cmd->add_option("--n", opt.sample_n, "Number of rows")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, opt);
  } catch (const smoothkl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const smoothkl::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const smoothkl::DomainError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
