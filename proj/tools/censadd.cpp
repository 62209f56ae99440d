#include "censadd/config.hpp"
#include "censadd/csv_io.hpp"
#include "censadd/parallel.hpp"
#include "censadd/pipeline.hpp"
#include "censadd/simulate.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>

namespace fs = std::filesystem;
using namespace censadd;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_validation = 1;
constexpr int exit_numerical = 2;

struct Common
{
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n;
  std::optional<std::size_t> replicates;
  std::string out_dir;
  std::optional<std::size_t> threads;
};

std::size_t
resolve_threads(const Common& opts)
{
  if (opts.threads) {
    return *opts.threads == 0 ? default_thread_count() : *opts.threads;
  }
  if (const char* env = std::getenv("CENSADD_THREADS")) {
    try {
      const long value = std::stol(env);
      if (value > 0) {
        return static_cast<std::size_t>(value);
      }
    } catch (const std::exception&) {
    }
    throw std::invalid_argument("CENSADD_THREADS must be a positive integer");
  }
  return default_thread_count();
}

fs::path
output_dir(const Common& opts)
{
  const fs::path dir = opts.out_dir.empty() ? fs::path(".") : fs::path(opts.out_dir);
  fs::create_directories(dir);
  return dir;
}

void
write_file(const fs::path& path, const std::string& content)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << content;
}

void
print_warnings(const std::vector<std::string>& warnings)
{
  for (const auto& w : warnings) {
    std::cerr << "warning: " << w << '\n';
  }
}

int
cmd_fit(const Common& opts, const std::string& data_path)
{
  const CensoredSample sample = read_sample_csv_file(data_path);
  nlohmann::json config = nlohmann::json::object();
  if (!opts.config.empty()) {
    config = load_json_file(opts.config);
  }
  if (!config.contains("psi")) {
    throw std::invalid_argument("fit config must define psi");
  }
  const FitSettings settings = parse_fit_settings(config, sample.dim());
  const FitResult result = fit_additive_model(sample, settings, resolve_threads(opts));

  const fs::path dir = output_dir(opts);
  std::ostringstream bands;
  write_bands_csv(bands, result.fit);
  write_file(dir / "bands.csv", bands.str());
  write_file(dir / "fit.json", fit_to_json(result).dump(2) + "\n");
  print_warnings(result.warnings);
  std::cout << "n = " << sample.size() << ", d = " << sample.dim()
            << ", P(delta=1) = " << format_double(sample.uncensored_fraction()) << '\n'
            << "wrote " << (dir / "bands.csv").string() << " and " << (dir / "fit.json").string() << '\n';
  return exit_ok;
}

int
cmd_simulate(const Common& opts)
{
  DgpSpec dgp = DgpSpec::paper();
  if (!opts.config.empty()) {
    dgp = parse_dgp(load_json_file(opts.config));
  }
  if (opts.seed) {
    dgp.seed = *opts.seed;
  }
  const std::size_t n = opts.n.value_or(1000);
  const CensoredSample sample = generate(dgp, n);
  std::ostringstream csv;
  write_sample_csv(csv, sample);
  const fs::path dir = output_dir(opts);
  write_file(dir / "sample.csv", csv.str());
  std::cout << "n = " << n << ", seed = " << dgp.seed << '\n'
            << "P(delta=1) = " << format_double(sample.uncensored_fraction()) << '\n'
            << "censoring rate = " << format_double(1.0 - sample.uncensored_fraction()) << '\n'
            << "wrote " << (dir / "sample.csv").string() << '\n';
  return exit_ok;
}

int
cmd_study(const Common& opts)
{
  StudyConfig config;
  if (!opts.config.empty()) {
    config = parse_study_config(load_json_file(opts.config));
  }
  if (opts.seed) {
    config.dgp.seed = *opts.seed;
  }
  if (opts.n) {
    config.n = *opts.n;
  }
  if (opts.replicates) {
    config.replicates = *opts.replicates;
  }
  const StudyResult result =
    run_study(config.dgp, config.n, config.replicates, config.probes, config.settings, resolve_threads(opts));

  const fs::path dir = output_dir(opts);
  write_file(dir / "study.json", study_to_json(result).dump(2) + "\n");
  std::ostringstream csv;
  csv << "replicate,axis,x,eta_hat,eta_true,sigma,statistic\n";
  for (const auto& p : result.probes) {
    for (std::size_t r = 0; r < p.estimates.size(); ++r) {
      csv << r << ',' << p.probe.axis + 1 << ',' << format_double(p.probe.x) << ','
          << format_double(p.estimates[r]) << ',' << format_double(p.eta_true) << ','
          << format_double(p.sigma_used[r]) << ',' << format_double(p.statistics[r]) << '\n';
    }
  }
  write_file(dir / "study.csv", csv.str());

  std::cout << "n = " << result.n << ", replicates = " << result.replicates << ", h = " << result.bandwidth
            << ", P(delta=1) = " << result.event_rate << '\n';
  for (const auto& p : result.probes) {
    std::cout << "axis " << p.probe.axis + 1 << " x = " << p.probe.x << ": coverage " << p.coverage
              << ", mean " << p.mean_statistic << ", var " << p.variance_statistic << ", KS "
              << p.ks_distance << ", rescaled MSE " << p.rescaled_mse << " (b^2 + sigma^2 = "
              << p.bias * p.bias + p.sigma_analytic * p.sigma_analytic << ")\n";
  }
  return exit_ok;
}

int
cmd_reproduce_figure(const Common& opts)
{
  const FigureTable table = reproduce_figure(opts.n.value_or(1000), opts.seed.value_or(1), resolve_threads(opts));
  if (opts.out_dir.empty()) {
    std::cout << table.csv;
  } else {
    const fs::path dir = output_dir(opts);
    write_file(dir / "figure.csv", table.csv);
  }
  std::cerr << "P(delta=1) = " << format_double(table.event_rate) << '\n';
  return exit_ok;
}

} // namespace

int
main(int argc, char** argv)
{
  CLI::App app{ "Additive regression under random right censoring" };
  app.require_subcommand(1);

  Common opts;
  std::string data_path;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config, "JSON configuration file");
    sub->add_option("--seed", opts.seed, "master seed");
    sub->add_option("--n", opts.n, "sample size");
    sub->add_option("--replicates", opts.replicates, "Monte Carlo replicates");
    sub->add_option("--out-dir", opts.out_dir, "output directory");
    sub->add_option("--threads", opts.threads, "worker threads (default: CENSADD_THREADS, then all cores)");
  };
  CLI::App* fit = app.add_subcommand("fit", "fit additive components and bands to a censored data set");
  add_common(fit);
  fit->add_option("--data", data_path, "CSV with columns z,delta,x1..xd")->required();
  CLI::App* simulate = app.add_subcommand("simulate", "draw one sample from a data-generating process");
  add_common(simulate);
  CLI::App* study = app.add_subcommand("study", "Monte Carlo study of the limit law and interval coverage");
  add_common(study);
  CLI::App* figure = app.add_subcommand("reproduce-figure", "component estimates and bands on the reference model");
  add_common(figure);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_validation;
  }

  try {
    if (fit->parsed()) {
      return cmd_fit(opts, data_path);
    }
    if (simulate->parsed()) {
      return cmd_simulate(opts);
    }
    if (study->parsed()) {
      return cmd_study(opts);
    }
    return cmd_reproduce_figure(opts);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_validation;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_validation;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_validation;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return exit_numerical;
  }
}
