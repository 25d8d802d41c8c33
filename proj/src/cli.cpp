#include "nca/cli.hpp"

#include <cstdint>
#include <iostream>

#include <CLI11.hpp>

#include "nca/artifacts.hpp"

namespace nca::cli {

namespace {

net::Network load_network(const std::string& path) {
  return net::parse_network(io::read_file(path));
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Aligned linear network codes for three unicast sessions"};
  app.require_subcommand(1);

  std::string net_path, design_path, out_path;
  std::uint64_t seed = 0, blocks = 0, budget = 10000;
  unsigned samples = 32, n = 1, max_attempts = 64, threads = 1;
  std::uint64_t prime = 0;

  auto* cmd_mincut = app.add_subcommand(
      "mincut", "Print the three per-session min-cuts");
  cmd_mincut->add_option("network", net_path, "network JSON file")->required();

  auto* cmd_analyze = app.add_subcommand(
      "analyze", "Classify the network and test the alignment assumptions");
  cmd_analyze->add_option("network", net_path)->required();
  cmd_analyze->add_option("--seed", seed, "master seed");
  cmd_analyze->add_option("--samples", samples, "samples per identity test");
  cmd_analyze->add_option("--budget", budget, "asymmetry collision budget");
  cmd_analyze->add_option("-o,--output", out_path, "report path")
      ->default_val("analysis.json");

  auto* cmd_design = app.add_subcommand(
      "design", "Search for a valid aligned code and write it out");
  cmd_design->add_option("network", net_path)->required();
  cmd_design->add_option("-n,--extension", n, "extension parameter (>= 1)")
      ->required();
  cmd_design->add_option("--prime", prime,
                         "field prime (default: recommended for n)");
  cmd_design->add_option("--seed", seed, "master seed");
  cmd_design->add_option("--max-attempts", max_attempts);
  cmd_design->add_option("--threads", threads, "parallel attempts per wave");
  cmd_design->add_option("-o,--output", out_path, "design path")
      ->default_val("design.json");

  auto* cmd_simulate = app.add_subcommand(
      "simulate", "Run end-to-end blocks through a design and report rates");
  cmd_simulate->add_option("network", net_path)->required();
  cmd_simulate->add_option("design", design_path)->required();
  cmd_simulate->add_option("--blocks", blocks, "number of message blocks")
      ->required();
  cmd_simulate->add_option("--seed", seed, "message seed");
  cmd_simulate->add_option("-o,--output", out_path, "report path")
      ->default_val("report.json");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (cmd_mincut->parsed()) {
      auto network = load_network(net_path);
      std::cout << net::mincut(network, 1) << " " << net::mincut(network, 2)
                << " " << net::mincut(network, 3) << "\n";
      return kExitOk;
    }
    if (cmd_analyze->parsed()) {
      auto network = load_network(net_path);
      transfer::AnalysisOptions opts;
      opts.seed = seed;
      opts.samples = samples;
      opts.asym_budget = budget;
      auto report = transfer::analyze(network, opts);
      io::atomic_write(out_path, io::analysis_to_json(report));
      std::cout << io::render_analysis(report);
      std::cout << "wrote " << out_path << "\n";
      return kExitOk;
    }
    if (cmd_design->parsed()) {
      auto network = load_network(net_path);
      align::SearchOptions opts;
      opts.n = n;
      opts.p = prime;
      opts.seed = seed;
      opts.max_attempts = max_attempts;
      opts.threads = threads;
      auto design = align::search_design(network, opts);
      io::atomic_write(out_path, io::design_to_json(design));
      std::cout << io::render_design(design,
                                     align::verify_design(network, design));
      std::cout << "wrote " << out_path << "\n";
      return kExitOk;
    }
    if (cmd_simulate->parsed()) {
      auto network = load_network(net_path);
      auto design = io::design_from_json(io::read_file(design_path));
      auto report = sim::run_simulation(network, design, blocks, seed);
      io::atomic_write(out_path, io::simulation_to_json(report));
      std::cout << io::render_simulation(report);
      std::cout << "wrote " << out_path << "\n";
      return kExitOk;
    }
  } catch (const CaseRejectedError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoDesign;
  } catch (const ExhaustedError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoDesign;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitUsage;
}

}  // namespace nca::cli
