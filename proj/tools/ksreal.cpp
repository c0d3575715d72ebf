// ksreal: generate the MUB ray configuration, realify it into R^6 and
// certify its two-valued-state properties.

#include "ksr/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

namespace {

void print(const ksr::run_report &r, bool timing) { std::cout << r.str(timing) << std::flush; }

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Kochen-Specker configuration toolkit: MUB closure, phase-adjusted "
               "realification into R^6, valuation certificates"};
  app.require_subcommand(0, 1);

  unsigned threads = 1;
  std::uint64_t seed = 0;
  bool timing = false;
  std::vector<std::string> expect_on, expect_off;
  app.add_option("--threads", threads, "worker threads (0 = all cores)")->capture_default_str();
  app.add_option("--seed", seed, "seed for randomized strategies")->capture_default_str();
  app.add_flag("--timing", timing, "include per-stage wall-clock timing in reports");
  app.add_option("--expect", expect_on, "force a reference check on (rays, contexts, uncolourable, best)")
      ->check(CLI::IsMember(ksr::known_checks()));
  app.add_option("--no-expect", expect_off, "disable a reference check")
      ->check(CLI::IsMember(ksr::known_checks()));

  bool all = false;
  std::string all_dir = "ksreal-out";
  long long k = ksr::default_k;
  std::string strategy = "distinct";
  int precision = 20;
  app.add_flag("--all", all, "run generate, realify and both certify modes");
  app.add_option("--dir", all_dir, "output directory for --all")->capture_default_str();

  auto *gen = app.add_subcommand("generate", "close the MUB seed and export the rays");
  std::string gen_out, seed_choice = "mub", bound = "3";
  std::size_t cap = 10000;
  gen->add_option("--out", gen_out, "ray file to write");
  gen->add_option("--seed-choice", seed_choice, "mub | basis-only")
      ->check(CLI::IsMember({"mub", "basis-only"}))
      ->capture_default_str();
  gen->add_option("--generator-bound", bound,
                  "max squared norm for generated rays, or 'none'")
      ->capture_default_str();
  gen->add_option("--cap", cap, "divergence guard")->capture_default_str();

  auto *rea = app.add_subcommand("realify", "rational phase search, faithfulness check, export");
  std::string rays_path, out_phases, out_vectors;
  rea->add_option("--rays", rays_path, "ray file")->required();
  rea->add_option("--K", k, "phase denominator, coprime to 6")->capture_default_str();
  rea->add_option("--strategy", strategy, "distinct | backtracking | greedy-random")
      ->check(CLI::IsMember({"distinct", "backtracking", "greedy-random"}))
      ->capture_default_str();
  rea->add_option("--out", out_vectors, "vector export file");
  rea->add_option("--out-phases", out_phases, "phase file");
  rea->add_option("--precision", precision, "significant digits of the export")
      ->check(CLI::Range(15, 90))
      ->capture_default_str();

  auto *cer = app.add_subcommand("certify", "KS colourability or covered-context maximum");
  std::string mode = "color", cert_out;
  cer->add_option("--rays", rays_path, "ray file")->required();
  cer->add_option("--mode", mode, "color | maximize")
      ->check(CLI::IsMember({"color", "maximize"}))
      ->capture_default_str();
  cer->add_option("--out", cert_out, "certificate file");

  auto *rep = app.add_subcommand("report", "structural summary and smallest working K");
  std::string out_edges, out_contexts;
  long long k_max = 200;
  rep->add_option("--rays", rays_path, "ray file")->required();
  rep->add_option("--edges", out_edges, "write the sorted edge list");
  rep->add_option("--contexts", out_contexts, "write the sorted context list");
  rep->add_option("--k-max", k_max, "largest K probed")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  ksr::expectations ex;
  for (const auto &name : expect_on)
    ex.overrides[name] = true;
  for (const auto &name : expect_off)
    ex.overrides[name] = false;

  try {
    if (all) {
      auto reports = ksr::cmd_all(all_dir, k, ksr::parse_strategy(strategy), seed, precision,
                                  threads, ex);
      for (const auto &r : reports)
        print(r, timing);
      return ksr::combined_exit_code(reports);
    }
    ksr::run_report r;
    if (*gen) {
      ksr::generate_options o;
      o.out_path = gen_out;
      o.seed_choice = seed_choice;
      if (bound == "none")
        o.generator_norm_bound.reset();
      else
        o.generator_norm_bound = ksr::bigint(bound);
      o.cap = cap;
      o.threads = threads;
      o.expect = ex;
      r = ksr::cmd_generate(o);
    } else if (*rea) {
      ksr::realify_options o;
      o.rays_path = rays_path;
      o.k = k;
      o.strategy = ksr::parse_strategy(strategy);
      o.seed = seed;
      o.out_phases = out_phases;
      o.out_vectors = out_vectors;
      o.precision = precision;
      o.threads = threads;
      r = ksr::cmd_realify(o);
    } else if (*cer) {
      ksr::certify_options o;
      o.rays_path = rays_path;
      o.mode = mode;
      o.out_path = cert_out;
      o.threads = threads;
      o.expect = ex;
      r = ksr::cmd_certify(o);
    } else if (*rep) {
      ksr::report_options o;
      o.rays_path = rays_path;
      o.out_edges = out_edges;
      o.out_contexts = out_contexts;
      o.k_max = k_max;
      o.seed = seed;
      o.threads = threads;
      r = ksr::cmd_report(o);
    } else {
      std::cout << app.help();
      return 1;
    }
    print(r, timing);
    return r.exit_code();
  } catch (const std::exception &e) {
    std::cerr << "ksreal: " << e.what() << '\n';
    return 1;
  }
}
