// kpzlab: command-line front end for the growth-model experiment suite.
//
// Each subcommand builds one experiment config, runs it, writes the CSV/JSON
// artifacts plus a manifest into the output directory, and echoes the report
// to stdout.  Exit status: 0 all asserted properties pass, 1 experiment
// failure (failing tests listed on stderr), 2 bad flags or configuration.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kpz/experiments.hpp"

namespace {

std::string default_out_dir() {
  const char* env = std::getenv("KPZLAB_OUT");
  return env && *env ? env : "out";
}

int finish(const kpz::ExperimentResult& result, const std::string& out_dir,
           const std::string& format) {
  kpz::write_outputs(result, out_dir);
  if (format == "csv") {
    std::cout << kpz::to_csv(result);
  } else {
    std::cout << kpz::to_json_string(result);
  }
  std::cerr << "wrote " << out_dir << "/" << result.name << ".{csv,json} (+manifest), "
            << result.tests.size() << " tests, " << result.runtime_seconds << " s\n";
  if (result.pass) return 0;
  for (const auto& t : result.tests) {
    if (!t.pass) {
      std::cerr << "FAIL " << t.name << ": statistic=" << t.statistic
                << " p=" << t.p_value << " alpha=" << t.alpha << " n=" << t.n << "\n";
    }
  }
  std::cerr << "FAIL " << result.name << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Growth-model experiment suite (corner growth and log-gamma polymer)"};
  app.require_subcommand(1);
  app.fallthrough();  // accept --out/--format after the subcommand as well

  std::string out_dir = default_out_dir();
  std::string format = "json";
  app.add_option("--out", out_dir, "Output directory (env KPZLAB_OUT)")
      ->capture_default_str();
  app.add_option("--format", format, "Report echoed to stdout")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  kpz::IndependenceConfig ind;
  int ind_K = 0;
  auto* c_ind = app.add_subcommand("independence",
                                   "Joint independence of multi-direction increment blocks");
  c_ind->add_option("--K", ind_K, "Number of directions (must match --rho)");
  c_ind->add_option("--rho", ind.rhos, "Direction parameters")->delimiter(',');
  c_ind->add_option("--path", ind.path_spec, "Down-right path spec")->capture_default_str();
  c_ind->add_option("--replicas", ind.replicas)->capture_default_str();
  c_ind->add_option("--seed", ind.seed)->capture_default_str();
  c_ind->add_option("--margin", ind.window_margin, "Window margin (-1 = auto)")
      ->capture_default_str();
  c_ind->add_option("--alpha", ind.alpha)->capture_default_str();
  c_ind->add_option("--quota", ind.quota, "Minimum uncontaminated fraction")
      ->capture_default_str();
  c_ind->add_option("--workers", ind.workers)->capture_default_str();

  kpz::EndpointExperimentConfig end;
  auto* c_end = app.add_subcommand("endpoint-scaling",
                                   "Quenched polymer endpoint mass near the diagonal");
  c_end->add_option("--N", end.N, "Path lengths")->delimiter(',');
  c_end->add_option("--delta", end.delta, "Window sizes in N^(2/3) units")->delimiter(',');
  c_end->add_option("--m", end.m, "Window offsets in lattice units")->delimiter(',');
  c_end->add_option("--replicas", end.replicas)->capture_default_str();
  c_end->add_option("--seed", end.seed)->capture_default_str();
  c_end->add_option("--shape", end.shape_mu, "Bulk inverse-gamma shape")->capture_default_str();
  c_end->add_option("--workers", end.workers)->capture_default_str();

  kpz::QueueingFuzzConfig fuzz;
  auto* c_fuzz = app.add_subcommand("queueing-fuzz",
                                    "Randomized queueing-operator identity checks");
  c_fuzz->add_option("--width-lo", fuzz.width_lo)->capture_default_str();
  c_fuzz->add_option("--width-hi", fuzz.width_hi)->capture_default_str();
  c_fuzz->add_option("--max-levels", fuzz.max_levels)->capture_default_str();
  c_fuzz->add_option("--seeds", fuzz.seeds, "Number of fuzz cases")->capture_default_str();
  c_fuzz->add_option("--seed", fuzz.seed)->capture_default_str();
  c_fuzz->add_option("--workers", fuzz.workers)->capture_default_str();

  kpz::AppendixBoundsConfig ab;
  auto* c_ab = app.add_subcommand("appendix-bounds",
                                  "Running-maximum tail bounds for centered log-gamma walks");
  c_ab->add_option("--shape", ab.shape)->capture_default_str();
  c_ab->add_option("--n", ab.n, "Walk length")->capture_default_str();
  c_ab->add_option("--t", ab.t_grid, "Upper-bound levels")->delimiter(',');
  c_ab->add_option("--trials", ab.trials)->capture_default_str();
  c_ab->add_option("--diff-gap", ab.diff_gap, "Shape offset for the difference family")
      ->capture_default_str();
  c_ab->add_option("--diff-trials", ab.diff_trials)->capture_default_str();
  c_ab->add_option("--lower-n", ab.lower_n)->capture_default_str();
  c_ab->add_option("--lower-trials", ab.lower_trials)->capture_default_str();
  c_ab->add_option("--l", ab.l_grid, "Lower-bound levels")->delimiter(',');
  c_ab->add_option("--drift", ab.drift)->capture_default_str();
  c_ab->add_option("--seed", ab.seed)->capture_default_str();
  c_ab->add_option("--workers", ab.workers)->capture_default_str();

  kpz::MarginalsConfig marg;
  auto* c_marg = app.add_subcommand("marginals",
                                    "Increment marginal laws along a staircase path");
  c_marg->add_option("--rho", marg.rhos, "Direction parameters")->delimiter(',');
  c_marg->add_option("--samples", marg.samples)->capture_default_str();
  c_marg->add_option("--path-steps", marg.path_steps)->capture_default_str();
  c_marg->add_option("--seed", marg.seed)->capture_default_str();
  c_marg->add_option("--margin", marg.window_margin, "Window margin (-1 = auto)")
      ->capture_default_str();
  c_marg->add_option("--alpha", marg.alpha)->capture_default_str();
  c_marg->add_option("--quota", marg.quota)->capture_default_str();
  c_marg->add_option("--workers", marg.workers)->capture_default_str();

  kpz::CoalescenceConfig coal;
  auto* c_coal = app.add_subcommand("coalescence",
                                    "Geodesic coalescence census and limit cross-checks");
  c_coal->add_option("--N", coal.N, "Direction scale")->capture_default_str();
  c_coal->add_option("--rho", coal.rhos, "Direction parameters")->delimiter(',');
  c_coal->add_option("--replicas", coal.replicas)->capture_default_str();
  c_coal->add_option("--seed", coal.seed)->capture_default_str();
  c_coal->add_option("--workers", coal.workers)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (c_ind->parsed()) {
      if (ind_K > 0 && ind_K != static_cast<int>(ind.rhos.size())) {
        std::cerr << "error: --K " << ind_K << " does not match " << ind.rhos.size()
                  << " values in --rho\n";
        return 2;
      }
      return finish(kpz::run_independence(ind), out_dir, format);
    }
    if (c_end->parsed()) return finish(kpz::run_endpoint_scaling(end), out_dir, format);
    if (c_fuzz->parsed()) return finish(kpz::run_queueing_fuzz(fuzz), out_dir, format);
    if (c_ab->parsed()) return finish(kpz::run_appendix_bounds(ab), out_dir, format);
    if (c_marg->parsed()) return finish(kpz::run_marginals(marg), out_dir, format);
    if (c_coal->parsed()) return finish(kpz::run_coalescence(coal), out_dir, format);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
