#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "kpz/stats.hpp"

namespace kpz {

// One value of a result cell.  Integers and booleans are kept apart from
// doubles so the writers can format each kind deterministically.
using CellValue = std::variant<long long, double, std::string, bool>;

// One row of a result table: ordered (column, value) pairs.  Every cell of an
// experiment carries the same columns in the same order.
struct Cell {
  std::vector<std::pair<std::string, CellValue>> fields;

  Cell& add(std::string key, CellValue v) {
    fields.emplace_back(std::move(key), std::move(v));
    return *this;
  }
};

// A finished experiment: resolved parameters, the per-cell table, the test
// battery, and the overall verdict.  Serialization (CSV and JSON) covers
// everything except runtime_seconds, so reruns with the same seed produce
// byte-identical output regardless of worker count.
struct ExperimentResult {
  std::string name;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::vector<Cell> cells;
  std::vector<TestReport> tests;
  bool pass = false;
  double runtime_seconds = 0.0;
};

// CSV: fixed header per experiment (the cell columns), `,` delimiter, `.`
// decimal point, LF line endings, doubles at full round-trip precision.
std::string to_csv(const ExperimentResult& result);

// JSON document {experiment, params, cells[], tests[], pass}, UTF-8,
// two-space indent, trailing newline.
std::string to_json_string(const ExperimentResult& result);

// Writes <name>.csv, <name>.json and <name>_manifest.json (the parameter
// echo) under out_dir.  Creates out_dir if needed.
void write_outputs(const ExperimentResult& result, const std::string& out_dir);

// ---------------------------------------------------------------------------

// Block independence suite over the coupled multi-boundary construction.
// Per replica, both models are realized and per-block summaries (block sums
// and first entries) are collected; the battery runs all pairwise
// quantile-binned chi-square tests, Pearson checks, adjacent-entry tests
// within a block, a three-way sign test when K = 3, and a deliberately
// overlapping-statistic control that must be flagged dependent.  Directions
// must be strictly increasing; an all-equal list is accepted as the
// single-direction control (every block then reads the same system, whose
// increments along a down-right path are still independent).
struct IndependenceConfig {
  std::string path_spec = "staircase:10";
  std::vector<double> rhos = {0.3, 0.7};  // one per block
  int replicas = 10000;
  std::uint64_t seed = 7;
  int window_margin = -1;  // < 0: automatic
  double alpha = 0.001;
  double quota = 0.95;  // minimum uncontaminated fraction
  int workers = 1;
};

ExperimentResult run_independence(const IndependenceConfig& cfg);

// Quenched endpoint-scaling experiment for the point-to-line polymer: for
// each (N, delta, m) the Monte Carlo mean of the quenched probability of
// {endpoint within delta N^(2/3) of m}, its standard error, the frequency of
// the tail event {probability >= exp(-log(delta)^2 sqrt(delta) N^(1/3))},
// and the doubling ratio against the delta/2 cell.  Per replica the cell
// probabilities are computed by extending one window, so monotonicity in
// delta holds exactly.
struct EndpointExperimentConfig {
  std::vector<int> N = {200};
  std::vector<double> delta = {0.05, 0.1, 0.2, 0.4};
  std::vector<int> m = {0};
  int replicas = 1000;
  std::uint64_t seed = 7;
  double shape_mu = 1.0;  // bulk inverse-gamma shape
  int workers = 1;
};

ExperimentResult run_endpoint_scaling(const EndpointExperimentConfig& cfg);

// Randomized stress of the queueing identities: per seed a row width, level
// counts and a well-separated rate schedule are drawn and both the nested
// and the dual-swap identities are checked at both temperatures.  Fixed
// adversarial cells (near-tie constant rows, the minimal k = n = 1 case) are
// appended.  Fails on any uncontaminated discrepancy beyond tolerance.
struct QueueingFuzzConfig {
  int width_lo = 30;
  int width_hi = 60;
  int max_levels = 4;  // cap on each of k and n
  int seeds = 100;
  std::uint64_t seed = 7;
  int workers = 1;
};

ExperimentResult run_queueing_fuzz(const QueueingFuzzConfig& cfg);

// Running-maximum bound suite: certified sub-exponential upper bound for
// centered log-gamma steps and for the two-sided log-gamma difference law,
// plus the lower-tail sqrt(N) scaling check with Gaussian steps (drift zero
// asserted in [0.35, 0.75]; a small negative drift run and an out-of-regime
// level are reported alongside).
struct AppendixBoundsConfig {
  double shape = 0.5;  // log-gamma step shape
  int n = 10000;
  std::vector<double> t_grid = {1.0, 2.0, 3.0};
  int trials = 100000;
  double diff_gap = 0.05;  // difference law shapes 1/2 -+ diff_gap
  int diff_trials = 4000;
  int lower_n = 1000;
  int lower_trials = 20000;
  std::vector<double> l_grid = {5.0, 1000.0};
  double drift = -0.01;
  std::uint64_t seed = 7;
  int workers = 1;  // accepted for interface uniformity; loops are internal
};

ExperimentResult run_appendix_bounds(const AppendixBoundsConfig& cfg);

// Marginal-law suite: KS tests of single-direction coupled-block increments
// against their stationary laws, per model, direction and rho (exponential
// rates 1-rho / rho at zero temperature; inverse-gamma shapes 1-rho / rho
// for the exponentiated polymer increments).
struct MarginalsConfig {
  std::vector<double> rhos = {0.3, 0.5, 0.7};
  int samples = 10000;  // per (model, rho, direction) family
  int path_steps = 5;   // staircase size; entries pooled across replicas
  std::uint64_t seed = 7;
  int window_margin = -1;
  double alpha = 0.001;
  double quota = 0.95;
  int workers = 1;
};

ExperimentResult run_marginals(const MarginalsConfig& cfg);

// Finite-horizon coalescence census (CGM): fraction of replicas whose
// geodesics from (1,0) and (0,1) coalesce before the characteristic target,
// agreement of the coalescence-form and limit-form increment values on those
// replicas (exact), and a stabilization diagnostic of the limit estimate
// between N/2 and N.
struct CoalescenceConfig {
  int N = 64;
  std::vector<double> rhos = {0.5};
  int replicas = 200;
  std::uint64_t seed = 7;
  int workers = 1;
};

ExperimentResult run_coalescence(const CoalescenceConfig& cfg);

}  // namespace kpz
