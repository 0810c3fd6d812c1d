#ifndef PINLAB_LAB_HPP
#define PINLAB_LAB_HPP

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace pinlab {

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int n_points = 0;
};

// least squares on (log x, log y); all data must be positive
RateFit fit_rate(const std::vector<std::pair<double, double>>& pairs);

// tiny arithmetic expressions: numbers, named variables, + - * / ^, parentheses
double eval_expr(const std::string& expr, const std::map<std::string, double>& vars);

enum class Experiment {
  CellRates,
  ScalarRates,
  SymmetricRates,
  RandomBirkhoff,
  MagneticEquiv,
  LimitsTable,
  AllenCahn,
};

struct SweepConfig {
  Experiment experiment = Experiment::ScalarRates;
  std::vector<double> eps_list;
  std::string delta_rule;  // expression in eps; empty means delta = eps
  int seeds = 1;
  int resolution = 8;      // nodes per unit length (per cell for cell runs)
  double domain = 1.0;
  std::string kind = "constant";
  double lo = 0.5, hi = 1.5, alpha = 0.5;
  double beta = 0.0;
  double hex = 0.0;
  int n_max = 3;
  double gamma = 0.0;
  double i0 = 0.0;
  std::string out;
  std::map<std::string, std::string> raw;
};

SweepConfig parse_config(const std::string& text);
SweepConfig load_config(const std::string& path);

struct SweepResult {
  std::vector<std::string> lines;  // full CSV including header and summary
  int failures = 0;
  int rows = 0;
};

SweepResult run_sweep(const SweepConfig& cfg, int workers = 1, double tol = 1e-10,
                      std::uint64_t seed = 1, bool allow_underresolved = false);

// column fit over a CSV produced by run_sweep; only rows with status "ok"
RateFit fit_csv(const std::vector<std::string>& lines, const std::string& xcol,
                const std::string& ycol);

}  // namespace pinlab

#endif
