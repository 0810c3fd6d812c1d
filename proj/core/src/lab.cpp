#include "pinlab/lab.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "pinlab/allencahn.hpp"
#include "pinlab/limits.hpp"
#include "pinlab/magnetic.hpp"
#include "pinlab/scalar.hpp"

namespace pinlab {

RateFit fit_rate(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 3) throw std::invalid_argument("fit_rate: need at least 3 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (auto [x, y] : pairs) {
    if (x <= 0.0 || y <= 0.0) throw std::invalid_argument("fit_rate: data must be positive");
    const double lx = std::log(x), ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    syy += ly * ly;
  }
  const double n = static_cast<double>(pairs.size());
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw std::invalid_argument("fit_rate: degenerate abscissae");
  RateFit f;
  f.n_points = static_cast<int>(pairs.size());
  f.slope = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / n;
  const double sst = syy - sy * sy / n;
  double sse = 0.0;
  for (auto [x, y] : pairs) {
    const double r = std::log(y) - (f.intercept + f.slope * std::log(x));
    sse += r * r;
  }
  f.r2 = sst > 0.0 ? std::clamp(1.0 - sse / sst, 0.0, 1.0) : 1.0;
  return f;
}

namespace {

struct ExprParser {
  const std::string& s;
  std::size_t pos = 0;
  const std::map<std::string, double>& vars;

  void skip() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eat(char c) {
    skip();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& what) {
    throw std::invalid_argument("expression error at position " + std::to_string(pos) +
                                ": " + what + " in '" + s + "'");
  }

  double expr() {
    double v = term();
    for (;;) {
      if (eat('+')) v += term();
      else if (eat('-')) v -= term();
      else return v;
    }
  }
  double term() {
    double v = power();
    for (;;) {
      if (eat('*')) v *= power();
      else if (eat('/')) v /= power();
      else return v;
    }
  }
  double power() {
    const double base = unary();
    if (eat('^')) return std::pow(base, power());  // right associative
    return base;
  }
  double unary() {
    if (eat('-')) return -unary();
    return primary();
  }
  double primary() {
    skip();
    if (pos >= s.size()) fail("unexpected end");
    if (eat('(')) {
      const double v = expr();
      if (!eat(')')) fail("expected ')'");
      return v;
    }
    const char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      const double v = std::stod(s.substr(pos), &used);
      pos += used;
      return v;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos;
      while (end < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[end])) || s[end] == '_'))
        ++end;
      const std::string name = s.substr(pos, end - pos);
      auto it = vars.find(name);
      if (it == vars.end()) fail("unknown name '" + name + "'");
      pos = end;
      return it->second;
    }
    fail("unexpected character");
  }
};

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                        (s.front() == '\'' && s.back() == '\'')))
    return s.substr(1, s.size() - 2);
  return s;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(eval_expr(item, {}));
  }
  return out;
}

}  // namespace

double eval_expr(const std::string& e, const std::map<std::string, double>& vars) {
  ExprParser p{e, 0, vars};
  const double v = p.expr();
  p.skip();
  if (p.pos != e.size()) p.fail("trailing input");
  return v;
}

SweepConfig parse_config(const std::string& text) {
  SweepConfig cfg;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: expected key = value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = unquote(trim(line.substr(eq + 1)));
    cfg.raw[key] = val;
  }

  auto get = [&](const std::string& k) -> const std::string* {
    auto it = cfg.raw.find(k);
    return it == cfg.raw.end() ? nullptr : &it->second;
  };

  if (const auto* v = get("experiment")) {
    static const std::map<std::string, Experiment> names = {
        {"cell_rates", Experiment::CellRates},
        {"scalar_rates", Experiment::ScalarRates},
        {"symmetric_rates", Experiment::SymmetricRates},
        {"random_birkhoff", Experiment::RandomBirkhoff},
        {"magnetic_equiv", Experiment::MagneticEquiv},
        {"limits_table", Experiment::LimitsTable},
        {"allen_cahn", Experiment::AllenCahn},
    };
    auto it = names.find(*v);
    if (it == names.end())
      throw std::invalid_argument("config: unknown experiment '" + *v + "'");
    cfg.experiment = it->second;
  } else {
    throw std::invalid_argument("config: missing 'experiment'");
  }

  if (const auto* v = get("eps")) cfg.eps_list = parse_list(*v);
  if (cfg.eps_list.empty() && cfg.experiment != Experiment::LimitsTable)
    throw std::invalid_argument("config: missing or empty 'eps'");
  if (const auto* v = get("pinning.delta_rule")) cfg.delta_rule = *v;
  if (const auto* v = get("delta_rule")) cfg.delta_rule = *v;
  if (const auto* v = get("seeds")) cfg.seeds = static_cast<int>(eval_expr(*v, {}));
  if (const auto* v = get("resolution")) cfg.resolution = static_cast<int>(eval_expr(*v, {}));
  if (const auto* v = get("domain")) cfg.domain = eval_expr(*v, {});
  if (const auto* v = get("kind")) cfg.kind = *v;
  if (const auto* v = get("lo")) cfg.lo = eval_expr(*v, {});
  if (const auto* v = get("hi")) cfg.hi = eval_expr(*v, {});
  if (const auto* v = get("alpha")) cfg.alpha = eval_expr(*v, {});
  if (const auto* v = get("beta")) cfg.beta = eval_expr(*v, {});
  if (const auto* v = get("hex")) cfg.hex = eval_expr(*v, {});
  if (const auto* v = get("n_max")) cfg.n_max = static_cast<int>(eval_expr(*v, {}));
  if (const auto* v = get("gamma")) cfg.gamma = eval_expr(*v, {});
  if (const auto* v = get("i0")) cfg.i0 = eval_expr(*v, {});
  if (const auto* v = get("out")) cfg.out = *v;
  if (cfg.seeds < 1) throw std::invalid_argument("config: seeds must be >= 1");

  // warn when the delta rule leaves the delta << eps regime
  if (!cfg.delta_rule.empty() && cfg.eps_list.size() >= 1) {
    const double e1 = cfg.eps_list.front();
    const double d1 = eval_expr(cfg.delta_rule, {{"eps", e1}});
    const double d2 = eval_expr(cfg.delta_rule, {{"eps", e1 * 0.5}});
    if (d1 > 0.0 && d2 > 0.0) {
      const double q = std::log(d1 / d2) / std::log(2.0);
      if (q < 1.0 - 1e-9)
        std::cerr << "warning: delta rule grows slower than eps (exponent "
                  << q << ")\n";
    }
  }
  return cfg;
}

SweepConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

namespace {

CellFunction make_cell(const SweepConfig& cfg) {
  if (cfg.kind == "constant") return CellFunction::constant(cfg.lo);
  if (cfg.kind == "checkerboard") return CellFunction::checkerboard(cfg.lo, cfg.hi);
  if (cfg.kind == "symmetric_checkerboard")
    return CellFunction::symmetric_checkerboard(cfg.lo, cfg.hi);
  if (cfg.kind == "trig") return CellFunction::trig(cfg.alpha);
  throw std::invalid_argument("config: unknown cell kind '" + cfg.kind + "'");
}

struct Job {
  double eps = 0.0;
  double delta = 0.0;
  std::uint64_t seed = 0;
};

struct RowOut {
  std::string line;
  bool ok = false;
  double x = 0.0, y = 0.0;  // fit data when ok and y above noise
};

int needed_resolution(double eps, double delta) {
  const double scale = std::min(eps, delta);
  return static_cast<int>(std::ceil(8.0 / scale));
}

RowOut scalar_style_row(const SweepConfig& cfg, const Job& job, double tol,
                        bool allow_underresolved) {
  RowOut out;
  std::ostringstream os;
  os.precision(17);
  try {
    const double eps = job.eps, delta = job.delta;
    const double chi = delta / eps;
    int res = cfg.resolution;
    std::string status = "ok";
    const int need = needed_resolution(eps, delta);
    if (res < need) {
      if (allow_underresolved)
        status = "underresolved";
      else
        res = need;
    }

    double sup_error = 0, l2 = 0, grad_ratio = 0, energy = 0, el = 0;
    int iters = 0;
    double drift = 0;
    if (cfg.experiment == Experiment::CellRates ||
        cfg.experiment == Experiment::SymmetricRates) {
      // solve on the unit cell, statistics transfer by periodicity
      const CellFunction cell = make_cell(cfg);
      const CellSolve cs = cell_minimize(cell, chi, std::max(cfg.resolution, 8), tol);
      ScalarField dev = cs.Uhat;
      for (double& x : dev.v) x -= 1.0;
      for (double x : dev.v) sup_error = std::max(sup_error, std::abs(x));
      l2 = std::sqrt(integrate_product(dev, dev));
      grad_ratio = eps * grad_sup(cs.Uhat) / delta;
      energy = cs.energy;
      el = cs.el_residual;
      iters = 0;
    } else if (cfg.experiment == Experiment::ScalarRates ||
               cfg.experiment == Experiment::RandomBirkhoff) {
      const Grid g = build_grid(cfg.domain, cfg.domain, res);
      PinningField p;
      if (cfg.experiment == Experiment::RandomBirkhoff) {
        RandomCellLaw law({cfg.lo, cfg.hi}, {0.5, 0.5});
        p = sample_random(law, delta, job.seed, g);
      } else {
        p = sample_periodic(make_cell(cfg), delta, g);
      }
      const ScalarSolve s = minimize_scalar(p, eps, tol);
      const double target = std::sqrt(p.target_mean);
      const ScalarDiagnostics d = scalar_diagnostics(s, eps, target);
      sup_error = d.sup_error;
      l2 = d.l2_error;
      grad_ratio = d.grad_bound_ratio;
      energy = s.energy;
      el = s.el_residual;
      iters = s.iterations;
      drift = empirical_mean_drift(p);
    } else {
      throw std::logic_error("scalar_style_row: wrong experiment");
    }

    os << job.eps << "," << job.delta << "," << (job.delta / job.eps) << ","
       << cfg.kind << "," << job.seed << "," << sup_error << "," << l2 << ","
       << grad_ratio << "," << energy << "," << el << "," << iters << "," << status;
    out.ok = status == "ok";
    if (cfg.experiment == Experiment::RandomBirkhoff) {
      out.x = job.delta;
      out.y = drift;
    } else {
      out.x = job.delta;
      out.y = sup_error;
    }
  } catch (const std::exception& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), ',', ';');
    os << job.eps << "," << job.delta << "," << (job.eps > 0 ? job.delta / job.eps : 0)
       << "," << cfg.kind << "," << job.seed << ",nan,nan,nan,nan,nan,0,failed:" << msg;
    out.ok = false;
  }
  out.line = os.str();
  return out;
}

}  // namespace

SweepResult run_sweep(const SweepConfig& cfg, int workers, double tol, std::uint64_t seed,
                      bool allow_underresolved) {
  SweepResult result;

  if (cfg.experiment == Experiment::LimitsTable) {
    result.lines.push_back("n,f_eps,g_eps,H_n_root,H_n_asymptotic,K_n,min_w_n,status");
    try {
      const double eps = cfg.eps_list.empty() ? 1e-4 : cfg.eps_list.front();
      const Grid g = build_grid(cfg.domain, cfg.domain, std::max(cfg.resolution, 32));
      const LimitFields lf = solve_limit_fields(g);
      double I0 = cfg.i0;
      if (cfg.raw.find("i0") == cfg.raw.end())
        I0 = minimize_i_mu(lf.Qform, 3.0 / std::sqrt(std::sqrt(
                                          lf.Qform.qxx * lf.Qform.qyy)), 8);
      const auto rows = critical_fields(cfg.n_max, eps, lf, cfg.gamma, I0);
      for (const auto& r : rows) {
        std::ostringstream os;
        os.precision(17);
        os << r.n << "," << r.f_eps << "," << r.g_eps << "," << r.H_n_root << ","
           << r.H_n_asymptotic << "," << r.K_n << "," << r.min_w_n << ",ok";
        result.lines.push_back(os.str());
        ++result.rows;
      }
    } catch (const std::exception& e) {
      std::string msg = e.what();
      std::replace(msg.begin(), msg.end(), ',', ';');
      result.lines.push_back("0,nan,nan,nan,nan,nan,nan,failed:" + msg);
      ++result.failures;
    }
    result.lines.push_back("# failures=" + std::to_string(result.failures));
    return result;
  }

  if (cfg.experiment == Experiment::AllenCahn) {
    result.lines.push_back("eps,delta,beta,energy,interface_length,per_length_constant,lagrange,status");
    for (double eps : cfg.eps_list) {
      const double delta = cfg.delta_rule.empty()
                               ? eps
                               : eval_expr(cfg.delta_rule, {{"eps", eps}});
      std::ostringstream os;
      os.precision(17);
      try {
        int res = cfg.resolution;
        const int need = needed_resolution(eps, delta);
        std::string status = "ok";
        if (res < need) {
          if (allow_underresolved)
            status = "underresolved";
          else
            res = need;
        }
        const Grid g = build_grid(cfg.domain, cfg.domain, res);
        const PinningField p = cfg.kind == "constant"
                                   ? sample_periodic(CellFunction::constant(cfg.lo), 1.0, g)
                                   : sample_periodic(make_cell(cfg), delta, g);
        const ACSolve s = minimize_ac(p, eps, cfg.beta, g);
        os << eps << "," << delta << "," << cfg.beta << "," << s.energy << ","
           << s.interface_length << "," << s.per_length_constant << "," << s.lagrange
           << "," << status;
        ++result.rows;
      } catch (const std::exception& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), ',', ';');
        os << eps << "," << delta << "," << cfg.beta << ",nan,nan,nan,nan,failed:" << msg;
        ++result.failures;
      }
      result.lines.push_back(os.str());
    }
    result.lines.push_back("# failures=" + std::to_string(result.failures));
    return result;
  }

  if (cfg.experiment == Experiment::MagneticEquiv) {
    result.lines.push_back(
        "eps,delta,chi,kind,seed,sup_error,l2_error,grad_ratio,energy,el_residual,iters,status");
    for (double eps : cfg.eps_list) {
      const double delta = cfg.delta_rule.empty()
                               ? eps * eps / 4.0
                               : eval_expr(cfg.delta_rule, {{"eps", eps}});
      std::ostringstream os;
      os.precision(17);
      try {
        const int res = std::max(cfg.resolution, needed_resolution(eps, delta));
        const Grid g = build_grid(cfg.domain, cfg.domain, res);
        const PinningField p = sample_periodic(make_cell(cfg), delta, g);
        const ScalarSolve us = minimize_scalar(p, eps, tol);
        GLState st = make_vortex_state(
            g, {{cfg.domain / 2, cfg.domain / 2}}, {1}, eps, cfg.hex);
        ComplexField u = st.u;
        for (std::size_t n = 0; n < u.re.size(); ++n) {
          u.re[n] *= us.U.v[n];
          u.im[n] *= us.U.v[n];
        }
        const QuasiminReport q =
            quasiminimizer_report(u, st.A1, st.A2, p, us.U, eps, cfg.hex);
        ScalarField dev = us.U;
        for (double& x : dev.v) x -= 1.0;
        double sup = 0;
        for (double x : dev.v) sup = std::max(sup, std::abs(x));
        os << eps << "," << delta << "," << delta / eps << "," << cfg.kind << ",0,"
           << sup << "," << std::abs(q.ratio - 1.0) << ","
           << (sup > 0 ? std::abs(q.ratio - 1.0) / sup : 0.0) << "," << q.denoised
           << "," << q.unpinned_of_v << ",0,ok";
        ++result.rows;
      } catch (const std::exception& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), ',', ';');
        os << eps << "," << delta << ",nan," << cfg.kind
           << ",0,nan,nan,nan,nan,nan,0,failed:" << msg;
        ++result.failures;
      }
      result.lines.push_back(os.str());
    }
    result.lines.push_back("# failures=" + std::to_string(result.failures));
    return result;
  }

  // scalar-style sweeps over (eps, delta, seed)
  std::vector<Job> jobs;
  for (double eps : cfg.eps_list) {
    const double delta =
        cfg.delta_rule.empty() ? eps : eval_expr(cfg.delta_rule, {{"eps", eps}});
    if (cfg.experiment == Experiment::RandomBirkhoff) {
      for (int s = 0; s < cfg.seeds; ++s) jobs.push_back({eps, delta, seed + s});
    } else {
      jobs.push_back({eps, delta, seed});
    }
  }

  std::vector<RowOut> rows(jobs.size());
  const int nw = std::max(1, workers);
  for (std::size_t base = 0; base < jobs.size(); base += nw) {
    std::vector<std::future<RowOut>> fut;
    const std::size_t end = std::min(jobs.size(), base + nw);
    for (std::size_t k = base; k < end; ++k)
      fut.push_back(std::async(std::launch::async, [&, k] {
        return scalar_style_row(cfg, jobs[k], tol, allow_underresolved);
      }));
    for (std::size_t k = base; k < end; ++k) rows[k] = fut[k - base].get();
  }

  result.lines.push_back(
      "eps,delta,chi,kind,seed,sup_error,l2_error,grad_ratio,energy,el_residual,iters,status");
  std::vector<std::pair<double, double>> fit_data;
  for (const auto& r : rows) {
    result.lines.push_back(r.line);
    ++result.rows;
    if (!r.ok) {
      if (r.line.find("failed:") != std::string::npos) ++result.failures;
      continue;
    }
    if (r.x > 0.0 && r.y > 100.0 * tol) fit_data.emplace_back(r.x, r.y);
  }

  if (fit_data.size() >= 3) {
    const RateFit f = fit_rate(fit_data);
    std::ostringstream os;
    os.precision(17);
    os << "# fit slope=" << f.slope << " intercept=" << f.intercept << " r2=" << f.r2
       << " n=" << f.n_points;
    result.lines.push_back(os.str());
  } else {
    result.lines.push_back("# fit status=degenerate");
  }
  result.lines.push_back("# failures=" + std::to_string(result.failures));
  return result;
}

RateFit fit_csv(const std::vector<std::string>& lines, const std::string& xcol,
                const std::string& ycol) {
  if (lines.empty()) throw std::invalid_argument("fit_csv: empty input");
  std::vector<std::string> header;
  {
    std::stringstream ss(lines.front());
    std::string col;
    while (std::getline(ss, col, ',')) header.push_back(col);
  }
  const auto idx_of = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    throw std::invalid_argument("fit_csv: no column '" + name + "'");
  };
  const int xi = idx_of(xcol), yi = idx_of(ycol);
  int si = -1;
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == "status") si = static_cast<int>(i);

  std::vector<std::pair<double, double>> data;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    if (lines[ln].empty() || lines[ln][0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(lines[ln]);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() < header.size()) continue;
    if (si >= 0 && cells[si] != "ok") continue;
    try {
      const double x = std::stod(cells[xi]);
      const double y = std::stod(cells[yi]);
      if (x > 0.0 && y > 0.0) data.emplace_back(x, y);
    } catch (...) {
      continue;
    }
  }
  return fit_rate(data);
}

}  // namespace pinlab
