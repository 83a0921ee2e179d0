// Command-line front end: simulation, exact urn tables and the bound
// verification experiments.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "rdthin/rdthin.hpp"

namespace {

using namespace rdthin;

struct CommonFlags {
  std::vector<std::size_t> ns;
  std::uint64_t replicas = 1000;
  std::uint64_t seed = 1;
  std::string density = "uniform";
  std::vector<double> eps;
  std::vector<double> times;
  double horizon = 0.9;
  std::size_t grid = 90;
  std::size_t disc_m = 100000;
  std::string out;
  std::string format = "csv";
  unsigned threads = 1;
  double c_const = 1.0;
  bool timing = false;
};

void add_common(CLI::App* app, CommonFlags& f, bool particle_times) {
  app->add_option("--n", f.ns, "Particle counts (or ball / point counts)")->delimiter(',');
  app->add_option("--replicas", f.replicas, "Monte Carlo replicas")->check(CLI::PositiveNumber);
  app->add_option("--seed", f.seed, "Base seed");
  app->add_option("--density", f.density, "uniform | exp:<rate> | file:<path>");
  app->add_option("--eps", f.eps, "Deviation levels")->delimiter(',');
  if (particle_times) {
    app->add_option("--times", f.times, "Explicit evaluation times")->delimiter(',');
    app->add_option("--horizon", f.horizon, "Time horizon T of the uniform grid");
    app->add_option("--grid", f.grid, "Number of grid intervals N on [0, T]")->check(CLI::PositiveNumber);
    app->add_option("--disc-m", f.disc_m, "Atoms in the discretized limit measure")
        ->check(CLI::PositiveNumber);
  }
  app->add_option("--out", f.out, "Output file (default stdout)");
  app->add_option("--format", f.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--threads", f.threads, "Worker threads for replicas");
  app->add_option("--C", f.c_const, "Constant C in n_eps eps = 4 C log n_eps")
      ->check(CLI::PositiveNumber);
  app->add_flag("--timing", f.timing, "Record wall-clock runtime (output is no longer reproducible)");
}

ExperimentConfig make_config(Experiment kind, const CommonFlags& f) {
  ExperimentConfig cfg;
  cfg.kind = kind;
  if (!f.ns.empty()) cfg.ns = f.ns;
  cfg.replicas = f.replicas;
  cfg.seed = f.seed;
  cfg.density = f.density;
  if (!f.eps.empty()) cfg.eps = f.eps;
  cfg.times = f.times;
  cfg.horizon = f.horizon;
  cfg.grid = f.grid;
  cfg.disc_m = f.disc_m;
  cfg.threads = f.threads;
  cfg.bounds.c.value = f.c_const;
  cfg.timing = f.timing;
  return cfg;
}

/// Writes to --out or stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw std::runtime_error("cannot open " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

OutputFormat parse_format(const std::string& s) { return s == "json" ? OutputFormat::json : OutputFormat::csv; }

int emit_rows(const std::vector<ResultRow>& rows, const CommonFlags& f) {
  Sink sink(f.out);
  emit(sink.stream(), rows, parse_format(f.format));
  return all_bounds_ok(rows) ? 0 : 1;
}

/// "x:w,x:w,..." or a file of "x w" lines.
DiscreteMeasure parse_measure(const std::string& spec) {
  std::vector<double> atoms, weights;
  if (spec.rfind("file:", 0) == 0) {
    std::ifstream in(spec.substr(5));
    if (!in) throw std::runtime_error("cannot open " + spec.substr(5));
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream row(line);
      double x = 0.0, w = 0.0;
      if (row >> x >> w) {
        atoms.push_back(x);
        weights.push_back(w);
      }
    }
  } else {
    std::istringstream in(spec);
    std::string item;
    while (std::getline(in, item, ',')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) throw std::invalid_argument("expected x:w in '" + item + "'");
      atoms.push_back(std::stod(item.substr(0, colon)));
      weights.push_back(std::stod(item.substr(colon + 1)));
    }
  }
  return DiscreteMeasure(std::move(atoms), std::move(weights));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rdthin: removal-driven thinning particle system simulator and bound checker"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  // simulate
  CommonFlags sim;
  std::uint64_t sim_replica = 0;
  auto* simulate_cmd = app.add_subcommand("simulate", "Run one trajectory and write its event log");
  simulate_cmd->add_option("--n", sim.ns, "Particle count (even)")->required()->expected(1);
  simulate_cmd->add_option("--seed", sim.seed, "Base seed");
  simulate_cmd->add_option("--replica", sim_replica, "Replica index of the random stream");
  simulate_cmd->add_option("--density", sim.density, "uniform | exp:<rate> | file:<path>");
  simulate_cmd->add_option("--out", sim.out, "Output file (default stdout)");

  // urn
  CommonFlags urn;
  std::vector<double> urn_rhos;
  std::vector<std::size_t> urn_rs;
  std::size_t urn_cap = kDefaultUrnCap;
  bool urn_verify = false;
  auto* urn_cmd = app.add_subcommand("urn", "Exact law of the terminal red count");
  add_common(urn_cmd, urn, false);
  urn_cmd->add_option("--r", urn_rs, "Red counts (tabulation mode)")->delimiter(',');
  urn_cmd->add_option("--rho", urn_rhos, "Red fractions in (0,1)")->delimiter(',');
  urn_cmd->add_option("--cap", urn_cap, "Largest n for the exact computation");
  urn_cmd->add_flag("--verify", urn_verify, "Emit CLT and concentration rows instead of the pmf table");

  // thin
  CommonFlags thin;
  std::vector<std::size_t> thin_s;
  std::vector<std::string> thin_phi;
  double thin_cap = kExactThinningCap;
  auto* thin_cmd = app.add_subcommand("thin", "Thinning deviation tails versus the thinning bound");
  add_common(thin_cmd, thin, false);
  thin_cmd->add_option("--s", thin_s, "Retained counts (default r/2)")->delimiter(',');
  thin_cmd->add_option("--phi", thin_phi, "Test functions: indicator:c ramp:c cos:k tent:c")->delimiter(',');
  thin_cmd->add_option("--exact-cap", thin_cap, "Enumerate exactly when C(r,s) is at most this");

  // verify-loss, verify-one-point, verify-emp
  CommonFlags loss, one, emp;
  std::size_t loss_cap = kDefaultUrnCap;
  double one_m = 1.0;
  bool emp_jumps = false;
  auto* loss_cmd = app.add_subcommand("verify-loss", "Loss concentration, uniform and pointwise");
  add_common(loss_cmd, loss, true);
  loss_cmd->add_option("--urn-cap", loss_cap, "Largest n for the exact lower-bound rows");
  auto* one_cmd = app.add_subcommand("verify-one-point", "Empirical measure at fixed times");
  add_common(one_cmd, one, true);
  one_cmd->add_option("--M", one_m, "Constant M(eps, F0) of the one-point bound");
  auto* emp_cmd = app.add_subcommand("verify-emp", "Uniform-in-time concentration and decay");
  add_common(emp_cmd, emp, true);
  emp_cmd->add_flag("--jump-times", emp_jumps, "Also evaluate at every hit time (slow)");

  // bl
  std::string bl_mu, bl_nu;
  bool bl_oracle = false;
  auto* bl_cmd = app.add_subcommand("bl", "Bounded-Lipschitz distance between two discrete measures");
  bl_cmd->add_option("--mu", bl_mu, "x:w,x:w,... or file:<path>")->required();
  bl_cmd->add_option("--nu", bl_nu, "x:w,x:w,... or file:<path>")->required();
  bl_cmd->add_flag("--oracle", bl_oracle, "Also print the brute-force value (at most 8 atoms)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate_cmd->parsed()) {
      const auto density = parse_density(sim.density);
      RandomStream rng(sim.seed, static_cast<std::uint32_t>(Experiment::simulate), sim_replica);
      const auto traj = simulate(quantile_init(sim.ns.front(), density), rng);
      Sink sink(sim.out);
      write_trajectory_csv(sink.stream(), traj);
      return 0;
    }
    if (urn_cmd->parsed()) {
      if (urn_verify) {
        auto cfg = make_config(Experiment::urn_clt, urn);
        if (!urn_rhos.empty()) cfg.rhos = urn_rhos;
        cfg.urn_cap = urn_cap;
        return emit_rows(run_urn_clt(cfg), urn);
      }
      if (urn.ns.empty()) throw std::invalid_argument("urn: --n is required");
      Sink sink(urn.out);
      auto& os = sink.stream();
      os << "n,r,x,probability\n";
      for (const auto n : urn.ns) {
        std::vector<std::size_t> rs = urn_rs;
        for (const double rho : urn_rhos) rs.push_back(static_cast<std::size_t>(rho * static_cast<double>(n)));
        if (rs.empty()) rs.push_back(n / 2);
        for (const auto r : rs) {
          const auto law = exact_pmf({n, r}, urn_cap);
          for (const auto x : law.support()) {
            os << n << ',' << r << ',' << x << ',' << format_double(law.probability(x)) << '\n';
          }
          os << n << ',' << r << ",mean," << format_double(law.mean()) << '\n';
          os << n << ',' << r << ",variance," << format_double(law.variance()) << '\n';
        }
      }
      return 0;
    }
    if (thin_cmd->parsed()) {
      auto cfg = make_config(Experiment::thinning, thin);
      if (thin.ns.empty()) cfg.ns = {8, 16, 20};
      cfg.keeps = thin_s;
      if (!thin_phi.empty()) cfg.test_functions = thin_phi;
      cfg.exact_cap = thin_cap;
      return emit_rows(run_thinning(cfg), thin);
    }
    if (loss_cmd->parsed()) {
      auto cfg = make_config(Experiment::loss, loss);
      cfg.urn_cap = loss_cap;
      return emit_rows(run_loss_concentration(cfg), loss);
    }
    if (one_cmd->parsed()) {
      auto cfg = make_config(Experiment::one_point, one);
      if (one.times.empty()) cfg.times = {0.25, 0.5, 0.75};
      cfg.bounds.one_point_m.value = one_m;
      return emit_rows(run_one_point(cfg), one);
    }
    if (emp_cmd->parsed()) {
      auto cfg = make_config(Experiment::uniform_emp, emp);
      if (emp.ns.empty()) cfg.ns = {200, 2000, 20000};
      cfg.jump_times = emp_jumps;
      return emit_rows(run_uniform_emp(cfg), emp);
    }
    if (bl_cmd->parsed()) {
      const auto mu = parse_measure(bl_mu), nu = parse_measure(bl_nu);
      std::cout << format_double(bl_distance(mu, nu)) << '\n';
      if (bl_oracle) std::cout << format_double(bl_distance_oracle(mu, nu)) << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
