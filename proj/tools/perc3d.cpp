#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "perc3d.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kOperationalError = 1;
constexpr int kNotCertified = 2;

void print_matrix(std::ostream& out, const perc3d::Matrix3& m) {
  for (const auto& row : m) {
    out << "  " << row[0] << " " << row[1] << " " << row[2] << "\n";
  }
}

int cmd_plan(const std::string& direction, std::size_t trials, const std::string& alpha,
             const std::optional<std::string>& p0) {
  const auto dir = perc3d::parse_direction(direction);
  const perc3d::Rational p = p0 ? perc3d::parse_rational(*p0) : perc3d::default_p0(dir).value();
  const auto pl = perc3d::plan(dir, trials, perc3d::parse_rational(alpha), p);
  std::cout << pl.render();
  if (!p0) std::cout << "p0 source: " << perc3d::default_p0(dir).citation << "\n";
  return kOk;
}

int cmd_run(const std::string& config, const std::optional<std::string>& ledger, bool final_run,
            int workers) {
  const auto cfg = perc3d::load_config(config);
  perc3d::RunOptions opts;
  opts.workers = workers;
  opts.final_run = final_run;
  if (ledger) opts.ledger = *ledger;
  const auto start = std::chrono::steady_clock::now();
  const auto res = perc3d::run_experiment(cfg, opts);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto pl = perc3d::plan(cfg.mode, cfg.trials, cfg.alpha());
  std::cout << "output: " << cfg.output.string() << "\n";
  std::cout << "mode: " << perc3d::to_string(cfg.mode) << "  kind: " << perc3d::to_string(cfg.kind)
            << "  scale: " << cfg.scale << "  p: " << cfg.p_text << "\n";
  std::cout << "trials: " << cfg.trials << "  resumed: " << res.resumed
            << "  successes: " << res.successes << "  threshold m: " << pl.m << "\n";
  std::cout << "generator: " << cfg.generator << "  elapsed_s: " << secs << "\n";
  return kOk;
}

int cmd_report(const std::string& lower, const std::string& upper,
               const std::optional<std::string>& alpha) {
  std::optional<perc3d::Rational> a;
  if (alpha) a = perc3d::parse_rational(*alpha);
  const auto rep = perc3d::report(lower, upper, a);
  std::cout << rep.text;
  return rep.verdict.certified() ? kOk : kNotCertified;
}

int cmd_transfer_matrix(int k, bool no_symmetry, bool search, int workers) {
  const auto m = perc3d::transfer_matrix(k, {}, !no_symmetry, workers);
  std::cout << "k: " << k << "\n";
  std::cout << "convention: " << m.convention.describe() << "\n";
  std::cout << "start pairs: face-centre (2,0,0), face-edge (2,1,0), face-corner (2,1,1)\n";
  std::cout << "type order: face-centre, face-edge, face-corner\n";
  std::cout << "matrix:\n";
  print_matrix(std::cout, m.entries);
  if (k == 6) {
    const auto reference = perc3d::reference_m6();
    std::cout << "reference M_6:\n";
    print_matrix(std::cout, reference);
    std::cout << "reproduces reference: " << (m.entries == reference ? "yes" : "no") << "\n";
  }
  if (search) {
    const auto result = perc3d::search_conventions(k, perc3d::reference_m6(), workers);
    std::cout << result.report();
  }
  const auto eig = perc3d::dominant_eigenvalue(m.entries);
  std::cout << "dominant eigenvalue ~ " << eig.value << "  k-th root ~ "
            << std::pow(eig.value, 1.0 / k) << "\n";
  return kOk;
}

int cmd_verify_threshold(const std::string& source, int workers) {
  perc3d::Matrix3 m;
  if (source == "reference") {
    m = perc3d::reference_m6();
    std::cout << "matrix source: reference M_6\n";
  } else if (source == "enumerated") {
    const auto tm = perc3d::transfer_matrix(6, {}, true, workers);
    m = tm.entries;
    std::cout << "matrix source: enumerated (" << tm.convention.describe() << ")\n";
  } else {
    throw perc3d::DomainError("matrix source must be 'reference' or 'enumerated'");
  }
  print_matrix(std::cout, m);
  try {
    const auto cert = perc3d::verify_threshold(m);
    std::cout << cert.render();
    std::cout << "certified: yes\n";
    return kOk;
  } catch (const perc3d::CertificationFailure& e) {
    const auto poly = perc3d::characteristic_polynomial(m);
    std::cout << "a2 = " << poly.a2 << "\na1 = " << poly.a1 << "\na0 = " << poly.a0 << "\n";
    const auto eig = perc3d::dominant_eigenvalue(m);
    std::cout << "dominant eigenvalue ~ " << eig.value << "  sixth root ~ " << eig.sixth_root
              << "\n";
    std::cout << "certified: no (" << e.what() << ")\n";
    return kNotCertified;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rigorous Monte-Carlo confidence intervals for cubic-lattice percolation"};
  app.require_subcommand(1);

  int workers = 0;
  app.add_option("--workers", workers, "Worker threads (default: PERC3D_WORKERS or all cores)");

  auto* run = app.add_subcommand("run", "Run one seeded experiment from a config file");
  std::string config;
  std::optional<std::string> ledger;
  bool final_run = false;
  run->add_option("--config", config, "key=value experiment config")->required();
  run->add_option("--ledger", ledger, "Seed ledger file (default: seeds.ledger beside output)");
  run->add_flag("--final", final_run, "Reserve the seed range as a final run");

  auto* plan = app.add_subcommand("plan", "Certification threshold for N trials");
  std::string direction;
  std::size_t trials = 0;
  std::string alpha = "0.999999";
  std::optional<std::string> p0;
  plan->add_option("--direction", direction, "lower or upper")->required();
  plan->add_option("--trials", trials, "Number of trials N")->required();
  plan->add_option("--alpha", alpha, "Confidence level (exact decimal)");
  plan->add_option("--p0", p0, "Override the certification probability (e.g. 3/100)");

  auto* rep = app.add_subcommand("report", "Confidence interval from two record files");
  std::string lower_path;
  std::string upper_path;
  std::optional<std::string> report_alpha;
  rep->add_option("--lower", lower_path, "Lower-bound record file")->required();
  rep->add_option("--upper", upper_path, "Upper-bound record file")->required();
  rep->add_option("--alpha", report_alpha, "Confidence level (default: from the records)");

  auto* tm = app.add_subcommand("transfer-matrix", "Enumerate the path-count matrix M_k");
  int k = 6;
  bool no_symmetry = false;
  bool search = false;
  tm->add_option("--k", k, "Appended blocks per path")->required();
  tm->add_flag("--no-symmetry", no_symmetry, "Disable stabiliser symmetry reduction");
  tm->add_flag("--search", search, "Search counting conventions against the reference M_6");

  auto* vt = app.add_subcommand("verify-threshold", "Exact sign certificate for p0 = 3/100");
  std::string source = "reference";
  vt->add_option("--matrix", source, "reference or enumerated");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config, ledger, final_run, workers);
    if (*plan) return cmd_plan(direction, trials, alpha, p0);
    if (*rep) return cmd_report(lower_path, upper_path, report_alpha);
    if (*tm) return cmd_transfer_matrix(k, no_symmetry, search, workers);
    if (*vt) return cmd_verify_threshold(source, workers);
  } catch (const perc3d::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOperationalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOperationalError;
  }
  return kOperationalError;
}
