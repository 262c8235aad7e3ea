// Command-line front end: distances, KDE, bandwidth selection, the two-sample
// test, bound checks, and the experiment drivers. Exit codes: 0 success,
// 2 input error, 3 numerical-failure flag raised by the computation.
#include <CLI11.hpp>
#include <Eigen/Dense>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <random>
#include <string>

#include "fh/adaptive.hpp"
#include "fh/distances.hpp"
#include "fh/harness.hpp"
#include "fh/inference.hpp"
#include "fh/kernels.hpp"
#include "fh/sample_set.hpp"
#include "fh/smoothing.hpp"
#include "fh/theory.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text << "\n";
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::invalid_argument("cannot write " + out_path);
    out << text << "\n";
  }
}

fh::RateQuantity quantity_from(const std::string& q) {
  if (q == "emp_fh") return fh::RateQuantity::EmpFh;
  if (q == "kde_fh") return fh::RateQuantity::KdeFh;
  if (q == "kde_l1") return fh::RateQuantity::KdeL1;
  if (q == "smoothed_gap") return fh::RateQuantity::SmoothedGap;
  throw std::invalid_argument("unknown quantity: " + q);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RKHS-ball probability metric toolkit"};
  app.require_subcommand(1);
  // --h is a real option on several subcommands, so keep help long-form only
  app.set_help_flag("--help", "print help");
  std::string out_path;
  app.add_option("--out", out_path, "write JSON result to a file instead of stdout");

  // dist
  auto* dist = app.add_subcommand("dist", "distance between two samples");
  std::string d_metric = "fh", d_x, d_y, d_family;
  double d_h = 0.0, d_g = 0.0, d_a = 1.0;
  dist->add_option("--metric", d_metric, "fh | kx | smoothed")->required();
  dist->add_option("--x", d_x, "first sample CSV")->required();
  dist->add_option("--y", d_y, "second sample CSV");
  dist->add_option("--family", d_family, "kernel family JSON file");
  dist->add_option("--h", d_h, "bandwidth for the first sample");
  dist->add_option("--g", d_g, "bandwidth for the second sample");
  dist->add_option("--a", d_a, "gaussian family upper endpoint (smoothed metric)");

  // kde
  auto* kde = app.add_subcommand("kde", "evaluate a kernel density estimate on a grid");
  std::string k_x, k_kernel;
  double k_h = 0.0, k_lo = 0.0, k_hi = 0.0;
  int k_nodes = 512;
  kde->add_option("--x", k_x, "sample CSV")->required();
  kde->add_option("--kernel", k_kernel, "smoothing kernel JSON file")->required();
  kde->add_option("--h", k_h, "bandwidth")->required();
  kde->add_option("--lo", k_lo, "grid start")->required();
  kde->add_option("--hi", k_hi, "grid end")->required();
  kde->add_option("--nodes", k_nodes, "grid nodes");

  // lepski
  auto* lep = app.add_subcommand("lepski", "data-driven bandwidth selection");
  std::string l_x, l_kernel, l_family;
  fh::LepskiConfig lcfg;
  lep->add_option("--x", l_x, "sample CSV")->required();
  lep->add_option("--kernel", l_kernel, "smoothing kernel JSON file")->required();
  lep->add_option("--family", l_family, "kernel family JSON file")->required();
  lep->add_option("--rho", lcfg.rho, "geometric grid ratio");
  lep->add_option("--A", lcfg.A, "Lepski constant");
  lep->add_flag("!--no-fh-cap", lcfg.use_fh_cap, "drop the F_H cap condition");

  // twosample
  auto* ts = app.add_subcommand("twosample", "permutation two-sample test");
  std::string t_x, t_y;
  double t_h = 0.0, t_g = 0.0, t_a = 1.0, t_alpha = 0.05;
  int t_B = 199;
  std::uint64_t t_seed = 1;
  ts->add_option("--x", t_x)->required();
  ts->add_option("--y", t_y)->required();
  ts->add_option("--h", t_h, "bandwidth for x");
  ts->add_option("--g", t_g, "bandwidth for y");
  ts->add_option("--a", t_a, "gaussian family upper endpoint");
  ts->add_option("--B", t_B, "permutations");
  ts->add_option("--alpha", t_alpha, "level");
  ts->add_option("--seed", t_seed, "seed");

  // check
  auto* chk = app.add_subcommand("check", "audit a probabilistic bound");
  std::string c_which, c_config;
  chk->add_option("which", c_which, "chaos | massart | concentration")->required();
  chk->add_option("--config", c_config, "config JSON file")->required();

  // rates
  auto* rates = app.add_subcommand("rates", "rate-of-convergence experiment");
  std::string r_quantity = "emp_fh", r_config, r_preset;
  bool r_tidy = false;
  rates->add_option("--quantity", r_quantity, "emp_fh | kde_fh | kde_l1 | smoothed_gap");
  rates->add_option("--config", r_config, "full config JSON file");
  rates->add_option("--preset", r_preset, "built-in config (d1)");
  rates->add_flag("--tidy", r_tidy, "emit tidy CSV instead of JSON");

  // clt
  auto* clt = app.add_subcommand("clt", "CLT-spread experiment");
  std::string cl_config;
  clt->add_option("--config", cl_config, "config JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (dist->parsed()) {
      fh::SampleSet X = fh::load_csv(d_x);
      fh::DistanceEstimate est;
      if (d_metric == "fh" || d_metric == "kx") {
        if (d_y.empty() || d_family.empty())
          throw std::invalid_argument("dist: --y and --family required for " + d_metric);
        fh::SampleSet Y = fh::load_csv(d_y);
        fh::KernelFamily fam = fh::KernelFamily::from_json_file(d_family);
        est = d_metric == "fh" ? fh::sup_mmd(fam, X, Y) : fh::kx_distance(fam, X, Y);
      } else if (d_metric == "smoothed") {
        if (d_y.empty()) {
          est = fh::smoothed_empirical_gauss(d_a, d_h, X);
        } else {
          fh::SampleSet Y = fh::load_csv(d_y);
          est = fh::smoothed_cross_gauss(X, d_h, Y, d_g, d_a);
        }
      } else {
        throw std::invalid_argument("dist: unknown metric " + d_metric);
      }
      emit(est.to_json_string(), out_path);
      return est.budget_exhausted ? 3 : 0;
    }

    if (kde->parsed()) {
      fh::SampleSet X = fh::load_csv(k_x);
      fh::SmoothingKernel K = fh::kernel_from_json_string(slurp(k_kernel));
      if (X.dim() != 1) throw std::invalid_argument("kde: grid output is d = 1 only");
      if (k_nodes < 2 || !(k_lo < k_hi)) throw std::invalid_argument("kde: bad grid");
      Eigen::MatrixXd grid(k_nodes, 1);
      for (int i = 0; i < k_nodes; ++i)
        grid(i, 0) = k_lo + (k_hi - k_lo) * i / (k_nodes - 1.0);
      Eigen::VectorXd vals = fh::kde_on_grid(K, k_h, X, grid);
      nlohmann::json j;
      j["x"] = std::vector<double>(grid.data(), grid.data() + k_nodes);
      j["density"] = std::vector<double>(vals.data(), vals.data() + k_nodes);
      emit(j.dump(), out_path);
      return 0;
    }

    if (lep->parsed()) {
      fh::SampleSet X = fh::load_csv(l_x);
      fh::SmoothingKernel K = fh::kernel_from_json_string(slurp(l_kernel));
      fh::KernelFamily fam = fh::KernelFamily::from_json_file(l_family);
      fh::BandwidthSelection sel = fh::lepski_bandwidth(X, K, fam, lcfg);
      emit(sel.to_json_string(), out_path);
      return sel.fallback ? 3 : 0;
    }

    if (ts->parsed()) {
      fh::SampleSet X = fh::load_csv(t_x);
      fh::SampleSet Y = fh::load_csv(t_y);
      fh::TestResult res = fh::two_sample_test(X, Y, t_h, t_g, t_a, t_B, t_alpha, t_seed);
      emit(res.to_json_string(), out_path);
      return res.degenerate ? 3 : 0;
    }

    if (chk->parsed()) {
      nlohmann::json cfg = nlohmann::json::parse(slurp(c_config));
      if (c_which == "chaos") {
        fh::KernelFamily fam = fh::KernelFamily::from_json_string(cfg.at("family").dump());
        fh::DistributionSpec spec =
            fh::DistributionSpec::from_json_string(cfg.at("dist").dump());
        fh::SampleSet X = fh::sample_distribution(spec, cfg.at("n").get<int>(),
                                                  cfg.value("seed", 1));
        double se = 0.0;
        double v = fh::chaos_sup(fam, fam.param_grid(cfg.value("grid_size", 16)), X,
                                 cfg.value("n_eps", 200), cfg.value("seed", 1) + 1, &se);
        nlohmann::json j;
        j["value"] = v;
        j["stderr"] = se;
        emit(j.dump(), out_path);
        return 0;
      }
      if (c_which == "massart") {
        int l = cfg.value("l", 10), card = cfg.value("card", 32);
        std::mt19937_64 rng(cfg.value("seed", 1));
        std::normal_distribution<double> Z(0.0, 1.0);
        std::vector<Eigen::MatrixXd> A_set;
        for (int a = 0; a < card; ++a) {
          Eigen::MatrixXd M = Eigen::MatrixXd::Zero(l, l);
          for (int i = 0; i < l; ++i)
            for (int j = i + 1; j < l; ++j) M(i, j) = Z(rng);
          A_set.push_back(M);
        }
        fh::BoundReport rep =
            fh::massart_check(A_set, cfg.value("theta", 0.5), cfg.value("n_eps", 1000),
                              cfg.value("seed", 1) + 1, cfg.value("exhaustive", true));
        emit(rep.to_json_string(), out_path);
        return rep.pass ? 0 : 3;
      }
      if (c_which == "concentration") {
        fh::KernelFamily fam = fh::KernelFamily::from_json_string(cfg.at("family").dump());
        fh::DistributionSpec spec =
            fh::DistributionSpec::from_json_string(cfg.at("dist").dump());
        fh::BoundReport rep = fh::concentration_check(
            fam, spec, cfg.at("n").get<int>(), cfg.at("tau").get<double>(),
            cfg.value("trials", 200), cfg.value("seed", 1));
        emit(rep.to_json_string(), out_path);
        return rep.pass ? 0 : 3;
      }
      throw std::invalid_argument("check: unknown audit " + c_which);
    }

    if (rates->parsed()) {
      fh::RateConfig cfg;
      cfg.quantity = quantity_from(r_quantity);
      if (!r_config.empty()) {
        nlohmann::json j = nlohmann::json::parse(slurp(r_config));
        cfg.spec = fh::DistributionSpec::from_json_string(j.at("spec").dump());
        cfg.family_a = j.value("family_a", 1.0);
        cfg.n_list = j.at("n_list").get<std::vector<int>>();
        cfg.reps = j.value("reps", 30);
        cfg.order = j.value("order", 2);
        cfg.s = j.value("s", 1);
        cfg.use_lepski = j.value("use_lepski", false);
        cfg.lepski_A = j.value("lepski_A", 0.2);
        cfg.bandwidth_constant = j.value("bandwidth_constant", 1.0);
        cfg.sigma_grid = j.value("sigma_grid", 32);
        cfg.seed = j.value("seed", 1);
      } else if (r_preset == "d1") {
        cfg.spec = fh::DistributionSpec::std_normal(1);
        cfg.n_list = {50, 100, 200, 400, 800};
        cfg.reps = 20;
      } else {
        throw std::invalid_argument("rates: need --config or --preset d1");
      }
      fh::ExperimentReport rep = fh::rate_experiment(cfg);
      emit(r_tidy ? rep.to_tidy_csv() : rep.to_json_string(), out_path);
      return 0;
    }

    if (clt->parsed()) {
      nlohmann::json j = nlohmann::json::parse(slurp(cl_config));
      fh::CltConfig cfg;
      cfg.spec = fh::DistributionSpec::from_json_string(j.at("spec").dump());
      cfg.family_a = j.value("family_a", 1.0);
      cfg.n_list = j.at("n_list").get<std::vector<int>>();
      cfg.reps = j.value("reps", 200);
      cfg.sigma_grid = j.value("sigma_grid", 32);
      cfg.seed = j.value("seed", 1);
      fh::ExperimentReport rep = fh::clt_spread_experiment(cfg);
      emit(rep.to_json_string(), out_path);
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
