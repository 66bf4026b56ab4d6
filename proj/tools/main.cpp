#include "wcalc/energy.hpp"
#include "wcalc/families.hpp"
#include "wcalc/hopflax.hpp"
#include "wcalc/io.hpp"
#include "wcalc/mollifier.hpp"
#include "wcalc/selftest.hpp"
#include "wcalc/transport.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace wcalc;

std::string plan_csv(const TransportPlan& plan) {
  std::ostringstream os;
  os << "i,j,mass,cost_ij\n";
  for (const auto& e : plan.entries()) {
    const double cij = (plan.source().atom(e.i) - plan.target().atom(e.j)).squaredNorm();
    os << e.i << "," << e.j << "," << format_double(e.mass) << "," << format_double(cij)
       << "\n";
  }
  return os.str();
}

FiniteMetricSpace load_space(const std::string& path) {
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    const Json j = load_json(path);
    require(j.contains("measures") && j["measures"].is_array(),
            "space file: needs a measures array");
    std::vector<EmpiricalMeasure> measures;
    for (const auto& m : j["measures"]) {
      if (m.is_string())
        measures.push_back(read_measure(m.get<std::string>()));
      else
        measures.push_back(measure_from_json(m));
    }
    return metric_space_from_measures(measures);
  }
  // CSV distance matrix
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  require(!rows.empty(), path + ": empty distance matrix");
  const Index n = static_cast<Index>(rows.size());
  Mat d(n, n);
  for (Index i = 0; i < n; ++i) {
    require(static_cast<Index>(rows[static_cast<size_t>(i)].size()) == n,
            path + ": row " + std::to_string(i) + " is not square");
    for (Index j = 0; j < n; ++j) d(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
  }
  return FiniteMetricSpace(d);
}

std::vector<EmpiricalMeasure> load_measure_list(const std::string& path) {
  const Json j = load_json(path);
  require(j.contains("measures") && j["measures"].is_array() && !j["measures"].empty(),
          path + ": needs a nonempty measures array");
  std::vector<EmpiricalMeasure> out;
  for (const auto& m : j["measures"]) {
    if (m.is_string())
      out.push_back(read_measure(m.get<std::string>()));
    else
      out.push_back(measure_from_json(m));
  }
  return out;
}

void emit(const std::string& content, const std::string& out_path) {
  if (out_path.empty())
    std::cout << content;
  else
    write_text_file(out_path, content);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical calculus on the Wasserstein space P_2(R^d)"};
  app.require_subcommand(1);

  std::uint64_t seed = 20240801;
  std::string out_path, format = "csv";
  app.add_option("--seed", seed, "seed for every stochastic path");
  app.add_option("--out", out_path, "output path (default: stdout)");
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"csv", "json"}));

  double slack_solver = 1e-6, slack_quadrature = 1e-3;
  app.add_option("--slack-solver", slack_solver, "slack for solver-coupled inequalities");
  app.add_option("--slack-quadrature", slack_quadrature,
                 "slack for quadrature-coupled inequalities");

  // w2
  auto* w2cmd = app.add_subcommand("w2", "exact W_2 between two measure files");
  std::string mu_path, nu_path, plan_path;
  w2cmd->add_option("--mu", mu_path, "source measure")->required();
  w2cmd->add_option("--nu", nu_path, "target measure")->required();
  w2cmd->add_option("--plan", plan_path, "write the optimal plan as CSV");

  // potentials
  auto* potcmd = app.add_subcommand("potentials", "normalized Kantorovich potential pair");
  std::string pot_nu, pot_mu;
  double pot_radius = 0.0;
  potcmd->add_option("--nu", pot_nu, "ball-supported measure")->required();
  potcmd->add_option("--mu", pot_mu, "second measure")->required();
  potcmd->add_option("--radius", pot_radius, "support ball radius")->required();

  // hopflax
  auto* hlcmd = app.add_subcommand("hopflax", "Hopf-Lax regularization on a finite space");
  std::string hl_space, hl_f;
  double hl_t = 1.0, hl_q = 2.0;
  hlcmd->add_option("--space", hl_space, "distance CSV or measures JSON")->required();
  hlcmd->add_option("--f", hl_f, "CSV with one value per point")->required();
  hlcmd->add_option("--t", hl_t, "time")->required();
  hlcmd->add_option("--q", hl_q, "exponent");

  // fit
  auto* fitcmd = app.add_subcommand("fit", "Sobolev-penalized least squares on cylinder spans");
  std::string fit_m, fit_targets, fit_dict;
  double fit_lambda = 0.0;
  fitcmd->add_option("--m", fit_m, "meta measure file")->required();
  fitcmd->add_option("--targets", fit_targets, "CSV of target values")->required();
  fitcmd->add_option("--dict", fit_dict, "feature dictionary config")->required();
  fitcmd->add_option("--lambda", fit_lambda, "energy penalty weight")->required();

  // approx-distance
  auto* adcmd = app.add_subcommand("approx-distance",
                                   "dictionary functionals G_{eps,k} vs F^eps_nu");
  std::string ad_nu, ad_dict, ad_probes;
  double ad_eps = 0.5;
  int ad_kmax = 0;
  adcmd->add_option("--nu", ad_nu, "reference measure")->required();
  adcmd->add_option("--dict", ad_dict, "JSON list of dictionary measures")->required();
  adcmd->add_option("--eps", ad_eps, "mollification scale in (0,1)")->required();
  adcmd->add_option("--k-max", ad_kmax, "largest dictionary prefix (default: all)");
  adcmd->add_option("--probes", ad_probes, "JSON list of probe measures")->required();

  // examples
  auto* excmd = app.add_subcommand("examples", "closed-form family cross-checks");
  std::string ex_kind, ex_config;
  excmd->add_option("kind", ex_kind, "dirac | translation | gaussian")
      ->required()
      ->check(CLI::IsMember({"dirac", "translation", "gaussian"}));
  excmd->add_option("--config", ex_config, "family config file")->required();

  // selftest
  auto* stcmd = app.add_subcommand("selftest", "full acceptance battery");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (w2cmd->parsed()) {
      const EmpiricalMeasure mu = read_measure(mu_path);
      const EmpiricalMeasure nu = read_measure(nu_path);
      const W2Result res = w2_exact(mu, nu);
      if (!plan_path.empty()) write_text_file(plan_path, plan_csv(res.plan));
      if (format == "json") {
        Json j{{"w2", res.cost}, {"duality_gap", res.duality_gap}};
        emit(j.dump(2) + "\n", out_path);
      } else {
        emit(format_double(res.cost) + "\n", out_path);
      }
      return 0;
    }

    if (potcmd->parsed()) {
      const EmpiricalMeasure nu = read_measure(pot_nu);
      const EmpiricalMeasure mu = read_measure(pot_mu);
      const PotentialPair pair = kantorovich_potentials(nu, mu, pot_radius);
      Json grid = Json::array();
      Json phi = Json::array();
      for (Index g = 0; g < pair.grid().cols(); ++g) {
        Json a = Json::array();
        for (Index r = 0; r < pair.grid().rows(); ++r) a.push_back(pair.grid()(r, g));
        grid.push_back(a);
        phi.push_back(pair.phi_values()[g]);
      }
      Json j{{"radius", pair.radius()},
             {"anchor_constant", pair.anchor_constant()},
             {"duality_gap", pair.duality_gap()},
             {"grid", grid},
             {"phi_values", phi}};
      emit(j.dump(2) + "\n", out_path);
      return 0;
    }

    if (hlcmd->parsed()) {
      const FiniteMetricSpace space = load_space(hl_space);
      const auto values = read_scalar_csv(hl_f);
      require(static_cast<Index>(values.size()) == space.size(),
              "f has " + std::to_string(values.size()) + " values for " +
                  std::to_string(space.size()) + " points");
      Vec f = Eigen::Map<const Vec>(values.data(), static_cast<Index>(values.size()));
      const HopfLaxResult hl = hopf_lax(space, f, hl_t, hl_q);
      std::ostringstream os;
      os << "point,f,Qf,d_plus\n";
      for (Index i = 0; i < space.size(); ++i)
        os << space.labels()[static_cast<size_t>(i)] << "," << format_double(f[i]) << ","
           << format_double(hl.q_values[i]) << "," << format_double(hl.d_plus[i]) << "\n";
      emit(os.str(), out_path);
      return 0;
    }

    if (fitcmd->parsed()) {
      const MetaMeasure m = read_meta_measure(fit_m);
      const auto targets = read_scalar_csv(fit_targets);
      require(static_cast<Index>(targets.size()) == m.size(),
              "target count does not match the components of m");
      const Json dict_json = load_json(fit_dict);
      require(dict_json.contains("features"), "dictionary config: needs a features array");
      std::vector<SmoothFeature> dict;
      for (const auto& fj : dict_json["features"]) dict.push_back(feature_from_json(fj));

      std::vector<std::pair<EmpiricalMeasure, double>> samples;
      for (Index i = 0; i < m.size(); ++i)
        samples.push_back({m.component(i).measure, targets[static_cast<size_t>(i)]});
      const SobolevFit fit = sobolev_fit(samples, m, dict, fit_lambda);

      Json coeffs = Json::array();
      for (Index i = 0; i < fit.coefficients.size(); ++i) coeffs.push_back(fit.coefficients[i]);
      Json residuals = Json::array();
      const CylinderFunction fitted = fit.function();
      for (Index i = 0; i < m.size(); ++i)
        residuals.push_back(fitted.eval(m.component(i).measure) -
                            targets[static_cast<size_t>(i)]);
      Json j{{"coefficients", coeffs},
             {"lambda", fit.lambda},
             {"misfit", fit.misfit},
             {"energy", fit.energy},
             {"residuals", residuals}};
      emit(j.dump(2) + "\n", out_path.empty() ? std::string("fit.json") : out_path);
      return 0;
    }

    if (adcmd->parsed()) {
      const EmpiricalMeasure nu = read_measure(ad_nu);
      const auto dict_measures = load_measure_list(ad_dict);
      const auto probes = load_measure_list(ad_probes);
      const MollifierFamily fam = MollifierFamily::make(nu.dim(), ad_eps);
      const PotentialDictionary dict = build_dictionary(nu, fam, dict_measures);
      const Index kmax = (ad_kmax >= 1 && ad_kmax <= dict.size()) ? ad_kmax : dict.size();

      std::ostringstream os;
      os << "probe,k,G_eps_k,F_nu_eps,gap,lipschitz_margin\n";
      bool ok = true;
      for (size_t p = 0; p < probes.size(); ++p) {
        const double F = f_nu_eps(probes[p], nu, fam);
        const size_t pnext = (p + 1) % probes.size();
        for (Index k = 1; k <= kmax; ++k) {
          const double G = g_eps_k(dict, probes[p], k);
          double margin = 0.0;
          if (probes.size() > 1) {
            const auto [lhs, rhs] =
                g_lipschitz_check(dict, probes[p], probes[pnext], k, slack_solver);
            margin = rhs - lhs;
          }
          ok = ok && (G <= F + slack_solver);
          os << p << "," << k << "," << format_double(G) << "," << format_double(F) << ","
             << format_double(F - G) << "," << format_double(margin) << "\n";
        }
      }
      emit(os.str(), out_path);
      if (!ok) {
        std::cerr << "FAIL: G_eps_k exceeds F_nu_eps beyond the solver slack\n";
        return 1;
      }
      return 0;
    }

    if (excmd->parsed()) {
      const Json cfg = load_json(ex_config);
      std::ostringstream os;
      if (ex_kind == "dirac") {
        std::vector<SmoothFeature> feats{feature_from_json(cfg.at("feature"))};
        const OuterFunction psi = outer_from_json(cfg.at("outer"), 1);
        const auto& grid_json = cfg.at("grid");
        Mat grid(static_cast<Index>(grid_json.at(0).size()),
                 static_cast<Index>(grid_json.size()));
        for (size_t i = 0; i < grid_json.size(); ++i)
          for (size_t r = 0; r < grid_json[i].size(); ++r)
            grid(static_cast<Index>(r), static_cast<Index>(i)) = grid_json[i][r].get<double>();
        Vec masses(static_cast<Index>(cfg.at("masses").size()));
        for (size_t i = 0; i < cfg.at("masses").size(); ++i)
          masses[static_cast<Index>(i)] = cfg.at("masses")[i].get<double>();
        const auto r = dirac_embedding_energy(psi, feats[0], grid, masses);
        os << "wasserstein_energy,euclidean_energy,gap\n";
        os << format_double(r.wasserstein_energy) << "," << format_double(r.euclidean_energy)
           << "," << format_double(std::abs(r.wasserstein_energy - r.euclidean_energy)) << "\n";
      } else if (ex_kind == "translation") {
        const EmpiricalMeasure lambda = measure_from_json(cfg.at("lambda"));
        std::vector<std::pair<Vec, double>> omegas;
        for (const auto& oj : cfg.at("omegas")) {
          Vec w(static_cast<Index>(oj.at("omega").size()));
          for (size_t r = 0; r < oj.at("omega").size(); ++r)
            w[static_cast<Index>(r)] = oj.at("omega")[r].get<double>();
          omegas.push_back({w, oj.at("mass").get<double>()});
        }
        const TranslationFamily tf(lambda, omegas);
        const CylinderFunction F = cylinder_from_json(cfg.at("cylinder"));
        os << "omega,F_hat,dm_closed,dm_projected,df_norm_sq,dm_norm_sq,residual_norm_sq,"
              "orthogonality,pythagoras_gap\n";
        for (const auto& row : translation_family_report(tf, F)) {
          os << format_double(row.omega[0]) << "," << format_double(row.f_hat) << ","
             << format_double(row.dm_closed_form[0]) << ","
             << format_double(row.dm_projected[0]) << "," << format_double(row.df_norm_sq)
             << "," << format_double(row.dm_norm_sq) << ","
             << format_double(row.residual_norm_sq) << "," << format_double(row.orthogonality)
             << "," << format_double(row.pythagoras_gap) << "\n";
        }
      } else {
        std::vector<std::pair<GaussianMeasure, GaussianMeasure>> pairs;
        for (const auto& pj : cfg.at("pairs"))
          pairs.push_back({gaussian_from_json(pj.at("g1")), gaussian_from_json(pj.at("g2"))});
        const Index n_samples = cfg.value("n_samples", 1000);
        const auto rows = gaussian_family_check(pairs, n_samples, seed);
        os << "closed_form,empirical,relative_error\n";
        bool ok = true;
        for (const auto& r : rows) {
          os << format_double(r.closed_form) << "," << format_double(r.empirical) << ","
             << format_double(r.relative_error) << "\n";
          ok = ok && (r.relative_error <= 0.05 || r.closed_form < 1e-12);
        }
        emit(os.str(), out_path);
        if (!ok) {
          std::cerr << "FAIL: empirical Gaussian distance beyond 5% of the closed form\n";
          return 1;
        }
        return 0;
      }
      emit(os.str(), out_path);
      return 0;
    }

    if (stcmd->parsed()) {
      const AcceptanceOptions opts{seed};
      const auto results = run_acceptance(opts, &std::cerr);
      const std::string report = acceptance_report(results);
      emit(report, out_path);
      if (!out_path.empty()) std::cout << report;
      for (const auto& r : results)
        if (!r.pass) {
          std::cerr << "first failing check: criterion " << r.id << " " << r.name << "\n";
          return 1;
        }
      return 0;
    }
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const CheckError& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return 1;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
