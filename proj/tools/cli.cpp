#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "cpspectra/error.hpp"
#include "cpspectra/io.hpp"
#include "cpspectra/perron.hpp"
#include "cpspectra/reference_maps.hpp"
#include "cpspectra/spectra.hpp"

namespace cpspectra::cli {

namespace {

struct Report {
  Json values = Json::object();
  Json residuals = Json::object();
  Json warnings = Json::array();
  int exit_code = ok;
};

// FNV-1a over the command, the canonical dump of every input and the flags.
class Digest {
public:
  void add(std::string_view text) {
    for (unsigned char c : text) {
      hash_ ^= c;
      hash_ *= 0x100000001b3ULL;
    }
    hash_ ^= 0xff;
    hash_ *= 0x100000001b3ULL;
  }
  std::string hex() const {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << hash_;
    return os.str();
  }

private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

struct Globals {
  Tolerance tol;
  std::optional<std::uint64_t> budget;
  std::uint64_t seed = 0;
  bool timing = false;
};

std::string number_text(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

Json complex_list(const std::vector<Complex> &values) {
  Json out = Json::array();
  for (Complex z : values) {
    out.push_back(to_json(z));
  }
  return out;
}

// Shared state for a subcommand: loaded inputs feed the digest.
class Inputs {
public:
  explicit Inputs(Digest &digest) : digest_(digest) {}

  Json load(const std::string &path) {
    Json j = load_json(path);
    digest_.add(j.dump());
    return j;
  }

  CpMap map(const std::string &path, const std::string &shape_text, const Tolerance &tol) {
    Json j = load(path);
    if (!shape_text.empty()) {
      j["shape"] = to_json(AlgebraShape::parse(shape_text));
    }
    return cpmap_from_json(j, tol);
  }

private:
  Digest &digest_;
};

Report outer_radius_report(const std::vector<Matrix> &tuple, std::optional<int> gelfand) {
  Report rep;
  const double value = outer_radius(tuple);
  rep.values["value"] = value;
  if (gelfand) {
    const double g = outer_radius_gelfand(tuple, *gelfand);
    rep.values["gelfand"] = g;
    rep.values["gelfand_n"] = *gelfand;
    rep.residuals["gelfand_gap"] = std::abs(g - value);
  }
  return rep;
}

Json jsr_json(const JsrEstimate &est) {
  return Json{{"lower", est.lower},
              {"upper", est.upper},
              {"method", to_string(est.method)},
              {"parameter", est.parameter},
              {"words", est.words}};
}

// The invariant suite behind `check`.
Report check_report(const Globals &g) {
  Report rep;
  bool all = true;
  const auto verdict = [&](Json &entry, const char *name, double residual, double threshold) {
    entry[name] = residual;
    const bool pass = residual <= threshold;
    all = all && pass;
    return pass;
  };
  struct Case {
    const char *name;
    CpMap map;
    bool irreducible;
  };
  const std::vector<Case> cases = {{"corner_trace", corner_trace_map(), false},
                                   {"fibonacci", fibonacci_map(), true},
                                   {"doubled_trace", doubled_trace_map(), true},
                                   {"path_graph", path_graph_map(), true},
                                   {"depolarizing_2", depolarizing_map(2), true}};
  std::mt19937_64 rng(g.seed);
  for (const Case &c : cases) {
    Json res = Json::object();
    Json vals = Json::object();
    const auto phi = LinearMapOnAlgebra::from_cp(c.map, g.tol);
    const SpectralStructure ss = spectral_structure(phi);
    const MaximalPart mp = maximal_part(phi, g.tol);
    vals["r"] = mp.r;
    vals["d"] = mp.d;
    vals["maximal_spectrum"] = complex_list(ss.maximal_spectrum);
    bool r_in_maximal = false;
    for (Complex z : ss.maximal_spectrum) {
      r_in_maximal = r_in_maximal || std::abs(z - mp.r) <= 1e-8 * mp.r;
    }
    vals["r_in_maximal_spectrum"] = r_in_maximal;
    all = all && r_in_maximal;
    verdict(res, "route_agreement", mp.route_agreement, 1e-6);
    verdict(res, "commutation", mp.commutation_residual, 1e-8);
    verdict(res, mp.d == 1 ? "idempotence" : "square", mp.d == 1 ? mp.idempotent_residual : mp.square_residual,
            1e-8);
    const PerronVector pv = perron_vector(phi, g.tol);
    verdict(res, "perron_eigen", pv.residual, 1e-8);
    vals["perron_psd"] = pv.positivity.is_psd;
    all = all && pv.positivity.is_psd;

    const Irreducibility irr = irreducible_cp(c.map, g.tol);
    const CpMap ext = canonical_extension(c.map, g.tol);
    const Irreducibility irr_ext = irreducible_cp(ext, g.tol);
    vals["irreducible"] = irr.irreducible;
    vals["algebra_dimension"] = irr.dimension;
    const bool irr_ok = irr.irreducible == c.irreducible && irr_ext.irreducible == irr.irreducible;
    vals["irreducible_as_expected"] = irr_ok;
    all = all && irr_ok;
    verdict(res, "extension_radius", std::abs(spectral_radius(superop_of(ext).matrix) - mp.r), 1e-9);
    const PositivityProbe probe = strict_positivity_probe(c.map, rng, 64, g.tol);
    vals["positivity_probe"] = probe.strictly_positive;
    if (probe.strictly_positive != irr.irreducible) {
      rep.warnings.push_back(std::string(c.name) + ": positivity probe disagrees with the algebra test");
    }
    if (c.irreducible) {
      const MaximalFactorization f = maximal_factorization(c.map, g.tol);
      verdict(res, "factor_eigen", f.eigen_residual, 1e-8);
      verdict(res, "factor_adjoint", f.adjoint_residual, 1e-8);
      verdict(res, "factor_trace", std::abs(f.trace_rl - 1.0), 1e-8);
      vals["faithful"] = f.faithful;
      all = all && f.faithful;
      const IdealCheck ic = maximal_ideal_check(c.map, g.tol);
      verdict(res, "ideal_product", ic.product_residual, 1e-8);
      verdict(res, "ideal_left", ic.left_residual, 1e-8);
      verdict(res, "ideal_right", ic.right_residual, 1e-8);
      verdict(res, "ideal_containment", ic.containment_residual, 1e-8);
    }
    rep.values[c.name] = std::move(vals);
    rep.residuals[c.name] = std::move(res);
  }
  {
    const auto pair = golden_pair();
    const JsrEstimate brute = jsr_brute(pair, 10);
    const JsrEstimate tensor = jsr_tensor_approx(pair, 2);
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    rep.values["golden_pair_brute"] = jsr_json(brute);
    rep.values["golden_pair_tensor"] = jsr_json(tensor);
    const bool sandwich = tensor.lower <= golden + 1e-9 && golden <= tensor.upper + 1e-9 &&
                          brute.lower <= golden + 1e-9 && golden <= brute.upper + 1e-9;
    rep.values["golden_pair_sandwich"] = sandwich;
    all = all && sandwich;
  }
  rep.values["passed"] = all;
  rep.exit_code = all ? ok : failure;
  return rep;
}

Json error_object(const std::string &command, const char *kind, const std::string &message) {
  return Json{{"command", command}, {"error", {{"kind", kind}, {"message", message}}}};
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Spectral invariants of positive and completely positive maps"};
  app.require_subcommand(1);
  Globals g;
  std::uint64_t budget = 0;
  auto *budget_opt = app.add_option("--budget", budget, "Work budget (jsr words or tensor superoperator side)")
                         ->envname("CPSPECTRA_BUDGET");
  app.add_option("--tol-rank", g.tol.rank, "Relative rank threshold")->envname("CPSPECTRA_TOL_RANK");
  app.add_option("--tol-psd", g.tol.psd, "Positivity floor")->envname("CPSPECTRA_TOL_PSD");
  app.add_option("--tol-conv", g.tol.conv, "Convergence threshold")->envname("CPSPECTRA_TOL_CONV");
  app.add_option("--seed", g.seed, "Seed for randomized probes")->envname("CPSPECTRA_SEED");
  app.add_flag("--timing", g.timing, "Add elapsed seconds to the report");

  std::string tuple_path, map_path, shape_text, matrix_path, w_path, choi_path, a_path, method = "brute";
  int n_max = 8, k = 2;
  unsigned workers = 1;
  std::optional<int> gelfand;
  double s = 0.0, epsilon = 1.0, power_bound = 1e3;
  int horizon = 256;
  bool unital = true;

  Digest digest;
  Inputs inputs(digest);
  std::function<Report()> handler;
  std::string command;

  const auto add_map = [&](CLI::App *sub, bool required) {
    auto *opt = sub->add_option("--map", map_path, "CP map JSON");
    if (required) {
      opt->required();
    }
    sub->add_option("--shape", shape_text, "Block sizes, e.g. 2,1 (overrides the map's shape)");
  };
  const auto map_input = [&]() { return inputs.map(map_path, shape_text, g.tol); };
  const auto tuple_input = [&]() { return tuple_from_json(inputs.load(tuple_path)); };

  auto *sub = app.add_subcommand("outer-radius", "sqrt(r(sum conj(A_i) kron A_i))");
  sub->add_option("--tuple", tuple_path, "Matrix tuple JSON")->required();
  sub->add_option("--gelfand", gelfand, "Also iterate ||tau^n(1)||^(1/2n) to this n");
  sub->callback([&] { handler = [&] { return outer_radius_report(tuple_input(), gelfand); }; });

  sub = app.add_subcommand("jsr", "Joint spectral radius bounds");
  sub->add_option("--tuple", tuple_path, "Matrix tuple JSON")->required();
  sub->add_option("--method", method, "brute or tensor")->check(CLI::IsMember({"brute", "tensor"}));
  sub->add_option("--n", n_max, "Longest word for brute force");
  sub->add_option("--k", k, "Tensor power");
  sub->add_option("--workers", workers, "Threads for brute force");
  sub->callback([&] {
    handler = [&] {
      const auto tuple = tuple_input();
      Report rep;
      JsrEstimate est;
      if (method == "brute") {
        JsrBruteOptions opts;
        opts.workers = workers;
        if (g.budget) {
          opts.word_budget = *g.budget;
        }
        est = jsr_brute(tuple, n_max, opts);
      } else {
        est = jsr_tensor_approx(tuple, k, g.budget ? static_cast<Index>(*g.budget) : 4096);
      }
      rep.values = jsr_json(est);
      rep.residuals["gap"] = est.upper - est.lower;
      return rep;
    };
  });

  sub = app.add_subcommand("friedland", "r(w^-1 phi(w)) for strictly positive w");
  add_map(sub, true);
  sub->add_option("--w", w_path, "Matrix JSON for w")->required();
  sub->callback([&] {
    handler = [&] {
      const auto phi = LinearMapOnAlgebra::from_cp(map_input(), g.tol);
      const Matrix w = matrix_from_json(inputs.load(w_path));
      Report rep;
      const double value = friedland_value(phi, w, g.tol);
      const double r = spectral_radius_map(phi);
      rep.values["value"] = value;
      rep.values["spectral_radius"] = r;
      rep.residuals["excess_over_r"] = value - r;
      return rep;
    };
  });

  sub = app.add_subcommand("witness", "Neumann series witness w = sum (phi/s)^n (1)");
  add_map(sub, true);
  sub->add_option("--s", s, "Level s > r(phi)")->required();
  sub->callback([&] {
    handler = [&] {
      const auto phi = LinearMapOnAlgebra::from_cp(map_input(), g.tol);
      const NeumannWitness nw = neumann_witness(phi, s, g.tol);
      Report rep;
      rep.values["w"] = to_json(nw.w);
      rep.values["s"] = nw.s;
      rep.values["spectral_radius"] = nw.spectral_radius;
      rep.residuals["equation"] = nw.residual;
      rep.residuals["min_eigenvalue_w_minus_1"] =
          psd_checks(nw.w - Matrix::Identity(nw.w.rows(), nw.w.cols()), g.tol).min_eigenvalue;
      return rep;
    };
  });

  sub = app.add_subcommand("balance", "Similarity P with ||P A P^-1|| = r(A)");
  sub->add_option("--matrix", matrix_path, "Matrix JSON")->required();
  sub->add_option("--epsilon", epsilon, "Upper bound for the Jordan scaling");
  sub->add_option("--power-bound", power_bound, "Admissible sup ||A^n / r^n||");
  sub->add_option("--horizon", horizon, "Powers probed");
  sub->callback([&] {
    handler = [&] {
      const Matrix a = matrix_from_json(inputs.load(matrix_path));
      BalanceOptions opts;
      opts.epsilon = epsilon;
      opts.power_bound = power_bound;
      opts.horizon = horizon;
      const BalancedSimilarity b = balance_similarity(a, opts, g.tol);
      Report rep;
      rep.values["p"] = to_json(b.p);
      rep.values["p_inverse"] = to_json(b.p_inverse);
      rep.values["norm"] = b.norm;
      rep.values["spectral_radius"] = b.spectral_radius;
      rep.values["max_normalized_power"] = b.max_normalized_power;
      rep.residuals["norm_excess"] = b.norm - b.spectral_radius;
      rep.residuals["inverse"] = op_norm(b.p * b.p_inverse - Matrix::Identity(a.rows(), a.cols()));
      return rep;
    };
  });

  sub = app.add_subcommand("choi", "Choi matrix sum E_ij kron tau(E_ij)");
  add_map(sub, true);
  sub->callback([&] {
    handler = [&] {
      const CpMap tau = map_input();
      const Matrix c = choi_of(tau);
      const PsdReport psd = psd_checks(c, g.tol);
      Report rep;
      rep.values["choi"] = to_json(c);
      rep.values["rank"] = rank_tol(c, g.tol.rank);
      rep.values["is_psd"] = psd.is_psd;
      rep.residuals["min_eigenvalue"] = psd.min_eigenvalue;
      rep.residuals["hermiticity"] = psd.hermiticity_defect;
      rep.residuals["superoperator_match"] = op_norm(c - choi_of(superop_of(tau)));
      return rep;
    };
  });

  sub = app.add_subcommand("kraus", "Kraus operators from a Choi matrix");
  sub->add_option("--choi", choi_path, "Matrix JSON of a PSD Choi matrix")->required();
  sub->callback([&] {
    handler = [&] {
      const Matrix c = matrix_from_json(inputs.load(choi_path));
      const CpMap tau = cp_map_of_choi(c, g.tol);
      Report rep;
      rep.values["map"] = to_json(tau);
      rep.values["count"] = kraus_of_choi(c, g.tol).size();
      rep.residuals["reconstruction"] = op_norm(choi_of(tau) - c);
      return rep;
    };
  });

  sub = app.add_subcommand("coeff-space", "Span of the Kraus operators");
  add_map(sub, true);
  sub->callback([&] {
    handler = [&] {
      const CpMap tau = map_input();
      const CoefficientSpace space = coefficient_space(tau, g.tol);
      Report rep;
      rep.values["dimension"] = space.dimension();
      Json basis = Json::array();
      double worst = 0.0;
      for (const Matrix &b : space.basis) {
        basis.push_back(to_json(b));
      }
      for (const Matrix &a : tau.kraus()) {
        worst = std::max(worst, space.residual(a) / std::max(a.norm(), 1e-300));
      }
      rep.values["basis"] = std::move(basis);
      rep.residuals["kraus_outside_span"] = worst;
      return rep;
    };
  });

  sub = app.add_subcommand("member", "Is A in the coefficient space, with a domination certificate");
  add_map(sub, true);
  sub->add_option("--a", a_path, "Matrix JSON for A")->required();
  sub->callback([&] {
    handler = [&] {
      const CpMap tau = map_input();
      const Matrix a = matrix_from_json(inputs.load(a_path));
      const Membership mem = membership(a, tau, g.tol);
      Report rep;
      rep.values["member"] = mem.member;
      rep.values["coefficients"] = complex_list(mem.coefficients);
      rep.residuals["projection"] = mem.residual;
      if (mem.certificate) {
        rep.values["certificate"] = *mem.certificate;
        const Matrix gap = choi_of(tau.scaled(*mem.certificate)) - choi_of(elementary(a));
        rep.residuals["domination_min_eigenvalue"] = psd_checks(gap, g.tol).min_eigenvalue;
      }
      return rep;
    };
  });

  sub = app.add_subcommand("maximal-part", "phi-hat = (T - r)^(d-1) P_r with a Cesaro cross-check");
  add_map(sub, true);
  sub->callback([&] {
    handler = [&] {
      const auto phi = LinearMapOnAlgebra::from_cp(map_input(), g.tol);
      const SpectralStructure ss = spectral_structure(phi);
      const MaximalPart mp = maximal_part(phi, g.tol);
      Report rep;
      rep.values["r"] = mp.r;
      rep.values["d"] = mp.d;
      rep.values["idempotent"] = mp.idempotent;
      rep.values["maximal_spectrum"] = complex_list(ss.maximal_spectrum);
      rep.values["coordinates"] = to_json(mp.coordinates);
      rep.values["superoperator"] = to_json(mp.superop.matrix);
      rep.values["cesaro_terms"] = mp.cesaro_terms;
      rep.values["cesaro_converged"] = mp.cesaro_converged;
      rep.residuals["idempotence"] = mp.idempotent_residual;
      rep.residuals["square"] = mp.square_residual;
      rep.residuals["commutation"] = mp.commutation_residual;
      rep.residuals["route_agreement"] = mp.route_agreement;
      if (!mp.cesaro_converged) {
        rep.warnings.push_back("Cesaro cross-check stopped at its term budget");
      }
      return rep;
    };
  });

  sub = app.add_subcommand("perron", "Perron eigenvector L = phi-hat(1)");
  add_map(sub, true);
  sub->callback([&] {
    handler = [&] {
      const auto phi = LinearMapOnAlgebra::from_cp(map_input(), g.tol);
      const PerronVector pv = perron_vector(phi, g.tol);
      Report rep;
      rep.values["r"] = pv.r;
      rep.values["L"] = to_json(pv.l.matrix());
      rep.values["is_psd"] = pv.positivity.is_psd;
      rep.values["strictly_positive"] = pv.positivity.is_strictly_positive;
      rep.residuals["eigen"] = pv.residual;
      rep.residuals["min_eigenvalue"] = pv.positivity.min_eigenvalue;
      return rep;
    };
  });

  sub = app.add_subcommand("irreducible", "Irreducibility via the algebra generated by the extension");
  add_map(sub, true);
  sub->callback([&] {
    handler = [&] {
      const CpMap tau = map_input();
      const Irreducibility irr = irreducible_cp(tau, g.tol);
      std::mt19937_64 rng(g.seed);
      const PositivityProbe probe = strict_positivity_probe(tau, rng, 64, g.tol);
      Report rep;
      rep.values["irreducible"] = irr.irreducible;
      rep.values["dimension"] = irr.dimension;
      rep.values["target"] = irr.target;
      rep.values["positivity_probe"] = probe.strictly_positive;
      rep.values["probes"] = probe.probes;
      if (irr.witness) {
        rep.values["witness"] = to_json(*irr.witness);
      }
      rep.residuals["probe_min_ratio"] = probe.min_ratio;
      if (probe.strictly_positive != irr.irreducible) {
        rep.warnings.push_back("positivity probe disagrees with the algebra dimension test");
      }
      return rep;
    };
  });

  sub = app.add_subcommand("algebra-dim", "Dimension of the algebra generated by a tuple");
  sub->add_option("--tuple", tuple_path, "Matrix tuple JSON")->required();
  sub->add_flag("--unital,!--non-unital", unital, "Include the identity (default)");
  sub->callback([&] {
    handler = [&] {
      const auto tuple = tuple_input();
      const GeneratedAlgebra alg = algebra_basis(tuple, unital, g.tol);
      Report rep;
      const Index m = alg.space.m;
      rep.values["unital"] = unital;
      rep.values["dimension"] = alg.space.dimension();
      rep.values["stabilization_index"] = alg.stabilization_index;
      rep.values["m_squared"] = m * m;
      double worst = 0.0;
      for (const Matrix &b : alg.space.basis) {
        for (const Matrix &a : tuple) {
          worst = std::max(worst, alg.space.residual(a * b) / std::max(a.norm(), 1e-300));
        }
      }
      rep.residuals["closure"] = worst;
      return rep;
    };
  });

  sub = app.add_subcommand("factorize", "phi-hat(X) = trace(R X) L for an irreducible map");
  add_map(sub, true);
  sub->callback([&] {
    handler = [&] {
      const MaximalFactorization f = maximal_factorization(map_input(), g.tol);
      Report rep;
      rep.values["r"] = f.r;
      rep.values["R"] = to_json(f.density);
      rep.values["L"] = to_json(f.l.matrix());
      rep.values["trace_RL"] = f.trace_rl;
      rep.values["faithful"] = f.faithful;
      rep.residuals["eigen"] = f.eigen_residual;
      rep.residuals["adjoint"] = f.adjoint_residual;
      rep.residuals["rank_one"] = f.rank_one_residual;
      rep.residuals["hermiticity"] = f.hermiticity_defect;
      rep.residuals["min_eigenvalue_R"] = f.min_eigenvalue;
      if (f.hermiticity_defect > g.tol.psd) {
        rep.warnings.push_back("density R is not Hermitian within tolerance");
      }
      return rep;
    };
  });

  sub = app.add_subcommand("check", "Invariant suite on the built-in reference maps");
  sub->callback([&] { handler = [&] { return check_report(g); }; });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::ParseError &e) {
    err << e.what() << "\n";
    out << error_object("", "usage", e.what()).dump(2) << "\n";
    return precondition;
  }
  if (budget_opt->count() > 0) {
    g.budget = budget;
  }
  for (CLI::App *s2 : app.get_subcommands()) {
    command = s2->get_name();
  }

  digest.add(command);
  for (const std::string &a : args) {
    digest.add(a);
  }
  digest.add(number_text(g.tol.rank) + "," + number_text(g.tol.psd) + "," + number_text(g.tol.conv) + "," +
             std::to_string(g.seed) + "," + (g.budget ? std::to_string(*g.budget) : "-"));

  const auto start = std::chrono::steady_clock::now();
  try {
    Report rep = handler();
    Json report{{"command", command},
                {"inputs_digest", ""},
                {"values", std::move(rep.values)},
                {"residuals", std::move(rep.residuals)},
                {"warnings", std::move(rep.warnings)}};
    report["inputs_digest"] = digest.hex();
    if (g.timing) {
      report["elapsed"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    out << report.dump(2) << "\n";
    return rep.exit_code;
  } catch (const ParseError &e) {
    err << e.what() << "\n";
    out << error_object(command, "malformed_json", e.what()).dump(2) << "\n";
    return malformed_json;
  } catch (const BudgetExceeded &e) {
    err << e.what() << "\n";
    out << error_object(command, "budget_exceeded", e.what()).dump(2) << "\n";
    return budget_exceeded;
  } catch (const PreconditionError &e) {
    err << e.what() << "\n";
    out << error_object(command, "precondition", e.what()).dump(2) << "\n";
    return precondition;
  } catch (const std::exception &e) {
    err << e.what() << "\n";
    out << error_object(command, "failure", e.what()).dump(2) << "\n";
    return failure;
  }
}

} // namespace cpspectra::cli
