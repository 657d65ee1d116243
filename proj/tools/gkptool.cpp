#include <CLI11.hpp>
#include <json.hpp>

#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gkp/analytic.hpp"
#include "gkp/cache.hpp"
#include "gkp/channel.hpp"
#include "gkp/error.hpp"
#include "gkp/polyalg.hpp"
#include "gkp/symplectic.hpp"

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace gkp;

constexpr int kSchemaVersion = 1;

struct Globals {
  std::string cache_dir = ".gkp-cache";
  std::size_t workers = 1;
  std::string out;
  int precision = 128;
  std::uint64_t seed = 1;
  std::size_t dinit = 256;
  std::size_t expand = 3;
  std::size_t ncut = 59;

  fock::TruncationPlan plan() const {
    fock::TruncationPlan p{dinit, expand};
    p.validate();
    if (ncut % 2 == 0) throw InvalidArgument("--ncut must be odd");
    return p;
  }
  cache::OperatorCache cache() const {
    return cache::OperatorCache(cache_dir, precision == 64 ? cache::Precision::c64 : cache::Precision::c128);
  }
};

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Writes to `path` through a temp file and rename; empty path or "-" means stdout.
void emit(const std::string& path, const std::string& body) {
  if (path.empty() || path == "-") {
    std::cout << body << std::flush;
    return;
  }
  const fs::path final_path(path);
  if (final_path.has_parent_path()) fs::create_directories(final_path.parent_path());
  const fs::path tmp = final_path.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw NumericFailure("cannot open " + tmp.string() + " for writing");
    os << body;
    if (!os.flush()) throw NumericFailure("write failed for " + tmp.string());
  }
  fs::rename(tmp, final_path);
}

std::string csv_header(const std::string& kind) { return "# schema_version=" + std::to_string(kSchemaVersion) + " kind=" + kind + "\n"; }

json envelope(const std::string& command) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  return j;
}

RationalPolynomial read_polynomial_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidArgument("cannot read polynomial file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  const std::string text = ss.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    const json j = json::parse(text);
    if (!j.contains("polynomial") || !j["polynomial"].is_array())
      throw InvalidArgument(path + ": JSON input needs a 'polynomial' array of \"num/den\" strings");
    return RationalPolynomial::from_strings(j["polynomial"].get<std::vector<std::string>>());
  }
  // Plain text: coefficients by ascending degree, separated by spaces or commas.
  std::vector<std::string> coeffs;
  std::string tok;
  for (char c : text) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      if (!tok.empty()) coeffs.push_back(tok), tok.clear();
    } else {
      tok += c;
    }
  }
  if (!tok.empty()) coeffs.push_back(tok);
  if (coeffs.empty()) throw InvalidArgument(path + ": no coefficients");
  return RationalPolynomial::from_strings(coeffs);
}

json poly_json(const RationalPolynomial& p) { return p.fraction_strings(); }

json multi_poly_json(const MultiRationalPolynomial& p) {
  json arr = json::array();
  for (const auto& [e, a] : p.terms()) {
    if (a.is_zero()) continue;
    arr.push_back({{"exponents", e}, {"coeff", a.fraction_str()}});
  }
  return arr;
}

// ---- synth ----

struct SynthArgs {
  long level = 3;
  long qubits = 1;
  std::string start = "power";
};

int run_synth(const Globals& g, const SynthArgs& a) {
  if (a.level < 1) throw InvalidArgument("--level must be >= 1");
  if (a.qubits < 1) throw InvalidArgument("--qubits must be >= 1");
  json j = envelope("synth");
  j["level"] = a.level;
  j["qubits"] = a.qubits;
  j["start"] = a.start;
  if (a.qubits == 1) {
    RationalPolynomial start;
    if (a.start == "power") {
      start = starting_representation(a.level);
    } else if (a.start.rfind("lift:", 0) == 0) {
      if (a.level < 2) throw InvalidArgument("lift start needs --level >= 2");
      start = lift_representation(read_polynomial_file(a.start.substr(5)), a.level - 1);
    } else {
      throw InvalidArgument("--start must be 'power' or 'lift:<file>'");
    }
    const ReductionOutcome r = reduce(start);
    const RationalPolynomial& best = r.minima.front();
    j["gate"] = "Lambda_" + std::to_string(a.level);
    j["start_polynomial"] = poly_json(start);
    j["polynomial"] = poly_json(best);
    j["display"] = best.str();
    j["degree"] = best.degree();
    j["verified"] = verify_gate(best, a.level);
    json minima = json::array();
    for (const auto& m : r.minima) minima.push_back({{"polynomial", poly_json(m)}, {"display", m.str()}});
    j["minima"] = minima;
    j["tied"] = r.tied;
    j["capped"] = r.capped;
    json log = json::array();
    for (const auto& e : r.branch_log)
      log.push_back({{"branch", e.branch}, {"degree", e.degree}, {"multiplier", e.multiplier.get_str()}, {"boundary", e.boundary}});
    j["branch_log"] = log;
  } else {
    if (a.start != "power") throw InvalidArgument("multi-qubit synthesis supports only --start power");
    const MultiRationalPolynomial start = control_gate_start(a.qubits, a.level);
    const MultiReductionOutcome r = multivariate_reduce(start);
    j["gate"] = "C" + std::to_string(a.qubits - 1) + "-Lambda_" + std::to_string(a.level);
    j["start_polynomial"] = multi_poly_json(start);
    j["polynomial"] = multi_poly_json(r.poly);
    j["display"] = r.poly.str();
    j["degree"] = r.poly.total_degree();
    j["verified"] = verify_control_gate(r.poly, a.level);
    j["tie_rule"] = r.rule == TieRule::toward_zero ? "toward_zero" : "nonnegative_leading";
    json log = json::array();
    for (const auto& t : r.ties)
      log.push_back({{"monomial", t.monomial}, {"multiplier", t.chosen.get_str()}, {"alternative", t.alternative.get_str()}, {"boundary", true}});
    j["branch_log"] = log;
  }
  emit(g.out, j.dump(2) + "\n");
  return 0;
}

// ---- verify-circuits ----

struct VerifyArgs {
  std::vector<double> lams = {0.5, 1, 2, 3, 7};
  std::vector<double> deltas = {0.1, 0.25, 0.5};
  std::size_t trials = 100;
  std::size_t max_ancillas = 4;
  double tol = 1e-12;
  double det_tol = 1e-10;
};

int run_verify(const Globals& g, const VerifyArgs& a) {
  json j = envelope("verify-circuits");
  double max_res = 0;
  json ids = json::array();
  for (const auto& c : symplectic::identity_suite(a.lams)) {
    ids.push_back({{"name", c.name}, {"residual", c.residual}, {"symplectic_residual", c.symplectic_residual}});
    max_res = std::max({max_res, c.residual, c.symplectic_residual});
  }
  double bias_res = 0;
  for (double d : a.deltas)
    for (double lam : a.lams) {
      const auto [dq, dp] = symplectic::biasing_update(d, lam);
      const symplectic::Mat S = symplectic::biased_steane_conditioned(d, lam);
      symplectic::Mat want = symplectic::Mat::Zero(2, 2);
      want(0, 0) = dq * dq;
      want(1, 1) = dp * dp;
      bias_res = std::max(bias_res, symplectic::max_abs_diff(S, want));
    }
  ids.push_back({{"name", "biasing-update-schur"}, {"residual", bias_res}, {"symplectic_residual", 0.0}});
  max_res = std::max(max_res, bias_res);
  j["identities"] = ids;
  j["max_residual"] = max_res;

  std::mt19937_64 rng(g.seed);
  std::uniform_int_distribution<std::size_t> anc(1, a.max_ancillas);
  double max_rel = 0;
  for (std::size_t t = 0; t < a.trials; ++t) {
    const std::size_t n = anc(rng);
    const auto circ = symplectic::random_circuit(n + 1, 12, rng);
    for (double d : a.deltas) {
      const double det = symplectic::nogo_check(circ, n, d);
      max_rel = std::max(max_rel, std::abs(det / std::pow(d, 4) - 1.0));
    }
  }
  j["nogo"] = {{"trials", a.trials}, {"seed", g.seed}, {"max_relative_error", max_rel}};
  const bool pass = max_res < a.tol && max_rel < a.det_tol;
  j["pass"] = pass;
  emit(g.out, j.dump(2) + "\n");
  return pass ? 0 : 2;
}

// ---- sweep ----

struct GridArgs {
  double nbar_min = 2, nbar_max = 12, nbar_step = 1;
  double lam_min = 1, lam_max = 5;
  std::size_t lam_count = 16;
  std::vector<double> nbar_grid() const { return channel::step_grid(nbar_min, nbar_max, nbar_step); }
  std::vector<double> lam_grid() const { return channel::uniform_grid(lam_min, lam_max, lam_count); }
};

struct SweepArgs {
  std::vector<std::string> gates = {"T3"};
  GridArgs grid;
  bool no_smear = false;
  bool no_cache = false;
  std::string summary;
};

int run_sweep(const Globals& g, const SweepArgs& a) {
  std::vector<GateSpec> specs;
  for (const auto& name : a.gates) specs.push_back(gate_by_name(name));
  const auto plan = g.plan();
  auto cache = g.cache();
  const auto res = channel::sweep(specs, a.grid.nbar_grid(), a.grid.lam_grid(), plan,
                                  {g.workers, !a.no_smear, g.ncut, a.no_cache ? nullptr : &cache});

  std::map<std::pair<std::string, double>, const channel::SweepOptimum*> opt;
  for (const auto& o : res.optima) opt[{o.gate, o.n_bar}] = &o;
  std::ostringstream csv;
  csv << csv_header("sweep") << "gate,n_bar,delta,delta_db,lam,avg_infidelity,t_state_infidelity,boundary_flag\n";
  std::size_t failed = 0;
  for (const auto& r : res.rows) {
    if (!r.error.empty()) {
      ++failed;
      std::cerr << "sweep: " << r.gate << " n_bar=" << r.n_bar << " lam=" << r.lam << ": " << r.error << "\n";
    }
    const auto it = opt.find({r.gate, r.n_bar});
    const bool flag = it != opt.end() && it->second->lam_opt == r.lam && it->second->boundary;
    csv << r.gate << ',' << num(r.n_bar) << ',' << num(r.delta) << ',' << num(r.delta_db) << ',' << num(r.lam) << ','
        << num(r.avg_infidelity) << ',' << num(r.t_state_infidelity) << ',' << (flag ? 1 : 0) << '\n';
  }

  json s = envelope("sweep");
  s["d_init"] = plan.d_init;
  s["expand_factor"] = plan.expand_factor;
  s["smear"] = !a.no_smear;
  s["points"] = res.rows.size();
  s["failed_points"] = failed;
  json optima = json::array();
  for (const auto& o : res.optima)
    optima.push_back({{"gate", o.gate}, {"n_bar", o.n_bar}, {"delta", o.delta}, {"lam_opt", o.lam_opt},
                      {"avg_infidelity", o.avg_infidelity}, {"boundary_flag", o.boundary}});
  s["optima"] = optima;
  json fit = json::object();
  for (const auto& [name, c] : res.fit) fit[name] = {c[0], c[1], c[2]};
  s["lam_opt_fit"] = fit;

  emit(g.out, csv.str());
  if (!a.summary.empty())
    emit(a.summary, s.dump(2) + "\n");
  else if (!g.out.empty() && g.out != "-")
    std::cout << s.dump(2) << "\n";
  return failed == res.rows.size() ? 2 : 0;
}

// ---- vacuum ----

struct VacuumArgs {
  double delta = 0.25;
  std::size_t grid = 500;
  std::vector<double> postselect = {1.0};
};

int run_vacuum(const Globals& g, const VacuumArgs& a) {
  channel::VacuumMethodConfig c;
  c.delta = a.delta;
  c.grid = a.grid;
  const auto table = channel::vacuum_table(c);
  if (table.coarse) std::cerr << "vacuum: warning: grid " << a.grid << " is below the 100x100 acceptance floor\n";
  std::ostringstream csv;
  csv << csv_header("vacuum") << "delta,p,infidelity,acceptance_prob\n";
  for (double p : a.postselect) {
    if (!(p >= 0 && p <= 1)) throw InvalidArgument("--postselect values must be in [0, 1]");
    const double acc = p <= 0 ? table.cells.front().prob : p;
    csv << num(a.delta) << ',' << num(p) << ',' << num(table.infidelity_at(p)) << ',' << num(acc) << '\n';
  }
  emit(g.out, csv.str());
  return 0;
}

// ---- analytic ----

struct MomentsArgs {
  std::string gate = "T3";
  std::string poly;
  double delta = 0.25, lam = 2.0;
  double dq = 0, dp = 0;
};

int run_moments(const Globals& g, const MomentsArgs& a) {
  const RationalPolynomial P = a.poly.empty() ? gate_by_name(a.gate).poly : RationalPolynomial::from_strings([&] {
    std::vector<std::string> v;
    std::stringstream ss(a.poly);
    for (std::string t; std::getline(ss, t, ',');) v.push_back(t);
    return v;
  }());
  double dq = a.dq, dp = a.dp;
  if (dq <= 0 || dp <= 0) {
    if (!(a.delta > 0) || !(a.lam > 0)) throw InvalidArgument("--delta and --lam must be > 0");
    const double t = std::tanh(a.delta * a.delta / 2.0);
    dq = std::sqrt(2.0 * t / a.lam);
    dp = std::sqrt(2.0 * t * a.lam);
  }
  const auto m = analytic::moments(P, dq, dp);
  json j = envelope("moments");
  j["polynomial"] = poly_json(P);
  j["dq"] = dq;
  j["dp"] = dp;
  j["e_vq"] = m.e_vq;
  j["e_vp"] = m.e_vp;
  j["e_vq2"] = m.e_vq2;
  j["e_vp2"] = m.e_vp2;
  j["e_vqvp"] = m.e_vqvp;
  j["gate_vp2"] = m.gate_vp2;
  j["leading_shear_weight"] = analytic::leading_shear_weight(P).fraction_str();
  j["leading_shear_variance"] = analytic::leading_shear_variance(P, dq, dp);
  if (P.degree() >= 3) j["lambda_opt_asymptotic"] = analytic::lambda_opt_asymptotic(P, a.delta);
  emit(g.out, j.dump(2) + "\n");
  return 0;
}

int run_ft_bound(const Globals& g, const std::vector<double>& deltas) {
  json j = envelope("ft-bound");
  j["validity_limit"] = analytic::ft_validity_limit();
  json rows = json::array();
  for (double d : deltas) {
    const auto b = analytic::ft_lower_bound(d);
    rows.push_back({{"delta", b.delta}, {"lam", b.lam_of_delta}, {"p0_lower", b.p0_lower}, {"c_norm", b.c_norm},
                    {"f_lower_bound", b.f_lower_bound}, {"valid", b.validity}});
  }
  j["bounds"] = rows;
  emit(g.out, j.dump(2) + "\n");
  return 0;
}

struct DensityArgs {
  double delta = 0.25, lam = 2.0, extent = analytic::kInvSqrt8;
  std::size_t grid = 101;
};

int run_twirl_density(const Globals& g, const DensityArgs& a) {
  if (a.grid < 2) throw InvalidArgument("--grid must be >= 2");
  if (!(a.extent > 0)) throw InvalidArgument("--extent must be > 0");
  const auto axis = channel::uniform_grid(-a.extent, a.extent, a.grid);
  std::ostringstream csv;
  csv << csv_header("twirl-density") << "v_q,v_p,density\n";
  for (double vq : axis)
    for (double vp : axis) csv << num(vq) << ',' << num(vp) << ',' << num(analytic::cubic_twirled_density(a.delta, a.lam, vq, vp)) << '\n';
  emit(g.out, csv.str());
  return 0;
}

// ---- cache ----

int run_cache_list(const Globals& g) {
  json j = envelope("cache list");
  j["dir"] = g.cache_dir;
  json entries = json::array();
  for (const auto& e : g.cache().list())
    entries.push_back({{"file", e.path.filename().string()}, {"key", e.key}, {"sha256", e.digest_hex}, {"rows", e.rows},
                       {"cols", e.cols}, {"precision", static_cast<int>(e.precision)}, {"digest_ok", e.digest_ok}});
  j["entries"] = entries;
  emit(g.out, j.dump(2) + "\n");
  return 0;
}

int run_cache_purge(const Globals& g) {
  json j = envelope("cache purge");
  j["dir"] = g.cache_dir;
  j["removed"] = g.cache().purge();
  emit(g.out, j.dump(2) + "\n");
  return 0;
}

int run_cache_prewarm(const Globals& g, const GridArgs& grid, bool no_smear) {
  const auto plan = g.plan();
  auto cache = g.cache();
  json j = envelope("cache prewarm");
  json entries = json::array();
  int status = 0;
  for (double nb : grid.nbar_grid())
    for (double lam : grid.lam_grid()) {
      channel::ChannelConfig cfg;
      cfg.params = fock::GkpParams::from_nbar(nb, lam);
      cfg.plan = plan;
      cfg.smear = !no_smear;
      cfg.n_cut = g.ncut;
      json e = {{"n_bar", nb}, {"lam", lam}};
      try {
        channel::prewarm(cache, cfg);
        e["status"] = "ok";
      } catch (const std::exception& ex) {
        e["status"] = std::string("error: ") + ex.what();
        std::cerr << "cache prewarm: n_bar=" << nb << " lam=" << lam << ": " << ex.what() << "\n";
        status = 2;
      }
      entries.push_back(e);
    }
  j["entries"] = entries;
  emit(g.out, j.dump(2) + "\n");
  return status;
}

void add_grid_options(CLI::App* sc, GridArgs& grid) {
  sc->add_option("--nbar-min", grid.nbar_min, "smallest mean photon number")->capture_default_str();
  sc->add_option("--nbar-max", grid.nbar_max, "largest mean photon number")->capture_default_str();
  sc->add_option("--nbar-step", grid.nbar_step, "photon number step")->capture_default_str();
  sc->add_option("--lam-min", grid.lam_min, "smallest asymmetry")->capture_default_str();
  sc->add_option("--lam-max", grid.lam_max, "largest asymmetry")->capture_default_str();
  sc->add_option("--lam-count", grid.lam_count, "number of asymmetry values")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gkptool: polynomial phase gates for GKP qubits"};
  app.set_config("--config", "", "key=value config file with [subcommand] sections; flags override it");
  app.require_subcommand(1);
  app.fallthrough();
  app.failure_message(CLI::FailureMessage::help);

  Globals g;
  app.add_option("--cache-dir", g.cache_dir, "operator cache directory")->capture_default_str();
  app.add_option("--workers", g.workers, "worker threads for sweeps")->capture_default_str()->check(CLI::Range(1, 1024));
  app.add_option("-o,--out", g.out, "output path (stdout if empty)");
  app.add_option("--precision", g.precision, "cache payload precision in bits")->capture_default_str()->check(CLI::IsMember({64, 128}));
  app.add_option("--seed", g.seed, "seed for stochastic checks")->capture_default_str();
  app.add_option("--dinit", g.dinit, "initial Fock truncation")->capture_default_str();
  app.add_option("--expand-factor", g.expand, "truncation expansion factor")->capture_default_str();
  app.add_option("--ncut", g.ncut, "odd cutoff of the Pauli lattice sums")->capture_default_str();

  SynthArgs synth;
  auto* sc_synth = app.add_subcommand("synth", "minimal polynomial for a level-m phase gate");
  sc_synth->add_option("--level", synth.level, "gate level m")->required();
  sc_synth->add_option("--qubits", synth.qubits, "number of qubits (controls + 1)")->capture_default_str();
  sc_synth->add_option("--start", synth.start, "power | lift:<file>")->capture_default_str();

  VerifyArgs verify;
  auto* sc_verify = app.add_subcommand("verify-circuits", "symplectic identities and the no-go determinant");
  sc_verify->add_option("--lams", verify.lams, "asymmetries for the identity suite")->capture_default_str();
  sc_verify->add_option("--deltas", verify.deltas, "noise levels for the no-go check")->capture_default_str();
  sc_verify->add_option("--trials", verify.trials, "random circuits")->capture_default_str();

  SweepArgs sweep;
  auto* sc_sweep = app.add_subcommand("sweep", "gate fidelity over an (n_bar, lambda) grid");
  sc_sweep->add_option("--gate", sweep.gates, "gates to simulate")
      ->capture_default_str()
      ->check(CLI::IsMember({"T3", "TGKP", "T4", "sqrtT", "T4th", "T4th-mirror", "T8th", "I"}));
  add_grid_options(sc_sweep, sweep.grid);
  sc_sweep->add_flag("--no-smear", sweep.no_smear, "disable the measurement smear");
  sc_sweep->add_flag("--no-cache", sweep.no_cache, "ignore cached readout operators");
  sc_sweep->add_option("--summary", sweep.summary, "write optima and fit JSON here");

  VacuumArgs vac;
  auto* sc_vac = app.add_subcommand("vacuum", "vacuum-state magic-state preparation");
  sc_vac->add_option("--delta", vac.delta, "measurement noise")->capture_default_str();
  sc_vac->add_option("--grid", vac.grid, "syndrome cells per axis")->capture_default_str();
  sc_vac->add_option("--postselect", vac.postselect, "kept fractions p")->capture_default_str();

  MomentsArgs mom;
  auto* sc_mom = app.add_subcommand("moments", "closed-form twirled error moments");
  sc_mom->add_option("--gate", mom.gate, "gate name")->capture_default_str();
  sc_mom->add_option("--poly", mom.poly, "coefficients \"a0,a1,...\" as fractions (overrides --gate)");
  sc_mom->add_option("--delta", mom.delta, "envelope width")->capture_default_str();
  sc_mom->add_option("--lam", mom.lam, "asymmetry")->capture_default_str();
  sc_mom->add_option("--dq", mom.dq, "explicit Delta_q (with --dp)");
  sc_mom->add_option("--dp", mom.dp, "explicit Delta_p (with --dq)");

  std::vector<double> ft_deltas = {0.3, 0.2, 0.1, 0.05};
  auto* sc_ft = app.add_subcommand("ft-bound", "fidelity lower bound of the cubic gate");
  sc_ft->add_option("--delta", ft_deltas, "envelope widths")->capture_default_str();

  DensityArgs dens;
  auto* sc_dens = app.add_subcommand("twirl-density", "twirled error density of the cubic gate on a grid");
  sc_dens->add_option("--delta", dens.delta, "envelope width")->capture_default_str();
  sc_dens->add_option("--lam", dens.lam, "asymmetry")->capture_default_str();
  sc_dens->add_option("--grid", dens.grid, "points per axis")->capture_default_str();
  sc_dens->add_option("--extent", dens.extent, "half width of the square")->capture_default_str();

  auto* sc_cache = app.add_subcommand("cache", "readout operator cache");
  sc_cache->require_subcommand(1);
  auto* sc_list = sc_cache->add_subcommand("list", "list entries");
  auto* sc_purge = sc_cache->add_subcommand("purge", "remove all entries");
  GridArgs pw_grid;
  bool pw_no_smear = false;
  auto* sc_prewarm = sc_cache->add_subcommand("prewarm", "build readout operators for a grid");
  add_grid_options(sc_prewarm, pw_grid);
  sc_prewarm->add_flag("--no-smear", pw_no_smear, "operators without the measurement smear");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*sc_synth) return run_synth(g, synth);
    if (*sc_verify) return run_verify(g, verify);
    if (*sc_sweep) return run_sweep(g, sweep);
    if (*sc_vac) return run_vacuum(g, vac);
    if (*sc_mom) return run_moments(g, mom);
    if (*sc_ft) return run_ft_bound(g, ft_deltas);
    if (*sc_dens) return run_twirl_density(g, dens);
    if (*sc_list) return run_cache_list(g);
    if (*sc_purge) return run_cache_purge(g);
    if (*sc_prewarm) return run_cache_prewarm(g, pw_grid, pw_no_smear);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const PreconditionViolation& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
