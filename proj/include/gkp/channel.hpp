#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "gkp/analytic.hpp"
#include "gkp/cache.hpp"
#include "gkp/error.hpp"
#include "gkp/fock.hpp"
#include "gkp/polyalg.hpp"

namespace gkp::channel {

using cd = std::complex<double>;
using fock::CVec;
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// The four input states of the fidelity formula, in this order.
enum class Input { one, plus, iplus, zero };
inline constexpr std::array<Input, 4> kInputs = {Input::one, Input::plus, Input::iplus, Input::zero};

struct Qubit {
  cd a = 1.0, b = 0.0;  // a|0> + b|1>
};

inline Qubit input_state(Input in) {
  const double r = 1.0 / std::sqrt(2.0);
  switch (in) {
    case Input::one: return {0.0, 1.0};
    case Input::plus: return {r, r};
    case Input::iplus: return {r, cd(0, r)};
    case Input::zero: return {1.0, 0.0};
  }
  return {};
}

inline const char* to_string(Input in) {
  switch (in) {
    case Input::one: return "1";
    case Input::plus: return "+";
    case Input::iplus: return "i";
    case Input::zero: return "0";
  }
  return "?";
}

struct ChannelConfig {
  RationalPolynomial gate;
  fock::GkpParams params;
  fock::TruncationPlan plan;
  double target_phase = 0.0;  // target unitary diag(1, e^{i phase})
  bool smear = true;          // tanh(Delta^2/2) diag(lam, 1/lam) readout smear
  std::size_t n_cut = 59;
  std::size_t lattice_cut = 0;
  double leakage_tol = 1e-3;

  fock::Smear smear_matrix() const {
    if (!smear) return std::nullopt;
    const double t = std::tanh(params.delta * params.delta / 2.0);
    Eigen::Matrix2d S = Eigen::Matrix2d::Zero();
    S(0, 0) = t * params.lam;
    S(1, 1) = t / params.lam;
    return S;
  }
  void validate() const {
    params.validate();
    plan.validate();
    if (n_cut % 2 == 0) throw InvalidArgument("ChannelConfig: n_cut must be odd");
  }
};

inline double target_phase_for_level(long level) { return level <= 0 ? 0.0 : 2.0 * kPi / std::ldexp(1.0, static_cast<int>(level)); }

inline ChannelConfig config_for(const GateSpec& g, double delta, double lam, const fock::TruncationPlan& plan) {
  ChannelConfig c;
  c.gate = g.poly;
  c.params = {delta, lam};
  c.plan = plan;
  c.target_phase = target_phase_for_level(g.target_level);
  return c;
}

// Pauli expectations on the four inputs, normalized by the output norm.
struct LogicalReadout {
  std::map<Input, std::array<double, 3>> bloch;  // (<X>, <Y>, <Z>)
  double max_tail_weight = 0.0;
};

// Encoder, rectangular-frame phase gate and smeared readout for one (gate, Delta, lambda).
inline std::string operator_key(const ChannelConfig& cfg, fock::Pauli which) {
  return cache::pauli_key(which, cfg.params.lam, cfg.params.delta, cfg.plan.d_out(), cfg.n_cut, cfg.smear,
                          cfg.plan.expand_factor);
}

// Builds (or loads) the materialized X, Y, Z readout operators of cfg into the cache.
inline void prewarm(cache::OperatorCache& cache, const ChannelConfig& cfg) {
  cfg.validate();
  std::optional<fock::PauliReadout> ro;
  for (fock::Pauli w : {fock::Pauli::X, fock::Pauli::Y, fock::Pauli::Z})
    cache.get_or_build(operator_key(cfg, w), [&] {
      if (!ro) ro.emplace(fock::PauliSpec{cfg.params.lam, cfg.smear_matrix(), cfg.n_cut}, cfg.plan.d_out(),
                          cfg.plan.expand_factor);
      return ro->matrix(w);
    });
}

class LogicalChannel {
 public:
  // With a cache holding all three operators for cfg, readout uses them instead of the basis transform.
  explicit LogicalChannel(const ChannelConfig& cfg, cache::OperatorCache* cache = nullptr)
      : cfg_(cfg),
        gate_(cfg.gate, cfg.params.lam, cfg.plan),
        readout_({cfg.params.lam, cfg.smear_matrix(), cfg.n_cut}, cfg.plan.d_out(), cfg.plan.expand_factor) {
    cfg.validate();
    std::tie(e0_, e1_) = fock::logical_basis(cfg.params, cfg.plan.d_init, cfg.lattice_cut);
    if (cache) {
      for (std::size_t i = 0; i < 3; ++i) ops_[i] = cache->find(operator_key(cfg, static_cast<fock::Pauli>(i)));
      if (!ops_[0] || !ops_[1] || !ops_[2]) ops_ = {};
    }
  }

  bool uses_cached_operators() const { return static_cast<bool>(ops_[0]); }

  // Output state of the gate for a logical input, plus its weight on the top quarter of d_out.
  CVec output(const Qubit& in, double* tail = nullptr) const {
    const CVec psi = gate_.apply(in.a * e0_ + in.b * e1_);
    const auto d = psi.size();
    const double t = psi.tail(d / 4).squaredNorm() / psi.squaredNorm();
    if (tail) *tail = t;
    if (t > cfg_.leakage_tol) throw TruncationLeakage("logical channel: output weight near the truncation edge", t);
    return psi;
  }

  std::array<double, 3> bloch(const Qubit& in, double* tail = nullptr) const {
    const CVec psi = output(in, tail);
    if (ops_[0]) {
      const double n = psi.squaredNorm();
      return {psi.dot(*ops_[0] * psi).real() / n, psi.dot(*ops_[1] * psi).real() / n, psi.dot(*ops_[2] * psi).real() / n};
    }
    const auto e = readout_.expectations(psi);
    return {e[1] / e[0], e[2] / e[0], e[3] / e[0]};
  }

  LogicalReadout readout() const {
    LogicalReadout r;
    for (Input in : kInputs) {
      double tail = 0;
      r.bloch[in] = bloch(input_state(in), &tail);
      r.max_tail_weight = std::max(r.max_tail_weight, tail);
    }
    return r;
  }

  const ChannelConfig& config() const { return cfg_; }
  const fock::PauliReadout& pauli() const { return readout_; }
  std::pair<CVec, CVec> codewords() const { return {e0_, e1_}; }

 private:
  ChannelConfig cfg_;
  fock::PhaseGate gate_;
  fock::PauliReadout readout_;
  CVec e0_, e1_;
  std::array<std::shared_ptr<const fock::CMat>, 3> ops_{};
};

inline double logical_expectation(const ChannelConfig& cfg, const Qubit& in, fock::Pauli which) {
  const auto b = LogicalChannel(cfg).bloch(in);
  return b[static_cast<std::size_t>(which)];
}

using Mat2 = Eigen::Matrix2cd;

inline std::array<Mat2, 4> paulis() {
  Mat2 I = Mat2::Identity(), X, Y, Z;
  X << 0, 1, 1, 0;
  Y << 0, cd(0, -1), cd(0, 1), 0;
  Z << 1, 0, 0, -1;
  return {I, X, Y, Z};
}

inline Mat2 density(const std::array<double, 3>& b) {
  const auto s = paulis();
  return 0.5 * (s[0] + b[0] * s[1] + b[1] * s[2] + b[2] * s[3]);
}

inline Mat2 target_unitary(double phase) {
  Mat2 U = Mat2::Zero();
  U(0, 0) = 1.0;
  U(1, 1) = std::polar(1.0, phase);
  return U;
}

// F = 1/3 + (1/12) sum_j tr(U s_j U^dag E(s_j)), with E(s_j) assembled from the
// outputs on |1>, |+>, |i>, |0>.
inline double average_gate_fidelity(const LogicalReadout& r, double target_phase) {
  const Mat2 r1 = density(r.bloch.at(Input::one)), rp = density(r.bloch.at(Input::plus));
  const Mat2 ri = density(r.bloch.at(Input::iplus)), r0 = density(r.bloch.at(Input::zero));
  const std::array<Mat2, 4> E = {r0 + r1, 2.0 * rp - r0 - r1, 2.0 * ri - r0 - r1, r0 - r1};
  const auto s = paulis();
  const Mat2 U = target_unitary(target_phase);
  double acc = 0.0;
  for (int j = 0; j < 4; ++j) acc += (U * s[j] * U.adjoint() * E[j]).trace().real();
  return 1.0 / 3.0 + acc / 12.0;
}

inline double average_gate_fidelity(const ChannelConfig& cfg) {
  return average_gate_fidelity(LogicalChannel(cfg).readout(), cfg.target_phase);
}

// Fidelity of E(|+><+|) with U|+>, from the Pauli expectations.
inline double t_state_fidelity(const std::array<double, 3>& b_plus, double target_phase) {
  return 0.5 + 0.5 * (b_plus[0] * std::cos(target_phase) + b_plus[1] * std::sin(target_phase));
}

// Same quantity from the reconstructed 2x2 output.
inline double t_state_fidelity_matrix(const std::array<double, 3>& b_plus, double target_phase) {
  Eigen::Vector2cd t(1.0 / std::sqrt(2.0), std::polar(1.0 / std::sqrt(2.0), target_phase));
  return (t.adjoint() * density(b_plus) * t)(0, 0).real();
}

inline double t_state_fidelity(const ChannelConfig& cfg) {
  return t_state_fidelity(LogicalChannel(cfg).bloch(input_state(Input::plus)), cfg.target_phase);
}

struct SweepRow {
  std::string gate;
  double n_bar = 0, delta = 0, delta_db = 0, lam = 0;
  double avg_infidelity = kNaN;
  double t_state_infidelity = kNaN;
  std::string error;
};

struct SweepOptimum {
  std::string gate;
  double n_bar = 0, delta = 0;
  double lam_opt = 0;
  double avg_infidelity = 0;
  bool boundary = false;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SweepOptimum> optima;
  std::map<std::string, std::array<double, 3>> fit;  // lam_opt ~ c0 + c1 n_bar + c2 n_bar^2
};

inline std::vector<double> uniform_grid(double lo, double hi, std::size_t count) {
  if (count == 0 || hi < lo) throw InvalidArgument("uniform_grid: empty grid");
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i)
    g[i] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  return g;
}

inline std::vector<double> step_grid(double lo, double hi, double step) {
  if (!(step > 0) || hi < lo) throw InvalidArgument("step_grid: bad range");
  std::vector<double> g;
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) g.push_back(lo + step * static_cast<double>(i));
  return g;
}

// Runs fn(i) for i in [0, n) on `workers` threads; results land in index order.
template <class Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  for (auto& t : pool) t.join();
}

inline std::array<double, 3> quadratic_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<Eigen::Index>(x.size());
  if (n < 3) return {kNaN, kNaN, kNaN};
  Eigen::MatrixXd A(n, 3);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = x[static_cast<std::size_t>(i)];
    A(i, 2) = x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
    b(i) = y[static_cast<std::size_t>(i)];
  }
  const Eigen::Vector3d c = A.colPivHouseholderQr().solve(b);
  return {c(0), c(1), c(2)};
}

struct SweepOptions {
  std::size_t workers = 1;
  bool smear = true;
  std::size_t n_cut = 59;
  cache::OperatorCache* cache = nullptr;  // used only for lookups; prewarm() fills it
};

inline SweepResult sweep(const std::vector<GateSpec>& gates, const std::vector<double>& nbar_grid,
                         const std::vector<double>& lam_grid, const fock::TruncationPlan& plan,
                         const SweepOptions& opt = {}) {
  if (gates.empty() || nbar_grid.empty() || lam_grid.empty()) throw InvalidArgument("sweep: grids must be nonempty");
  plan.validate();
  SweepResult res;
  for (const auto& g : gates)
    for (double nb : nbar_grid)
      for (double lam : lam_grid) {
        const auto gp = fock::GkpParams::from_nbar(nb, lam);
        res.rows.push_back({g.name, nb, gp.delta, gp.delta_db(), lam, kNaN, kNaN, {}});
      }
  std::map<std::string, const GateSpec*> by_name;
  for (const auto& g : gates) by_name[g.name] = &g;
  parallel_for(res.rows.size(), opt.workers, [&](std::size_t i) {
    SweepRow& r = res.rows[i];
    try {
      ChannelConfig cfg = config_for(*by_name.at(r.gate), r.delta, r.lam, plan);
      cfg.smear = opt.smear;
      cfg.n_cut = opt.n_cut;
      const LogicalReadout rd = LogicalChannel(cfg, opt.cache).readout();
      r.avg_infidelity = 1.0 - average_gate_fidelity(rd, cfg.target_phase);
      r.t_state_infidelity = 1.0 - t_state_fidelity(rd.bloch.at(Input::plus), cfg.target_phase);
    } catch (const std::exception& e) {
      r.error = e.what();
    }
  });
  const std::size_t L = lam_grid.size();
  for (std::size_t gi = 0; gi < gates.size(); ++gi) {
    std::vector<double> xs, ys;
    for (std::size_t ni = 0; ni < nbar_grid.size(); ++ni) {
      const std::size_t base = (gi * nbar_grid.size() + ni) * L;
      std::size_t best = L;
      for (std::size_t li = 0; li < L; ++li) {
        const SweepRow& r = res.rows[base + li];
        if (!r.error.empty() || !std::isfinite(r.avg_infidelity)) continue;
        if (best == L || r.avg_infidelity < res.rows[base + best].avg_infidelity) best = li;
      }
      if (best == L) continue;
      const SweepRow& b = res.rows[base + best];
      const bool boundary = L > 1 && (best == 0 || best == L - 1);
      res.optima.push_back({b.gate, b.n_bar, b.delta, b.lam, b.avg_infidelity, boundary});
      if (!boundary) {
        xs.push_back(b.n_bar);
        ys.push_back(b.lam);
      }
    }
    res.fit[gates[gi].name] = quadratic_fit(xs, ys);
  }
  return res;
}

// Bloch vectors of the single-qubit Clifford orbit of the T state, rounded and deduplicated.
inline std::vector<std::array<double, 3>> t_state_orbit() {
  const double r = 1.0 / std::sqrt(2.0);
  std::vector<std::array<double, 3>> orbit = {{r, r, 0.0}};
  auto same = [](const std::array<double, 3>& a, const std::array<double, 3>& b) {
    return std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]) + std::abs(a[2] - b[2]) < 1e-9;
  };
  for (std::size_t i = 0; i < orbit.size(); ++i) {
    const auto v = orbit[i];
    const std::array<std::array<double, 3>, 2> imgs = {{{v[2], -v[1], v[0]}, {-v[1], v[0], v[2]}}};  // H, S
    for (const auto& w : imgs)
      if (std::none_of(orbit.begin(), orbit.end(), [&](const auto& o) { return same(o, w); })) orbit.push_back(w);
  }
  return orbit;
}

struct VacuumMethodConfig {
  double delta = 0.25;
  std::size_t grid = 500;
  double postselect_fraction = 1.0;
  int lattice_cut = 8;
};

struct VacuumCell {
  double prob;      // probability mass of the cell
  double fidelity;  // best fidelity over the T-state orbit
};

struct VacuumTable {
  std::vector<VacuumCell> cells;  // sorted by fidelity, best first
  double total_mass = 0;
  bool coarse = false;
  double infidelity_at(double p) const;
  double fraction_to_match(double target_infidelity) const;
};

inline VacuumTable vacuum_table(const VacuumMethodConfig& c) {
  if (!(c.delta > 0)) throw InvalidArgument("vacuum method: delta must be > 0");
  if (c.grid < 2) throw InvalidArgument("vacuum method: grid must be >= 2");
  const auto orbit = t_state_orbit();
  if (orbit.size() != 12) throw NumericFailure("vacuum method: T-state Clifford orbit does not have 12 elements");
  const double side = 2.0 * analytic::kInvSqrt8, h = side / static_cast<double>(c.grid);
  VacuumTable t;
  t.coarse = c.grid < 100;
  t.cells.reserve(c.grid * c.grid);
  for (std::size_t i = 0; i < c.grid; ++i) {
    const double vq = -analytic::kInvSqrt8 + h * (static_cast<double>(i) + 0.5);
    for (std::size_t j = 0; j < c.grid; ++j) {
      const double vp = -analytic::kInvSqrt8 + h * (static_cast<double>(j) + 0.5);
      const auto post = analytic::vacuum_posterior(c.delta, vq, vp, c.lattice_cut);
      double best = 0.0;
      for (const auto& o : orbit)
        best = std::max(best, 0.5 * (1.0 + o[0] * post.bloch[0] + o[1] * post.bloch[1] + o[2] * post.bloch[2]));
      t.cells.push_back({post.density * h * h, best});
      t.total_mass += post.density * h * h;
    }
  }
  for (auto& cell : t.cells) cell.prob /= t.total_mass;
  std::stable_sort(t.cells.begin(), t.cells.end(), [](const VacuumCell& a, const VacuumCell& b) { return a.fidelity > b.fidelity; });
  return t;
}

// Mean infidelity over the best cells carrying probability p; the cell that
// straddles the cut contributes fractionally. p -> 0 gives the best cell.
inline double VacuumTable::infidelity_at(double p) const {
  if (!(p >= 0 && p <= 1 + 1e-12)) throw InvalidArgument("vacuum method: postselection fraction must be in (0, 1]");
  if (cells.empty()) throw PreconditionViolation("vacuum method: empty table");
  if (p <= 0) return 1.0 - cells.front().fidelity;
  double mass = 0, acc = 0;
  for (const auto& c : cells) {
    const double take = std::min(c.prob, p - mass);
    if (take <= 0) break;
    mass += take;
    acc += take * (1.0 - c.fidelity);
  }
  return acc / mass;
}

// Largest fraction p whose postselected infidelity does not exceed the target.
inline double VacuumTable::fraction_to_match(double target) const {
  double mass = 0, acc = 0;
  for (const auto& c : cells) {
    const double inf = 1.0 - c.fidelity;
    // Solve (acc + x inf) / (mass + x) = target for the portion x of this cell.
    if ((acc + c.prob * inf) > target * (mass + c.prob)) {
      if (inf <= target) return mass + c.prob;
      const double x = (target * mass - acc) / (inf - target);
      return mass + std::clamp(x, 0.0, c.prob);
    }
    mass += c.prob;
    acc += c.prob * inf;
  }
  return 1.0;
}

struct VacuumResult {
  double infidelity = 0;
  double acceptance_probability = 0;
  bool coarse_grid = false;
};

inline VacuumResult vacuum_state_method(const VacuumMethodConfig& c) {
  if (!(c.postselect_fraction >= 0 && c.postselect_fraction <= 1))
    throw InvalidArgument("vacuum method: postselection fraction must be in (0, 1]");
  const VacuumTable t = vacuum_table(c);
  const double p = c.postselect_fraction;
  return {t.infidelity_at(p), p <= 0 ? t.cells.front().prob : p, t.coarse};
}

}  // namespace gkp::channel
