#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "gkp/error.hpp"

namespace gkp::symplectic {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Quadrature order (q_1..q_N, p_1..p_N). S maps input quadratures to output
// quadratures in the Heisenberg picture, so a circuit A then B has S = S_B S_A
// and a noise covariance transforms as S Sigma S^T.
struct GaussianOp {
  Mat S;
  Vec d;
  std::size_t modes() const { return static_cast<std::size_t>(S.rows() / 2); }
};

struct CovState {
  Vec mu;
  Mat Sigma;
};

inline Mat omega(std::size_t N) {
  const auto n = static_cast<Eigen::Index>(N);
  Mat O = Mat::Zero(2 * n, 2 * n);
  O.topRightCorner(n, n) = Mat::Identity(n, n);
  O.bottomLeftCorner(n, n) = -Mat::Identity(n, n);
  return O;
}

inline double symplectic_residual(const Mat& S) {
  const Mat O = omega(static_cast<std::size_t>(S.rows() / 2));
  return (S.transpose() * O * S - O).cwiseAbs().maxCoeff();
}

inline GaussianOp identity(std::size_t N) {
  const auto n = static_cast<Eigen::Index>(2 * N);
  return {Mat::Identity(n, n), Vec::Zero(n)};
}

namespace detail {
inline void check_mode(std::size_t i, std::size_t N) {
  if (i >= N) throw InvalidArgument("mode index " + std::to_string(i) + " out of range for " + std::to_string(N) + " modes");
}
inline void check_pair(std::size_t i, std::size_t j, std::size_t N) {
  check_mode(i, N);
  check_mode(j, N);
  if (i == j) throw InvalidArgument("two-mode generator needs distinct modes");
}
}  // namespace detail

// exp(i theta (p_i q_j - q_i p_j)): rotates (q_i, q_j) and (p_i, p_j) by theta.
inline GaussianOp beam_splitter(double theta, std::size_t i, std::size_t j, std::size_t N) {
  detail::check_pair(i, j, N);
  GaussianOp g = identity(N);
  const double c = std::cos(theta), s = std::sin(theta);
  for (std::size_t off : {std::size_t{0}, N}) {
    const auto a = static_cast<Eigen::Index>(off + i), b = static_cast<Eigen::Index>(off + j);
    g.S(a, a) = c;
    g.S(a, b) = -s;
    g.S(b, a) = s;
    g.S(b, b) = c;
  }
  return g;
}

// q_i -> alpha q_i, p_i -> p_i / alpha.
inline GaussianOp squeezer(double alpha, std::size_t i, std::size_t N) {
  detail::check_mode(i, N);
  if (!(alpha > 0) || !std::isfinite(alpha)) throw InvalidArgument("squeezer needs alpha > 0");
  GaussianOp g = identity(N);
  g.S(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = alpha;
  g.S(static_cast<Eigen::Index>(N + i), static_cast<Eigen::Index>(N + i)) = 1.0 / alpha;
  return g;
}

// exp(-i g q_i p_j): q_j -> q_j + g q_i, p_i -> p_i - g p_j.
inline GaussianOp cx(double gain, std::size_t i, std::size_t j, std::size_t N) {
  detail::check_pair(i, j, N);
  GaussianOp g = identity(N);
  g.S(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = gain;
  g.S(static_cast<Eigen::Index>(N + i), static_cast<Eigen::Index>(N + j)) = -gain;
  return g;
}

// exp(i xi p_i q_j): q_i -> q_i - xi q_j, p_j -> p_j + xi p_i.
inline GaussianOp feedforward(double xi, std::size_t i, std::size_t j, std::size_t N) {
  detail::check_pair(i, j, N);
  GaussianOp g = identity(N);
  g.S(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = -xi;
  g.S(static_cast<Eigen::Index>(N + j), static_cast<Eigen::Index>(N + i)) = xi;
  return g;
}

// The single-mode squeeze gate of the circuit diagrams, exp(i ln(a)/2 (qp+pq)),
// conjugates q to q/a.
inline GaussianOp paper_squeeze(double a, std::size_t i, std::size_t N) { return squeezer(1.0 / a, i, N); }

// ops in circuit order (first applied first).
inline GaussianOp compose(const std::vector<GaussianOp>& ops) {
  if (ops.empty()) throw InvalidArgument("compose: empty circuit");
  GaussianOp out = ops.front();
  for (std::size_t k = 1; k < ops.size(); ++k) {
    const GaussianOp& g = ops[k];
    if (g.S.rows() != out.S.rows()) throw InvalidArgument("compose: mode count mismatch");
    out.S = g.S * out.S;
    out.d = g.S * out.d + g.d;
  }
  return out;
}

inline CovState propagate(const GaussianOp& g, const CovState& s) {
  return {g.S * s.mu + g.d, g.S * s.Sigma * g.S.transpose()};
}

struct MorphingParams {
  double xi_ff, theta, alpha1, alpha2;
};

inline MorphingParams morphing_params(double lam) {
  if (!(lam > 0)) throw InvalidArgument("morphing_params: lambda must be > 0");
  return {std::sqrt(lam) / (lam + 1.0), std::atan(std::sqrt(lam)), std::sqrt(lam + 1.0), 1.0 / std::sqrt(lam + 1.0)};
}

inline std::pair<double, double> biasing_update(double delta, double lam) {
  if (!(delta > 0) || !(lam > 0)) throw InvalidArgument("biasing_update: delta and lambda must be > 0");
  return {delta / std::sqrt(1.0 + lam), delta * std::sqrt(1.0 + lam)};
}

inline double breeding_angle(double lam) {
  if (!(lam >= 1)) throw InvalidArgument("breeding_angle: lambda must be >= 1");
  return std::atan(1.0 / std::sqrt(lam));
}

struct Conditioned {
  CovState state;  // over the unmeasured indices, in their original order
  Mat gain;        // Sigma_DA Sigma_AA^-1
  std::vector<std::size_t> kept;
};

// Gaussian conditioning on exact knowledge of the measured quadratures.
inline Conditioned condition_on_homodyne(const CovState& st, const std::vector<std::size_t>& measured) {
  const auto n = static_cast<std::size_t>(st.Sigma.rows());
  std::vector<bool> is_meas(n, false);
  for (auto m : measured) {
    if (m >= n) throw InvalidArgument("measured index out of range");
    is_meas[m] = true;
  }
  std::vector<std::size_t> kept;
  for (std::size_t k = 0; k < n; ++k)
    if (!is_meas[k]) kept.push_back(k);
  const auto na = static_cast<Eigen::Index>(measured.size()), nd = static_cast<Eigen::Index>(kept.size());
  Mat Sdd(nd, nd), Sda(nd, na), Saa(na, na);
  for (Eigen::Index a = 0; a < nd; ++a) {
    for (Eigen::Index b = 0; b < nd; ++b) Sdd(a, b) = st.Sigma(kept[a], kept[b]);
    for (Eigen::Index b = 0; b < na; ++b) Sda(a, b) = st.Sigma(kept[a], measured[b]);
  }
  for (Eigen::Index a = 0; a < na; ++a)
    for (Eigen::Index b = 0; b < na; ++b) Saa(a, b) = st.Sigma(measured[a], measured[b]);

  Conditioned out;
  out.kept = kept;
  if (na == 0) {
    out.gain = Mat::Zero(nd, 0);
    out.state.Sigma = Sdd;
  } else {
    Eigen::LDLT<Mat> ldlt(Saa);
    const double scale = Saa.cwiseAbs().maxCoeff();
    const double pivot = ldlt.vectorD().cwiseAbs().minCoeff();
    if (ldlt.info() != Eigen::Success || !(pivot > 1e-14 * scale)) {
      std::string idx;
      for (auto m : measured) idx += (idx.empty() ? "" : ",") + std::to_string(m);
      throw SingularConditioning("condition_on_homodyne: measured block is singular", idx);
    }
    out.gain = ldlt.solve(Sda.transpose()).transpose();
    out.state.Sigma = Sdd - out.gain * Sda.transpose();
    out.state.Sigma = 0.5 * (out.state.Sigma + out.state.Sigma.transpose()).eval();
  }
  out.state.mu = Vec(nd);
  for (Eigen::Index a = 0; a < nd; ++a) out.state.mu(a) = st.mu(kept[a]);
  return out;
}

// Mean update for a given outcome vector (same order as `measured`).
inline Vec conditional_mean(const CovState& st, const Conditioned& c, const std::vector<std::size_t>& measured,
                            const Vec& outcome) {
  Vec shift(static_cast<Eigen::Index>(measured.size()));
  for (std::size_t k = 0; k < measured.size(); ++k) shift(k) = outcome(k) - st.mu(measured[k]);
  return c.state.mu + c.gain * shift;
}

// Data mode is mode 0; ancillas are modes 1..N_anc. All modes start with
// Delta^2 Id noise, ancilla positions are measured and ancilla momenta dropped.
inline double nogo_check(const GaussianOp& circuit, std::size_t n_ancilla, double delta) {
  const std::size_t N = circuit.modes();
  if (N != n_ancilla + 1) throw InvalidArgument("nogo_check: circuit must act on 1 data + N_ancilla modes");
  if (!(delta > 0)) throw InvalidArgument("nogo_check: delta must be > 0");
  CovState in{Vec::Zero(2 * N), delta * delta * Mat::Identity(2 * N, 2 * N)};
  CovState out = propagate(circuit, in);
  // drop ancilla momenta
  std::vector<std::size_t> keep = {0};
  for (std::size_t a = 1; a < N; ++a) keep.push_back(a);
  keep.push_back(N);
  const auto nk = static_cast<Eigen::Index>(keep.size());
  CovState marg{Vec::Zero(nk), Mat(nk, nk)};
  for (Eigen::Index a = 0; a < nk; ++a)
    for (Eigen::Index b = 0; b < nk; ++b) marg.Sigma(a, b) = out.Sigma(keep[a], keep[b]);
  std::vector<std::size_t> measured;
  for (std::size_t a = 1; a < N; ++a) measured.push_back(a);
  Conditioned c = condition_on_homodyne(marg, measured);
  return c.state.Sigma.determinant();
}

// Product of seeded random generators on N modes (not Haar).
inline GaussianOp random_circuit(std::size_t N, std::size_t depth, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kind(0, 3);
  std::uniform_int_distribution<std::size_t> mode(0, N - 1);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<GaussianOp> ops{identity(N)};
  for (std::size_t k = 0; k < depth; ++k) {
    const int t = N > 1 ? kind(rng) : 1;
    std::size_t i = mode(rng), j = mode(rng);
    while (N > 1 && j == i) j = mode(rng);
    const double x = gauss(rng);
    switch (t) {
      case 0: ops.push_back(beam_splitter(x * std::numbers::pi, i, j, N)); break;
      case 1: ops.push_back(squeezer(std::exp(0.5 * x), i, N)); break;
      case 2: ops.push_back(cx(x, i, j, N)); break;
      default: ops.push_back(feedforward(x, i, j, N)); break;
    }
  }
  return compose(ops);
}

struct IdentityCheck {
  std::string name;
  double residual;
  double symplectic_residual;
};

inline double max_abs_diff(const Mat& a, const Mat& b) { return (a - b).cwiseAbs().maxCoeff(); }

// q-Steane rewrite, morphing identity for each lambda, breeding identity for each lambda.
inline std::vector<IdentityCheck> identity_suite(const std::vector<double>& lams) {
  std::vector<IdentityCheck> out;
  {
    GaussianOp lhs = compose({cx(1.0, 0, 1, 2), feedforward(0.5, 0, 1, 2)});
    GaussianOp rhs = compose({beam_splitter(std::numbers::pi / 4, 0, 1, 2), paper_squeeze(std::sqrt(2.0), 0, 2),
                              paper_squeeze(1.0 / std::sqrt(2.0), 1, 2)});
    out.push_back({"q-steane-rewrite", max_abs_diff(lhs.S, rhs.S), symplectic_residual(lhs.S)});
  }
  for (double lam : lams) {
    const MorphingParams m = morphing_params(lam);
    GaussianOp lhs = compose({cx(std::sqrt(lam), 0, 1, 2), feedforward(m.xi_ff, 0, 1, 2)});
    GaussianOp rhs = compose({beam_splitter(m.theta, 0, 1, 2), paper_squeeze(m.alpha1, 0, 2), paper_squeeze(m.alpha2, 1, 2)});
    // closed-form matrices written out entry by entry
    const double s = std::sqrt(lam), xi = m.xi_ff, c = std::cos(m.theta), sn = std::sin(m.theta);
    Mat lhs_closed(4, 4), rhs_closed(4, 4);
    lhs_closed << 1 - xi * s, -xi, 0, 0, s, 1, 0, 0, 0, 0, 1, -s, 0, 0, xi, 1 - xi * s;
    rhs_closed << c / m.alpha1, -sn / m.alpha1, 0, 0, sn / m.alpha2, c / m.alpha2, 0, 0, 0, 0, m.alpha1 * c,
        -m.alpha1 * sn, 0, 0, m.alpha2 * sn, m.alpha2 * c;
    const double r = std::max({max_abs_diff(lhs.S, rhs.S), max_abs_diff(lhs.S, lhs_closed), max_abs_diff(rhs.S, rhs_closed)});
    out.push_back({"morphing lambda=" + std::to_string(lam), r, symplectic_residual(rhs.S)});
  }
  for (double lam : lams) {
    if (lam < 1) continue;
    GaussianOp lhs = compose({cx(1.0 / std::sqrt(lam), 0, 1, 2), feedforward(std::sqrt(lam) / (lam + 1.0), 0, 1, 2)});
    GaussianOp rhs = compose({beam_splitter(breeding_angle(lam), 0, 1, 2),
                              paper_squeeze(std::sqrt((lam + 1.0) / lam), 0, 2),
                              paper_squeeze(std::sqrt(lam / (lam + 1.0)), 1, 2)});
    out.push_back({"breeding lambda=" + std::to_string(lam), max_abs_diff(lhs.S, rhs.S), symplectic_residual(rhs.S)});
  }
  return out;
}

// Conditioned data covariance of the biased q-Steane round: cx(sqrt(lam)) from
// data to ancilla, ancilla position measured, ancilla momentum dropped.
inline Mat biased_steane_conditioned(double delta, double lam) {
  GaussianOp g = cx(std::sqrt(lam), 0, 1, 2);
  CovState out = propagate(g, {Vec::Zero(4), delta * delta * Mat::Identity(4, 4)});
  CovState marg{Vec::Zero(3), Mat(3, 3)};
  const std::size_t keep[3] = {0, 1, 2};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) marg.Sigma(a, b) = out.Sigma(keep[a], keep[b]);
  return condition_on_homodyne(marg, {1}).state.Sigma;
}

}  // namespace gkp::symplectic
