#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "gkp/error.hpp"
#include "gkp/polynomial.hpp"

namespace gkp::analytic {

using cd = std::complex<double>;
inline constexpr double kPi = std::numbers::pi;
inline const double kInvSqrt8 = 1.0 / std::sqrt(8.0);

// Normal density in displacement units: variance s / (2 pi).
inline double normal_pi(double s, double x) { return std::exp(-kPi * x * x / s) / std::sqrt(s); }

// Moment E(x^k) of the x_+ variable with E(x^2) = 1 / (pi dp^2).
inline double gaussian_moment(unsigned k, double dp) {
  if (k % 2 == 1) return 0.0;
  const double kk = static_cast<double>(k);
  return std::pow(2.0, kk / 2.0) * std::pow(kPi, -(1.0 + kk) / 2.0) * std::tgamma((1.0 + kk) / 2.0) * std::pow(dp, -kk);
}

inline double beta_coefficient(unsigned k) {
  const double kk = static_cast<double>(k);
  return 2.0 * kk * (kk - 1.0) / std::pow(std::sqrt(2.0), kk - 1.0);
}

struct MomentSummary {
  double e_vq2 = 0, e_vp2 = 0, e_vqvp = 0;
  double e_vq = 0, e_vp = 0;
  double gate_vp2 = 0;  // gate-induced part of E(v_p^2)
};

inline MomentSummary moments(const RationalPolynomial& P, double dq, double dp) {
  if (!(dq > 0) || !(dp > 0)) throw InvalidArgument("moments: squeezing parameters must be > 0");
  const auto a = P.to_doubles();
  const unsigned n = static_cast<unsigned>(P.degree());
  MomentSummary m;
  m.e_vq2 = dq * dq / (4.0 * kPi);
  double sq = 0.0;
  for (unsigned j = 2; j <= n; ++j)
    for (unsigned k = 2; k <= n; ++k)
      sq += a[j] * a[k] * beta_coefficient(j) * beta_coefficient(k) * gaussian_moment(j + k - 4, dp);
  m.gate_vp2 = dq * dq / (2.0 * kPi) * sq;
  m.e_vp2 = dp * dp / (4.0 * kPi) + m.gate_vp2;
  double cross = 0.0;
  for (unsigned k = 2; k <= n; k += 2) cross += a[k] * beta_coefficient(k) * gaussian_moment(k - 2, dp);
  m.e_vqvp = dq * dq / (2.0 * std::sqrt(2.0) * kPi) * cross;
  return m;
}

// Conditional moments E(v_p^m | v_q) for m = 1, 2. Higher orders are not implemented.
inline double conditional_vp_moment(const RationalPolynomial& P, double dp, double vq, unsigned order) {
  const auto a = P.to_doubles();
  const unsigned n = static_cast<unsigned>(P.degree());
  if (order == 1) {
    double s = 0.0;
    for (unsigned k = 2; k <= n; k += 2) s += a[k] * beta_coefficient(k) * gaussian_moment(k - 2, dp);
    return std::sqrt(2.0) * vq * s;
  }
  if (order == 2) {
    double s = 0.0;
    for (unsigned j = 2; j <= n; ++j)
      for (unsigned k = 2; k <= n; ++k)
        s += a[j] * a[k] * beta_coefficient(j) * beta_coefficient(k) * gaussian_moment(j + k - 4, dp);
    return dp * dp / (4.0 * kPi) + 2.0 * vq * vq * s;
  }
  throw InvalidArgument("conditional_vp_moment: only orders 1 and 2 are implemented");
}

// Exact factor a_n^2 of the leading shear term; its ratio between two gates of
// equal degree is the ratio of their leading shear variances.
inline Rational leading_shear_weight(const RationalPolynomial& P) {
  const Rational an = P.coeff(P.degree());
  return an * an;
}

// Leading-order shear contribution to E(v_p^2).
inline double leading_shear_variance(const RationalPolynomial& P, double dq, double dp) {
  const unsigned n = static_cast<unsigned>(P.degree());
  if (n < 2) return 0.0;
  const double an = P.coeff(n).to_double(), b = beta_coefficient(n);
  return dq * dq / (2.0 * kPi) * an * an * b * b * gaussian_moment(2 * n - 4, dp);
}

inline double lambda_opt_asymptotic(const RationalPolynomial& P, double delta) {
  const unsigned n = static_cast<unsigned>(P.degree());
  if (n < 3) throw PreconditionViolation("lambda_opt_asymptotic: degree must be >= 3 (no biasing needed below)");
  if (!(delta > 0)) throw InvalidArgument("lambda_opt_asymptotic: delta must be > 0");
  const double an = P.coeff(n).to_double(), b = beta_coefficient(n), nn = static_cast<double>(n);
  const double K = an * an * b * b * std::pow(2.0, nn - 3.0) * std::pow(kPi, 0.5 - nn) * std::tgamma(nn - 1.5);
  return std::pow(4.0 * kPi * (nn - 1.0) * K / std::pow(delta, 2.0 * nn - 4.0), 1.0 / nn);
}

// 1 + 2 sum q^{n^2}, truncated once the term drops below 1e-15.
inline double theta3(double q) {
  if (!(q >= 0 && q < 1)) throw InvalidArgument("theta3: nome must be in [0, 1)");
  double s = 1.0;
  for (long n = 1;; ++n) {
    const double t = std::pow(q, static_cast<double>(n * n));
    s += 2.0 * t;
    if (t < 1e-15) break;
  }
  return s;
}

inline double c_delta_lambda(double delta, double lam) {
  const double d2 = delta * delta, cth = 1.0 / std::tanh(d2);
  return 2.0 * cth * std::tanh(d2 / 2.0) * theta3(std::exp(-kPi * cth / lam)) * theta3(std::exp(-kPi * lam * cth));
}

// Twirled error density of the cubic gate; integrates to 1 over the plane.
inline double cubic_twirled_density(double delta, double lam, double vq, double vp) {
  if (!(delta > 0) || !(lam > 0)) throw InvalidArgument("cubic_twirled_density: delta and lambda must be > 0");
  const double t = std::tanh(delta * delta / 2.0);
  const double shift = vq / 2.0 - vq * vq / std::sqrt(2.0);
  return normal_pi(t / lam, vq) * normal_pi(vq * vq / (2.0 * lam * t) + lam * t, vp - shift);
}

struct BoundResult {
  double delta = 0;
  double lam_of_delta = 0;
  double p0_lower = 0;
  double c_norm = 0;
  double f_lower_bound = 0;
  bool validity = false;
};

inline double ft_lambda(double delta) {
  const double t = std::tanh(delta * delta / 2.0);
  return std::pow(3.0, 0.4) / std::pow(2.0, 0.8) * std::pow(t, -0.6);
}

inline double ft_validity_limit() { return std::sqrt(2.0) * std::sqrt(std::atanh(std::pow(1.5, 0.25) / 16.0)); }

inline BoundResult ft_lower_bound(double delta) {
  if (!(delta > 0)) throw InvalidArgument("ft_lower_bound: delta must be > 0");
  BoundResult r;
  r.delta = delta;
  const double t = std::tanh(delta * delta / 2.0);
  const double lam = ft_lambda(delta);
  r.lam_of_delta = lam;
  const double ratio = t / lam;
  r.validity = std::pow(ratio, 0.25) <= kInvSqrt8;
  const double width = std::sqrt(std::sqrt(ratio) / (2.0 * lam * t) + lam * t);
  r.p0_lower = std::erf(std::sqrt(kPi) / std::pow(ratio, 0.25)) * std::erf(std::sqrt(kPi) / (4.0 * std::sqrt(8.0) * width));
  r.c_norm = c_delta_lambda(delta, lam);
  // The lattice tail is majorized by 1 - p0.
  const double diff = std::max(0.0, r.p0_lower - (1.0 - r.p0_lower)) / r.c_norm;
  r.f_lower_bound = 2.0 / 3.0 * diff * diff + 1.0 / 3.0;
  return r;
}

// Logical Pauli index: 0 = Id, 1 = X, 2 = Y, 3 = Z.
inline std::array<int, 2> logical_offset(int mu) {
  static const int tab[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  if (mu < 0 || mu > 3) throw InvalidArgument("logical Pauli index must be 0..3");
  return {tab[mu][0], tab[mu][1]};
}

inline bool in_patch(double vq, double vp) {
  return vq > -kInvSqrt8 && vq <= kInvSqrt8 && vp > -kInvSqrt8 && vp <= kInvSqrt8;
}

// chi(w) = scale * exp(-pi w^T A w).
struct GaussianChi {
  Eigen::Matrix2d A = 0.5 * Eigen::Matrix2d::Identity();
  double scale = 1.0;
  double operator()(double wq, double wp) const {
    const Eigen::Vector2d w(wq, wp);
    return scale * std::exp(-kPi * w.dot(A * w));
  }
  static GaussianChi thermal(double n_bar) {
    GaussianChi c;
    c.A = (0.5 + n_bar) * Eigen::Matrix2d::Identity();
    return c;
  }
};

// xi^mu(v) = Tr[Pi_mu W(v)^dag O] as a lattice sum over w_n = l_mu + sqrt(2) n.
inline cd logical_char_function(const GaussianChi& chi, int mu, double vq, double vp, int lattice_cut = 8) {
  if (!in_patch(vq, vp)) throw InvalidArgument("logical_char_function: v outside the correctable patch");
  if (lattice_cut < 1) throw InvalidArgument("logical_char_function: lattice_cut must be >= 1");
  const auto l = logical_offset(mu);
  const double r2 = std::sqrt(2.0);
  cd sum = 0.0;
  double edge = 0.0, total = 0.0;
  for (int nq = -lattice_cut; nq <= lattice_cut; ++nq) {
    for (int np = -lattice_cut; np <= lattice_cut; ++np) {
      const double wq = l[0] / r2 + r2 * nq, wp = l[1] / r2 + r2 * np;
      const int sgn = ((l[0] * np + l[1] * nq) % 2 == 0) ? 1 : -1;
      const double c = chi(vq - wq, vp - wp);
      const cd ph = std::polar(1.0, -kPi * (vq * wp - vp * wq));
      sum += static_cast<double>(sgn) * ph * c;
      total += std::abs(c);
      if (std::abs(nq) == lattice_cut || std::abs(np) == lattice_cut) edge = std::max(edge, std::abs(c));
    }
  }
  if (edge > 1e-12 * std::max(total, 1e-300)) throw AccuracyError("logical_char_function: lattice_cut too small");
  return sum / std::sqrt(kPi);
}

struct Posterior {
  double density = 0;
  std::array<double, 3> bloch{};
};

// Syndrome density and conditional logical Bloch vector for the vacuum state
// after one ideal GKP error-correction round with measurement noise.
inline Posterior vacuum_posterior(double delta, double vq, double vp, int lattice_cut = 8) {
  if (!(delta > 0)) throw InvalidArgument("vacuum_posterior: delta must be > 0");
  if (!in_patch(vq, vp)) throw InvalidArgument("vacuum_posterior: v outside the correctable patch");
  const double a = 0.5 + std::tanh(delta * delta / 2.0);
  const double r2 = std::sqrt(2.0);
  // One-dimensional factors: along q (phase from v_p) and along p (phase from v_q).
  auto line = [&](int offset, int sign_bit, double v, double phase_sign) {
    cd s = 0.0;
    for (int n = -lattice_cut; n <= lattice_cut; ++n) {
      const double w = offset / r2 + r2 * n;
      const double sg = (sign_bit * n) % 2 == 0 ? 1.0 : -1.0;
      s += sg * std::polar(std::exp(-kPi * a * w * w), phase_sign * 2.0 * kPi * v * w);
    }
    return s;
  };
  std::array<double, 4> comp{};
  for (int mu = 0; mu < 4; ++mu) {
    const auto l = logical_offset(mu);
    const cd fq = line(l[0], l[1], vp, +1.0);
    const cd fp = line(l[1], l[0], vq, -1.0);
    const cd val = 2.0 * fq * fp;
    if (std::abs(val.imag()) > 1e-9 * std::max(1.0, std::abs(val)))
      throw NumericFailure("vacuum_posterior: component is not real");
    comp[static_cast<std::size_t>(mu)] = val.real();
  }
  Posterior p;
  p.density = comp[0];
  for (int i = 0; i < 3; ++i) p.bloch[static_cast<std::size_t>(i)] = comp[static_cast<std::size_t>(i + 1)] / comp[0];
  return p;
}

}  // namespace gkp::analytic
