#pragma once

// Reference constructions used only by the tests and the acceptance binary.
// None of them goes through the coherent-state sums or the quadrature
// eigenbasis of the library.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

using cd = std::complex<double>;
inline constexpr double kPi = std::numbers::pi;

// psi_0 .. psi_{n-1} at x, standard Hermite functions.
inline std::vector<double> hermite_functions(double x, std::size_t n) {
  std::vector<double> h(n, 0.0);
  h[0] = std::pow(kPi, -0.25) * std::exp(-x * x / 2.0);
  if (n > 1) h[1] = std::sqrt(2.0) * x * h[0];
  for (std::size_t k = 1; k + 1 < n; ++k)
    h[k + 1] = std::sqrt(2.0 / static_cast<double>(k + 1)) * x * h[k] - std::sqrt(static_cast<double>(k) / static_cast<double>(k + 1)) * h[k - 1];
  return h;
}

// sum_n r^n psi_n(x) psi_n(y), closed form.
inline double mehler(double r, double x, double y) {
  const double s = 1.0 - r * r;
  return std::exp(-((1.0 + r * r) * (x * x + y * y) - 4.0 * r * x * y) / (2.0 * s)) / std::sqrt(kPi * s);
}

struct Grid {
  std::vector<double> x;
  double h = 0;
  static Grid uniform(double half_width, std::size_t n) {
    Grid g;
    g.h = 2.0 * half_width / static_cast<double>(n);
    g.x.resize(n);
    for (std::size_t j = 0; j < n; ++j) g.x[j] = -half_width + g.h * (static_cast<double>(j) + 0.5);
    return g;
  }
};

// exp(-Delta^2 n) applied to the ideal comb at (2s + bit) sqrt(lam pi), in position space.
inline std::vector<cd> codeword_wavefunction(int bit, double delta, double lam, const Grid& g) {
  const double r = std::exp(-delta * delta), step = std::sqrt(lam * kPi);
  const long S = static_cast<long>(std::ceil(12.0 / (delta * step))) + 2;
  std::vector<cd> psi(g.x.size(), 0.0);
  for (std::size_t j = 0; j < g.x.size(); ++j) {
    double s = 0;
    for (long k = -S; k <= S; ++k) s += mehler(r, g.x[j], (2.0 * static_cast<double>(k) + bit) * step);
    psi[j] = s;
  }
  return psi;
}

// Fock coefficients <n|psi>, n < d, by quadrature on the grid.
inline Eigen::VectorXcd project(const std::vector<cd>& psi, const Grid& g, std::size_t d) {
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(d));
  for (std::size_t j = 0; j < g.x.size(); ++j) {
    if (std::abs(psi[j]) == 0.0) continue;
    const auto h = hermite_functions(g.x[j], d);
    for (std::size_t n = 0; n < d; ++n) c(static_cast<Eigen::Index>(n)) += g.h * h[n] * psi[j];
  }
  return c;
}

inline double grid_norm2(const std::vector<cd>& psi, const Grid& g) {
  double s = 0;
  for (const auto& v : psi) s += std::norm(v);
  return s * g.h;
}

inline double fidelity(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  Eigen::VectorXcd A = Eigen::VectorXcd::Zero(std::max(a.size(), b.size())), B = A;
  A.head(a.size()) = a;
  B.head(b.size()) = b;
  return std::norm(A.dot(B)) / (A.squaredNorm() * B.squaredNorm());
}

// Decoded logical density matrix of a state with position kernel rho(x, y)
// after an ideal square-code correction conditioned on syndrome v, unnormalized.
// Basis: |j> are combs at (2s + j) sqrt(pi) displaced by W(v).
inline Eigen::Matrix2cd decoded_logical_state(const std::function<double(double, double)>& rho, double vq, double vp, long S = 8) {
  const double a = std::sqrt(kPi), sh = std::sqrt(2.0 * kPi) * vq, k = std::sqrt(2.0 * kPi) * vp;
  Eigen::Matrix2cd out = Eigen::Matrix2cd::Zero();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      cd s = 0;
      for (long m = -S; m <= S; ++m)
        for (long n = -S; n <= S; ++n) {
          const double x = (2.0 * static_cast<double>(m) + i) * a + sh, y = (2.0 * static_cast<double>(n) + j) * a + sh;
          s += std::polar(rho(x, y), -k * (x - y));
        }
      out(i, j) = s;
    }
  return out;
}

inline std::array<double, 3> bloch_of(const Eigen::Matrix2cd& rho) {
  const double tr = (rho(0, 0) + rho(1, 1)).real();
  return {2.0 * rho(0, 1).real() / tr, -2.0 * rho(0, 1).imag() / tr, (rho(0, 0) - rho(1, 1)).real() / tr};
}

// Average gate fidelity between two single-qubit unitaries.
inline double unitary_average_fidelity(const Eigen::Matrix2cd& U, const Eigen::Matrix2cd& V) {
  return (std::norm((U.adjoint() * V).trace()) + 2.0) / 6.0;
}

}  // namespace oracle
