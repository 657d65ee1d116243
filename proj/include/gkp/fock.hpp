#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <shared_mutex>
#include <utility>

#include "gkp/error.hpp"
#include "gkp/polynomial.hpp"

namespace gkp::fock {

using cd = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using FockVector = CVec;
using FockOperator = CMat;

inline constexpr double kPi = std::numbers::pi;
inline const double kSqrt2Pi = std::sqrt(2.0 * std::numbers::pi);

struct TruncationPlan {
  std::size_t d_init = 256;
  std::size_t expand_factor = 3;

  std::size_t d_out() const { return expand_factor * d_init; }
  std::size_t d_temp(std::size_t d) const { return expand_factor * d; }
  void validate() const {
    if (d_init < 16) throw InvalidArgument("TruncationPlan: d_init must be >= 16");
    if (expand_factor < 2) throw InvalidArgument("TruncationPlan: expand_factor must be >= 2");
  }
};

struct GkpParams {
  double delta = 0.25;
  double lam = 1.0;

  double n_bar() const { return 1.0 / (2.0 * delta * delta) - 0.5; }
  double delta_db() const { return -10.0 * std::log10(delta * delta); }
  static GkpParams from_nbar(double n_bar, double lam) {
    if (!(n_bar > -0.5)) throw InvalidArgument("GkpParams: n_bar must exceed -1/2");
    return {1.0 / std::sqrt(2.0 * n_bar + 1.0), lam};
  }
  void validate() const {
    if (!(delta > 0 && delta < 1.5)) throw InvalidArgument("GkpParams: delta out of range");
    if (!(lam > 0) || !std::isfinite(lam)) throw InvalidArgument("GkpParams: lambda must be > 0");
  }
};

inline std::pair<CMat, CMat> quadratures(std::size_t d) {
  if (d < 2) throw InvalidArgument("quadratures: d must be >= 2");
  const auto n = static_cast<Eigen::Index>(d);
  CMat a = CMat::Zero(n, n);
  for (Eigen::Index k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  const CMat ad = a.adjoint();
  const double r = 1.0 / std::sqrt(2.0);
  return {r * (a + ad), cd(0, r) * (ad - a)};
}

inline CMat expm(const CMat& M) {
  if (M.rows() != M.cols()) throw InvalidArgument("expm: square matrix required");
  if (!M.allFinite()) throw NumericFailure("expm: non-finite generator");
  CMat E = M.exp();
  if (!E.allFinite()) throw NumericFailure("expm: non-finite result");
  return E;
}

// Builds the generator at d_temp(d) with `gen`, exponentiates, keeps rows x cols.
inline CMat expm_embedded(const std::function<CMat(std::size_t)>& gen, std::size_t d, const TruncationPlan& plan,
                          std::optional<std::size_t> rows = std::nullopt) {
  const std::size_t dt = plan.d_temp(d);
  const std::size_t r = rows.value_or(d);
  if (r > dt) throw InvalidArgument("expm_embedded: requested rows exceed d_temp");
  CMat G = gen(dt);
  if (static_cast<std::size_t>(G.rows()) != dt || G.rows() != G.cols())
    throw InvalidArgument("expm_embedded: generator has wrong shape");
  return expm(G).topLeftCorner(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(d));
}

// Eigen-decomposition of the truncated position operator at dimension `dim`.
// Eigenvalues are the Hermite roots; eigenvector entries follow the normalized
// Hermite-function recurrence, so only the first `rows` Fock rows are stored.
struct QuadratureBasis {
  std::size_t dim = 0;
  RVec x;  // eigenvalues, ascending
  RMat V;  // rows x dim, V(n, k) = <n|x_k>

  static QuadratureBasis build(std::size_t dim, std::size_t rows) {
    if (dim < 2 || rows == 0 || rows > dim) throw InvalidArgument("QuadratureBasis: bad dimensions");
    const auto N = static_cast<Eigen::Index>(dim);
    RVec diag = RVec::Zero(N), sub(N - 1);
    for (Eigen::Index k = 0; k < N - 1; ++k) sub(k) = std::sqrt(static_cast<double>(k + 1) / 2.0);
    Eigen::SelfAdjointEigenSolver<RMat> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericFailure("QuadratureBasis: tridiagonal eigensolver failed");

    QuadratureBasis b;
    b.dim = dim;
    b.x = es.eigenvalues();
    b.V.resize(static_cast<Eigen::Index>(rows), N);
    std::vector<double> h(dim);
    for (Eigen::Index k = 0; k < N; ++k) {
      const double xk = b.x(k);
      double prev = 0.0, cur = 1.0, sumsq = 1.0;
      h[0] = 1.0;
      for (std::size_t n = 0; n + 1 < dim; ++n) {
        const double next = (std::sqrt(2.0) * xk * cur - std::sqrt(static_cast<double>(n)) * prev) /
                            std::sqrt(static_cast<double>(n + 1));
        prev = cur;
        cur = next;
        h[n + 1] = cur;
        sumsq += cur * cur;
        if (std::abs(cur) > 1e120) {
          for (std::size_t m = 0; m <= n + 1; ++m) h[m] *= 1e-120;
          prev *= 1e-120;
          cur *= 1e-120;
          sumsq = sumsq * 1e-240;
        }
      }
      const double inv = 1.0 / std::sqrt(sumsq);
      for (Eigen::Index n = 0; n < static_cast<Eigen::Index>(rows); ++n) b.V(n, k) = h[n] * inv;
    }
    return b;
  }

  std::size_t rows() const { return static_cast<std::size_t>(V.rows()); }

  // f(q) psi for psi supported on the stored rows (shorter inputs are zero padded).
  CVec apply(const CVec& fvals, const CVec& psi) const {
    const auto r = V.rows();
    if (psi.size() > r) throw InvalidArgument("QuadratureBasis::apply: state longer than stored rows");
    CVec c = V.topRows(psi.size()).transpose() * psi;
    return V * fvals.cwiseProduct(c);
  }

  // Top-left block of f(q): V[:r] diag(f) V[:c]^T.
  CMat matrix(const CVec& fvals, std::size_t r, std::size_t c) const {
    if (r > rows() || c > rows()) throw InvalidArgument("QuadratureBasis::matrix: block exceeds stored rows");
    const auto R = static_cast<Eigen::Index>(r), C = static_cast<Eigen::Index>(c);
    return V.topRows(R) * fvals.asDiagonal() * V.topRows(C).transpose();
  }
};

// Process-wide memo of bases; concurrent readers, exclusive insertion.
inline std::shared_ptr<const QuadratureBasis> shared_basis(std::size_t dim, std::size_t rows) {
  static std::shared_mutex mu;
  static std::map<std::pair<std::size_t, std::size_t>, std::shared_ptr<const QuadratureBasis>> memo;
  const auto key = std::make_pair(dim, rows);
  {
    std::shared_lock lk(mu);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
  }
  auto b = std::make_shared<const QuadratureBasis>(QuadratureBasis::build(dim, rows));
  std::unique_lock lk(mu);
  return memo.emplace(key, b).first->second;
}

// diag(e^{i theta n}); rotation_phase(theta) q rotation_phase(theta)^dag = cos(theta) q + sin(theta) p.
inline CVec rotation_phase(double theta, std::size_t d) {
  CVec r(static_cast<Eigen::Index>(d));
  for (std::size_t n = 0; n < d; ++n) r(static_cast<Eigen::Index>(n)) = std::polar(1.0, theta * static_cast<double>(n));
  return r;
}

// diag(i^n), maps q to p by conjugation.
inline CVec quarter_turn(std::size_t d) {
  static const cd powers[4] = {cd(1, 0), cd(0, 1), cd(-1, 0), cd(0, -1)};
  CVec u(static_cast<Eigen::Index>(d));
  for (std::size_t n = 0; n < d; ++n) u(static_cast<Eigen::Index>(n)) = powers[n % 4];
  return u;
}

// W(v) = exp[i sqrt(2 pi)(v_p q - v_q p)], exponentiated at d_temp(d) and truncated to d x d.
inline CMat displacement(double vq, double vp, std::size_t d, const TruncationPlan& plan) {
  if (!std::isfinite(vq) || !std::isfinite(vp)) throw InvalidArgument("displacement: non-finite v");
  if (d < 2) throw InvalidArgument("displacement: d must be >= 2");
  const double r = std::hypot(vq, vp);
  const auto n = static_cast<Eigen::Index>(d);
  if (r == 0.0) return CMat::Identity(n, n);
  const double theta = std::atan2(-vq, vp);
  auto b = shared_basis(plan.d_temp(d), d);
  CVec f(b->x.size());
  for (Eigen::Index k = 0; k < f.size(); ++k) f(k) = std::polar(1.0, kSqrt2Pi * r * b->x(k));
  const CVec R = rotation_phase(theta, d);
  return R.asDiagonal() * b->matrix(f, d, d) * R.conjugate().asDiagonal();
}

struct CodewordDiagnostics {
  std::size_t terms = 0;
  std::size_t zeroed = 0;
  double zeroed_weight = 0.0;  // relative to the total analytic weight of all terms
  std::size_t lattice_cut = 0;
};

inline std::size_t default_lattice_cut(double delta) {
  return static_cast<std::size_t>(std::ceil(6.0 / std::sqrt(1.0 - std::exp(-2.0 * delta * delta))));
}

// Env_Delta sum_{m,n} phase W(v_mn)|vac>, rectangular lattice with aspect lambda.
// Each coherent term is summed in log space; non-finite terms are zeroed and counted.
inline FockVector gkp_codeword(int bit, const GkpParams& gp, std::size_t d, std::size_t lattice_cut = 0,
                               CodewordDiagnostics* diag = nullptr) {
  if (bit != 0 && bit != 1) throw InvalidArgument("gkp_codeword: bit must be 0 or 1");
  gp.validate();
  if (d < 16) throw InvalidArgument("gkp_codeword: d must be >= 16");
  const long cut = static_cast<long>(lattice_cut ? lattice_cut : default_lattice_cut(gp.delta));
  const double shrink = std::exp(-gp.delta * gp.delta);
  const double damp = 1.0 - shrink * shrink;
  const auto D = static_cast<Eigen::Index>(d);
  std::vector<double> half_lfact(d);
  for (std::size_t k = 0; k < d; ++k) half_lfact[k] = 0.5 * std::lgamma(static_cast<double>(k) + 1.0);
  static const cd ipow[4] = {cd(1, 0), cd(0, 1), cd(-1, 0), cd(0, -1)};

  CVec amp = CVec::Zero(D);
  CodewordDiagnostics dg;
  dg.lattice_cut = static_cast<std::size_t>(cut);
  double total_weight = 0.0;
  for (long m = -cut; m <= cut; ++m) {
    for (long n = -cut; n <= cut; ++n) {
      double vq;
      cd ph;
      if (bit == 0) {
        vq = static_cast<double>(m) * std::sqrt(2.0 * gp.lam);
        ph = ((m * n) % 2 == 0) ? cd(1, 0) : cd(-1, 0);
      } else {
        vq = static_cast<double>(2 * m + 1) * std::sqrt(gp.lam / 2.0);
        ph = ipow[(((2 * m * n - n) % 4) + 4) % 4];
      }
      const double vp = static_cast<double>(n) / std::sqrt(2.0 * gp.lam);
      const double v2 = vq * vq + vp * vp;
      const double weight = std::exp(-kPi * v2 * damp);
      total_weight += weight;
      ++dg.terms;
      const cd alpha = std::sqrt(kPi) * cd(vq, vp) * shrink;
      const double base = -kPi * v2 / 2.0;
      CVec term(D);
      bool finite = true;
      if (std::abs(alpha) == 0.0) {
        term.setZero();
        term(0) = std::exp(base);
      } else {
        const double la = std::log(std::abs(alpha)), arg = std::arg(alpha);
        for (Eigen::Index k = 0; k < D; ++k) {
          const double kk = static_cast<double>(k);
          term(k) = std::polar(std::exp(base + kk * la - half_lfact[static_cast<std::size_t>(k)]), kk * arg);
        }
        finite = term.allFinite();
      }
      if (!finite) {
        ++dg.zeroed;
        dg.zeroed_weight += weight;
        continue;
      }
      amp += ph * term;
    }
  }
  dg.zeroed_weight /= total_weight;
  if (diag) *diag = dg;
  if (dg.zeroed_weight > 1e-6) throw TruncationLeakage("gkp_codeword: zeroed coherent terms carry too much weight", dg.zeroed_weight);
  return amp;
}

// Symmetric orthonormalization of a codeword pair through the sum/difference states.
inline std::pair<FockVector, FockVector> orthonormalize(const FockVector& psi0, const FockVector& psi1) {
  if (psi0.size() != psi1.size()) throw InvalidArgument("orthonormalize: dimension mismatch");
  const double n0 = psi0.norm(), n1 = psi1.norm();
  if (!(n0 > 0) || !(n1 > 0)) throw InvalidArgument("orthonormalize: zero input");
  const CVec a = psi0 / n0, b = psi1 / n1;
  const cd ov = a.dot(b);
  const double theta = std::arg(ov);
  const cd ph = std::polar(1.0, -theta);
  CVec plus = a + ph * b, minus = a - ph * b;
  const double np = plus.norm(), nm = minus.norm();
  if (nm < 1e-10 || np < 1e-10) throw DegeneratePair("orthonormalize: inputs are parallel");
  plus /= np;
  minus /= nm;
  const double r = 1.0 / std::sqrt(2.0);
  return {r * (plus + minus), std::polar(r, theta) * (plus - minus)};
}

inline std::pair<FockVector, FockVector> logical_basis(const GkpParams& gp, std::size_t d, std::size_t lattice_cut = 0) {
  return orthonormalize(gkp_codeword(0, gp, d, lattice_cut), gkp_codeword(1, gp, d, lattice_cut));
}

// exp(2 pi i P(q / sqrt(lambda pi))) as an isometry from d_init into d_out.
// The phase is a function of q, so it is applied exactly in the eigenbasis of
// the truncated q at d_out; columns are orthonormal by construction.
class PhaseGate {
 public:
  PhaseGate(const RationalPolynomial& P, double lam, const TruncationPlan& plan) : plan_(plan) {
    plan.validate();
    if (!(lam > 0)) throw InvalidArgument("PhaseGate: lambda must be > 0");
    basis_ = shared_basis(plan.d_out(), plan.d_out());
    const double s = 1.0 / std::sqrt(lam * kPi);
    phases_.resize(basis_->x.size());
    for (Eigen::Index k = 0; k < phases_.size(); ++k) {
      const double arg = 2.0 * kPi * P.eval(basis_->x(k) * s);
      phases_(k) = std::polar(1.0, std::fmod(arg, 2.0 * kPi));
    }
  }
  CVec apply(const CVec& psi) const {
    if (static_cast<std::size_t>(psi.size()) != plan_.d_init) throw InvalidArgument("PhaseGate::apply: expects a d_init state");
    return basis_->apply(phases_, psi);
  }
  CMat matrix() const { return basis_->matrix(phases_, plan_.d_out(), plan_.d_init); }
  const TruncationPlan& plan() const { return plan_; }

 private:
  TruncationPlan plan_;
  std::shared_ptr<const QuadratureBasis> basis_;
  CVec phases_;
};

inline CMat poly_phase_gate(const RationalPolynomial& P, double lam, const TruncationPlan& plan) {
  return PhaseGate(P, lam, plan).matrix();
}

enum class Pauli { X, Y, Z };

inline Pauli parse_pauli(char c) {
  switch (c) {
    case 'X': case 'x': return Pauli::X;
    case 'Y': case 'y': return Pauli::Y;
    case 'Z': case 'z': return Pauli::Z;
    default: throw InvalidArgument(std::string("unknown Pauli '") + c + "'");
  }
}

// Smear covariance in the (q, p) displacement frame; nullopt means ideal readout.
using Smear = std::optional<Eigen::Matrix2d>;

struct PauliSpec {
  double lam = 1.0;
  Smear smear;
  std::size_t n_cut = 59;
};

// Coefficient of the (2n+1) term, including the smear factor exp(-pi v^T Omega^T Sigma Omega v).
inline double pauli_coefficient(long odd, double smear_factor_per_unit) {
  const double np = (static_cast<double>(odd) - 1.0) / 2.0;  // n with odd = 2n+1
  const double sgn = (static_cast<long>(std::llround(np)) % 2 == 0) ? 1.0 : -1.0;
  return sgn / (kPi * (np + 0.5)) * std::exp(-kPi * smear_factor_per_unit * static_cast<double>(odd * odd));
}

// Pauli readout operators as functions of q (Z) and of p (X) on the d_temp eigenbasis.
class PauliReadout {
 public:
  PauliReadout(const PauliSpec& spec, std::size_t d, std::size_t expand_factor = 3) : spec_(spec), d_(d) {
    if (spec.n_cut % 2 == 0) throw InvalidArgument("pauli readout: n_cut must be odd");
    if (!(spec.lam > 0)) throw InvalidArgument("pauli readout: lambda must be > 0");
    if (spec.smear) {
      const Eigen::Matrix2d& S = *spec.smear;
      if (std::abs(S(0, 1) - S(1, 0)) > 1e-14) throw InvalidArgument("pauli readout: smear must be symmetric");
    }
    basis_ = shared_basis(expand_factor * d, d);
    const double kz = std::sqrt(2.0 * kPi) / std::sqrt(2.0 * spec.lam);
    const double kx = -std::sqrt(2.0 * kPi) * std::sqrt(spec.lam / 2.0);
    // Z terms: v = (0, odd/sqrt(2 lam)); X terms: v = (odd sqrt(lam/2), 0).
    const double sz = spec.smear ? (*spec.smear)(0, 0) / (2.0 * spec.lam) : 0.0;
    const double sx = spec.smear ? (*spec.smear)(1, 1) * spec.lam / 2.0 : 0.0;
    const auto K = basis_->x.size();
    gz_ = CVec::Zero(K);
    gx_ = CVec::Zero(K);
    const long nc = static_cast<long>(spec.n_cut);
    for (long odd = -nc; odd <= nc; odd += 2) {
      const double cz = pauli_coefficient(odd, sz), cx = pauli_coefficient(odd, sx);
      for (Eigen::Index k = 0; k < K; ++k) {
        const double xk = basis_->x(k);
        gz_(k) += cz * std::cos(kz * odd * xk);
        gx_(k) += cx * std::cos(kx * odd * xk);
      }
    }
    u_ = quarter_turn(d);
  }

  std::size_t dim() const { return d_; }
  const PauliSpec& spec() const { return spec_; }

  CVec apply_z(const CVec& psi) const { return basis_->apply(gz_, pad(psi)); }
  CVec apply_x(const CVec& psi) const {
    const CVec t = u_.conjugate().cwiseProduct(pad(psi));
    return u_.cwiseProduct(basis_->apply(gx_, t));
  }

  // (<psi|psi>, <X>, <Y>, <Z>), unnormalized.
  std::array<double, 4> expectations(const CVec& psi_in) const {
    if (spec_.smear && std::abs((*spec_.smear)(0, 1)) > 0)
      throw InvalidArgument("pauli readout: Y needs a diagonal smear covariance");
    const CVec psi = pad(psi_in);
    const CVec zp = apply_z(psi), xp = apply_x(psi);
    return {psi.squaredNorm(), psi.dot(xp).real(), -xp.dot(zp).imag(), psi.dot(zp).real()};
  }

  CMat matrix(Pauli which) const {
    const CMat Z = basis_->matrix(gz_, d_, d_);
    CMat X = u_.asDiagonal() * basis_->matrix(gx_, d_, d_) * u_.conjugate().asDiagonal();
    switch (which) {
      case Pauli::Z: return Z;
      case Pauli::X: return X;
      case Pauli::Y: {
        if (spec_.smear && std::abs((*spec_.smear)(0, 1)) > 0)
          throw InvalidArgument("pauli readout: Y needs a diagonal smear covariance");
        CMat XZ = X * Z;
        return cd(0, 0.5) * (XZ - XZ.adjoint());
      }
    }
    throw InvalidArgument("unknown Pauli");
  }

 private:
  CVec pad(const CVec& psi) const {
    if (static_cast<std::size_t>(psi.size()) == d_) return psi;
    if (static_cast<std::size_t>(psi.size()) > d_) throw InvalidArgument("pauli readout: state longer than d");
    CVec out = CVec::Zero(static_cast<Eigen::Index>(d_));
    out.head(psi.size()) = psi;
    return out;
  }

  PauliSpec spec_;
  std::size_t d_;
  std::shared_ptr<const QuadratureBasis> basis_;
  CVec gz_, gx_, u_;
};

inline CMat pauli_measurement_operator(Pauli which, double lam, const Smear& smear, std::size_t d, std::size_t n_cut = 59,
                                       std::size_t expand_factor = 3) {
  return PauliReadout({lam, smear, n_cut}, d, expand_factor).matrix(which);
}

// Max change of (<X>,<Y>,<Z>)/norm when the odd cutoff goes from n_cut to 2 n_cut + 1.
inline double pauli_cutoff_change(const PauliSpec& spec, std::size_t d, const CVec& psi, std::size_t expand_factor = 3) {
  PauliSpec wide = spec;
  wide.n_cut = 2 * spec.n_cut + 1;
  const auto a = PauliReadout(spec, d, expand_factor).expectations(psi);
  const auto b = PauliReadout(wide, d, expand_factor).expectations(psi);
  double m = 0.0;
  for (int i = 1; i < 4; ++i) m = std::max(m, std::abs(a[i] - b[i]) / a[0]);
  return m;
}

}  // namespace gkp::fock
