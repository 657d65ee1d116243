#pragma once

#include <algorithm>
#include <cstddef>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "gkp/polynomial.hpp"

namespace gkp {

// L_n(x) = (1/n!) prod_{i=1..n} (x + i - s), s = n/2 (n even) or (n+1)/2 (n odd).
inline RationalPolynomial basis_polynomial(long n) {
  if (n < 1) throw InvalidArgument("basis_polynomial: n must be >= 1, got " + std::to_string(n));
  static std::mutex mu;
  static std::vector<RationalPolynomial> memo;
  {
    std::lock_guard<std::mutex> lk(mu);
    if (static_cast<std::size_t>(n) < memo.size() && !memo[n].is_zero()) return memo[n];
  }
  const long s = (n % 2 == 0) ? n / 2 : (n + 1) / 2;
  RationalPolynomial p(std::vector<Rational>{Rational(1)});
  for (long i = 1; i <= n; ++i) p = p * RationalPolynomial(std::vector<Rational>{Rational(i - s), Rational(1)});
  p *= Rational(mpz_class(1), factorial(static_cast<unsigned long>(n)));
  std::lock_guard<std::mutex> lk(mu);
  if (memo.size() <= static_cast<std::size_t>(n)) memo.resize(n + 1);
  memo[n] = p;
  return p;
}

// Integer coefficients of P in the basis {1, L_1, L_2, ...}; nullopt if any is non-integral.
inline std::optional<std::vector<mpz_class>> integer_basis_expansion(const RationalPolynomial& P) {
  RationalPolynomial r = P;
  std::vector<mpz_class> out(P.degree() + 1);
  for (std::size_t j = P.degree(); j >= 1; --j) {
    Rational c = r.coeff(j) * Rational(factorial(j));
    if (!c.is_integer()) return std::nullopt;
    out[j] = c.numerator();
    if (!c.is_zero()) r -= basis_polynomial(static_cast<long>(j)) * c;
  }
  if (!r.coeff(0).is_integer()) return std::nullopt;
  out[0] = r.coeff(0).numerator();
  return out;
}

inline bool is_integer_valued(const RationalPolynomial& P) { return integer_basis_expansion(P).has_value(); }

inline RationalPolynomial starting_representation(long m) {
  if (m < 1) throw InvalidArgument("starting_representation: level must be >= 1");
  return RationalPolynomial::monomial(std::size_t{1} << (m - 1), Rational(mpz_class(1), pow2(m)));
}

// P(k) mod 1 is 0 for even k and 2^-m for odd k, |k| <= range.
inline bool verify_gate(const RationalPolynomial& P, long m, long range = 50) {
  if (m < 0) throw InvalidArgument("verify_gate: level must be >= 0");
  const Rational odd_phase = Rational(mpz_class(1), pow2(m)).frac();
  for (long k = -range; k <= range; ++k) {
    Rational v = P(Rational(k)).frac();
    if (v != ((k % 2 == 0) ? Rational() : odd_phase)) return false;
  }
  return true;
}

inline RationalPolynomial lift_representation(const RationalPolynomial& F, long m) {
  if (m < 1) throw InvalidArgument("lift_representation: level must be >= 1");
  if (!verify_gate(F, m)) throw PreconditionViolation("lift_representation: input does not implement level " + std::to_string(m));
  return (F * F) * Rational(pow2(m - 1));
}

enum class LexOrder { less, greater, equal, incomparable };

inline const char* to_string(LexOrder o) {
  switch (o) {
    case LexOrder::less: return "less";
    case LexOrder::greater: return "greater";
    case LexOrder::equal: return "equal";
    default: return "incomparable";
  }
}

// Magnitudes of non-constant coefficients, compared from the top degree down.
// The constant term is a global phase and is ignored.
inline LexOrder lex_compare(const RationalPolynomial& P, const RationalPolynomial& Q) {
  const std::size_t top = std::max(P.degree(), Q.degree());
  for (std::size_t k = top; k >= 1; --k) {
    auto c = P.coeff(k).abs() <=> Q.coeff(k).abs();
    if (c < 0) return LexOrder::less;
    if (c > 0) return LexOrder::greater;
  }
  return LexOrder::equal;
}

struct BranchLogEntry {
  std::size_t branch;
  std::size_t degree;
  mpz_class multiplier;
  bool boundary;
};

struct ReductionOutcome {
  std::vector<RationalPolynomial> minima;
  std::vector<std::size_t> minima_branches;
  std::vector<BranchLogEntry> branch_log;
  bool tied = false;   // more than one minimum with the same magnitude profile
  bool capped = false; // branch cap was hit (never observed in practice)
};

// Greedy coefficient reduction, highest degree first. At an exact half-way
// remainder both multipliers are followed; branches whose remainder at the
// current degree is larger in magnitude than the best are dropped, which is
// exactly the lexicographic comparison restricted to the degrees seen so far.
inline ReductionOutcome reduce(const RationalPolynomial& P) {
  struct Branch {
    RationalPolynomial poly;
    std::size_t id;
  };
  ReductionOutcome out;
  const std::size_t deg = P.degree();
  const std::size_t cap = deg >= 20 ? (std::size_t{1} << 20) : (std::size_t{1} << deg);
  std::vector<Branch> live{{P.without_constant(), 0}};
  std::size_t next_id = 1;
  const Rational half(1, 2);

  for (std::size_t j = deg; j >= 1; --j) {
    const Rational jf(factorial(j));
    const RationalPolynomial& Lj = basis_polynomial(static_cast<long>(j));
    std::vector<Branch> grown;
    for (auto& b : live) {
      const Rational q = b.poly.coeff(j) * jf;
      const mpz_class fl = q.floor();
      const Rational fr = q - Rational(fl);
      std::vector<mpz_class> ns;
      bool boundary = false;
      if (fr == half) {
        ns = {fl, fl + 1};
        boundary = true;
      } else if (fr < half) {
        ns = {fl};
      } else {
        ns = {fl + 1};
      }
      for (std::size_t t = 0; t < ns.size(); ++t) {
        std::size_t id = (t == 0) ? b.id : next_id++;
        RationalPolynomial np = b.poly;
        if (ns[t] != 0) np -= Lj * Rational(ns[t]);
        out.branch_log.push_back({id, j, ns[t], boundary});
        grown.push_back({std::move(np), id});
      }
    }
    Rational best = grown.front().poly.coeff(j).abs();
    for (const auto& g : grown) best = std::min(best, g.poly.coeff(j).abs());
    live.clear();
    for (auto& g : grown) {
      if (g.poly.coeff(j).abs() != best) continue;
      bool dup = std::any_of(live.begin(), live.end(), [&](const Branch& x) { return x.poly == g.poly; });
      if (!dup) live.push_back(std::move(g));
    }
    if (live.size() > cap) {
      live.resize(cap);
      out.capped = true;
    }
  }
  for (auto& b : live) {
    out.minima.push_back(b.poly.without_constant());
    out.minima_branches.push_back(b.id);
  }
  out.tied = out.minima.size() > 1;
  return out;
}

// Every coefficient obeys |a_k| <= 1/(2 k!).
inline bool within_coefficient_bounds(const RationalPolynomial& P) {
  for (std::size_t k = 1; k <= P.degree(); ++k)
    if (P.coeff(k).abs() > Rational(mpz_class(1), 2 * factorial(k))) return false;
  return true;
}

// ---- multivariate ----

inline MultiRationalPolynomial control_gate_start(long N, long m) {
  if (N < 1) throw InvalidArgument("control_gate_start: need N >= 1");
  if (m < 1) throw InvalidArgument("control_gate_start: need m >= 1");
  MultiRationalPolynomial p(static_cast<std::size_t>(N));
  p.add_term(MultiRationalPolynomial::Exponents(N, 1u << (m - 1)), Rational(mpz_class(1), pow2(m)));
  return p;
}

inline MultiRationalPolynomial product_basis(const MultiRationalPolynomial::Exponents& d) {
  const std::size_t n = d.size();
  MultiRationalPolynomial r(n);
  r.add_term(MultiRationalPolynomial::Exponents(n, 0), Rational(1));
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i] == 0) continue;
    r = r * MultiRationalPolynomial::from_univariate(basis_polynomial(d[i]), i, n);
  }
  return r;
}

enum class TieRule {
  toward_zero,         // keep the remainder as is (do not subtract on a half-way tie)
  nonnegative_leading  // pick the multiplier that leaves a nonnegative coefficient
};

struct MultiTie {
  MultiRationalPolynomial::Exponents monomial;
  mpz_class chosen;
  mpz_class alternative;
};

struct MultiReductionOutcome {
  MultiRationalPolynomial poly;
  std::vector<MultiTie> ties;
  TieRule rule;
};

inline MultiReductionOutcome multivariate_reduce(const MultiRationalPolynomial& P,
                                                 TieRule rule = TieRule::toward_zero) {
  MultiReductionOutcome out{P, {}, rule};
  MultiRationalPolynomial& r = out.poly;
  const Rational half(1, 2);
  for (unsigned D = r.total_degree(); D >= 1; --D) {
    std::vector<MultiRationalPolynomial::Exponents> level;
    for (const auto& [e, a] : r.terms())
      if (MultiRationalPolynomial::total(e) == D) level.push_back(e);
    for (const auto& e : level) {
      mpz_class scale = 1;
      for (unsigned x : e) scale *= factorial(x);
      const Rational q = r.coeff(e) * Rational(scale);
      const mpz_class fl = q.floor();
      const Rational fr = q - Rational(fl);
      mpz_class n;
      if (fr == half) {
        // remainder is +1/(2 prod d!) with fl, -1/(2 prod d!) with fl+1
        mpz_class toward_zero = q.sign() >= 0 ? fl : fl + 1;
        mpz_class nonneg = fl;
        n = (rule == TieRule::toward_zero) ? toward_zero : nonneg;
        mpz_class alt = (n == fl) ? mpz_class(fl + 1) : fl;
        out.ties.push_back({e, n, alt});
      } else {
        n = fr < half ? fl : mpz_class(fl + 1);
      }
      if (n != 0) {
        auto b = product_basis(e);
        b *= Rational(n);
        r -= b;
      }
    }
  }
  // constant term is a global phase
  r.add_term(MultiRationalPolynomial::Exponents(r.nvars(), 0), -r.coeff(MultiRationalPolynomial::Exponents(r.nvars(), 0)));
  return out;
}

// Controlled-...-Lambda_m on N qubits: phase 2^-m exactly when all arguments are odd.
inline bool verify_control_gate(const MultiRationalPolynomial& P, long m, long range = 6) {
  const std::size_t n = P.nvars();
  const Rational odd_phase = Rational(mpz_class(1), pow2(m)).frac();
  std::vector<long> k(n, -range);
  while (true) {
    std::vector<Rational> x;
    bool all_odd = true;
    for (long v : k) {
      x.emplace_back(v);
      all_odd = all_odd && (v % 2 != 0);
    }
    if (P(x).frac() != (all_odd ? odd_phase : Rational())) return false;
    std::size_t i = 0;
    while (i < n && ++k[i] > range) k[i++] = -range;
    if (i == n) break;
  }
  return true;
}

// ---- the simulation gate table ----

struct GateSpec {
  std::string name;
  RationalPolynomial poly;
  long level;          // Lambda_level implemented by poly; 0 for the identity
  long target_level;   // level of the target unitary diag(1, e^{2 pi i / 2^level})
};

inline RationalPolynomial poly_from(std::initializer_list<std::pair<long, long>> c) {
  std::vector<Rational> v;
  for (auto [n, d] : c) v.emplace_back(n, d);
  return RationalPolynomial(std::move(v));
}

inline std::vector<GateSpec> gate_table() {
  return {
      {"T3", poly_from({{0, 1}, {-1, 12}, {1, 8}, {1, 12}}), 3, 3},
      {"TGKP", poly_from({{0, 1}, {-1, 4}, {1, 8}, {1, 4}}), 3, 3},
      {"T4", poly_from({{0, 1}, {0, 1}, {1, 6}, {0, 1}, {-1, 24}}), 3, 3},
      {"sqrtT", poly_from({{0, 1}, {0, 1}, {1, 12}, {0, 1}, {-1, 48}}), 4, 4},
      {"T4th", poly_from({{0, 1}, {1, 60}, {1, 24}, {-1, 48}, {-1, 96}, {1, 240}}), 5, 5},
      {"T4th-mirror", poly_from({{0, 1}, {-1, 60}, {1, 24}, {1, 48}, {-1, 96}, {-1, 240}}), 5, 5},
      {"T8th", poly_from({{0, 1}, {0, 1}, {17, 720}, {0, 1}, {-5, 576}, {0, 1}, {1, 1440}}), 6, 6},
      {"I", RationalPolynomial(), 0, 0},
  };
}

inline GateSpec gate_by_name(const std::string& name) {
  for (auto& g : gate_table())
    if (g.name == name) return g;
  throw InvalidArgument("unknown gate '" + name + "'");
}

}  // namespace gkp
