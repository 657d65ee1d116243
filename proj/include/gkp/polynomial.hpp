#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "gkp/rational.hpp"

namespace gkp {

// Univariate polynomial with exact coefficients, constant term at index 0.
class RationalPolynomial {
 public:
  RationalPolynomial() = default;
  explicit RationalPolynomial(std::vector<Rational> c) : c_(std::move(c)) { trim(); }

  static RationalPolynomial monomial(std::size_t degree, const Rational& coeff) {
    std::vector<Rational> c(degree + 1);
    c[degree] = coeff;
    return RationalPolynomial(std::move(c));
  }

  // Coefficients as "num/den" strings, index = degree.
  static RationalPolynomial from_strings(const std::vector<std::string>& s) {
    std::vector<Rational> c;
    c.reserve(s.size());
    for (const auto& t : s) c.push_back(Rational::parse(t));
    return RationalPolynomial(std::move(c));
  }

  bool is_zero() const { return c_.empty(); }
  // Degree of the zero polynomial is reported as 0.
  std::size_t degree() const { return c_.empty() ? 0 : c_.size() - 1; }
  const std::vector<Rational>& coefficients() const { return c_; }

  Rational coeff(std::size_t k) const { return k < c_.size() ? c_[k] : Rational(); }
  void set_coeff(std::size_t k, const Rational& v) {
    if (k >= c_.size()) c_.resize(k + 1);
    c_[k] = v;
    trim();
  }

  Rational operator()(const Rational& x) const {
    Rational r;
    for (std::size_t k = c_.size(); k-- > 0;) r = r * x + c_[k];
    return r;
  }

  double eval(double x) const {
    double r = 0.0;
    for (std::size_t k = c_.size(); k-- > 0;) r = r * x + c_[k].to_double();
    return r;
  }

  std::vector<double> to_doubles() const {
    std::vector<double> out;
    out.reserve(c_.size());
    for (const auto& a : c_) out.push_back(a.to_double());
    return out;
  }

  // P(-x)
  RationalPolynomial reflected() const {
    auto c = c_;
    for (std::size_t k = 1; k < c.size(); k += 2) c[k] = -c[k];
    return RationalPolynomial(std::move(c));
  }

  RationalPolynomial without_constant() const {
    auto c = c_;
    if (!c.empty()) c[0] = Rational();
    return RationalPolynomial(std::move(c));
  }

  RationalPolynomial& operator+=(const RationalPolynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
    trim();
    return *this;
  }
  RationalPolynomial& operator-=(const RationalPolynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
    trim();
    return *this;
  }
  RationalPolynomial& operator*=(const Rational& s) {
    for (auto& a : c_) a *= s;
    trim();
    return *this;
  }

  friend RationalPolynomial operator+(RationalPolynomial a, const RationalPolynomial& b) { return a += b; }
  friend RationalPolynomial operator-(RationalPolynomial a, const RationalPolynomial& b) { return a -= b; }
  friend RationalPolynomial operator*(RationalPolynomial a, const Rational& s) { return a *= s; }
  friend RationalPolynomial operator*(const Rational& s, RationalPolynomial a) { return a *= s; }
  friend RationalPolynomial operator*(const RationalPolynomial& a, const RationalPolynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Rational> c(a.c_.size() + b.c_.size() - 1);
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      if (a.c_[i].is_zero()) continue;
      for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    }
    return RationalPolynomial(std::move(c));
  }

  friend bool operator==(const RationalPolynomial& a, const RationalPolynomial& b) { return a.c_ == b.c_; }

  // Human form, highest degree first: "x^3/12 + x^2/8 - x/12".
  std::string str() const {
    if (c_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (std::size_t k = c_.size(); k-- > 0;) {
      const Rational& a = c_[k];
      if (a.is_zero()) continue;
      mpz_class num = a.numerator();
      const mpz_class den = a.denominator();
      if (first) {
        if (num < 0) os << "-";
      } else {
        os << (num < 0 ? " - " : " + ");
      }
      num = ::abs(num);
      first = false;
      std::string mono = k == 0 ? "" : (k == 1 ? "x" : "x^" + std::to_string(k));
      if (k == 0) {
        os << num.get_str();
      } else if (num == 1) {
        os << mono;
      } else {
        os << num.get_str() << mono;
      }
      if (den != 1) os << "/" << den.get_str();
    }
    return os.str();
  }

  std::vector<std::string> fraction_strings() const {
    std::vector<std::string> out;
    out.reserve(c_.size());
    for (const auto& a : c_) out.push_back(a.fraction_str());
    return out;
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
  }
  std::vector<Rational> c_;
};

// Sparse multivariate polynomial in a fixed number of variables.
class MultiRationalPolynomial {
 public:
  using Exponents = std::vector<unsigned>;

  explicit MultiRationalPolynomial(std::size_t nvars = 1) : n_(nvars) {
    if (nvars == 0) throw InvalidArgument("multivariate polynomial needs at least one variable");
  }

  std::size_t nvars() const { return n_; }
  const std::map<Exponents, Rational>& terms() const { return t_; }

  Rational coeff(const Exponents& e) const {
    auto it = t_.find(e);
    return it == t_.end() ? Rational() : it->second;
  }

  void add_term(const Exponents& e, const Rational& a) {
    if (e.size() != n_) throw InvalidArgument("exponent tuple has wrong arity");
    if (a.is_zero()) return;
    auto [it, fresh] = t_.emplace(e, a);
    if (!fresh) {
      it->second += a;
      if (it->second.is_zero()) t_.erase(it);
    }
  }

  unsigned total_degree() const {
    unsigned d = 0;
    for (const auto& [e, a] : t_) d = std::max(d, total(e));
    return d;
  }

  static unsigned total(const Exponents& e) {
    unsigned s = 0;
    for (unsigned x : e) s += x;
    return s;
  }

  MultiRationalPolynomial& operator+=(const MultiRationalPolynomial& o) {
    check_arity(o);
    for (const auto& [e, a] : o.t_) add_term(e, a);
    return *this;
  }
  MultiRationalPolynomial& operator-=(const MultiRationalPolynomial& o) {
    check_arity(o);
    for (const auto& [e, a] : o.t_) add_term(e, -a);
    return *this;
  }
  MultiRationalPolynomial& operator*=(const Rational& s) {
    if (s.is_zero()) {
      t_.clear();
      return *this;
    }
    for (auto& [e, a] : t_) a *= s;
    return *this;
  }

  friend MultiRationalPolynomial operator*(const MultiRationalPolynomial& a, const MultiRationalPolynomial& b) {
    a.check_arity(b);
    MultiRationalPolynomial r(a.n_);
    for (const auto& [ea, ca] : a.t_)
      for (const auto& [eb, cb] : b.t_) {
        Exponents e(a.n_);
        for (std::size_t i = 0; i < a.n_; ++i) e[i] = ea[i] + eb[i];
        r.add_term(e, ca * cb);
      }
    return r;
  }

  friend bool operator==(const MultiRationalPolynomial& a, const MultiRationalPolynomial& b) {
    return a.n_ == b.n_ && a.t_ == b.t_;
  }

  // Embed a univariate polynomial in variable `var`.
  static MultiRationalPolynomial from_univariate(const RationalPolynomial& p, std::size_t var, std::size_t nvars) {
    MultiRationalPolynomial r(nvars);
    if (var >= nvars) throw InvalidArgument("variable index out of range");
    for (std::size_t k = 0; k < p.coefficients().size(); ++k) {
      Exponents e(nvars, 0);
      e[var] = static_cast<unsigned>(k);
      r.add_term(e, p.coefficients()[k]);
    }
    return r;
  }

  Rational operator()(const std::vector<Rational>& x) const {
    if (x.size() != n_) throw InvalidArgument("point has wrong arity");
    Rational r;
    for (const auto& [e, a] : t_) {
      Rational m = a;
      for (std::size_t i = 0; i < n_; ++i)
        for (unsigned k = 0; k < e[i]; ++k) m *= x[i];
      r += m;
    }
    return r;
  }

  // Highest total degree first, then by exponent tuple descending.
  std::string str() const {
    if (t_.empty()) return "0";
    std::vector<std::pair<Exponents, Rational>> v(t_.begin(), t_.end());
    std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
      unsigned ta = total(a.first), tb = total(b.first);
      if (ta != tb) return ta > tb;
      return a.first > b.first;
    });
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, a] : v) {
      mpz_class num = a.numerator();
      if (first) {
        if (num < 0) os << "-";
      } else {
        os << (num < 0 ? " - " : " + ");
      }
      first = false;
      num = ::abs(num);
      std::string mono;
      for (std::size_t i = 0; i < n_; ++i) {
        if (e[i] == 0) continue;
        if (!mono.empty()) mono += "*";
        mono += "x" + std::to_string(i + 1);
        if (e[i] > 1) mono += "^" + std::to_string(e[i]);
      }
      if (mono.empty())
        os << num.get_str();
      else if (num == 1)
        os << mono;
      else
        os << num.get_str() << "*" << mono;
      if (a.denominator() != 1) os << "/" << a.denominator().get_str();
    }
    return os.str();
  }

 private:
  void check_arity(const MultiRationalPolynomial& o) const {
    if (o.n_ != n_) throw InvalidArgument("multivariate arity mismatch");
  }
  std::size_t n_;
  std::map<Exponents, Rational> t_;
};

}  // namespace gkp
