#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "gkp/polyalg.hpp"

namespace {

using namespace gkp;

RationalPolynomial P(std::initializer_list<std::pair<long, long>> c) { return poly_from(c); }

std::vector<Rational> profile(const RationalPolynomial& p, std::size_t top) {
  std::vector<Rational> v;
  for (std::size_t k = top; k >= 1; --k) v.push_back(p.coeff(k).abs());
  return v;
}

// Every representative start - sum n_j L_j with multipliers in a box; keeps the
// lexicographically smallest magnitude profiles.
std::set<std::vector<std::string>> brute_force_minima(const RationalPolynomial& start, long box) {
  const std::size_t deg = start.degree();
  std::vector<long> n(deg, -box);
  std::vector<Rational> best;
  std::set<std::vector<std::string>> out;
  while (true) {
    RationalPolynomial q = start;
    for (std::size_t j = 0; j < deg; ++j)
      if (n[j] != 0) q -= basis_polynomial(static_cast<long>(j + 1)) * Rational(n[j]);
    q = q.without_constant();
    const auto pr = profile(q, deg);
    if (best.empty() || pr < best) {
      best = pr;
      out.clear();
    }
    if (pr == best) out.insert(q.fraction_strings());
    std::size_t i = 0;
    while (i < deg && ++n[i] > box) n[i++] = -box;
    if (i == deg) break;
  }
  return out;
}

TEST(Rational, ParsesAndNormalizes) {
  EXPECT_EQ(Rational::parse("6/8").fraction_str(), "3/4");
  EXPECT_EQ(Rational::parse("-2").fraction_str(), "-2/1");
  EXPECT_EQ(Rational(-7, 2).floor(), mpz_class(-4));
  EXPECT_EQ(Rational(-7, 2).frac(), Rational(1, 2));
}

TEST(BasisPolynomial, IntegerValuedOnIntegers) {
  for (long n = 1; n <= 12; ++n) {
    const auto L = basis_polynomial(n);
    EXPECT_EQ(L.degree(), static_cast<std::size_t>(n));
    for (long k = -100; k <= 100; ++k) ASSERT_TRUE(L(Rational(k)).is_integer()) << "n=" << n << " k=" << k;
  }
}

TEST(BasisPolynomial, FallingFactorialValues) {
  // L_n(k) = C(k + n - s, n) with the centering shift s = ceil(n / 2)
  for (long n = 1; n <= 8; ++n)
    for (long k = (n + 1) / 2; k <= 20; ++k) {
      mpz_class c;
      mpz_bin_uiui(c.get_mpz_t(), static_cast<unsigned long>(k + n - (n + 1) / 2), static_cast<unsigned long>(n));
      EXPECT_EQ(basis_polynomial(n)(Rational(k)), Rational(c));
    }
}

TEST(IntegerValued, DetectsNonIntegerValued) {
  EXPECT_TRUE(is_integer_valued(P({{0, 1}, {-1, 2}, {1, 2}})));  // x(x-1)/2
  EXPECT_FALSE(is_integer_valued(P({{0, 1}, {1, 2}})));
  EXPECT_TRUE(is_integer_valued(P({{0, 1}, {1, 1}, {0, 1}, {-1, 1}})));
}

TEST(StartingRepresentation, PowersOfX) {
  EXPECT_EQ(starting_representation(1), P({{0, 1}, {1, 2}}));
  EXPECT_EQ(starting_representation(3), RationalPolynomial::monomial(4, Rational(1, 8)));
  EXPECT_THROW(starting_representation(0), InvalidArgument);
  EXPECT_THROW(basis_polynomial(0), InvalidArgument);
}

TEST(VerifyGate, TableEntriesImplementTheirLevel) {
  for (const auto& g : gate_table()) {
    if (g.level == 0) continue;
    EXPECT_TRUE(verify_gate(g.poly, g.level)) << g.name;
    EXPECT_FALSE(verify_gate(g.poly, g.level + 1)) << g.name;
  }
  EXPECT_TRUE(verify_gate(RationalPolynomial(), 0));
}

TEST(Lift, SquaresAndRescales) {
  EXPECT_EQ(lift_representation(P({{0, 1}, {0, 1}, {1, 4}}), 2), RationalPolynomial::monomial(4, Rational(1, 8)));
  EXPECT_THROW(lift_representation(P({{0, 1}, {1, 3}}), 2), PreconditionViolation);
  for (long m = 1; m <= 5; ++m) EXPECT_TRUE(verify_gate(lift_representation(starting_representation(m), m), m + 1));
}

TEST(LexCompare, Examples) {
  const auto t3 = gate_by_name("T3").poly, tgkp = gate_by_name("TGKP").poly;
  EXPECT_EQ(lex_compare(t3, tgkp), LexOrder::less);
  EXPECT_EQ(lex_compare(tgkp, t3), LexOrder::greater);
  EXPECT_EQ(lex_compare(t3, t3), LexOrder::equal);
  EXPECT_EQ(lex_compare(P({{0, 1}, {1, 12}, {1, 8}, {-1, 12}}), t3), LexOrder::equal);
}

TEST(Reduce, LevelOneHasTwoTiedMinima) {
  const auto r = reduce(starting_representation(1));
  ASSERT_EQ(r.minima.size(), 2u);
  EXPECT_TRUE(r.tied);
  std::set<std::vector<std::string>> got;
  for (const auto& m : r.minima) got.insert(m.fraction_strings());
  EXPECT_EQ(got, (std::set<std::vector<std::string>>{{"0/1", "1/2"}, {"0/1", "-1/2"}}));
}

TEST(Reduce, MatchesBruteForceAtLevelThree) {
  const auto start = starting_representation(3);
  const auto want = brute_force_minima(start, 8);
  std::set<std::vector<std::string>> got;
  for (const auto& m : reduce(start).minima) got.insert(m.fraction_strings());
  EXPECT_EQ(got, want);
  EXPECT_TRUE(got.count(gate_by_name("T3").poly.fraction_strings()));
}

TEST(Reduce, TgkpReducesToT3) {
  const auto r = reduce(gate_by_name("TGKP").poly);
  const auto t3 = gate_by_name("T3").poly;
  EXPECT_TRUE(std::any_of(r.minima.begin(), r.minima.end(), [&](const auto& m) { return m == t3; }));
}

TEST(Reduce, DegreeTheoremAndCoefficientBounds) {
  for (long m = 1; m <= 7; ++m) {
    const auto start = starting_representation(m);
    const auto r = reduce(start);
    ASSERT_FALSE(r.minima.empty());
    for (const auto& q : r.minima) {
      EXPECT_EQ(q.degree(), static_cast<std::size_t>(m)) << "m=" << m;
      EXPECT_TRUE(within_coefficient_bounds(q)) << q.str();
      EXPECT_EQ(q.coeff(static_cast<std::size_t>(m)).abs(), Rational(mpz_class(1), 2 * factorial(static_cast<unsigned long>(m))));
      EXPECT_TRUE(is_integer_valued(start - q)) << q.str();
      EXPECT_TRUE(verify_gate(q, m));
    }
  }
}

TEST(Reduce, TableEntriesAreFixedPoints) {
  for (const auto& g : gate_table()) {
    if (g.name == "TGKP" || g.name == "T4" || g.level == 0) continue;
    const auto r = reduce(g.poly);
    EXPECT_TRUE(std::any_of(r.minima.begin(), r.minima.end(), [&](const auto& m) { return lex_compare(m, g.poly) == LexOrder::equal; }))
        << g.name;
  }
}

TEST(Reduce, FourthRootMirrorPairBothMinimal) {
  const auto a = gate_by_name("T4th").poly, b = gate_by_name("T4th-mirror").poly;
  EXPECT_EQ(lex_compare(a, b), LexOrder::equal);
  EXPECT_TRUE(verify_gate(b, 5));
  EXPECT_TRUE(is_integer_valued(a - b));
}

TEST(Reduce, T4IsTwiceSqrtT) {
  EXPECT_EQ(gate_by_name("T4").poly, gate_by_name("sqrtT").poly * Rational(2));
}

TEST(Multivariate, ControlGateStart) {
  const auto cs = control_gate_start(2, 2);
  EXPECT_EQ(cs.coeff({2, 2}), Rational(1, 4));
  EXPECT_EQ(control_gate_start(3, 1).coeff({1, 1, 1}), Rational(1, 2));
  EXPECT_EQ(control_gate_start(1, 3).coeff({4}), Rational(1, 8));
  EXPECT_THROW(control_gate_start(0, 1), InvalidArgument);
}

TEST(Multivariate, ControlledSReduction) {
  const auto r = multivariate_reduce(control_gate_start(2, 2));
  MultiRationalPolynomial want(2);
  want.add_term({2, 1}, Rational(-1, 4));
  want.add_term({1, 2}, Rational(-1, 4));
  want.add_term({1, 1}, Rational(-1, 4));
  EXPECT_EQ(r.poly.str(), want.str());
  EXPECT_TRUE(verify_control_gate(r.poly, 2));
}

TEST(Multivariate, CczAndCzAlreadyMinimal) {
  const auto ccz = control_gate_start(3, 1);
  EXPECT_EQ(multivariate_reduce(ccz).poly.str(), ccz.str());
  const auto cz = control_gate_start(2, 1);
  EXPECT_EQ(multivariate_reduce(cz).poly.str(), cz.str());
  EXPECT_TRUE(verify_control_gate(ccz, 1));
}

TEST(Multivariate, NonnegativeLeadingRuleGivesTheOtherVariant) {
  const auto r = multivariate_reduce(control_gate_start(2, 2), TieRule::nonnegative_leading);
  EXPECT_EQ(r.poly.coeff({2, 1}), Rational(1, 4));
  EXPECT_EQ(r.poly.coeff({1, 2}), Rational(1, 4));
  EXPECT_EQ(r.ties.size(), 2u);
  EXPECT_TRUE(verify_control_gate(r.poly, 2));
}

TEST(Multivariate, TiesAreRecorded) {
  const auto r = multivariate_reduce(control_gate_start(1, 1));
  EXPECT_FALSE(r.ties.empty());
  EXPECT_EQ(r.rule, TieRule::toward_zero);
}

}  // namespace
