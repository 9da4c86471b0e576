#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "entrans/expr.hpp"

using namespace entrans;

TEST_SUITE("expr") {

TEST_CASE("parse and evaluate simple potentials") {
  const Expr j = parse("x1^2 + x2^2", 2);
  CHECK(j.evaluate(std::vector<double>{1, 1}) == 2.0);
  CHECK(j.evaluate(std::vector<double>{0, 0}) == 0.0);
  CHECK(j.evaluate(std::vector<double>{-3, 0.5}) == 9.25);

  const Expr zero = parse("0", 1);
  CHECK(zero.isConstant());
  CHECK(zero.constantValue() == 0.0);

  const Expr well = parse("0.25*(x1^2 - 1)^2", 1);
  CHECK(well.evaluate(std::vector<double>{1}) == 0.0);
  CHECK(well.evaluate(std::vector<double>{0}) == 0.25);
}

TEST_CASE("aliases and precedence") {
  const Expr a = parse("x*y + z", 3);
  CHECK(a.evaluate(std::vector<double>{2, 3, 4}) == 10.0);
  CHECK(parse("2^3^2", 1).evaluate(std::vector<double>{0}) == 512.0);
  CHECK(parse("-2^2", 1).evaluate(std::vector<double>{0}) == -4.0);
  CHECK(parse("8/4/2", 1).evaluate(std::vector<double>{0}) == 1.0);
  CHECK(parse("1 - 2 - 3", 1).evaluate(std::vector<double>{0}) == -4.0);
  CHECK(parse("x1^-2", 1).evaluate(std::vector<double>{2}) == 0.25);
  CHECK(parse("1.5e1 + .5", 1).evaluate(std::vector<double>{0}) == 15.5);
}

TEST_CASE("parse errors carry positions") {
  try {
    parse("x1^2 + x3", 2);
    FAIL("expected an error");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 7);
    CHECK(std::string(e.what()).find("dimension 2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse("", 1), ParseError);
  CHECK_THROWS_AS(parse("x1 +", 1), ParseError);
  CHECK_THROWS_AS(parse("foo(x1)", 1), ParseError);
  CHECK_THROWS_AS(parse("x1^0.5", 1), ParseError);
  CHECK_THROWS_AS(parse("(x1", 1), ParseError);
  CHECK_THROWS_AS(parse("x1 $ 2", 1), ParseError);
  CHECK_THROWS_AS(parse("x0", 1), ParseError);
  try {
    parse("x1 + * 2", 1);
  } catch (const ParseError& e) {
    CHECK(e.offset() == 5);
    CHECK_FALSE(e.expected().empty());
  }
}

TEST_CASE("parsing is total on garbage input") {
  std::mt19937_64 rng(7);
  const std::string alphabet = "x12y^+-*/() .e5lnexpsicoz$";
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1), len(0, 12);
  for (int k = 0; k < 2000; ++k) {
    std::string s;
    for (std::size_t n = len(rng); n > 0; --n) s += alphabet[pick(rng)];
    try {
      (void)parse(s, 2);
    } catch (const ParseError& e) {
      CHECK(e.offset() <= s.size());
    } catch (const InputError&) {
    }
  }
}

TEST_CASE("domain errors name the subexpression") {
  const Expr e = parse("1 + ln(x1 - 1)", 1);
  try {
    e.evaluate(std::vector<double>{0.5});
    FAIL("expected a domain error");
  } catch (const DomainError& err) {
    CHECK(err.subexpression().find("ln") != std::string::npos);
  }
  CHECK_THROWS_AS(parse("1/x1", 1).evaluate(std::vector<double>{0}), DomainError);
  CHECK_THROWS_AS(parse("x1^-1", 1).evaluate(std::vector<double>{0}), DomainError);

  std::vector<double> xs{1.0, 0.0, 2.0}, out(3), scratch;
  const double* c[1] = {xs.data()};
  CHECK_THROWS_AS(parse("1/x1", 1).evaluateBatch(std::span<const double* const>(c, 1), 3, out.data(), scratch),
                  DomainError);
}

TEST_CASE("symbolic derivatives") {
  const Expr j = parse("x1^2 + x2^2", 2);
  CHECK(j.derivative(0).toString() == "2*x1");
  CHECK(differentiate(parse("3.5", 2), 0).isConstant());
  CHECK(differentiate(parse("3.5", 2), 0).constantValue() == 0.0);
  const double d = differentiate(parse("exp(x1)", 1), 0).evaluate(std::vector<double>{1.0});
  const double fd = (std::exp(1.0 + 1e-5) - std::exp(1.0 - 1e-5)) / 2e-5;
  CHECK(d == doctest::Approx(2.718281828459045).epsilon(1e-15));
  CHECK(std::abs(d - fd) < 1e-9);
  CHECK_THROWS_AS(differentiate(j, 2), InputError);
}

const std::vector<const char*> kCorpus{
    "x1^2 + x2^2",        "exp(x1)*sin(x2)",         "0.25*(x1^2 - 1)^2 + x2", "ln(1 + x1^2)*cos(x2)",
    "x1/(2 + x2^2)",      "x1^3*x2 - 2*x2^4",         "exp(-x1^2 - 0.5*x2^2)",  "sin(x1*x2) + cos(x1)^2",
    "-(x1 - x2)^3 / 3.7", "(1 + x1)^-2 + 1e-3*x2^5",
};

TEST_CASE("print then parse round-trips to the bit") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  for (const char* src : kCorpus) {
    const Expr e = parse(src, 2);
    const Expr back = parse(e.toString(), 2);
    CHECK(back.toString() == e.toString());
    for (int k = 0; k < 100; ++k) {
      const std::vector<double> x{u(rng), u(rng)};
      const double a = e.evaluate(x), b = back.evaluate(x);
      CHECK(std::memcmp(&a, &b, sizeof a) == 0);
    }
  }
}

TEST_CASE("batch evaluation equals scalar evaluation") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  std::vector<double> x1(777), x2(777), out(777), scratch;
  for (std::size_t i = 0; i < x1.size(); ++i) {
    x1[i] = u(rng);
    x2[i] = u(rng);
  }
  const double* c[2] = {x1.data(), x2.data()};
  for (const char* src : kCorpus) {
    const Expr e = parse(src, 2);
    e.evaluateBatch(std::span<const double* const>(c, 2), x1.size(), out.data(), scratch);
    for (std::size_t i = 0; i < x1.size(); ++i) CHECK(out[i] == e.evaluate(std::vector<double>{x1[i], x2[i]}));
  }
}

// Central difference error shrinks by 100 from h = 1e-3 to 1e-4. Points are
// kept where the h^2 f'''/6 term dominates rounding at h = 1e-4.
TEST_CASE("derivative versus central differences is O(h^2)") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  int checked = 0;
  for (const char* src : kCorpus) {
    const Expr e = parse(src, 2);
    for (int axis = 0; axis < 2; ++axis) {
      const Expr d1 = e.derivative(axis);
      const Expr d3 = d1.derivative(axis).derivative(axis);
      int used = 0;
      for (int k = 0; k < 200 && used < 10; ++k) {
        std::vector<double> x{u(rng), u(rng)};
        const double third = d3.evaluate(x);
        const double scale = std::abs(e.evaluate(x)) + std::abs(x[axis] * d1.evaluate(x)) + 1.0;
        if (std::abs(third) < 0.5 * scale) continue;
        auto err = [&](double h) {
          std::vector<double> p = x, m = x;
          p[axis] += h;
          m[axis] -= h;
          return std::abs(d1.evaluate(x) - (e.evaluate(p) - e.evaluate(m)) / (2 * h));
        };
        const double e3 = err(1e-3), e4 = err(1e-4);
        const double ratio = e3 / e4;
        CHECK_MESSAGE(ratio > 50.0, src << " axis " << axis);
        CHECK_MESSAGE(ratio < 200.0, src << " axis " << axis);
        CHECK(e3 <= std::abs(third) * 1e-6 / 6.0 * 1.5);
        ++used;
      }
      checked += used;
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("dimension handling") {
  const Expr e = parse("x1 + 1", 1);
  CHECK(e.usedDimension() == 1);
  CHECK(e.withDimension(3).dimension() == 3);
  CHECK_THROWS_AS(parse("x2", 2).withDimension(1), InputError);
  CHECK_THROWS_AS((void)(parse("x1", 1) + parse("x1", 2)), InputError);
}

}
