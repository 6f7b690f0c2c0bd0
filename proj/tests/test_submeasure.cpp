#include <doctest.h>

#include <random>

#include "maldist/errors.hpp"
#include "maldist/submeasure.hpp"
#include "oracles.hpp"

using namespace maldist;

namespace {

Extended ext(Natural p, Natural q = 1) { return Extended(Rational(to_integer(p), to_integer(q))); }

}  // namespace

TEST_SUITE("submeasure") {
  TEST_CASE("descriptor round trip") {
    for (const char* text : {"counting", "harmonic", "(geometric 1/3)", "upper-density", "(partition dyadic)",
                             "(partition linear 3)", "(table 0 1 1 2)", "(cap 1/2 upper-density)"}) {
      Lscsm phi = Lscsm::parse(text);
      CHECK(Lscsm::parse(phi.to_string()).to_string() == phi.to_string());
    }
    CHECK(Lscsm::parse("(phi upper-density)").to_string() == Lscsm::upper_density().to_string());
    CHECK_THROWS_AS(Lscsm::parse("(geometric 1)"), ParseError);
    CHECK_THROWS_AS(Lscsm::parse("(partition cubic)"), ParseError);
  }

  TEST_CASE("evaluation examples") {
    MassValue evens = eval_phi(Lscsm::upper_density(), SetExpr::progression(0, 2), 10000);
    CHECK(evens.lower >= ext(1, 2));
    REQUIRE(evens.exact);
    // sup_{n>=1} |A ∩ [0,n]|/n is attained at n = 1 for the evens: {0,1} ∩ A = {0}.
    CHECK(evens.value() == Extended(oracle::upper_density_truncated(oracle::predicate("(ap 0 2)"), 10000)));
    CHECK(evens.value() == ext(1));

    MassValue three = eval_phi(Lscsm::counting(), SetExpr::finite({1, 5, 9}), 100);
    REQUIRE(three.exact);
    CHECK(three.value() == ext(3));

    MassValue h = eval_phi(Lscsm::harmonic(), SetExpr::interval(0, 3), 100);
    REQUIRE(h.exact);
    CHECK(h.value() == Extended(oracle::harmonic(oracle::predicate("(iv 0 3)"), 0, 3)));
    CHECK(h.value() == ext(25, 12));
  }

  TEST_CASE("masses at infinity") {
    MassValue evens = mass_at_infinity(Lscsm::upper_density(), SetExpr::progression(0, 2));
    REQUIRE(evens.exact);
    CHECK(evens.value() == ext(1, 2));
    MassValue fin = mass_at_infinity(Lscsm::upper_density(), SetExpr::finite({2, 40, 99}));
    REQUIRE(fin.exact);
    CHECK(fin.value() == ext(0));
    MassValue full = mass_at_infinity(Lscsm::upper_density(), SetExpr::full());
    REQUIRE(full.exact);
    CHECK(full.value() == ext(1));
    CHECK(exact_density(SetExpr::progression(3, 7)) == Rational(1, 7));
  }

  TEST_CASE("exhaustive ideal membership") {
    std::vector<Natural> first_ten{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    CHECK(exh_member(Lscsm::upper_density(), SetExpr::finite(first_ten)));
    CHECK_FALSE(exh_member(Lscsm::upper_density(), SetExpr::progression(3, 7)));
    CHECK_THROWS_AS(exh_member(Lscsm::harmonic(), SetExpr::progression(0, 2)), Uncertifiable);
    // the bracket shows the divergent tail: the harmonic sum over evens in (sqrt h, h] grows with h
    MassValue small = mass_at_infinity(Lscsm::harmonic(), SetExpr::progression(0, 2), 1000);
    MassValue large = mass_at_infinity(Lscsm::harmonic(), SetExpr::progression(0, 2), 1000000);
    CHECK_FALSE(small.exact);
    REQUIRE(small.tail_evidence);
    REQUIRE(large.tail_evidence);
    CHECK(*small.tail_evidence < *large.tail_evidence);
  }

  TEST_CASE("truncations agree with enumeration") {
    std::mt19937_64 rng(99);
    const Lscsm ud = Lscsm::upper_density();
    const Lscsm hm = Lscsm::harmonic();
    const Lscsm geo = Lscsm::geometric(Rational(1, 2));
    const Lscsm part = Lscsm::partition_dyadic();
    const Lscsm cnt = Lscsm::counting();
    for (int i = 0; i < 60; ++i) {
      SetExpr s = random_set_expr(rng);
      auto pred = oracle::predicate(s.to_string());
      const CanonicalSet& c = s.canonical();
      for (Natural h : {0, 1, 2, 7, 64, 250}) {
        CHECK(eval_truncated(ud, c, h) == Extended(oracle::upper_density_truncated(pred, h)));
        CHECK(eval_truncated(hm, c, h) == Extended(oracle::harmonic(pred, 0, h)));
        CHECK(eval_truncated(geo, c, h) == Extended(oracle::geometric(pred, Rational(1, 2), 0, h)));
        CHECK(eval_truncated(part, c, h) == Extended(oracle::partition_dyadic(pred, h)));
        CHECK(eval_truncated(cnt, c, h) == ext(oracle::count(pred, 0, h)));
      }
      for (Natural lo : {0, 1, 5, 33}) {
        for (Natural hi : {lo, lo + 1, lo + 17, lo + 140}) {
          CHECK(eval_window(ud, c, lo, hi) == Extended(oracle::upper_density_window(pred, lo, hi)));
          CHECK(eval_window(hm, c, lo, hi) == Extended(oracle::harmonic(pred, lo, hi)));
        }
      }
    }
  }

  TEST_CASE("lower semicontinuity in the horizon") {
    std::mt19937_64 rng(5);
    for (const char* text : {"counting", "harmonic", "(geometric 2/3)", "upper-density", "(partition linear 2)"}) {
      Lscsm phi = Lscsm::parse(text);
      for (int i = 0; i < 20; ++i) {
        SetExpr s = random_set_expr(rng);
        Extended prev = eval_truncated(phi, s.canonical(), 0);
        for (Natural h = 1; h <= 300; h += 7) {
          Extended cur = eval_truncated(phi, s.canonical(), h);
          CHECK(prev <= cur);
          prev = cur;
        }
        if (auto exact = eval_exact(phi, s.canonical())) CHECK(prev <= *exact);
        auto full = eval_exact(phi, s.canonical());
        auto mass = exact_mass(phi, s.canonical());
        if (full && mass) CHECK(*mass <= *full);
      }
    }
  }

  TEST_CASE("axiom checks") {
    AxiomReport ud = check_submeasure_axioms(Lscsm::upper_density(), 200, 1000, 1);
    CHECK(ud.ok());
    CHECK(ud.checks > 0);
    CHECK(check_submeasure_axioms(Lscsm::counting(), 200, 1000, 1).ok());
    // a cardinality table that drops from 1 to 0 is not monotone
    AxiomReport bad = check_submeasure_axioms(Lscsm::table({Rational(0), Rational(1), Rational(0)}), 50, 100, 3);
    REQUIRE_FALSE(bad.ok());
    bool monotone_witness = false;
    for (const AxiomViolation& v : bad.violations) {
      if (v.axiom != "monotone") continue;
      SetExpr a = SetExpr::parse(v.a);
      SetExpr b = SetExpr::parse(v.b);
      bool subset = true;
      for (Natural n = 0; n <= v.horizon; ++n) subset = subset && (!a.contains(n) || b.contains(n));
      monotone_witness = monotone_witness || subset;
    }
    CHECK(monotone_witness);
  }

  TEST_CASE("cap") {
    Lscsm capped = Lscsm::counting().capped(Rational(2));
    CHECK(eval_phi(capped, SetExpr::finite({1, 2, 3}), 10).value() == ext(2));
    CHECK(eval_phi(capped, SetExpr::finite({1}), 10).value() == ext(1));
    CHECK(eval_exact(Lscsm::counting(), SetExpr::full().canonical()) == Extended::infinity());
  }
}
