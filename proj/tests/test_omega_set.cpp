#include <doctest.h>

#include <random>

#include "maldist/errors.hpp"
#include "maldist/omega_set.hpp"
#include "oracles.hpp"

using namespace maldist;

TEST_SUITE("omega_set") {
  TEST_CASE("membership examples") {
    CHECK(member(SetExpr::interval(3, 7), 5));
    CHECK_FALSE(member(SetExpr::complement(SetExpr::progression(0, 2)), 4));
    CHECK(member(SetExpr::unite({SetExpr::interval(0, 1), SetExpr::progression(5, 3)}), 11));
  }

  TEST_CASE("normal forms") {
    CanonicalSet odd = normalize(SetExpr::progression(1, 2)).reduced();
    CHECK(odd.period() == 2);
    CHECK(odd.residues() == std::vector<Natural>{1});
    CHECK(odd.threshold() <= 1);

    CanonicalSet head = normalize(SetExpr::complement(SetExpr::tail(5)));
    CHECK(head.is_finite());
    CHECK(head.exceptional_members() == std::vector<Natural>{0, 1, 2, 3, 4});

    CanonicalSet six = normalize(SetExpr::intersect({SetExpr::progression(0, 2), SetExpr::progression(0, 3)})).reduced();
    CHECK(six.period() == 6);
    CHECK(six.residues() == std::vector<Natural>{0});
    for (Natural n = 0; n <= 60; ++n) CHECK(six.contains(n) == (n % 6 == 0));
  }

  TEST_CASE("counts and densities") {
    CHECK(prefix_count(SetExpr::full(), 9) == 10);
    CHECK(prefix_count(SetExpr::progression(0, 2), 9) == 5);
    CHECK(prefix_count(SetExpr::interval(4, 100), 9) == oracle::count(oracle::predicate("(iv 4 100)"), 0, 9));
    CHECK(exact_density(SetExpr::progression(0, 2)) == Rational(1, 2));
    CHECK(exact_density(SetExpr::finite({1, 2, 3})) == 0);
    // residues mod 12 by brute force
    Natural hits = 0;
    for (Natural r = 0; r < 12; ++r) hits += (r % 4 == 0 || (r >= 1 && (r - 1) % 6 == 0)) ? 1 : 0;
    CHECK(exact_density(SetExpr::unite({SetExpr::progression(0, 4), SetExpr::progression(1, 6)})) == Rational(hits, 12));
    CHECK(Rational(hits, 12) == Rational(5, 12));
  }

  TEST_CASE("interval intersection") {
    CHECK_FALSE(intersects_interval(SetExpr::progression(0, 5), 6, 9));
    CHECK(intersects_interval(SetExpr::tail(0), 17, 17));
    CHECK(intersects_interval(SetExpr::tail(0), 0, 1000));
    CHECK_FALSE(intersects_interval(SetExpr::complement(SetExpr::interval(2, 4)), 2, 4));
    CHECK_THROWS_AS(intersects_interval(SetExpr::full(), 5, 4), InvalidArgument);
  }

  TEST_CASE("random expressions agree with the grammar interpreter") {
    std::mt19937_64 rng(20240611);
    for (int i = 0; i < 300; ++i) {
      SetExpr s = random_set_expr(rng);
      const std::string text = s.to_string();
      auto pred = oracle::predicate(text);
      const CanonicalSet& c = s.canonical();
      Natural running = 0;
      for (Natural n = 0; n <= 600; ++n) {
        const bool in = pred(n);
        running += in ? 1 : 0;
        REQUIRE_MESSAGE(c.contains(n) == in, text << " at " << n);
        REQUIRE(s.contains(n) == in);
        REQUIRE(c.count_upto(n) == running);
      }
      // round trip through text, and through the verbatim canonical form
      CHECK(SetExpr::parse(text).canonical().reduced() == c.reduced());
      SetExpr verbatim = SetExpr::from_canonical(c);
      CHECK(SetExpr::parse(verbatim.to_string()).canonical().reduced() == c.reduced());
      // density: members per period far beyond the threshold
      const Natural t = c.threshold() + 3 * c.period();
      const Natural per = oracle::count(pred, t, t + c.period() - 1);
      CHECK(c.density() == Rational(per) / Rational(c.period()));
    }
  }

  TEST_CASE("boolean operations") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 100; ++i) {
      SetExpr a = random_set_expr(rng);
      SetExpr b = random_set_expr(rng);
      const CanonicalSet u = set_union(a.canonical(), b.canonical());
      const CanonicalSet x = set_intersection(a.canonical(), b.canonical());
      const CanonicalSet d = set_difference(a.canonical(), b.canonical());
      const CanonicalSet s = set_xor(a.canonical(), b.canonical());
      const CanonicalSet na = a.canonical().complement();
      for (Natural n = 0; n <= 400; ++n) {
        const bool ia = a.contains(n);
        const bool ib = b.contains(n);
        REQUIRE(u.contains(n) == (ia || ib));
        REQUIRE(x.contains(n) == (ia && ib));
        REQUIRE(d.contains(n) == (ia && !ib));
        REQUIRE(s.contains(n) == (ia != ib));
        REQUIRE(na.contains(n) == !ia);
      }
      CHECK(equivalent(set_union(d, x), a.canonical()));
    }
  }

  TEST_CASE("queries on canonical sets") {
    CanonicalSet c = SetExpr::parse("(union (fin 3 9) (ap 20 7))").canonical();
    CHECK(c.next_member(0) == Natural{3});
    CHECK(c.next_member(10) == Natural{20});
    CHECK(c.next_member(21) == Natural{27});
    CHECK(c.count_in(4, 8) == 0);
    CHECK(c.count_in(9, 3) == 0);
    CHECK(c.members_upto(27) == std::vector<Natural>{3, 9, 20, 27});
    CHECK_FALSE(c.max_member().has_value());
    CHECK(SetExpr::parse("(fin 4 8)").canonical().max_member() == Natural{8});
  }

  TEST_CASE("parse errors") {
    CHECK_THROWS_AS(SetExpr::parse("(ap 0 0)"), ParseError);
    CHECK_THROWS_AS(SetExpr::parse("(iv 5 2)"), ParseError);
    CHECK_THROWS_AS(SetExpr::parse("(bogus 1)"), ParseError);
    CHECK_THROWS_AS(SetExpr::parse("(union (ap 0 2)"), ParseError);
  }
}
