#include <doctest.h>

#include <random>

#include "maldist/errors.hpp"
#include "maldist/witness.hpp"
#include "oracles.hpp"

using namespace maldist;

namespace {

std::string intervals_text(const IntervalWitness& w, Natural count) {
  std::string s;
  for (const Interval& iv : w.prefix(count)) s += iv.to_string();
  return s;
}

std::string random_gap_text(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kind(0, 2);
  std::uniform_int_distribution<int> small(0, 6);
  switch (kind(rng)) {
    case 0:
      return "(const " + std::to_string(small(rng)) + ")";
    case 1:
      return "(affine " + std::to_string(small(rng) % 3) + " " + std::to_string(small(rng) - 3) + ")";
    default: {
      std::string t = "(gap table (";
      const int len = small(rng) + 1;
      for (int i = 0; i < len; ++i) t += (i ? " " : "") + std::to_string(small(rng));
      return t + ") (affine " + std::to_string(small(rng) % 2) + " " + std::to_string(small(rng)) + "))";
    }
  }
}

}  // namespace

TEST_SUITE("witness") {
  TEST_CASE("gap to intervals examples") {
    CHECK(intervals_text(gap_to_intervals(GapFunction::affine(1, 1)), 3) == "[0,1][2,5][6,13]");
    CHECK(intervals_text(gap_to_intervals(GapFunction::constant(0)), 4) == "[0,0][1,1][2,2][3,3]");
    CHECK(intervals_text(gap_to_intervals(GapFunction::constant(2)), 3) == "[0,2][3,5][6,8]");
  }

  TEST_CASE("gap to intervals against the recurrence") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 100; ++i) {
      const std::string text = random_gap_text(rng);
      GapFunction g = GapFunction::parse(text);
      auto expected = oracle::gap_recurrence(oracle::parse_gap(text), 10000);
      auto got = gap_to_intervals(g).up_to(10000);
      REQUIRE_MESSAGE(got.size() == expected.size(), text);
      for (std::size_t k = 0; k < got.size(); ++k) {
        CHECK(got[k].lo == expected[k].lo);
        CHECK(got[k].hi == expected[k].hi);
        if (k + 1 < got.size()) CHECK(got[k].hi < got[k + 1].lo);
      }
      CHECK(GapFunction::parse(g.to_string()).to_string() == g.to_string());
    }
  }

  TEST_CASE("intervals to gap") {
    GapFunction d = intervals_to_gap(IntervalWitness::dyadic());
    CHECK(d(0) == 1);
    CHECK(d(2) == 3);
    CHECK(d(3) == 7);
    GapFunction u = intervals_to_gap(IntervalWitness::unit());
    for (Natural n = 0; n < 200; ++n) CHECK(u(n) == n);
    // g(n) = max I_k for the least k with min I_k >= n, by scanning
    IntervalWitness w = IntervalWitness::parse("(witness linear 5 2 3)");
    GapFunction g = intervals_to_gap(w);
    for (Natural n = 0; n < 100; ++n) {
      Natural k = 0;
      while (w.at(k).lo < n) ++k;
      CHECK(g(n) == w.at(k).hi);
    }
  }

  TEST_CASE("witness grammar") {
    for (const char* text : {"(witness dyadic)", "(witness unit)", "(witness linear 4 1 2)",
                             "(witness gap (gap affine 1 1))", "(witness table (0 1) (2 5) (extend (gap const 3)))"}) {
      IntervalWitness w = IntervalWitness::parse(text);
      CHECK(IntervalWitness::parse(w.to_string()).to_string() == w.to_string());
      auto pre = w.prefix(12);
      for (std::size_t k = 0; k + 1 < pre.size(); ++k) CHECK(pre[k].hi < pre[k + 1].lo);
    }
    IntervalWitness t = IntervalWitness::parse("(witness table (0 1) (2 5) (extend (gap const 3)))");
    CHECK(intervals_text(t, 4) == "[0,1][2,5][6,9][10,13]");
    CHECK_THROWS_AS(IntervalWitness::parse("(witness table (0 4) (3 5))"), ParseError);
    CHECK_THROWS_AS(IntervalWitness::parse("(witness linear 2 0 3)"), ParseError);
    CHECK(IntervalWitness::dyadic().first_index_at_or_after(101) == 7);
    CHECK(IntervalWitness::dyadic().index_containing(200) == Natural{7});
    CHECK_FALSE(IntervalWitness::dyadic().index_containing(0).has_value());
  }

  TEST_CASE("window condition examples") {
    ConditionCheckResult evens = check_condition2(GapFunction::constant(1), SetExpr::progression(0, 2), 1000);
    CHECK(evens.outcome == ConditionCheckResult::Outcome::Holds);
    CHECK(evens.threshold == 0);

    ConditionCheckResult odd = check_condition2(GapFunction::constant(0), SetExpr::progression(0, 2), 1000);
    CHECK(odd.outcome == ConditionCheckResult::Outcome::FailsAtHorizon);
    CHECK(odd.failure_count == 500);
    for (Natural n : odd.witnesses) CHECK(n % 2 == 1);
    CHECK(odd.fails_infinitely_often == true);

    // n = 0 has window [0, 0] and 0 is a multiple of 100; every later window meets A.
    GapFunction g = GapFunction::affine(7, -8);
    ConditionCheckResult r = check_condition2(g, SetExpr::complement(SetExpr::progression(0, 100)), 10000);
    CHECK(r.outcome == ConditionCheckResult::Outcome::Holds);
    auto a = oracle::predicate("(not (ap 0 100))");
    Natural expected = 0;
    for (Natural n = 0; n <= 10000; ++n)
      if (oracle::count(a, n, n + g(n)) == 0) expected = n + 1;
    CHECK(r.threshold == expected);
    CHECK(r.threshold == 1);
  }

  TEST_CASE("window condition threshold minimality and decidability") {
    std::mt19937_64 rng(23);
    RandomSetOptions opts;
    opts.depth = 4;
    opts.max_value = 60;
    for (int i = 0; i < 150; ++i) {
      const std::string gt = random_gap_text(rng);
      GapFunction g = GapFunction::parse(gt);
      SetExpr a = random_set_expr(rng, opts);
      const Natural horizon = 2000;
      ConditionCheckResult r = check_condition2(g, a, horizon);
      auto pred = oracle::predicate(a.to_string());
      const CanonicalSet& c = a.canonical();
      const oracle::Gap og = oracle::parse_gap(gt);
      REQUIRE(r.fails_infinitely_often.has_value());
      CHECK(*r.fails_infinitely_often ==
            oracle::windows_fail_infinitely_often(og, pred, c.threshold() + og.table.size(), c.period()));
      if (r.holds()) {
        for (Natural n = r.threshold; n + og(n) <= horizon; ++n) REQUIRE(oracle::count(pred, n, n + og(n)) > 0);
        if (r.threshold > 0) CHECK(oracle::count(pred, r.threshold - 1, r.threshold - 1 + og(r.threshold - 1)) == 0);
      }
      for (Natural n : r.witnesses) CHECK(oracle::count(pred, n, n + og(n)) == 0);
    }
  }

  TEST_CASE("infinitude certificates against simulation") {
    std::mt19937_64 rng(31);
    RandomSetOptions opts;
    opts.depth = 4;
    opts.max_value = 50;
    int certified = 0;
    for (int i = 0; i < 200; ++i) {
      const std::string gt = random_gap_text(rng);
      SetExpr s = random_set_expr(rng, opts);
      IntervalWitness w = gap_to_intervals(GapFunction::parse(gt));
      InfinitudeCertificate cert = certify_infinitude(w, s.canonical());
      if (!cert.certified) continue;
      ++certified;
      const CanonicalSet& c = s.canonical();
      CHECK_MESSAGE(cert.contained_infinitely_often ==
                        oracle::contains_infinitely_many(oracle::parse_gap(gt), oracle::predicate(s.to_string()),
                                                         c.threshold(), c.period()),
                    gt << " " << s.to_string());
    }
    CHECK(certified == 200);
    // closed-form witnesses
    CHECK(certify_infinitude(IntervalWitness::unit(), SetExpr::progression(0, 2).canonical()).contained_infinitely_often);
    CHECK_FALSE(
        certify_infinitude(IntervalWitness::dyadic(), SetExpr::progression(0, 2).canonical()).contained_infinitely_often);
    CHECK(certify_infinitude(IntervalWitness::dyadic(), SetExpr::progression(0, 2).canonical()).meets_infinitely_often);
  }

  TEST_CASE("g_alpha for the upper density") {
    GapFunction g = gap_from_lscsm(Lscsm::upper_density(), Rational(1, 2));
    for (Natural n = 0; n <= 100; ++n) {
      const Natural closed = n == 0 ? 0 : static_cast<Natural>(std::max<std::int64_t>(0, 7 * static_cast<std::int64_t>(n) - 8));
      const Natural inc = oracle::galpha_upper_density_incremental(n, Rational(1, 2));
      CHECK(g(n) == inc);
      CHECK(inc == closed);
      if (n <= 30) CHECK(inc == oracle::galpha_upper_density_brute(n, Rational(1, 2)));
    }
    CHECK(g(2) == 6);
    // minimality of the window
    const Lscsm ud = Lscsm::upper_density();
    const CanonicalSet full = SetExpr::full().canonical();
    for (Natural n = 0; n <= 40; ++n) {
      CHECK(eval_window(ud, full, n, n + g(n)) >= Extended(Rational(7, 8)));
      if (g(n) > 0) CHECK(eval_window(ud, full, n, n + g(n) - 1) < Extended(Rational(7, 8)));
    }
    // larger alpha, smaller gaps
    GapFunction g34 = gap_from_lscsm(ud, Rational(3, 4));
    GapFunction g14 = gap_from_lscsm(ud, Rational(1, 4));
    for (Natural n = 0; n <= 60; ++n) {
      CHECK(g34(n) <= g(n));
      CHECK(g(n) <= g14(n));
    }
  }

  TEST_CASE("g_alpha errors") {
    CHECK_THROWS_AS(gap_from_lscsm(Lscsm::upper_density(), Rational(0)), InvalidArgument);
    CHECK_THROWS_AS(gap_from_lscsm(Lscsm::upper_density(), Rational(1)), InvalidArgument);
    CHECK_THROWS_AS(gap_from_lscsm(Lscsm::counting(), Rational(1, 2)), HypothesisNotCertified);
    GapFunction short_search = gap_from_lscsm(Lscsm::upper_density(), Rational(1, 2), 10);
    CHECK(short_search(2) == 6);
    try {
      short_search(5);
      FAIL("expected NoFiniteWitness");
    } catch (const NoFiniteWitness& e) {
      CHECK(e.n() == 5);
    }
  }

  TEST_CASE("large-set window masses") {
    const Lscsm ud = Lscsm::upper_density();
    LscsmVerification v = verify_prop_lscsm(ud, Rational(1, 2), SetExpr::complement(SetExpr::progression(0, 4)), 2000);
    CHECK(v.ok());
    CHECK(v.complement_mass == Extended(Rational(1, 4)));
    CHECK(v.min_window_mass >= Extended(Rational(1, 8)));
    CHECK(verify_prop_lscsm(ud, Rational(1, 2), SetExpr::full(), 500).ok());
    LscsmVerification evens = verify_prop_lscsm(ud, Rational(1, 2), SetExpr::progression(0, 2), 2000);
    CHECK(evens.ok());
    CHECK(evens.min_window_mass >= Extended(Rational(1, 8)));
    // brute check of one window: evens in [n, n + 7n - 8]
    auto pred = oracle::predicate("(ap 0 2)");
    GapFunction g = gap_from_lscsm(ud, Rational(1, 2));
    for (Natural n = evens.n_a; n <= 60; ++n) {
      CHECK(oracle::upper_density_window(pred, n, n + g(n)) >= Rational(1, 8));
    }
    CHECK_THROWS_AS(verify_prop_lscsm(ud, Rational(1, 2), SetExpr::progression(0, 4), 100), HypothesisNotCertified);
  }
}
