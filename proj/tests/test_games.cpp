#include <doctest.h>

#include <json.hpp>

#include <sstream>

#include "maldist/errors.hpp"
#include "maldist/games.hpp"

using namespace maldist;

namespace {

Rational q(long p, long d = 1) { return Rational(p, d); }

struct Fixture {
  Space space = Space::unit_cube(1);
  IntervalWitness w = IntervalWitness::dyadic();
  Point eta{q(1, 2)};
  Ball u{{q(1, 2)}, q(1, 4)};
  Ball v{{q(0)}, q(1, 8)};
  DenseOpenFamily family{space, w, eta};
};

class LeaveTheChain : public BMAdversary {
 public:
  Cylinder move(const Space&, const Point&, const BMState& state) override {
    if (state.rounds.empty()) return Cylinder();
    // widen a constraint Player II has set
    Cylinder c = state.last_v();
    Natural i = c.constrained().front();
    return c.with(i, {{q(0)}, q(2)});
  }
  std::string name() const override { return "(leave)"; }
};

}  // namespace

TEST_SUITE("games") {
  TEST_CASE("first Banach-Mazur round") {
    Fixture f;
    auto pass = bm_pass();
    BMResult r = bm_play(f.space, f.w, f.eta, *pass, 1);
    REQUIRE(r.state.rounds.size() == 1);
    const BMRound& round = r.state.rounds[0];
    CHECK(round.kappa == -1);
    CHECK(round.j == 0);
    CHECK(round.v.constrained() == std::vector<Natural>{1});
    CHECK(*round.v.at(1) == Ball{f.eta, q(1)});
    CHECK(check_bm_invariants(f.space, f.w, f.eta, r).ok());
  }

  TEST_CASE("Banach-Mazur invariants against random play") {
    for (const char* sp : {"(discrete 2)", "(cube 2)"}) {
      Space space = Space::parse(sp);
      Point eta = space.kind() == Space::Kind::DiscreteFinite ? Point{q(1)} : Point{q(1, 3), q(2, 3)};
      for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto adv = bm_random(seed);
        BMResult r = bm_play(space, IntervalWitness::dyadic(), eta, *adv, 10);
        BMInvariantCheck c = check_bm_invariants(space, IntervalWitness::dyadic(), eta, r);
        CHECK_MESSAGE(c.ok(), sp << " seed " << seed << ": " << (c.details.empty() ? "" : c.details[0]));
      }
    }
  }

  TEST_CASE("pinning far from the target") {
    Fixture f;
    auto far = bm_pin_far();
    BMResult r = bm_play(f.space, f.w, f.eta, *far, 5);
    CHECK(check_bm_invariants(f.space, f.w, f.eta, r).ok());
    for (Natural i = 0; i < 10; ++i) CHECK(f.space.distance_less(r.prefix[i], {q(0)}, q(1, 8)));
    CHECK(r.state.rounds[0].kappa == 9);
    CHECK(f.w.at(r.state.rounds[0].j).lo > 9);
  }

  TEST_CASE("illegal Player I moves") {
    Fixture f;
    LeaveTheChain bad;
    CHECK_THROWS_AS(bm_play(f.space, f.w, f.eta, bad, 3), IllegalMove);
    CHECK_THROWS_AS(make_bm_adversary("(teleport)"), ParseError);
  }

  TEST_CASE("interactive Player I re-prompts") {
    Fixture f;
    std::istringstream in("(cylinder (ball 0 (3/2) 1))\n(cylinder (ball 0 (1/4) 1/8))\n");
    std::ostringstream out;
    auto human = bm_interactive(in, out);
    BMResult r = bm_play(f.space, f.w, f.eta, *human, 2);
    CHECK(out.str().find("illegal move") != std::string::npos);
    CHECK(r.state.rounds[0].u.support() == 0);
    CHECK(r.state.rounds.size() == 2);
    CHECK(check_bm_invariants(f.space, f.w, f.eta, r).ok());
  }

  TEST_CASE("transcripts") {
    Fixture f;
    auto adv = bm_random(4);
    BMResult r = bm_play(f.space, f.w, f.eta, *adv, 4);
    std::ostringstream out;
    r.write_transcript(out, f.space);
    std::istringstream lines(out.str());
    std::string line;
    int count = 0;
    while (std::getline(lines, line)) {
      nlohmann::json j = nlohmann::json::parse(line);
      CHECK(j["round"] == count / 2);
      CHECK(j["mover"] == (count % 2 == 0 ? "I" : "II"));
      CHECK(j.contains("move"));
      ++count;
    }
    CHECK(count == 8);
  }

  TEST_CASE("density procedure of the dense open family") {
    Fixture f;
    Cylinder b0 = f.family.refine(0, Cylinder());
    CHECK(b0.constrained() == std::vector<Natural>{1});
    CHECK(*b0.at(1) == Ball{f.eta, q(1)});

    Cylinder d = Cylinder().with(100, {{q(0)}, q(1, 2)});
    CHECK(f.family.refinement_index(3, d) == 7);
    Cylinder b3 = f.family.refine(3, d);
    CHECK(b3.support() == 255);
    for (Natural i = 128; i <= 255; ++i) CHECK(*b3.at(i) == Ball{f.eta, q(1, 8)});
    CHECK(b3.subset_of(f.space, d));
    auto prefix = b3.materialize(f.space, 256, f.space.dense_point(0));
    CHECK(f.family.membership_witness(3, prefix) == Natural{7});
  }

  TEST_CASE("Laflamme play") {
    Fixture f;
    auto adv = laflamme_gap_step(2);
    LaflammeResult r = laflamme_play(f.family, f.u, f.v, *adv, 6);
    LaflammeInvariantCheck c = check_laflamme_invariants(f.family, r);
    CHECK_MESSAGE(c.ok(), (c.details.empty() ? "" : c.details[0]));
    CHECK(c.rounds_with_full_pinned_interval == 5);
    // F_k is inside [c_k, m(B_k)] and holds the pinned interval
    for (const LaflammeRound& k : r.state.rounds) {
      REQUIRE_FALSE(k.f.empty());
      CHECK(k.f.front() >= k.c);
      CHECK(static_cast<std::int64_t>(k.f.back()) <= k.b.support());
      CHECK(std::binary_search(k.f.begin(), k.f.end(), k.pinned.lo));
      CHECK(std::binary_search(k.f.begin(), k.f.end(), k.pinned.hi));
    }
    // round 1: c_1 = m(B_0) + 2 = 3, pinned I_2 = [4,7]; coordinate 3 is free and joins F_1
    const LaflammeRound& r1 = r.state.rounds[1];
    CHECK(r1.c == 3);
    CHECK(r1.pinned == Interval{4, 7});
    CHECK(r1.f == std::vector<Natural>{3, 4, 5, 6, 7});
  }

  TEST_CASE("Laflamme round 0 with c_0 = 0") {
    Fixture f;
    auto adv = laflamme_fixed({0});
    LaflammeResult r = laflamme_play(f.family, f.u, f.v, *adv, 1);
    CHECK(r.state.rounds[0].a == Cylinder());
    CHECK(r.state.rounds[0].b.subset_of(f.space, f.family.refine(0, Cylinder())));
  }

  TEST_CASE("Laflamme thresholds far beyond the support") {
    Fixture f;
    auto adv = laflamme_fixed({0, 100, 1000, 5000});
    LaflammeResult r = laflamme_play(f.family, f.u, f.v, *adv, 4);
    CHECK(check_laflamme_invariants(f.family, r).ok());
    Natural forced = 0;
    std::int64_t prev = -1;
    for (const LaflammeRound& k : r.state.rounds) {
      for (std::int64_t n = prev + 1; n < static_cast<std::int64_t>(k.c); ++n) {
        CHECK(f.space.ball_subsumes(f.v, *k.b.at(static_cast<Natural>(n))));
        ++forced;
      }
      for (Natural n : k.f) CHECK(n >= k.c);
      prev = k.b.support();
    }
    CHECK(forced > 1000);
  }

  TEST_CASE("illegal thresholds and balls") {
    Fixture f;
    auto regress = laflamme_fixed({5, 3});
    CHECK_THROWS_AS(laflamme_play(f.family, f.u, f.v, *regress, 2), IllegalAdversaryMove);
    auto stuck = laflamme_fixed({0, 0});
    CHECK_THROWS_AS(laflamme_play(f.family, f.u, f.v, *stuck, 2), IllegalAdversaryMove);
    auto ok = laflamme_gap_step(1);
    CHECK_THROWS_AS(laflamme_play(f.family, f.u, Ball{{q(1, 2)}, q(1, 8)}, *ok, 2), InvalidArgument);
    CHECK_THROWS_AS(laflamme_play(f.family, Ball{{q(0)}, q(1, 4)}, Ball{{q(1)}, q(1, 4)}, *ok, 2), InvalidArgument);
  }

  TEST_CASE("Laflamme against random thresholds") {
    for (const char* sp : {"(cube 1)", "(discrete 2)"}) {
      Space space = Space::parse(sp);
      const bool discrete = space.kind() == Space::Kind::DiscreteFinite;
      Point eta = discrete ? Point{q(0)} : Point{q(1, 2)};
      Ball u = discrete ? Ball{{q(0)}, q(1, 2)} : Ball{{q(1, 2)}, q(1, 4)};
      Ball v = discrete ? Ball{{q(1)}, q(1, 2)} : Ball{{q(0)}, q(1, 8)};
      DenseOpenFamily family(space, IntervalWitness::dyadic(), eta);
      for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto adv = laflamme_random(seed);
        LaflammeResult r = laflamme_play(family, u, v, *adv, 6);
        LaflammeInvariantCheck c = check_laflamme_invariants(family, r);
        CHECK_MESSAGE(c.ok(), sp << " seed " << seed);
        CHECK(c.rounds_with_full_pinned_interval == 5);
      }
    }
  }

  TEST_CASE("adjudication") {
    Fixture f;
    auto adv = laflamme_random(2);
    LaflammeResult r = laflamme_play(f.family, f.u, f.v, *adv, 5);
    AdjudicationReport rep = adjudicate_laflamme(r, f.space, parse_oracle("(density-above 0)"));
    CHECK(rep.sets_equal);
    CHECK(rep.pinned_contained == 5);
    CHECK(rep.union_f == rep.hitting);
    REQUIRE(rep.finite_union.value);
    CHECK(*rep.finite_union.value == Extended(Rational(0)));  // a finite set carries no density

    auto none = laflamme_gap_step(1);
    LaflammeResult empty = laflamme_play(f.family, f.u, f.v, *none, 0);
    AdjudicationReport zero = adjudicate_laflamme(empty, f.space, parse_oracle("(density-above 0)"));
    CHECK(zero.union_f.empty());
    CHECK(zero.hitting.empty());
    CHECK(zero.sets_equal);
  }
}
