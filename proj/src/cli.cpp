#include "maldist/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "maldist/diffuse.hpp"
#include "maldist/errors.hpp"
#include "maldist/games.hpp"
#include "maldist/omega_set.hpp"
#include "maldist/sequence_space.hpp"
#include "maldist/submeasure.hpp"
#include "maldist/witness.hpp"

namespace maldist {

namespace {

using json = nlohmann::json;

constexpr int kOk = 0;
constexpr int kVerificationFailure = 1;
constexpr int kUsageError = 2;

struct UsageError : Error {
  using Error::Error;
};

struct OptionSpec {
  std::string key;
  std::string fallback;  // empty: no default
  std::string help;
};

struct Context {
  std::map<std::string, std::string> values;
  std::map<std::string, bool> flags;
  std::uint64_t seed = 0;
  std::ostream& out;
  std::istream& in;

  const std::string& get(const std::string& key) const {
    const std::string& v = values.at(key);
    if (v.empty()) throw UsageError("missing required option --" + key);
    return v;
  }
  bool has(const std::string& key) const { return !values.at(key).empty(); }
  Natural natural(const std::string& key) const {
    try {
      return parse_sexpr(get(key)).as_natural();
    } catch (const ParseError&) {
      throw UsageError("--" + key + " expects a natural number, got '" + get(key) + "'");
    }
  }
  Rational rational(const std::string& key) const { return parse_rational(get(key)); }
  Natural horizon(const std::string& key = "horizon") const {
    Natural h = natural(key);
    if (h == 0) throw UsageError("--" + key + " must be >= 1");
    return h;
  }
};

// A handler fills `result` and `text`, and returns the exit status.
struct Outcome {
  int status = kOk;
  json result;
  std::string text;
};

struct Command {
  std::string name;
  std::string description;
  std::vector<OptionSpec> options;
  std::vector<std::string> flags;
  std::function<Outcome(Context&)> run;
};

std::string join(const std::vector<Natural>& v, std::size_t limit = SIZE_MAX) {
  std::string s;
  for (std::size_t i = 0; i < v.size() && i < limit; ++i) s += (i ? " " : "") + std::to_string(v[i]);
  if (v.size() > limit) s += " ...";
  return s;
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

Ball parse_ball(const Space& space, const std::string& text) {
  SExpr e = parse_sexpr(text);
  if (!e.is_list() || e.size() != 3 || e.head() != "ball") throw ParseError("expected (ball POINT r), got " + text);
  Ball b{space.point_from_sexpr(e[1]), e[2].as_rational()};
  space.validate(b);
  return b;
}

// "(random)" and friends take the run seed.
std::string seeded_descriptor(const std::string& descriptor, const std::string& head, std::uint64_t seed) {
  SExpr e = parse_sexpr(descriptor);
  if (e.head() == head && (!e.is_list() || e.size() == 1)) return "(" + head + " " + std::to_string(seed) + ")";
  return descriptor;
}

PointSeq sequence_from(const Context& ctx, const Space& space, const IntervalWitness& w) {
  if (!ctx.has("seq")) return PointSeq::generated(space, w);
  return PointSeq::parse(space, ctx.get("seq"));
}

std::vector<Lscsm> axiom_families(const std::string& descriptor) {
  if (descriptor != "all") return {Lscsm::parse(descriptor)};
  return {Lscsm::counting(),         Lscsm::harmonic(),          Lscsm::geometric(Rational(1, 2)),
          Lscsm::upper_density(),    Lscsm::partition_dyadic(), Lscsm::partition_linear(2)};
}

std::string mass_text(const MassValue& m) {
  std::string s;
  if (m.exact) {
    s = m.upper->to_string() + " (exact)";
  } else {
    s = ">= " + m.lower.to_string() + " at horizon " + std::to_string(m.horizon);
    if (m.upper) s += ", <= " + m.upper->to_string();
    if (m.tail_evidence) s += ", tail evidence " + m.tail_evidence->to_string();
  }
  return s + "\n";
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot open " + path + " for writing");
  f << body;
}

// ---- handlers ------------------------------------------------------------------

Outcome cmd_set(Context& ctx) {
  SetExpr s = SetExpr::parse(ctx.get("set"));
  const CanonicalSet c = s.canonical().reduced();
  Outcome o;
  const Natural upto = ctx.natural("upto");
  const std::vector<Natural> members = c.members_upto(upto);
  o.result = {{"canonical", SetExpr::from_canonical(c).to_string()},
              {"finite", c.is_finite()},
              {"density", to_string(c.density())},
              {"threshold", c.threshold()},
              {"period", c.period()},
              {"members_upto", upto},
              {"members", members}};
  std::ostringstream t;
  t << "canonical: " << SetExpr::from_canonical(c).to_string() << "\n"
    << "density: " << to_string(c.density()) << "\n"
    << "finite: " << yes_no(c.is_finite()) << "\n"
    << "members <= " << upto << ": " << join(members, 200) << "\n";
  if (ctx.has("member")) {
    const Natural n = ctx.natural("member");
    o.result["member"] = {{"n", n}, {"contains", s.contains(n)}};
    t << n << (s.contains(n) ? " is" : " is not") << " a member\n";
  }
  o.text = t.str();
  return o;
}

Outcome cmd_phi(Context& ctx) {
  Lscsm phi = Lscsm::parse(ctx.get("phi"));
  SetExpr s = SetExpr::parse(ctx.get("set"));
  MassValue m = eval_phi(phi, s, ctx.horizon());
  Outcome o;
  o.result = m.to_json();
  o.text = "phi(S) " + mass_text(m);
  return o;
}

Outcome cmd_mass(Context& ctx) {
  Lscsm phi = Lscsm::parse(ctx.get("phi"));
  SetExpr s = SetExpr::parse(ctx.get("set"));
  MassValue m = mass_at_infinity(phi, s, ctx.horizon());
  Outcome o;
  o.result = m.to_json();
  o.text = "||S||_phi " + mass_text(m);
  if (m.exact) {
    const bool in_exh = *m.upper == Extended(Rational(0));
    o.result["in_exh"] = in_exh;
    o.text += std::string("in Exh(phi): ") + yes_no(in_exh) + "\n";
  }
  return o;
}

Outcome cmd_gap(Context& ctx) {
  GapFunction g = GapFunction::parse(ctx.get("gap"));
  const Natural count = ctx.natural("count");
  std::vector<Natural> values;
  for (Natural n = 0; n < count; ++n) values.push_back(g(n));
  Outcome o;
  o.result = {{"gap", g.to_string()}, {"values", values}};
  o.text = join(values) + "\n";
  return o;
}

Outcome intervals_outcome(const IntervalWitness& w, Natural count) {
  Outcome o;
  json list = json::array();
  std::string text;
  for (const Interval& iv : w.prefix(count)) {
    list.push_back({iv.lo, iv.hi});
    text += (text.empty() ? "" : " ") + iv.to_string();
  }
  o.result = {{"witness", w.to_string()}, {"intervals", list}};
  o.text = text + "\n";
  return o;
}

Outcome cmd_witness(Context& ctx) {
  IntervalWitness w = IntervalWitness::parse(ctx.get("witness"));
  Outcome o = intervals_outcome(w, ctx.natural("count"));
  if (ctx.has("set")) {
    SetExpr s = SetExpr::parse(ctx.get("set"));
    InfinitudeCertificate cert = certify_infinitude(w, s.canonical());
    o.result["certificate"] = cert.to_json();
    if (cert.certified) {
      o.text += "contains infinitely many I_k: " + yes_no(cert.contained_infinitely_often) + "\n";
      o.text += "meets infinitely many I_k: " + yes_no(cert.meets_infinitely_often) + "\n";
    } else {
      o.text += "infinitude not certified\n";
    }
  }
  return o;
}

Outcome cmd_gap_to_intervals(Context& ctx) {
  return intervals_outcome(gap_to_intervals(GapFunction::parse(ctx.get("gap"))), ctx.natural("count"));
}

Outcome cmd_check2(Context& ctx) {
  GapFunction g = GapFunction::parse(ctx.get("gap"));
  SetExpr a = SetExpr::parse(ctx.get("set"));
  ConditionCheckResult r = check_condition2(g, a, ctx.horizon());
  Outcome o;
  o.result = r.to_json();
  std::ostringstream t;
  t << "outcome: " << to_string(r.outcome) << "\n";
  if (r.holds()) t << "threshold n_A: " << r.threshold << "\n";
  t << "failures up to horizon: " << r.failure_count << "\n";
  if (r.fails_infinitely_often) t << "fails infinitely often: " << yes_no(*r.fails_infinitely_often) << "\n";
  if (!r.holds() && !r.witnesses.empty()) t << "witnesses: " << join(r.witnesses) << "\n";
  o.text = t.str();
  if (!r.holds()) o.status = kVerificationFailure;
  return o;
}

Outcome cmd_galpha(Context& ctx) {
  Lscsm phi = Lscsm::parse(ctx.get("phi"));
  const Rational alpha = ctx.rational("alpha");
  GapFunction g = gap_from_lscsm(phi, alpha);
  Outcome o;
  o.result = {{"phi", phi.to_string()}, {"alpha", to_string(alpha)}};
  if (ctx.has("n")) {
    const Natural n = ctx.natural("n");
    const Natural v = g(n);
    o.result["n"] = n;
    o.result["value"] = v;
    o.text = std::to_string(v) + "\n";
    return o;
  }
  if (!ctx.has("count")) throw UsageError("galpha needs --n or --count");
  std::vector<Natural> values;
  for (Natural n = 0; n < ctx.natural("count"); ++n) values.push_back(g(n));
  o.result["values"] = values;
  o.text = join(values) + "\n";
  return o;
}

Outcome cmd_verify_lscsm(Context& ctx) {
  Lscsm phi = Lscsm::parse(ctx.get("phi"));
  SetExpr a = SetExpr::parse(ctx.get("set"));
  LscsmVerification v = verify_prop_lscsm(phi, ctx.rational("alpha"), a, ctx.horizon());
  Outcome o;
  o.result = v.to_json();
  std::ostringstream t;
  t << "complement mass: " << v.complement_mass.to_string() << "\n"
    << "n_A: " << v.n_a << "\n"
    << "windows checked: " << v.windows_checked << "\n"
    << "minimum window mass: " << v.min_window_mass.to_string() << " at n = " << v.min_window_at << "\n"
    << "required: " << to_string(v.required) << "\n"
    << "failures: " << v.failures.size() << "\n";
  if (!v.ok()) t << "witnesses: " << join(v.failures, 1000) << "\n";
  o.text = t.str();
  if (!v.ok()) o.status = kVerificationFailure;
  return o;
}

Outcome cmd_generate(Context& ctx) {
  Space space = Space::parse(ctx.get("space"));
  IntervalWitness w = IntervalWitness::parse(ctx.get("witness"));
  PointSeq x = sequence_from(ctx, space, w);
  const Natural length = ctx.natural("length");
  std::ostringstream lines;
  x.write_jsonl(lines, length);
  Outcome o;
  o.result = {{"space", space.to_string()}, {"sequence", x.to_string()}, {"length", length}};
  if (ctx.has("output")) {
    write_file(ctx.get("output"), lines.str());
    o.result["output"] = ctx.get("output");
    o.text = "wrote " + std::to_string(length) + " points to " + ctx.get("output") + "\n";
  } else {
    o.text = lines.str();
  }
  return o;
}

std::string ball_line(const Space& space, const BallReport& b) {
  std::ostringstream t;
  t << "B(" << space.point_to_string(b.ball.center) << ", " << to_string(b.ball.radius) << "): hits " << b.hits
    << ", contained intervals " << b.contained << "/" << b.intervals_examined << ", promised " << b.promised_contained
    << "/" << b.promised << ", recurrence " << (b.recurrence_certified ? "certified" : "not certified") << ", "
    << (b.positive() ? "positive" : "not positive") << "\n";
  return t.str();
}

Outcome cmd_maldist(Context& ctx) {
  Space space = Space::parse(ctx.get("space"));
  IntervalWitness w = IntervalWitness::parse(ctx.get("witness"));
  PointSeq x = sequence_from(ctx, space, w);
  MaldistributionReport r = maldistribution_check(x, w, ctx.natural("grid"), ctx.horizon());
  Outcome o;
  o.result = r.to_json(space);
  for (const BallReport& b : r.balls) o.text += ball_line(space, b);
  o.text += "maldistributed on every grid ball: " + yes_no(r.all_positive()) + "\n";
  if (!r.all_positive()) o.status = kVerificationFailure;
  return o;
}

Outcome cmd_cluster(Context& ctx) {
  Space space = Space::parse(ctx.get("space"));
  IntervalWitness w = IntervalWitness::parse(ctx.get("witness"));
  PointSeq x = sequence_from(ctx, space, w);
  Point eta = space.parse_point(ctx.get("eta"));
  ClusterReport r = cluster_point_report(x, eta, w, ctx.horizon());
  Outcome o;
  o.result = r.to_json(space);
  for (const BallReport& b : r.radii) o.text += ball_line(space, b);
  o.text += "cluster point evidence: " + yes_no(r.positive_evidence()) + "\n";
  if (!r.positive_evidence()) o.status = kVerificationFailure;
  return o;
}

Outcome cmd_bm_play(Context& ctx) {
  Space space = Space::parse(ctx.get("space"));
  IntervalWitness w = IntervalWitness::parse(ctx.get("witness"));
  Point eta = space.parse_point(ctx.get("eta"));
  std::unique_ptr<BMAdversary> adversary =
      ctx.flags.at("interactive") ? bm_interactive(ctx.in, ctx.out)
                                  : make_bm_adversary(seeded_descriptor(ctx.get("adversary"), "random", ctx.seed));
  BMResult r = bm_play(space, w, eta, *adversary, ctx.natural("rounds"));
  BMInvariantCheck check = check_bm_invariants(space, w, eta, r);
  Outcome o;
  o.result = r.to_json(space);
  o.result["invariant_violations"] = check.violations;
  o.result["violation_details"] = check.details;
  if (ctx.has("transcript")) {
    std::ostringstream tr;
    r.write_transcript(tr, space);
    write_file(ctx.get("transcript"), tr.str());
  }
  std::ostringstream t;
  for (const BMRound& round : r.state.rounds) {
    const Interval iv = w.at(round.j);
    t << "round " << round.round << ": kappa " << round.kappa << ", j " << round.j << ", I_j " << iv.to_string()
      << " pinned within 2^-" << round.round << " of eta\n";
  }
  t << "invariant violations: " << check.violations << "\n";
  for (const std::string& d : check.details) t << "  " << d << "\n";
  o.text = t.str();
  if (!check.ok()) o.status = kVerificationFailure;
  return o;
}

struct LaflammeRun {
  Space space;
  IntervalWitness witness;
  LaflammeResult result;
  LaflammeInvariantCheck check;
};

LaflammeRun run_laflamme(Context& ctx) {
  Space space = Space::parse(ctx.get("space"));
  IntervalWitness w = IntervalWitness::parse(ctx.get("witness"));
  DenseOpenFamily family(space, w, space.parse_point(ctx.get("eta")));
  Ball u = parse_ball(space, ctx.get("u"));
  Ball v = parse_ball(space, ctx.get("v"));
  std::unique_ptr<LaflammeAdversary> adversary =
      ctx.flags.at("interactive")
          ? laflamme_interactive(ctx.in, ctx.out)
          : make_laflamme_adversary(seeded_descriptor(ctx.get("adversary"), "random-threshold", ctx.seed));
  LaflammeResult r = laflamme_play(family, u, v, *adversary, ctx.natural("rounds"));
  LaflammeInvariantCheck check = check_laflamme_invariants(family, r);
  if (ctx.has("transcript")) {
    std::ostringstream tr;
    r.write_transcript(tr, space);
    write_file(ctx.get("transcript"), tr.str());
  }
  return {space, w, std::move(r), std::move(check)};
}

Outcome cmd_laflamme_play(Context& ctx) {
  LaflammeRun run = run_laflamme(ctx);
  Outcome o;
  o.result = run.result.to_json(run.space);
  o.result["invariant_violations"] = run.check.violations;
  o.result["violation_details"] = run.check.details;
  o.result["rounds_with_full_pinned_interval"] = run.check.rounds_with_full_pinned_interval;
  std::ostringstream t;
  for (const LaflammeRound& r : run.result.state.rounds) {
    t << "round " << r.round << ": c " << r.c << ", pinned " << r.pinned.to_string() << ", m(B) " << r.b.support()
      << ", |F| " << r.f.size();
    if (!r.f.empty()) t << ", F in [" << r.f.front() << "," << r.f.back() << "]";
    t << "\n";
  }
  t << "invariant violations: " << run.check.violations << "\n";
  for (const std::string& d : run.check.details) t << "  " << d << "\n";
  o.text = t.str();
  if (!run.check.ok()) o.status = kVerificationFailure;
  return o;
}

Outcome cmd_adjudicate(Context& ctx) {
  LaflammeRun run = run_laflamme(ctx);
  const std::string oracle_text =
      ctx.has("oracle") ? ctx.get("oracle") : "(diffuse witness " + run.witness.to_string() + ")";
  PositivityOracle oracle = parse_oracle(oracle_text);
  AdjudicationReport rep = adjudicate_laflamme(run.result, run.space, oracle);
  Outcome o;
  o.result = rep.to_json();
  o.result["invariant_violations"] = run.check.violations;
  std::ostringstream t;
  t << "rounds: " << rep.rounds << ", decided coordinates 0.." << rep.decided << "\n"
    << "|union F|: " << rep.union_f.size() << ", |hitting set of u|: " << rep.hitting.size() << "\n"
    << "union F equals the hitting set: " << yes_no(rep.sets_equal) << "\n"
    << "rounds with the pinned interval inside union F: " << rep.pinned_contained << "\n"
    << "oracle " << rep.oracle << " on the finite union: "
    << (rep.finite_union.value ? rep.finite_union.value->to_string() : std::string("undecided")) << "\n";
  o.text = t.str();
  if (!rep.sets_equal || !run.check.ok()) o.status = kVerificationFailure;
  return o;
}

Outcome cmd_axioms(Context& ctx) {
  Outcome o;
  o.result = json::array();
  const Natural samples = ctx.natural("samples");
  const Natural horizon = ctx.horizon();
  bool ok = true;
  for (const Lscsm& phi : axiom_families(ctx.get("phi"))) {
    AxiomReport r = check_submeasure_axioms(phi, samples, horizon, ctx.seed);
    o.result.push_back(r.to_json());
    o.text += phi.to_string() + ": " + std::to_string(r.checks) + " checks, " + std::to_string(r.violations.size()) +
              " violations\n";
    for (std::size_t i = 0; i < r.violations.size() && i < 5; ++i) {
      const AxiomViolation& v = r.violations[i];
      o.text += "  " + v.axiom + ": " + v.a + " / " + v.b + " " + v.detail + "\n";
    }
    ok = ok && r.ok();
  }
  if (!ok) o.status = kVerificationFailure;
  return o;
}

const std::vector<Command>& commands() {
  static const std::vector<OptionSpec> game_options = {
      {"space", "(cube 1)", "metric space"},
      {"witness", "(witness dyadic)", "interval witness"},
      {"eta", "", "target point"},
      {"rounds", "", "number of rounds"},
      {"transcript", "", "JSON-lines transcript path"},
  };
  auto with = [](std::vector<OptionSpec> base, std::vector<OptionSpec> extra) {
    base.insert(base.end(), extra.begin(), extra.end());
    return base;
  };
  static const std::vector<Command> all = {
      {"set", "normalize a set expression", {{"set", "", "set expression"}, {"upto", "20", "list members up to n"},
                                             {"member", "", "membership query"}}, {}, cmd_set},
      {"phi", "evaluate a submeasure", {{"phi", "", "submeasure"}, {"set", "", "set expression"},
                                        {"horizon", "100000", "truncation horizon"}}, {}, cmd_phi},
      {"mass", "mass at infinity", {{"phi", "", "submeasure"}, {"set", "", "set expression"},
                                    {"horizon", "100000", "evidence horizon"}}, {}, cmd_mass},
      {"gap", "tabulate a gap function", {{"gap", "", "gap function"}, {"count", "10", "values g(0..count-1)"}}, {},
       cmd_gap},
      {"witness", "list witness intervals", {{"witness", "", "interval witness"}, {"count", "10", "intervals"},
                                             {"set", "", "certify infinitely many I_k inside this set"}}, {},
       cmd_witness},
      {"gap-to-intervals", "intervals derived from a gap function",
       {{"gap", "", "gap function"}, {"count", "10", "intervals"}}, {}, cmd_gap_to_intervals},
      {"check2", "window condition of a gap function on a set",
       {{"gap", "", "gap function"}, {"set", "", "set expression"}, {"horizon", "10000", "scan horizon"}}, {},
       cmd_check2},
      {"galpha", "gap function of a submeasure", {{"phi", "", "submeasure"}, {"alpha", "", "alpha in (0,1)"},
                                                  {"n", "", "single argument"}, {"count", "", "values g(0..count-1)"}},
       {}, cmd_galpha},
      {"verify-lscsm", "window masses of a large set",
       {{"phi", "", "submeasure"}, {"alpha", "", "alpha in (0,1)"}, {"set", "", "set expression"},
        {"horizon", "10000", "scan horizon"}}, {}, cmd_verify_lscsm},
      {"generate", "materialize a point sequence",
       {{"space", "(cube 1)", "metric space"}, {"witness", "(witness dyadic)", "interval witness"},
        {"seq", "", "sequence (default: generated from the witness)"}, {"length", "64", "number of points"},
        {"output", "", "JSON-lines output path (default: stdout)"}}, {}, cmd_generate},
      {"maldist", "maldistribution check on a ball grid",
       {{"space", "(cube 1)", "metric space"}, {"witness", "(witness dyadic)", "interval witness"},
        {"seq", "", "sequence (default: generated from the witness)"}, {"grid", "4", "grid resolution"},
        {"horizon", "65536", "horizon"}}, {}, cmd_maldist},
      {"cluster", "cluster point evidence",
       {{"space", "(cube 1)", "metric space"}, {"witness", "(witness dyadic)", "interval witness"},
        {"seq", "", "sequence (default: generated from the witness)"}, {"eta", "", "point"},
        {"horizon", "65536", "horizon"}}, {}, cmd_cluster},
      {"bm-play", "Banach-Mazur game",
       with(game_options, {{"adversary", "(random)", "Player I"}}), {"interactive"}, cmd_bm_play},
      {"laflamme-play", "Laflamme game",
       with(game_options, {{"adversary", "(gap-step 2)", "Player I"}, {"u", "", "ball around eta"},
                           {"v", "", "ball disjoint from u"}}), {"interactive"}, cmd_laflamme_play},
      {"adjudicate", "play the Laflamme game and adjudicate the outcome",
       with(game_options, {{"adversary", "(gap-step 2)", "Player I"}, {"u", "", "ball around eta"},
                           {"v", "", "ball disjoint from u"}, {"oracle", "", "positivity oracle"}}),
       {"interactive"}, cmd_adjudicate},
      {"axioms", "randomized submeasure axiom check",
       {{"phi", "all", "submeasure, or all"}, {"samples", "500", "sampled pairs"}, {"horizon", "1000", "horizon"}}, {},
       cmd_axioms},
  };
  return all;
}

// key = value lines; '#' starts a comment.
std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read config file " + path);
  std::map<std::string, std::string> out;
  std::string line;
  int number = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
  };
  while (std::getline(f, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(number) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    out[key] = value;
  }
  return out;
}

bool truthy(const std::string& v) { return v == "true" || v == "1" || v == "yes" || v == "on"; }

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::istream& in) {
  CLI::App app{"Maldistributed sequences, submeasures and their games"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every subcommand");

  struct Bound {
    const Command* command;
    CLI::App* app;
    std::map<std::string, std::string> values;
    std::map<std::string, bool> flags;
    std::string config;
    std::string seed = "0";
    bool json = false;
    std::string report;
  };
  std::vector<std::unique_ptr<Bound>> bound;
  for (const Command& c : commands()) {
    auto b = std::make_unique<Bound>();
    b->command = &c;
    b->app = app.add_subcommand(c.name, c.description);
    for (const OptionSpec& o : c.options) {
      b->values[o.key] = o.fallback;
      auto* opt = b->app->add_option("--" + o.key, b->values[o.key], o.help);
      if (!o.fallback.empty()) opt->capture_default_str();
    }
    for (const std::string& f : c.flags) {
      b->flags[f] = false;
      b->app->add_flag("--" + f, b->flags[f]);
    }
    b->app->add_option("--config", b->config, "key = value config file");
    b->app->add_option("--seed", b->seed, "seed for every random choice")->capture_default_str();
    b->app->add_flag("--json", b->json, "print the JSON report");
    b->app->add_option("--report", b->report, "write the JSON report to a file");
    bound.push_back(std::move(b));
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n\n" << grammar_reference();
    return kUsageError;
  }

  Bound* chosen = nullptr;
  for (auto& b : bound) {
    if (b->app->parsed()) chosen = b.get();
  }
  if (!chosen) {
    err << "usage error: no subcommand\n\n" << grammar_reference();
    return kUsageError;
  }

  const Command& command = *chosen->command;
  try {
    if (!chosen->config.empty()) {
      for (const auto& [key, value] : read_config(chosen->config)) {
        const CLI::Option* opt = chosen->app->get_option_no_throw("--" + key);
        const bool given = opt != nullptr && opt->count() > 0;
        if (chosen->values.count(key)) {
          if (!given) chosen->values[key] = value;
        } else if (chosen->flags.count(key)) {
          if (!given) chosen->flags[key] = truthy(value);
        } else if (key == "seed") {
          if (!given) chosen->seed = value;
        } else if (key == "json") {
          if (!given) chosen->json = truthy(value);
        } else if (key == "report") {
          if (!given) chosen->report = value;
        } else {
          throw UsageError("unknown config key '" + key + "' for " + command.name);
        }
      }
    }
    Context ctx{chosen->values, chosen->flags, 0, out, in};
    try {
      ctx.seed = parse_sexpr(chosen->seed).as_natural();
    } catch (const ParseError&) {
      throw UsageError("--seed expects a natural number");
    }

    Outcome o = command.run(ctx);

    json config = json::object();
    for (const auto& [key, value] : ctx.values) config[key] = value;
    for (const auto& [key, value] : ctx.flags) config[key] = value;
    config["seed"] = ctx.seed;
    json report = {{"command", command.name},
                   {"config", config},
                   {"seed", ctx.seed},
                   {"status", o.status == kOk ? "ok" : "verification-failure"},
                   {"result", o.result}};
    const std::string body = report.dump(2) + "\n";
    if (!chosen->report.empty()) write_file(chosen->report, body);
    out << (chosen->json ? body : o.text);
    return o.status;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n\n" << grammar_reference();
    return kUsageError;
  } catch (const ParseError& e) {
    err << "config error: " << e.what() << "\n\n" << grammar_reference();
    return kUsageError;
  } catch (const InvalidArgument& e) {
    err << "config error: " << e.what() << "\n";
    return kUsageError;
  } catch (const IllegalAdversaryMove& e) {
    err << "illegal move: " << e.what() << "\n";
    return kUsageError;
  } catch (const IllegalMove& e) {
    err << "illegal move: " << e.what() << "\n";
    return kUsageError;
  } catch (const NoFiniteWitness& e) {
    err << "verification failure: " << e.what() << "\n";
    return kVerificationFailure;
  } catch (const Error& e) {
    err << "verification failure: " << e.what() << "\n";
    return kVerificationFailure;
  }
}

}  // namespace

const std::string& grammar_reference() {
  static const std::string text = R"(Grammar reference

Sets:        (empty) (full) (fin n...) (iv a b) (ap a d) (tail a)
             (union s...) (inter s...) (not s) (edit s n...)
             (periodic t p (r...) ((lo hi)...))
Submeasures: counting | harmonic | (geometric r) | upper-density
             (partition dyadic) | (partition linear c) | (table v0 v1 ...) | (cap c PHI)
Gaps:        (affine a b) | (const c) | (gap table (v0 ...) (affine a b))
Witnesses:   (witness dyadic) | (witness unit) | (witness linear s b L) | (witness gap G)
             (witness table (lo hi)... [(extend G)])
Spaces:      (cube d) | (discrete m)
Points:      (c1 ... cd) for cubes, an index for discrete spaces
Balls:       (ball POINT r)
Cylinders:   (cylinder (ball i POINT r) ...)
Sequences:   (seq generated W) | (seq constant POINT) | (seq enumeration) | (seq explicit POINT...)
Oracles:     (diffuse mass PHI) | (diffuse witness W) | (density-above q)
Targets:     a set, or (blocks W INDEX-SET)
Adversaries: Banach-Mazur (pass) | (pin-far) | (random [seed])
             Laflamme     (gap-step s) | (fixed c...) | (random-threshold [seed])
Rationals:   p/q or integers; no floating point.
Config file: one "key = value" per line, keys are option names without "--", '#' comments.
Exit codes:  0 success, 1 verification failure, 2 usage or config error.
)";
  return text;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::istream& in) {
  return dispatch(args, out, err, in);
}

}  // namespace maldist
