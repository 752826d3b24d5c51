// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "wwwstory/analysis.hpp"
#include "wwwstory/errors.hpp"
#include "wwwstory/index.hpp"
#include "wwwstory/measures.hpp"
#include "wwwstory/providers.hpp"
#include "wwwstory/quantum.hpp"

using namespace wwwstory;
namespace q = wwwstory::quantum;

namespace {

std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(WWWSTORY_FIXTURE_DIR) / name; }

// Collects failures for one criterion.
struct Check {
  std::vector<std::string> failures;

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void rel(double actual, double printed, const std::string& name, double tol = 0.01) {
    double err = std::abs(actual - printed) / std::abs(printed);
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s = %.6g, expected %.3g (rel err %.2g)", name.c_str(), actual, printed, err);
    expect(err <= tol, buf);
  }
  void exact(double actual, double expected, const std::string& name) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s = %.17g, expected %.17g", name.c_str(), actual, expected);
    expect(actual == expected, buf);
  }
};

int failed_criteria = 0;

void run(int number, const char* title, double limit_seconds, const std::function<std::string(Check&)>& body) {
  Check check;
  std::string summary;
  auto start = std::chrono::steady_clock::now();
  try {
    summary = body(check);
  } catch (const std::exception& e) {
    check.failures.push_back(std::string("exception: ") + e.what());
  }
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (seconds > limit_seconds) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "runtime %.3f s exceeds %.0f s", seconds, limit_seconds);
    check.failures.push_back(buf);
  }
  bool pass = check.failures.empty();
  if (!pass) ++failed_criteria;
  std::printf("%s criterion %d (%s): %.3f s%s%s\n", pass ? "PASS" : "FAIL", number, title, seconds,
              summary.empty() ? "" : "; ", summary.c_str());
  for (const auto& f : check.failures) std::printf("    %s\n", f.c_str());
  std::fflush(stdout);
}

// Corpus of `docs` documents over background words, with a planted triad:
// "alpha beta" phrase documents always carry "gamma", and at least one
// alpha-only and one beta-only document lacks it.
std::vector<Document> planted_corpus(std::mt19937_64& rng, int docs) {
  std::uniform_int_distribution<int> word(0, 39), len(3, 15);
  std::bernoulli_distribution coin(0.25);
  auto background = [&] {
    std::string text;
    for (int i = len(rng); i > 0; --i) text += "w" + std::to_string(word(rng)) + " ";
    return text;
  };
  const int phrase_docs = std::max(1, docs / 10);
  std::vector<Document> out;
  for (int d = 0; d < docs; ++d) {
    std::string text = background();
    if (d < phrase_docs) {
      text += "alpha beta " + background() + " gamma";
    } else if (d == phrase_docs) {
      text += "alpha";
    } else if (d == phrase_docs + 1) {
      text += "beta";
    } else {
      // scattered occurrences that never form the phrase
      if (coin(rng)) text = "alpha " + text;
      if (coin(rng)) text += " beta";
      if (coin(rng)) text += " gamma";
    }
    out.push_back({"d" + std::to_string(d), text, {}});
  }
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");

  run(1, "Pet-Fish reproduction", 1.0, [](Check& c) {
    auto provider = RecordedProvider::load(fixture("petfish-2016.jsonl"));
    auto a = analyze_triad(provider, "pet", "fish", "guppy", {"pet", "fish"});
    c.expect(a.ee && a.oe && a.dominance, "all analysis blocks defined");
    if (!(a.ee && a.oe && a.dominance)) return std::string();
    c.rel(a.ee->p_c_given_ab, 2.22e-1, "p(G|PF)");
    c.rel(a.ee->p_c_given_a, 8.57e-4, "p(G|P)");
    c.rel(a.ee->p_c_given_b, 9.75e-4, "p(G|F)");
    c.rel(a.ee->ratio_vs_a, 2.59e2, "p(G|PF)/p(G|P)");
    c.rel(a.ee->ratio_vs_b, 2.28e2, "p(G|PF)/p(G|F)");
    c.rel(a.oe->p_c_a_then_b, 9.38e-4, "p(G|P then F)");
    c.rel(a.oe->p_c_b_then_a, 8.31e-4, "p(G|F then P)");
    c.rel(a.oe->ratio_a_then_b_vs_a, 1.09, "p(G|P then F)/p(G|P)");
    c.rel(a.dominance->direct, 2.37e2, "dominance direct");
    c.rel(a.dominance->factor1, 2.94e1, "factor1");
    c.rel(a.dominance->factor2, 8.34, "factor2");
    c.rel(a.dominance->decomposed, 2.46e2, "decomposed");
    c.expect(a.ee_class() == FallacyClass::double_fallacy, "EE class double");
    char buf[128];
    std::snprintf(buf, sizeof buf, "EE %s, OE %s, direct %.4g vs decomposed %.4g", to_string(a.ee_class()).c_str(),
                  to_string(a.oe_class()).c_str(), a.dominance->direct, a.dominance->decomposed);
    return std::string(buf);
  });

  run(2, "Linda reproduction", 1.0, [](Check& c) {
    auto provider = RecordedProvider::load(fixture("linda-2016.jsonl"));
    auto a = analyze_triad(provider, "bank", "feminism", "justice", {"bank", "feminism"});
    c.expect(a.ee && a.oe && a.dominance, "all analysis blocks defined");
    if (!(a.ee && a.oe && a.dominance)) return std::string();
    c.rel(a.ee->p_c_given_ab, 4.12e-1, "p(J|BF)");
    c.rel(a.ee->p_c_given_a, 8.94e-2, "p(J|B)");
    c.rel(a.ee->p_c_given_b, 2.53e-1, "p(J|F)");
    c.rel(a.ee->ratio_vs_a, 4.61, "p(J|BF)/p(J|B)");
    c.rel(a.ee->ratio_vs_b, 1.63, "p(J|BF)/p(J|F)");
    c.expect(a.ee_class() == FallacyClass::double_fallacy, "EE double fallacy");
    c.rel(a.oe->p_c_a_then_b, 6.30e-4, "p(J|B then F)");
    c.rel(a.oe->p_c_b_then_a, 2.88e-2, "p(J|F then B)");
    c.expect(a.oe->class_a_then_b == FallacyClass::none && a.oe->class_b_then_a == FallacyClass::none,
             "no OE overextension in either order");
    c.rel(a.dominance->factor1, 5.91e-1, "factor1");
    c.rel(a.dominance->factor2, 1.11e3, "factor2");
    c.rel(a.dominance->decomposed, 6.55e2, "decomposed");
    c.rel(a.dominance->direct, 6.54e2, "dominance direct");
    char buf[128];
    std::snprintf(buf, sizeof buf, "EE %s, OE %s/%s, direct %.4g vs decomposed %.4g",
                  to_string(a.ee_class()).c_str(), to_string(a.oe->class_a_then_b).c_str(),
                  to_string(a.oe->class_b_then_a).c_str(), a.dominance->direct, a.dominance->decomposed);
    return std::string(buf);
  });

  run(3, "OE no-double-fallacy theorem", 10.0, [](Check& c) {
    std::mt19937_64 rng(20161119);
    const int samples = 5000;
    double max_gap = -1, max_residual = 0;
    for (int i = 0; i < samples; ++i) {
      auto model = q::random_oe_model(rng, 2, 6);
      auto p = q::oe_forward(model);
      max_gap = std::max({max_gap, p.p_a_then_b - p.p_a, p.p_b_then_a - p.p_b});
      max_residual = std::max(max_residual, p.identity_residual);
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d models, max p(A then B) - p(A) = %.3g, max identity residual = %.3g", samples,
                  max_gap, max_residual);
    c.expect(max_gap <= 1e-9, buf);
    c.expect(max_residual <= 1e-9, buf);
    return std::string(buf);
  });

  run(4, "EE model properties", 30.0, [](Check& c) {
    std::mt19937_64 rng(31);
    const int samples = 5000;
    double max_identity = 0, max_excess = -1;
    for (int i = 0; i < samples; ++i) {
      auto p = q::ee_forward(q::random_ee_model(rng, 2, 6));
      max_identity = std::max(max_identity, std::abs(p.p_a_and_b - 0.5 * (p.p_a + p.p_b) - p.interference));
      max_excess = std::max(max_excess, std::abs(p.interference) - q::ee_feasible_interference_bound(p.p_a, p.p_b));
    }
    c.expect(max_identity <= 1e-9, "superposition identity residual too large");
    c.expect(max_excess <= 1e-9, "interference above the feasibility bound");

    std::uniform_real_distribution<double> u(0, 1), s(-1, 1);
    double max_fit = 0;
    int fits = 0;
    while (fits < 100) {
      double pa = u(rng), pb = u(rng);
      double pab = 0.5 * (pa + pb) + s(rng) * q::ee_feasible_interference_bound(pa, pb);
      if (pab < 0 || pab > 1) continue;
      auto fit = q::ee_fit(pa, pb, pab, 3, rng);
      ++fits;
      if (fit.status != q::FitStatus::feasible) {
        c.expect(false, "feasible target reported infeasible");
        continue;
      }
      auto p = q::ee_forward(*fit.model);
      max_fit = std::max({max_fit, std::abs(p.p_a - pa), std::abs(p.p_b - pb), std::abs(p.p_a_and_b - pab)});
    }
    c.expect(max_fit <= 1e-6, "fit round-trip residual above 1e-6");
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "%d models, max identity residual %.3g, max bound excess %.3g; %d fits, max round-trip error %.3g",
                  samples, max_identity, max_excess, fits, max_fit);
    return std::string(buf);
  });

  run(5, "count-level structural theorem", 60.0, [](Check& c) {
    std::mt19937_64 rng(5150);
    std::uniform_int_distribution<int> size(10, 500), word(0, 39);
    int triads = 0, double_oe = 0, planted_double_ee = 0, exact = 0, dominance_checked = 0;
    for (int corpus_no = 0; corpus_no < 200; ++corpus_no) {
      auto corpus = planted_corpus(rng, size(rng));
      LocalProvider provider(std::make_shared<const Index>(Index::build(corpus)));
      auto check_triad = [&](const std::string& a, const std::string& b, const std::string& cc, bool planted) {
        auto an = analyze_triad(provider, a, b, cc, {a, b});
        ++triads;
        c.expect(an.consistency.all_satisfied(), "local audit failed");
        if (an.oe) {
          bool ab = an.oe->ratio_a_then_b_vs_a > 1 && an.oe->ratio_a_then_b_vs_b > 1;
          bool ba = an.oe->ratio_b_then_a_vs_a > 1 && an.oe->ratio_b_then_a_vs_b > 1;
          if (ab || ba || an.oe_class() == FallacyClass::double_fallacy) ++double_oe;
        }
        if (planted) {
          if (an.ee_class() == FallacyClass::double_fallacy) ++planted_double_ee;
        }
        if (an.dominance) {
          ++dominance_checked;
          if (an.dominance->exact_agreement == true) ++exact;
        }
      };
      check_triad("alpha", "beta", "gamma", true);
      for (int extra = 0; extra < 3; ++extra) {
        std::string a = "w" + std::to_string(word(rng)), b = "w" + std::to_string(word(rng)),
                    cc = "w" + std::to_string(word(rng));
        if (a == b) continue;
        check_triad(a, b, cc, false);
      }
    }
    c.expect(double_oe == 0, "a triad showed double OE overextension");
    c.expect(planted_double_ee == 200, "a planted triad failed to show EE double overextension");
    c.expect(exact == dominance_checked, "direct != factor1 * factor2 as exact rationals");
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "%d triads on 200 corpora: %d double OE, %d/200 planted EE double, %d/%d exact decompositions",
                  triads, double_oe, planted_double_ee, exact, dominance_checked);
    return std::string(buf);
  });

  run(6, "TOY10 oracle", 5.0, [](Check& c) {
    auto index = std::make_shared<const Index>(Index::build(read_corpus(fixture("toy10.jsonl"))));
    LocalProvider provider(index);
    auto k = get_triad_counts(provider, "A", "B", "C", {"A", "B"});
    c.exact(*k.n_W, 10, "n_W");
    c.exact(k.n_A, 5, "n_A");
    c.exact(k.n_B, 4, "n_B");
    c.exact(k.n_C, 3, "n_C");
    c.exact(k.n_A_B, 2, "n_A_B");
    c.exact(k.n_A_C, 2, "n_A_C");
    c.exact(k.n_B_C, 2, "n_B_C");
    c.exact(k.n_A_B_C, 2, "n_A_B_C");
    c.exact(k.n_AB, 1, "n_AB");
    c.exact(k.n_AB_C, 1, "n_AB_C");
    c.exact(k.n_A_notB, 3, "n_A_notB");
    c.expect(index->matching_docs(Query::phrase({"a", "b"})) == std::vector<std::string>{"d4"}, "Phrase(A,B) = {d4}");
    c.expect(index->matching_docs(Query::all_of({Query::term("a"), Query::term("c")})) ==
                 std::vector<std::string>{"d4", "d5"},
             "And(A,C) = {d4,d5}");

    auto a = analyze_counts(k);
    c.expect(a.consistency.all_satisfied(), "audit");
    c.exact(landing_probability(k.n_A, *k.n_W).value, 0.5, "p(A)");
    c.exact(a.ee->p_c_given_ab, 1.0, "p(C|AB)");
    c.exact(a.ee->ratio_vs_a, 2.5, "EE ratio vs A");
    c.exact(a.ee->ratio_vs_b, 2.0, "EE ratio vs B");
    c.expect(a.ee_class() == FallacyClass::double_fallacy, "EE double");
    c.exact(a.oe->p_c_a_then_b, 0.4, "p(C|A then B)");
    c.exact(a.oe->p_c_given_a, 0.4, "p(C|A)");
    c.exact(a.oe->p_c_given_b, 0.5, "p(C|B)");
    c.expect(a.oe_class() == FallacyClass::none, "OE none");
    c.exact(a.dominance->direct, 2.5, "dominance direct");
    c.exact(a.dominance->factor1, 1.0, "factor1");
    c.exact(a.dominance->factor2, 2.5, "factor2");
    c.exact(a.dominance->decomposed, 2.5, "decomposed");
    c.expect(a.dominance->exact_agreement == true, "exact decomposition");

    auto ab = meaning_bond(k.n_A_B, k.n_A, k.n_B, k.n_W);
    c.exact(ab.value, 1.0, "M(A,B)");
    c.expect(ab.classification == BondClass::neutral, "M(A,B) neutral");
    auto ac = meaning_bond(k.n_A_C, k.n_A, k.n_C, k.n_W);
    c.exact(ac.value, 20.0 / 15.0, "M(A,C)");
    c.expect(ac.classification == BondClass::attractive, "M(A,C) attractive");
    auto joint = meaning_bond_joint(k.n_A_B_C, k.n_A_B, k.n_C, k.n_W);
    c.exact(joint.value, 20.0 / 6.0, "M(C;A,B)");
    return std::string("counts, ratios, dominance and bonds exact");
  });

  std::printf("%s: %d of 6 criteria failed\n", failed_criteria ? "FAILED" : "OK", failed_criteria);
  return failed_criteria ? 1 : 0;
}
