#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sqg/document.hpp"

using namespace sqg;

TEST_CASE("parsing") {
  SUBCASE("abelian and square declarations") {
    SqDocument doc = parse_document("abelian A = [2,3]\nsquare M = atensor A\n");
    CHECK(doc.abelian("A").invariant_factors() == Vec{6});
    CHECK(doc.square("M").ee().invariant_factors() == Vec{6, 6});
  }
  SUBCASE("znil_set braces") {
    SqDocument doc = parse_document("square M = znil_set{s,t}\n");
    CHECK(doc.square("M").ee().invariant_factors() == FgAbelianGroup::free(4).invariant_factors());
  }
  SUBCASE("comments and blank lines") {
    SqDocument doc = parse_document("# a comment\n\nabelian A = [4]\n");
    CHECK(doc.abelian("A").invariant_factors() == Vec{4});
  }
  SUBCASE("unresolved reference names the identifier") {
    CHECK_THROWS_WITH_AS(parse_document("square M = atensor B\n"),
                         doctest::Contains("unresolved reference B"), SqgError);
  }
  SUBCASE("syntax error carries the line number") {
    CHECK_THROWS_WITH_AS(parse_document("abelian A = [2]\nbogus line\n"),
                         doctest::Contains("line 2"), SqgError);
  }
  SUBCASE("round trip") {
    std::string text = "abelian A = [2,3]\nsquare M = atensor A\nsquare N = znil_set{s,t}\n";
    SqDocument doc = parse_document(text);
    CHECK(emit_document(doc) == text);
    SqDocument again = parse_document(emit_document(doc));
    CHECK(emit_document(again) == text);
  }
}

TEST_CASE("commands") {
  SqDocument doc;
  SUBCASE("invariants znil") {
    Report r = run_command({"invariants", "znil"}, doc);
    CHECK(r.ok());
    bool has_t = false, has_k = false, sigma_member = false;
    for (const auto& c : r.checks) {
      if (c.name.find("T matrix = [[-1]]") != std::string::npos) has_t = true;
      if (c.name.find("k nonzero = yes") != std::string::npos) has_k = true;
      if (c.name.find("SG_Sigma member = yes") != std::string::npos) sigma_member = true;
    }
    CHECK(has_t);
    CHECK(has_k);
    CHECK(sigma_member);
  }
  SUBCASE("coherence pentagon on units") {
    CHECK(run_command({"coherence", "--pentagon", "znil", "znil", "znil", "znil"}, doc).ok());
  }
  SUBCASE("homotopy znil --max 3") {
    Report r = run_command({"homotopy", "znil", "--max", "3"}, doc);
    CHECK(r.ok());
    std::string all;
    for (const auto& c : r.checks) all += c.name + "\n";
    CHECK(all.find("pi_0 = Z^1") != std::string::npos);
    CHECK(all.find("pi_1 = Z/2") != std::string::npos);
    CHECK(all.find("pi_2 = 0") != std::string::npos);
    CHECK(all.find("pi_3 = Z/2") != std::string::npos);
  }
  SUBCASE("tensor over document objects") {
    SqDocument d2 = parse_document("abelian A = [4]\nabelian B = [6]\n"
                                   "square M = from_abelian A\nsquare N = from_abelian B\n");
    Report r = run_command({"tensor", "M", "N"}, d2);
    CHECK(r.ok());
    CHECK(r.checks[0].name.find("Z/2") != std::string::npos);
  }
  SUBCASE("unknown subcommand fails") {
    CHECK(!run_command({"bogus"}, doc).ok());
  }
}

TEST_CASE("reports") {
  Report r;
  r.pass("alpha");
  r.skip("beta", "not computable here");
  SUBCASE("text format") {
    std::string t = emit_report_text(r);
    CHECK(t.find("pass  alpha") != std::string::npos);
    CHECK(t.find("skip  beta") != std::string::npos);
    CHECK(t.find("RESULT: pass") != std::string::npos);
  }
  SUBCASE("machine format is deterministic and mirrors the report") {
    std::string a = emit_report_machine(r);
    std::string b = emit_report_machine(r);
    CHECK(a == b);
    CHECK(a.find("\"schema\": \"sqgroups-report/1\"") != std::string::npos);
    CHECK(a.find("\"status\": \"skip\"") != std::string::npos);
  }
  SUBCASE("failures flip ok") {
    r.fail("gamma", "witness");
    CHECK(!r.ok());
    CHECK(emit_report_text(r).find("RESULT: FAIL") != std::string::npos);
  }
}
