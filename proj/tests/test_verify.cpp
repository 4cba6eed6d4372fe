#include <catch2/catch_amalgamated.hpp>

#include "mintime/verify.hpp"

using namespace mintime;

namespace {

VerifyRun run_selector(const std::string& csv) {
  return run_verify_suites(all_bundled_scenes(), SuiteSelector(csv));
}

void require_all_pass(const VerifyRun& run) {
  REQUIRE_FALSE(run.checks.empty());
  for (const auto& c : run.checks) {
    INFO(c.tag << ": " << c.detail);
    CHECK(c.pass);
  }
  CHECK(run.ok());
}

size_t count_tag(const VerifyRun& run, const std::string& tag) {
  size_t n = 0;
  for (const auto& c : run.checks) {
    if (c.tag == tag) ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("suite selector matches whole tags and tag segments") {
  const SuiteSelector all("all");
  CHECK(all.wants("golden-5.3/time"));
  CHECK(all.wants("anything/at-all"));

  const SuiteSelector seg("prop-3.6");
  CHECK(seg.wants("sec3/prop-3.6"));
  CHECK_FALSE(seg.wants("sec3/prop-3.1"));

  const SuiteSelector suite("golden-5.3");
  CHECK(suite.wants("golden-5.3/basic"));
  CHECK_FALSE(suite.wants("golden-6.4/basic"));

  const SuiteSelector multi("golden-6.4, lipschitz");
  CHECK(multi.wants("golden-6.4/projection"));
  CHECK(multi.wants("lipschitz/singular-zero"));
  CHECK_FALSE(multi.wants("golden-5.3/time"));

  const SuiteSelector empty("");
  CHECK(empty.none());
  CHECK_FALSE(empty.wants("golden-5.3/time"));
}

TEST_CASE("empty selector runs no checks and passes") {
  const VerifyRun run = run_selector("");
  CHECK(run.checks.empty());
  CHECK(run.ok());
}

TEST_CASE("golden value suites pass on the bundled scenes") {
  const VerifyRun run = run_selector("golden-5.3,golden-6.4,golden-7.4");
  require_all_pass(run);
  CHECK(count_tag(run, "golden-5.3/time") == 1);
  CHECK(count_tag(run, "golden-5.3/basic") == 1);
  CHECK(count_tag(run, "golden-5.3/singular") == 1);
  CHECK(count_tag(run, "golden-6.4/projection") == 1);
  CHECK(count_tag(run, "golden-6.4/basic") == 1);
  CHECK(count_tag(run, "golden-6.4/singular") == 1);
  CHECK(count_tag(run, "golden-7.4/time") == 1);
  CHECK(count_tag(run, "golden-7.4/basic") == 1);
  CHECK(count_tag(run, "golden-7.4/singular") == 1);
  CHECK(count_tag(run, "golden-7.4/outset") == 1);
}

TEST_CASE("curved counterexample suite passes") {
  const VerifyRun run = run_selector("counterexample-6");
  require_all_pass(run);
  CHECK(count_tag(run, "counterexample-6/enlargement-normal-cone") == 1);
  CHECK(count_tag(run, "counterexample-6/limiting-cloud") == 1);
  CHECK(count_tag(run, "counterexample-6/one-sided") == 1);
}

TEST_CASE("identity suite passes and pins the expected nonconvex violation") {
  const VerifyRun run = run_selector("sec3");
  require_all_pass(run);

  bool witnessed_on_53 = false;
  for (const auto& c : run.checks) {
    if (c.tag == "sec3/prop-3.6" && c.expected_violation) {
      CHECK(c.pass);
      if (c.detail.find("example-5.3") != std::string::npos) witnessed_on_53 = true;
    }
  }
  CHECK(witnessed_on_53);
  // both nonconvex fixture scenes exercise the reverse inequality
  CHECK(count_tag(run, "sec3/prop-3.7") == 2);
}

TEST_CASE("dual bound suite passes on the fixtures") {
  const VerifyRun run = run_selector("sec4");
  require_all_pass(run);
  CHECK(count_tag(run, "sec4/prop-4.1") >= 2);   // in-set fixture points
  CHECK(count_tag(run, "sec4/prop-4.4") >= 1);   // out-of-set fixture points
  CHECK(count_tag(run, "sec4/thm-4.3") >= 1);
  CHECK(count_tag(run, "sec4/prop-4.5") >= 1);
  CHECK(count_tag(run, "sec4/thm-4.6") >= 1);
}

TEST_CASE("lipschitz suite ties singular sets to quotient probes") {
  const VerifyRun run = run_selector("lipschitz");
  require_all_pass(run);
  CHECK(count_tag(run, "lipschitz/singular-zero") == 6);
}

TEST_CASE("selecting a single check by its trailing segment works") {
  const VerifyRun run = run_selector("prop-3.6");
  require_all_pass(run);
  for (const auto& c : run.checks) CHECK(c.tag == "sec3/prop-3.6");
}

TEST_CASE("verification reports serialize with one entry per check") {
  const VerifyRun run = run_selector("golden-6.4");
  const Report rep = verify_report(run, "example-6.4");
  const Json j = report_to_json(rep);
  CHECK(j.at("schema") == "mintime-report/1");
  CHECK(j.at("command") == "verify");
  CHECK(j.at("results").size() == run.checks.size());
  for (const auto& e : j.at("results")) {
    CHECK(e.at("status") == "pass");
  }
  CHECK(j.at("summary").at("ok") == true);
  CHECK(j.at("summary").at("failed") == 0);

  const Report back = report_from_json(j);
  CHECK(back.command == "verify");
  CHECK(back.results.size() == run.checks.size());
}

TEST_CASE("convex equivalence suite passes on random convex scenes") {
  const VerifyRun run = run_selector("convex-equiv");
  require_all_pass(run);
  CHECK(count_tag(run, "convex-equiv/thm-7.1") == 1);
  CHECK(count_tag(run, "convex-equiv/thm-7.2") == 1);
  CHECK(count_tag(run, "convex-equiv/thm-7.3") == 1);
  CHECK(count_tag(run, "convex-equiv/scaling") == 1);
}

TEST_CASE("concordance suite keeps sampled clouds inside formula sets") {
  const VerifyRun run = run_selector("concordance");
  require_all_pass(run);
  CHECK(count_tag(run, "concordance/thm-5.2") == 2);  // fixture + random batch
  CHECK(count_tag(run, "concordance/thm-5.3") == 2);
  CHECK(count_tag(run, "concordance/thm-6.3") == 1);
  CHECK(count_tag(run, "concordance/thm-5.2-equality") == 1);
}
