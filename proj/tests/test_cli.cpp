#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>
#include <sstream>

#include "crjet/cli.hpp"
#include "fixtures.hpp"

using Json = nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
  Json json() const { return Json::parse(out); }
};

std::string fx(const std::string& name) { return std::string(CRJET_FIXTURES) + "/" + name; }

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = crjet::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("sha256") {
  CHECK(crjet::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("analyze") {
  const auto r = run({"analyze", fx("heis.cr")});
  REQUIRE(r.code == 0);
  const auto j = r.json();
  CHECK(j["command"] == "analyze");
  CHECK(j["seed"] == 0);
  CHECK(j["inputs"][0]["sha256"] == crjet::sha256_hex(fixture_text("heis.cr")));
  const auto& res = j["result"];
  CHECK(res["cr_dim"] == 1);
  CHECK(res["cr_codim"] == 1);
  CHECK(res["levi_nondegenerate"] == true);
  CHECK(res["levi_surjective"] == true);
  CHECK(res["nondeg_order"] == 1);
  CHECK(res["minimal_s"] == 2);
  CHECK(res["determinacy_order"] == 4);

  const auto ex41 = run({"analyze", fx("ex41.cr")}).json()["result"];
  CHECK(ex41["cr_dim"] == 2);
  CHECK(ex41["cr_codim"] == 2);
  CHECK(ex41["levi_surjective"] == true);

  const auto flat = run({"analyze", fx("levi_flat.cr"), "--kmax", "3"}).json()["result"];
  CHECK(flat["nondeg_order"].is_null());
  CHECK(flat["determinacy_order"].is_null());
}

TEST_CASE("reports are deterministic") {
  const std::vector<std::string> args = {"--seed", "5", "reflect", fx("heis.cr"), fx("heis.cr"),
                                         "--map", fx("fmob.map"), "--steps", "3", "--order", "1"};
  const auto a = run(args);
  const auto b = run(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const auto j = a.json();
  CHECK(j["seed"] == 5);
  CHECK(j["result"]["steps"].size() == 3);
  CHECK(j["result"]["chain"]["points"].size() == 4);
  CHECK(j["result"]["terminal"]["order"] == 1);
  CHECK(run({"--seed", "6", "reflect", fx("heis.cr"), fx("heis.cr"), "--map", fx("fmob.map"), "--steps", "3"}).out !=
        a.out);
  CHECK_FALSE(j.contains("timing_ms"));
  CHECK(run({"--timing", "analyze", fx("heis.cr")}).json().contains("timing_ms"));
}

TEST_CASE("segre") {
  const auto j = run({"segre", fx("heis.cr"), "--order", "2"}).json()["result"];
  CHECK(j["graph"]["w"] == "c_w + 2*i*u_z*c_z");
  CHECK(j["nondeg_order"] == 1);
  const auto c = run({"segre", fx("heis.cr"), "--order", "1", "--center", "(1, 2*i)", "--chi", "(1, 0)"});
  CHECK(c.code == 0);
  CHECK(c.json()["result"]["solved"][0] == "z");
  CHECK(run({"segre", fx("heis.cr"), "--order", "1", "--center", "(1, 0)"}).code == 2);
}

TEST_CASE("reconstruct") {
  const auto r = run({"reconstruct", fx("heis.cr"), fx("heis.cr"), "--map", fx("fmob.map"), "--at", "(1/3,1/5)"});
  REQUIRE(r.code == 0);
  const auto j = r.json()["result"];
  CHECK(j["value"] == Json::array({"5/12", "1/4"}));
  CHECK(j["verdict"] == "equal");
  CHECK(j["chain"]["points"].size() == 5);

  const auto t = run({"reconstruct", fx("heis.cr"), fx("heis.cr"), "--map", fx("fmob_trunc6.map"), "--at", "(1/3,1/5)"});
  CHECK(t.code == 0);
  CHECK(t.json()["result"]["verdict"] == "unchecked");
  CHECK(t.json()["result"]["value"] == Json::array({"5/12", "1/4"}));
}

TEST_CASE("verify") {
  const auto ex41 = run({"verify", fx("ex41.cr"), fx("ex41p.cr"), "--map", fx("ex41_proj.map"), "--samples", "2"});
  CHECK(ex41.code == 0);
  CHECK(ex41.json()["result"]["admissibility"][0]["admissible"] == true);

  const auto ex42 = run({"verify", fx("ex42.cr"), fx("ex42.cr"), "--map", fx("ex42_collapse.map")});
  CHECK(ex42.code == 1);
  CHECK(ex42.json()["result"]["verdict"] == "inadmissible");
  CHECK(ex42.json()["result"]["admissibility"][0]["tangent_onto"] == false);

  const auto dil = run({"verify", fx("heis.cr"), fx("heis.cr"), "--map", fx("heis_dilation.map"), "--map2",
                        fx("heis_dilation3.map"), "--samples", "2"});
  CHECK(dil.code == 0);
  CHECK(dil.json()["result"]["verdict"] == "distinct_germs");
  CHECK(dil.json()["result"]["first_difference"] == 1);
}

TEST_CASE("errors") {
  const auto missing = run({"analyze", fx("nope.cr")});
  CHECK(missing.code == 2);
  CHECK(missing.json()["error"]["kind"] == "input");

  const auto usage = run({"analyze"});
  CHECK(usage.code == 2);
  CHECK(usage.json()["error"]["kind"] == "usage");
  CHECK(run({"--help"}).code == 0);

  const auto bad_point = run({"reconstruct", fx("heis.cr"), fx("heis.cr"), "--map", fx("fmob.map"), "--at", "(1/3,q)"});
  CHECK(bad_point.code == 2);
  CHECK(bad_point.json()["error"]["token"] == "q");
  CHECK(bad_point.json()["error"]["column"] == 6);

  // (0, 1) is off the Heisenberg surface.
  CHECK(run({"reconstruct", fx("heis.cr"), fx("heis.cr"), "--map", fx("fmob.map"), "--at", "(0,1)"}).code != 0);

  // The target equation is quadratic in the conjugate variables.
  const auto unsup = run({"reconstruct", fx("heis.cr"), fx("heis_quartic.cr"), "--map", fx("heis_identity.map"), "--at",
                          "(1/3,1/5)"});
  CHECK(unsup.code == 3);
  CHECK(unsup.json()["error"]["kind"] == "unsupported");
}
