#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "catalog.hpp"
#include "valgroup/cli.hpp"
#include "valgroup/config.hpp"

using namespace valgroup;
using valgroup::testing::catalog6;

namespace {

const std::string kFixtures = FIXTURE_DIR;

struct RunResult {
    int code = 0;
    std::string out, err;
};

RunResult run(std::vector<std::string> args) {
    std::ostringstream out, err;
    RunResult r;
    r.code = run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

} // namespace

TEST_CASE("fixture configs build exactly the built-in catalog") {
    for (const auto& [name, spec] : catalog6()) {
        CAPTURE(name);
        const auto parsed = load_spec_config(kFixtures + "/" + name + ".cfg");
        CHECK(parsed.canonical_text() == spec.canonical_text());
        CHECK_FALSE(parsed.label().empty());
    }
}

TEST_CASE("config validation errors name the offending field") {
    CHECK_THROWS_WITH_AS(parse_spec_config("kind = prufer\nprime = 6\n[eventual]\ndeepen = 0\n"),
                         "prime: 6 is not prime", ValidationError);
    CHECK_THROWS_AS(parse_spec_config("prime = 2\n[eventual]\nmult = 1\n"), ValidationError);
    CHECK_THROWS_AS(
        parse_spec_config("kind = elem\nprime = 2\n[eventual]\nmult = 1\nmult = 0\n"),
        ValidationError);
    try {
        parse_spec_config("kind = elem\nprime = 2\n[eventual]\nmult = 1\nmult = 0\n");
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(e.field() == "[eventual].mult[1]");
    }
}

TEST_CASE("classify command") {
    const auto r = run({"classify", "--config", kFixtures + "/prufer_std.cfg", "--trials", "5"});
    CHECK(r.code == 0);
    CHECK(r.out.find("verdict: Minimal") != std::string::npos);
    CHECK(r.out.find("case: 4") != std::string::npos);
    CHECK(r.out.find("ell: 1") != std::string::npos);
    CHECK(r.out.find("AGREE") != std::string::npos);
    CHECK(r.out.find("DISAGREE") == std::string::npos);
}

TEST_CASE("classify of a not-minimal spec still exits 0") {
    const auto r = run({"classify", "--config", kFixtures + "/elem_alt.cfg"});
    CHECK(r.code == 0);
    CHECK(r.out.find("verdict: NotMinimal") != std::string::npos);
    CHECK(r.out.find("R_2(v(x))") != std::string::npos);
    CHECK(r.out.find("AGREE") != std::string::npos);
}

TEST_CASE("malformed configs exit 2 and name the field") {
    std::ofstream bad("build/bad_prime.cfg");
    bad << "kind = prufer\nprime = 9\n[eventual]\ndeepen = 0\n";
    bad.close();
    const auto r = run({"classify", "--config", "build/bad_prime.cfg"});
    CHECK(r.code == 2);
    CHECK(r.err.find("prime") != std::string::npos);

    const auto missing = run({"classify", "--config", "build/definitely_missing.cfg"});
    CHECK(missing.code == 2);
}

TEST_CASE("eval command with a brute-force banner") {
    const auto r = run({"eval", "--config", kFixtures + "/prufer_std.cfg", "--formula",
                        "v(2*x) >= v(q(1,4))", "--level", "6"});
    CHECK(r.code == 0);
    CHECK(r.out.find("verdict: Finite") != std::string::npos);
    CHECK(r.out.find("list_size: 8") != std::string::npos);
    CHECK(r.out.find("AGREE") != std::string::npos);

    const auto singleton = run({"eval", "--config", kFixtures + "/prufer_std.cfg", "--formula",
                                "v(x) = inf", "--level", "4"});
    CHECK(singleton.code == 0);
    CHECK(singleton.out.find("verdict: Finite") != std::string::npos);
    CHECK(singleton.out.find("list_size: 1") != std::string::npos);

    const auto cof = run({"eval", "--config", kFixtures + "/prufer_std.cfg", "--formula",
                          "!(v(x) = inf)", "--level", "4"});
    CHECK(cof.code == 0);
    CHECK(cof.out.find("verdict: Cofinite") != std::string::npos);
    CHECK(cof.out.find("list_size: 1") != std::string::npos);
}

TEST_CASE("eval reports non-settling sets as a successful outcome") {
    const auto r = run({"eval", "--config", kFixtures + "/elem_alt.cfg", "--formula",
                        "R_2(v(x))", "--level", "6"});
    CHECK(r.code == 0);
    CHECK(r.out.find("NeitherFiniteNorCofinite") != std::string::npos);
    CHECK(r.out.find("AGREE") != std::string::npos);
}

TEST_CASE("eval formula errors exit 2 with a position") {
    const auto r = run({"eval", "--config", kFixtures + "/prufer_std.cfg", "--formula",
                        "v(2*x >= v(x)"});
    CHECK(r.code == 2);
    CHECK(r.err.find("position") != std::string::npos);
}

TEST_CASE("eval accepts named parameters") {
    const auto r = run({"eval", "--config", kFixtures + "/prufer_std.cfg", "--formula",
                        "!(v(x) >= v(ph))", "--param", "h=q(1,4)", "--level", "5"});
    CHECK(r.code == 0);
    CHECK(r.out.find("verdict: Cofinite") != std::string::npos);
    CHECK(r.out.find("list_size: 4") != std::string::npos);
}

TEST_CASE("order-table and axioms commands") {
    const auto ot = run({"order-table", "--config", kFixtures + "/prufer_std.cfg", "--level", "4"});
    CHECK(ot.code == 0);
    CHECK(ot.out.find("level 0 (1): 1/2") != std::string::npos);
    CHECK(ot.out.find("level 2 (4): 1/8, 3/8, 5/8, 7/8") != std::string::npos);
    CHECK(ot.out.find("level 4 (16):") != std::string::npos);
    CHECK(ot.out.find("AGREE") != std::string::npos);

    const auto ax = run({"axioms", "--config", kFixtures + "/elem_const.cfg", "--level", "8"});
    CHECK(ax.code == 0);
    CHECK(ax.out.find("all_ok: true") != std::string::npos);
}

TEST_CASE("examples command") {
    const auto jag = run({"examples", "--name", "jagiella", "--level", "50"});
    CHECK(jag.code == 0);
    CHECK(jag.out.find("FAIL") == std::string::npos);
    CHECK(jag.out.find("all_passed: true") != std::string::npos);

    const auto tri = run({"examples", "--name", "triangle", "--level", "50"});
    CHECK(tri.code == 0);
    CHECK(tri.out.find("all_passed: true") != std::string::npos);

    const auto unknown = run({"examples", "--name", "pentagon"});
    CHECK(unknown.code == 2);
}

TEST_CASE("machine format is valid JSON with the fixed field names") {
    const auto r = run({"classify", "--config", kFixtures + "/prufer_std.cfg", "--trials", "3",
                        "--format", "machine"});
    CHECK(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc.contains("command"));
    CHECK(doc.contains("fingerprint"));
    CHECK(doc.contains("seed"));
    CHECK(doc["results"]["verdict"] == "Minimal");
    CHECK(doc["results"]["case"] == "4");
    CHECK(doc["results"]["n0"] == 0);
    CHECK(doc["results"]["ell"] == 1);
    CHECK(doc["results"].contains("witness"));
    CHECK(doc["results"].contains("corroboration"));
}

TEST_CASE("identical runs are byte-identical") {
    for (const auto& [name, spec] : catalog6()) {
        CAPTURE(name);
        const std::vector<std::string> args{"classify", "--config",
                                            kFixtures + "/" + name + ".cfg", "--trials", "4",
                                            "--seed", "99"};
        const auto a = run(args);
        const auto b = run(args);
        CHECK(a.code == b.code);
        CHECK(a.out == b.out);
    }
}

TEST_CASE("golden reports") {
    const std::vector<std::pair<std::string, std::vector<std::string>>> cases = {
        {"classify_prufer_std.txt",
         {"classify", "--config", "fixtures/prufer_std.cfg", "--trials", "5"}},
        {"classify_elem_alt.txt", {"classify", "--config", "fixtures/elem_alt.cfg"}},
        {"eval_prufer_std.txt",
         {"eval", "--config", "fixtures/prufer_std.cfg", "--formula", "v(2*x) >= v(q(1,4))",
          "--level", "6"}},
        {"order_table_prufer_std.txt",
         {"order-table", "--config", "fixtures/prufer_std.cfg", "--level", "4"}},
        {"axioms_elem_const.txt",
         {"axioms", "--config", "fixtures/elem_const.cfg", "--level", "8"}},
        {"examples_jagiella.txt", {"examples", "--name", "jagiella", "--level", "50"}},
        {"classify_machine_prufer_rr2.txt",
         {"classify", "--config", "fixtures/prufer_rr2.cfg", "--trials", "5", "--format",
          "machine"}},
    };
    const bool regen = std::getenv("VALGROUP_REGEN_GOLDEN") != nullptr;
    for (const auto& [file, args] : cases) {
        CAPTURE(file);
        const auto r = run(args);
        CHECK(r.code == 0);
        const std::string path = kFixtures + "/golden/" + file;
        if (regen) {
            std::ofstream f(path);
            f << r.out;
            continue;
        }
        std::ifstream f(path);
        REQUIRE_MESSAGE(f.good(), "missing golden file ", path);
        std::ostringstream expected;
        expected << f.rdbuf();
        CHECK(r.out == expected.str());
    }
}
