#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "btj/cli.hpp"

using namespace btj;

namespace {
struct CliResult {
    int code;
    std::string out, err;
};
CliResult run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = btj::cli::run(std::move(args), out, err);
    return {code, out.str(), err.str()};
}
const std::string kA1 = R"([["1","p"],["0","1"]])";
const std::string kB = R"([["p","0"],["1","1/p"]])";
} // namespace

TEST_CASE("mk prints the constant") {
    CliResult r = run_cli({"mk", "--field", "padic:3"});
    CHECK(r.code == 0);
    CHECK(r.out == "M_K = 1\n");
    CliResult r2 = run_cli({"mk", "--field", "padic:2", "--json"});
    CHECK(r2.code == 0);
    json j = json::parse(r2.out);
    CHECK(j["M_K"] == 2);
}

TEST_CASE("jorgensen certificate run") {
    CliResult r = run_cli({"jorgensen", "--field", "padic:5", kA1, kB});
    CHECK(r.code == 0);
    CHECK(r.out.find("NotDiscreteCertificate") != std::string::npos);
}

TEST_CASE("sharp run reports strictness") {
    CliResult r = run_cli({"sharp", "--field", "padic:5", "--json",
                           R"([["0","-1"],["1","0"]])", R"([["0","-1/p"],["p","1"]])"});
    CHECK(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["verdict"] == "InequalityHolds");
    CHECK(j["sharp"] == "strict");
    CHECK(j["lhs"]["min"]["n"] == -2);
}

TEST_CASE("worked examples pass end to end") {
    CliResult r = run_cli({"examples", "--field", "padic:7"});
    CHECK(r.code == 0);
    CHECK(r.out.find("all checks passed") != std::string::npos);
    CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("emitted matrices reparse digit for digit") {
    CliResult r = run_cli({"jorgensen", "--field", "padic:5", "--json", kA1, kB});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    Field f = parse_field("padic:5");
    Mat2 a1 = matrix_from_json(f, j["inputs"]["A"]);
    Mat2 b1 = matrix_from_json(f, j["inputs"]["B"]);
    CHECK(matrix_json(a1) == j["inputs"]["A"]);
    CHECK(matrix_json(b1) == j["inputs"]["B"]);
    Mat2 a0 = matrix_from_string(f, kA1);
    CHECK(a0.a() == a1.a());
    CHECK(a0.b() == a1.b());
    CHECK(a0.c() == a1.c());
    CHECK(a0.d() == a1.d());
}

TEST_CASE("identical invocations are byte-identical") {
    std::vector<std::string> args{"jorgensen", "--field", "padic:5", "--json", kA1, kB};
    CliResult r1 = run_cli(args);
    CliResult r2 = run_cli(args);
    CHECK(r1.out == r2.out);
    CliResult r3 = run_cli({"mk", "--field", "laurent:5", "--json"});
    CliResult r4 = run_cli({"mk", "--field", "laurent:5", "--json"});
    CHECK(r3.out == r4.out);
}

TEST_CASE("input errors exit 1 and name the problem") {
    CliResult r = run_cli({"jorgensen", "--field", "padic:5", "[[\"1\"", kB});
    CHECK(r.code == 1);
    CHECK(r.err.find("matrix literal") != std::string::npos);

    CliResult r2 = run_cli({"mk", "--field", "padic:6"});
    CHECK(r2.code == 1);

    CliResult r3 = run_cli({"jorgensen", "--field", "padic:5", kA1});
    CHECK(r3.code == 1); // missing B

    CliResult r4 = run_cli({"classify", "--field", "padic:5", "--precision", "4",
                            R"([["1","0"],["0","1"]])"});
    CHECK(r4.code == 1); // precision floor is 8

    CliResult r5 = run_cli({"nonsense"});
    CHECK(r5.code == 1);

    CliResult r6 = run_cli({"jorgensen", "--field", "padic:5",
                            R"([["1","t"],["0","1"]])", kB});
    CHECK(r6.code == 1); // wrong uniformiser symbol
    CHECK(r6.err.find("uniformiser") != std::string::npos);
}

TEST_CASE("indeterminate results exit 2") {
    // trace 6 over Q_2: the residue polynomial is inseparable, so the
    // fixed-end computation cannot decide at any finite precision
    CliResult r = run_cli({"classify", "--field", "padic:2",
                           R"([["0","-1"],["1","6"]])"});
    CHECK(r.code == 2);
}

TEST_CASE("environment default for precision") {
    setenv("BTJ_PRECISION", "16", 1);
    CliResult r = run_cli({"jorgensen", "--field", "padic:5", "--json", kA1, kB});
    unsetenv("BTJ_PRECISION");
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["precision"] == 16);
}

TEST_CASE("file input and the converge command") {
    const char* path = "btj_test_seq.json";
    {
        std::ofstream f(path);
        f << R"({"A": {"entries": [["1+p^n","1"],["p^n","1"]], "limit": [["1","1"],["0","1"]]},
                 "B": {"entries": [["p","0"],["0","1/p"]], "limit": [["p","0"],["0","1/p"]]}})";
    }
    CliResult r = run_cli({"converge", "--field", "padic:5", "--json", "--input", path,
                           "--range", "1", "--range-hi", "6"});
    std::remove(path);
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["common_end_tail"]["limit_fixes_axis_end"] == true);
    CHECK(j["common_end_tail"]["tail_has_common_end"] == false);

    CliResult missing = run_cli({"converge", "--field", "padic:5", "--input", "no_such.json"});
    CHECK(missing.code == 1);
}

TEST_CASE("probe command") {
    CliResult r = run_cli({"probe", "--field", "padic:5", "--json", "--exponents", "5,25,125",
                           R"x([["1+p","1"],["0","1/(1+p)"]])x"});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["probe"]["strictly_increasing"] == true);
    CHECK(j["probe"]["min_entry_valuation"][0]["n"] == 1);
    CHECK(j["probe"]["min_entry_valuation"][1]["n"] == 2);
    CHECK(j["probe"]["min_entry_valuation"][2]["n"] == 3);
}

TEST_CASE("tree command reports axis data") {
    CliResult r = run_cli({"tree", "--field", "padic:5", "--json", kB});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["class"]["type"] == "hyperbolic");
    CHECK(j["axis"]["length"] == 2);
    CHECK(j["displacement"] == 2);

    CliResult r2 = run_cli({"tree", "--field", "padic:5", "--json", "--vertex",
                            R"({"level": 2, "offset": "p"})", kB});
    REQUIRE(r2.code == 0);
    json j2 = json::parse(r2.out);
    CHECK(j2["vertex"]["level"] == 2);
}

TEST_CASE("end and vertex literals round-trip through their JSON forms") {
    Field f = parse_field("padic:5");
    End inf = end_from_string(f, "inf");
    CHECK(inf.infinity);
    CHECK(end_json(inf) == "inf");
    End fin = end_from_string(f, "1/p");
    CHECK_FALSE(fin.infinity);
    End back = end_from_string(f, end_json(fin).get<std::string>());
    CHECK(compare_ends(fin, back, f).equal);

    Vertex v = vertex_from_json(f, json::parse(R"({"level": 3, "offset": "2+p"})"));
    Vertex again = vertex_from_json(f, vertex_json(v));
    CHECK(v == again);
}

TEST_CASE("certify command") {
    CliResult r = run_cli({"certify", "--field", "padic:5", "--json", "--word-length", "3",
                           R"([["0","-1"],["1","0"]])", R"([["0","-1/p"],["p","1"]])"});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["certified_nonelementary"] == true);
    CHECK(j["elementary_evidence"]["common_fixed_vertex"] == false);
}

TEST_CASE("converge on a single sequence echoes it and reports tails") {
    const char* path = "btj_test_single_seq.json";
    {
        std::ofstream f(path);
        f << R"x({"entries": [["1+p^n","1"],["0","1/(1+p^n)"]], "limit": [["1","1"],["0","1"]]})x";
    }
    CliResult r = run_cli({"converge", "--field", "padic:5", "--json", "--input", path,
                           "--range", "1", "--range-hi", "4"});
    std::remove(path);
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["sequence"]["entries"][0][0] == "1+p^n");
    CHECK(j["tail_classification"]["limit"]["type"] == "elliptic");
    CHECK(j["trace_tail"]["eventually_constant"] == false);
    CHECK(j["trace_tail"]["per_index"].size() == 4);
}
