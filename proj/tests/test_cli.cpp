#include <doctest.h>

#include "cli_support.hpp"
#include "qgeom/io.hpp"

using namespace qgeom;
using io::Json;
using clitest::fixture;
using clitest::run;

TEST_SUITE("cli") {

TEST_CASE("monodromy output is deterministic and has unit determinant") {
    const std::string args = "monodromy --connection " + fixture("sl2_two_pole.json");
    const auto a = run(args), b = run(args);
    REQUIRE(a.status == 0);
    CHECK(a.out == b.out);
    const Json j = Json::parse(a.out);
    CHECK(j["relation_defect"].get<double>() < 1e-6);
    for (const auto& loop : j["loops"])
        CHECK(std::abs(io::complex_from_json(loop["determinant"], "det") - 1.0) < 1e-8);
}

TEST_CASE("every command runs on the fixtures") {
    const std::string two = " --connection " + fixture("sl2_two_pole.json");
    const std::string three = " --connection " + fixture("sl2_three_pole.json");
    CHECK(run("transport" + three + " --path " + fixture("path_upper.json")).status == 0);
    CHECK(run("monodromy" + three + " --path " + fixture("loop_minus_one.json")).status == 0);
    CHECK(run("regint --pole 0.2,-0.1 --z 1.1,0.6 --order 1 --function exp").status == 0);
    CHECK(run("boundary" + two + " --chain " + fixture("chain_segment.json")).status == 0);
    CHECK(run("deform" + two + " --chain " + fixture("chain_trivial.json") + " --x -1.1,0.1 --o 0,3").status == 0);
    CHECK(run("envelope --envelope " + fixture("envelope.json")).status == 0);
    CHECK(run("commutant" + three).status == 0);
}

TEST_CASE("outputs re-parse to equal values") {
    const auto r = run("boundary --connection " + fixture("sl2_two_pole.json") + " --chain " + fixture("chain_segment.json"));
    REQUIRE(r.status == 0);
    const Json j = Json::parse(r.out);
    const QuantumDivisor d = io::divisor_from_json(j);
    CHECK(io::to_json(d)["terms"] == j["terms"]);

    const auto m = run("monodromy --connection " + fixture("sl2_three_pole.json") + " --path " + fixture("loop_minus_one.json"));
    REQUIRE(m.status == 0);
    const Json mj = Json::parse(m.out);
    CHECK(io::to_json(io::matrix_from_json(mj["monodromy"], "monodromy")) == mj["monodromy"]);

    const auto rg = run("regint --pole 0,0 --z 1,0 --order 0 --function exp");
    REQUIRE(rg.status == 0);
    CHECK(io::complex_from_json(Json::parse(rg.out)["value"], "value").real() == doctest::Approx(1.3179021514544).epsilon(1e-13));
}

TEST_CASE("csv output") {
    const std::string file = (std::filesystem::temp_directory_path() / "qgeom_env.csv").string();
    const auto r = run("envelope --envelope " + fixture("envelope.json") + " --out csv --csv " + file);
    REQUIRE(r.status == 0);
    CHECK(r.out.rfind("re_z,im_z,re_m00", 0) == 0);
    CHECK(clitest::slurp(file) == r.out);
    int lines = 0;
    for (char c : r.out) lines += c == '\n';
    CHECK(lines == 6);
}

TEST_CASE("exit codes") {
    const auto dir = clitest::copy_fixtures("cli_exit");
    {
        std::ofstream((dir / "broken.json").string()) << "{\"algebra\": {\"family\": \"sl\", \"n\": 2}, \"poles\": [{\"position\": [0, 0], \"laurent\": [[[1, 0], [0, 0]]]}]}";
    }
    const std::string err = (dir / "err.txt").string();
    CHECK(run("monodromy --connection " + (dir / "broken.json").string(), err).status == 2);
    CHECK(clitest::slurp(err).find("poles[0].laurent[0]") != std::string::npos);

    {
        std::ofstream((dir / "garbage.json").string()) << "{ not json";
    }
    CHECK(run("monodromy --connection " + (dir / "garbage.json").string(), err).status == 2);
    CHECK(clitest::slurp(err).find("parse error") != std::string::npos);

    CHECK(run("transport --connection " + fixture("sl2_two_pole.json")).status == 2);
    CHECK(run("regint --z 1,0 --tol -1").status == 2);
    CHECK(run("nosuchcommand").status == 2);

    // the generic section of the three-pole system is multivalued at -1
    {
        std::ofstream((dir / "env3.json").string())
            << "{\"connection\": \"sl2_three_pole.json\", \"element\": [[0.3, 0.7], [0.4, -0.3]],"
               " \"anchor_pole\": [-1, 0], \"basepoint\": [-0.4, 0.6], \"z_targets\": [[-0.5, 0.5]]}";
    }
    CHECK(run("envelope --envelope " + (dir / "env3.json").string()).status == 3);
    std::filesystem::remove_all(dir);
}

TEST_CASE("verify detects a perturbed residue") {
    CHECK(run("verify --suite commutant").status == 0);
    const auto dir = clitest::copy_fixtures("cli_verify");
    Json j = io::read_json_file((dir / "sl2_two_pole.json").string());
    j["poles"][0]["laurent"][0][0][1][0] = j["poles"][0]["laurent"][0][0][1][0].get<double>() + 1e-2;
    std::ofstream((dir / "sl2_two_pole.json").string()) << j.dump(2);
    const auto r = run("verify --suite monodromy --fixtures " + dir.string());
    CHECK(r.status != 0);
    CHECK(Json::parse(r.out)["failed"].size() >= 1);
    std::filesystem::remove_all(dir);
}

}
