#include "nmpz/error.hpp"
#include "nmpz/fixtures.hpp"
#include "nmpz/io.hpp"

#include <doctest.h>

#include <cmath>

using namespace nmpz;

TEST_CASE("every fixture loads and passes its structural invariants") {
    for (const std::string& name : fixture_names()) {
        Fixture f = load_fixture(name);
        CHECK(f.name == name);
        for (const auto& [key, e] : f.expected) {
            CAPTURE(key);
            CHECK(!e.provenance.empty()); // no untagged targets
        }
        if (f.reduced) {
            const Eigen::MatrixXd& B = f.reduced->B_r;
            CHECK((B - B.transpose()).cwiseAbs().maxCoeff() < 1e-12);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
            CHECK(es.eigenvalues().minCoeff() > -1e-8 * std::max(1.0, es.eigenvalues().maxCoeff()));
        }
    }
}

TEST_CASE("unknown fixture name raises an input error") {
    CHECK_THROWS_AS(load_fixture("no-such-fixture"), Error);
    CHECK_THROWS_AS(load_fixture("random-seed-notanumber"), Error);
}

TEST_CASE("fixture JSON round trip is bit identical") {
    for (const std::string& name : {"case1", "case3", "droop-node3", "didactic", "scalar"}) {
        Fixture f = load_fixture(name);
        const std::string once = serialize_fixture(f);
        Fixture parsed = parse_fixture_json(once);
        const std::string twice = serialize_fixture(parsed);
        CHECK(once == twice);
    }
}

TEST_CASE("fixture parser rejects untagged expected values") {
    std::string text = R"({"name":"x","expected":{"z":{"value":1.0,"tol_rel":0.1}}})";
    CHECK_THROWS_AS(parse_fixture_json(text), Error);
}

TEST_CASE("random fixtures are deterministic in the seed") {
    Fixture a = random_fixture(42);
    Fixture b = random_fixture(42);
    CHECK(serialize_fixture(a) == serialize_fixture(b));
    Fixture c = random_fixture(43);
    CHECK(serialize_fixture(a) != serialize_fixture(c));
    CHECK(a.reduced.has_value());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.reduced->B_r);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("droop fixtures carry the documented reconstruction") {
    Fixture f = load_fixture("droop-node3");
    REQUIRE(f.droop.size() == 1);
    CHECK(f.droop[0].node == 2);
    CHECK(f.droop[0].gain == 10.0);
    // drooped node voltage is 1.00, so the unit-reference droop law keeps
    // the setpoint Q3 = 0
    CHECK(f.op->converters[2].Q_pu == doctest::Approx(0.0));
    CHECK(!f.notes.empty());
}

TEST_CASE("didactic fixture rows cover the published gain sweep") {
    Fixture f = load_fixture("didactic");
    REQUIRE(f.didactic_rows.size() == 4);
    CHECK(*f.didactic_z == 0.01);
    CHECK(f.expected.count("dominant_mode_Kp1_Ki10") == 1);
    CHECK(f.expected.at("dominant_mode_Kp1_Ki10").value == 9979.99);
    CHECK(f.expected.at("dominant_mode_Kp1_Ki10").tol_rel == 0.001);
}

#ifdef NMPZ_FIXTURES_DIR
TEST_CASE("shipped fixture files match the built-in corpus") {
    for (const std::string& name : fixture_names()) {
        const std::string path = std::string(NMPZ_FIXTURES_DIR) + "/" + name + ".json";
        CAPTURE(path);
        CHECK(read_file(path) == serialize_fixture(load_fixture(name)));
    }
}
#endif
