#include <doctest.h>

#include "peer/methods.hpp"

using namespace peer;

TEST_CASE("builtin coefficients match the published tables") {
    MethodTableau t2 = builtin("imex-peer2s");
    CHECK(t2.s == 2);
    CHECK(t2.gamma == 0.969486340522434);
    CHECK(t2.c[0] == 0.591977499693304);
    CHECK(t2.c[1] == 1.0);

    MethodTableau t3 = builtin("imex-peer3s");
    CHECK(t3.s == 3);
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(t3.P(0, j) == t3.P(1, j));  // identical rows: P = e v^T
        CHECK(t3.P(1, j) == t3.P(2, j));
    }

    MethodTableau t4 = builtin("imex-peer4s");
    CHECK(t4.s == 4);
    CHECK(t4.c[0] == -0.926697334544583);
    CHECK(t4.R(1, 0) == 1.186201415903827);

    CHECK_THROWS_AS(builtin("imex-peer5s"), Error);
}

TEST_CASE("serialization round trip is lossless") {
    for (const auto& name : builtin_names()) {
        MethodTableau t = builtin(name);
        MethodTableau u = parse_tableau(serialize_tableau(t));
        CHECK(u.label == t.label);
        CHECK(u.s == t.s);
        CHECK(u.gamma == t.gamma);
        for (std::size_t i = 0; i < t.s; ++i) {
            CHECK(u.c[i] == t.c[i]);
            for (std::size_t j = 0; j < t.s; ++j) {
                CHECK(u.P(i, j) == t.P(i, j));
                CHECK(u.R(i, j) == t.R(i, j));
                CHECK(u.S2(i, j) == t.S2(i, j));
                // derived matrices are recomputed, not stored
                CHECK(u.Q(i, j) == doctest::Approx(t.Q(i, j)).epsilon(1e-15));
            }
        }
    }
}

TEST_CASE("loader rejects structural violations with line context") {
    CHECK_THROWS_WITH_AS(parse_tableau("label x\ns 2\nc 0.5 0.5\ngamma 0.9\n"
                                       "P 1 0 1 0\nR 0.1\nS2 0.2\n"),
                         doctest::Contains("distinct"), TableauFormatError);
    CHECK_THROWS_WITH_AS(parse_tableau("label x\ns 2\nc 0.5 0.9\ngamma 0.9\n"
                                       "P 1 0 1 0\nR 0.1\nS2 0.2\n"),
                         doctest::Contains("last node"), TableauFormatError);
    // full-matrix S2 with a nonzero upper entry
    CHECK_THROWS_WITH_AS(parse_tableau("label x\ns 2\nc 0.5 1\ngamma 0.9\n"
                                       "P 1 0 1 0\nR 0.1\nS2 0 0.3 0.2 0\n"),
                         doctest::Contains("strictly lower"), TableauFormatError);
    CHECK_THROWS_WITH_AS(parse_tableau("label x\ns 2\nc 0.5 oops\ngamma 0.9\n"
                                       "P 1 0 1 0\nR 0.1\nS2 0.2\n"),
                         doctest::Contains("line 3"), TableauFormatError);
    CHECK_THROWS_AS(parse_tableau("s 2\nc 0.5 1\nP 1 0 1 0\nR 0.1\nS2 0.2\n"),
                    TableauFormatError);  // missing gamma
    CHECK_THROWS_AS(load_tableau_file("/nonexistent/path.tab"), TableauFormatError);
}

TEST_CASE("full-matrix R and S2 forms parse when structurally valid") {
    MethodTableau t = parse_tableau(
        "label full\ns 2\nc 0.5 1\ngamma 0.9\nP 0.25 0.75 0.25 0.75\n"
        "R 0.9 0 0.1 0.9\nS2 0 0 0.2 0\n");
    CHECK(t.R(1, 0) == 0.1);
    CHECK(t.S2(1, 0) == 0.2);
}

TEST_CASE("node-range deviations warn instead of failing") {
    // nodes outside (0, 1] for s = 2 load with a warning attached
    MethodTableau t = parse_tableau(
        "label wide\ns 2\nc -0.5 1\ngamma 0.9\nP 0.25 0.75 0.25 0.75\nR 0.1\nS2 0.2\n");
    CHECK_FALSE(t.warnings.empty());
}

TEST_CASE("resolve_method accepts builtin names first") {
    CHECK(resolve_method("imex-peer3s").s == 3);
    CHECK_THROWS_AS(resolve_method("no-such-method"), TableauFormatError);
}
