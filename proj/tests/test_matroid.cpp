#include <catch2/catch_amalgamated.hpp>

#include "matrep/catalog.hpp"
#include "matrep/matroid.hpp"

using namespace matrep;

namespace {

Matroid doubled_u23() {
    // U_{2,3} on {a,b,c} with d parallel to a and e parallel to b
    GroundSet g({"a", "b", "c", "d", "e"});
    std::vector<Mask> bases;
    auto par = [&](int x) { return x == 3 ? 0 : (x == 4 ? 1 : x); };
    for (int x = 0; x < 5; ++x)
        for (int y = x + 1; y < 5; ++y)
            if (par(x) != par(y)) bases.push_back(bit(x) | bit(y));
    return Matroid::from_bases(std::move(g), std::move(bases));
}

}  // namespace

TEST_CASE("matroid_from_bases validates input") {
    GroundSet g({"a", "b", "c"});

    SECTION("uniform from all 2-subsets") {
        auto m = Matroid::from_bases(g, {0b011, 0b101, 0b110});
        CHECK(m.rank() == 2);
        CHECK(m.bases().size() == 3);
    }
    SECTION("empty family") {
        CHECK_THROWS_MATCHES(Matroid::from_bases(g, {}), Error,
                             Catch::Matchers::Predicate<Error>([](const Error& e) {
                                 return e.code() == ErrorCode::EmptyBasisFamily;
                             }));
    }
    SECTION("unequal cardinality") {
        try {
            Matroid::from_bases(GroundSet({"a", "b"}), {0b01, 0b11});
            FAIL("expected throw");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::UnequalCardinality);
        }
    }
    SECTION("exchange axiom violation reports a witness") {
        // {a,b} and {c,d} with nothing else fails exchange
        try {
            Matroid::from_bases(GroundSet({"a", "b", "c", "d"}), {0b0011, 0b1100});
            FAIL("expected throw");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ExchangeAxiomViolated);
            CHECK(std::string(e.what()).find("bases") != std::string::npos);
        }
    }
    SECTION("fano has 28 bases accepted") {
        auto f = fano();
        CHECK(f.rank() == 3);
        CHECK(f.bases().size() == 28);
    }
}

TEST_CASE("rank oracle") {
    auto u24 = uniform(2, 4, {"a", "b", "c", "d"});
    CHECK(u24.rank_of(u24.ground().mask_of({"a"})) == 1);
    CHECK(u24.rank_of(0) == 0);
    auto f = fano();
    CHECK(f.rank_of(f.ground().mask_of({"1", "2", "3"})) == 2);
    CHECK_THROWS_AS(u24.rank_of(bit(10)), Error);
}

TEST_CASE("closure") {
    auto u24 = uniform(2, 4, {"a", "b", "c", "d"});
    CHECK(u24.closure_mask(u24.ground().mask_of({"a"})) == u24.ground().mask_of({"a"}));
    auto f = fano();
    CHECK(f.closure_mask(f.ground().mask_of({"1", "2"})) == f.ground().mask_of({"1", "2", "3"}));
    CHECK(f.closure_mask(f.ground().all()) == f.ground().all());
}

TEST_CASE("flats by corank") {
    auto u24 = uniform(2, 4);
    auto hyps = u24.flats_by_corank(1);
    REQUIRE(hyps.size() == 4);
    for (auto& h : hyps) CHECK(popcount(h.members) == 1);

    auto f = fano();
    auto lines = f.flats_by_corank(1);
    CHECK(lines.size() == 7);
    for (auto& l : lines) CHECK(popcount(l.members) == 3);

    CHECK_THROWS_AS(u24.flats_by_corank(5), Error);
}

TEST_CASE("modular flats") {
    auto f = fano();
    for (int e = 0; e < f.size(); ++e) CHECK(f.is_modular_flat(bit(e)));

    auto u36 = uniform(3, 6, {"a", "b", "c", "d", "e", "f"});
    CHECK_FALSE(u36.is_modular_flat(u36.ground().mask_of({"a", "b"})));

    auto m = mk4();
    CHECK(m.is_modular_flat(m.ground().mask_of({"12", "13", "23"})));
    CHECK_THROWS_AS(m.is_modular_flat(m.ground().mask_of({"12", "13"})), Error);
}

TEST_CASE("modular triples") {
    auto u23 = uniform(2, 3, {"a", "b", "c"});
    CHECK(u23.is_modular_triple(0b001, 0b010, 0b100));

    auto f = fano();
    auto g = f.ground();
    // three lines through point 1
    CHECK(f.is_modular_triple(g.mask_of({"1", "2", "3"}), g.mask_of({"1", "4", "5"}), g.mask_of({"1", "6", "7"})));
    // three lines with no common point
    CHECK_FALSE(
        f.is_modular_triple(g.mask_of({"1", "2", "3"}), g.mask_of({"2", "4", "6"}), g.mask_of({"3", "4", "7"})));
    CHECK_THROWS_AS(f.is_modular_triple(g.mask_of({"1"}), g.mask_of({"1", "4", "5"}), g.mask_of({"1", "6", "7"})),
                    Error);
}

TEST_CASE("modular pairs and corank-2 incidence") {
    auto f = fano();
    auto g = f.ground();
    CHECK(f.is_modular_pair(g.mask_of({"1", "2", "3"}), g.mask_of({"1", "4", "5"})));
    auto u36 = uniform(3, 6, {"a", "b", "c", "d", "e", "f"});
    CHECK_FALSE(u36.is_modular_pair(u36.ground().mask_of({"a", "b"}), u36.ground().mask_of({"c", "d"})));

    // each fano point lies on exactly three lines
    for (const auto& [flat, through] : f.corank2_incidence()) {
        CHECK(popcount(flat.members) == 1);
        CHECK(through.size() == 3);
    }
}

TEST_CASE("dual and minors") {
    auto u24 = uniform(2, 4);
    CHECK(u24.dual() == uniform(2, 4));
    auto u23 = uniform(2, 3);
    CHECK(u23.dual().bases() == uniform(1, 3).bases());

    auto f = fano();
    auto del = f.remove(bit(0));
    CHECK(del.size() == 6);
    CHECK(del.rank() == 3);
    // oracle count: bases of Fano avoiding the deleted point
    int avoid = 0;
    for (Mask b : f.bases())
        if (!contains(b, 0)) avoid++;
    CHECK(static_cast<int>(del.bases().size()) == avoid);

    auto con = f.contract(bit(0));
    CHECK(con.rank() == 2);
    CHECK(con.size() == 6);
}

TEST_CASE("simplify and cosimplify") {
    auto u24 = uniform(2, 4);
    auto [s, map] = u24.simplify();
    CHECK(s == u24);
    for (auto& [k, v] : map) CHECK(k == v);

    auto d = doubled_u23();
    auto [sd, dmap] = d.simplify();
    CHECK(sd.size() == 3);
    CHECK(sd.bases().size() == 3);
    CHECK(dmap.at("d") == "a");
    CHECK(dmap.at("e") == "b");
    CHECK(dmap.at("c") == "c");
}

TEST_CASE("components") {
    CHECK(uniform(2, 4).components().size() == 1);

    // direct sum via bases on a 6-element ground set
    GroundSet g({"a", "b", "c", "x", "y", "z"});
    std::vector<Mask> bases;
    for (Mask left : {0b011u, 0b101u, 0b110u})
        for (Mask right : {0b011u << 3, 0b101u << 3, 0b110u << 3}) bases.push_back(left | right);
    auto m = Matroid::from_bases(g, bases);
    CHECK(m.components().size() == 2);
}

TEST_CASE("circuits") {
    auto u23 = uniform(2, 3);
    auto c = u23.circuits();
    REQUIRE(c.size() == 1);
    CHECK(c[0] == 0b111);

    auto u24 = uniform(2, 4);
    CHECK(u24.circuits().size() == 4);

    auto f = fano();
    auto fc = f.circuits();
    int threes = 0, fours = 0;
    for (Mask x : fc) (popcount(x) == 3 ? threes : fours)++;
    CHECK(threes == 7);
    CHECK(fc.size() == 7 + 7);  // 7 lines plus 7 complements of lines
}

TEST_CASE("isomorphism") {
    auto relabeled = uniform(2, 4, {"w", "x", "y", "z"});
    auto m = are_isomorphic(uniform(2, 4), relabeled);
    REQUIRE(m.has_value());
    CHECK(m->at("e1") == "w");

    CHECK_FALSE(are_isomorphic(uniform(2, 4), uniform(3, 4)).has_value());
    CHECK_FALSE(are_isomorphic(fano(), nonfano()).has_value());

    // self-isomorphism of fano is found and is the identity (lex-least)
    auto f = are_isomorphic(fano(), fano());
    REQUIRE(f.has_value());
    for (auto& [k, v] : *f) CHECK(k == v);
}

TEST_CASE("coindependence") {
    auto m = mk4();
    CHECK(m.is_coindependent(m.ground().mask_of({"12", "13", "23"})));
    auto u24 = uniform(2, 4);
    CHECK_FALSE(u24.is_coindependent(0b0111));
    CHECK(u24.is_coindependent(0));
}

TEST_CASE("rank laws hold exhaustively on small fixtures") {
    std::vector<Matroid> fixtures = {uniform(2, 4), uniform(2, 3), fano(), mk4(), doubled_u23()};
    for (const auto& m : fixtures) {
        INFO("fixture " << m.name());
        const Mask all = m.ground().all();
        REQUIRE(m.size() <= 8);

        // monotone and submodular
        for (Mask s = 0; s <= all; ++s) {
            for (Mask t = 0; t <= all; ++t) {
                if ((s & ~t) == 0) REQUIRE(m.rank_of(s) <= m.rank_of(t));
                REQUIRE(m.rank_of(s | t) + m.rank_of(s & t) <= m.rank_of(s) + m.rank_of(t));
            }
        }
        // closure laws
        for (Mask s = 0; s <= all; ++s) {
            Mask c = m.closure_mask(s);
            REQUIRE((s & ~c) == 0);
            REQUIRE(m.closure_mask(c) == c);
            REQUIRE((m.closure_mask(s & c) & ~c) == 0);
        }
        // dual involution and dual rank identity
        REQUIRE(m.dual().dual() == m);
        const auto d = m.dual();
        for (Mask s = 0; s <= all; ++s)
            REQUIRE(d.rank_of(s) == popcount(s) - m.rank() + m.rank_of(all & ~s));

        // bases and circuits are mutually consistent
        auto circuits = m.circuits();
        for (Mask s = 0; s <= all; ++s) {
            bool circuit_free = true;
            for (Mask c : circuits)
                if ((c & ~s) == 0) circuit_free = false;
            bool maximal_free = circuit_free;
            if (circuit_free) {
                for (int e = 0; e < m.size() && maximal_free; ++e) {
                    if (contains(s, e)) continue;
                    bool still_free = true;
                    for (Mask c : circuits)
                        if ((c & ~(s | bit(e))) == 0) still_free = false;
                    if (still_free) maximal_free = false;
                }
            }
            REQUIRE(m.is_basis(s) == maximal_free);
        }

        // lattice sweep agrees with the powerset oracle
        auto sweep = m.flats_by_rank();
        auto oracle = m.flats_by_rank_powerset();
        REQUIRE(sweep == oracle);
    }
}

TEST_CASE("isomorphism is an equivalence on small matroids") {
    std::vector<Matroid> ms = {uniform(2, 4), uniform(2, 4, {"p", "q", "r", "s"}), mk4()};
    for (auto& a : ms) CHECK(are_isomorphic(a, a).has_value());
    for (auto& a : ms)
        for (auto& b : ms) CHECK(are_isomorphic(a, b).has_value() == are_isomorphic(b, a).has_value());
}
