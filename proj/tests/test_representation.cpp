#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "matrep/catalog.hpp"
#include "matrep/census.hpp"

using namespace matrep;

namespace {

HyperplaneSystem all_ones_system(const Matroid& m, const Pasture& p) {
    auto ctx = MatroidContext::make(m);
    std::vector<std::vector<PElem>> funcs;
    for (Mask h : ctx.hyps) {
        std::vector<PElem> f(m.size(), 0);
        for (int e = 0; e < m.size(); ++e)
            if (!contains(h, e)) f[e] = p.one();
        funcs.push_back(f);
    }
    return make_system(m, p, funcs);
}

/// Independent oracle: enumerate every normalized assignment by
/// odometer, accept a system when every modular triple admits SOME not
/// all zero constants (searched, not derived), then split into orbits by
/// applying the full (P^x)^E action.
struct OracleCensus {
    long iso = 0;
    long rescaling = 0;
    std::vector<std::vector<PElem>> solutions;
};

bool oracle_modular(const HyperplaneSystem& s) {
    const auto& P = s.pasture;
    const auto& m = s.matroid;
    const int u = P.unit_count();
    for (size_t i = 0; i < s.hyps.size(); ++i)
        for (size_t j = i + 1; j < s.hyps.size(); ++j)
            for (size_t k = j + 1; k < s.hyps.size(); ++k) {
                if (!m.is_modular_triple(s.hyps[i], s.hyps[j], s.hyps[k])) continue;
                bool found = false;
                for (PElem c1 = 0; c1 <= u && !found; ++c1)
                    for (PElem c2 = 0; c2 <= u && !found; ++c2)
                        for (PElem c3 = 0; c3 <= u && !found; ++c3) {
                            if (c1 == 0 && c2 == 0 && c3 == 0) continue;
                            bool all_null = true;
                            for (int e = 0; e < m.size() && all_null; ++e)
                                if (!P.is_null(P.mul(c1, s.funcs[i][e]), P.mul(c2, s.funcs[j][e]),
                                               P.mul(c3, s.funcs[k][e])))
                                    all_null = false;
                            found = all_null;
                        }
                if (!found) return false;
            }
    return true;
}

OracleCensus oracle_census(const Matroid& m, const Pasture& p) {
    auto ctx = MatroidContext::make(m);
    std::vector<std::pair<int, int>> slots;  // free (hyperplane, element)
    for (size_t h = 0; h < ctx.hyps.size(); ++h)
        for (int e = 0; e < m.size(); ++e)
            if (!contains(ctx.hyps[h], e) && e != ctx.norm_element[h]) slots.push_back({(int)h, e});

    OracleCensus out;
    std::vector<PElem> odo(slots.size(), 1);
    for (;;) {
        std::vector<std::vector<PElem>> funcs(ctx.hyps.size(), std::vector<PElem>(m.size(), 0));
        for (size_t h = 0; h < ctx.hyps.size(); ++h)
            for (int e = 0; e < m.size(); ++e)
                if (!contains(ctx.hyps[h], e)) funcs[h][e] = p.one();
        for (size_t i = 0; i < slots.size(); ++i) funcs[slots[i].first][slots[i].second] = odo[i];
        auto sys = make_system(m, p, funcs);
        if (oracle_modular(sys)) out.solutions.push_back(sys.flatten());

        size_t d = 0;
        while (d < odo.size() && odo[d] == p.unit_count()) odo[d++] = 1;
        if (d == odo.size()) break;
        odo[d]++;
    }
    out.iso = (long)out.solutions.size();

    // orbits under the full element-scaling action
    std::map<std::vector<PElem>, int> orbit;
    int next_orbit = 0;
    std::vector<PElem> scal(m.size(), 1);
    for (const auto& sol : out.solutions) {
        if (orbit.count(sol)) continue;
        int id = next_orbit++;
        std::fill(scal.begin(), scal.end(), 1);
        for (;;) {
            std::vector<std::vector<PElem>> funcs(ctx.hyps.size(), std::vector<PElem>(m.size()));
            for (size_t h = 0; h < ctx.hyps.size(); ++h)
                for (int e = 0; e < m.size(); ++e) funcs[h][e] = p.mul(scal[e], sol[h * m.size() + e]);
            auto img = normalized(make_system(m, p, funcs)).flatten();
            auto [it, fresh] = orbit.emplace(img, id);
            if (!fresh) REQUIRE(it->second == id);

            size_t d = 0;
            while (d < scal.size() && scal[d] == p.unit_count()) scal[d++] = 1;
            if (d == scal.size()) break;
            scal[d]++;
        }
    }
    out.rescaling = next_orbit;
    return out;
}

}  // namespace

TEST_CASE("modular system checker") {
    SECTION("U23 over gf(2), all ones") { CHECK(is_modular_system(all_ones_system(uniform(2, 3), gf(2)))); }
    SECTION("fano over gf(2), the standard representation") {
        CHECK(is_modular_system(all_ones_system(fano(), gf(2))));
    }
    SECTION("U24 over gf(2) has no modular system") {
        // all-ones is the only support-respecting candidate over gf(2)
        CHECK_FALSE(is_modular_system(all_ones_system(uniform(2, 4), gf(2))));
    }
    SECTION("support violations are reported separately") {
        auto s = all_ones_system(uniform(2, 3), gf(3));
        s.funcs[0][0] = 1;  // hyperplane element must be zero
        try {
            is_modular_system(s);
            FAIL("expected throw");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::SupportViolation);
        }
    }
    SECTION("the checker reports the first failing triple") {
        auto ctx = MatroidContext::make(uniform(2, 4));
        auto check = check_modular_system(all_ones_system(uniform(2, 4), gf(2)), ctx);
        CHECK_FALSE(check.ok);
        CHECK(!check.witness.empty());
    }
}

TEST_CASE("census agrees with the unoptimized powerset oracle") {
    struct Case {
        Matroid m;
        std::string pasture;
    };
    std::vector<Case> cases = {
        {uniform(2, 3), "gf(2)"}, {uniform(2, 3), "gf(3)"}, {uniform(2, 3), "sign"},
        {uniform(2, 4), "gf(2)"}, {uniform(2, 4), "gf(3)"}, {uniform(2, 4), "gf(4)"},
        {uniform(2, 4), "sign"},  {uniform(2, 4), "f1pm"},  {uniform(2, 4), "krasner"},
        {uniform(1, 2), "gf(3)"}, {uniform(3, 4), "gf(3)"},
    };
    for (const auto& c : cases) {
        INFO(c.m.name() << " over " << c.pasture);
        auto p = builtin_pasture(c.pasture);
        auto fast = enumerate_census(c.m, p);
        auto slow = oracle_census(c.m, p);
        CHECK(fast.iso_count == slow.iso);
        CHECK(fast.rescaling_count == slow.rescaling);
        auto sorted_fast = fast.solutions;
        std::sort(sorted_fast.begin(), sorted_fast.end());
        std::sort(slow.solutions.begin(), slow.solutions.end());
        CHECK(sorted_fast == slow.solutions);
    }
}

TEST_CASE("known representability counts") {
    CHECK(enumerate_census(uniform(2, 4), gf(2)).iso_count == 0);
    CHECK(enumerate_census(uniform(2, 4), gf(3)).rescaling_count == 1);
    CHECK(enumerate_census(uniform(2, 4), gf(4)).rescaling_count == 2);
    auto f7_gf2 = enumerate_census(fano(), gf(2));
    CHECK(f7_gf2.rescaling_count == 1);
    CHECK(enumerate_census(fano(), sign_hyperfield()).iso_count == 0);
    for (const auto& name : {"gf(2)", "gf(3)", "gf(4)", "f1pm", "sign", "krasner"}) {
        INFO(name);
        CHECK(enumerate_census(mk4(), builtin_pasture(name)).rescaling_count == 1);
    }
}

TEST_CASE("census of degenerate ranks") {
    // rank 0: single empty-hyperplane class
    auto loops = Matroid::from_bases(GroundSet({"a", "b"}), {0u});
    auto c0 = enumerate_census(loops, gf(3));
    CHECK(c0.iso_count == 1);
    CHECK(c0.rescaling_count == 1);

    // rank 1: the unique hyperplane is the set of loops
    auto c1 = enumerate_census(uniform(1, 2), gf(3));
    CHECK(c1.iso_count == 2);
    CHECK(c1.rescaling_count == 1);
}

TEST_CASE("rescaling invariance of modularity") {
    auto p = gf(4);
    auto census = enumerate_census(uniform(2, 4), p);
    REQUIRE(!census.representatives.empty());
    std::mt19937 rng(20240811);
    std::uniform_int_distribution<int> unit(1, p.unit_count());
    for (int trial = 0; trial < 25; ++trial) {
        auto s = census.representatives[trial % census.representatives.size()];
        for (size_t h = 0; h < s.hyps.size(); ++h) s = scale_hyperplane(s, h, unit(rng));
        for (int e = 0; e < s.matroid.size(); ++e) s = scale_element(s, e, unit(rng));
        CHECK(is_modular_system(s));
        CHECK(rescaling_equivalent(s, census.representatives[trial % census.representatives.size()]));
    }
}

TEST_CASE("class lookup identifies representatives") {
    auto census = enumerate_census(uniform(2, 4), gf(4));
    REQUIRE(census.rescaling_count == 2);
    auto c0 = census.class_of(census.representatives[0]);
    auto c1 = census.class_of(census.representatives[1]);
    REQUIRE(c0.has_value());
    REQUIRE(c1.has_value());
    CHECK(*c0 != *c1);
    // scaled copies land in the same class
    auto scaled = scale_element(scale_hyperplane(census.representatives[0], 0, 2), 1, 3);
    auto c0b = census.class_of(scaled);
    REQUIRE(c0b.has_value());
    CHECK(*c0b == *c0);
}

TEST_CASE("orientability") {
    CHECK(is_orientable(uniform(2, 4)));
    CHECK_FALSE(is_orientable(fano()));
    CHECK(is_orientable(mk4()));
}

TEST_CASE("search budget is a distinct failure") {
    CensusOptions opt;
    opt.budget = 10;
    try {
        enumerate_census(uniform(2, 4), gf(4), opt);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SearchBudgetExceeded);
    }
}

TEST_CASE("parallel enumeration matches serial") {
    CensusOptions serial, parallel;
    parallel.threads = 4;
    auto a = enumerate_census(mk4(), gf(4), serial);
    auto b = enumerate_census(mk4(), gf(4), parallel);
    CHECK(a.solutions == b.solutions);
    CHECK(a.orbit_of == b.orbit_of);
    CHECK(a.rescaling_count == b.rescaling_count);
}

TEST_CASE("pushforward along a morphism preserves modularity") {
    auto p = gf(4);
    auto frobenius = all_morphisms(p, p).back();
    REQUIRE(!(frobenius == identity_morphism(p)));
    auto census = enumerate_census(uniform(2, 4), p);
    for (const auto& rep : census.representatives) {
        auto pushed = pushforward(rep, frobenius);
        CHECK(is_modular_system(pushed));
    }
}

TEST_CASE("every morphism between small built-ins pushes censuses forward") {
    std::vector<std::string> names = {"gf(2)", "gf(3)", "gf(4)", "gf(5)", "f1pm", "sign", "krasner"};
    auto m = uniform(2, 4);
    std::map<std::string, ClassCensus> censuses;
    for (const auto& n : names) censuses.emplace(n, enumerate_census(m, builtin_pasture(n)));
    for (const auto& a : names)
        for (const auto& b : names)
            for (const auto& f : all_morphisms(builtin_pasture(a), builtin_pasture(b))) {
                INFO(a << " -> " << b);
                for (const auto& rep : censuses.at(a).representatives) {
                    auto pushed = pushforward(rep, f);
                    CHECK(is_modular_system(pushed));
                    // the image lands in the target census
                    CHECK(censuses.at(b).class_of(pushed).has_value());
                }
            }
}
