#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

#include "matrep/catalog.hpp"
#include "matrep/io.hpp"

using namespace matrep;

namespace {

std::string data_dir() {
    // tests run from the build tree; the fixtures live next to the sources
    for (auto base : {"data", "../data", "../../data", "../../../data"})
        if (std::filesystem::exists(std::string(base) + "/fano.json")) return base;
    return "data";
}

std::string tmp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("matroid files") {
    SECTION("fano fixture loads") {
        auto m = load_matroid(data_dir() + "/fano.json");
        CHECK(m.name() == "fano");
        CHECK(m.rank() == 3);
        CHECK(m.bases().size() == 28);
    }
    SECTION("parse errors carry context") {
        auto bad = tmp_path("matrep_bad_matroid.json");
        write_file(bad, "{\"elements\": [\"a\"], \"bases\": [[\"a\"], \"oops\"]}");
        try {
            load_matroid(bad);
            FAIL("expected throw");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ParseError);
            CHECK(std::string(e.what()).find("bases[1]") != std::string::npos);
        }
        std::remove(bad.c_str());
    }
    SECTION("validation errors are wrapped") {
        auto bad = tmp_path("matrep_bad_matroid2.json");
        write_file(bad, "{\"elements\": [\"a\", \"b\"], \"bases\": [[\"a\"], [\"a\", \"b\"]]}");
        try {
            load_matroid(bad);
            FAIL("expected throw");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ValidationError);
        }
        std::remove(bad.c_str());
    }
    SECTION("save-load round trip is byte identical on canonical files") {
        auto m = mk4();
        auto path = tmp_path("matrep_roundtrip.json");
        save_matroid(m, path);
        auto text1 = read_file(path);
        auto loaded = load_matroid(path);
        CHECK(loaded == m);
        save_matroid(loaded, path);
        CHECK(read_file(path) == text1);
        std::remove(path.c_str());
    }
    SECTION("whitespace does not matter") {
        auto path = tmp_path("matrep_ws.json");
        write_file(path, "{\"name\":\"x\",\"elements\":[\"a\",\"b\"],\"bases\":[[\"a\"],[\"b\"]]}");
        auto m = load_matroid(path);
        CHECK(m.rank() == 1);
        std::remove(path.c_str());
    }
}

TEST_CASE("pasture files") {
    SECTION("built-ins load by name") {
        auto p = load_pasture("sign");
        CHECK(p.unit_count() == 2);
    }
    SECTION("file round trip") {
        auto path = tmp_path("matrep_pasture.json");
        save_pasture(gf(4), path);
        auto p = load_pasture(path);
        CHECK(p == gf(4));
        auto text1 = read_file(path);
        save_pasture(p, path);
        CHECK(read_file(path) == text1);
        std::remove(path.c_str());
    }
    SECTION("fixture pasture file") {
        auto p = load_pasture(data_dir() + "/f1pm.json");
        CHECK(p == f1pm());
    }
    SECTION("axiom failures are wrapped as validation errors") {
        auto path = tmp_path("matrep_bad_pasture.json");
        write_file(path,
                   "{\"units\": [\"1\", \"-1\"], \"mul\": [[\"1\",\"1\",\"1\"],[\"1\",\"-1\",\"-1\"],"
                   "[\"-1\",\"1\",\"-1\"],[\"-1\",\"-1\",\"1\"]], \"null_generators\": []}");
        try {
            load_pasture(path);
            FAIL("expected throw");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ValidationError);
            CHECK(std::string(e.what()).find("P3Missing") != std::string::npos);
        }
        std::remove(path.c_str());
    }
}

TEST_CASE("digest is stable") {
    CHECK(digest("abc") == digest("abc"));
    CHECK(digest("abc") != digest("abd"));
}
