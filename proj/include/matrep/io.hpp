#pragma once

#include <fstream>
#include <json.hpp>

#include "matrep/matroid.hpp"
#include "matrep/pasture.hpp"

namespace matrep {

using json = nlohmann::ordered_json;

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::ParseError, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::ParseError, "cannot write '" + path + "'");
    out << content;
}

/// FNV-1a, for the input digests in reports.
inline std::string digest(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

inline Matroid matroid_from_json(const json& j) {
    if (!j.is_object()) fail(ErrorCode::ParseError, "matroid document must be an object");
    if (!j.contains("elements") || !j["elements"].is_array())
        fail(ErrorCode::ParseError, "matroid field 'elements' missing or not an array");
    if (!j.contains("bases") || !j["bases"].is_array())
        fail(ErrorCode::ParseError, "matroid field 'bases' missing or not an array");
    std::vector<std::string> labels;
    for (const auto& e : j["elements"]) {
        if (!e.is_string()) fail(ErrorCode::ParseError, "matroid elements must be strings");
        labels.push_back(e.get<std::string>());
    }
    GroundSet g;
    try {
        g = GroundSet(labels);
    } catch (const Error& e) {
        fail(ErrorCode::ValidationError, e.what());
    }
    std::vector<Mask> bases;
    int row = 0;
    for (const auto& b : j["bases"]) {
        if (!b.is_array())
            fail(ErrorCode::ParseError, "bases[" + std::to_string(row) + "] is not an array of labels");
        Mask m = 0;
        for (const auto& e : b) {
            if (!e.is_string()) fail(ErrorCode::ParseError, "bases[" + std::to_string(row) + "] has a non-string");
            m |= bit(g.index_of(e.get<std::string>()));
        }
        bases.push_back(m);
        row++;
    }
    std::string name = j.value("name", "");
    try {
        return Matroid::from_bases(std::move(g), std::move(bases), name);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ElementNotInGround) throw;
        fail(ErrorCode::ValidationError, e.what());
    }
}

inline Matroid load_matroid(const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ParseError, path + ": " + e.what());
    }
    return matroid_from_json(j);
}

inline json matroid_to_json(const Matroid& m) {
    json j;
    j["name"] = m.name();
    j["elements"] = m.ground().labels();
    json bases = json::array();
    for (Mask b : m.bases()) bases.push_back(m.ground().labels_of(b));
    j["bases"] = bases;
    return j;
}

inline std::string matroid_to_text(const Matroid& m) { return matroid_to_json(m).dump(2) + "\n"; }

inline void save_matroid(const Matroid& m, const std::string& path) { write_file(path, matroid_to_text(m)); }

inline Pasture pasture_from_json(const json& j) {
    if (!j.is_object()) fail(ErrorCode::ParseError, "pasture document must be an object");
    for (const char* field : {"units", "mul", "null_generators"})
        if (!j.contains(field)) fail(ErrorCode::ParseError, std::string("pasture field '") + field + "' missing");
    std::vector<std::string> units;
    for (const auto& u : j["units"]) units.push_back(u.get<std::string>());
    auto unit_index = [&](const std::string& lab) -> int {
        for (size_t i = 0; i < units.size(); ++i)
            if (units[i] == lab) return static_cast<int>(i) + 1;
        fail(ErrorCode::ParseError, "unknown unit '" + lab + "'");
    };
    std::vector<std::vector<int>> table(units.size() + 1, std::vector<int>(units.size() + 1, 0));
    for (const auto& row : j["mul"]) {
        if (!row.is_array() || row.size() != 3) fail(ErrorCode::ParseError, "mul rows are [a, b, ab] triples");
        table[unit_index(row[0])][unit_index(row[1])] = unit_index(row[2]);
    }
    for (size_t a = 1; a <= units.size(); ++a)
        for (size_t b = 1; b <= units.size(); ++b)
            if (table[a][b] == 0)
                fail(ErrorCode::ParseError, "mul table is missing " + units[a - 1] + "*" + units[b - 1]);
    std::vector<NullTriple> gens;
    auto elem = [&](const json& v) -> PElem {
        std::string s = v.get<std::string>();
        return s == "0" ? 0 : unit_index(s);
    };
    for (const auto& row : j["null_generators"]) {
        if (!row.is_array() || row.size() != 3)
            fail(ErrorCode::ParseError, "null_generators rows are [a, b, c] triples");
        gens.push_back(make_triple(elem(row[0]), elem(row[1]), elem(row[2])));
    }
    try {
        return Pasture::make(j.value("name", "pasture"), units,
                             [&](int a, int b) { return table[a][b]; }, gens);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ParseError) throw;
        fail(ErrorCode::ValidationError, e.what());
    }
}

/// Accepts a built-in name or a file path.
inline Pasture load_pasture(const std::string& path_or_name) {
    for (const auto& name : builtin_pasture_names())
        if (name == path_or_name) return builtin_pasture(name);
    json j;
    try {
        j = json::parse(read_file(path_or_name));
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ParseError, path_or_name + ": " + e.what());
    }
    return pasture_from_json(j);
}

inline json pasture_to_json(const Pasture& p) {
    json j;
    j["name"] = p.name();
    j["units"] = p.unit_labels();
    json mul = json::array();
    for (int a = 1; a <= p.unit_count(); ++a)
        for (int b = 1; b <= p.unit_count(); ++b)
            mul.push_back(std::vector<std::string>{p.label(a), p.label(b), p.label(p.mul(a, b))});
    j["mul"] = mul;
    json gens = json::array();
    for (const auto& t : p.null_orbit_representatives())
        gens.push_back(std::vector<std::string>{p.label(t.a), p.label(t.b), p.label(t.c)});
    j["null_generators"] = gens;
    return j;
}

inline std::string pasture_to_text(const Pasture& p) { return pasture_to_json(p).dump(2) + "\n"; }

inline void save_pasture(const Pasture& p, const std::string& path) { write_file(path, pasture_to_text(p)); }

}  // namespace matrep
