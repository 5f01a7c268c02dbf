// Command-line front end: matroid/pasture file IO, the constructions,
// census enumeration, and the one-shot theorem verification suites.

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <iostream>

#include "matrep/catalog.hpp"
#include "matrep/census.hpp"
#include "matrep/io.hpp"
#include "matrep/verify.hpp"

using namespace matrep;

namespace {

struct GlobalOpts {
    std::uint64_t budget = 100'000'000;
    int threads = 1;
    bool quiet = false;
};

CensusOptions census_options(const GlobalOpts& g) {
    CensusOptions o;
    o.budget = g.budget;
    o.threads = g.threads;
    return o;
}

std::vector<std::pair<std::string, std::string>> parse_identification(const std::string& arg) {
    std::vector<std::pair<std::string, std::string>> out;
    std::stringstream ss(arg);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) fail(ErrorCode::ParseError, "--identify expects a=x,b=y pairs");
        out.push_back({item.substr(0, eq), item.substr(eq + 1)});
    }
    return out;
}

std::vector<std::string> split_labels(const std::string& arg) {
    std::vector<std::string> out;
    std::stringstream ss(arg);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

/// Default verification suite: every built-in with at most 4 units.
/// gf(7), gf(8) and gf(9) are opt-in via --pastures.
std::vector<Pasture> parse_pastures(const std::string& arg) {
    std::vector<Pasture> out;
    if (arg.empty()) {
        for (const auto& name : builtin_pasture_names()) {
            auto p = builtin_pasture(name);
            if (p.unit_count() <= 4) out.push_back(p);
        }
        return out;
    }
    for (const auto& name : split_labels(arg)) out.push_back(load_pasture(name));
    return out;
}

void add_input(Report& r, const std::string& name, const std::string& path_or_builtin) {
    std::string bytes;
    try {
        bytes = read_file(path_or_builtin);
    } catch (const Error&) {
        bytes = path_or_builtin;  // built-in name
    }
    r.inputs.push_back({name, digest(bytes)});
}

int finish(Report& r, const GlobalOpts& g, std::chrono::steady_clock::time_point t0) {
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.render(std::cout, g.quiet);
    return r.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact matroid representations over finite pastures"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOpts g;
    if (const char* env = std::getenv("MF_THREADS")) g.threads = std::max(1, std::atoi(env));
    app.add_option("--budget", g.budget, "search node budget");
    app.add_option("--threads", g.threads, "worker threads for enumeration");
    app.add_flag("--quiet", g.quiet, "print only counts and the outcome");

    std::string info_path;
    auto* info = app.add_subcommand("info", "summarize a matroid file");
    info->add_option("matroid", info_path)->required();

    auto* construct = app.add_subcommand("construct", "build a matroid and write it out");
    std::string kind, out_path = "out.json", c_identify, c_p, c_elems, c_ylabels;
    std::vector<std::string> c_inputs;
    int c_n = 3;
    bool c_prefix = false;
    construct->add_option("kind", kind, "gpc|2sum|scse|dy|theta|dual|directsum")->required();
    construct->add_option("inputs", c_inputs, "input matroid files");
    construct->add_option("-o,--out", out_path, "output file");
    construct->add_option("--identify", c_identify, "gluing pairs a=x,b=y");
    construct->add_option("--p", c_p, "2-sum basepoint label");
    construct->add_option("--x,--t", c_elems, "segment (or triangle) labels a,b,c");
    construct->add_option("--y", c_ylabels, "fresh labels for the cosegment");
    construct->add_option("--n", c_n, "theta size");
    construct->add_flag("--prefix", c_prefix, "prefix labels in a direct sum");

    auto* census_cmd = app.add_subcommand("census", "count representation classes");
    std::string cen_matroid, cen_pasture, cen_classes = "rescaling";
    bool cen_dump = false;
    census_cmd->add_option("matroid", cen_matroid)->required();
    census_cmd->add_option("pasture", cen_pasture)->required();
    census_cmd->add_option("--classes", cen_classes, "iso|rescaling");
    census_cmd->add_flag("--dump", cen_dump, "print one representative per class");

    auto* verify_cmd = app.add_subcommand("verify", "run a theorem verification suite");
    std::string thm, v_m1, v_m2, v_m, v_identify, v_p, v_x, v_pastures;
    verify_cmd->add_option("theorem", thm, "a|b|c")->required();
    verify_cmd->add_option("--m1", v_m1);
    verify_cmd->add_option("--m2", v_m2);
    verify_cmd->add_option("--m", v_m);
    verify_cmd->add_option("--identify", v_identify, "gluing pairs for theorem a");
    verify_cmd->add_option("--p", v_p, "basepoint for theorem b");
    verify_cmd->add_option("--x", v_x, "segment labels for theorem c");
    verify_cmd->add_option("--pastures", v_pastures, "comma-separated pasture list");

    auto* orient = app.add_subcommand("orientable", "test Hom(F_M, S) nonempty");
    std::string or_path;
    orient->add_option("matroid", or_path)->required();

    auto* morph = app.add_subcommand("morphisms", "enumerate pasture morphisms");
    std::string mo_src, mo_dst;
    morph->add_option("source", mo_src)->required();
    morph->add_option("target", mo_dst)->required();

    CLI11_PARSE(app, argc, argv);
    auto t0 = std::chrono::steady_clock::now();

    try {
        if (*info) {
            auto m = load_matroid(info_path);
            Report r;
            r.command = "info";
            add_input(r, "matroid", info_path);
            r.counts.push_back("name: " + (m.name().empty() ? std::string("(unnamed)") : m.name()));
            r.counts.push_back("elements: " + std::to_string(m.size()));
            r.counts.push_back("rank: " + std::to_string(m.rank()));
            r.counts.push_back("bases: " + std::to_string(m.bases().size()));
            r.counts.push_back("hyperplanes: " + std::to_string(m.hyperplanes().size()));
            r.counts.push_back("circuits: " + std::to_string(m.circuits().size()));
            r.counts.push_back("components: " + std::to_string(m.components().size()));
            r.counts.push_back(std::string("simple: ") + (m.is_simple() ? "yes" : "no"));
            return finish(r, g, t0);
        }

        if (*construct) {
            auto input = [&](size_t i) -> std::string {
                if (c_inputs.size() <= i) fail(ErrorCode::ParseError, "construct needs more input files");
                return c_inputs[i];
            };
            Matroid out;
            if (kind == "theta") {
                out = theta(ThetaSpec::standard(c_n));
            } else if (kind == "dual") {
                out = load_matroid(input(0)).dual();
            } else if (kind == "directsum") {
                out = direct_sum(load_matroid(input(0)), load_matroid(input(1)), c_prefix);
            } else if (kind == "gpc") {
                Gluing glue{load_matroid(input(0)), load_matroid(input(1)), parse_identification(c_identify)};
                out = generalized_parallel_connection(glue);
            } else if (kind == "2sum") {
                out = two_sum(load_matroid(input(0)), load_matroid(input(1)), c_p);
            } else if (kind == "scse" || kind == "dy") {
                auto m = load_matroid(input(0));
                Mask x = m.ground().mask_of(split_labels(c_elems));
                auto ys = c_ylabels.empty() ? std::vector<std::string>{} : split_labels(c_ylabels);
                out = kind == "dy" ? delta_wye(m, x, ys) : segment_cosegment_exchange(m, x, ys);
            } else {
                fail(ErrorCode::ParseError, "unknown construction '" + kind + "'");
            }
            save_matroid(out, out_path);
            Report r;
            r.command = "construct " + kind;
            r.counts.push_back("wrote " + out_path + ": " + std::to_string(out.size()) + " elements, rank " +
                               std::to_string(out.rank()) + ", " + std::to_string(out.bases().size()) + " bases");
            return finish(r, g, t0);
        }

        if (*census_cmd) {
            auto m = load_matroid(cen_matroid);
            auto p = load_pasture(cen_pasture);
            if (cen_classes != "iso" && cen_classes != "rescaling")
                fail(ErrorCode::ParseError, "--classes must be iso or rescaling");
            auto census = enumerate_census(m, p, census_options(g));
            Report r;
            r.command = "census";
            add_input(r, "matroid", cen_matroid);
            add_input(r, "pasture", cen_pasture);
            long headline = cen_classes == "iso" ? census.iso_count : census.rescaling_count;
            r.counts.push_back(cen_classes + " classes: " + std::to_string(headline));
            if (!g.quiet)
                r.counts.push_back("iso: " + std::to_string(census.iso_count) +
                                   "  rescaling: " + std::to_string(census.rescaling_count));
            int rc = finish(r, g, t0);
            if (cen_dump)
                for (const auto& rep : census.representatives) std::cout << system_to_text(rep) << "\n";
            return rc;
        }

        if (*verify_cmd) {
            auto pastures = parse_pastures(v_pastures);
            Report r;
            r.command = "verify " + thm;
            VerifyResult result;
            if (thm == "a") {
                Gluing glue{load_matroid(v_m1), load_matroid(v_m2), parse_identification(v_identify)};
                add_input(r, "m1", v_m1);
                add_input(r, "m2", v_m2);
                auto b = gpc_build(glue);
                result = verify_theorem_a(b, pastures, census_options(g));
            } else if (thm == "b") {
                add_input(r, "m1", v_m1);
                add_input(r, "m2", v_m2);
                result = verify_theorem_b(load_matroid(v_m1), load_matroid(v_m2), v_p, pastures,
                                          census_options(g));
            } else if (thm == "c") {
                add_input(r, "m", v_m);
                auto m = load_matroid(v_m);
                result =
                    verify_theorem_c(m, m.ground().mask_of(split_labels(v_x)), pastures, census_options(g));
            } else {
                fail(ErrorCode::ParseError, "theorem must be a, b, or c");
            }
            r.counts = result.lines;
            r.witnesses = result.witnesses;
            return finish(r, g, t0);
        }

        if (*orient) {
            auto m = load_matroid(or_path);
            Report r;
            r.command = "orientable";
            add_input(r, "matroid", or_path);
            bool yes = is_orientable(m, census_options(g));
            r.counts.push_back(std::string("orientable: ") + (yes ? "yes" : "no"));
            return finish(r, g, t0);
        }

        if (*morph) {
            auto src = load_pasture(mo_src);
            auto dst = load_pasture(mo_dst);
            auto ms = all_morphisms(src, dst);
            Report r;
            r.command = "morphisms";
            r.counts.push_back("morphisms: " + std::to_string(ms.size()));
            if (!g.quiet)
                for (const auto& f : ms) {
                    std::string line;
                    for (int a = 1; a <= src.unit_count(); ++a)
                        line += src.label(a) + "->" + dst.label(f.map[a]) + " ";
                    r.counts.push_back(line);
                }
            return finish(r, g, t0);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
