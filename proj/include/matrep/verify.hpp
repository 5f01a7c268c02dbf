#pragma once

#include <chrono>
#include <iomanip>
#include <sstream>

#include "matrep/census.hpp"
#include "matrep/gluing_maps.hpp"

namespace matrep {

/// One verification outcome: count lines for the report body plus
/// failure witnesses. Pass means no witnesses.
struct VerifyResult {
    std::vector<std::string> lines;
    std::vector<std::string> witnesses;

    bool pass() const { return witnesses.empty(); }

    void note(const std::string& s) { lines.push_back(s); }
    void problem(const std::string& s) { witnesses.push_back(s); }

    void merge(const VerifyResult& o) {
        lines.insert(lines.end(), o.lines.begin(), o.lines.end());
        witnesses.insert(witnesses.end(), o.witnesses.begin(), o.witnesses.end());
    }
};

namespace detail {

/// Element scalars on the core ground set that carry r2 into the
/// isomorphism class of r1, found by scanning the finite torus. The
/// fiber product lives at rescaling level, so two T-compatible side
/// classes need such an alignment before they can be glued.
inline std::optional<std::vector<PElem>> core_alignment(const HyperplaneSystem& r1,
                                                        const HyperplaneSystem& r2) {
    const auto& P = r1.pasture;
    const int n = r1.matroid.size();
    auto target = normalized(r1).funcs;
    std::vector<PElem> scal(n, P.one());
    if (n == 0) return scal;
    for (;;) {
        auto scaled = r2;
        for (int e = 0; e < n; ++e)
            if (scal[e] != P.one()) scaled = scale_element(scaled, e, scal[e]);
        if (normalized(scaled).funcs == target) return scal;
        int d = 0;
        while (d < n && scal[d] == P.unit_count()) scal[d++] = 1;
        if (d == n) return std::nullopt;
        scal[d]++;
    }
}

/// Applies core-element scalars to a side system. Core elements carry
/// left labels; the matching right element is found through the glued
/// index, not by label.
inline HyperplaneSystem apply_core_scalars(const HyperplaneSystem& side_sys, const GpcBuild& b, int side,
                                           const std::vector<PElem>& scal) {
    auto out = side_sys;
    const auto& P = out.pasture;
    const auto& to_glued = side == 1 ? b.left_to_glued : b.right_to_glued;
    for (int ce = 0; ce < b.core.size(); ++ce) {
        if (scal[ce] == P.one()) continue;
        int glued = b.left_to_glued[b.left.ground().index_of(b.core.ground().label(ce))];
        int se = -1;
        for (int e = 0; e < side_sys.matroid.size(); ++e)
            if (to_glued[e] == glued) se = e;
        if (se < 0) fail(ErrorCode::InternalError, "core element missing from side");
        out = scale_element(out, se, scal[ce]);
    }
    return out;
}

}  // namespace detail

/// Checks that restriction induces a bijection between the rescaling
/// classes of the connection and the T-compatible pairs of side classes.
/// Surjectivity is witnessed constructively: by gluing when T is modular
/// on both sides, through the theta extension when the right side is a
/// theta matroid glued along a line.
inline VerifyResult verify_fiber_product(const GpcBuild& b, const Pasture& p, const CensusOptions& opt = {},
                                         const std::optional<ThetaSpec>& theta_spec = std::nullopt) {
    VerifyResult r;
    auto cm = enumerate_census(b.matroid, p, opt);
    auto c1 = enumerate_census(b.left, p, opt);
    auto c2 = enumerate_census(b.right, p, opt);
    auto ct = enumerate_census(b.core, p, opt);

    // side class -> core class
    auto core_class_of_side = [&](const ClassCensus& side_census, int side) {
        std::vector<int> map;
        for (const auto& rep : side_census.representatives) {
            auto cls = ct.class_of(restrict_to_core(rep, b, side));
            if (!cls) {
                r.problem("side " + std::to_string(side) + " class does not restrict into the core census");
                map.push_back(-1);
            } else {
                map.push_back(*cls);
            }
        }
        return map;
    };
    auto core1 = core_class_of_side(c1, 1);
    auto core2 = core_class_of_side(c2, 2);

    long fiber = 0;
    for (size_t i = 0; i < core1.size(); ++i)
        for (size_t j = 0; j < core2.size(); ++j)
            if (core1[i] >= 0 && core1[i] == core2[j]) fiber++;

    std::ostringstream os;
    os << p.name() << ": |X(M)| = " << cm.rescaling_count << ", |X(M1)| = " << c1.rescaling_count
       << ", |X(M2)| = " << c2.rescaling_count << ", |X(T)| = " << ct.rescaling_count
       << ", fiber product = " << fiber;
    r.note(os.str());

    if (cm.rescaling_count != fiber)
        r.problem(p.name() + ": connection census " + std::to_string(cm.rescaling_count) +
                  " != fiber product " + std::to_string(fiber));

    // restriction map on classes: well-defined, compatible, injective
    std::set<std::pair<int, int>> image;
    for (const auto& rep : cm.representatives) {
        auto r1 = restrict_system(rep, b, 1);
        auto r2 = restrict_system(rep, b, 2);
        auto k1 = c1.class_of(r1);
        auto k2 = c2.class_of(r2);
        if (!k1 || !k2) {
            r.problem(p.name() + ": restriction of a representative is missing from a side census");
            continue;
        }
        auto t1 = ct.class_of(restrict_to_core(r1, b, 1));
        auto t2 = ct.class_of(restrict_to_core(r2, b, 2));
        if (!t1 || !t2 || *t1 != *t2) {
            r.problem(p.name() + ": restrictions disagree on the core");
            continue;
        }
        if (!image.insert({*k1, *k2}).second) r.problem(p.name() + ": restriction map is not injective");
    }

    // surjectivity, constructively
    for (size_t i = 0; i < c1.representatives.size(); ++i) {
        if (b.modular_in_left && b.modular_in_right) {
            for (size_t j = 0; j < c2.representatives.size(); ++j) {
                if (core1[i] < 0 || core1[i] != core2[j]) continue;
                // align the right side's T-restriction into the left's
                // isomorphism class before gluing
                auto r1 = restrict_to_core(c1.representatives[i], b, 1);
                auto r2 = restrict_to_core(c2.representatives[j], b, 2);
                auto align = detail::core_alignment(r1, r2);
                if (!align) {
                    r.problem(p.name() + ": T-compatible classes admit no core alignment");
                    continue;
                }
                auto s2 = detail::apply_core_scalars(c2.representatives[j], b, 2, *align);
                auto glued = glue_gpc(c1.representatives[i], s2, b);
                if (!cm.class_of(glued))
                    r.problem(p.name() + ": glued system is missing from the connection census");
                auto back1 = c1.class_of(restrict_system(glued, b, 1));
                auto back2 = c2.class_of(restrict_system(glued, b, 2));
                if (!back1 || !back2 || *back1 != static_cast<int>(i) || *back2 != static_cast<int>(j))
                    r.problem(p.name() + ": gluing then restricting changed the class pair");
            }
        } else if (theta_spec && theta_spec->n >= 3) {
            auto ext = theta_extend(c1.representatives[i], b, *theta_spec);
            if (!cm.class_of(ext)) r.problem(p.name() + ": theta extension missing from the connection census");
            auto back = c1.class_of(restrict_system(ext, b, 1));
            if (!back || *back != static_cast<int>(i))
                r.problem(p.name() + ": theta extension does not restrict back to its class");
        } else {
            r.problem("no constructive surjectivity route for this gluing");
            break;
        }
    }
    if (image.size() != static_cast<size_t>(fiber) && cm.rescaling_count == fiber)
        r.problem(p.name() + ": image of restriction does not fill the fiber product");
    return r;
}

/// Theorem suite: the foundation of a generalized parallel connection,
/// checked as hom-set fiber-product bijections over each pasture.
inline VerifyResult verify_theorem_a(const GpcBuild& b, const std::vector<Pasture>& pastures,
                                     const CensusOptions& opt = {},
                                     const std::optional<ThetaSpec>& theta_spec = std::nullopt) {
    VerifyResult r;
    if (!b.modular_in_right)
        r.problem("hypothesis ModularInRight failed");
    if (!b.modular_in_left && !(theta_spec && b.core.rank() == 2))
        r.problem("hypothesis ModularInLeft (or a theta gluing along a line) failed");
    if (!r.pass()) return r;
    for (const auto& p : pastures) r.merge(verify_fiber_product(b, p, opt, theta_spec));
    return r;
}

/// Theorem suite: foundations of 2-sums. Census products, the maps Phi
/// and Psi witness-by-witness, and independence from the choice of H0.
inline VerifyResult verify_theorem_b(const Matroid& m1, const Matroid& m2, const std::string& p_label,
                                     const std::vector<Pasture>& pastures, const CensusOptions& opt = {}) {
    VerifyResult r;
    if (!m1.is_simple() || !m2.is_simple()) {
        r.problem("hypothesis Simple failed: both summands must be simple");
        return r;
    }
    if (!m1.ground().has(p_label) || !m2.ground().has(p_label)) {
        r.problem("hypothesis Basepoint failed: '" + p_label + "' must lie in both ground sets");
        return r;
    }
    TwoSumBuild b;
    try {
        b = two_sum_build(m1, m2, p_label);
    } catch (const Error& e) {
        r.problem(std::string("hypothesis failed: ") + e.what());
        return r;
    }

    for (const auto& p : pastures) {
        auto cs = enumerate_census(b.sum, p, opt);
        auto cpc = enumerate_census(b.pc.matroid, p, opt);
        auto ca = enumerate_census(m1, p, opt);
        auto cb = enumerate_census(m2, p, opt);
        std::ostringstream os;
        os << p.name() << ": |X(M1+M2)| = " << cs.rescaling_count << ", |X(M1)| = " << ca.rescaling_count
           << ", |X(M2)| = " << cb.rescaling_count;
        r.note(os.str());
        if (cs.rescaling_count != ca.rescaling_count * cb.rescaling_count)
            r.problem(p.name() + ": 2-sum census is not the product of the summand censuses");
        if (cs.rescaling_count != cpc.rescaling_count)
            r.problem(p.name() + ": 2-sum and parallel connection censuses differ");

        for (const auto& rep : cs.representatives) {
            auto lifted = two_sum_psi(rep, b);
            if (two_sum_phi(lifted, b).funcs != rep.funcs)
                r.problem(p.name() + ": Phi(Psi(.)) is not the identity");
            for (int h0 : admissible_h0(b))
                if (!rescaling_equivalent(two_sum_psi(rep, b, h0), lifted))
                    r.problem(p.name() + ": extension depends on the choice of H0");
        }
        for (const auto& rep : cpc.representatives)
            if (!rescaling_equivalent(two_sum_psi(two_sum_phi(rep, b), b), rep))
                r.problem(p.name() + ": Psi(Phi(.)) left the rescaling class");

        r.merge(verify_fiber_product(b.pc, p, opt));
    }
    return r;
}

/// Theorem suite: the foundation is invariant under segment-cosegment
/// exchange, checked as census equalities plus the class bijection
/// between the host and the theta connection.
inline VerifyResult verify_theorem_c(const Matroid& m, Mask x, const std::vector<Pasture>& pastures,
                                     const CensusOptions& opt = {}) {
    VerifyResult r;
    ScseBuild build;
    try {
        build = scse_build(m, x);
    } catch (const Error& e) {
        r.problem(std::string("hypothesis failed: ") + e.what());
        return r;
    }
    const int n = build.spec.n;

    if (m.components().size() != build.exchanged.components().size())
        r.problem("component count changed under the exchange");
    if (n == 2 && !are_isomorphic(build.exchanged, m))
        r.problem("n = 2 exchange is not isomorphic to the input");

    for (const auto& p : pastures) {
        auto cm = enumerate_census(m, p, opt);
        auto cx = enumerate_census(build.exchanged, p, opt);
        std::ostringstream os;
        os << p.name() << ": |X(M)| = " << cm.rescaling_count << ", |X(M')| = " << cx.rescaling_count;
        r.note(os.str());
        if (cm.rescaling_count != cx.rescaling_count)
            r.problem(p.name() + ": exchange changed the rescaling census");

        if (n >= 3) {
            // the bijection between M and the connection, via extension
            auto cp = enumerate_census(build.connection.matroid, p, opt);
            if (cp.rescaling_count != cm.rescaling_count)
                r.problem(p.name() + ": theta connection census differs from the host census");
            std::set<int> hit;
            for (const auto& rep : cm.representatives) {
                auto ext = theta_extend(rep, build.connection, build.spec);
                auto cls = cp.class_of(ext);
                if (!cls) {
                    r.problem(p.name() + ": theta extension missing from the connection census");
                    continue;
                }
                hit.insert(*cls);
                auto back = cm.class_of(restrict_system(ext, build.connection, 1));
                if (back != cm.class_of(rep)) r.problem(p.name() + ": extension does not restrict back");
            }
            if (static_cast<long>(hit.size()) != cp.rescaling_count)
                r.problem(p.name() + ": extension is not onto the connection classes");
        }
    }
    return r;
}

/// Machine-readable verification report, one per CLI invocation.
struct Report {
    std::string command;
    std::vector<std::pair<std::string, std::string>> inputs;  // name -> digest
    std::vector<std::string> counts;
    std::vector<std::string> witnesses;
    double wall_seconds = 0;

    bool pass() const { return witnesses.empty(); }

    void render(std::ostream& os, bool quiet) const {
        if (quiet) {
            for (const auto& line : counts) os << line << "\n";
            os << (pass() ? "pass" : "fail") << "\n";
            return;
        }
        os << "command: " << command << "\n";
        for (const auto& [k, v] : inputs) os << "input: " << k << " digest=" << v << "\n";
        os << "counts:\n";
        for (const auto& line : counts) os << "  " << line << "\n";
        if (!witnesses.empty()) {
            os << "witnesses:\n";
            for (const auto& w : witnesses) os << "  " << w << "\n";
        }
        os << "outcome: " << (pass() ? "pass" : "fail") << "\n";
        os << "wall_time: " << std::fixed << std::setprecision(3) << wall_seconds << "s\n";
    }
};

}  // namespace matrep
