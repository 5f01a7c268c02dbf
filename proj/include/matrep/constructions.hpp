#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "matrep/matroid.hpp"

namespace matrep {

/// Two matroids glued along an explicit identification of a common
/// restriction. The library never guesses label matching.
struct Gluing {
    Matroid left;
    Matroid right;
    /// pairs (left label, right label); injective on both sides
    std::vector<std::pair<std::string, std::string>> identification;
};

/// A generalized parallel connection together with the bookkeeping the
/// representation maps need: side masks in the glued index space and the
/// index translations from the inputs.
struct GpcBuild {
    Matroid matroid;
    Matroid left, right;
    Matroid core;  // the common restriction M|T, on left labels
    Mask e1 = 0, e2 = 0, t = 0;
    std::vector<int> left_to_glued, right_to_glued;
    bool modular_in_left = false;
    bool modular_in_right = false;
    std::vector<std::pair<Mask, int>> criterion_flats;  // flat mask -> rank

    Mask from_left(Mask m) const { return translate(m, left_to_glued); }
    Mask from_right(Mask m) const { return translate(m, right_to_glued); }

    static Mask translate(Mask m, const std::vector<int>& map) {
        Mask out = 0;
        for_each_bit(m, [&](int i) { out |= bit(map[i]); });
        return out;
    }
};

inline Matroid direct_sum(const Matroid& m1, const Matroid& m2, bool prefix_labels = false) {
    std::vector<std::string> labels;
    for (const auto& l : m1.ground().labels()) labels.push_back(prefix_labels ? "L." + l : l);
    for (const auto& l : m2.ground().labels()) {
        std::string lab = prefix_labels ? "R." + l : l;
        if (std::find(labels.begin(), labels.end(), lab) != labels.end())
            fail(ErrorCode::LabelCollision, "'" + lab + "' appears on both sides");
        labels.push_back(lab);
    }
    GroundSet g(std::move(labels));
    const int shift = m1.size();
    std::vector<Mask> bases;
    for (Mask b1 : m1.bases())
        for (Mask b2 : m2.bases()) bases.push_back(b1 | (b2 << shift));
    return Matroid::from_bases(std::move(g), std::move(bases), m1.name() + "+" + m2.name());
}

namespace detail {

/// Bases of M restricted to t, as masks in M's own index space.
inline std::vector<Mask> restriction_bases(const Matroid& m, Mask t) {
    int r = m.rank_of(t);
    std::set<Mask> out;
    for (Mask b : m.bases())
        if (popcount(b & t) == r) out.insert(b & t);
    return {out.begin(), out.end()};
}

struct GluingFrame {
    Mask t1 = 0, t2 = 0;
    std::vector<int> l2g, r2g;
    GroundSet glued_ground;
    int glued_size = 0;
};

inline GluingFrame resolve_gluing(const Gluing& g) {
    GluingFrame f;
    const auto& gl = g.left.ground();
    const auto& gr = g.right.ground();
    std::map<int, int> r2l;  // right T index -> left T index
    std::set<int> seen_left;
    for (const auto& [ll, rl] : g.identification) {
        int li = gl.index_of(ll), ri = gr.index_of(rl);
        if (!seen_left.insert(li).second) fail(ErrorCode::LabelCollision, "identification reuses '" + ll + "'");
        if (!r2l.emplace(ri, li).second) fail(ErrorCode::LabelCollision, "identification reuses '" + rl + "'");
        f.t1 |= bit(li);
        f.t2 |= bit(ri);
    }
    std::vector<std::string> labels = gl.labels();
    f.l2g.resize(g.left.size());
    for (int i = 0; i < g.left.size(); ++i) f.l2g[i] = i;
    f.r2g.assign(g.right.size(), -1);
    for (auto [ri, li] : r2l) f.r2g[ri] = li;
    for (int ri = 0; ri < g.right.size(); ++ri) {
        if (f.r2g[ri] != -1) continue;
        if (gl.has(gr.label(ri)))
            fail(ErrorCode::LabelCollision, "unidentified label '" + gr.label(ri) + "' appears on both sides");
        f.r2g[ri] = static_cast<int>(labels.size());
        labels.push_back(gr.label(ri));
    }
    f.glued_size = static_cast<int>(labels.size());
    f.glued_ground = GroundSet(std::move(labels));
    return f;
}

/// Builds the matroid whose flats are exactly the sets restricting to
/// flats on both sides; ranks come from the inclusion-exclusion formula.
inline GpcBuild gpc_from_flat_criterion(const Gluing& g, const GluingFrame& f, bool require_flat_t) {
    GpcBuild out;
    out.left = g.left;
    out.right = g.right;
    out.left_to_glued = f.l2g;
    out.right_to_glued = f.r2g;
    out.e1 = GpcBuild::translate(g.left.ground().all(), f.l2g);
    out.e2 = GpcBuild::translate(g.right.ground().all(), f.r2g);
    out.t = GpcBuild::translate(f.t1, f.l2g);

    // the common restriction must agree under the identification
    auto bt1 = restriction_bases(g.left, f.t1);
    auto bt2raw = restriction_bases(g.right, f.t2);
    std::vector<Mask> bt2;
    for (Mask b : bt2raw) bt2.push_back(GpcBuild::translate(b, f.r2g));
    std::sort(bt2.begin(), bt2.end());
    std::vector<Mask> bt1g;
    for (Mask b : bt1) bt1g.push_back(GpcBuild::translate(b, f.l2g));
    std::sort(bt1g.begin(), bt1g.end());
    if (bt1g != bt2) fail(ErrorCode::RestrictionMismatch, "left|T and right|T are different matroids");

    if (require_flat_t) {
        if (!g.left.is_flat(f.t1) || !g.right.is_flat(f.t2))
            fail(ErrorCode::NotAFlat, "identified set is not a flat of both sides");
    }

    const int rt = g.left.rank_of(f.t1);
    const int r1 = g.left.rank();
    const int r2 = g.right.rank();
    const int r = r1 + r2 - rt;

    // flats of the connection = compatible pairs of flats, glued
    auto lf = g.left.flats_by_rank();
    auto rf = g.right.flats_by_rank();
    std::map<Mask, std::vector<std::pair<Mask, int>>> right_by_trace;  // trace (glued) -> (glued flat, rank)
    for (int k = 0; k < static_cast<int>(rf.size()); ++k)
        for (Mask F2 : rf[k]) {
            Mask gl = GpcBuild::translate(F2, f.r2g);
            right_by_trace[gl & out.t].push_back({gl, k});
        }
    for (int k1 = 0; k1 < static_cast<int>(lf.size()); ++k1)
        for (Mask F1 : lf[k1]) {
            Mask gl1 = GpcBuild::translate(F1, f.l2g);
            auto it = right_by_trace.find(gl1 & out.t);
            if (it == right_by_trace.end()) continue;
            int rtrace = g.left.rank_of(F1 & f.t1);
            for (auto [gl2, k2] : it->second)
                out.criterion_flats.push_back({gl1 | gl2, k1 + k2 - rtrace});
        }
    std::sort(out.criterion_flats.begin(), out.criterion_flats.end());
    out.criterion_flats.erase(std::unique(out.criterion_flats.begin(), out.criterion_flats.end()),
                              out.criterion_flats.end());

    // bases: r-sets meeting every flat in at most its rank
    std::vector<Mask> bases;
    const Mask all = f.glued_ground.all();
    if (r == 0) {
        bases.push_back(0);
    } else {
        // Gosper's hack over r-subsets
        Mask s = full_mask(r);
        while (s <= all) {
            bool ok = true;
            for (const auto& [flat, rank] : out.criterion_flats) {
                if (popcount(s & flat) > rank) {
                    ok = false;
                    break;
                }
            }
            if (ok) bases.push_back(s);
            Mask c = s & -s;
            Mask rpl = s + c;
            s = rpl | (((s ^ rpl) >> 2) / c);
            if (rpl > all) break;
        }
    }
    out.matroid = Matroid::from_bases(f.glued_ground, std::move(bases),
                                      "P[" + g.left.name() + "," + g.right.name() + "]");
    if (out.matroid.rank() != r)
        fail(ErrorCode::InternalError, "parallel connection rank mismatch");

    // cross-check: the flat lattice of the result equals the criterion
    // family, with the inclusion-exclusion ranks (desk-scale inputs only)
    if (out.matroid.size() <= 12) {
        std::vector<std::pair<Mask, int>> computed;
        auto levels = out.matroid.flats_by_rank();
        for (int k = 0; k < static_cast<int>(levels.size()); ++k)
            for (Mask fl : levels[k]) computed.push_back({fl, k});
        std::sort(computed.begin(), computed.end());
        if (computed != out.criterion_flats)
            fail(ErrorCode::InternalError, "flat criterion does not match the constructed lattice");
    }

    out.core = g.left.restriction(f.t1);
    out.core.set_name("core[" + g.left.name() + "]");
    out.modular_in_left = g.left.is_flat(f.t1) && g.left.is_modular_flat(f.t1);
    out.modular_in_right = g.right.is_flat(f.t2) && g.right.is_modular_flat(f.t2);
    return out;
}

}  // namespace detail

/// P_T(M1, M2): requires the identified set to be a common flat, modular
/// at least on the right.
inline GpcBuild gpc_build(const Gluing& g) {
    auto frame = detail::resolve_gluing(g);
    if (!g.left.is_flat(frame.t1) || !g.right.is_flat(frame.t2))
        fail(ErrorCode::NotAFlat, "identified set is not a flat of both sides");
    if (!g.right.is_modular_flat(frame.t2))
        fail(ErrorCode::NotModularInRight, "identified flat is not modular in the right matroid");
    return detail::gpc_from_flat_criterion(g, frame, /*require_flat_t=*/true);
}

inline Matroid generalized_parallel_connection(const Gluing& g) { return gpc_build(g).matroid; }

struct ThetaSpec {
    int n = 0;
    std::vector<std::string> x_labels, y_labels;

    static ThetaSpec standard(int n) {
        ThetaSpec s;
        s.n = n;
        for (int i = 1; i <= n; ++i) {
            s.x_labels.push_back("x" + std::to_string(i));
            s.y_labels.push_back("y" + std::to_string(i));
        }
        return s;
    }
};

/// The 2n-element matroid with bases Y, (Y - y_i) ∪ x_j for i != j, and
/// (Y - Y') ∪ X' over 2-subsets Y', X'.
inline Matroid theta(const ThetaSpec& spec) {
    const int n = spec.n;
    if (n < 2) fail(ErrorCode::ValidationError, "theta needs n >= 2");
    if (static_cast<int>(spec.x_labels.size()) != n || static_cast<int>(spec.y_labels.size()) != n)
        fail(ErrorCode::ValidationError, "theta labels must have length n");
    std::vector<std::string> labels = spec.x_labels;
    labels.insert(labels.end(), spec.y_labels.begin(), spec.y_labels.end());
    GroundSet g(std::move(labels));
    auto X = [&](int i) { return bit(i); };          // 0-based
    auto Y = [&](int i) { return bit(n + i); };
    Mask ymask = 0;
    for (int i = 0; i < n; ++i) ymask |= Y(i);

    std::vector<Mask> bases;
    bases.push_back(ymask);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) bases.push_back((ymask & ~Y(i)) | X(j));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = k + 1; l < n; ++l) bases.push_back((ymask & ~(Y(i) | Y(j))) | X(k) | X(l));
    return Matroid::from_bases(std::move(g), std::move(bases), "theta" + std::to_string(n));
}

/// Case lists for the hyperplanes of theta_n, in theta's own index space.
inline std::vector<Mask> predicted_theta_hyperplanes(int n) {
    Mask ymask = 0;
    for (int i = 0; i < n; ++i) ymask |= bit(n + i);
    Mask all = full_mask(2 * n);
    std::set<Mask> out;
    for (int i = 0; i < n; ++i) out.insert((ymask & ~bit(n + i)) | bit(i));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = 0; k < n; ++k)
                if (k != i && k != j) out.insert((ymask & ~(bit(n + i) | bit(n + j))) | bit(k));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k) out.insert(all & ~(bit(n + i) | bit(n + j) | bit(n + k)));
    return {out.begin(), out.end()};
}

inline std::vector<Mask> predicted_theta_corank2(int n) {
    Mask ymask = 0;
    for (int i = 0; i < n; ++i) ymask |= bit(n + i);
    Mask all = full_mask(2 * n);
    std::set<Mask> out;
    // (1) all but four y's
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k)
                for (int l = k + 1; l < n; ++l)
                    out.insert(all & ~(bit(n + i) | bit(n + j) | bit(n + k) | bit(n + l)));
    // (2) Y minus three, plus one off-index x; (3) plus an on-index x
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                Mask base = ymask & ~(bit(n + i) | bit(n + j) | bit(n + k));
                for (int l = 0; l < n; ++l)
                    if (l != i && l != j && l != k) out.insert(base | bit(l));
                for (int l : {i, j, k}) out.insert(base | bit(l));
            }
    // (4) Y minus two
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) out.insert(ymask & ~(bit(n + i) | bit(n + j)));
    return {out.begin(), out.end()};
}

/// Circuit-route 2-sum. Ground sets must intersect exactly in {p}.
inline Matroid two_sum(const Matroid& m1, const Matroid& m2, const std::string& p_label) {
    const auto& g1 = m1.ground();
    const auto& g2 = m2.ground();
    int p1 = g1.index_of(p_label), p2 = g2.index_of(p_label);
    for (const auto& l : g1.labels())
        if (l != p_label && g2.has(l)) fail(ErrorCode::LabelCollision, "'" + l + "' appears on both sides");
    if (m1.is_loop(p1) || m1.is_coloop(p1) || m2.is_loop(p2) || m2.is_coloop(p2))
        fail(ErrorCode::BasepointLoopOrColoop, "'" + p_label + "' must be neither loop nor coloop");

    std::vector<std::string> labels;
    std::vector<int> map1(m1.size(), -1), map2(m2.size(), -1);
    for (int i = 0; i < m1.size(); ++i)
        if (i != p1) {
            map1[i] = static_cast<int>(labels.size());
            labels.push_back(g1.label(i));
        }
    for (int i = 0; i < m2.size(); ++i)
        if (i != p2) {
            map2[i] = static_cast<int>(labels.size());
            labels.push_back(g2.label(i));
        }
    GroundSet g(std::move(labels));
    auto xlate = [](Mask m, const std::vector<int>& map) {
        Mask out = 0;
        for_each_bit(m, [&](int i) { out |= bit(map[i]); });
        return out;
    };

    std::set<Mask> circuits;
    std::vector<Mask> through1, through2;
    for (Mask c : m1.circuits()) {
        if (contains(c, p1))
            through1.push_back(c);
        else
            circuits.insert(xlate(c, map1));
    }
    for (Mask c : m2.circuits()) {
        if (contains(c, p2))
            through2.push_back(c);
        else
            circuits.insert(xlate(c, map2));
    }
    for (Mask c1 : through1)
        for (Mask c2 : through2) circuits.insert(xlate(c1 & ~bit(p1), map1) | xlate(c2 & ~bit(p2), map2));

    const int r = m1.rank() + m2.rank() - 1;
    std::vector<Mask> bases;
    const Mask all = g.all();
    Mask s = full_mask(r);
    while (s <= all && r > 0) {
        bool free = true;
        for (Mask c : circuits)
            if ((c & ~s) == 0) {
                free = false;
                break;
            }
        if (free) bases.push_back(s);
        Mask c = s & -s;
        Mask rpl = s + c;
        if (rpl > all) break;
        s = rpl | (((s ^ rpl) >> 2) / c);
    }
    Matroid out;
    try {
        out = Matroid::from_bases(g, std::move(bases), m1.name() + "+p+" + m2.name());
    } catch (const Error& e) {
        fail(ErrorCode::CircuitAxiomViolated, std::string("2-sum circuits are inconsistent: ") + e.what());
    }
    // the circuits of the result must be exactly the formula's set
    auto got = out.circuits();
    if (std::set<Mask>(got.begin(), got.end()) != circuits)
        fail(ErrorCode::CircuitAxiomViolated, "2-sum circuit family mismatch");

    // second route when both inputs are simple: parallel-connect, delete p
    if (m1.is_simple() && m2.is_simple()) {
        Gluing glue{m1, m2, {{p_label, p_label}}};
        auto pc = gpc_build(glue);
        auto deleted = pc.matroid.remove(bit(pc.matroid.ground().index_of(p_label)));
        if (!(deleted.ground() == out.ground()) || deleted.bases() != out.bases())
            fail(ErrorCode::InternalError, "2-sum circuit route disagrees with parallel connection route");
    }
    return out;
}

/// P_X(M, theta_n) and the exchange that deletes X afterwards.
struct ScseBuild {
    GpcBuild connection;
    Matroid exchanged;  // connection \ X
    ThetaSpec spec;
};

namespace detail {

inline void check_uniform_line(const Matroid& m, Mask x, int n) {
    if (popcount(x) != n) fail(ErrorCode::ValidationError, "|X| must equal n");
    if (n < 2) fail(ErrorCode::ValidationError, "segment needs n >= 2");
    if (n == 2) {
        if (m.rank_of(x) != 2) fail(ErrorCode::RestrictionNotUniform, "X must be an independent pair");
        return;
    }
    if (m.rank_of(x) != 2) fail(ErrorCode::RestrictionNotUniform, "rank of X must be 2");
    std::vector<int> xs;
    for_each_bit(x, [&](int e) { xs.push_back(e); });
    for (int e : xs)
        if (m.rank_of(bit(e)) != 1) fail(ErrorCode::RestrictionNotUniform, "X contains a loop");
    for (size_t i = 0; i < xs.size(); ++i)
        for (size_t j = i + 1; j < xs.size(); ++j)
            if (m.rank_of(bit(xs[i]) | bit(xs[j])) != 2)
                fail(ErrorCode::RestrictionNotUniform, "X contains a parallel pair");
}

}  // namespace detail

/// P_X(m, theta_n). Co-independence of X is not needed here, only for
/// the deletion step. When `require_left_flat` is unset the gluing is
/// still well-defined because X is a modular flat on the theta side; the
/// relaxed form is what the dual (cosegment) route needs.
inline GpcBuild theta_connection_build(const Matroid& m, Mask x, ThetaSpec& spec_out,
                                       std::vector<std::string> y_labels = {}, bool require_left_flat = true) {
    m.require_subset(x);
    const int n = popcount(x);
    detail::check_uniform_line(m, x, n);
    if (require_left_flat && n >= 3 && !m.is_flat(x)) fail(ErrorCode::NotAFlat, "X must be a flat when n >= 3");

    ThetaSpec spec;
    spec.n = n;
    spec.x_labels = m.ground().labels_of(x);
    if (y_labels.empty())
        for (int i = 1; i <= n; ++i) {
            std::string lab = "y" + std::to_string(i);
            while (m.ground().has(lab)) lab += "'";
            y_labels.push_back(lab);
        }
    if (static_cast<int>(y_labels.size()) != n) fail(ErrorCode::ValidationError, "need n fresh y labels");
    spec.y_labels = y_labels;
    spec_out = spec;

    Gluing glue{m, theta(spec), {}};
    for (const auto& xl : spec.x_labels) glue.identification.push_back({xl, xl});

    auto frame = detail::resolve_gluing(glue);
    if (n >= 3) {
        if (!glue.right.is_modular_flat(frame.t2))
            fail(ErrorCode::InternalError, "X must be modular in theta");
        return detail::gpc_from_flat_criterion(glue, frame, /*require_flat_t=*/false);
    }
    // X spans theta_2, so it is not a flat there; the flat criterion
    // still glues (theta_2 is a parallel extension of its line) and the
    // result is validated from its bases
    return detail::gpc_from_flat_criterion(glue, frame, /*require_flat_t=*/false);
}

inline ScseBuild scse_build(const Matroid& m, Mask x, std::vector<std::string> y_labels = {},
                            bool require_left_flat = true) {
    m.require_subset(x);
    detail::check_uniform_line(m, x, popcount(x));
    if (!m.is_coindependent(x)) fail(ErrorCode::NotCoindependent, "X is not co-independent");
    ScseBuild out;
    out.connection = theta_connection_build(m, x, out.spec, std::move(y_labels), require_left_flat);
    Mask xg = out.connection.from_left(x);
    out.exchanged = out.connection.matroid.remove(xg);
    out.exchanged.set_name("scse[" + m.name() + "]");
    return out;
}

inline Matroid segment_cosegment_exchange(const Matroid& m, Mask x, std::vector<std::string> y_labels = {}) {
    return scse_build(m, x, std::move(y_labels)).exchanged;
}

inline Matroid delta_wye(const Matroid& m, Mask t, std::vector<std::string> y_labels = {}) {
    if (popcount(t) != 3) fail(ErrorCode::ValidationError, "delta-wye needs a triangle");
    if (m.rank_of(t) != 2) fail(ErrorCode::RestrictionNotUniform, "T is not a triangle");
    return segment_cosegment_exchange(m, t, std::move(y_labels));
}

/// Dual route: exchange a cosegment Y of m by dualizing, exchanging the
/// segment in the dual, and dualizing back. Y need not be closed in the
/// dual (it usually is not); the theta side carries the modular flat.
inline Matroid cosegment_segment_exchange(const Matroid& m, Mask y, std::vector<std::string> fresh_labels = {}) {
    auto d = m.dual();
    auto ex = scse_build(d, y, std::move(fresh_labels), /*require_left_flat=*/false).exchanged;
    auto out = ex.dual();
    out.set_name("csse[" + m.name() + "]");
    return out;
}

/// Case lists from the hyperplane/corank-2 characterizations of the
/// parallel connection. `modular_both` selects the T-modular-in-both
/// variants; otherwise r(T) = 2 is required and the right side plays the
/// role of the line's host.
inline std::vector<Mask> predicted_gpc_hyperplanes(const GpcBuild& b, bool modular_both) {
    std::set<Mask> out;
    auto lh = b.left.hyperplanes();
    auto rh = b.right.hyperplanes();
    const Mask t = b.t;
    if (modular_both) {
        for (Mask h1 : lh)
            if ((t & ~b.from_left(h1)) == 0) out.insert(b.from_left(h1) | b.e2);
        for (Mask h2 : rh)
            if ((t & ~b.from_right(h2)) == 0) out.insert(b.e1 | b.from_right(h2));
        for (Mask h1 : lh)
            for (Mask h2 : rh) {
                Mask a = b.from_left(h1), c = b.from_right(h2);
                if ((a & t) == (c & t) && (t & ~(a | c)) != 0) out.insert(a | c);
            }
        return {out.begin(), out.end()};
    }
    // r(T) = 2 case lists
    for (Mask h2 : rh)
        if ((t & ~b.from_right(h2)) == 0) out.insert(b.e1 | b.from_right(h2));
    for (Mask h1 : lh)
        if ((t & ~b.from_left(h1)) == 0) out.insert(b.from_left(h1) | b.e2);
    for (Mask h1 : lh)
        for (Mask h2 : rh) {
            Mask a = b.from_left(h1), c = b.from_right(h2);
            if ((a & t) == (c & t) && popcount(a & t) == 1) out.insert(a | c);
        }
    std::vector<Mask> right_corank2;
    if (b.right.rank() >= 2)
        for (const auto& f : b.right.flats_by_corank(2)) right_corank2.push_back(b.from_right(f.members));
    for (Mask h1 : lh) {
        if ((b.from_left(h1) & t) != 0) continue;
        for (Mask f2 : right_corank2)
            if ((f2 & t) == 0) out.insert(b.from_left(h1) | f2);
    }
    return {out.begin(), out.end()};
}

inline std::vector<Mask> predicted_gpc_corank2(const GpcBuild& b, bool modular_both) {
    std::set<Mask> out;
    const Mask t = b.t;
    auto lh = b.left.hyperplanes();
    auto rh = b.right.hyperplanes();
    auto coranks = [&](const Matroid& m, int k) {
        std::vector<Mask> v;
        if (m.rank() >= k)
            for (const auto& f : m.flats_by_corank(k)) v.push_back(f.members);
        return v;
    };
    auto lc2 = coranks(b.left, 2);
    auto rc2 = coranks(b.right, 2);

    if (modular_both) {
        const int rank_t = b.core.rank();
        for (Mask f2 : rc2)
            if ((t & ~b.from_right(f2)) == 0) out.insert(b.e1 | b.from_right(f2));
        for (Mask f1 : lc2)
            if ((t & ~b.from_left(f1)) == 0) out.insert(b.from_left(f1) | b.e2);
        for (Mask h1 : lh)
            for (Mask h2 : rh) {
                Mask a = b.from_left(h1), c = b.from_right(h2);
                if ((t & ~a) == 0 && (t & ~c) == 0) out.insert(a | c);
            }
        auto trace_rank = [&](Mask glued_trace) {
            Mask in_left = 0;
            for (int i = 0; i < b.left.size(); ++i)
                if (contains(glued_trace, b.left_to_glued[i])) in_left |= bit(i);
            return b.left.rank_of(in_left);
        };
        for (Mask h1 : lh)
            for (Mask f2 : rc2) {
                Mask a = b.from_left(h1), c = b.from_right(f2);
                if ((a & t) == (c & t) && trace_rank(a & t) == rank_t - 1) out.insert(a | c);
            }
        for (Mask f1 : lc2)
            for (Mask h2 : rh) {
                Mask a = b.from_left(f1), c = b.from_right(h2);
                if ((a & t) == (c & t) && trace_rank(a & t) == rank_t - 1) out.insert(a | c);
            }
        for (Mask f1 : lc2)
            for (Mask f2 : rc2) {
                Mask a = b.from_left(f1), c = b.from_right(f2);
                if ((a & t) == (c & t) && trace_rank(a & t) == rank_t - 2) out.insert(a | c);
            }
        return {out.begin(), out.end()};
    }

    // r(T) = 2 case lists (seven outcomes)
    for (Mask f2 : rc2)
        if ((t & ~b.from_right(f2)) == 0) out.insert(b.e1 | b.from_right(f2));
    for (Mask f1 : lc2)
        if ((t & ~b.from_left(f1)) == 0) out.insert(b.from_left(f1) | b.e2);
    for (Mask h1 : lh)
        for (Mask h2 : rh) {
            Mask a = b.from_left(h1), c = b.from_right(h2);
            if ((t & ~a) == 0 && (t & ~c) == 0) out.insert(a | c);
        }
    for (Mask h1 : lh)
        for (Mask f2 : rc2) {
            Mask a = b.from_left(h1), c = b.from_right(f2);
            if ((a & t) == (c & t) && popcount(a & t) == 1) out.insert(a | c);
        }
    for (Mask f1 : lc2)
        for (Mask h2 : rh) {
            Mask a = b.from_left(f1), c = b.from_right(h2);
            if ((a & t) == (c & t) && popcount(a & t) == 1) out.insert(a | c);
        }
    auto rc3 = coranks(b.right, 3);
    for (Mask h1 : lh) {
        if ((b.from_left(h1) & t) != 0) continue;
        for (Mask f3 : rc3)
            if ((b.from_right(f3) & t) == 0) out.insert(b.from_left(h1) | b.from_right(f3));
    }
    for (Mask f1 : lc2) {
        if ((b.from_left(f1) & t) != 0) continue;
        for (Mask f2 : rc2)
            if ((b.from_right(f2) & t) == 0) out.insert(b.from_left(f1) | b.from_right(f2));
    }
    return {out.begin(), out.end()};
}

}  // namespace matrep
