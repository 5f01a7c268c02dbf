#pragma once

#include "matrep/constructions.hpp"
#include "matrep/system.hpp"

namespace matrep {

namespace detail {

/// Index translation between ground sets sharing labels; -1 marks labels
/// absent from `to`.
inline std::vector<int> ground_map(const GroundSet& from, const GroundSet& to) {
    std::vector<int> map(from.size(), -1);
    for (int i = 0; i < from.size(); ++i)
        if (to.has(from.label(i))) map[i] = to.index_of(from.label(i));
    return map;
}

inline Mask map_mask(Mask m, const std::vector<int>& map) {
    Mask out = 0;
    for_each_bit(m, [&](int i) {
        if (map[i] < 0) fail(ErrorCode::InternalError, "mask element missing from target ground");
        out |= bit(map[i]);
    });
    return out;
}

/// Inverse of a side-to-glued index map; -1 where no side element maps.
inline std::vector<int> inverse_index_map(const std::vector<int>& to_glued, int glued_size) {
    std::vector<int> inv(glued_size, -1);
    for (int e = 0; e < static_cast<int>(to_glued.size()); ++e) inv[to_glued[e]] = e;
    return inv;
}

inline std::vector<Mask> sorted_hyps(const Matroid& m) {
    auto h = m.hyperplanes();
    std::sort(h.begin(), h.end());
    return h;
}

inline int hyperplane_index(const std::vector<Mask>& hyps, Mask h) {
    auto it = std::lower_bound(hyps.begin(), hyps.end(), h);
    if (it == hyps.end() || *it != h) return -1;
    return static_cast<int>(it - hyps.begin());
}

}  // namespace detail

/// Restriction of a system on P_T(M1, M2) to one side. Every hyperplane
/// of the side matroid extends to a hyperplane of the connection; the
/// lexicographically least partner is used, so the map is deterministic.
inline HyperplaneSystem restrict_system(const HyperplaneSystem& sys, const GpcBuild& b, int side) {
    if (side != 1 && side != 2) fail(ErrorCode::ValidationError, "side must be 1 or 2");
    const Matroid& sm = side == 1 ? b.left : b.right;
    const auto& side_to_glued = side == 1 ? b.left_to_glued : b.right_to_glued;
    const Mask side_mask = side == 1 ? b.e1 : b.e2;
    const Mask other_mask = side == 1 ? b.e2 : b.e1;
    if (!(sys.matroid == b.matroid)) fail(ErrorCode::NotAGpcMatroid, "system is not on this connection");

    auto side_hyps = detail::sorted_hyps(sm);
    std::vector<std::vector<PElem>> funcs;
    for (Mask hs : side_hyps) {
        Mask hg = GpcBuild::translate(hs, side_to_glued);
        int partner = -1;
        if ((b.t & ~hg) == 0) {
            partner = detail::hyperplane_index(sys.hyps, hg | other_mask);
        } else {
            for (size_t i = 0; i < sys.hyps.size(); ++i)
                if ((sys.hyps[i] & side_mask) == hg) {
                    partner = static_cast<int>(i);
                    break;
                }
        }
        if (partner < 0) fail(ErrorCode::NotAGpcMatroid, "hyperplane has no partner in the connection");
        std::vector<PElem> f(sm.size());
        for (int e = 0; e < sm.size(); ++e) f[e] = sys.funcs[partner][side_to_glued[e]];
        funcs.push_back(std::move(f));
    }
    auto out = make_system(sm, sys.pasture, funcs);
    auto ctx = MatroidContext::make(sm);
    auto check = check_modular_system(out, ctx);
    if (!check.ok) fail(ErrorCode::InternalError, "restriction is not modular: " + check.witness);
    return out;
}

/// Restriction of a side system to the common flat T, as a system on the
/// core matroid M|T; used to compare T-classes.
inline HyperplaneSystem restrict_to_core(const HyperplaneSystem& side_sys, const GpcBuild& b, int side) {
    const Matroid& sm = side == 1 ? b.left : b.right;
    if (!(side_sys.matroid == sm)) fail(ErrorCode::ValidationError, "system is not on this side");
    const auto& to_glued = side == 1 ? b.left_to_glued : b.right_to_glued;
    auto glued_to_side = detail::inverse_index_map(to_glued, b.matroid.size());
    // core elements carry left labels; go through the glued index
    std::vector<int> core_to_side(b.core.size());
    Mask t_side = 0;
    for (int ce = 0; ce < b.core.size(); ++ce) {
        int g = b.left_to_glued[b.left.ground().index_of(b.core.ground().label(ce))];
        if (glued_to_side[g] < 0) fail(ErrorCode::InternalError, "T missing from side");
        core_to_side[ce] = glued_to_side[g];
        t_side |= bit(glued_to_side[g]);
    }

    auto core_hyps = detail::sorted_hyps(b.core);
    auto side_hyps = side_sys.hyps;
    std::vector<std::vector<PElem>> funcs;
    for (Mask k : core_hyps) {
        Mask k_side = 0;
        for_each_bit(k, [&](int ce) { k_side |= bit(core_to_side[ce]); });
        int found = -1;
        for (size_t i = 0; i < side_hyps.size(); ++i)
            if ((side_hyps[i] & t_side) == k_side) {
                found = static_cast<int>(i);
                break;
            }
        if (found < 0) fail(ErrorCode::InternalError, "no hyperplane traces the core hyperplane");
        std::vector<PElem> f(b.core.size());
        for (int e = 0; e < b.core.size(); ++e) f[e] = side_sys.funcs[found][core_to_side[e]];
        funcs.push_back(std::move(f));
    }
    return make_system(b.core, side_sys.pasture, funcs);
}

/// Glues two side systems along T. Functions with the same trace in T
/// are first scaled to agree on T; the glued function is then read off
/// one side on E1 and the other on E2.
inline HyperplaneSystem glue_gpc(const HyperplaneSystem& s1, const HyperplaneSystem& s2, const GpcBuild& b) {
    if (!(s1.matroid == b.left) || !(s2.matroid == b.right))
        fail(ErrorCode::ValidationError, "systems do not match the gluing sides");
    if (!(s1.pasture == s2.pasture)) fail(ErrorCode::ValidationError, "systems over different pastures");
    const auto& P = s1.pasture;

    // harmonize: per trace class, scale everything to the first function
    struct SideRef {
        const Matroid* m;
        const std::vector<int>* to_glued;
        std::vector<std::vector<PElem>> funcs;
        std::vector<Mask> hyps_glued;
    };
    SideRef sides[2] = {{&b.left, &b.left_to_glued, s1.funcs, {}}, {&b.right, &b.right_to_glued, s2.funcs, {}}};
    for (int s = 0; s < 2; ++s)
        for (Mask h : (s == 0 ? s1 : s2).hyps)
            sides[s].hyps_glued.push_back(GpcBuild::translate(h, *sides[s].to_glued));

    std::vector<int> t_elems;
    for_each_bit(b.t, [&](int g) { t_elems.push_back(g); });
    std::vector<int> g2s[2] = {detail::inverse_index_map(b.left_to_glued, b.matroid.size()),
                               detail::inverse_index_map(b.right_to_glued, b.matroid.size())};

    std::map<Mask, std::pair<int, int>> reference;  // trace -> (side, hyp index)
    for (int s = 0; s < 2; ++s) {
        for (size_t i = 0; i < sides[s].hyps_glued.size(); ++i) {
            Mask trace = sides[s].hyps_glued[i] & b.t;
            if ((b.t & ~sides[s].hyps_glued[i]) == 0) continue;  // vanishes on T, nothing to match
            auto [it, fresh] = reference.try_emplace(trace, s, static_cast<int>(i));
            auto& fn = sides[s].funcs[i];
            const auto& ref = reference.at(trace);
            if (fresh) continue;
            const auto& ref_fn = sides[ref.first].funcs[ref.second];
            // scale fn so it matches ref on T, then verify the match
            PElem scale = 0;
            for (int g : t_elems) {
                int er = g2s[ref.first][g], ec = g2s[s][g];
                if (ref_fn[er] == 0 || fn[ec] == 0) {
                    if ((ref_fn[er] == 0) != (fn[ec] == 0))
                        fail(ErrorCode::TRestrictionsNotIsomorphic, "trace supports differ on T");
                    continue;
                }
                PElem want = P.div(ref_fn[er], fn[ec]);
                if (scale == 0)
                    scale = want;
                else if (scale != want)
                    fail(s == ref.first ? ErrorCode::HarmonizationFailed : ErrorCode::TRestrictionsNotIsomorphic,
                         "no scaling matches the reference on T");
            }
            if (scale != 0 && scale != P.one())
                for (auto& v : fn) v = P.mul(scale, v);
        }
    }

    // assemble per glued hyperplane
    auto glued_hyps = detail::sorted_hyps(b.matroid);
    const int n = b.matroid.size();
    std::vector<std::vector<PElem>> funcs;
    for (Mask h : glued_hyps) {
        std::vector<PElem> f(n, 0);
        bool have[2] = {false, false};
        for (int s = 0; s < 2; ++s) {
            Mask hs = h & (s == 0 ? b.e1 : b.e2);
            if (hs == (s == 0 ? b.e1 : b.e2)) continue;  // that side fully inside: stays zero
            int idx = -1;
            for (size_t i = 0; i < sides[s].hyps_glued.size(); ++i)
                if (sides[s].hyps_glued[i] == hs) {
                    idx = static_cast<int>(i);
                    break;
                }
            if (idx < 0) fail(ErrorCode::InternalError, "glued hyperplane does not restrict to a side hyperplane");
            for (int e = 0; e < sides[s].m->size(); ++e) {
                int g = (*sides[s].to_glued)[e];
                PElem v = sides[s].funcs[idx][e];
                if (have[0] || have[1]) {
                    if (contains(b.t, g) && f[g] != v && (f[g] != 0 || v != 0))
                        fail(ErrorCode::HarmonizationFailed, "sides disagree on T after harmonization");
                }
                f[g] = v;
            }
            have[s] = true;
        }
        funcs.push_back(std::move(f));
    }
    auto out = make_system(b.matroid, P, funcs);
    auto ctx = MatroidContext::make(b.matroid);
    auto check = check_modular_system(out, ctx);
    if (!check.ok) fail(ErrorCode::InternalError, "glued system is not modular: " + check.witness);
    return out;
}

/// The 2-sum with the bookkeeping the representation maps need.
struct TwoSumBuild {
    GpcBuild pc;  // P_p(M1, M2)
    Matroid sum;  // pc.matroid with p deleted (= the circuit-route 2-sum)
    int p = -1;   // glued index of the basepoint
    std::vector<int> sum_to_glued;
    Mask e1_sum = 0, e2_sum = 0;  // E1 - p and E2 - p inside the sum
};

inline TwoSumBuild two_sum_build(const Matroid& m1, const Matroid& m2, const std::string& p_label) {
    if (!m1.is_simple() || !m2.is_simple())
        fail(ErrorCode::ValidationError, "two-sum representation maps need simple summands");
    TwoSumBuild b;
    Gluing g{m1, m2, {{p_label, p_label}}};
    b.pc = gpc_build(g);
    b.p = b.pc.matroid.ground().index_of(p_label);
    b.sum = two_sum(m1, m2, p_label);
    b.sum_to_glued = detail::ground_map(b.sum.ground(), b.pc.matroid.ground());
    b.e1_sum = 0;
    b.e2_sum = 0;
    for (int e = 0; e < b.sum.size(); ++e) {
        int gidx = b.sum_to_glued[e];
        if (contains(b.pc.e1, gidx)) b.e1_sum |= bit(e);
        if (contains(b.pc.e2, gidx)) b.e2_sum |= bit(e);
    }
    return b;
}

/// Phi: restrict a system on P_p(M1, M2) to E - p.
inline HyperplaneSystem two_sum_phi(const HyperplaneSystem& sys, const TwoSumBuild& b) {
    if (!(sys.matroid == b.pc.matroid)) fail(ErrorCode::ValidationError, "system is not on the connection");
    auto sum_hyps = detail::sorted_hyps(b.sum);
    std::vector<std::vector<PElem>> funcs;
    for (Mask hs : sum_hyps) {
        Mask hg = detail::map_mask(hs, b.sum_to_glued);
        int idx = detail::hyperplane_index(sys.hyps, hg);
        if (idx < 0) idx = detail::hyperplane_index(sys.hyps, hg | bit(b.p));
        if (idx < 0) fail(ErrorCode::InternalError, "2-sum hyperplane missing from the connection");
        std::vector<PElem> f(b.sum.size());
        for (int e = 0; e < b.sum.size(); ++e) f[e] = sys.funcs[idx][b.sum_to_glued[e]];
        funcs.push_back(std::move(f));
    }
    return make_system(b.sum, sys.pasture, funcs);
}

inline std::vector<int> admissible_h0(const TwoSumBuild& b) {
    auto sum_hyps = detail::sorted_hyps(b.sum);
    std::vector<int> out;
    for (size_t i = 0; i < sum_hyps.size(); ++i)
        if ((b.e1_sum & ~sum_hyps[i]) != 0 && (b.e2_sum & ~sum_hyps[i]) != 0) out.push_back(static_cast<int>(i));
    return out;
}

/// Psi: extend a system on the 2-sum back to the parallel connection.
/// Hyperplanes through p get f(p) = 0; otherwise f_H(p) is the unique c
/// making a scalar multiple of f_H|E1' * (c f_H0|E2') lie in the system.
inline HyperplaneSystem two_sum_psi(const HyperplaneSystem& sys, const TwoSumBuild& b, int h0_index = -1) {
    if (!(sys.matroid == b.sum)) fail(ErrorCode::ValidationError, "system is not on the 2-sum");
    const auto& P = sys.pasture;
    auto sum_hyps = sys.hyps;
    if (h0_index < 0) {
        auto adm = admissible_h0(b);
        if (adm.empty()) fail(ErrorCode::NoAdmissibleH0, "every hyperplane contains one side");
        h0_index = adm.front();
    }
    Mask h0 = sum_hyps[h0_index];
    if ((b.e1_sum & ~h0) == 0 || (b.e2_sum & ~h0) == 0) fail(ErrorCode::NoAdmissibleH0, "chosen H0 is inadmissible");

    auto pc_hyps = detail::sorted_hyps(b.pc.matroid);
    const int n = b.pc.matroid.size();
    auto glued_to_sum = detail::ground_map(b.pc.matroid.ground(), b.sum.ground());

    std::vector<std::vector<PElem>> funcs;
    for (Mask hg : pc_hyps) {
        Mask hs = 0;
        for_each_bit(hg & ~bit(b.p), [&](int g) { hs |= bit(glued_to_sum[g]); });
        int idx = detail::hyperplane_index(sum_hyps, hs);
        if (idx < 0) fail(ErrorCode::InternalError, "connection hyperplane lost its 2-sum partner");
        std::vector<PElem> f(n, 0);
        for (int e = 0; e < b.sum.size(); ++e) f[b.sum_to_glued[e]] = sys.funcs[idx][e];

        if (!contains(hg, b.p)) {
            // K' pairs H's E1-part with H0's E2-part
            Mask kmask = (hs & b.e1_sum) | (h0 & b.e2_sum);
            int kidx = detail::hyperplane_index(sum_hyps, kmask);
            if (kidx < 0) fail(ErrorCode::InternalError, "mixed hyperplane K' does not exist");
            const auto& fk = sys.funcs[kidx];
            const auto& fh = sys.funcs[idx];
            const auto& f0 = sys.funcs[h0_index];
            PElem mu = 0;
            for_each_bit(b.e1_sum & ~kmask, [&](int a) {
                if (fh[a] == 0) fail(ErrorCode::ExtensionAmbiguous, "support mismatch on E1");
                PElem want = P.div(fk[a], fh[a]);
                if (mu == 0)
                    mu = want;
                else if (mu != want)
                    fail(ErrorCode::ExtensionAmbiguous, "no scalar matches K' on E1");
            });
            PElem c = 0;
            for_each_bit(b.e2_sum & ~kmask, [&](int bb) {
                if (f0[bb] == 0) fail(ErrorCode::ExtensionAmbiguous, "support mismatch on E2");
                PElem want = P.div(fk[bb], P.mul(mu, f0[bb]));
                if (c == 0)
                    c = want;
                else if (c != want)
                    fail(ErrorCode::ExtensionAmbiguous, "no unique extension value");
            });
            f[b.p] = c;
        }
        funcs.push_back(std::move(f));
    }
    auto out = make_system(b.pc.matroid, P, funcs);
    auto ctx = MatroidContext::make(b.pc.matroid);
    auto check = check_modular_system(out, ctx);
    if (!check.ok) fail(ErrorCode::InternalError, "extension is not modular: " + check.witness);
    return out;
}

/// Composite maps between the 2-sum and its summands.
inline std::pair<HyperplaneSystem, HyperplaneSystem> two_sum_restrict(const HyperplaneSystem& sys,
                                                                      const TwoSumBuild& b) {
    auto on_pc = two_sum_psi(sys, b);
    return {restrict_system(on_pc, b.pc, 1), restrict_system(on_pc, b.pc, 2)};
}

inline HyperplaneSystem two_sum_extend(const HyperplaneSystem& s1, const HyperplaneSystem& s2,
                                       const TwoSumBuild& b) {
    return glue_gpc(s1, s2, b.pc);
}

/// Rescales a system on a rank-2 line so that the induced two-argument
/// function is alternating and satisfies the three-term identity.
inline HyperplaneSystem normalize_line_system(const HyperplaneSystem& sys) {
    const auto& m = sys.matroid;
    const auto& P = sys.pasture;
    if (m.rank() != 2 || !m.is_simple())
        fail(ErrorCode::ValidationError, "line normalization expects a simple rank-2 matroid");
    const int n = m.size();
    // hyperplanes of a simple rank-2 matroid are the singletons, sorted
    if (static_cast<int>(sys.hyps.size()) != n) fail(ErrorCode::ValidationError, "unexpected hyperplane count");

    HyperplaneSystem out = sys;
    for (int j = 1; j < n; ++j) {
        // force f_j(x_0) = eps * f_0(x_j)
        PElem want = P.mul(P.epsilon(), out.funcs[0][j]);
        PElem c = P.div(want, out.funcs[j][0]);
        if (c != P.one())
            for (auto& v : out.funcs[j]) v = P.mul(c, v);
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (out.funcs[i][j] != P.mul(P.epsilon(), out.funcs[j][i]))
                fail(ErrorCode::NormalizationImpossible, "antisymmetry cannot be reached by scaling");
        }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k)
                for (int e = 0; e < n; ++e) {
                    PElem a = P.mul(out.funcs[j][k], out.funcs[i][e]);
                    PElem bb = P.mul(out.funcs[k][i], out.funcs[j][e]);
                    PElem c = P.mul(out.funcs[i][j], out.funcs[k][e]);
                    if (!P.is_null(a, bb, c))
                        fail(ErrorCode::NormalizationImpossible, "three-term identity fails after scaling");
                }
    return out;
}

/// The canonical line system induced on M|X: each singleton hyperplane
/// of the line takes the restriction of the least hyperplane of M whose
/// trace on X is that singleton.
inline HyperplaneSystem restrict_to_line(const HyperplaneSystem& sys, Mask x) {
    const auto& m = sys.matroid;
    std::vector<int> xs;
    for_each_bit(x, [&](int e) { xs.push_back(e); });
    Matroid line = m.restriction(x);
    std::vector<std::vector<PElem>> funcs;
    for (int i = 0; i < static_cast<int>(xs.size()); ++i) {
        int found = -1;
        for (size_t h = 0; h < sys.hyps.size(); ++h)
            if ((sys.hyps[h] & x) == bit(xs[i])) {
                found = static_cast<int>(h);
                break;
            }
        if (found < 0) fail(ErrorCode::InternalError, "no hyperplane meets X in exactly one point");
        std::vector<PElem> f(xs.size());
        for (size_t j = 0; j < xs.size(); ++j) f[j] = sys.funcs[found][xs[j]];
        funcs.push_back(std::move(f));
    }
    return make_system(line, sys.pasture, funcs);
}

/// Rescaling with prescribed values on a triangle: hyperplanes meeting
/// the triangle in one point end up with values {0, 1, eps} and
/// hyperplanes disjoint from it satisfy f(x) + f(y) + f(z) = 0.
inline HyperplaneSystem triangle_normalize(const HyperplaneSystem& sys, Mask t) {
    const auto& m = sys.matroid;
    const auto& P = sys.pasture;
    if (popcount(t) != 3 || m.rank_of(t) != 2) fail(ErrorCode::ValidationError, "need a triangle");
    Mask closed = m.closure_mask(t);

    // least corank-2 flat disjoint from cl(t) whose joins with the
    // triangle points form a modular triple
    bool found = false;
    Mask hx = 0, hy = 0;
    int xs[3], idx = 0;
    for_each_bit(t, [&](int e) { xs[idx++] = e; });
    if (m.rank() >= 2) {
        for (const auto& fl : m.flats_by_corank(2)) {
            if (fl.members & closed) continue;
            Mask a = m.closure_mask(fl.members | bit(xs[0]));
            Mask b = m.closure_mask(fl.members | bit(xs[1]));
            Mask c = m.closure_mask(fl.members | bit(xs[2]));
            if (!m.is_hyperplane(a) || !m.is_hyperplane(b) || !m.is_hyperplane(c)) continue;
            if ((a & b) != fl.members || (a & c) != fl.members || (b & c) != fl.members) continue;
            found = true;
            hx = a, hy = b;
            break;
        }
    }
    if (!found) fail(ErrorCode::NoDisjointCorank2Flat, "no admissible corank-2 flat avoids the triangle");

    const int x = xs[0], y = xs[1], z = xs[2];
    HyperplaneSystem out = sys;
    auto scale_row = [&](size_t h, PElem c) {
        if (c != P.one())
            for (auto& v : out.funcs[h]) v = P.mul(c, v);
    };
    auto trace_of = [&](Mask h) { return h & t; };

    // per-hyperplane pass one: f(y) = 1 on x-traces
    for (size_t h = 0; h < out.hyps.size(); ++h)
        if (trace_of(out.hyps[h]) == bit(x)) scale_row(h, P.inv(out.funcs[h][y]));
    int hx_i = detail::hyperplane_index(out.hyps, hx);
    int hy_i = detail::hyperplane_index(out.hyps, hy);
    PElem cz = P.div(P.epsilon(), out.funcs[hx_i][z]);
    for (auto& fn : out.funcs) fn[z] = P.mul(cz, fn[z]);
    for (size_t h = 0; h < out.hyps.size(); ++h)
        if (trace_of(out.hyps[h]) == bit(y)) scale_row(h, P.inv(out.funcs[h][z]));
    PElem cx = P.div(P.epsilon(), out.funcs[hy_i][x]);
    for (auto& fn : out.funcs) fn[x] = P.mul(cx, fn[x]);
    for (size_t h = 0; h < out.hyps.size(); ++h)
        if (trace_of(out.hyps[h]) == bit(z)) scale_row(h, P.inv(out.funcs[h][x]));

    // the anchor scalings force the full pattern everywhere
    for (size_t h = 0; h < out.hyps.size(); ++h) {
        Mask tr = trace_of(out.hyps[h]);
        if (tr == bit(x)) {
            if (out.funcs[h][y] != P.one() || out.funcs[h][z] != P.epsilon())
                fail(ErrorCode::InternalError, "triangle pattern failed on an x-trace hyperplane");
        } else if (tr == bit(y)) {
            if (out.funcs[h][z] != P.one() || out.funcs[h][x] != P.epsilon())
                fail(ErrorCode::InternalError, "triangle pattern failed on a y-trace hyperplane");
        } else if (tr == bit(z)) {
            if (out.funcs[h][x] != P.one() || out.funcs[h][y] != P.epsilon())
                fail(ErrorCode::InternalError, "triangle pattern failed on a z-trace hyperplane");
        } else if (tr == 0) {
            if (!P.is_null(out.funcs[h][x], out.funcs[h][y], out.funcs[h][z]))
                fail(ErrorCode::InternalError, "triangle sum rule failed on a disjoint hyperplane");
        }
    }
    return out;
}

/// Extends a system on M1 (with a line flat X) to P_X(M1, theta_n),
/// following the five hyperplane shapes of the connection.
inline HyperplaneSystem theta_extend(const HyperplaneSystem& sys1, const GpcBuild& b, const ThetaSpec& spec) {
    const auto& P = sys1.pasture;
    const int n = spec.n;
    if (n < 3) fail(ErrorCode::NMustBeAtLeast3, "n = 2 goes through the series-pair isomorphism");
    if (!(sys1.matroid == b.left)) fail(ErrorCode::ValidationError, "system is not on the left matroid");

    const auto& mg = b.matroid.ground();
    const auto& m1 = b.left;
    std::vector<int> x1(n), xg(n), yg(n);  // left / glued indices
    for (int i = 0; i < n; ++i) {
        x1[i] = m1.ground().index_of(spec.x_labels[i]);
        xg[i] = mg.index_of(spec.x_labels[i]);
        yg[i] = mg.index_of(spec.y_labels[i]);
    }
    Mask x_left = 0;
    for (int i = 0; i < n; ++i) x_left |= bit(x1[i]);
    if (!m1.is_flat(x_left)) fail(ErrorCode::NotAFlat, "X must be a flat of the host");

    // normalized line values L[i][j] = f_{x_i}(x_j)
    auto line = normalize_line_system(restrict_to_line(sys1, x_left));
    std::vector<std::vector<PElem>> L(n, std::vector<PElem>(n, 0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) L[i][j] = line.funcs[i][j];

    // harmonize: hyperplanes tracing {x_i} agree with the line values
    HyperplaneSystem h1 = sys1;
    for (size_t h = 0; h < h1.hyps.size(); ++h) {
        Mask tr = h1.hyps[h] & x_left;
        if (popcount(tr) != 1) continue;
        int i = -1;
        for (int k = 0; k < n; ++k)
            if (tr == Mask(bit(x1[k]))) i = k;
        PElem scale = 0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            PElem have = h1.funcs[h][x1[j]];
            if (have == 0) fail(ErrorCode::HarmonizationFailed, "hyperplane vanishes off its X-trace");
            PElem want = P.div(L[i][j], have);
            if (scale == 0)
                scale = want;
            else if (scale != want)
                fail(ErrorCode::HarmonizationFailed, "hyperplane is not proportional to the line on X");
        }
        if (scale != 0 && scale != P.one())
            for (auto& v : h1.funcs[h]) v = P.mul(scale, v);
    }

    auto left_hyp_index = [&](Mask glued_h) {
        Mask restricted = 0;
        auto glued_to_left = detail::ground_map(mg, m1.ground());
        for_each_bit(glued_h & b.e1, [&](int g) { restricted |= bit(glued_to_left[g]); });
        return detail::hyperplane_index(h1.hyps, restricted);
    };

    auto glued_hyps = detail::sorted_hyps(b.matroid);
    const int N = b.matroid.size();
    Mask ymask = 0;
    for (int i = 0; i < n; ++i) ymask |= bit(yg[i]);
    Mask xmask = 0;
    for (int i = 0; i < n; ++i) xmask |= bit(xg[i]);

    std::vector<std::vector<PElem>> funcs;
    for (Mask h : glued_hyps) {
        std::vector<PElem> f(N, 0);
        auto put_left = [&](int hyp_idx) {
            for (int e = 0; e < m1.size(); ++e) f[b.left_to_glued[e]] = h1.funcs[hyp_idx][e];
        };
        std::vector<int> missing_y, present_x;
        for (int i = 0; i < n; ++i) {
            if (!contains(h, yg[i])) missing_y.push_back(i);
            if (contains(h, xg[i])) present_x.push_back(i);
        }
        if ((b.e1 & ~h) == 0) {
            // case 1: E1 and three missing y's
            int i = missing_y[0], j = missing_y[1], k = missing_y[2];
            f[yg[i]] = L[j][k];
            f[yg[j]] = L[k][i];
            f[yg[k]] = L[i][j];
        } else if ((xmask & ~h) == 0) {
            // case 2: a hyperplane of M1 through X, all of E2 joined
            int hi = left_hyp_index(h);
            if (hi < 0) fail(ErrorCode::InternalError, "case-2 hyperplane has no left partner");
            put_left(hi);
        } else if (present_x.size() == 1) {
            int i = present_x[0];
            int hi = left_hyp_index(h);
            if (hi < 0) fail(ErrorCode::InternalError, "trace hyperplane has no left partner");
            put_left(hi);
            if (missing_y.size() == 1) {
                // case 3: theta hyperplane (Y - y_i) u x_i
                f[yg[i]] = P.one();
            } else {
                // case 3': theta hyperplane (Y - {y_a, y_b}) u x_i
                int a = missing_y[0], bidx = missing_y[1];
                f[yg[a]] = P.mul(P.epsilon(), P.div(L[bidx][i], L[a][bidx]));
                f[yg[bidx]] = P.div(L[a][i], L[a][bidx]);
            }
        } else {
            // case 4: left hyperplane disjoint from X, two missing y's
            int hi = left_hyp_index(h);
            if (hi < 0) fail(ErrorCode::InternalError, "disjoint hyperplane has no left partner");
            put_left(hi);
            int i = missing_y[0], j = missing_y[1];
            f[yg[i]] = P.div(h1.funcs[hi][x1[j]], L[i][j]);
            f[yg[j]] = P.div(h1.funcs[hi][x1[i]], L[j][i]);
        }
        funcs.push_back(std::move(f));
    }
    auto out = make_system(b.matroid, P, funcs);
    auto ctx = MatroidContext::make(b.matroid);
    auto check = check_modular_system(out, ctx);
    if (!check.ok) fail(ErrorCode::InternalError, "theta extension is not modular: " + check.witness);
    return out;
}

}  // namespace matrep
