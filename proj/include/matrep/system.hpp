#pragma once

#include <deque>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "matrep/matroid.hpp"
#include "matrep/pasture.hpp"

namespace matrep {

/// A modular triple of hyperplanes (by index into the canonical
/// hyperplane list) with the data needed to derive its constants: the
/// common corank-2 flat and the least witnesses a in H1 \ F, b in H2 \ F.
struct ModularTriple {
    int h1, h2, h3;
    Mask flat;
    int witness_a;
    int witness_b;
};

/// Per-matroid structures shared by the checker and the census search.
struct MatroidContext {
    Matroid matroid;
    std::vector<Mask> hyps;         // sorted by mask
    std::vector<int> norm_element;  // least element outside each hyperplane
    std::vector<ModularTriple> triples;

    static MatroidContext make(const Matroid& m) {
        MatroidContext c;
        c.matroid = m;
        c.hyps = m.hyperplanes();
        std::sort(c.hyps.begin(), c.hyps.end());
        for (Mask h : c.hyps) c.norm_element.push_back(std::countr_zero(~h));
        std::unordered_map<Mask, int> index;
        for (int i = 0; i < static_cast<int>(c.hyps.size()); ++i) index[c.hyps[i]] = i;
        if (m.rank() >= 2) {
            for (const auto& [flat, through] : m.corank2_incidence()) {
                std::vector<int> ids;
                for (Mask h : through) ids.push_back(index.at(h));
                std::sort(ids.begin(), ids.end());
                for (size_t i = 0; i < ids.size(); ++i)
                    for (size_t j = i + 1; j < ids.size(); ++j)
                        for (size_t k = j + 1; k < ids.size(); ++k) {
                            ModularTriple t;
                            t.h1 = ids[i];
                            t.h2 = ids[j];
                            t.h3 = ids[k];
                            t.flat = flat.members;
                            t.witness_a = std::countr_zero(c.hyps[t.h1] & ~flat.members);
                            t.witness_b = std::countr_zero(c.hyps[t.h2] & ~flat.members);
                            c.triples.push_back(t);
                        }
            }
        }
        return c;
    }
};

/// A (candidate) P-representation: one function E -> P per hyperplane,
/// stored over the canonical (sorted) hyperplane list.
struct HyperplaneSystem {
    Matroid matroid;
    Pasture pasture;
    std::vector<Mask> hyps;
    std::vector<std::vector<PElem>> funcs;  // funcs[h][e]

    PElem value(int h, int e) const { return funcs[h][e]; }

    std::vector<PElem> flatten() const {
        std::vector<PElem> v;
        v.reserve(funcs.size() * matroid.size());
        for (const auto& f : funcs) v.insert(v.end(), f.begin(), f.end());
        return v;
    }

    friend bool operator==(const HyperplaneSystem& a, const HyperplaneSystem& b) {
        return a.hyps == b.hyps && a.funcs == b.funcs && a.pasture == b.pasture;
    }
};

inline HyperplaneSystem make_system(const Matroid& m, const Pasture& p,
                                    const std::vector<std::vector<PElem>>& funcs_by_sorted_hyp) {
    HyperplaneSystem s;
    s.matroid = m;
    s.pasture = p;
    s.hyps = m.hyperplanes();
    std::sort(s.hyps.begin(), s.hyps.end());
    s.funcs = funcs_by_sorted_hyp;
    if (s.funcs.size() != s.hyps.size()) fail(ErrorCode::ValidationError, "one function per hyperplane required");
    return s;
}

/// f_H(e) = 0 exactly on H; throws SupportViolation otherwise.
inline void check_support(const HyperplaneSystem& s) {
    for (size_t h = 0; h < s.hyps.size(); ++h) {
        if (s.funcs[h].size() != static_cast<size_t>(s.matroid.size()))
            fail(ErrorCode::ValidationError, "function domain mismatch");
        for (int e = 0; e < s.matroid.size(); ++e) {
            bool inside = contains(s.hyps[h], e);
            if (inside != (s.funcs[h][e] == 0))
                fail(ErrorCode::SupportViolation,
                     "f_" + std::to_string(h) + "(" + s.matroid.ground().label(e) + ") support mismatch");
        }
    }
}

struct ModularCheck {
    bool ok = true;
    std::string witness;  // first failing (triple, element)
};

/// Derives the triple's constants from the least witnesses: with
/// c2 = 1, the null a+b+0 = 0 forces c3 at witness_a and then c1 at
/// witness_b; afterwards every element must give a null triple.
inline ModularCheck check_modular_system(const HyperplaneSystem& s, const MatroidContext& ctx) {
    check_support(s);
    const auto& P = s.pasture;
    for (const auto& t : ctx.triples) {
        const auto& f1 = s.funcs[t.h1];
        const auto& f2 = s.funcs[t.h2];
        const auto& f3 = s.funcs[t.h3];
        PElem c2 = P.one();
        PElem c3 = P.mul(P.epsilon(), P.div(f2[t.witness_a], f3[t.witness_a]));
        PElem c1 = P.mul(P.epsilon(), P.mul(c3, P.div(f3[t.witness_b], f1[t.witness_b])));
        for (int e = 0; e < s.matroid.size(); ++e) {
            if (!P.is_null(P.mul(c1, f1[e]), P.mul(c2, f2[e]), P.mul(c3, f3[e]))) {
                ModularCheck r;
                r.ok = false;
                std::ostringstream os;
                os << "triple (" << Matroid::join(s.matroid.ground(), s.hyps[t.h1]) << " | "
                   << Matroid::join(s.matroid.ground(), s.hyps[t.h2]) << " | "
                   << Matroid::join(s.matroid.ground(), s.hyps[t.h3]) << ") fails at "
                   << s.matroid.ground().label(e);
                r.witness = os.str();
                return r;
            }
        }
    }
    return {};
}

inline bool is_modular_system(const HyperplaneSystem& s) {
    auto ctx = MatroidContext::make(s.matroid);
    return check_modular_system(s, ctx).ok;
}

/// Per-hyperplane normalization: the least element outside H gets value
/// one. Picks one representative per isomorphism class.
inline HyperplaneSystem normalized(const HyperplaneSystem& s) {
    HyperplaneSystem out = s;
    for (size_t h = 0; h < out.hyps.size(); ++h) {
        int e = std::countr_zero(~out.hyps[h]);
        PElem v = out.funcs[h][e];
        if (v == 0) fail(ErrorCode::SupportViolation, "normalization element has value zero");
        PElem c = out.pasture.inv(v);
        for (auto& x : out.funcs[h]) x = out.pasture.mul(c, x);
    }
    return out;
}

inline HyperplaneSystem scale_hyperplane(HyperplaneSystem s, int h, PElem c) {
    for (auto& x : s.funcs[h]) x = s.pasture.mul(c, x);
    return s;
}

inline HyperplaneSystem scale_element(HyperplaneSystem s, int e, PElem c) {
    for (auto& f : s.funcs) f[e] = s.pasture.mul(c, f[e]);
    return s;
}

inline bool isomorphic_systems(const HyperplaneSystem& a, const HyperplaneSystem& b) {
    if (!(a.pasture == b.pasture) || a.hyps != b.hyps) return false;
    return normalized(a).funcs == normalized(b).funcs;
}

/// Breadth-first search through the element-scaling action on
/// normalized forms; orbits at desk scale are small.
inline bool rescaling_equivalent(const HyperplaneSystem& a, const HyperplaneSystem& b) {
    if (!(a.pasture == b.pasture) || a.hyps != b.hyps) return false;
    auto na = normalized(a), nb = normalized(b);
    if (na.funcs == nb.funcs) return true;
    const auto& P = a.pasture;
    std::unordered_set<std::string> seen;
    auto key = [](const HyperplaneSystem& s) {
        std::string k;
        for (const auto& f : s.funcs)
            for (PElem v : f) k.push_back(static_cast<char>('0' + v));
        return k;
    };
    std::deque<HyperplaneSystem> queue{na};
    seen.insert(key(na));
    while (!queue.empty()) {
        auto cur = queue.front();
        queue.pop_front();
        for (int e = 0; e < cur.matroid.size(); ++e)
            for (PElem u = 1; u <= P.unit_count(); ++u) {
                if (u == P.one()) continue;
                auto next = normalized(scale_element(cur, e, u));
                if (next.funcs == nb.funcs) return true;
                if (seen.insert(key(next)).second) queue.push_back(next);
            }
    }
    return false;
}

/// Applies a pasture morphism valuewise.
inline HyperplaneSystem pushforward(const HyperplaneSystem& s, const PastureMorphism& f) {
    if (!(f.source == s.pasture)) fail(ErrorCode::SourceTargetMismatch, "morphism source mismatch");
    HyperplaneSystem out = s;
    out.pasture = f.target;
    for (auto& fn : out.funcs)
        for (auto& v : fn) v = f.map[v];
    return out;
}

/// Text form: one line per hyperplane, keyed by the complement's labels.
inline std::string system_to_text(const HyperplaneSystem& s) {
    std::ostringstream os;
    for (size_t h = 0; h < s.hyps.size(); ++h) {
        Mask co = s.matroid.ground().all() & ~s.hyps[h];
        os << "H\\" << Matroid::join(s.matroid.ground(), co) << ":";
        for (int e = 0; e < s.matroid.size(); ++e)
            os << " " << s.matroid.ground().label(e) << "=" << s.pasture.label(s.funcs[h][e]);
        os << "\n";
    }
    return os.str();
}

}  // namespace matrep
