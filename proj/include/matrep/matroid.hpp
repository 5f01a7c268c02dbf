#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <unordered_set>

#include "matrep/core.hpp"

namespace matrep {

struct Flat {
    Mask members = 0;
    int rank = 0;
    int corank = 0;

    friend bool operator==(const Flat&, const Flat&) = default;
    friend auto operator<=>(const Flat& a, const Flat& b) { return a.members <=> b.members; }
};

/// An exact matroid given by its full basis family. Immutable after
/// construction; all bases have cardinality rank().
class Matroid {
public:
    Matroid() = default;

    /// Validates the basis family exhaustively: nonempty, equal
    /// cardinality, and the exchange axiom for every pair of bases.
    static Matroid from_bases(GroundSet ground, std::vector<Mask> bases, std::string name = "") {
        if (bases.empty()) fail(ErrorCode::EmptyBasisFamily, "no bases given");
        std::sort(bases.begin(), bases.end());
        bases.erase(std::unique(bases.begin(), bases.end()), bases.end());
        const Mask all = ground.all();
        const int r = popcount(bases[0]);
        for (Mask b : bases) {
            if (b & ~all) fail(ErrorCode::ElementNotInGround, "basis uses element outside ground set");
            if (popcount(b) != r)
                fail(ErrorCode::UnequalCardinality,
                     "bases of cardinality " + std::to_string(popcount(b)) + " and " + std::to_string(r));
        }
        std::unordered_set<Mask> lookup(bases.begin(), bases.end());
        for (Mask b1 : bases) {
            for (Mask b2 : bases) {
                if (b1 == b2) continue;
                Mask only1 = b1 & ~b2;
                bool ok = true;
                std::string witness;
                for_each_bit(only1, [&](int x) {
                    if (!ok) return;
                    bool found = false;
                    for_each_bit(b2 & ~b1, [&](int y) {
                        if (!found && lookup.count((b1 & ~bit(x)) | bit(y))) found = true;
                    });
                    if (!found) {
                        ok = false;
                        witness = "bases {" + join(ground, b1) + "}, {" + join(ground, b2) + "}, element " +
                                  ground.label(x);
                    }
                });
                if (!ok) fail(ErrorCode::ExchangeAxiomViolated, witness);
            }
        }
        Matroid m;
        m.ground_ = std::move(ground);
        m.bases_ = std::move(bases);
        m.rank_ = r;
        m.name_ = std::move(name);
        return m;
    }

    const GroundSet& ground() const { return ground_; }
    const std::vector<Mask>& bases() const { return bases_; }
    int rank() const { return rank_; }
    int size() const { return ground_.size(); }
    const std::string& name() const { return name_; }
    void set_name(std::string n) { name_ = std::move(n); }

    bool operator==(const Matroid& o) const { return ground_ == o.ground_ && bases_ == o.bases_; }

    void require_subset(Mask s) const {
        if (s & ~ground_.all()) fail(ErrorCode::ElementNotInGround, "subset outside ground set");
    }

    /// r(S) = max over bases B of |B ∩ S|.
    int rank_of(Mask s) const {
        require_subset(s);
        int best = 0;
        for (Mask b : bases_) best = std::max(best, popcount(b & s));
        return best;
    }

    bool is_independent(Mask s) const { return rank_of(s) == popcount(s); }
    bool is_basis(Mask s) const { return std::binary_search(bases_.begin(), bases_.end(), s); }

    /// Smallest superset of s with the same rank.
    Mask closure_mask(Mask s) const {
        require_subset(s);
        int rs = rank_of(s);
        Mask cl = s;
        for (int e = 0; e < size(); ++e)
            if (!contains(s, e) && rank_of(s | bit(e)) == rs) cl |= bit(e);
        return cl;
    }

    Flat closure(Mask s) const {
        Mask cl = closure_mask(s);
        int r = rank_of(cl);
        return Flat{cl, r, rank_ - r};
    }

    bool is_flat(Mask s) const { return closure_mask(s) == s; }

    /// The whole flat lattice, grouped by rank, computed by the standard
    /// sweep: rank-(k+1) flats are closures of F ∪ {e} over rank-k flats F.
    std::vector<std::vector<Mask>> flats_by_rank() const {
        std::vector<std::vector<Mask>> by_rank(rank_ + 1);
        by_rank[0] = {closure_mask(0)};
        for (int k = 0; k < rank_; ++k) {
            std::set<Mask> next;
            for (Mask f : by_rank[k])
                for (int e = 0; e < size(); ++e)
                    if (!contains(f, e)) {
                        Mask g = closure_mask(f | bit(e));
                        if (rank_of(g) == k + 1) next.insert(g);
                    }
            by_rank[k + 1].assign(next.begin(), next.end());
        }
        return by_rank;
    }

    std::vector<Flat> flats_by_corank(int k) const {
        if (k < 0 || k > rank_) fail(ErrorCode::CorankOutOfRange, "corank " + std::to_string(k));
        auto lattice = flats_by_rank();
        std::vector<Flat> out;
        for (Mask f : lattice[rank_ - k]) out.push_back(Flat{f, rank_ - k, k});
        return out;
    }

    std::vector<Mask> hyperplanes() const {
        if (rank_ == 0) return {};
        auto lattice = flats_by_rank();
        return lattice[rank_ - 1];
    }

    bool is_hyperplane(Mask s) const {
        return is_flat(s) && rank_ >= 1 && rank_of(s) == rank_ - 1;
    }

    /// Second oracle: every flat, found by scanning the full power set.
    /// Only meant for cross-checks on small ground sets.
    std::vector<std::vector<Mask>> flats_by_rank_powerset() const {
        std::vector<std::vector<Mask>> by_rank(rank_ + 1);
        for (Mask s = 0; s <= ground_.all(); ++s)
            if (closure_mask(s) == s) by_rank[rank_of(s)].push_back(s);
        for (auto& v : by_rank) std::sort(v.begin(), v.end());
        return by_rank;
    }

    /// r(T) + r(F) = r(T ∩ F) + r(T ∪ F) against every flat F.
    bool is_modular_flat(Mask t) const {
        if (!is_flat(t)) fail(ErrorCode::NotAFlat, "{" + join(ground_, t) + "} is not a flat");
        int rt = rank_of(t);
        for (const auto& level : flats_by_rank())
            for (Mask f : level)
                if (rt + rank_of(f) != rank_of(t & f) + rank_of(t | f)) return false;
        return true;
    }

    /// True iff F = h1∩h2∩h3 is a corank-2 flat equal to every pairwise
    /// intersection.
    bool is_modular_triple(Mask h1, Mask h2, Mask h3) const {
        for (Mask h : {h1, h2, h3})
            if (!is_hyperplane(h)) fail(ErrorCode::NotAHyperplane, "{" + join(ground_, h) + "}");
        if (h1 == h2 || h1 == h3 || h2 == h3) return false;
        Mask f = h1 & h2 & h3;
        if (!is_flat(f) || rank_of(f) != rank_ - 2) return false;
        return (h1 & h2) == f && (h1 & h3) == f && (h2 & h3) == f;
    }

    bool is_modular_pair(Mask h1, Mask h2) const {
        for (Mask h : {h1, h2})
            if (!is_hyperplane(h)) fail(ErrorCode::NotAHyperplane, "{" + join(ground_, h) + "}");
        return h1 != h2 && rank_of(h1 & h2) == rank_ - 2;
    }

    /// For each corank-2 flat, the hyperplanes containing it. Any three
    /// hyperplanes through a common corank-2 flat form a modular triple.
    std::vector<std::pair<Flat, std::vector<Mask>>> corank2_incidence() const {
        std::vector<std::pair<Flat, std::vector<Mask>>> out;
        if (rank_ < 2) return out;
        auto hyps = hyperplanes();
        for (const Flat& f : flats_by_corank(2)) {
            std::vector<Mask> through;
            for (Mask h : hyps)
                if ((f.members & ~h) == 0) through.push_back(h);
            out.push_back({f, std::move(through)});
        }
        return out;
    }

    Matroid dual() const {
        std::vector<Mask> co;
        co.reserve(bases_.size());
        const Mask all = ground_.all();
        for (Mask b : bases_) co.push_back(all & ~b);
        std::sort(co.begin(), co.end());
        Matroid m;
        m.ground_ = ground_;
        m.bases_ = std::move(co);
        m.rank_ = size() - rank_;
        m.name_ = name_.empty() ? "" : name_ + "*";
        return m;
    }

    /// Deletion M \ s, on the induced ground order.
    Matroid remove(Mask s) const {
        require_subset(s);
        Mask keep = ground_.all() & ~s;
        int r = rank_of(keep);
        std::set<Mask> bs;
        for (Mask b : bases_)
            if (popcount(b & keep) == r) bs.insert(b & keep);
        return relabel_to_subground(keep, {bs.begin(), bs.end()});
    }

    /// Contraction M / s.
    Matroid contract(Mask s) const {
        require_subset(s);
        Mask keep = ground_.all() & ~s;
        int rs = rank_of(s);
        std::set<Mask> bs;
        for (Mask b : bases_)
            if (popcount(b & s) == rs) bs.insert(b & keep);
        // keep only the maximum-size remnants (all are, when |B ∩ s| = r(s))
        return relabel_to_subground(keep, {bs.begin(), bs.end()});
    }

    Matroid restriction(Mask s) const { return remove(ground_.all() & ~s); }

    Mask loops() const {
        Mask in_some_basis = 0;
        for (Mask b : bases_) in_some_basis |= b;
        Mask l = 0;
        for (int e = 0; e < size(); ++e)
            if (!contains(in_some_basis, e)) l |= bit(e);
        return l;
    }

    bool is_loop(int e) const { return rank_of(bit(e)) == 0; }
    bool is_coloop(int e) const { return rank_of(ground_.all() & ~bit(e)) == rank_ - 1; }

    bool is_simple() const {
        for (int e = 0; e < size(); ++e) {
            if (is_loop(e)) return false;
            for (int f = e + 1; f < size(); ++f)
                if (rank_of(bit(e) | bit(f)) < 2) return false;
        }
        return true;
    }

    /// Removes loops and keeps the first element of each parallel class.
    /// The map sends every surviving or collapsed element to its
    /// representative; loops are dropped from the map.
    std::pair<Matroid, std::map<std::string, std::string>> simplify() const {
        Mask keep = 0;
        std::map<std::string, std::string> quot;
        std::vector<int> rep(size(), -1);
        for (int e = 0; e < size(); ++e) {
            if (is_loop(e)) continue;
            int r = -1;
            for (int f = 0; f < e; ++f)
                if (rep[f] == f && rank_of(bit(e) | bit(f)) == 1) {
                    r = f;
                    break;
                }
            rep[e] = (r == -1) ? e : r;
            if (rep[e] == e) keep |= bit(e);
            quot[ground_.label(e)] = ground_.label(rep[e]);
        }
        return {remove(ground_.all() & ~keep), std::move(quot)};
    }

    std::pair<Matroid, std::map<std::string, std::string>> cosimplify() const {
        auto [sd, map] = dual().simplify();
        return {sd.dual(), std::move(map)};
    }

    /// Minimal dependent sets.
    std::vector<Mask> circuits() const {
        std::vector<Mask> out;
        const Mask all = ground_.all();
        // scan subsets in increasing size; a dependent set none of whose
        // one-element deletions is dependent is a circuit
        std::vector<std::vector<Mask>> by_size(size() + 1);
        for (Mask s = 1; s <= all; ++s) by_size[popcount(s)].push_back(s);
        std::unordered_set<Mask> seen_dependent;
        for (int sz = 1; sz <= size(); ++sz) {
            for (Mask s : by_size[sz]) {
                bool has_dep_subset = false;
                for_each_bit(s, [&](int e) {
                    if (!has_dep_subset && seen_dependent.count(s & ~bit(e))) has_dep_subset = true;
                });
                if (has_dep_subset) {
                    seen_dependent.insert(s);
                    continue;
                }
                if (rank_of(s) < sz) {
                    out.push_back(s);
                    seen_dependent.insert(s);
                }
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Connectivity components: transitive closure of circuit-sharing.
    /// Loops and coloops end up in singleton components.
    std::vector<Mask> components() const {
        std::vector<int> parent(size());
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](int x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        for (Mask c : circuits()) {
            int first = std::countr_zero(c);
            for_each_bit(c, [&](int e) { parent[find(e)] = find(first); });
        }
        std::map<int, Mask> comps;
        for (int e = 0; e < size(); ++e) comps[find(e)] |= bit(e);
        std::vector<Mask> out;
        for (auto& [root, m] : comps) out.push_back(m);
        return out;
    }

    /// rank(E ∖ x) = rank(E).
    bool is_coindependent(Mask x) const {
        require_subset(x);
        return rank_of(ground_.all() & ~x) == rank_;
    }

    static std::string join(const GroundSet& g, Mask m) {
        std::string s;
        for_each_bit(m, [&](int i) {
            if (!s.empty()) s += ",";
            s += g.label(i);
        });
        return s;
    }

private:
    Matroid relabel_to_subground(Mask keep, std::vector<Mask> bs) const {
        std::vector<std::string> labels;
        std::vector<int> newpos(size(), -1);
        for_each_bit(keep, [&](int e) {
            newpos[e] = static_cast<int>(labels.size());
            labels.push_back(ground_.label(e));
        });
        std::vector<Mask> mapped;
        mapped.reserve(bs.size());
        for (Mask b : bs) {
            Mask nb = 0;
            for_each_bit(b, [&](int e) { nb |= bit(newpos[e]); });
            mapped.push_back(nb);
        }
        std::sort(mapped.begin(), mapped.end());
        mapped.erase(std::unique(mapped.begin(), mapped.end()), mapped.end());
        Matroid m;
        m.ground_ = GroundSet(std::move(labels));
        m.bases_ = std::move(mapped);
        m.rank_ = m.bases_.empty() ? 0 : popcount(m.bases_[0]);
        return m;
    }

    GroundSet ground_;
    std::vector<Mask> bases_;
    int rank_ = 0;
    std::string name_;
};

/// Free-function spelling of the validating constructor.
inline Matroid matroid_from_bases(GroundSet ground, std::vector<Mask> bases, std::string name = "") {
    return Matroid::from_bases(std::move(ground), std::move(bases), std::move(name));
}

namespace detail {

struct IsoInvariant {
    int bases_through = 0;
    int hyperplanes_through = 0;
    std::vector<int> circuit_size_profile;

    friend bool operator==(const IsoInvariant&, const IsoInvariant&) = default;
};

inline std::vector<IsoInvariant> iso_invariants(const Matroid& m, const std::vector<Mask>& circuits,
                                                const std::vector<Mask>& hyps) {
    std::vector<IsoInvariant> inv(m.size());
    for (int e = 0; e < m.size(); ++e) {
        inv[e].circuit_size_profile.assign(m.size() + 1, 0);
        for (Mask b : m.bases())
            if (contains(b, e)) inv[e].bases_through++;
        for (Mask h : hyps)
            if (contains(h, e)) inv[e].hyperplanes_through++;
        for (Mask c : circuits)
            if (contains(c, e)) inv[e].circuit_size_profile[popcount(c)]++;
    }
    return inv;
}

}  // namespace detail

/// Searches for a basis-preserving bijection. Elements of m1 are mapped
/// in canonical order and candidate images are tried in canonical order,
/// pruned by per-element incidence counts, so the first hit is the
/// lexicographically least bijection.
inline std::optional<std::vector<int>> find_isomorphism(const Matroid& m1, const Matroid& m2) {
    const int n = m1.size();
    if (n != m2.size() || m1.rank() != m2.rank() || m1.bases().size() != m2.bases().size()) return std::nullopt;

    auto c1 = m1.circuits();
    auto c2 = m2.circuits();
    if (c1.size() != c2.size()) return std::nullopt;
    auto h1 = m1.hyperplanes();
    auto h2 = m2.hyperplanes();
    if (h1.size() != h2.size()) return std::nullopt;

    auto inv1 = detail::iso_invariants(m1, c1, h1);
    auto inv2 = detail::iso_invariants(m2, c2, h2);

    std::unordered_set<Mask> circ2(c2.begin(), c2.end());
    std::unordered_set<Mask> circ1(c1.begin(), c1.end());
    std::unordered_set<Mask> bases2(m2.bases().begin(), m2.bases().end());

    std::vector<int> image(n, -1), preimage(n, -1);

    // circuits of m1 indexed by their largest element, so each is checked
    // exactly once, when its last member gets an image
    std::vector<std::vector<Mask>> c1_by_last(n), c2_by_last(n);
    for (Mask c : c1) c1_by_last[31 - std::countl_zero(c)].push_back(c);
    for (Mask c : c2) c2_by_last[31 - std::countl_zero(c)].push_back(c);

    auto map_forward = [&](Mask s) {
        Mask t = 0;
        for_each_bit(s, [&](int e) { t |= bit(image[e]); });
        return t;
    };
    auto map_backward = [&](Mask s) {
        Mask t = 0;
        for_each_bit(s, [&](int e) { t |= bit(preimage[e]); });
        return t;
    };

    Mask assigned1 = 0, assigned2 = 0;

    std::function<bool(int)> dfs = [&](int e) -> bool {
        if (e == n) {
            for (Mask b : m1.bases())
                if (!bases2.count(map_forward(b))) return false;
            return true;
        }
        for (int f = 0; f < n; ++f) {
            if (preimage[f] != -1 || !(inv1[e] == inv2[f])) continue;
            image[e] = f;
            preimage[f] = e;
            assigned1 |= bit(e);
            assigned2 |= bit(f);
            bool ok = true;
            for (Mask c : c1_by_last[e])
                if ((c & ~assigned1) == 0 && !circ2.count(map_forward(c))) {
                    ok = false;
                    break;
                }
            if (ok)
                for (Mask c : c2_by_last[f])
                    if ((c & ~assigned2) == 0 && !circ1.count(map_backward(c))) {
                        ok = false;
                        break;
                    }
            if (ok && dfs(e + 1)) return true;
            image[e] = -1;
            preimage[f] = -1;
            assigned1 &= ~bit(e);
            assigned2 &= ~bit(f);
        }
        return false;
    };

    if (!dfs(0)) return std::nullopt;
    return image;
}

inline std::optional<std::map<std::string, std::string>> are_isomorphic(const Matroid& m1, const Matroid& m2) {
    auto img = find_isomorphism(m1, m2);
    if (!img) return std::nullopt;
    std::map<std::string, std::string> out;
    for (int e = 0; e < m1.size(); ++e) out[m1.ground().label(e)] = m2.ground().label((*img)[e]);
    return out;
}

}  // namespace matrep
