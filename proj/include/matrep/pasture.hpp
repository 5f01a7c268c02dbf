#pragma once

#include <algorithm>
#include <array>
#include <functional>
#include <string>
#include <vector>

#include "matrep/core.hpp"

namespace matrep {

/// Pasture elements: 0 is the absorbing zero, 1..unit_count() are units.
using PElem = int;

struct NullTriple {
    PElem a, b, c;  // sorted a <= b <= c

    friend bool operator==(const NullTriple&, const NullTriple&) = default;
    friend auto operator<=>(const NullTriple&, const NullTriple&) = default;
};

inline NullTriple make_triple(PElem x, PElem y, PElem z) {
    std::array<PElem, 3> t{x, y, z};
    std::sort(t.begin(), t.end());
    return {t[0], t[1], t[2]};
}

/// A finite pasture: unit group with multiplication table, zero, epsilon,
/// and a nullset of unordered triples closed under permutation and
/// scaling. Immutable after validation.
class Pasture {
public:
    Pasture() = default;

    /// `mul` gives the unit-group table (1-based unit ids). `null_gens`
    /// may list only orbit representatives; closure under scaling is
    /// taken here. With `nulls_complete`, any triple the closure adds
    /// beyond the input is an error instead.
    static Pasture make(std::string name, std::vector<std::string> unit_labels,
                        std::function<int(int, int)> mul, std::vector<NullTriple> null_gens,
                        bool nulls_complete = false) {
        Pasture p;
        p.name_ = std::move(name);
        p.units_ = std::move(unit_labels);
        const int u = p.unit_count();
        if (u == 0) fail(ErrorCode::NotAGroup, "no units");
        p.mul_.assign((u + 1) * (u + 1), 0);
        for (int a = 1; a <= u; ++a)
            for (int b = 1; b <= u; ++b) {
                int c = mul(a, b);
                if (c < 1 || c > u) fail(ErrorCode::NotAGroup, "table entry out of range");
                p.mul_[a * (u + 1) + b] = c;
            }
        p.validate_group();
        p.expand_nulls(null_gens, nulls_complete);
        p.validate_axioms();
        return p;
    }

    const std::string& name() const { return name_; }
    int unit_count() const { return static_cast<int>(units_.size()); }
    int element_count() const { return unit_count() + 1; }
    const std::vector<std::string>& unit_labels() const { return units_; }

    std::string label(PElem e) const { return e == 0 ? "0" : units_[e - 1]; }

    PElem element(const std::string& lab) const {
        if (lab == "0") return 0;
        for (int i = 0; i < unit_count(); ++i)
            if (units_[i] == lab) return i + 1;
        fail(ErrorCode::ParseError, "unknown pasture element '" + lab + "'");
    }

    PElem one() const { return one_; }
    PElem epsilon() const { return epsilon_; }

    PElem mul(PElem a, PElem b) const {
        if (a == 0 || b == 0) return 0;
        return mul_[a * (unit_count() + 1) + b];
    }

    PElem inv(PElem a) const {
        if (a == 0) fail(ErrorCode::ValidationError, "inverse of zero");
        return inv_[a];
    }

    PElem div(PElem a, PElem b) const { return mul(a, inv(b)); }
    PElem neg(PElem a) const { return mul(epsilon_, a); }

    bool is_null(PElem x, PElem y, PElem z) const {
        auto t = make_triple(x, y, z);
        return nulls_[triple_index(t)];
    }
    bool is_null(const NullTriple& t) const { return nulls_[triple_index(t)]; }

    /// All null triples in canonical sorted order.
    std::vector<NullTriple> null_triples() const {
        std::vector<NullTriple> out;
        const int n = element_count();
        for (PElem a = 0; a < n; ++a)
            for (PElem b = a; b < n; ++b)
                for (PElem c = b; c < n; ++c)
                    if (nulls_[triple_index({a, b, c})]) out.push_back({a, b, c});
        return out;
    }

    /// Orbit representatives of the nullset under scaling (minimal triple
    /// per orbit); what the text format stores.
    std::vector<NullTriple> null_orbit_representatives() const {
        std::vector<NullTriple> out;
        for (const auto& t : null_triples()) {
            bool minimal = true;
            for (int d = 1; d <= unit_count() && minimal; ++d) {
                NullTriple s = make_triple(mul(t.a, d), mul(t.b, d), mul(t.c, d));
                if (s < t) minimal = false;
            }
            if (minimal) out.push_back(t);
        }
        return out;
    }

    bool operator==(const Pasture& o) const {
        return units_ == o.units_ && mul_ == o.mul_ && nulls_ == o.nulls_;
    }

private:
    int triple_index(const NullTriple& t) const {
        const int n = element_count();
        return (t.a * n + t.b) * n + t.c;
    }

    void validate_group() {
        const int u = unit_count();
        one_ = 0;
        for (int e = 1; e <= u; ++e) {
            bool id = true;
            for (int a = 1; a <= u; ++a)
                if (mul(e, a) != a || mul(a, e) != a) id = false;
            if (id) one_ = e;
        }
        if (one_ == 0) fail(ErrorCode::NotAGroup, "no identity");
        inv_.assign(u + 1, 0);
        for (int a = 1; a <= u; ++a) {
            for (int b = 1; b <= u; ++b)
                if (mul(a, b) == one_) inv_[a] = b;
            if (inv_[a] == 0) fail(ErrorCode::NotAGroup, "'" + label(a) + "' has no inverse");
        }
        for (int a = 1; a <= u; ++a)
            for (int b = 1; b <= u; ++b) {
                if (mul(a, b) != mul(b, a)) fail(ErrorCode::NotAGroup, "table not commutative");
                for (int c = 1; c <= u; ++c)
                    if (mul(mul(a, b), c) != mul(a, mul(b, c))) fail(ErrorCode::NotAGroup, "table not associative");
            }
    }

    void expand_nulls(const std::vector<NullTriple>& gens, bool nulls_complete) {
        const int n = element_count();
        nulls_.assign(n * n * n, false);
        std::vector<bool> given(n * n * n, false);
        auto add = [&](const NullTriple& t) {
            nulls_[triple_index(t)] = true;
        };
        for (const auto& g : gens) {
            NullTriple t = make_triple(g.a, g.b, g.c);
            if (t.c >= n || t.a < 0) fail(ErrorCode::ParseError, "null triple out of range");
            given[triple_index(t)] = true;
        }
        add({0, 0, 0});
        for (const auto& g : gens) {
            NullTriple t = make_triple(g.a, g.b, g.c);
            add(t);
            for (int d = 1; d <= unit_count(); ++d) add(make_triple(mul(t.a, d), mul(t.b, d), mul(t.c, d)));
        }
        if (nulls_complete) {
            for (PElem a = 0; a < n; ++a)
                for (PElem b = a; b < n; ++b)
                    for (PElem c = b; c < n; ++c) {
                        NullTriple t{a, b, c};
                        if (nulls_[triple_index(t)] && !given[triple_index(t)] && !(t == NullTriple{0, 0, 0}))
                            fail(ErrorCode::P2ClosureContradiction,
                                 "declared-complete nullset is missing " + label(a) + "+" + label(b) + "+" + label(c));
                    }
        }
    }

    void validate_axioms() {
        // P1
        for (int a = 1; a <= unit_count(); ++a)
            if (is_null(a, 0, 0)) fail(ErrorCode::P1Violated, label(a) + "+0+0 is null");
        // P3
        epsilon_ = 0;
        for (int e = 1; e <= unit_count(); ++e) {
            if (is_null(one_, e, 0)) {
                if (epsilon_ != 0)
                    fail(ErrorCode::P3NotUnique, "1+" + label(epsilon_) + "+0 and 1+" + label(e) + "+0 both null");
                epsilon_ = e;
            }
        }
        if (epsilon_ == 0) fail(ErrorCode::P3Missing, "no unit e with 1+e+0 null");
        // derived rule, used throughout: a+b+0 null iff b = eps*a
        for (int a = 1; a <= unit_count(); ++a)
            for (int b = 1; b <= unit_count(); ++b)
                if (is_null(a, b, 0) != (b == mul(epsilon_, a)))
                    fail(ErrorCode::P2ClosureContradiction,
                         label(a) + "+" + label(b) + "+0 contradicts the derived rule");
    }

    std::string name_;
    std::vector<std::string> units_;
    std::vector<int> mul_;
    std::vector<int> inv_;
    std::vector<bool> nulls_;
    PElem one_ = 0;
    PElem epsilon_ = 0;
};

namespace detail {

/// Arithmetic for GF(p^k), q <= 9; elements encoded as base-p digit
/// strings of polynomials, reduced by a fixed irreducible.
struct SmallField {
    int p, k, q;

    static SmallField of(int q) {
        switch (q) {
            case 2: return {2, 1, 2};
            case 3: return {3, 1, 3};
            case 4: return {2, 2, 4};
            case 5: return {5, 1, 5};
            case 7: return {7, 1, 7};
            case 8: return {2, 3, 8};
            case 9: return {3, 2, 9};
            default: fail(ErrorCode::NotPrimePower, "gf(" + std::to_string(q) + ") not supported (q <= 9)");
        }
    }

    // reduction polynomials: x^2+x+1 (4), x^3+x+1 (8), x^2+1 (9)
    int add(int a, int b) const {
        int r = 0, mul = 1;
        for (int i = 0; i < k; ++i) {
            r += ((a % p + b % p) % p) * mul;
            a /= p;
            b /= p;
            mul *= p;
        }
        return r;
    }

    int times(int a, int b) const {
        // polynomial product with reduction, digits base p
        std::array<int, 8> prod{};
        for (int i = 0, x = a; i < k; ++i, x /= p)
            for (int j = 0, y = b; j < k; ++j, y /= p) prod[i + j] = (prod[i + j] + (x % p) * (y % p)) % p;
        for (int d = 2 * k - 2; d >= k; --d) {
            int c = prod[d];
            if (c == 0) continue;
            prod[d] = 0;
            if (q == 4 || q == 8) {
                // x^k = x + 1 for both x^2+x+1 and x^3+x+1 over GF(2)
                prod[d - k + 1] = (prod[d - k + 1] + c) % p;
                prod[d - k] = (prod[d - k] + c) % p;
            } else if (q == 9) {
                // x^2 = -1
                prod[d - k] = (prod[d - k] + c * (p - 1)) % p;
            }
        }
        int r = 0, mul = 1;
        for (int i = 0; i < k; ++i) {
            r += prod[i] * mul;
            mul *= p;
        }
        return r;
    }
};

}  // namespace detail

/// gf(q) as a pasture: units are the powers of a fixed multiplicative
/// generator; a triple is null iff it sums to zero in the field.
inline Pasture gf(int q) {
    auto F = detail::SmallField::of(q);
    // find a generator of the (cyclic) unit group
    int gen = 0;
    for (int c = 1; c < q && gen == 0; ++c) {
        int x = c, order = 1;
        while (x != 1) {
            x = F.times(x, c);
            ++order;
            if (order > q) fail(ErrorCode::InternalError, "field arithmetic broken");
        }
        if (order == q - 1) gen = c;
    }
    std::vector<int> power_to_field(q - 1);  // unit id i+1 = gen^i
    power_to_field[0] = 1;
    for (int i = 1; i < q - 1; ++i) power_to_field[i] = F.times(power_to_field[i - 1], gen);
    std::vector<int> field_to_unit(q, 0);
    for (int i = 0; i < q - 1; ++i) field_to_unit[power_to_field[i]] = i + 1;

    std::vector<std::string> labels;
    if (F.k == 1) {
        labels.resize(q - 1);
        for (int i = 0; i < q - 1; ++i) labels[i] = std::to_string(power_to_field[i]);
    } else {
        labels.push_back("1");
        for (int i = 1; i < q - 1; ++i) labels.push_back(i == 1 ? "w" : "w" + std::to_string(i));
    }

    auto mul = [q](int a, int b) { return (a - 1 + b - 1) % (q - 1) + 1; };

    std::vector<NullTriple> gens;
    auto as_field = [&](PElem e) { return e == 0 ? 0 : power_to_field[e - 1]; };
    for (PElem a = 0; a < q; ++a)
        for (PElem b = a; b < q; ++b)
            for (PElem c = b; c < q; ++c)
                if (F.add(F.add(as_field(a), as_field(b)), as_field(c)) == 0) gens.push_back({a, b, c});
    return Pasture::make("gf(" + std::to_string(q) + ")", std::move(labels), mul, std::move(gens));
}

/// The regular partial field F1pm = {0, 1, -1} with 1 + (-1) = 0 only.
inline Pasture f1pm() {
    return Pasture::make("f1pm", {"1", "-1"}, [](int a, int b) { return a == b ? 1 : 2; }, {{0, 1, 2}});
}

/// The Krasner hyperfield: x + y always contains everything when x = y != 0.
inline Pasture krasner() {
    return Pasture::make("krasner", {"1"}, [](int, int) { return 1; }, {{0, 1, 1}, {1, 1, 1}});
}

/// The sign hyperfield S.
inline Pasture sign_hyperfield() {
    return Pasture::make("sign", {"1", "-1"}, [](int a, int b) { return a == b ? 1 : 2; },
                         {{0, 1, 2}, {1, 1, 2}, {1, 2, 2}});
}

inline Pasture builtin_pasture(const std::string& name) {
    if (name == "f1pm") return f1pm();
    if (name == "krasner") return krasner();
    if (name == "sign") return sign_hyperfield();
    if (name.rfind("gf(", 0) == 0 && name.back() == ')') {
        int q = 0;
        for (size_t i = 3; i + 1 < name.size(); ++i) {
            if (!isdigit(name[i])) fail(ErrorCode::UnknownName, name);
            q = q * 10 + (name[i] - '0');
        }
        return gf(q);
    }
    fail(ErrorCode::UnknownName, "no built-in pasture '" + name + "'");
}

inline std::vector<std::string> builtin_pasture_names() {
    return {"f1pm", "krasner", "sign", "gf(2)", "gf(3)", "gf(4)", "gf(5)", "gf(7)", "gf(8)", "gf(9)"};
}

/// A multiplicative unit map preserving null triples. Source and target
/// are held by value; pastures are tiny.
struct PastureMorphism {
    Pasture source;
    Pasture target;
    std::vector<PElem> map;  // index: source elements (0..u); map[0] = 0

    PElem operator()(PElem e) const { return map[e]; }

    friend bool operator==(const PastureMorphism& a, const PastureMorphism& b) {
        return a.source == b.source && a.target == b.target && a.map == b.map;
    }
};

/// Exhaustive, deterministic enumeration: backtracking over unit images
/// with multiplicative consistency, then the nullset filter.
inline std::vector<PastureMorphism> all_morphisms(const Pasture& p, const Pasture& q) {
    const int u = p.unit_count();
    std::vector<PElem> img(u + 1, -1);
    img[0] = 0;
    std::vector<PastureMorphism> out;

    auto consistent = [&](int k) {
        for (int a = 1; a <= k; ++a) {
            int ab = p.mul(a, k);
            if (ab <= k && img[ab] != q.mul(img[a], img[k])) return false;
            for (int b = 1; b < k; ++b) {
                int c = p.mul(a, b);
                if (c == k && img[c] != q.mul(img[a], img[b])) return false;
            }
        }
        return true;
    };

    std::function<void(int)> dfs = [&](int k) {
        if (k > u) {
            for (const auto& t : p.null_triples())
                if (!q.is_null(img[t.a], img[t.b], img[t.c])) return;
            out.push_back({p, q, img});
            return;
        }
        if (k == p.one()) {
            img[k] = q.one();
            if (consistent(k)) dfs(k + 1);
            img[k] = -1;
            return;
        }
        for (int v = 1; v <= q.unit_count(); ++v) {
            img[k] = v;
            if (consistent(k)) dfs(k + 1);
        }
        img[k] = -1;
    };
    dfs(1);
    return out;
}

inline bool is_morphism(const PastureMorphism& f) {
    const auto& p = f.source;
    const auto& q = f.target;
    if (f.map[p.one()] != q.one()) return false;
    for (int a = 1; a <= p.unit_count(); ++a)
        for (int b = 1; b <= p.unit_count(); ++b)
            if (f.map[p.mul(a, b)] != q.mul(f.map[a], f.map[b])) return false;
    for (const auto& t : p.null_triples())
        if (!q.is_null(f.map[t.a], f.map[t.b], f.map[t.c])) return false;
    return true;
}

/// True iff the unit map is bijective and the inverse map also preserves
/// null triples.
inline bool is_isomorphism(const PastureMorphism& f) {
    const auto& p = f.source;
    const auto& q = f.target;
    if (p.unit_count() != q.unit_count()) return false;
    std::vector<PElem> inv(q.unit_count() + 1, -1);
    inv[0] = 0;
    for (int a = 1; a <= p.unit_count(); ++a) {
        if (f.map[a] == 0 || inv[f.map[a]] != -1) return false;
        inv[f.map[a]] = a;
    }
    for (const auto& t : q.null_triples())
        if (!p.is_null(inv[t.a], inv[t.b], inv[t.c])) return false;
    return true;
}

inline bool unit_map_surjective(const PastureMorphism& f) {
    std::vector<bool> hit(f.target.unit_count() + 1, false);
    for (int a = 1; a <= f.source.unit_count(); ++a) hit[f.map[a]] = true;
    for (int v = 1; v <= f.target.unit_count(); ++v)
        if (!hit[v]) return false;
    return true;
}

/// An endomorphism of a finite pasture whose unit map is onto must be
/// an isomorphism; callers assert exactly that.
inline bool check_surjective_endo(const Pasture& p, const PastureMorphism& f) {
    if (!(f.source == p) || !(f.target == p)) fail(ErrorCode::SourceTargetMismatch, "endomorphism expected");
    return is_isomorphism(f);
}

inline PastureMorphism compose(const PastureMorphism& g, const PastureMorphism& f) {
    if (!(f.target == g.source)) fail(ErrorCode::SourceTargetMismatch, "composition mismatch");
    std::vector<PElem> m(f.source.unit_count() + 1);
    for (int a = 0; a <= f.source.unit_count(); ++a) m[a] = g.map[f.map[a]];
    return {f.source, g.target, std::move(m)};
}

inline PastureMorphism identity_morphism(const Pasture& p) {
    std::vector<PElem> m(p.unit_count() + 1);
    for (int a = 0; a <= p.unit_count(); ++a) m[a] = a;
    return {p, p, std::move(m)};
}

}  // namespace matrep
