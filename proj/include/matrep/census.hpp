#pragma once

#include <atomic>
#include <cstdint>
#include <future>
#include <thread>

#include "matrep/system.hpp"

namespace matrep {

struct CensusOptions {
    std::uint64_t budget = 100'000'000;  // search nodes before giving up
    int threads = 1;
};

struct ValueVectorHash {
    std::size_t operator()(const std::vector<PElem>& v) const {
        std::uint64_t h = 1469598103934665603ull;
        for (PElem x : v) {
            h ^= static_cast<std::uint64_t>(x) + 0x9e3779b97f4a7c15ull;
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};

/// Counts and canonical representatives of isomorphism / rescaling
/// classes of P-representations of one matroid.
struct ClassCensus {
    Matroid matroid;
    Pasture pasture;
    long iso_count = 0;
    long rescaling_count = 0;
    std::vector<HyperplaneSystem> representatives;  // one per rescaling class

    // every normalized modular system, in deterministic search order,
    // with its rescaling orbit id; the backing store for class lookup
    std::vector<std::vector<PElem>> solutions;
    std::vector<int> orbit_of;
    std::unordered_map<std::vector<PElem>, int, ValueVectorHash> index;

    std::optional<int> class_of(const HyperplaneSystem& s) const {
        auto v = normalized(s).flatten();
        auto it = index.find(v);
        if (it == index.end()) return std::nullopt;
        return orbit_of[it->second];
    }
};

namespace detail {

struct SearchVar {
    int h, e;
};

struct SearchCheck {
    int triple;
    int e;
};

/// Static search plan. Hyperplanes are placed greedily so that each new
/// row completes as many modular triples against already-placed rows as
/// possible (ties by shared triples, then triple participation, then
/// index); within a row, the triples' witness elements come first. Both
/// choices are static and deterministic, so runs are reproducible
/// node-for-node. Each (triple, element) constraint is bucketed at the
/// variable that completes its inputs.
struct SearchPlan {
    std::vector<SearchVar> vars;
    std::vector<std::vector<int>> var_pos;      // [h][e] -> position, -1 if fixed
    std::vector<std::vector<SearchCheck>> buckets;  // per variable position
    std::vector<SearchCheck> upfront;

    static SearchPlan make(const MatroidContext& ctx) {
        SearchPlan plan;
        const int n = ctx.matroid.size();
        const int H = static_cast<int>(ctx.hyps.size());
        std::vector<int> participation(H, 0);
        for (const auto& t : ctx.triples) {
            participation[t.h1]++;
            participation[t.h2]++;
            participation[t.h3]++;
        }

        std::vector<int> order;
        std::vector<bool> placed(H, false);
        for (int step = 0; step < H; ++step) {
            int best = -1;
            std::array<long, 3> best_score{-1, -1, -1};
            for (int h = 0; h < H; ++h) {
                if (placed[h]) continue;
                long completes = 0, shares = 0;
                for (const auto& t : ctx.triples) {
                    if (t.h1 != h && t.h2 != h && t.h3 != h) continue;
                    int done = (t.h1 != h && placed[t.h1]) + (t.h2 != h && placed[t.h2]) +
                               (t.h3 != h && placed[t.h3]);
                    if (done == 2) completes++;
                    if (done == 1) shares++;
                }
                std::array<long, 3> score{completes, shares, participation[h]};
                if (best < 0 || score > best_score) {
                    best = h;
                    best_score = score;
                }
            }
            placed[best] = true;
            order.push_back(best);
        }

        // witness elements of each row go first so that a completed
        // triple starts checking on the very next assignment
        std::vector<std::set<int>> deriv_elems(H);
        for (const auto& t : ctx.triples) {
            deriv_elems[t.h2].insert(t.witness_a);
            deriv_elems[t.h3].insert(t.witness_a);
            deriv_elems[t.h1].insert(t.witness_b);
            deriv_elems[t.h3].insert(t.witness_b);
        }

        plan.var_pos.assign(H, std::vector<int>(n, -1));
        auto add_var = [&](int h, int e) {
            if (contains(ctx.hyps[h], e) || e == ctx.norm_element[h]) return;
            if (plan.var_pos[h][e] != -1) return;
            plan.var_pos[h][e] = static_cast<int>(plan.vars.size());
            plan.vars.push_back({h, e});
        };
        for (int h : order) {
            for (int e : deriv_elems[h]) add_var(h, e);
            for (int e = 0; e < n; ++e) add_var(h, e);
        }

        plan.buckets.resize(plan.vars.size());
        for (int ti = 0; ti < static_cast<int>(ctx.triples.size()); ++ti) {
            const auto& t = ctx.triples[ti];
            const std::pair<int, int> deriv_vars[4] = {
                {t.h2, t.witness_a}, {t.h3, t.witness_a}, {t.h1, t.witness_b}, {t.h3, t.witness_b}};
            int deriv_last = -1;
            for (auto [h, e] : deriv_vars) deriv_last = std::max(deriv_last, plan.var_pos[h][e]);
            for (int e = 0; e < n; ++e) {
                if (contains(t.flat, e)) continue;  // all three values zero
                int last = deriv_last;
                for (int h : {t.h1, t.h2, t.h3})
                    if (!contains(ctx.hyps[h], e)) last = std::max(last, plan.var_pos[h][e]);
                if (last < 0)
                    plan.upfront.push_back({ti, e});
                else
                    plan.buckets[last].push_back({ti, e});
            }
        }
        return plan;
    }
};

class CensusSearch {
public:
    CensusSearch(const MatroidContext& ctx, const Pasture& p, const SearchPlan& plan,
                 std::atomic<std::uint64_t>& nodes, std::uint64_t budget)
        : ctx_(ctx), P_(p), plan_(plan), nodes_(nodes), budget_(budget) {
        const int n = ctx.matroid.size();
        vals_.assign(ctx.hyps.size(), std::vector<PElem>(n, 0));
        for (size_t h = 0; h < ctx.hyps.size(); ++h)
            for (int e = 0; e < n; ++e)
                if (!contains(ctx.hyps[h], e)) vals_[h][e] = P_.one();
    }

    bool run_check(const SearchCheck& c) const {
        const auto& t = ctx_.triples[c.triple];
        const auto& f1 = vals_[t.h1];
        const auto& f2 = vals_[t.h2];
        const auto& f3 = vals_[t.h3];
        PElem c3 = P_.mul(P_.epsilon(), P_.div(f2[t.witness_a], f3[t.witness_a]));
        PElem c1 = P_.mul(P_.epsilon(), P_.mul(c3, P_.div(f3[t.witness_b], f1[t.witness_b])));
        return P_.is_null(P_.mul(c1, f1[c.e]), f2[c.e], P_.mul(c3, f3[c.e]));
    }

    bool upfront_ok() const {
        for (const auto& c : plan_.upfront)
            if (!run_check(c)) return false;
        return true;
    }

    void set(int pos, PElem v) { vals_[plan_.vars[pos].h][plan_.vars[pos].e] = v; }

    /// DFS from `depth`; collects flattened solutions. Stops early when
    /// `first_only` finds one.
    void dfs(int depth, std::vector<std::vector<PElem>>& out, bool first_only) {
        if (first_only && !out.empty()) return;
        if (depth == static_cast<int>(plan_.vars.size())) {
            std::vector<PElem> flat;
            flat.reserve(vals_.size() * ctx_.matroid.size());
            for (const auto& f : vals_) flat.insert(flat.end(), f.begin(), f.end());
            out.push_back(std::move(flat));
            return;
        }
        for (PElem v = 1; v <= P_.unit_count(); ++v) {
            if (nodes_.fetch_add(1, std::memory_order_relaxed) >= budget_)
                fail(ErrorCode::SearchBudgetExceeded, "node budget " + std::to_string(budget_) + " exhausted");
            set(depth, v);
            bool ok = true;
            for (const auto& c : plan_.buckets[depth])
                if (!run_check(c)) {
                    ok = false;
                    break;
                }
            if (ok) dfs(depth + 1, out, first_only);
            if (first_only && !out.empty()) return;
        }
    }

    std::vector<std::vector<PElem>> vals_;

private:
    const MatroidContext& ctx_;
    const Pasture& P_;
    const SearchPlan& plan_;
    std::atomic<std::uint64_t>& nodes_;
    std::uint64_t budget_;
};

/// All normalized modular systems, in deterministic order. Parallel runs
/// partition on a fixed-length assignment prefix; outputs are merged in
/// prefix order, so the result does not depend on scheduling.
inline std::vector<std::vector<PElem>> enumerate_solutions(const MatroidContext& ctx, const Pasture& p,
                                                           const CensusOptions& opt, bool first_only = false) {
    SearchPlan plan = SearchPlan::make(ctx);
    std::atomic<std::uint64_t> nodes{0};
    CensusSearch root(ctx, p, plan, nodes, opt.budget);
    if (!root.upfront_ok()) return {};
    const int nvars = static_cast<int>(plan.vars.size());
    if (nvars == 0) {
        std::vector<std::vector<PElem>> out;
        root.dfs(0, out, first_only);
        return out;
    }

    int threads = std::max(1, opt.threads);
    if (threads == 1 || first_only) {
        std::vector<std::vector<PElem>> out;
        root.dfs(0, out, first_only);
        return out;
    }

    int prefix_len = 0;
    long tasks = 1;
    while (prefix_len < nvars && prefix_len < 4 && tasks < 4l * threads) {
        tasks *= p.unit_count();
        ++prefix_len;
    }
    // enumerate surviving prefixes sequentially
    std::vector<std::vector<PElem>> prefixes;
    std::vector<PElem> cur(prefix_len, 1);
    std::function<void(int, CensusSearch&)> expand = [&](int d, CensusSearch& s) {
        if (d == prefix_len) {
            std::vector<PElem> pre(prefix_len);
            for (int i = 0; i < prefix_len; ++i) pre[i] = s.vals_[plan.vars[i].h][plan.vars[i].e];
            prefixes.push_back(pre);
            return;
        }
        for (PElem v = 1; v <= p.unit_count(); ++v) {
            s.set(d, v);
            bool ok = true;
            for (const auto& c : plan.buckets[d])
                if (!s.run_check(c)) {
                    ok = false;
                    break;
                }
            if (ok) expand(d + 1, s);
        }
    };
    expand(0, root);

    std::vector<std::vector<std::vector<PElem>>> results(prefixes.size());
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= prefixes.size()) return;
            CensusSearch s(ctx, p, plan, nodes, opt.budget);
            for (int d = 0; d < prefix_len; ++d) s.set(d, prefixes[i][d]);
            s.dfs(prefix_len, results[i], false);
        }
    };
    std::vector<std::future<void>> pool;
    for (int i = 0; i < threads; ++i) pool.push_back(std::async(std::launch::async, worker));
    for (auto& f : pool) f.get();  // propagates budget errors

    std::vector<std::vector<PElem>> out;
    for (auto& r : results)
        for (auto& sol : r) out.push_back(std::move(sol));
    return out;
}

}  // namespace detail

/// Backtracking enumeration of all normalized modular systems, then
/// rescaling orbits by the explicit element-scaling action.
inline ClassCensus enumerate_census(const Matroid& m, const Pasture& p, const CensusOptions& opt = {}) {
    ClassCensus census;
    census.matroid = m;
    census.pasture = p;

    auto ctx = MatroidContext::make(m);
    const int n = m.size();
    const int H = static_cast<int>(ctx.hyps.size());
    if (H == 0) {
        // rank zero: the empty hyperplane census with one trivial class
        census.iso_count = 1;
        census.rescaling_count = 1;
        census.solutions = {{}};
        census.orbit_of = {0};
        census.representatives.push_back(make_system(m, p, {}));
        return census;
    }

    census.solutions = detail::enumerate_solutions(ctx, p, opt);
    census.iso_count = static_cast<long>(census.solutions.size());
    if (census.solutions.empty()) return census;

    for (size_t i = 0; i < census.solutions.size(); ++i)
        census.index.emplace(census.solutions[i], static_cast<int>(i));

    // rows already vanish on hyperplanes containing e, and only rows
    // normalized at e change their anchor value, so the renormalization
    // after a single-element scaling touches few rows
    auto apply_generator = [&](const std::vector<PElem>& v, int e, PElem u) {
        std::vector<PElem> w = v;
        for (int h = 0; h < H; ++h) {
            PElem& x = w[h * n + e];
            if (x != 0) x = p.mul(u, x);
        }
        for (int h = 0; h < H; ++h) {
            if (ctx.norm_element[h] != e) continue;
            PElem c = p.inv(w[h * n + e]);
            if (c != p.one())
                for (int x = 0; x < n; ++x) w[h * n + x] = p.mul(c, w[h * n + x]);
        }
        return w;
    };

    census.orbit_of.assign(census.solutions.size(), -1);
    int orbits = 0;
    for (size_t start = 0; start < census.solutions.size(); ++start) {
        if (census.orbit_of[start] != -1) continue;
        int id = orbits++;
        std::vector<size_t> stack{start};
        census.orbit_of[start] = id;
        size_t best = start;
        while (!stack.empty()) {
            size_t cur = stack.back();
            stack.pop_back();
            for (int e = 0; e < n; ++e)
                for (PElem u = 1; u <= p.unit_count(); ++u) {
                    if (u == p.one()) continue;
                    auto img = apply_generator(census.solutions[cur], e, u);
                    auto it = census.index.find(img);
                    if (it == census.index.end())
                        fail(ErrorCode::InternalError, "rescaling action left the solution set");
                    if (census.orbit_of[it->second] == -1) {
                        census.orbit_of[it->second] = id;
                        stack.push_back(it->second);
                        if (census.solutions[it->second] < census.solutions[best]) best = it->second;
                    }
                }
        }
        std::vector<std::vector<PElem>> funcs(H, std::vector<PElem>(n));
        for (int h = 0; h < H; ++h)
            for (int e = 0; e < n; ++e) funcs[h][e] = census.solutions[best][h * n + e];
        census.representatives.push_back(make_system(m, p, funcs));
    }
    census.rescaling_count = orbits;
    return census;
}

/// First-solution existence check, used by orientability.
inline bool has_representation(const Matroid& m, const Pasture& p, const CensusOptions& opt = {}) {
    auto ctx = MatroidContext::make(m);
    if (ctx.hyps.empty()) return true;
    return !detail::enumerate_solutions(ctx, p, opt, /*first_only=*/true).empty();
}

/// Hom(F_M, S) nonempty, by exhaustive search over the sign hyperfield.
inline bool is_orientable(const Matroid& m, const CensusOptions& opt = {}) {
    return has_representation(m, sign_hyperfield(), opt);
}

}  // namespace matrep
