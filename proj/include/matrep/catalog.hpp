#pragma once

#include "matrep/matroid.hpp"

namespace matrep {

/// U_{r,n} on the given labels (defaults to e1..en).
inline Matroid uniform(int r, int n, std::vector<std::string> labels = {}) {
    if (labels.empty())
        for (int i = 1; i <= n; ++i) labels.push_back("e" + std::to_string(i));
    GroundSet g(std::move(labels));
    std::vector<Mask> bases;
    for (Mask s = 0; s <= g.all(); ++s)
        if (popcount(s) == r) bases.push_back(s);
    if (r == 0) bases = {0};
    return Matroid::from_bases(std::move(g), std::move(bases), "u" + std::to_string(r) + std::to_string(n));
}

namespace detail {

inline Matroid rank3_from_lines(std::vector<std::string> labels, const std::vector<std::vector<std::string>>& lines,
                                std::string name) {
    GroundSet g(std::move(labels));
    std::vector<Mask> linemasks;
    for (const auto& l : lines) linemasks.push_back(g.mask_of(l));
    std::vector<Mask> bases;
    for (Mask s = 0; s <= g.all(); ++s) {
        if (popcount(s) != 3) continue;
        bool collinear = false;
        for (Mask l : linemasks)
            if ((s & ~l) == 0) collinear = true;
        if (!collinear) bases.push_back(s);
    }
    return Matroid::from_bases(std::move(g), std::move(bases), std::move(name));
}

}  // namespace detail

/// The Fano plane: 7 points, 7 three-point lines, 28 bases.
inline Matroid fano() {
    return detail::rank3_from_lines({"1", "2", "3", "4", "5", "6", "7"},
                                    {{"1", "2", "3"},
                                     {"1", "4", "5"},
                                     {"1", "6", "7"},
                                     {"2", "4", "6"},
                                     {"2", "5", "7"},
                                     {"3", "4", "7"},
                                     {"3", "5", "6"}},
                                    "fano");
}

/// The non-Fano matroid F7⁻: the Fano plane with the line {3,5,6} broken.
inline Matroid nonfano() {
    return detail::rank3_from_lines(
        {"1", "2", "3", "4", "5", "6", "7"},
        {{"1", "2", "3"}, {"1", "4", "5"}, {"1", "6", "7"}, {"2", "4", "6"}, {"2", "5", "7"}, {"3", "4", "7"}},
        "nonfano");
}

/// Cycle matroid of K4. Edges are labelled by their endpoints; the four
/// triangles are {12,13,23}, {12,14,24}, {13,14,34}, {23,24,34}.
inline Matroid mk4() {
    return detail::rank3_from_lines({"12", "13", "14", "23", "24", "34"},
                                    {{"12", "13", "23"}, {"12", "14", "24"}, {"13", "14", "34"}, {"23", "24", "34"}},
                                    "mk4");
}

/// Cycle matroid of K_{2,3} with parts {u1,u2} and {v1,v2,v3}; edges uivj.
inline Matroid mk23() {
    GroundSet g({"u1v1", "u1v2", "u1v3", "u2v1", "u2v2", "u2v3"});
    // circuits are the three 4-cycles u1-vi-u2-vj
    std::vector<Mask> cycles;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) cycles.push_back(bit(i) | bit(j) | bit(3 + i) | bit(3 + j));
    std::vector<Mask> bases;
    for (Mask s = 0; s <= g.all(); ++s) {
        if (popcount(s) != 4) continue;
        bool dep = false;
        for (Mask c : cycles)
            if ((c & ~s) == 0) dep = true;
        if (!dep) bases.push_back(s);
    }
    return Matroid::from_bases(std::move(g), std::move(bases), "mk23");
}

/// Best-effort reading of the two-plane configuration whose gluing has
/// a bigger foundation than the tensor product: a rank-3 plane carrying
/// a 6-point line c0..c5 plus a 3-point line l1,l2,l3 disjoint from it.
/// The common line is NOT modular here.
inline Matroid figure_counterexample_left() {
    GroundSet g({"c0", "c1", "c2", "c3", "c4", "c5", "l1", "l2", "l3"});
    std::vector<Mask> lines{g.mask_of({"c0", "c1", "c2", "c3", "c4", "c5"}), g.mask_of({"l1", "l2", "l3"})};
    std::vector<Mask> bases;
    for (Mask s = 0; s <= g.all(); ++s) {
        if (popcount(s) != 3) continue;
        bool dep = false;
        for (Mask l : lines)
            if ((s & ~l) == 0) dep = true;
        if (!dep) bases.push_back(s);
    }
    return Matroid::from_bases(std::move(g), std::move(bases), "figleft");
}

/// The companion plane: the same 6-point line plus four points r1..r4
/// whose six connecting lines each pass through a distinct c-point, so
/// the common line IS modular here.
inline Matroid figure_counterexample_right() {
    GroundSet g({"c0", "c1", "c2", "c3", "c4", "c5", "r1", "r2", "r3", "r4"});
    std::vector<Mask> lines{g.mask_of({"c0", "c1", "c2", "c3", "c4", "c5"}), g.mask_of({"c3", "r1", "r2"}),
                            g.mask_of({"c2", "r3", "r4"}),                   g.mask_of({"c4", "r1", "r4"}),
                            g.mask_of({"c1", "r2", "r3"}),                   g.mask_of({"c5", "r2", "r4"}),
                            g.mask_of({"c0", "r1", "r3"})};
    std::vector<Mask> bases;
    for (Mask s = 0; s <= g.all(); ++s) {
        if (popcount(s) != 3) continue;
        bool dep = false;
        for (Mask l : lines)
            if ((s & ~l) == 0) dep = true;
        if (!dep) bases.push_back(s);
    }
    return Matroid::from_bases(std::move(g), std::move(bases), "figright");
}

/// Rank-3 matroid with one k-point line plus m generic points.
inline Matroid line_plus_points(int k, int m) {
    std::vector<std::string> labels;
    for (int i = 1; i <= k; ++i) labels.push_back("l" + std::to_string(i));
    for (int i = 1; i <= m; ++i) labels.push_back("p" + std::to_string(i));
    GroundSet g(std::move(labels));
    Mask line = full_mask(k);
    std::vector<Mask> bases;
    for (Mask s = 0; s <= g.all(); ++s)
        if (popcount(s) == 3 && (s & ~line) != 0) bases.push_back(s);
    return Matroid::from_bases(std::move(g), std::move(bases),
                               "line" + std::to_string(k) + "plus" + std::to_string(m));
}

}  // namespace matrep
