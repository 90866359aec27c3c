#pragma once

// Shared generators and independent oracles. The oracles work from the raw
// definitions (set unions, nested loops, pairwise class comparisons) and stay
// off the library's code paths on purpose.

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "hyreg/chain.hpp"
#include "hyreg/edge_function.hpp"
#include "hyreg/partition_system.hpp"
#include "hyreg/rng.hpp"

namespace testutil {

using namespace hyreg;

// ------------------------------------------------------------- generators --

inline Edge random_edge(Rng& rng, const VertexPartition& vp, int size) {
    std::vector<int> parts;
    for (int p = 1; p <= vp.part_count(); ++p) parts.push_back(p);
    for (int i = 0; i < size; ++i)
        std::swap(parts[static_cast<std::size_t>(i)],
                  parts[i + static_cast<std::size_t>(rng.below(
                                static_cast<std::uint64_t>(parts.size() - i)))]);
    parts.resize(static_cast<std::size_t>(size));
    std::sort(parts.begin(), parts.end());
    std::vector<std::pair<int, int>> vs;
    for (int p : parts)
        vs.emplace_back(p, static_cast<int>(rng.below(static_cast<std::uint64_t>(vp.size_of(p)))));
    return Edge(std::move(vs));
}

// Level-wise random chain: level-s tuples whose boundary is present join with
// probability density[s]; density[1] applies to vertices.
inline Chain random_chain_levelwise(const VertexPartition& vp, int k,
                                    const std::vector<double>& densityByLevel,
                                    std::uint64_t seed) {
    Rng rng(seed);
    ChainBuilder b(vp, k);
    Mask full = (Mask{1} << vp.part_count()) - 1;
    // membership decided level by level so stars are known
    std::map<Mask, std::set<std::uint64_t>> chosen;
    std::vector<Mask> masks;
    for (Mask a = 1; a <= full; ++a)
        if (mask_size(a) <= k) masks.push_back(a);
    std::sort(masks.begin(), masks.end(),
              [](Mask x, Mask y) { return mask_size(x) < mask_size(y); });
    for (Mask a : masks) {
        int s = mask_size(a);
        double d = densityByLevel[static_cast<std::size_t>(std::min<int>(s, static_cast<int>(densityByLevel.size())) - 1)];
        TupleSpace sp(a, vp);
        for (std::uint64_t c = 0; c < sp.total; ++c) {
            bool boundaryIn = true;
            if (s >= 2) {
                for (int p : sp.parts) {
                    Mask sub = a & ~mask_of_part(p);
                    TupleSpace spSub(sub, vp);
                    if (!chosen[sub].count(sp.project(c, spSub))) { boundaryIn = false; break; }
                }
            }
            if (boundaryIn && rng.bernoulli(d)) {
                chosen[a].insert(c);
                b.insert_code(a, c);
            }
        }
    }
    return std::move(b).build(true);
}

inline Chain random_graph_chain(const VertexPartition& vp, double density, std::uint64_t seed) {
    std::vector<double> d{1.0, density};
    return random_chain_levelwise(vp, 2, d, seed);
}

inline EdgeFunction random_pm_one(Mask a, const VertexPartition& vp, std::uint64_t seed) {
    Rng rng(seed);
    TupleSpace sp(a, vp);
    std::vector<double> vals(sp.total);
    for (auto& v : vals) v = rng.pm_one();
    return EdgeFunction(a, vp, std::move(vals));
}

inline EdgeFunction random_function(Mask a, const VertexPartition& vp, std::uint64_t seed) {
    Rng rng(seed);
    TupleSpace sp(a, vp);
    std::vector<double> vals(sp.total);
    for (auto& v : vals) v = 2.0 * rng.real() - 1.0;
    return EdgeFunction(a, vp, std::move(vals));
}

// values on the grid Z/denominator, exact as rationals
inline ExactEdgeFunction random_exact_function(Mask a, const VertexPartition& vp,
                                               std::uint64_t seed, int denominator = 8) {
    Rng rng(seed);
    TupleSpace sp(a, vp);
    std::vector<Rational> vals(sp.total);
    for (auto& v : vals) {
        std::int64_t num = static_cast<std::int64_t>(rng.below(
                               static_cast<std::uint64_t>(2 * denominator + 1))) -
                           denominator;
        v = Rational(num, denominator);
    }
    return ExactEdgeFunction(a, vp, std::move(vals));
}

inline PartitionSystem random_partition_system(const VertexPartition& vp, int k,
                                               std::uint32_t maxCells, std::uint64_t seed) {
    Rng rng(seed);
    PartitionSystem s = PartitionSystem::trivial(vp, k);
    for (Mask a : s.masks()) {
        std::uint32_t cells = 1 + static_cast<std::uint32_t>(rng.below(maxCells));
        std::vector<std::uint32_t> labels(s.space(a).total);
        for (auto& l : labels) l = static_cast<std::uint32_t>(rng.below(cells));
        s.set_partition(a, std::move(labels), cells);
    }
    return s;
}

// ---------------------------------------------------------------- oracles --

// Down-closure oracle: the union of the edges' power sets, as plain sets.
inline std::set<std::vector<std::pair<int, int>>> power_set_union(const std::vector<Edge>& edges) {
    std::set<std::vector<std::pair<int, int>>> out;
    for (const Edge& e : edges) {
        int n = e.size();
        for (unsigned sub = 1; sub < (1u << n); ++sub) {
            std::vector<std::pair<int, int>> part;
            for (int i = 0; i < n; ++i)
                if ((sub >> i) & 1u) part.push_back(e.vertices[static_cast<std::size_t>(i)]);
            out.insert(std::move(part));
        }
    }
    return out;
}

inline std::set<std::vector<std::pair<int, int>>> chain_edge_set(const Chain& c) {
    std::set<std::vector<std::pair<int, int>>> out;
    for (const Edge& e : c.edges()) out.insert(e.vertices);
    return out;
}

// Weak-equivalence oracle straight from the definition: two tuples are weakly
// equivalent when every proper sub-tuple lands in the same cell.
inline std::vector<std::uint32_t> weak_classes_by_definition(const PartitionSystem& s, Mask a) {
    const TupleSpace& sp = s.space(a);
    std::vector<std::vector<std::uint32_t>> keys(sp.total);
    for (std::uint64_t c = 0; c < sp.total; ++c) {
        std::vector<std::uint32_t> key;
        for_each_submask(a, [&](Mask sub) {
            if (sub == a) return;
            TupleSpace spSub(sub, s.partition());
            key.push_back(s.label(sub, sp.project(c, spSub)));
        });
        keys[c] = std::move(key);
    }
    std::map<std::vector<std::uint32_t>, std::uint32_t> ids;
    std::vector<std::uint32_t> out(sp.total);
    for (std::uint64_t c = 0; c < sp.total; ++c) {
        auto [it, inserted] = ids.try_emplace(keys[c], static_cast<std::uint32_t>(ids.size()));
        out[c] = it->second;
    }
    return out;
}

inline std::vector<std::uint32_t> strong_classes_by_definition(const PartitionSystem& s, Mask a) {
    const TupleSpace& sp = s.space(a);
    std::map<std::vector<std::uint32_t>, std::uint32_t> ids;
    std::vector<std::uint32_t> out(sp.total);
    for (std::uint64_t c = 0; c < sp.total; ++c) {
        std::vector<std::uint32_t> key;
        for_each_submask(a, [&](Mask sub) {
            TupleSpace spSub(sub, s.partition());
            key.push_back(s.label(sub, sp.project(c, spSub)));
        });
        auto [it, inserted] = ids.try_emplace(std::move(key), static_cast<std::uint32_t>(ids.size()));
        out[c] = it->second;
    }
    return out;
}

// Exact mean-square density by direct double summation.
inline Rational msd_direct(const std::vector<std::uint32_t>& p, std::uint32_t pCells,
                           const std::vector<std::uint32_t>& q, std::uint32_t qCells) {
    RationalSum sum;
    BigInt n(static_cast<std::int64_t>(p.size()));
    for (std::uint32_t j = 0; j < qCells; ++j) {
        std::int64_t yj = 0;
        for (std::size_t u = 0; u < q.size(); ++u)
            if (q[u] == j) ++yj;
        if (yj == 0) continue;
        for (std::uint32_t i = 0; i < pCells; ++i) {
            std::int64_t inter = 0;
            for (std::size_t u = 0; u < q.size(); ++u)
                if (q[u] == j && p[u] == i) ++inter;
            sum.add(BigInt(inter) * BigInt(inter), n * BigInt(yj));
        }
    }
    return sum.value();
}

inline std::vector<int> relabeling(Rng& rng, int n) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    for (int i = n - 1; i > 0; --i)
        std::swap(perm[static_cast<std::size_t>(i)],
                  perm[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i + 1)))]);
    return perm;
}

// Relabel vertex ids within each part.
inline Chain relabel_chain(const Chain& c, const std::vector<std::vector<int>>& perms) {
    ChainBuilder b(c.partition(), c.uniformity());
    for (const Edge& e : c.edges()) {
        std::vector<std::pair<int, int>> vs;
        for (const auto& [p, v] : e.vertices)
            vs.emplace_back(p, perms[static_cast<std::size_t>(p - 1)][static_cast<std::size_t>(v)]);
        b.insert_as_listed(Edge(std::move(vs)));
    }
    return std::move(b).build(true);
}

}  // namespace testutil
