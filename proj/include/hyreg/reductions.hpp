#pragma once

// Grid-to-hypergraph reductions and the brute-force configuration oracles.
//
// corners: a planar set becomes a tripartite graph on vertical, horizontal,
// and diagonal lines; triangles are candidate corners and the degenerate ones
// (d = 0) biject with the points.
//
// simplex: a k-dimensional set becomes a (k+1)-partite k-uniform hypergraph
// on axis hyperplanes plus the diagonal family; simplices are candidate
// configurations {a} u {a + d e_j}.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hyreg/chain.hpp"
#include "hyreg/grid.hpp"
#include "hyreg/homomorphism.hpp"
#include "hyreg/rng.hpp"

namespace hyreg {

// A found configuration: base point plus common difference (either sign).
struct Configuration {
    GridPoint base;
    long long d = 0;

    bool operator==(const Configuration& o) const { return base == o.base && d == o.d; }
    bool operator<(const Configuration& o) const {
        if (!(base == o.base)) return base < o.base;
        return d < o.d;
    }
};

struct ReductionInstance {
    Chain chain;
    // geometry of each vertex: (part, vertex id) -> defining parameter
    // part j <= k: hyperplane x_j = m; part k+1: diagonal sum = m
    std::vector<std::vector<long long>> vertex_param;
    // intersection point behind each top-level edge, keyed by (mask, code)
    std::map<std::pair<Mask, std::uint64_t>, GridPoint> edge_point;
    int k = 0;
    long long side = 0;
    std::string degeneracy = "d == 0";
};

// ---------------------------------------------------------------- corners --

// Vertical lines x=u, horizontal lines y=v, diagonals x+y=w; a point (x,y)
// contributes the three edges of its degenerate triangle, so distinct points
// give edge-disjoint degenerate triangles.
inline ReductionInstance corners_reduction(const GridSet& A) {
    if (A.dimension() != 2) throw std::invalid_argument("corners: need a planar grid set");
    long long n = A.side();
    ReductionInstance inst;
    inst.k = 2;
    inst.side = n;
    VertexPartition vp({static_cast<int>(n), static_cast<int>(n), static_cast<int>(2 * n - 1)});
    ChainBuilder b(vp, 2);
    Mask xy = mask_from_parts({1, 2});
    Mask xz = mask_from_parts({1, 3});
    Mask yz = mask_from_parts({2, 3});
    TupleSpace spXY(xy, vp), spXZ(xz, vp), spYZ(yz, vp);
    for (const GridPoint& p : A.points()) {
        long long x = p.c[0], y = p.c[1], w = x + y;
        std::uint64_t u = static_cast<std::uint64_t>(x - 1);
        std::uint64_t v = static_cast<std::uint64_t>(y - 1);
        std::uint64_t z = static_cast<std::uint64_t>(w - 2);
        std::uint64_t cXY = u + v * spXY.strides[1];
        std::uint64_t cXZ = u + z * spXZ.strides[1];
        std::uint64_t cYZ = v + z * spYZ.strides[1];
        b.insert_closed(spXY.to_edge(cXY));
        b.insert_closed(spXZ.to_edge(cXZ));
        b.insert_closed(spYZ.to_edge(cYZ));
        inst.edge_point[{xy, cXY}] = p;
        inst.edge_point[{xz, cXZ}] = p;
        inst.edge_point[{yz, cYZ}] = p;
    }
    inst.chain = std::move(b).build(false);
    inst.vertex_param.resize(3);
    for (long long u = 1; u <= n; ++u) inst.vertex_param[0].push_back(u);
    for (long long v = 1; v <= n; ++v) inst.vertex_param[1].push_back(v);
    for (long long w = 2; w <= 2 * n; ++w) inst.vertex_param[2].push_back(w);
    return inst;
}

// Triangles of the corners reduction as configurations; degenerate means the
// three lines meet in one point (d = 0).
inline std::vector<Configuration> corners_triangles(const ReductionInstance& inst,
                                                    bool include_degenerate) {
    std::vector<Configuration> out;
    for_each_simplex(inst.chain, [&](const std::vector<int>& t) {
        long long u = t[0] + 1, v = t[1] + 1, w = t[2] + 2;
        long long d = w - u - v;
        if (d == 0 && !include_degenerate) return;
        Configuration cfg;
        cfg.base = GridPoint{{u, v}};
        cfg.d = d;
        out.push_back(std::move(cfg));
    });
    std::sort(out.begin(), out.end());
    return out;
}

// -------------------------------------------------------------- symmetrize --

struct SymmetrizeResult {
    GridPoint center;
    GridSet symmetric;  // B = A cap (c - A); satisfies B = c - B and B within A
};

inline SymmetrizeResult symmetrize(const GridSet& A, bool exhaustive, std::uint64_t seed = 1,
                                   std::uint64_t samples = 256) {
    if (A.dimension() != 2) throw std::invalid_argument("symmetrize: need a planar grid set");
    if (A.size() == 0) {
        SymmetrizeResult r;
        r.center = GridPoint{{2, 2}};
        r.symmetric = GridSet(2, A.side());
        return r;
    }
    long long n = A.side();
    auto scoreOf = [&](long long cx, long long cy) {
        std::size_t cnt = 0;
        for (const GridPoint& p : A.points())
            if (A.contains_coords({cx - p.c[0], cy - p.c[1]})) ++cnt;
        return cnt;
    };
    long long bestX = 2, bestY = 2;
    std::size_t best = 0;
    if (exhaustive) {
        for (long long cx = 2; cx <= 2 * n; ++cx) {
            for (long long cy = 2; cy <= 2 * n; ++cy) {
                std::size_t sc = scoreOf(cx, cy);
                if (sc > best) { best = sc; bestX = cx; bestY = cy; }
            }
        }
    } else {
        Rng rng(seed);
        for (std::uint64_t i = 0; i < samples; ++i) {
            const GridPoint& p = A.points()[rng.below(A.size())];
            const GridPoint& q = A.points()[rng.below(A.size())];
            long long cx = p.c[0] + q.c[0], cy = p.c[1] + q.c[1];
            std::size_t sc = scoreOf(cx, cy);
            if (sc > best) { best = sc; bestX = cx; bestY = cy; }
        }
    }
    SymmetrizeResult r;
    r.center = GridPoint{{bestX, bestY}};
    r.symmetric = GridSet(2, n);
    for (const GridPoint& p : A.points())
        if (A.contains_coords({bestX - p.c[0], bestY - p.c[1]})) r.symmetric.insert(GridPoint(p));
    return r;
}

// --------------------------------------------------------------------- ap3 --

// B = {(x,y) : x + 2y - 2 in A}; corners of B with difference d map to
// 3-term progressions (s, s+d, s+2d) in A with s = x + 2y - 2. The x axis is
// shifted by two so that every progression start down to 1 has a witness row
// at y = 1, making the corner families complete, not just sound.
inline GridSet ap3_reduction(const GridSet& A) {
    if (A.dimension() != 1) throw std::invalid_argument("ap3: need a one-dimensional set");
    long long n = A.side();
    GridSet B(2, n + 2);
    for (long long x = 1; x <= n + 2; ++x)
        for (long long y = 1; y <= n + 2; ++y)
            if (A.contains_coords({x + 2 * y - 2})) B.insert({x, y});
    return B;
}

inline long long ap3_pullback_start(const Configuration& corner) {
    return corner.base.c[0] + 2 * corner.base.c[1] - 2;
}

// ----------------------------------------------------------------- simplex --

// Parts 1..k: hyperplanes x_j = m with m in [1,N]. Part k+1: diagonals
// x_1+...+x_k = m with m in [k, kN]. Each point of A contributes exactly one
// edge per omitted part; every edge determines its point.
inline ReductionInstance simplex_reduction(const GridSet& A) {
    int k = A.dimension();
    if (k < 2) throw std::invalid_argument("simplex: dimension must be >= 2");
    long long n = A.side();
    ReductionInstance inst;
    inst.k = k;
    inst.side = n;
    std::vector<int> sizes(static_cast<std::size_t>(k), static_cast<int>(n));
    sizes.push_back(static_cast<int>(k * n - k + 1));
    VertexPartition vp(sizes);
    ChainBuilder b(vp, k);
    Mask full = (Mask{1} << (k + 1)) - 1;
    for (const GridPoint& p : A.points()) {
        long long sum = 0;
        for (long long v : p.c) sum += v;
        for (int omit = 1; omit <= k + 1; ++omit) {
            Mask a = full & ~mask_of_part(omit);
            const TupleSpace sp(a, vp);
            std::uint64_t code = 0;
            std::size_t ci = 0;
            for (int part = 1; part <= k + 1; ++part) {
                if (part == omit) continue;
                std::uint64_t coord = part <= k
                                          ? static_cast<std::uint64_t>(p.c[static_cast<std::size_t>(part - 1)] - 1)
                                          : static_cast<std::uint64_t>(sum - k);
                code += coord * sp.strides[ci++];
            }
            b.insert_closed(sp.to_edge(code));
            inst.edge_point[{a, code}] = p;
        }
    }
    inst.chain = std::move(b).build(false);
    inst.vertex_param.resize(static_cast<std::size_t>(k) + 1);
    for (int j = 0; j < k; ++j)
        for (long long m = 1; m <= n; ++m) inst.vertex_param[static_cast<std::size_t>(j)].push_back(m);
    for (long long m = k; m <= static_cast<long long>(k) * n; ++m)
        inst.vertex_param[static_cast<std::size_t>(k)].push_back(m);
    return inst;
}

// Simplices of the reduction as configurations {a} u {a + d e_j}.
inline std::vector<Configuration> simplex_configurations(const ReductionInstance& inst,
                                                         bool include_degenerate) {
    std::vector<Configuration> out;
    int k = inst.k;
    for_each_simplex(inst.chain, [&](const std::vector<int>& t) {
        long long sum = 0;
        Configuration cfg;
        cfg.base.c.resize(static_cast<std::size_t>(k));
        for (int j = 0; j < k; ++j) {
            cfg.base.c[static_cast<std::size_t>(j)] = t[static_cast<std::size_t>(j)] + 1;
            sum += cfg.base.c[static_cast<std::size_t>(j)];
        }
        long long m = t[static_cast<std::size_t>(k)] + k;
        cfg.d = m - sum;
        if (cfg.d == 0 && !include_degenerate) return;
        out.push_back(std::move(cfg));
    });
    std::sort(out.begin(), out.end());
    return out;
}

// --------------------------------------------------------------- oracles --

enum class ConfigKind { corner, axis_simplex };

// Exhaustive, deterministic configuration scan; the ground truth for every
// reduction test. Corners are reported for either sign of d.
inline std::vector<Configuration> brute_force_find(const GridSet& A, ConfigKind kind,
                                                   std::uint64_t budget = 100000000ull) {
    std::vector<Configuration> out;
    long long n = A.side();
    int k = A.dimension();
    if (kind == ConfigKind::corner && k != 2)
        throw std::invalid_argument("brute force: corners need dimension 2");
    std::uint64_t work = A.size() * static_cast<std::uint64_t>(2 * n) *
                         static_cast<std::uint64_t>(kind == ConfigKind::corner ? 2 : k);
    if (work > budget) throw BudgetExceeded("brute force: scan exceeds budget");
    for (const GridPoint& p : A.points()) {
        for (long long d = -n; d <= n; ++d) {
            if (d == 0) continue;
            bool ok = true;
            for (int j = 0; j < k && ok; ++j) {
                std::vector<long long> q = p.c;
                q[static_cast<std::size_t>(j)] += d;
                ok = A.contains_coords(q);
            }
            if (ok) out.push_back(Configuration{p, d});
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// a + dX within A, for a fixed pattern X given as point rows.
inline std::vector<Configuration> brute_force_pattern(const GridSet& A,
                                                      const std::vector<std::vector<long long>>& X,
                                                      std::uint64_t budget = 100000000ull) {
    if (X.empty()) throw std::invalid_argument("pattern: empty X");
    int r = A.dimension();
    long long n = A.side();
    std::uint64_t aSpace = 1;
    for (int i = 0; i < r; ++i) aSpace *= static_cast<std::uint64_t>(2 * n + 1);
    if (aSpace * static_cast<std::uint64_t>(2 * n) * X.size() > budget)
        throw BudgetExceeded("pattern: scan exceeds budget");
    std::vector<Configuration> out;
    std::vector<long long> a(static_cast<std::size_t>(r), -n);
    while (true) {
        for (long long d = -n; d <= n; ++d) {
            if (d == 0) continue;
            bool ok = true;
            for (const auto& xi : X) {
                std::vector<long long> q(static_cast<std::size_t>(r));
                for (int i = 0; i < r; ++i) q[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i)] + d * xi[static_cast<std::size_t>(i)];
                if (!A.contains_coords(q)) { ok = false; break; }
            }
            if (ok) out.push_back(Configuration{GridPoint{a}, d});
        }
        int i = 0;
        for (; i < r; ++i) {
            if (++a[static_cast<std::size_t>(i)] <= 2 * n) break;
            a[static_cast<std::size_t>(i)] = -n;
        }
        if (i == r) break;
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ----------------------------------------------------------------- pattern --

struct PatternResult {
    GridPoint base;      // a
    long long d = 0;     // a + dX within A
    long long scale = 1; // window scale that produced the hit
    std::vector<long long> translate;
};

// Affine reduction for a+dX: map the simplex corners {0, e_1..e_k} onto X,
// scan translates and power-of-two scales for a dense window B, search B for
// an axis configuration, and pull it back (verified pointwise).
inline std::optional<PatternResult> pattern_reduction(const std::vector<std::vector<long long>>& X,
                                                      const GridSet& A,
                                                      std::uint64_t budget = 50000000ull) {
    if (X.empty()) throw std::invalid_argument("pattern: empty X");
    int r = A.dimension();
    for (const auto& row : X)
        if (static_cast<int>(row.size()) != r)
            throw std::invalid_argument("pattern: X dimension mismatch");
    long long n = A.side();
    int k = static_cast<int>(X.size()) - 1;
    if (k == 0) {
        // single point: any member of A is a translate
        if (A.size() == 0) return std::nullopt;
        PatternResult res;
        res.d = 1;
        res.base.c.resize(static_cast<std::size_t>(r));
        for (int i = 0; i < r; ++i)
            res.base.c[static_cast<std::size_t>(i)] = A.points()[0].c[static_cast<std::size_t>(i)] -
                                                      X[0][static_cast<std::size_t>(i)];
        res.translate.assign(static_cast<std::size_t>(r), 0);
        return res;
    }
    // linear part L e_j = X_j - X_0; the coefficient spread bounds the window
    // size, so pick the base point of X that minimizes it (for a centered
    // pattern this doubles the reachable difference range)
    std::vector<std::vector<long long>> Xs = X;
    {
        int bestBase = 0;
        long long bestCoef = -1;
        for (int b = 0; b <= k; ++b) {
            long long coef = 1;
            for (int c = 0; c < r; ++c) {
                long long spread = 0;
                for (int j = 0; j <= k; ++j)
                    if (j != b)
                        spread += std::llabs(
                            X[static_cast<std::size_t>(j)][static_cast<std::size_t>(c)] -
                            X[static_cast<std::size_t>(b)][static_cast<std::size_t>(c)]);
                coef = std::max(coef, spread);
            }
            if (bestCoef < 0 || coef < bestCoef) {
                bestCoef = coef;
                bestBase = b;
            }
        }
        std::swap(Xs[0], Xs[static_cast<std::size_t>(bestBase)]);
    }
    long long coefMax = 1;
    for (int c = 0; c < r; ++c) {
        long long s = 0;
        for (int j = 1; j <= k; ++j)
            s += std::llabs(Xs[static_cast<std::size_t>(j)][static_cast<std::size_t>(c)] -
                            Xs[0][static_cast<std::size_t>(c)]);
        coefMax = std::max(coefMax, s);
    }
    std::uint64_t scanned = 0;
    bool anyWindow = false;
    struct Window {
        long long scale;
        std::vector<long long> z;
        long long m;
        std::size_t hits;
    };
    std::vector<Window> windows;
    for (long long scale = 1;; scale *= 2) {
        long long m = (n - 1) / (scale * coefMax);
        if (m < 2) break;
        m = std::min<long long>(m, 64);
        // z ranges so that z + scale*phi(x) can land in [1,n]^r
        std::vector<long long> lo(static_cast<std::size_t>(r)), hi(static_cast<std::size_t>(r));
        for (int c = 0; c < r; ++c) {
            long long mn = 0, mx = 0;
            // phi over [1,m]^k: X0 + sum x_j (X_j - X_0)
            long long base = Xs[0][static_cast<std::size_t>(c)];
            long long neg = 0, pos = 0;
            for (int j = 1; j <= k; ++j) {
                long long coef = Xs[static_cast<std::size_t>(j)][static_cast<std::size_t>(c)] -
                                 Xs[0][static_cast<std::size_t>(c)];
                if (coef > 0) { pos += coef * m; neg += coef; }
                else { neg += coef * m; pos += coef; }
            }
            mn = scale * (base + neg);
            mx = scale * (base + pos);
            lo[static_cast<std::size_t>(c)] = 1 - mn;
            hi[static_cast<std::size_t>(c)] = n - mx;
        }
        long long step = std::max<long long>(1, (scale * coefMax * m) / 2);
        // lattice of translates, clamped so the last window reaches hi
        std::vector<std::vector<long long>> zPositions(static_cast<std::size_t>(r));
        bool emptyRange = false;
        for (int c = 0; c < r; ++c) {
            if (lo[static_cast<std::size_t>(c)] > hi[static_cast<std::size_t>(c)]) {
                emptyRange = true;
                break;
            }
            long long zc = lo[static_cast<std::size_t>(c)];
            while (true) {
                zPositions[static_cast<std::size_t>(c)].push_back(zc);
                if (zc >= hi[static_cast<std::size_t>(c)]) break;
                zc = std::min(zc + step, hi[static_cast<std::size_t>(c)]);
            }
        }
        if (emptyRange) continue;
        std::vector<std::size_t> zIdx(static_cast<std::size_t>(r), 0);
        bool zMore = true;
        while (zMore) {
            std::vector<long long> z(static_cast<std::size_t>(r));
            for (int c = 0; c < r; ++c)
                z[static_cast<std::size_t>(c)] =
                    zPositions[static_cast<std::size_t>(c)][zIdx[static_cast<std::size_t>(c)]];
            {
                anyWindow = true;
                // count hits in the window
                std::size_t hits = 0;
                std::vector<long long> x(static_cast<std::size_t>(k), 1);
                bool more = true;
                while (more) {
                    std::vector<long long> q(static_cast<std::size_t>(r));
                    for (int c = 0; c < r; ++c) {
                        long long val = Xs[0][static_cast<std::size_t>(c)];
                        for (int j = 1; j <= k; ++j)
                            val += x[static_cast<std::size_t>(j - 1)] *
                                   (Xs[static_cast<std::size_t>(j)][static_cast<std::size_t>(c)] -
                                    Xs[0][static_cast<std::size_t>(c)]);
                        q[static_cast<std::size_t>(c)] = z[static_cast<std::size_t>(c)] + scale * val;
                    }
                    if (A.contains_coords(q)) ++hits;
                    ++scanned;
                    if (scanned > budget) throw BudgetExceeded("pattern: scan exceeds budget");
                    int i = 0;
                    for (; i < k; ++i) {
                        if (++x[static_cast<std::size_t>(i)] <= m) break;
                        x[static_cast<std::size_t>(i)] = 1;
                    }
                    more = i < k;
                }
                if (hits > 0) windows.push_back(Window{scale, z, m, hits});
            }
            int c = 0;
            for (; c < r; ++c) {
                if (++zIdx[static_cast<std::size_t>(c)] <
                    zPositions[static_cast<std::size_t>(c)].size())
                    break;
                zIdx[static_cast<std::size_t>(c)] = 0;
            }
            zMore = c < r;
        }
    }
    if (!anyWindow) throw std::invalid_argument("pattern: X not realizable at any scanned window");
    std::stable_sort(windows.begin(), windows.end(), [](const Window& a, const Window& b) {
        return a.hits * static_cast<std::uint64_t>(b.m) > b.hits * static_cast<std::uint64_t>(a.m);
    });
    for (const Window& w : windows) {
        // assemble B and search it
        GridSet B(k, w.m);
        std::vector<long long> x(static_cast<std::size_t>(k), 1);
        bool more = true;
        while (more) {
            std::vector<long long> q(static_cast<std::size_t>(r));
            for (int c = 0; c < r; ++c) {
                long long val = Xs[0][static_cast<std::size_t>(c)];
                for (int j = 1; j <= k; ++j)
                    val += x[static_cast<std::size_t>(j - 1)] *
                           (Xs[static_cast<std::size_t>(j)][static_cast<std::size_t>(c)] -
                            Xs[0][static_cast<std::size_t>(c)]);
                q[static_cast<std::size_t>(c)] = w.z[static_cast<std::size_t>(c)] + w.scale * val;
            }
            if (A.contains_coords(q)) B.insert(GridPoint{x});
            int i = 0;
            for (; i < k; ++i) {
                if (++x[static_cast<std::size_t>(i)] <= w.m) break;
                x[static_cast<std::size_t>(i)] = 1;
            }
            more = i < k;
        }
        std::vector<Configuration> found =
            k == 1 ? brute_force_find(B, ConfigKind::axis_simplex)
                   : (B.size() > 0 ? brute_force_find(B, ConfigKind::axis_simplex)
                                   : std::vector<Configuration>{});
        for (const Configuration& cfg : found) {
            long long d = cfg.d * w.scale;
            // a = z + scale*phi(wbase) - d*X_0
            std::vector<long long> a(static_cast<std::size_t>(r));
            for (int c = 0; c < r; ++c) {
                long long val = Xs[0][static_cast<std::size_t>(c)];
                for (int j = 1; j <= k; ++j)
                    val += cfg.base.c[static_cast<std::size_t>(j - 1)] *
                           (Xs[static_cast<std::size_t>(j)][static_cast<std::size_t>(c)] -
                            Xs[0][static_cast<std::size_t>(c)]);
                a[static_cast<std::size_t>(c)] = w.z[static_cast<std::size_t>(c)] + w.scale * val -
                                                 d * Xs[0][static_cast<std::size_t>(c)];
            }
            // verify the pullback pointwise before returning
            bool ok = true;
            for (const auto& xi : X) {
                std::vector<long long> q(static_cast<std::size_t>(r));
                for (int c = 0; c < r; ++c)
                    q[static_cast<std::size_t>(c)] =
                        a[static_cast<std::size_t>(c)] + d * xi[static_cast<std::size_t>(c)];
                if (!A.contains_coords(q)) { ok = false; break; }
            }
            if (!ok) continue;
            PatternResult res;
            res.base = GridPoint{a};
            res.d = d;
            res.scale = w.scale;
            res.translate = w.z;
            return res;
        }
    }
    return std::nullopt;
}

}  // namespace hyreg
