#include <doctest.h>

#include <set>

#include "hyreg/chain.hpp"
#include "support.hpp"

using namespace hyreg;
using namespace testutil;

TEST_CASE("down-closure of nothing is the empty chain") {
    Chain c = down_closure({}, VertexPartition({2, 2}), 2);
    CHECK(c.edge_count() == 1);  // the implicit empty edge
    CHECK(c.slice(mask_from_parts({1, 2})).count() == 0);
    CHECK(c.is_down_closed());
}

TEST_CASE("closing one 3-edge yields its power set") {
    Chain c = down_closure({Edge{{1, 0}, {2, 1}, {3, 2}}}, VertexPartition({3, 3, 3}), 3);
    CHECK(c.slice(mask_from_parts({1, 2, 3})).count() == 1);
    CHECK(c.slice(mask_from_parts({1, 2})).count() == 1);
    CHECK(c.slice(mask_from_parts({1, 3})).count() == 1);
    CHECK(c.slice(mask_from_parts({2, 3})).count() == 1);
    CHECK(c.slice(mask_from_parts({1})).count() == 1);
    CHECK(c.slice(mask_from_parts({2})).count() == 1);
    CHECK(c.slice(mask_from_parts({3})).count() == 1);
    CHECK(c.edge_count() == 8);
}

TEST_CASE("closure of random 3-edges equals the power-set union oracle") {
    Rng rng(21);
    VertexPartition vp({3, 3, 3});
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Edge> edges;
        for (int i = 0; i < 20; ++i) edges.push_back(random_edge(rng, vp, 3));
        Chain c = down_closure(edges, vp, 3);
        CHECK(chain_edge_set(c) == power_set_union(edges));
        CHECK(c.is_down_closed());
        // idempotent: closing a closed chain changes nothing
        Chain again = down_closure(c.edges(), vp, 3);
        CHECK(chain_edge_set(again) == chain_edge_set(c));
    }
}

TEST_CASE("closure rejects invalid edges") {
    VertexPartition vp({2, 2});
    CHECK_THROWS_AS(down_closure({Edge{{1, 0}, {1, 1}}}, vp, 2), std::invalid_argument);
    CHECK_THROWS_AS(down_closure({Edge{{1, 5}}}, vp, 2), std::invalid_argument);
    CHECK_THROWS_AS(down_closure({Edge{{1, 0}, {2, 0}}}, vp, 1), std::invalid_argument);
}

TEST_CASE("index_of reads off the touched parts") {
    CHECK(index_of(Edge{}) == 0);
    CHECK(index_of(Edge{{2, 5}}) == mask_from_parts({2}));
    CHECK(index_of(Edge{{1, 0}, {3, 7}}) == mask_from_parts({1, 3}));
}

TEST_CASE("slice and star on the complete chain") {
    Chain c = Chain::complete(VertexPartition({2, 2}), 2);
    Mask a = mask_from_parts({1, 2});
    CHECK(c.slice(a).count() == 4);
    CHECK(c.star(a).count() == 4);
    auto [h, hs] = slice_and_star(c, a);
    CHECK(h.size() == 4);
    CHECK(hs.size() == 4);
}

TEST_CASE("single triangle: slice equals star at the top") {
    Chain c = down_closure({Edge{{1, 0}, {2, 1}, {3, 2}}}, VertexPartition({3, 3, 3}), 3);
    Mask top = mask_from_parts({1, 2, 3});
    CHECK(c.slice(top).count() == 1);
    CHECK(c.star(top).count() == 1);
}

TEST_CASE("star counts triangles of the 2-skeleton") {
    Rng rng(22);
    VertexPartition vp({5, 5, 5});
    Chain g = random_graph_chain(vp, 0.5, 33);
    // rebuild with all its triangles as 3-edges
    ChainBuilder b(vp, 3);
    for (const Edge& e : g.edges()) b.insert_as_listed(e);
    Mask top = mask_from_parts({1, 2, 3});
    Mask xy = mask_from_parts({1, 2}), xz = mask_from_parts({1, 3}), yz = mask_from_parts({2, 3});
    TupleSpace spXY(xy, vp), spXZ(xz, vp), spYZ(yz, vp), spTop(top, vp);
    std::uint64_t triangles = 0;
    for (int x = 0; x < 5; ++x)
        for (int y = 0; y < 5; ++y)
            for (int z = 0; z < 5; ++z) {
                bool t = g.slice(xy).contains(spXY.encode({x, y})) &&
                         g.slice(xz).contains(spXZ.encode({x, z})) &&
                         g.slice(yz).contains(spYZ.encode({y, z}));
                if (t) {
                    ++triangles;
                    b.insert_code(top, spTop.encode({x, y, z}));
                }
            }
    Chain c = std::move(b).build(true);
    CHECK(c.star(top).count() == triangles);
    CHECK(c.slice(top).count() == triangles);
}

TEST_CASE("singleton stars are whole parts") {
    Chain c = down_closure({Edge{{1, 0}}}, VertexPartition({4, 7}), 2);
    CHECK(c.star(mask_from_parts({1})).count() == 4);
    CHECK(c.star(mask_from_parts({2})).count() == 7);
    CHECK(c.slice(mask_from_parts({2})).count() == 0);
}

TEST_CASE("relative density: complete is one, empty slice is zero, empty star throws") {
    Chain full = Chain::complete(VertexPartition({3, 4}), 2);
    CHECK(full.relative_density(mask_from_parts({1, 2})) == Rational(1));
    CHECK(full.relative_density(mask_from_parts({1})) == Rational(1));

    Chain verts = down_closure({Edge{{1, 0}}, Edge{{1, 1}}, Edge{{2, 0}}},
                               VertexPartition({2, 2}), 2);
    CHECK(verts.relative_density(mask_from_parts({1, 2})) == Rational(0));
    CHECK(verts.star(mask_from_parts({1, 2})).count() == 2);

    Chain empty = down_closure({}, VertexPartition({2, 2}), 2);
    CHECK_THROWS_AS(empty.relative_density(mask_from_parts({1, 2})), EmptyStarError);
}

TEST_CASE("relative density matches exhaustive counting on random chains") {
    VertexPartition vp({4, 4, 4});
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Chain c = random_chain_levelwise(vp, 3, {0.9, 0.7, 0.5}, seed);
        for (Mask a : c.all_indices()) {
            // oracle: enumerate every tuple, count slice members and
            // boundary-complete tuples directly
            TupleSpace sp(a, vp);
            std::uint64_t inSlice = 0, inStar = 0;
            for (std::uint64_t code = 0; code < sp.total; ++code) {
                Edge e = sp.to_edge(code);
                bool star = true;
                if (e.size() >= 2) {
                    for (int drop = 0; drop < e.size() && star; ++drop) {
                        Edge sub = e;
                        sub.vertices.erase(sub.vertices.begin() + drop);
                        star = c.contains_edge(sub);
                    }
                }
                if (star) {
                    ++inStar;
                    if (c.contains_edge(e)) ++inSlice;
                }
            }
            if (inStar == 0) {
                CHECK_THROWS_AS(c.relative_density(a), EmptyStarError);
            } else {
                CHECK(c.relative_density(a) == Rational(static_cast<std::int64_t>(inSlice),
                                                        static_cast<std::int64_t>(inStar)));
            }
        }
    }
}

TEST_CASE("slice and star are monotone under adding edges") {
    Rng rng(23);
    VertexPartition vp({3, 3, 3});
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<Edge> base;
        for (int i = 0; i < 6; ++i) base.push_back(random_edge(rng, vp, 2));
        Chain small = down_closure(base, vp, 3);
        std::vector<Edge> more = base;
        more.push_back(random_edge(rng, vp, 3));
        Chain big = down_closure(more, vp, 3);
        for (Mask a : small.all_indices()) {
            bool sliceGrew = true, starGrew = true;
            small.slice(a).for_each([&](std::uint64_t c) {
                if (!big.slice(a).contains(c)) sliceGrew = false;
            });
            small.star(a).for_each([&](std::uint64_t c) {
                if (!big.star(a).contains(c)) starGrew = false;
            });
            CHECK(sliceGrew);
            CHECK(starGrew);
        }
    }
}

TEST_CASE("density is invariant under within-part relabeling") {
    Rng rng(24);
    VertexPartition vp({4, 4, 4});
    Chain c = random_chain_levelwise(vp, 3, {1.0, 0.6, 0.5}, 77);
    std::vector<std::vector<int>> perms;
    for (int p = 1; p <= 3; ++p) perms.push_back(relabeling(rng, vp.size_of(p)));
    Chain d = relabel_chain(c, perms);
    for (Mask a : c.all_indices()) {
        CHECK(c.slice(a).count() == d.slice(a).count());
        CHECK(c.star(a).count() == d.star(a).count());
    }
}

TEST_CASE("every sub-edge of a chain edge is present, exhaustively") {
    Chain c = random_chain_levelwise(VertexPartition({3, 3, 3}), 3, {1.0, 0.7, 0.8}, 5);
    for (const Edge& e : c.edges()) {
        int n = e.size();
        for (unsigned sub = 1; sub < (1u << n); ++sub) {
            std::vector<std::pair<int, int>> part;
            for (int i = 0; i < n; ++i)
                if ((sub >> i) & 1u) part.push_back(e.vertices[static_cast<std::size_t>(i)]);
            CHECK(c.contains_edge(Edge(std::move(part))));
        }
    }
}

TEST_CASE("maximal edges regenerate the chain") {
    Chain c = random_chain_levelwise(VertexPartition({3, 4, 3}), 3, {0.9, 0.8, 0.5}, 9);
    Chain rebuilt = down_closure(c.maximal_edges(), c.partition(), c.uniformity());
    CHECK(chain_edge_set(rebuilt) == chain_edge_set(c));
}
