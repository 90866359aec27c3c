#include <doctest.h>

#include "hyreg/partition_system.hpp"
#include "support.hpp"

using namespace hyreg;
using namespace testutil;

TEST_CASE("trivial system induces the complete chain") {
    VertexPartition vp({3, 3, 3});
    PartitionSystem s = PartitionSystem::trivial(vp, 2);
    ClassDecomposition classes(s);
    Chain c = classes.induced_chain({0, 1, 2});
    Chain full = Chain::complete(vp, 2);
    CHECK(chain_edge_set(c) == chain_edge_set(full));
}

TEST_CASE("singleton-only system induces the product chain through the classes") {
    VertexPartition vp({4, 4});
    PartitionSystem s = PartitionSystem::trivial(vp, 2);
    // split part 1 into {0,1} and {2,3}; part 2 into {0} and the rest
    s.set_partition(mask_from_parts({1}), {0, 0, 1, 1}, 2);
    s.set_partition(mask_from_parts({2}), {0, 1, 1, 1}, 2);
    ClassDecomposition classes(s);
    Chain c = classes.induced_chain({0, 2});
    CHECK(c.slice(mask_from_parts({1})).count() == 2);   // class of vertex 0
    CHECK(c.slice(mask_from_parts({2})).count() == 3);   // class of vertex 2
    CHECK(c.slice(mask_from_parts({1, 2})).count() == 6);  // the product box
    CHECK(c.is_down_closed());
}

TEST_CASE("induced chains agree with a subset-label oracle") {
    VertexPartition vp({4, 4, 4});
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        PartitionSystem s = random_partition_system(vp, 2, 3, seed);
        ClassDecomposition classes(s);
        Rng rng(seed * 7 + 1);
        std::vector<int> x{static_cast<int>(rng.below(4)), static_cast<int>(rng.below(4)),
                           static_cast<int>(rng.below(4))};
        Chain c = classes.induced_chain(x);
        CHECK(c.is_down_closed());  // induced chains are always down-closed
        for (Mask a : s.masks()) {
            // oracle: B is an edge iff every nonempty C under A carries the
            // same label for B's and x's sub-tuples
            const TupleSpace& sp = s.space(a);
            for (std::uint64_t code = 0; code < sp.total; ++code) {
                bool expect = true;
                for_each_submask(a, [&](Mask sub) {
                    TupleSpace spSub(sub, vp);
                    std::uint64_t bSub = sp.project(code, spSub);
                    std::uint64_t xSub = classes.code_of(x, sub);
                    if (s.label(sub, bSub) != s.label(sub, xSub)) expect = false;
                });
                CHECK(c.contains(a, code) == expect);
            }
        }
    }
}

TEST_CASE("strong and weak classes match their definitional oracles") {
    VertexPartition vp({3, 3, 3});
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        PartitionSystem s = random_partition_system(vp, 3, 3, seed);
        ClassDecomposition classes(s);
        for (Mask a : s.masks()) {
            auto strongOracle = strong_classes_by_definition(s, a);
            auto weakOracle = weak_classes_by_definition(s, a);
            const TupleSpace& sp = s.space(a);
            for (std::uint64_t c1 = 0; c1 < sp.total; ++c1)
                for (std::uint64_t c2 = c1; c2 < sp.total; ++c2) {
                    CHECK((classes.strong_id(a, c1) == classes.strong_id(a, c2)) ==
                          (strongOracle[c1] == strongOracle[c2]));
                    CHECK((classes.weak_id(a, c1) == classes.weak_id(a, c2)) ==
                          (weakOracle[c1] == weakOracle[c2]));
                }
        }
    }
}

TEST_CASE("decomposition: the trivial system yields exactly one chain") {
    PartitionSystem s = PartitionSystem::trivial(VertexPartition({2, 3}), 2);
    DecompositionCheck chk = decomposition_check(s, true);
    CHECK(chk.distinct_chains == 1);
    CHECK(chk.pass());
}

TEST_CASE("decomposition: singleton-only system counts label combinations") {
    VertexPartition vp({2, 2});
    PartitionSystem s = PartitionSystem::trivial(vp, 2);
    s.set_partition(mask_from_parts({1}), {0, 1}, 2);
    s.set_partition(mask_from_parts({2}), {0, 0}, 1);
    DecompositionCheck chk = decomposition_check(s, true);
    CHECK(chk.distinct_chains == 2);  // two realized class combinations
    CHECK(chk.pass());
}

TEST_CASE("decomposition: random systems verify exhaustively") {
    VertexPartition vp({3, 3, 3});
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        PartitionSystem s = random_partition_system(vp, 2, 3, seed);
        DecompositionCheck chk = decomposition_check(s, true);
        CHECK(chk.compatibility_failures == 0);
        CHECK(chk.uniqueness_failures == 0);
    }
}

TEST_CASE("mean-square density of a partition against itself is one") {
    std::vector<std::uint32_t> p{0, 1, 2, 0, 1, 2, 2};
    CHECK(mean_square_density(p, 3, p, 3) == Rational(1));
}

TEST_CASE("mean-square density against the trivial partition sums squared weights") {
    std::vector<std::uint32_t> p{0, 0, 1, 1, 1, 2};
    std::vector<std::uint32_t> q(p.size(), 0);
    // (2/6)^2 + (3/6)^2 + (1/6)^2
    CHECK(mean_square_density(p, 3, q, 1) == Rational(4 + 9 + 1, 36));
}

TEST_CASE("mean-square density matches direct summation on random partitions") {
    Rng rng(61);
    for (int trial = 0; trial < 10; ++trial) {
        std::size_t n = 50;
        std::uint32_t pc = 2 + static_cast<std::uint32_t>(rng.below(4));
        std::uint32_t qc = 2 + static_cast<std::uint32_t>(rng.below(4));
        std::vector<std::uint32_t> p(n), q(n);
        for (auto& v : p) v = static_cast<std::uint32_t>(rng.below(pc));
        for (auto& v : q) v = static_cast<std::uint32_t>(rng.below(qc));
        CHECK(mean_square_density(p, pc, q, qc) == msd_direct(p, pc, q, qc));
    }
}

TEST_CASE("mean-square density rejects mismatched ground sets") {
    std::vector<std::uint32_t> p{0, 1}, q{0, 1, 0};
    CHECK_THROWS_AS(mean_square_density(p, 2, q, 2), std::invalid_argument);
}

TEST_CASE("energy of the trivial system is one at every index") {
    PartitionSystem s = PartitionSystem::trivial(VertexPartition({3, 4}), 2);
    EnergyVector ev = energy_vector(s);
    for (const auto& [a, sigma] : ev.sigma) {
        (void)a;
        CHECK(sigma == Rational(1));
    }
}

TEST_CASE("two-cell top split: sigma = d^2 + (1-d)^2") {
    VertexPartition vp({4, 4});
    Chain g = random_graph_chain(vp, 0.5, 21);
    PartitionSystem s = PartitionSystem::top_split(g);
    Mask top = mask_from_parts({1, 2});
    Rational d(static_cast<std::int64_t>(g.slice(top).count()), 16);
    EnergyVector ev = energy_vector(s);
    CHECK(ev.at(top) == d * d + (Rational(1) - d) * (Rational(1) - d));
}

TEST_CASE("energy matches a brute-force weak-class computation") {
    VertexPartition vp({3, 3, 3});
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        PartitionSystem s = random_partition_system(vp, 2, 3, seed);
        ClassDecomposition classes(s);
        for (Mask a : s.masks()) {
            auto weakOracle = weak_classes_by_definition(s, a);
            std::uint32_t weakCells = 0;
            for (std::uint32_t w : weakOracle) weakCells = std::max(weakCells, w + 1);
            Rational expect = mean_square_density(s.labels(a), s.cell_count(a), weakOracle, weakCells);
            CHECK(energy_at(s, classes, a) == expect);
        }
    }
}

TEST_CASE("refining the comparison partition never lowers mean-square density") {
    // exact on random refinement pairs
    Rng rng(62);
    for (int trial = 0; trial < 30; ++trial) {
        std::size_t n = 40;
        std::uint32_t pc = 2 + static_cast<std::uint32_t>(rng.below(3));
        std::uint32_t qc = 1 + static_cast<std::uint32_t>(rng.below(3));
        std::vector<std::uint32_t> p(n), q(n), qFine(n);
        for (auto& v : p) v = static_cast<std::uint32_t>(rng.below(pc));
        for (std::size_t i = 0; i < n; ++i) {
            q[i] = static_cast<std::uint32_t>(rng.below(qc));
            qFine[i] = q[i] * 3 + static_cast<std::uint32_t>(rng.below(3));  // refines q
        }
        Rational coarse = mean_square_density(p, pc, q, qc);
        Rational fine = mean_square_density(p, pc, qFine, qc * 3);
        CHECK(fine >= coarse);
    }
}

TEST_CASE("mean-square density dominates <f,g>^2 / |g|^2 for cell-constant g") {
    Rng rng(63);
    for (int trial = 0; trial < 60; ++trial) {
        std::size_t n = 6 + rng.below(30);
        std::uint32_t cells = 1 + static_cast<std::uint32_t>(rng.below(5));
        std::vector<std::uint32_t> part(n);
        for (auto& v : part) v = static_cast<std::uint32_t>(rng.below(cells));
        std::vector<Rational> f(n), gval(cells);
        for (auto& v : f)
            v = Rational(static_cast<std::int64_t>(rng.below(17)) - 8, 8);
        for (auto& v : gval)
            v = Rational(static_cast<std::int64_t>(rng.below(17)) - 8, 8);
        // mean-square density of f over the cells
        RationalSum msd, inner, norm;
        BigInt N(static_cast<std::int64_t>(n));
        for (std::uint32_t c = 0; c < cells; ++c) {
            Rational sum(0);
            std::int64_t size = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (part[i] == c) { sum += f[i]; ++size; }
            if (size == 0) continue;
            Rational mean = sum / Rational(size);
            msd.add(mean * mean * Rational(size, static_cast<std::int64_t>(n)));
        }
        for (std::size_t i = 0; i < n; ++i) {
            inner.add(f[i] * gval[part[i]] * Rational(1, static_cast<std::int64_t>(n)));
            norm.add(gval[part[i]] * gval[part[i]] * Rational(1, static_cast<std::int64_t>(n)));
        }
        Rational ip = inner.value();
        Rational g2 = norm.value();
        if (g2.is_zero()) {
            CHECK(ip == Rational(0));
            continue;
        }
        CHECK(msd.value() * g2 >= ip * ip);
    }
}

TEST_CASE("few tuples have tiny relative class density") {
    VertexPartition vp({4, 4, 4});
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        PartitionSystem s = random_partition_system(vp, 2, 3, seed);
        ClassDecomposition classes(s);
        for (Mask a : s.masks()) {
            const TupleSpace& sp = s.space(a);
            for (Rational eps : {Rational(1, 10), Rational(1, 4)}) {
                std::uint64_t bad = 0;
                Rational bound = eps / Rational(s.cell_count(a));
                for (std::uint64_t c = 0; c < sp.total; ++c) {
                    if (classes.delta_of_strong(a, classes.strong_id(a, c)) < bound) ++bad;
                }
                // P[delta_{A,x} < eps / n_A] <= eps
                CHECK(Rational(static_cast<std::int64_t>(bad),
                               static_cast<std::int64_t>(sp.total)) <= eps);
            }
        }
    }
}

TEST_CASE("partition refinement bookkeeping renumbers compactly") {
    VertexPartition vp({4, 4});
    PartitionSystem s = PartitionSystem::trivial(vp, 2);
    Mask one = mask_from_parts({1});
    std::vector<std::uint32_t> extra{0, 0, 1, 2};
    s.refine(one, {&extra});
    CHECK(s.cell_count(one) == 3);
    std::vector<std::uint32_t> extra2{1, 0, 0, 0};
    s.refine(one, {&extra2});
    CHECK(s.cell_count(one) == 4);
    // refinement: tuples sharing a new label shared every old one
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (s.label(one, i) == s.label(one, j)) {
                CHECK(extra[i] == extra[j]);
                CHECK(extra2[i] == extra2[j]);
            }
}

TEST_CASE("the induced chain's star is the weak class") {
    VertexPartition vp({4, 4, 4});
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        PartitionSystem s = random_partition_system(vp, 2, 3, 50 + seed);
        ClassDecomposition classes(s);
        Rng rng(seed);
        std::vector<int> x{static_cast<int>(rng.below(4)), static_cast<int>(rng.below(4)),
                           static_cast<int>(rng.below(4))};
        Chain c = classes.induced_chain(x);
        for (Mask a : s.masks()) {
            if (mask_size(a) < 2) continue;
            std::uint32_t weakTarget = classes.weak_id(a, classes.code_of(x, a));
            const TupleSpace& sp = s.space(a);
            for (std::uint64_t code = 0; code < sp.total; ++code)
                CHECK(c.star(a).contains(code) == (classes.weak_id(a, code) == weakTarget));
        }
    }
}

TEST_CASE("sampled decomposition checks agree with exhaustive on small systems") {
    VertexPartition vp({3, 3, 3});
    PartitionSystem s = random_partition_system(vp, 2, 3, 99);
    DecompositionCheck sampled = decomposition_check(s, false, 200, 7);
    CHECK(sampled.pass());
    CHECK(sampled.tuples_checked == 200);
    CHECK(sampled.distinct_chains >= 1);
}
