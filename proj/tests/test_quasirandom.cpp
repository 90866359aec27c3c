#include <doctest.h>

#include <cmath>

#include "hyreg/quasirandomness.hpp"
#include "support.hpp"

using namespace hyreg;
using namespace testutil;

namespace {

Chain triangle_template() {
    return down_closure({Edge{{1, 0}, {2, 0}}, Edge{{1, 0}, {3, 0}}, Edge{{2, 0}, {3, 0}}},
                        VertexPartition({1, 1, 1}), 2);
}

}  // namespace

TEST_CASE("the complete chain passes at any epsilon") {
    Chain H = Chain::complete(VertexPartition({4, 4, 4}), 2);
    for (double eps : {1.0, 0.1, 0.01}) {
        QuasirandomnessReport rep = quasirandomness_report(H, triangle_template(), eps);
        CHECK(rep.verdict);
        for (const auto& v : rep.indices) {
            CHECK(v.eta_star.is_zero());
            CHECK(v.oct == 0.0);
        }
    }
}

TEST_CASE("an index with slice equal to star passes regardless of the rest") {
    // pair level {1,2} complete over its star; {1,3} and {2,3} random
    Rng rng(31);
    VertexPartition vp({5, 5, 5});
    ChainBuilder b(vp, 2);
    for (int p = 1; p <= 3; ++p)
        for (int v = 0; v < 5; ++v) b.insert_closed(Edge{{p, v}});
    Mask xy = mask_from_parts({1, 2});
    TupleSpace spXY(xy, vp);
    for (std::uint64_t c = 0; c < spXY.total; ++c) b.insert_code(xy, c);
    for (Mask a : {mask_from_parts({1, 3}), mask_from_parts({2, 3})}) {
        TupleSpace sp(a, vp);
        for (std::uint64_t c = 0; c < sp.total; ++c)
            if (rng.bernoulli(0.5)) b.insert_code(a, c);
    }
    Chain H = std::move(b).build(true);
    QuasirandomnessReport rep = quasirandomness_report(H, triangle_template(), 0.5);
    for (const auto& v : rep.indices) {
        if (v.index == xy) {
            CHECK(v.eta_star.is_zero());
            CHECK(v.pass);
        }
    }
}

TEST_CASE("measured eta* matches a naive-oracle recomputation") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        Chain H = random_chain_levelwise(VertexPartition({8, 8, 8}), 2, {1.0, 0.5}, seed);
        QuasirandomnessReport fast =
            quasirandomness_report(H, triangle_template(), 0.5);
        ReportOptions naive;
        naive.strategy = OctStrategy::naive;
        QuasirandomnessReport slow = quasirandomness_report(H, triangle_template(), 0.5, naive);
        REQUIRE(fast.indices.size() == slow.indices.size());
        for (std::size_t i = 0; i < fast.indices.size(); ++i) {
            const auto& a = fast.indices[i];
            const auto& b = slow.indices[i];
            CHECK(a.index == b.index);
            CHECK(std::fabs(a.oct - b.oct) <= 1e-11 * std::max(1.0, std::fabs(b.oct)));
            if (!a.eta_star.is_zero() && !b.eta_star.is_zero())
                CHECK(std::fabs((double)(a.eta_star.lg - b.eta_star.lg)) < 1e-8);
            else
                CHECK(a.eta_star.is_zero() == b.eta_star.is_zero());
        }
        // deterministic: rerunning gives the same verdict and numbers
        QuasirandomnessReport again = quasirandomness_report(H, triangle_template(), 0.5);
        CHECK(again.verdict == fast.verdict);
        for (std::size_t i = 0; i < fast.indices.size(); ++i)
            CHECK(again.indices[i].oct == fast.indices[i].oct);
    }
}

TEST_CASE("degenerate stars are flagged, not thrown") {
    // no vertices in part 3's slices beyond what closure forces: build a chain
    // with empty pair level {1,2} and nonempty elsewhere, then ask for a
    // template touching the empty star above it
    ChainBuilder b(VertexPartition({3, 3, 3}), 3);
    for (int p = 1; p <= 3; ++p)
        for (int v = 0; v < 3; ++v) b.insert_closed(Edge{{p, v}});
    // pairs {1,3} and {2,3} full, {1,2} empty -> star of {1,2,3} is empty
    VertexPartition vp({3, 3, 3});
    for (Mask a : {mask_from_parts({1, 3}), mask_from_parts({2, 3})}) {
        TupleSpace sp(a, vp);
        for (std::uint64_t c = 0; c < sp.total; ++c) b.insert_code(a, c);
    }
    Chain H = std::move(b).build(true);
    Chain J = down_closure({Edge{{1, 0}, {2, 0}, {3, 0}}}, VertexPartition({1, 1, 1}), 3);
    QuasirandomnessReport rep = quasirandomness_report(H, J, 0.25);
    bool sawDegenerate = false;
    for (const auto& v : rep.indices)
        if (v.degenerate) sawDegenerate = true;
    CHECK(sawDegenerate);
    CHECK_FALSE(rep.verdict);
}

TEST_CASE("zero-density slices pass through the inequality form") {
    // vertices and one empty pair level: delta = 0, deviation vanishes
    std::vector<Edge> vs;
    for (int p = 1; p <= 2; ++p)
        for (int v = 0; v < 4; ++v) vs.push_back(Edge{{p, v}});
    Chain H = down_closure(vs, VertexPartition({4, 4}), 2);
    Chain J = down_closure({Edge{{1, 0}, {2, 0}}}, VertexPartition({1, 1}), 2);
    ReportOptions opt;
    opt.eta_by_level = {0.5};
    QuasirandomnessReport rep = quasirandomness_report(H, J, 0.5, opt);
    CHECK(rep.verdict);
    for (const auto& v : rep.indices)
        if (v.index == mask_from_parts({1, 2})) {
            CHECK(v.delta == Rational(0));
            CHECK(v.eta_star.is_zero());
            CHECK(v.pass);
        }
    // without the override the recurrence schedule is undefined at delta = 0
    QuasirandomnessReport strict = quasirandomness_report(H, J, 0.5);
    CHECK(strict.schedule_degenerate);
    CHECK_FALSE(strict.verdict);
}

TEST_CASE("eta override thresholds flip the verdict where the schedule cannot") {
    Chain H = random_chain_levelwise(VertexPartition({8, 8, 8}), 2, {1.0, 0.5}, 7);
    ReportOptions lax;
    lax.eta_by_level = {100.0};
    CHECK(quasirandomness_report(H, triangle_template(), 0.5, lax).verdict);
    ReportOptions strict;
    strict.eta_by_level = {1e-9};
    CHECK_FALSE(quasirandomness_report(H, triangle_template(), 0.5, strict).verdict);
    // the faithful schedule at k = 2 is far below any random chain's eta*
    CHECK_FALSE(quasirandomness_report(H, triangle_template(), 0.5).verdict);
}

TEST_CASE("required_epsilon reproduces the measured boundary") {
    Chain H = random_chain_levelwise(VertexPartition({8, 8, 8}), 2, {1.0, 0.5}, 17);
    Chain J = triangle_template();
    QuasirandomnessReport rep = quasirandomness_report(H, J, 0.5);
    REQUIRE(rep.has_required_epsilon);
    REQUIRE(!rep.required_epsilon.is_zero());
    // with level-1 deviations exactly zero, level 2 binds: eta_2 rebuilt at the
    // required epsilon equals the largest measured eta* there
    long double sumLogDelta = 0;
    for (const Edge& e : J.edges())
        if (e.size() >= 2)
            sumLogDelta += std::log((long double)H.relative_density(e.index()).to_double());
    long double eta2AtReq = -std::log(2.0L) + 4.0L * (rep.required_epsilon.lg + sumLogDelta);
    long double maxEtaStar = -1e30L;
    for (const auto& v : rep.indices)
        if (mask_size(v.index) == 2 && !v.eta_star.is_zero())
            maxEtaStar = std::max(maxEtaStar, v.eta_star.lg);
    CHECK(std::fabs((double)(eta2AtReq - maxEtaStar)) < 1e-6);
}

TEST_CASE("the report is invariant under within-part relabeling") {
    Rng rng(71);
    Chain H = random_chain_levelwise(VertexPartition({7, 7, 7}), 2, {1.0, 0.5}, 55);
    std::vector<std::vector<int>> perms;
    for (int p = 1; p <= 3; ++p) perms.push_back(relabeling(rng, 7));
    Chain H2 = relabel_chain(H, perms);
    QuasirandomnessReport a = quasirandomness_report(H, triangle_template(), 0.5);
    QuasirandomnessReport b = quasirandomness_report(H2, triangle_template(), 0.5);
    REQUIRE(a.indices.size() == b.indices.size());
    for (std::size_t i = 0; i < a.indices.size(); ++i) {
        CHECK(a.indices[i].delta == b.indices[i].delta);
        CHECK(a.indices[i].oct == doctest::Approx(b.indices[i].oct).epsilon(1e-12));
        CHECK(a.indices[i].pass == b.indices[i].pass);
    }
    CHECK(a.verdict == b.verdict);
}
