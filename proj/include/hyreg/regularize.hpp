#pragma once

// The energy-increment regularization loop: measure the fraction of tuples x
// whose induced chain H(x) passes quasirandomness at the active thresholds;
// while too many fail, pick the minimal failing level, refine every distinct
// failing slice there, merge by common refinement, and repeat. Top-level
// partitions are never refined. The mean-square energy at the refined index
// is monotone, which bounds the iteration count.
//
// The recurrence-faithful eta thresholds are astronomically small and unusable at
// finite scale; callers normally supply an override schedule, while the
// faithful one remains available for printing.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "hyreg/chain.hpp"
#include "hyreg/log_number.hpp"
#include "hyreg/partition_system.hpp"
#include "hyreg/refinement.hpp"
#include "hyreg/rng.hpp"
#include "hyreg/thresholds.hpp"

namespace hyreg {

struct RegularizeOverrides {
    std::vector<double> eta_by_level;  // empty: recurrence-faithful schedule
    int max_iters = 50;
    int r = 8;
    std::uint64_t seed = 1;
    int retry_budget = 64;
    int r_cap = 64;
    std::uint64_t exhaustive_cap = 1000000;  // enumerate x when prod N_i fits
    std::uint64_t sample_count = 10000;
};

struct IterationRecord {
    int iteration = 0;
    EnergyVector energies;
    double failing_fraction = 0.0;
    std::uint64_t distinct_chains = 0;
    // what the iteration refined in response (index 0 on the final record)
    Mask refined_index = 0;
    int refined_level = 0;
    std::uint64_t classes_refined = 0;
    std::uint64_t refinements_accepted = 0;
    double min_accepted_gain = 0.0;
    Rational sigma_before, sigma_after;  // at the refined index
};

struct RegularizeResult {
    PartitionSystem system;
    bool converged = false;
    int iterations = 0;
    double failing_fraction = 1.0;
    std::vector<IterationRecord> trace;
};

namespace detail {

struct ChainVerdict {
    bool pass = true;
    int min_fail_level = 0;
    std::vector<Mask> failing_at_min;  // lex-sorted
};

// Per-class measured eta*: Oct of the deviation of x's slice at A over the
// box of singleton cells, against prod_{C subseteq A} delta_{C,x}^{2^|C|}.
inline LogValue eta_star_for(const PartitionSystem& system, const ClassDecomposition& classes,
                             const std::vector<int>& x, Mask a) {
    if (mask_size(a) == 1) return LogValue::zero_value();  // exact mean-zero: Oct = 0
    RefinementBox box = build_box(system, classes, x, a);
    TupleSpace boxA(box.fullLocal, box.boxVp);
    double delta = static_cast<double>(box.sliceSize) / static_cast<double>(box.wLocal.size());
    std::vector<double> fvals(boxA.total, 0.0);
    for (std::size_t i = 0; i < box.wLocal.size(); ++i)
        fvals[box.wLocal[i]] = box.inSlice[i] ? 1.0 - delta : -delta;
    EdgeFunction f(box.fullLocal, box.boxVp, std::move(fvals), false);
    double boxScale = 1.0;
    for (int i = 0; i < box.s; ++i) {
        double ratio = static_cast<double>(box.cells[static_cast<std::size_t>(i)].size()) /
                       system.partition().size_of(box.parts[static_cast<std::size_t>(i)]);
        boxScale *= ratio * ratio;
    }
    double oct = oct_contraction(f) * boxScale;
    if (oct <= 1e-15) return LogValue::zero_value();
    long double refLog = 0.0L;
    for_each_submask(a, [&](Mask c) {
        refLog += static_cast<long double>(1u << mask_size(c)) *
                  static_cast<long double>(std::log(classes.delta(c, x).to_double()));
    });
    return LogValue::from_log(std::log(static_cast<long double>(oct)) - refLog);
}

}  // namespace detail

// J' = J plus a double-octahedron template D_A for every index A with
// 2 <= |A| <= k: three template vertices per part of A, edges of size at most
// |A|-1 avoiding the mix of the two outer copies.
inline Chain augment_with_double_octahedra(const Chain& J, int k) {
    int r = J.part_count();
    std::vector<int> sizes = J.partition().sizes;
    struct DCopy {
        Mask a;
        std::vector<int> base;  // first new slot per part of A
    };
    std::vector<DCopy> copies;
    Mask full = (Mask{1} << r) - 1;
    for (Mask a = 1; a <= full; ++a) {
        if (mask_size(a) < 2 || mask_size(a) > k) continue;
        DCopy d;
        d.a = a;
        for (int p : mask_parts(a)) {
            d.base.push_back(sizes[static_cast<std::size_t>(p - 1)]);
            sizes[static_cast<std::size_t>(p - 1)] += 3;
        }
        copies.push_back(std::move(d));
    }
    VertexPartition vp(sizes);
    ChainBuilder b(vp, k);
    for (const Edge& e : J.edges()) b.insert_closed(e);
    for (const DCopy& d : copies) {
        int s = mask_size(d.a);
        std::vector<int> parts = mask_parts(d.a);
        // vertices (i, level) for i in [0,s), level in {0,1,2}; edges are the
        // partite subsets of size <= s-1 whose levels avoid {1,2} together
        for (Mask sub = 1; sub < (Mask{1} << s); ++sub) {
            if (mask_size(sub) > s - 1) continue;
            std::vector<int> members = mask_parts(sub);  // 1-based positions
            std::vector<int> level(members.size(), 0);
            while (true) {
                bool has1 = false, has2 = false;
                for (int lv : level) {
                    has1 |= lv == 1;
                    has2 |= lv == 2;
                }
                if (!(has1 && has2)) {
                    std::vector<std::pair<int, int>> vs;
                    for (std::size_t i = 0; i < members.size(); ++i) {
                        int pos = members[i] - 1;
                        vs.emplace_back(parts[static_cast<std::size_t>(pos)],
                                        d.base[static_cast<std::size_t>(pos)] + level[i]);
                    }
                    b.insert_closed(Edge(std::move(vs)));
                }
                std::size_t i = 0;
                for (; i < level.size(); ++i) {
                    if (++level[i] <= 2) break;
                    level[i] = 0;
                }
                if (i == level.size()) break;
            }
        }
    }
    return std::move(b).build(false);
}

inline RegularizeResult regularize(const PartitionSystem& initial, const Chain& J, double epsilon,
                                   const RegularizeOverrides& overrides = {}) {
    if (!(epsilon > 0.0) || static_cast<double>(J.edge_count()) * epsilon > 1.0 + 1e-12)
        throw std::invalid_argument("regularize: epsilon must lie in (0, 1/|J|]");
    if (J.part_count() != initial.partition().part_count())
        throw std::invalid_argument("regularize: template parts do not align with the system");
    int k = initial.uniformity();
    Chain augmented = augment_with_double_octahedra(J, k);
    std::vector<Mask> checkIndices = realized_indices(augmented);
    // per-edge index list of the augmented template, for per-class schedules
    std::vector<Mask> edgeIndices;
    for (const Edge& e : augmented.edges()) edgeIndices.push_back(e.index());
    std::uint64_t templateEdges = augmented.edge_count();

    const VertexPartition& vp = initial.partition();
    int r = vp.part_count();
    std::uint64_t universe = 1;
    for (int p = 1; p <= r; ++p) universe *= static_cast<std::uint64_t>(vp.size_of(p));
    bool exhaustive = universe <= overrides.exhaustive_cap;

    RegularizeResult result;
    result.system = initial;
    Rng seedStream(overrides.seed);

    for (int iter = 0;; ++iter) {
        ClassDecomposition classes(result.system);

        // group the measured x by full signature; each group shares H(x)
        std::map<std::vector<std::uint32_t>, std::pair<std::vector<int>, std::uint64_t>> groups;
        std::uint64_t measured = 0;
        auto note = [&](const std::vector<int>& x) {
            auto sig = classes.signature(x);
            auto [it, inserted] = groups.try_emplace(std::move(sig), std::make_pair(x, 0ull));
            it->second.second++;
            ++measured;
        };
        if (exhaustive) {
            std::vector<int> x(static_cast<std::size_t>(r), 0);
            for (std::uint64_t i = 0; i < universe; ++i) {
                std::uint64_t rest = i;
                for (int p = 0; p < r; ++p) {
                    x[static_cast<std::size_t>(p)] = static_cast<int>(
                        rest % static_cast<std::uint64_t>(vp.size_of(p + 1)));
                    rest /= static_cast<std::uint64_t>(vp.size_of(p + 1));
                }
                note(x);
            }
        } else {
            Rng rng = Rng(overrides.seed).fork(0xfeedu + static_cast<std::uint64_t>(iter));
            std::vector<int> x(static_cast<std::size_t>(r));
            for (std::uint64_t i = 0; i < overrides.sample_count; ++i) {
                for (int p = 0; p < r; ++p)
                    x[static_cast<std::size_t>(p)] =
                        static_cast<int>(rng.below(static_cast<std::uint64_t>(vp.size_of(p + 1))));
                note(x);
            }
        }

        // verdict per distinct chain; Oct values cached per (index, sub-signature)
        std::map<std::pair<Mask, std::vector<std::uint32_t>>, LogValue> octCache;
        std::vector<Mask> sysMasks = result.system.masks();
        auto subSignature = [&](const std::vector<int>& x, Mask a) {
            std::vector<std::uint32_t> sig;
            for (Mask m : sysMasks)
                if ((m & ~a) == 0) sig.push_back(classes.strong_id(m, classes.code_of(x, m)));
            return sig;
        };
        std::uint64_t failingWeight = 0;
        std::map<std::vector<std::uint32_t>, detail::ChainVerdict> verdicts;
        for (auto& [sig, xw] : groups) {
            const std::vector<int>& x = xw.first;
            detail::ChainVerdict v;
            std::optional<ThresholdSchedule> schedule;
            if (overrides.eta_by_level.empty()) {
                std::vector<std::pair<int, double>> deltas;
                for (Mask a : edgeIndices)
                    deltas.emplace_back(mask_size(a), classes.delta(a, x).to_double());
                schedule = threshold_schedule(epsilon, templateEdges, deltas, k);
            }
            for (Mask a : checkIndices) {
                int level = mask_size(a);
                auto key = std::make_pair(a, subSignature(x, a));
                auto it = octCache.find(key);
                if (it == octCache.end())
                    it = octCache.emplace(key, detail::eta_star_for(result.system, classes, x, a))
                             .first;
                LogValue etaStar = it->second;
                LogValue threshold;
                if (!overrides.eta_by_level.empty()) {
                    double eta = overrides.eta_by_level.size() == 1
                                     ? overrides.eta_by_level[0]
                                     : overrides.eta_by_level[static_cast<std::size_t>(level - 1)];
                    threshold = LogValue::from_value(eta);
                } else {
                    threshold = schedule->eta(level);
                }
                if (!(etaStar <= threshold)) {
                    v.pass = false;
                    if (v.min_fail_level == 0 || level < v.min_fail_level) {
                        v.min_fail_level = level;
                        v.failing_at_min.clear();
                    }
                    if (level == v.min_fail_level) v.failing_at_min.push_back(a);
                }
            }
            std::sort(v.failing_at_min.begin(), v.failing_at_min.end(), mask_lex_less);
            if (!v.pass) failingWeight += xw.second;
            verdicts.emplace(sig, std::move(v));
        }

        IterationRecord rec;
        rec.iteration = iter;
        rec.energies = energy_vector(result.system, classes);
        rec.failing_fraction = static_cast<double>(failingWeight) / static_cast<double>(measured);
        rec.distinct_chains = groups.size();
        result.failing_fraction = rec.failing_fraction;
        result.iterations = iter;

        if (rec.failing_fraction <= epsilon) {
            result.converged = true;
            result.trace.push_back(std::move(rec));
            break;
        }
        if (iter >= overrides.max_iters) {
            result.trace.push_back(std::move(rec));
            break;
        }

        // minimal failing level, then the lex-smallest failing index there
        int sStar = 0;
        for (const auto& [sig, v] : verdicts) {
            (void)sig;
            if (!v.pass && (sStar == 0 || v.min_fail_level < sStar)) sStar = v.min_fail_level;
        }
        Mask aStar = 0;
        for (const auto& [sig, v] : verdicts) {
            (void)sig;
            if (v.pass || v.min_fail_level != sStar) continue;
            for (Mask a : v.failing_at_min)
                if (aStar == 0 || mask_lex_less(a, aStar)) aStar = a;
        }
        rec.refined_index = aStar;
        rec.refined_level = sStar;
        rec.sigma_before = energy_at(result.system, classes, aStar);

        // one refinement per distinct failing slice chain at aStar
        std::map<std::vector<std::uint32_t>, std::vector<int>> failingClasses;
        for (const auto& [sig, xw] : groups) {
            const auto& v = verdicts.at(sig);
            if (v.pass || v.min_fail_level != sStar) continue;
            if (!std::binary_search(v.failing_at_min.begin(), v.failing_at_min.end(), aStar,
                                    mask_lex_less))
                continue;
            failingClasses.try_emplace(subSignature(xw.first, aStar), xw.first);
        }
        std::map<Mask, std::vector<std::vector<std::uint32_t>>> extrasByFace;
        std::uint64_t classIdx = 0;
        double minGain = HUGE_VAL;
        for (const auto& [subsig, x] : failingClasses) {
            (void)subsig;
            double etaActive;
            if (!overrides.eta_by_level.empty()) {
                etaActive = overrides.eta_by_level.size() == 1
                                ? overrides.eta_by_level[0]
                                : overrides.eta_by_level[static_cast<std::size_t>(sStar - 1)];
            } else {
                std::vector<std::pair<int, double>> deltas;
                for (Mask a : edgeIndices)
                    deltas.emplace_back(mask_size(a), classes.delta(a, x).to_double());
                ThresholdSchedule sch = threshold_schedule(epsilon, templateEdges, deltas, k);
                etaActive = std::max(sch.eta(sStar).to_double(), 5e-324);
            }
            // the chain verdict compares against the full subset product; the
            // refinement step compares against proper subsets only, so the
            // threshold converts by the slice's own delta_A^{2^s} factor
            double deltaA = classes.delta(aStar, x).to_double();
            etaActive = std::max(etaActive * std::pow(deltaA, static_cast<double>(1u << sStar)),
                                 5e-324);
            RefinementOptions ropt;
            ropt.retry_budget = overrides.retry_budget;
            ropt.r_cap = overrides.r_cap;
            std::uint64_t subSeed = Rng(overrides.seed)
                                        .fork(0xabcdu + static_cast<std::uint64_t>(iter))
                                        .fork(classIdx)
                                        .next_u64();
            try {
                RefinementOutcome ro = refinement_step(result.system, classes, x, aStar, etaActive,
                                                       overrides.r, subSeed, ropt);
                if (ro.accepted) {
                    rec.refinements_accepted++;
                    minGain = std::min(minGain, ro.gain.to_double());
                }
                for (auto& [fm, extra] : ro.face_extras)
                    extrasByFace[fm].push_back(std::move(extra));
            } catch (const PreconditionNotViolated&) {
                // another class's slice failed here but this one is fine
            }
            ++classIdx;
        }
        rec.classes_refined = classIdx;
        rec.min_accepted_gain = rec.refinements_accepted > 0 ? minGain : 0.0;

        for (auto& [fm, extras] : extrasByFace) {
            std::vector<const std::vector<std::uint32_t>*> ptrs;
            for (const auto& e : extras) ptrs.push_back(&e);
            result.system.refine(fm, ptrs);
        }
        {
            ClassDecomposition after(result.system);
            rec.sigma_after = energy_at(result.system, after, aStar);
        }
        result.trace.push_back(std::move(rec));
        (void)seedStream;
    }
    return result;
}

}  // namespace hyreg
