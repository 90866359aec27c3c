#pragma once

// The removal pipeline: regularize the top-split partition system of a
// (k+1)-partite k-uniform chain, then prune top edges for the two causes the
// proof removes -- extendability to a non-quasirandom chain H(x), and a slice
// density below gamma / m_C -- and count the surviving simplices.

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "hyreg/chain.hpp"
#include "hyreg/homomorphism.hpp"
#include "hyreg/partition_system.hpp"
#include "hyreg/regularize.hpp"

namespace hyreg {

struct RemovalReport {
    double a = 0.0;
    double epsilon = 0.0;
    double gamma = 0.0;
    bool regularize_converged = false;
    int regularize_iterations = 0;
    double failing_fraction = 0.0;
    // per side i (1-based): edges removed for each cause
    std::vector<std::uint64_t> removed_quasirandom;
    std::vector<std::uint64_t> removed_density;
    std::vector<std::uint64_t> removed_total;  // union of the two causes
    std::vector<std::uint64_t> side_edge_count;
    unsigned long long surviving_simplices = 0;
    unsigned long long initial_simplices = 0;
    std::vector<IterationRecord> trace;  // the regularization trace behind the run
    // counting-lemma lower bound prod_j N_j prod_A delta_{A,x} for survivors
    std::vector<double> survivor_bounds;
    std::vector<std::vector<int>> survivor_examples;  // at most 8 listed
};

// The complete template [r]^{(<= k)}: one vertex per part, every index.
inline Chain complete_template(int r, int k) {
    std::vector<int> ones(static_cast<std::size_t>(r), 1);
    VertexPartition vp(ones);
    ChainBuilder b(vp, k);
    Mask full = (Mask{1} << r) - 1;
    for (Mask a = 1; a <= full; ++a) {
        if (mask_size(a) > k) continue;
        std::vector<std::pair<int, int>> vs;
        for (int p : mask_parts(a)) vs.emplace_back(p, 0);
        b.insert_closed(Edge(std::move(vs)));
    }
    return std::move(b).build(false);
}

inline RemovalReport removal_run(const Chain& H, double a,
                                 const RegularizeOverrides& overrides = {}) {
    if (!(a > 0.0) || a >= 1.0) throw std::invalid_argument("removal: a must lie in (0,1)");
    int k = H.uniformity();
    int r = H.part_count();
    if (r != k + 1) throw std::invalid_argument("removal: need a (k+1)-partite k-uniform chain");
    Mask full = (Mask{1} << r) - 1;
    std::uint64_t topTotal = 0;
    for (int i = 1; i <= r; ++i) topTotal += H.slice(full & ~mask_of_part(i)).count();
    if (topTotal == 0) throw std::invalid_argument("removal: top level is empty");

    RemovalReport rep;
    rep.a = a;
    Chain J = complete_template(r, k);
    rep.epsilon = std::min(1.0 / (2.0 * static_cast<double>(J.edge_count())), a / 2.0);
    double combos = 0.0;
    for (int i = 1; i <= k; ++i) {
        // C(k+1, i)
        double c = 1.0;
        for (int t = 0; t < i; ++t) c = c * (k + 1 - t) / (t + 1);
        combos += c;
    }
    rep.gamma = (a / 2.0) / combos;

    PartitionSystem initial = PartitionSystem::top_split(H);
    RegularizeResult reg = regularize(initial, J, rep.epsilon, overrides);
    rep.regularize_converged = reg.converged;
    rep.regularize_iterations = reg.iterations;
    rep.failing_fraction = reg.failing_fraction;
    rep.trace = reg.trace;

    const PartitionSystem& system = reg.system;
    ClassDecomposition classes(system);
    const VertexPartition& vp = H.partition();
    std::uint64_t universe = 1;
    for (int p = 1; p <= r; ++p) universe *= static_cast<std::uint64_t>(vp.size_of(p));

    // measured verdict per distinct chain, at the active thresholds
    std::vector<Mask> checkIndices;
    {
        Chain augmented = augment_with_double_octahedra(J, k);
        checkIndices = realized_indices(augmented);
    }
    std::vector<Mask> edgeIndices;
    for (const Edge& e : J.edges()) edgeIndices.push_back(e.index());
    Chain augmentedJ = augment_with_double_octahedra(J, k);
    std::uint64_t templateEdges = augmentedJ.edge_count();
    std::vector<Mask> augEdgeIndices;
    for (const Edge& e : augmentedJ.edges()) augEdgeIndices.push_back(e.index());

    struct Verdict {
        bool pass = true;
        Mask fail_index = 0;
    };
    std::map<std::vector<std::uint32_t>, Verdict> verdictCache;
    auto verdict_for = [&](const std::vector<int>& x) -> const Verdict& {
        auto sig = classes.signature(x);
        auto it = verdictCache.find(sig);
        if (it != verdictCache.end()) return it->second;
        Verdict v;
        std::optional<ThresholdSchedule> schedule;
        if (overrides.eta_by_level.empty()) {
            std::vector<std::pair<int, double>> deltas;
            for (Mask m : augEdgeIndices)
                deltas.emplace_back(mask_size(m), classes.delta(m, x).to_double());
            schedule = threshold_schedule(rep.epsilon, templateEdges, deltas, k);
        }
        for (Mask m : checkIndices) {
            int level = mask_size(m);
            LogValue etaStar = detail::eta_star_for(system, classes, x, m);
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
                if (v.fail_index == 0 || mask_size(m) < mask_size(v.fail_index) ||
                    (mask_size(m) == mask_size(v.fail_index) && mask_lex_less(m, v.fail_index)))
                    v.fail_index = m;
            }
        }
        return verdictCache.emplace(std::move(sig), v).first->second;
    };

    // removal cause 1: top edges extendable to x with non-quasirandom H(x)
    // removal cause 2: top edges extendable to x with delta_{C,x} < gamma/m_C
    std::vector<std::set<std::uint64_t>> removeQR(static_cast<std::size_t>(r) + 1);
    std::vector<std::set<std::uint64_t>> removeDen(static_cast<std::size_t>(r) + 1);
    Rational gammaR = Rational::from_double(rep.gamma);
    std::vector<int> x(static_cast<std::size_t>(r), 0);
    for (std::uint64_t i = 0; i < universe; ++i) {
        std::uint64_t rest = i;
        for (int p = 0; p < r; ++p) {
            x[static_cast<std::size_t>(p)] =
                static_cast<int>(rest % static_cast<std::uint64_t>(vp.size_of(p + 1)));
            rest /= static_cast<std::uint64_t>(vp.size_of(p + 1));
        }
        const Verdict& v = verdict_for(x);
        if (!v.pass) {
            int side = 0;
            for (int p = 1; p <= r; ++p)
                if (!mask_contains(v.fail_index, p)) { side = p; break; }
            Mask top = full & ~mask_of_part(side);
            std::uint64_t code = classes.code_of(x, top);
            if (H.slice(top).contains(code)) removeQR[static_cast<std::size_t>(side)].insert(code);
        }
        for (Mask c : edgeIndices) {
            Rational dcx = classes.delta(c, x);
            Rational bound = gammaR / Rational(static_cast<std::int64_t>(system.cell_count(c)));
            if (dcx < bound) {
                for (int p = 1; p <= r; ++p) {
                    if (mask_contains(c, p)) continue;
                    Mask top = full & ~mask_of_part(p);
                    std::uint64_t code = classes.code_of(x, top);
                    if (H.slice(top).contains(code))
                        removeDen[static_cast<std::size_t>(p)].insert(code);
                }
            }
        }
    }

    rep.removed_quasirandom.assign(static_cast<std::size_t>(r) + 1, 0);
    rep.removed_density.assign(static_cast<std::size_t>(r) + 1, 0);
    rep.removed_total.assign(static_cast<std::size_t>(r) + 1, 0);
    rep.side_edge_count.assign(static_cast<std::size_t>(r) + 1, 0);
    ChainBuilder pruned(vp, k);
    for (Mask m : H.all_indices()) {
        if (mask_size(m) == k && mask_size(full & ~m) == 1) {
            int side = mask_parts(full & ~m)[0];
            rep.side_edge_count[static_cast<std::size_t>(side)] = H.slice(m).count();
            const auto& qr = removeQR[static_cast<std::size_t>(side)];
            const auto& den = removeDen[static_cast<std::size_t>(side)];
            rep.removed_quasirandom[static_cast<std::size_t>(side)] = qr.size();
            rep.removed_density[static_cast<std::size_t>(side)] = den.size();
            std::uint64_t both = 0;
            H.slice(m).for_each([&](std::uint64_t code) {
                bool drop = qr.count(code) || den.count(code);
                if (drop) ++both;
                else pruned.insert_code(m, code);
            });
            rep.removed_total[static_cast<std::size_t>(side)] = both;
        } else {
            H.slice(m).for_each([&](std::uint64_t code) { pruned.insert_code(m, code); });
        }
    }
    Chain after = std::move(pruned).build(false);

    rep.initial_simplices = count_simplices(H);
    for_each_simplex(after, [&](const std::vector<int>& t) {
        rep.surviving_simplices++;
        if (rep.survivor_examples.size() < 8) {
            double bound = 1.0;
            for (int p = 1; p <= r; ++p) bound *= static_cast<double>(vp.size_of(p));
            for (Mask m : edgeIndices) bound *= classes.delta(m, t).to_double();
            rep.survivor_bounds.push_back(bound);
            rep.survivor_examples.push_back(t);
        }
    });
    return rep;
}

}  // namespace hyreg
