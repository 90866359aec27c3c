#pragma once

// Partition systems over the complete hypergraphs K(A), strong and weak
// equivalence, induced chain decompositions, and mean-square-density energy.

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "hyreg/chain.hpp"
#include "hyreg/core.hpp"
#include "hyreg/rational.hpp"
#include "hyreg/rng.hpp"

namespace hyreg {

// A cell labeling of every K(A), |A| <= k. Tuples are coded by TupleSpace in
// row-major (little-endian part) order.
class PartitionSystem {
public:
    PartitionSystem() = default;

    static PartitionSystem trivial(const VertexPartition& partition, int k) {
        PartitionSystem s;
        s.init(partition, k);
        for (Mask a : s.masks()) {
            s.labels_[a].assign(s.spaces_[a].total, 0);
            s.cells_[a] = 1;
        }
        return s;
    }

    // The removal pipeline's starting system: the top level splits into
    // H(A) and its complement, everything below is trivial.
    static PartitionSystem top_split(const Chain& H) {
        PartitionSystem s = trivial(H.partition(), H.uniformity());
        for (Mask a : s.masks()) {
            if (mask_size(a) != H.uniformity()) continue;
            auto& lab = s.labels_[a];
            H.slice(a).for_each([&](std::uint64_t c) { lab[c] = 1; });
            s.cells_[a] = 2;
        }
        return s;
    }

    void init(const VertexPartition& partition, int k) {
        partition.validate();
        if (k < 1) throw std::invalid_argument("partition system: k must be >= 1");
        partition_ = partition;
        k_ = k;
        Mask full = (Mask{1} << partition.part_count()) - 1;
        spaces_.resize(static_cast<std::size_t>(full) + 1);
        labels_.resize(static_cast<std::size_t>(full) + 1);
        cells_.assign(static_cast<std::size_t>(full) + 1, 0);
        for (Mask a = 1; a <= full; ++a) {
            if (mask_size(a) > k) continue;
            spaces_[a] = TupleSpace(a, partition);
            labels_[a].assign(spaces_[a].total, 0);
            cells_[a] = 1;
        }
    }

    const VertexPartition& partition() const { return partition_; }
    int uniformity() const { return k_; }
    const TupleSpace& space(Mask a) const { return spaces_[a]; }

    std::vector<Mask> masks() const {
        std::vector<Mask> out;
        Mask full = (Mask{1} << partition_.part_count()) - 1;
        for (Mask a = 1; a <= full; ++a)
            if (mask_size(a) <= k_) out.push_back(a);
        std::sort(out.begin(), out.end(), [](Mask x, Mask y) {
            if (mask_size(x) != mask_size(y)) return mask_size(x) < mask_size(y);
            return mask_lex_less(x, y);
        });
        return out;
    }

    std::uint32_t label(Mask a, std::uint64_t code) const { return labels_[a][code]; }
    std::uint32_t cell_count(Mask a) const { return cells_[a]; }
    const std::vector<std::uint32_t>& labels(Mask a) const { return labels_[a]; }

    void set_partition(Mask a, std::vector<std::uint32_t> labels, std::uint32_t cells) {
        if (labels.size() != spaces_[a].total)
            throw std::invalid_argument("partition system: label table size mismatch");
        for (std::uint32_t l : labels)
            if (l >= cells) throw std::invalid_argument("partition system: label out of range");
        labels_[a] = std::move(labels);
        cells_[a] = cells;
    }

    // Common refinement at one index: tuples are split further by the extra
    // labelings; ids are renumbered compactly in first-seen order.
    void refine(Mask a, const std::vector<const std::vector<std::uint32_t>*>& extras) {
        if (extras.empty()) return;
        auto& lab = labels_[a];
        std::unordered_map<std::uint64_t, std::uint32_t> renumber;
        std::vector<std::uint32_t> fresh(lab.size());
        std::uint64_t height = cells_[a];
        std::vector<std::uint64_t> extraHeights(extras.size());
        for (std::size_t e = 0; e < extras.size(); ++e) {
            std::uint32_t mx = 0;
            for (std::uint32_t v : *extras[e]) mx = std::max(mx, v);
            extraHeights[e] = static_cast<std::uint64_t>(mx) + 1;
        }
        for (std::size_t c = 0; c < lab.size(); ++c) {
            std::uint64_t key = lab[c];
            std::uint64_t mult = height;
            for (std::size_t e = 0; e < extras.size(); ++e) {
                key += static_cast<std::uint64_t>((*extras[e])[c]) * mult;
                mult *= extraHeights[e];
            }
            auto [it, inserted] = renumber.try_emplace(key, static_cast<std::uint32_t>(renumber.size()));
            fresh[c] = it->second;
        }
        lab = std::move(fresh);
        cells_[a] = static_cast<std::uint32_t>(renumber.size());
    }

    bool operator==(const PartitionSystem& o) const {
        return partition_ == o.partition_ && k_ == o.k_ && labels_ == o.labels_ &&
               cells_ == o.cells_;
    }

private:
    VertexPartition partition_;
    int k_ = 0;
    std::vector<TupleSpace> spaces_;
    std::vector<std::vector<std::uint32_t>> labels_;
    std::vector<std::uint32_t> cells_;
};

// Strong and weak equivalence classes of every K(A) under a system.
//
// A tuple's weak class is determined by the strong classes of its
// (|A|-1)-faces; its strong class adds the tuple's own cell label. Classes
// are computed level by level, so delta_{A,x} and the induced chains read
// off in O(1) per tuple.
class ClassDecomposition {
public:
    explicit ClassDecomposition(const PartitionSystem& system) : system_(&system) {
        Mask full = (Mask{1} << system.partition().part_count()) - 1;
        strongId_.resize(static_cast<std::size_t>(full) + 1);
        weakId_.resize(static_cast<std::size_t>(full) + 1);
        strongSize_.resize(static_cast<std::size_t>(full) + 1);
        weakSize_.resize(static_cast<std::size_t>(full) + 1);
        weakOfStrong_.resize(static_cast<std::size_t>(full) + 1);
        for (Mask a : system.masks()) build_mask(a);
    }

    const PartitionSystem& system() const { return *system_; }

    std::uint32_t strong_id(Mask a, std::uint64_t code) const { return strongId_[a][code]; }
    std::uint32_t weak_id(Mask a, std::uint64_t code) const { return weakId_[a][code]; }
    std::uint64_t strong_size(Mask a, std::uint32_t id) const { return strongSize_[a][id]; }
    std::uint64_t weak_size(Mask a, std::uint32_t id) const { return weakSize_[a][id]; }
    std::uint32_t weak_of_strong(Mask a, std::uint32_t id) const { return weakOfStrong_[a][id]; }
    std::uint32_t strong_class_count(Mask a) const {
        return static_cast<std::uint32_t>(strongSize_[a].size());
    }
    std::uint32_t weak_class_count(Mask a) const {
        return static_cast<std::uint32_t>(weakSize_[a].size());
    }
    const std::vector<std::uint32_t>& strong_ids(Mask a) const { return strongId_[a]; }
    const std::vector<std::uint32_t>& weak_ids(Mask a) const { return weakId_[a]; }

    // Sub-tuple code of x on mask a.
    std::uint64_t code_of(const std::vector<int>& x, Mask a) const {
        const TupleSpace& sp = system_->space(a);
        std::uint64_t code = 0;
        for (std::size_t i = 0; i < sp.parts.size(); ++i)
            code += static_cast<std::uint64_t>(x[static_cast<std::size_t>(sp.parts[i] - 1)]) *
                    sp.strides[i];
        return code;
    }

    // delta_{A,x}: relative density of x's strong class inside its weak class.
    Rational delta(Mask a, const std::vector<int>& x) const {
        std::uint64_t code = code_of(x, a);
        std::uint32_t s = strongId_[a][code];
        return Rational(static_cast<std::int64_t>(strongSize_[a][s]),
                        static_cast<std::int64_t>(weakSize_[a][weakOfStrong_[a][s]]));
    }

    Rational delta_of_strong(Mask a, std::uint32_t strongId) const {
        return Rational(static_cast<std::int64_t>(strongSize_[a][strongId]),
                        static_cast<std::int64_t>(weakSize_[a][weakOfStrong_[a][strongId]]));
    }

    // The chain H(x): at every index, the tuples strongly equivalent to x(A).
    Chain induced_chain(const std::vector<int>& x) const {
        ChainBuilder b(system_->partition(), system_->uniformity());
        for (Mask a : system_->masks()) {
            std::uint32_t target = strongId_[a][code_of(x, a)];
            const auto& ids = strongId_[a];
            for (std::uint64_t c = 0; c < ids.size(); ++c)
                if (ids[c] == target) b.insert_code(a, c);
        }
        return std::move(b).build(false);
    }

    // Full signature of x: the strong class at every index. Equal signatures
    // give the identical chain H(x).
    std::vector<std::uint32_t> signature(const std::vector<int>& x) const {
        std::vector<std::uint32_t> sig;
        for (Mask a : system_->masks()) sig.push_back(strongId_[a][code_of(x, a)]);
        return sig;
    }

private:
    const PartitionSystem* system_;
    std::vector<std::vector<std::uint32_t>> strongId_, weakId_;
    std::vector<std::vector<std::uint64_t>> strongSize_, weakSize_;
    std::vector<std::vector<std::uint32_t>> weakOfStrong_;

    void build_mask(Mask a) {
        const TupleSpace& sp = system_->space(a);
        std::uint64_t total = sp.total;
        std::vector<std::uint32_t>& strong = strongId_[a];
        std::vector<std::uint32_t>& weak = weakId_[a];
        strong.assign(total, 0);
        weak.assign(total, 0);
        int s = mask_size(a);
        if (s == 1) {
            weakSize_[a] = {total};
            std::unordered_map<std::uint32_t, std::uint32_t> ids;
            for (std::uint64_t c = 0; c < total; ++c) {
                std::uint32_t lab = system_->label(a, c);
                auto [it, inserted] = ids.try_emplace(lab, static_cast<std::uint32_t>(ids.size()));
                strong[c] = it->second;
            }
            strongSize_[a].assign(ids.size(), 0);
            weakOfStrong_[a].assign(ids.size(), 0);
            for (std::uint64_t c = 0; c < total; ++c) strongSize_[a][strong[c]]++;
            return;
        }
        // weak id from the strong ids of the (s-1)-faces
        std::vector<Mask> faces;
        std::vector<const TupleSpace*> faceSpaces;
        for (int p : sp.parts) {
            Mask f = a & ~mask_of_part(p);
            faces.push_back(f);
            faceSpaces.push_back(&system_->space(f));
        }
        std::vector<std::uint64_t> faceKey(faces.size());
        std::map<std::vector<std::uint64_t>, std::uint32_t> weakExact;
        for (std::uint64_t c = 0; c < total; ++c) {
            for (std::size_t i = 0; i < faces.size(); ++i)
                faceKey[i] = strongId_[faces[i]][sp.project(c, *faceSpaces[i])];
            auto [it, inserted] =
                weakExact.try_emplace(faceKey, static_cast<std::uint32_t>(weakExact.size()));
            weak[c] = it->second;
        }
        weakSize_[a].assign(weakExact.size(), 0);
        for (std::uint64_t c = 0; c < total; ++c) weakSize_[a][weak[c]]++;
        // strong id = (weak id, own label)
        std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> strongIds;
        for (std::uint64_t c = 0; c < total; ++c) {
            auto key = std::make_pair(weak[c], system_->label(a, c));
            auto [it, inserted] =
                strongIds.try_emplace(key, static_cast<std::uint32_t>(strongIds.size()));
            strong[c] = it->second;
        }
        strongSize_[a].assign(strongIds.size(), 0);
        weakOfStrong_[a].assign(strongIds.size(), 0);
        for (std::uint64_t c = 0; c < total; ++c) {
            strongSize_[a][strong[c]]++;
            weakOfStrong_[a][strong[c]] = weak[c];
        }
    }
};

// Mean-square density of partition P with respect to partition Q over a
// common ground set: sum_{i,j} |X_i cap Y_j|^2 / (|U| |Y_j|), empty Y_j
// skipped. Exact rational.
inline Rational mean_square_density(const std::vector<std::uint32_t>& p, std::uint32_t pCells,
                                    const std::vector<std::uint32_t>& q, std::uint32_t qCells) {
    if (p.size() != q.size())
        throw std::invalid_argument("mean-square density: mismatched ground sets");
    if (p.empty()) throw std::invalid_argument("mean-square density: empty ground set");
    std::vector<std::uint64_t> qSize(qCells, 0);
    std::unordered_map<std::uint64_t, std::uint64_t> inter;
    for (std::size_t u = 0; u < p.size(); ++u) {
        qSize[q[u]]++;
        inter[static_cast<std::uint64_t>(q[u]) * pCells + p[u]]++;
    }
    BigInt n(static_cast<std::int64_t>(p.size()));
    RationalSum sum;
    for (const auto& [key, cnt] : inter) {
        std::uint64_t j = key / pCells;
        BigInt c(static_cast<std::int64_t>(cnt));
        sum.add(c * c, n * BigInt(static_cast<std::int64_t>(qSize[j])));
    }
    return sum.value();
}

// sigma_A: mean-square density of P(A) with respect to the weak equivalence
// classes of K(A).
inline Rational energy_at(const PartitionSystem& system, const ClassDecomposition& classes,
                          Mask a) {
    const TupleSpace& sp = system.space(a);
    BigInt n(static_cast<std::int64_t>(sp.total));
    RationalSum sum;
    std::uint32_t strongCount = classes.strong_class_count(a);
    for (std::uint32_t s = 0; s < strongCount; ++s) {
        std::uint64_t sz = classes.strong_size(a, s);
        if (sz == 0) continue;
        BigInt c(static_cast<std::int64_t>(sz));
        std::uint64_t w = classes.weak_size(a, classes.weak_of_strong(a, s));
        sum.add(c * c, n * BigInt(static_cast<std::int64_t>(w)));
    }
    return sum.value();
}

struct EnergyVector {
    std::vector<std::pair<Mask, Rational>> sigma;  // index -> sigma_A, mask-sorted

    const Rational& at(Mask a) const {
        for (const auto& [m, v] : sigma)
            if (m == a) return v;
        throw std::invalid_argument("energy vector: unknown index");
    }
};

inline EnergyVector energy_vector(const PartitionSystem& system,
                                  const ClassDecomposition& classes) {
    EnergyVector ev;
    for (Mask a : system.masks()) ev.sigma.emplace_back(a, energy_at(system, classes, a));
    return ev;
}

inline EnergyVector energy_vector(const PartitionSystem& system) {
    ClassDecomposition classes(system);
    return energy_vector(system, classes);
}

struct DecompositionCheck {
    bool exhaustive = false;
    std::uint64_t tuples_checked = 0;
    std::uint64_t distinct_chains = 0;
    std::uint64_t compatibility_failures = 0;
    std::uint64_t uniqueness_failures = 0;
    bool pass() const { return compatibility_failures == 0 && uniqueness_failures == 0; }
};

// Verifies that the chains H(x) decompose the complete chain: slices pairwise
// equal-or-disjoint, and each x covered by exactly one chain. Failures would
// indicate an implementation bug; they are reported, not thrown.
inline DecompositionCheck decomposition_check(const PartitionSystem& system, bool exhaustive,
                                              std::uint64_t sampleCount = 2000,
                                              std::uint64_t seed = 1) {
    ClassDecomposition classes(system);
    const VertexPartition& vp = system.partition();
    int r = vp.part_count();
    std::uint64_t universe = 1;
    for (int p = 1; p <= r; ++p) universe *= static_cast<std::uint64_t>(vp.size_of(p));

    DecompositionCheck out;
    out.exhaustive = exhaustive;
    std::vector<std::vector<int>> xs;
    if (exhaustive) {
        std::vector<int> x(static_cast<std::size_t>(r), 0);
        for (std::uint64_t i = 0; i < universe; ++i) {
            std::uint64_t rest = i;
            for (int p = 0; p < r; ++p) {
                x[static_cast<std::size_t>(p)] = static_cast<int>(
                    rest % static_cast<std::uint64_t>(vp.size_of(p + 1)));
                rest /= static_cast<std::uint64_t>(vp.size_of(p + 1));
            }
            xs.push_back(x);
        }
    } else {
        Rng rng(seed);
        for (std::uint64_t i = 0; i < sampleCount; ++i) {
            std::vector<int> x(static_cast<std::size_t>(r));
            for (int p = 0; p < r; ++p)
                x[static_cast<std::size_t>(p)] =
                    static_cast<int>(rng.below(static_cast<std::uint64_t>(vp.size_of(p + 1))));
            xs.push_back(std::move(x));
        }
    }
    out.tuples_checked = xs.size();

    std::map<std::vector<std::uint32_t>, std::vector<int>> bySig;
    for (const auto& x : xs) bySig.try_emplace(classes.signature(x), x);
    out.distinct_chains = bySig.size();

    std::vector<Chain> chains;
    chains.reserve(bySig.size());
    for (const auto& [sig, x] : bySig) {
        (void)sig;
        chains.push_back(classes.induced_chain(x));
    }
    // pairwise compatibility: every index slice equal or disjoint
    for (std::size_t i = 0; i < chains.size(); ++i) {
        for (std::size_t j = i + 1; j < chains.size(); ++j) {
            for (Mask a : system.masks()) {
                auto ci = chains[i].slice(a).codes();
                auto cj = chains[j].slice(a).codes();
                if (ci == cj) continue;
                std::vector<std::uint64_t> common;
                std::set_intersection(ci.begin(), ci.end(), cj.begin(), cj.end(),
                                      std::back_inserter(common));
                if (!common.empty()) out.compatibility_failures++;
            }
        }
    }
    // uniqueness: exactly one chain contains every subset of x
    for (const auto& x : xs) {
        std::uint64_t containing = 0;
        for (const Chain& c : chains) {
            bool all = true;
            for (Mask a : system.masks()) {
                if (!c.contains(a, classes.code_of(x, a))) { all = false; break; }
            }
            if (all) ++containing;
        }
        if (containing != 1) out.uniqueness_failures++;
    }
    return out;
}

}  // namespace hyreg
