#pragma once

// Down-closed r-partite chains: per-index membership tables over index-A
// tuples, slices H(A), stars H_*(A), and exact relative densities.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "hyreg/core.hpp"
#include "hyreg/rational.hpp"

namespace hyreg {

// Membership table over the tuples of one index. Dense bitset when the tuple
// space is small, sorted code list otherwise; Oct and hom counting are
// enumeration-bound, so membership must stay O(1)/O(log).
class EdgeTable {
public:
    static constexpr std::uint64_t kDenseBitLimit = 1ull << 26;

    EdgeTable() = default;
    explicit EdgeTable(std::uint64_t universe) : universe_(universe) {
        dense_ = universe_ <= kDenseBitLimit;
        if (dense_) bits_.assign((universe_ + 63) / 64, 0);
    }

    std::uint64_t universe() const { return universe_; }
    std::uint64_t count() const { return count_; }
    bool dense() const { return dense_; }

    void insert(std::uint64_t code) {
        if (dense_) {
            std::uint64_t& w = bits_[code >> 6];
            std::uint64_t bit = 1ull << (code & 63);
            if (!(w & bit)) { w |= bit; ++count_; }
        } else {
            codes_.push_back(code);  // dedup on freeze
        }
    }

    void freeze() {
        if (!dense_) {
            std::sort(codes_.begin(), codes_.end());
            codes_.erase(std::unique(codes_.begin(), codes_.end()), codes_.end());
            count_ = codes_.size();
        }
        frozen_ = true;
    }

    bool contains(std::uint64_t code) const {
        if (dense_) return (bits_[code >> 6] >> (code & 63)) & 1ull;
        return std::binary_search(codes_.begin(), codes_.end(), code);
    }

    // Visits member codes in ascending order.
    template <typename F>
    void for_each(F&& fn) const {
        if (dense_) {
            for (std::uint64_t w = 0; w < bits_.size(); ++w) {
                std::uint64_t word = bits_[w];
                while (word != 0) {
                    int b = __builtin_ctzll(word);
                    fn((w << 6) | static_cast<std::uint64_t>(b));
                    word &= word - 1;
                }
            }
        } else {
            for (std::uint64_t c : codes_) fn(c);
        }
    }

    std::vector<std::uint64_t> codes() const {
        std::vector<std::uint64_t> out;
        out.reserve(count_);
        for_each([&](std::uint64_t c) { out.push_back(c); });
        return out;
    }

    bool frozen() const { return frozen_; }

private:
    std::uint64_t universe_ = 0;
    bool dense_ = true;
    bool frozen_ = false;
    std::uint64_t count_ = 0;
    std::vector<std::uint64_t> bits_;
    std::vector<std::uint64_t> codes_;
};

// Immutable after construction; all queries are const and concurrency-safe.
// The empty edge is an implicit member of every chain.
class Chain {
public:
    Chain() = default;

    const VertexPartition& partition() const { return partition_; }
    int part_count() const { return partition_.part_count(); }
    int uniformity() const { return k_; }

    const TupleSpace& space(Mask a) const { return spaces_[a]; }

    // H(A): edges of index A.
    const EdgeTable& slice(Mask a) const {
        check_index(a);
        return slices_[a];
    }

    // H_*(A): index-A tuples whose every (|A|-1)-subset is an edge.
    // For |A| = 1 this is the whole part.
    const EdgeTable& star(Mask a) const {
        check_index(a);
        return stars_[a];
    }

    bool contains(Mask a, std::uint64_t code) const {
        if (a == 0) return true;
        if (mask_size(a) > k_) return false;
        return slices_[a].contains(code);
    }

    bool contains_edge(const Edge& e) const {
        if (e.empty()) return true;
        Mask a = e.index();
        if (mask_size(a) > k_) return false;
        return slices_[a].contains(spaces_[a].from_edge(e));
    }

    // delta_A = |H(A)| / |H_*(A)| as an exact rational.
    Rational relative_density(Mask a) const {
        if (a == 0) return Rational(1);
        check_index(a);
        std::uint64_t st = stars_[a].count();
        if (st == 0) throw EmptyStarError(a);
        return Rational(static_cast<std::int64_t>(slices_[a].count()),
                        static_cast<std::int64_t>(st));
    }

    // All nonempty index sets of size <= k over this partition.
    std::vector<Mask> all_indices() const {
        std::vector<Mask> out;
        Mask full = (Mask{1} << part_count()) - 1;
        for (Mask m = 1; m <= full; ++m)
            if (mask_size(m) <= k_) out.push_back(m);
        std::sort(out.begin(), out.end(), [](Mask x, Mask y) {
            if (mask_size(x) != mask_size(y)) return mask_size(x) < mask_size(y);
            return mask_lex_less(x, y);
        });
        return out;
    }

    // Number of edges including the implicit empty edge.
    std::uint64_t edge_count() const { return edge_count_; }

    std::vector<Edge> edges() const {
        std::vector<Edge> out;
        for (Mask a : all_indices()) {
            const TupleSpace& sp = spaces_[a];
            slices_[a].for_each([&](std::uint64_t c) { out.push_back(sp.to_edge(c)); });
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    // Edges not strictly contained in another stored edge.
    std::vector<Edge> maximal_edges() const {
        std::vector<Edge> out;
        for (Mask a : all_indices()) {
            const TupleSpace& sp = spaces_[a];
            slices_[a].for_each([&](std::uint64_t c) {
                Edge e = sp.to_edge(c);
                for (int p = 1; p <= part_count(); ++p) {
                    if (mask_contains(a, p)) continue;
                    Mask sup = a | mask_of_part(p);
                    if (mask_size(sup) > k_) continue;
                    for (int v = 0; v < partition_.size_of(p); ++v) {
                        Edge bigger = e;
                        auto it = bigger.vertices.begin();
                        while (it != bigger.vertices.end() && it->first < p) ++it;
                        bigger.vertices.insert(it, {p, v});
                        if (contains_edge(bigger)) return;
                    }
                }
                out.push_back(std::move(e));
            });
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    bool is_down_closed() const {
        for (Mask a : all_indices()) {
            if (mask_size(a) < 2) continue;
            const TupleSpace& sp = spaces_[a];
            bool ok = true;
            slices_[a].for_each([&](std::uint64_t c) {
                if (!ok) return;
                for (int p : sp.parts) {
                    Mask sub = a & ~mask_of_part(p);
                    if (!slices_[sub].contains(sp.project(c, spaces_[sub]))) { ok = false; return; }
                }
            });
            if (!ok) return false;
        }
        return true;
    }

    static Chain complete(const VertexPartition& partition, int k);

private:
    friend class ChainBuilder;
    VertexPartition partition_;
    int k_ = 0;
    std::vector<TupleSpace> spaces_;
    std::vector<EdgeTable> slices_;
    std::vector<EdgeTable> stars_;
    std::uint64_t edge_count_ = 0;

    void check_index(Mask a) const {
        if (a == 0 || a >= static_cast<Mask>(spaces_.size()) || mask_size(a) > k_)
            throw std::invalid_argument("chain: index out of range (|A| must be in [1,k])");
    }

    void compute_stars() {
        for (Mask a = 1; a < static_cast<Mask>(spaces_.size()); ++a) {
            int s = mask_size(a);
            if (s > k_) continue;
            const TupleSpace& sp = spaces_[a];
            EdgeTable star(sp.total);
            if (s == 1) {
                for (std::uint64_t c = 0; c < sp.total; ++c) star.insert(c);
            } else {
                std::vector<const TupleSpace*> subSpaces;
                std::vector<const EdgeTable*> subSlices;
                std::vector<Mask> subs;
                for (int p : sp.parts) subs.push_back(a & ~mask_of_part(p));
                for (Mask sub : subs) {
                    subSpaces.push_back(&spaces_[sub]);
                    subSlices.push_back(&slices_[sub]);
                }
                for (std::uint64_t c = 0; c < sp.total; ++c) {
                    bool ok = true;
                    for (std::size_t i = 0; i < subs.size() && ok; ++i)
                        ok = subSlices[i]->contains(sp.project(c, *subSpaces[i]));
                    if (ok) star.insert(c);
                }
            }
            star.freeze();
            stars_[a] = std::move(star);
        }
    }

    void count_edges() {
        edge_count_ = 1;  // the empty edge
        for (Mask a = 1; a < static_cast<Mask>(spaces_.size()); ++a)
            if (mask_size(a) <= k_) edge_count_ += slices_[a].count();
    }
};

class ChainBuilder {
public:
    ChainBuilder(const VertexPartition& partition, int k) {
        partition.validate();
        if (k < 1) throw std::invalid_argument("chain: uniformity must be >= 1");
        chain_.partition_ = partition;
        chain_.k_ = k;
        Mask full = (Mask{1} << partition.part_count()) - 1;
        chain_.spaces_.resize(static_cast<std::size_t>(full) + 1);
        chain_.slices_.resize(static_cast<std::size_t>(full) + 1);
        chain_.stars_.resize(static_cast<std::size_t>(full) + 1);
        for (Mask a = 1; a <= full; ++a) {
            if (mask_size(a) > k) continue;
            chain_.spaces_[a] = TupleSpace(a, partition);
            chain_.slices_[a] = EdgeTable(chain_.spaces_[a].total);
        }
    }

    void insert_code(Mask a, std::uint64_t code) {
        if (a == 0) return;
        if (mask_size(a) > chain_.k_)
            throw std::invalid_argument("chain: edge larger than uniformity");
        chain_.slices_[a].insert(code);
    }

    // Inserts the edge together with its full power set.
    void insert_closed(const Edge& e) {
        e.validate(chain_.partition_);
        if (e.size() > chain_.k_)
            throw std::invalid_argument("chain: edge larger than uniformity");
        Mask a = e.index();
        if (a == 0) return;
        std::uint64_t code = chain_.spaces_[a].from_edge(e);
        for_each_submask(a, [&](Mask c) {
            chain_.slices_[c].insert(chain_.spaces_[a].project(code, chain_.spaces_[c]));
        });
    }

    void insert_as_listed(const Edge& e) {
        e.validate(chain_.partition_);
        if (e.empty()) return;
        Mask a = e.index();
        insert_code(a, chain_.spaces_[a].from_edge(e));
    }

    // validate=true rejects a non-down-closed edge set instead of closing it.
    Chain build(bool validate) && {
        for (Mask a = 1; a < static_cast<Mask>(chain_.slices_.size()); ++a)
            if (mask_size(a) <= chain_.k_) chain_.slices_[a].freeze();
        if (validate && !chain_.is_down_closed())
            throw std::invalid_argument("chain: edge set is not down-closed");
        chain_.compute_stars();
        chain_.count_edges();
        return std::move(chain_);
    }

private:
    Chain chain_;
};

inline Chain Chain::complete(const VertexPartition& partition, int k) {
    ChainBuilder b(partition, k);
    Mask full = (Mask{1} << partition.part_count()) - 1;
    for (Mask a = 1; a <= full; ++a) {
        if (mask_size(a) > k) continue;
        TupleSpace sp(a, partition);
        for (std::uint64_t c = 0; c < sp.total; ++c) b.insert_code(a, c);
    }
    return std::move(b).build(false);
}

// Minimal down-closed chain containing the given edges; idempotent.
inline Chain down_closure(const std::vector<Edge>& edges, const VertexPartition& partition, int k) {
    ChainBuilder b(partition, k);
    for (const Edge& e : edges) b.insert_closed(e);
    return std::move(b).build(false);
}

// Distinct indices carrying at least one edge, size-then-lex ordered.
inline std::vector<Mask> realized_indices(const Chain& chain) {
    std::vector<Mask> out;
    for (Mask a : chain.all_indices())
        if (chain.slice(a).count() > 0) out.push_back(a);
    return out;
}

// (H(A), H_*(A)) membership; see Chain::slice / Chain::star for the tables.
inline std::pair<std::vector<Edge>, std::vector<Edge>> slice_and_star(const Chain& chain, Mask a) {
    const TupleSpace& sp = chain.space(a);
    std::vector<Edge> h, hs;
    chain.slice(a).for_each([&](std::uint64_t c) { h.push_back(sp.to_edge(c)); });
    chain.star(a).for_each([&](std::uint64_t c) { hs.push_back(sp.to_edge(c)); });
    return {std::move(h), std::move(hs)};
}

}  // namespace hyreg
