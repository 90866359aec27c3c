#pragma once

// r-partite vertex sets, partite edges, index sets, and the mixed-radix
// coding of index-A tuples that the whole library runs on.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hyreg {

// Index set over parts {1..r}, stored with bit i-1 for part i.
using Mask = std::uint32_t;

inline int mask_size(Mask m) { return __builtin_popcount(m); }

inline Mask mask_of_part(int part) { return Mask{1} << (part - 1); }

inline bool mask_contains(Mask m, int part) { return (m >> (part - 1)) & 1u; }

inline std::vector<int> mask_parts(Mask m) {
    std::vector<int> out;
    for (int i = 1; m != 0; ++i, m >>= 1)
        if (m & 1u) out.push_back(i);
    return out;
}

inline Mask mask_from_parts(const std::vector<int>& parts) {
    Mask m = 0;
    for (int p : parts) {
        if (p < 1 || p > 32) throw std::invalid_argument("index set: part out of range");
        m |= mask_of_part(p);
    }
    return m;
}

// Lexicographic order on the sorted part lists, e.g. {1,4} < {2,3}.
inline bool mask_lex_less(Mask a, Mask b) {
    while (a != 0 && b != 0) {
        int pa = __builtin_ctz(a), pb = __builtin_ctz(b);
        if (pa != pb) return pa < pb;
        a &= a - 1;
        b &= b - 1;
    }
    return a == 0 && b != 0;
}

inline std::string mask_to_string(Mask m) {
    std::string s = "{";
    bool first = true;
    for (int p : mask_parts(m)) {
        if (!first) s += ",";
        s += std::to_string(p);
        first = false;
    }
    return s + "}";
}

// Visits every nonempty submask of m (m itself included).
template <typename F>
inline void for_each_submask(Mask m, F&& fn) {
    for (Mask c = m; c != 0; c = (c - 1) & m) fn(c);
}

struct VertexPartition {
    std::vector<int> sizes;  // sizes[i-1] = N_i

    VertexPartition() = default;
    explicit VertexPartition(std::vector<int> s) : sizes(std::move(s)) { validate(); }

    int part_count() const { return static_cast<int>(sizes.size()); }
    int size_of(int part) const { return sizes[static_cast<std::size_t>(part - 1)]; }

    void validate() const {
        if (sizes.empty()) throw std::invalid_argument("vertex partition: r must be >= 1");
        if (sizes.size() > 20) throw std::invalid_argument("vertex partition: too many parts");
        for (int n : sizes)
            if (n < 1) throw std::invalid_argument("vertex partition: every part needs a vertex");
    }

    bool operator==(const VertexPartition& o) const { return sizes == o.sizes; }
};

// A partite edge: (part, vertex) pairs with strictly increasing parts.
struct Edge {
    std::vector<std::pair<int, int>> vertices;

    Edge() = default;
    Edge(std::initializer_list<std::pair<int, int>> vs) : vertices(vs) {}
    explicit Edge(std::vector<std::pair<int, int>> vs) : vertices(std::move(vs)) {}

    int size() const { return static_cast<int>(vertices.size()); }
    bool empty() const { return vertices.empty(); }

    Mask index() const {
        Mask m = 0;
        for (const auto& [p, v] : vertices) {
            (void)v;
            m |= mask_of_part(p);
        }
        return m;
    }

    void validate(const VertexPartition& partition) const {
        int prev = 0;
        for (const auto& [p, v] : vertices) {
            if (p <= prev)
                throw std::invalid_argument("edge: parts must be strictly increasing");
            if (p > partition.part_count())
                throw std::invalid_argument("edge: part out of range");
            if (v < 0 || v >= partition.size_of(p))
                throw std::invalid_argument("edge: vertex id out of range");
            prev = p;
        }
    }

    bool operator==(const Edge& o) const { return vertices == o.vertices; }
    bool operator<(const Edge& o) const { return vertices < o.vertices; }
};

inline Mask index_of(const Edge& e) { return e.index(); }

// Mixed-radix coding of index-A tuples, little-endian in part order.
struct TupleSpace {
    Mask mask = 0;
    std::vector<int> parts;       // ascending
    std::vector<int> sizes;       // per coordinate
    std::vector<std::uint64_t> strides;
    std::uint64_t total = 1;

    TupleSpace() = default;
    TupleSpace(Mask m, const VertexPartition& partition) : mask(m) {
        parts = mask_parts(m);
        strides.resize(parts.size());
        sizes.resize(parts.size());
        for (std::size_t i = 0; i < parts.size(); ++i) {
            strides[i] = total;
            sizes[i] = partition.size_of(parts[i]);
            total *= static_cast<std::uint64_t>(sizes[i]);
        }
    }

    int arity() const { return static_cast<int>(parts.size()); }

    std::uint64_t encode(const std::vector<int>& coords) const {
        std::uint64_t code = 0;
        for (std::size_t i = 0; i < coords.size(); ++i)
            code += static_cast<std::uint64_t>(coords[i]) * strides[i];
        return code;
    }

    std::vector<int> decode(std::uint64_t code) const {
        std::vector<int> coords(parts.size());
        for (std::size_t i = 0; i < parts.size(); ++i) {
            coords[i] = static_cast<int>(code % static_cast<std::uint64_t>(sizes[i]));
            code /= static_cast<std::uint64_t>(sizes[i]);
        }
        return coords;
    }

    int coord_of(std::uint64_t code, std::size_t i) const {
        return static_cast<int>((code / strides[i]) % static_cast<std::uint64_t>(sizes[i]));
    }

    Edge to_edge(std::uint64_t code) const {
        std::vector<std::pair<int, int>> vs;
        vs.reserve(parts.size());
        for (std::size_t i = 0; i < parts.size(); ++i)
            vs.emplace_back(parts[i], coord_of(code, i));
        return Edge(std::move(vs));
    }

    std::uint64_t from_edge(const Edge& e) const {
        std::uint64_t code = 0;
        for (std::size_t i = 0; i < parts.size(); ++i)
            code += static_cast<std::uint64_t>(e.vertices[i].second) * strides[i];
        return code;
    }

    // Code of the sub-tuple of `code` living on submask `sub`, in the sub-space.
    std::uint64_t project(std::uint64_t code, const TupleSpace& sub) const {
        std::uint64_t out = 0;
        std::size_t j = 0;
        for (std::size_t i = 0; i < parts.size() && j < sub.parts.size(); ++i) {
            if (parts[i] == sub.parts[j]) {
                out += static_cast<std::uint64_t>(coord_of(code, i)) * sub.strides[j];
                ++j;
            }
        }
        return out;
    }
};

struct EmptyStarError : std::runtime_error {
    explicit EmptyStarError(Mask a)
        : std::runtime_error("empty star at index " + mask_to_string(a)), index(a) {}
    Mask index;
};

struct PreconditionNotViolated : std::runtime_error {
    explicit PreconditionNotViolated(const std::string& what) : std::runtime_error(what) {}
};

struct BudgetExceeded : std::runtime_error {
    explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hyreg
