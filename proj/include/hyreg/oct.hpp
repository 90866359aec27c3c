#pragma once

// Oct(f): the weighted count of combinatorial octahedra -- the expectation
// over doubled coordinates of the product of f over all 2^s corner choices.
//
// Two strategies: the O(N^{2s}) naive enumeration (the oracle) and the
// contraction strategy that pairs the first s-1 coordinates, averages the
// product over the last coordinate, then averages the square.

#include <cstdint>
#include <future>
#include <thread>
#include <vector>

#include "hyreg/core.hpp"
#include "hyreg/edge_function.hpp"
#include "hyreg/rational.hpp"

namespace hyreg {

enum class OctStrategy { naive, contraction };

// Naive Oct over doubles; deterministic summation order. For each choice of
// pairs (a_i, b_i) the product runs over all 2^s octahedron corners.
inline double oct_naive(const EdgeFunction& f) {
    const TupleSpace& sp = f.space();
    int s = sp.arity();
    if (s < 1) throw std::invalid_argument("oct: index of size zero");
    std::uint64_t corners = 1ull << s;
    std::vector<int> a(s, 0), b(s, 0);
    long double total = 0.0L;
    long double pairSpace = 1.0L;
    for (int i = 0; i < s; ++i) pairSpace *= static_cast<long double>(sp.sizes[i]) * sp.sizes[i];
    bool more = true;
    while (more) {
        double prod = 1.0;
        for (std::uint64_t eps = 0; eps < corners && prod != 0.0; ++eps) {
            std::uint64_t code = 0;
            for (int i = 0; i < s; ++i)
                code += static_cast<std::uint64_t>((eps >> i) & 1u ? b[i] : a[i]) * sp.strides[i];
            prod *= f[code];
        }
        total += prod;
        more = false;
        for (int i = 0; i < s; ++i) {
            if (++a[i] < sp.sizes[i]) { more = true; break; }
            a[i] = 0;
            if (++b[i] < sp.sizes[i]) { more = true; break; }
            b[i] = 0;
        }
    }
    return static_cast<double>(total / pairSpace);
}

// Exact-rational naive Oct, the oracle behind the scaling-law checks.
inline Rational oct_naive_exact(const ExactEdgeFunction& f) {
    const TupleSpace& sp = f.space();
    int s = sp.arity();
    if (s < 1) throw std::invalid_argument("oct: index of size zero");
    std::uint64_t corners = 1ull << s;
    std::vector<int> a(s, 0), b(s, 0);
    RationalSum total;
    BigInt pairSpace(1);
    for (int i = 0; i < s; ++i)
        pairSpace *= BigInt(static_cast<std::int64_t>(sp.sizes[i]) * sp.sizes[i]);
    bool more = true;
    while (more) {
        Rational prod(1);
        for (std::uint64_t eps = 0; eps < corners && !prod.is_zero(); ++eps) {
            std::uint64_t code = 0;
            for (int i = 0; i < s; ++i)
                code += static_cast<std::uint64_t>((eps >> i) & 1u ? b[i] : a[i]) * sp.strides[i];
            prod *= f[code];
        }
        if (!prod.is_zero()) total.add(prod);
        more = false;
        for (int i = 0; i < s; ++i) {
            if (++a[i] < sp.sizes[i]) { more = true; break; }
            a[i] = 0;
            if (++b[i] < sp.sizes[i]) { more = true; break; }
            b[i] = 0;
        }
    }
    return total.value() / Rational(pairSpace, BigInt(1));
}

namespace detail {

// One block of outer pair choices for the contraction strategy. The outer
// space enumerates pairs of the first s-1 coordinates; the inner average runs
// over the last coordinate.
inline long double oct_contraction_block(const EdgeFunction& f, std::uint64_t beg,
                                         std::uint64_t end) {
    const TupleSpace& sp = f.space();
    int s = sp.arity();
    int outer = s - 1;
    std::uint64_t innerN = static_cast<std::uint64_t>(sp.sizes[static_cast<std::size_t>(outer)]);
    std::uint64_t innerStride = sp.strides[static_cast<std::size_t>(outer)];
    std::uint64_t cornersOuter = outer == 0 ? 1 : (1ull << outer);
    long double acc = 0.0L;
    std::vector<std::uint64_t> base(cornersOuter);
    for (std::uint64_t idx = beg; idx < end; ++idx) {
        // decode idx into pairs (a_i, b_i) for i < outer
        std::uint64_t rest = idx;
        std::uint64_t aCode = 0, bCode = 0;
        for (int i = 0; i < outer; ++i) {
            std::uint64_t n = static_cast<std::uint64_t>(sp.sizes[i]);
            std::uint64_t ai = rest % n;
            rest /= n;
            std::uint64_t bi = rest % n;
            rest /= n;
            aCode += ai * sp.strides[i];
            bCode += bi * sp.strides[i];
        }
        for (std::uint64_t eps = 0; eps < cornersOuter; ++eps) {
            std::uint64_t code = 0;
            for (int i = 0; i < outer; ++i) {
                std::uint64_t n = static_cast<std::uint64_t>(sp.sizes[i]);
                std::uint64_t stride = sp.strides[i];
                std::uint64_t av = (aCode / stride) % n, bv = (bCode / stride) % n;
                code += ((eps >> i) & 1u ? bv : av) * stride;
            }
            base[eps] = code;
        }
        long double inner = 0.0L;
        for (std::uint64_t x = 0; x < innerN; ++x) {
            double prod = 1.0;
            std::uint64_t off = x * innerStride;
            for (std::uint64_t eps = 0; eps < cornersOuter && prod != 0.0; ++eps)
                prod *= f[base[eps] + off];
            inner += prod;
        }
        inner /= static_cast<long double>(innerN);
        acc += inner * inner;
    }
    return acc;
}

}  // namespace detail

// Contraction Oct. Work is cut into fixed blocks of the outer pair space and
// the block partials are combined in index order, so the result is bitwise
// identical under any thread count.
inline double oct_contraction(const EdgeFunction& f, unsigned threads = 0) {
    const TupleSpace& sp = f.space();
    int s = sp.arity();
    if (s < 1) throw std::invalid_argument("oct: index of size zero");
    std::uint64_t outerTotal = 1;
    for (int i = 0; i + 1 < s; ++i)
        outerTotal *= static_cast<std::uint64_t>(sp.sizes[i]) * sp.sizes[i];
    const std::uint64_t blockSize = 1u << 12;
    std::uint64_t nBlocks = (outerTotal + blockSize - 1) / blockSize;
    std::vector<long double> partials(nBlocks, 0.0L);
    if (threads == 0) threads = std::thread::hardware_concurrency();
    if (threads <= 1 || nBlocks <= 1) {
        for (std::uint64_t blk = 0; blk < nBlocks; ++blk)
            partials[blk] = detail::oct_contraction_block(
                f, blk * blockSize, std::min(outerTotal, (blk + 1) * blockSize));
    } else {
        std::vector<std::future<void>> futs;
        std::uint64_t perThread = (nBlocks + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            std::uint64_t b0 = t * perThread, b1 = std::min<std::uint64_t>(nBlocks, b0 + perThread);
            if (b0 >= b1) break;
            futs.push_back(std::async(std::launch::async, [&, b0, b1]() {
                for (std::uint64_t blk = b0; blk < b1; ++blk)
                    partials[blk] = detail::oct_contraction_block(
                        f, blk * blockSize, std::min(outerTotal, (blk + 1) * blockSize));
            }));
        }
        for (auto& fu : futs) fu.get();
    }
    long double total = 0.0L;
    for (std::uint64_t blk = 0; blk < nBlocks; ++blk) total += partials[blk];
    return static_cast<double>(total / static_cast<long double>(outerTotal));
}

inline double oct(const EdgeFunction& f, OctStrategy strategy) {
    return strategy == OctStrategy::naive ? oct_naive(f) : oct_contraction(f);
}

// Restricted Oct: coordinates of f confined to given vertex lists. Equals the
// full-range Oct divided by prod_i (|allowed_i| / N_i)^2, used where the
// support box is known (deviation functions live inside the singleton slices).
inline double oct_contraction_restricted(const EdgeFunction& f,
                                         const std::vector<std::vector<int>>& allowed) {
    const TupleSpace& sp = f.space();
    int s = sp.arity();
    if (s < 1) throw std::invalid_argument("oct: index of size zero");
    for (int i = 0; i < s; ++i)
        if (allowed[static_cast<std::size_t>(i)].empty()) return 0.0;
    std::uint64_t outerTotal = 1;
    for (int i = 0; i + 1 < s; ++i) {
        std::uint64_t n = allowed[static_cast<std::size_t>(i)].size();
        outerTotal *= n * n;
    }
    const auto& innerList = allowed[static_cast<std::size_t>(s - 1)];
    std::uint64_t innerStride = sp.strides[static_cast<std::size_t>(s - 1)];
    std::uint64_t cornersOuter = s == 1 ? 1 : (1ull << (s - 1));
    long double total = 0.0L;
    std::vector<std::uint64_t> base(cornersOuter);
    for (std::uint64_t idx = 0; idx < outerTotal; ++idx) {
        std::uint64_t rest = idx;
        std::vector<int> av(static_cast<std::size_t>(s - 1)), bv(static_cast<std::size_t>(s - 1));
        for (int i = 0; i + 1 < s; ++i) {
            const auto& list = allowed[static_cast<std::size_t>(i)];
            av[static_cast<std::size_t>(i)] = list[rest % list.size()];
            rest /= list.size();
            bv[static_cast<std::size_t>(i)] = list[rest % list.size()];
            rest /= list.size();
        }
        for (std::uint64_t eps = 0; eps < cornersOuter; ++eps) {
            std::uint64_t code = 0;
            for (int i = 0; i + 1 < s; ++i)
                code += static_cast<std::uint64_t>((eps >> i) & 1u ? bv[static_cast<std::size_t>(i)]
                                                                   : av[static_cast<std::size_t>(i)]) *
                        sp.strides[i];
            base[eps] = code;
        }
        long double inner = 0.0L;
        for (int x : innerList) {
            double prod = 1.0;
            std::uint64_t off = static_cast<std::uint64_t>(x) * innerStride;
            for (std::uint64_t eps = 0; eps < cornersOuter && prod != 0.0; ++eps)
                prod *= f[base[eps] + off];
            inner += prod;
        }
        inner /= static_cast<long double>(innerList.size());
        total += inner * inner;
    }
    return static_cast<double>(total / static_cast<long double>(outerTotal));
}

}  // namespace hyreg
