#pragma once

// A-functions: bounded values on the index-A tuples of a vertex partition,
// optionally supported in a chain's star. Templated on the scalar so the
// same tables drive both the double kernels and the exact-rational oracles.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hyreg/chain.hpp"
#include "hyreg/core.hpp"
#include "hyreg/rational.hpp"

namespace hyreg {

namespace detail {
inline bool in_unit_interval(double v) { return std::fabs(v) <= 1.0 + 1e-12; }
inline bool in_unit_interval(const Rational& v) {
    return v.abs() <= Rational(1);
}
inline bool value_is_zero(double v) { return v == 0.0; }
inline bool value_is_zero(const Rational& v) { return v.is_zero(); }
}  // namespace detail

template <typename T>
class BasicEdgeFunction {
public:
    BasicEdgeFunction() = default;

    BasicEdgeFunction(Mask index, const VertexPartition& partition, std::vector<T> values,
                      bool supported_in_star = false)
        : space_(index, partition), values_(std::move(values)), supported_(supported_in_star) {
        if (index == 0) throw std::invalid_argument("edge function: index must be nonempty");
        if (values_.size() != space_.total)
            throw std::invalid_argument("edge function: value table size mismatch");
        for (const T& v : values_)
            if (!detail::in_unit_interval(v))
                throw std::invalid_argument("edge function: values must lie in [-1,1]");
    }

    static BasicEdgeFunction constant(Mask index, const VertexPartition& partition, T value) {
        TupleSpace sp(index, partition);
        return BasicEdgeFunction(index, partition, std::vector<T>(sp.total, value));
    }

    Mask index() const { return space_.mask; }
    const TupleSpace& space() const { return space_; }
    bool supported_in_star() const { return supported_; }

    const T& operator[](std::uint64_t code) const { return values_[code]; }
    T& operator[](std::uint64_t code) { return values_[code]; }
    const std::vector<T>& values() const { return values_; }

    BasicEdgeFunction scaled(const T& c) const {
        BasicEdgeFunction out = *this;
        for (T& v : out.values_) v = v * c;
        return out;
    }

    void check_supported_in(const Chain& chain) const {
        const EdgeTable& star = chain.star(space_.mask);
        for (std::uint64_t c = 0; c < space_.total; ++c)
            if (!detail::value_is_zero(values_[c]) && !star.contains(c))
                throw std::invalid_argument("edge function: nonzero value outside the star");
    }

private:
    TupleSpace space_;
    std::vector<T> values_;
    bool supported_ = false;
};

using EdgeFunction = BasicEdgeFunction<double>;
using ExactEdgeFunction = BasicEdgeFunction<Rational>;

// f^A = H^A - delta_A on H_*(A), zero elsewhere; exact mean over all
// index-A tuples is zero by construction.
inline ExactEdgeFunction deviation_function_exact(const Chain& chain, Mask a) {
    Rational delta = chain.relative_density(a);  // throws EmptyStarError when degenerate
    const TupleSpace& sp = chain.space(a);
    std::vector<Rational> vals(sp.total, Rational(0));
    Rational onMember = Rational(1) - delta;
    Rational offMember = -delta;
    chain.star(a).for_each([&](std::uint64_t c) {
        vals[c] = chain.slice(a).contains(c) ? onMember : offMember;
    });
    return ExactEdgeFunction(a, chain.partition(), std::move(vals), true);
}

inline EdgeFunction deviation_function(const Chain& chain, Mask a) {
    Rational delta = chain.relative_density(a);
    double d = delta.to_double();
    const TupleSpace& sp = chain.space(a);
    std::vector<double> vals(sp.total, 0.0);
    chain.star(a).for_each([&](std::uint64_t c) {
        vals[c] = chain.slice(a).contains(c) ? 1.0 - d : -d;
    });
    return EdgeFunction(a, chain.partition(), std::move(vals), true);
}

// Indicator of H_*(A); its Oct is the trivial upper bound for any
// star-supported function at this index.
inline EdgeFunction star_indicator(const Chain& chain, Mask a) {
    const TupleSpace& sp = chain.space(a);
    std::vector<double> vals(sp.total, 0.0);
    chain.star(a).for_each([&](std::uint64_t c) { vals[c] = 1.0; });
    return EdgeFunction(a, chain.partition(), std::move(vals), true);
}

}  // namespace hyreg
