#pragma once

// Exact and sampled homomorphism counting from small template chains into
// large chains, the counting-lemma verdict, and the weighted generalization.
//
// Exact counts run a backtracking search over template vertices in a static
// most-constrained-first order, pruning the moment a fully assigned template
// edge maps outside the host chain.

#include <algorithm>
#include <cstdint>
#include <future>
#include <map>
#include <optional>
#include <thread>
#include <vector>

#include "hyreg/chain.hpp"
#include "hyreg/edge_function.hpp"
#include "hyreg/rational.hpp"
#include "hyreg/rng.hpp"

namespace hyreg {

struct HomomorphismCount {
    unsigned long long exact_count = 0;
    unsigned long long total_maps = 0;
    bool total_maps_overflow = false;
    Rational probability;
};

namespace detail {

struct TemplatePlan {
    // vertices in assignment order: (part, slot)
    std::vector<std::pair<int, int>> order;
    std::vector<int> domain_size;  // N_part per position
    // per template edge: host mask, per-vertex (position, stride), last position
    struct EdgeCheck {
        Mask mask = 0;
        std::vector<std::pair<int, std::uint64_t>> terms;  // (order position, stride)
        int last_pos = 0;
        const Edge* tmpl = nullptr;
    };
    std::vector<EdgeCheck> checks;
    std::vector<std::vector<int>> checks_at;  // position -> indices into checks
    unsigned long long isolated_factor = 1;
    bool isolated_overflow = false;
};

inline TemplatePlan plan_template(const Chain& J, const Chain& H,
                                  const std::vector<Edge>& edges) {
    if (J.part_count() != H.part_count())
        throw std::invalid_argument("homomorphism: template parts do not align with host parts");
    TemplatePlan plan;
    std::map<std::pair<int, int>, int> degree;
    for (const Edge& e : edges)
        for (const auto& [p, t] : e.vertices) degree[{p, t}]++;
    // isolated template vertices multiply the count by their part size
    for (int p = 1; p <= J.part_count(); ++p) {
        for (int t = 0; t < J.partition().size_of(p); ++t) {
            if (degree.count({p, t})) continue;
            unsigned long long n = static_cast<unsigned long long>(H.partition().size_of(p));
            if (plan.isolated_factor > ~0ull / n) plan.isolated_overflow = true;
            plan.isolated_factor *= n;
        }
    }
    std::vector<std::pair<int, int>> verts;
    for (const auto& [v, d] : degree) { (void)d; verts.push_back(v); }
    std::stable_sort(verts.begin(), verts.end(), [&](const auto& a, const auto& b) {
        return degree[a] > degree[b];
    });
    plan.order = verts;
    std::map<std::pair<int, int>, int> pos;
    for (std::size_t i = 0; i < verts.size(); ++i) {
        pos[verts[i]] = static_cast<int>(i);
        plan.domain_size.push_back(H.partition().size_of(verts[i].first));
    }
    plan.checks_at.resize(verts.size());
    for (const Edge& e : edges) {
        TemplatePlan::EdgeCheck chk;
        chk.mask = e.index();
        if (mask_size(chk.mask) > H.uniformity())
            throw std::invalid_argument("homomorphism: template edge larger than host uniformity");
        const TupleSpace& sp = H.space(chk.mask);
        chk.tmpl = &e;
        int last = 0;
        for (std::size_t i = 0; i < e.vertices.size(); ++i) {
            int p = pos[e.vertices[i]];
            last = std::max(last, p);
            chk.terms.emplace_back(p, sp.strides[i]);
        }
        chk.last_pos = last;
        plan.checks.push_back(std::move(chk));
    }
    for (std::size_t i = 0; i < plan.checks.size(); ++i)
        plan.checks_at[static_cast<std::size_t>(plan.checks[i].last_pos)].push_back(
            static_cast<int>(i));
    return plan;
}

inline unsigned long long count_backtrack(const Chain& H, const TemplatePlan& plan,
                                          std::vector<int>& assign, std::size_t pos) {
    if (pos == plan.order.size()) return 1;
    unsigned long long total = 0;
    for (int v = 0; v < plan.domain_size[pos]; ++v) {
        assign[pos] = v;
        bool ok = true;
        for (int ci : plan.checks_at[pos]) {
            const auto& chk = plan.checks[static_cast<std::size_t>(ci)];
            std::uint64_t code = 0;
            for (const auto& [p, stride] : chk.terms)
                code += static_cast<std::uint64_t>(assign[static_cast<std::size_t>(p)]) * stride;
            if (!H.slice(chk.mask).contains(code)) { ok = false; break; }
        }
        if (ok) total += count_backtrack(H, plan, assign, pos + 1);
    }
    return total;
}

}  // namespace detail

inline unsigned long long total_map_count(const Chain& J, const Chain& H, bool* overflow = nullptr) {
    unsigned long long total = 1;
    bool over = false;
    for (int p = 1; p <= J.part_count(); ++p) {
        for (int t = 0; t < J.partition().size_of(p); ++t) {
            (void)t;
            unsigned long long n = static_cast<unsigned long long>(H.partition().size_of(p));
            if (total > ~0ull / n) over = true;
            total *= n;
        }
    }
    if (overflow) *overflow = over;
    return total;
}

inline HomomorphismCount count_homomorphisms(const Chain& J, const Chain& H, unsigned threads = 0) {
    std::vector<Edge> edges = J.edges();
    detail::TemplatePlan plan = detail::plan_template(J, H, edges);
    unsigned long long inner = 0;
    if (plan.order.empty()) {
        inner = 1;
    } else if (threads <= 1 || plan.domain_size[0] < 4) {
        std::vector<int> assign(plan.order.size(), 0);
        inner = detail::count_backtrack(H, plan, assign, 0);
    } else {
        // split on the first position; integer partials sum order-independently
        int n0 = plan.domain_size[0];
        if (threads == 0) threads = std::thread::hardware_concurrency();
        std::vector<std::future<unsigned long long>> futs;
        int chunk = (n0 + static_cast<int>(threads) - 1) / static_cast<int>(threads);
        for (int beg = 0; beg < n0; beg += chunk) {
            int end = std::min(n0, beg + chunk);
            futs.push_back(std::async(std::launch::async, [&, beg, end]() {
                std::vector<int> assign(plan.order.size(), 0);
                unsigned long long part = 0;
                for (int v = beg; v < end; ++v) {
                    assign[0] = v;
                    bool ok = true;
                    for (int ci : plan.checks_at[0]) {
                        const auto& chk = plan.checks[static_cast<std::size_t>(ci)];
                        std::uint64_t code = 0;
                        for (const auto& [p, stride] : chk.terms)
                            code += static_cast<std::uint64_t>(assign[static_cast<std::size_t>(p)]) *
                                    stride;
                        if (!H.slice(chk.mask).contains(code)) { ok = false; break; }
                    }
                    if (ok) part += detail::count_backtrack(H, plan, assign, 1);
                }
                return part;
            }));
        }
        for (auto& f : futs) inner += f.get();
    }
    HomomorphismCount out;
    out.total_maps = total_map_count(J, H, &out.total_maps_overflow);
    if (out.total_maps_overflow || plan.isolated_overflow ||
        (inner != 0 && plan.isolated_factor > ~0ull / inner))
        throw std::overflow_error("homomorphism: map space exceeds 64 bits; use sampling");
    out.exact_count = inner * plan.isolated_factor;
    out.probability =
        Rational(BigInt::from_uint64(out.exact_count), BigInt::from_uint64(out.total_maps));
    return out;
}

struct SampledProbability {
    double estimate = 0.0;
    double standard_error = 0.0;
    unsigned long long samples = 0;
    unsigned long long hits = 0;
};

inline SampledProbability hom_probability_sample(const Chain& J, const Chain& H,
                                                 unsigned long long samples, std::uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("sampling: need at least one sample");
    std::vector<Edge> edges = J.edges();
    detail::TemplatePlan plan = detail::plan_template(J, H, edges);
    Rng rng(seed);
    unsigned long long hits = 0;
    std::vector<int> assign(plan.order.size(), 0);
    for (unsigned long long s = 0; s < samples; ++s) {
        for (std::size_t i = 0; i < plan.order.size(); ++i)
            assign[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(plan.domain_size[i])));
        bool ok = true;
        for (const auto& chk : plan.checks) {
            std::uint64_t code = 0;
            for (const auto& [p, stride] : chk.terms)
                code += static_cast<std::uint64_t>(assign[static_cast<std::size_t>(p)]) * stride;
            if (!H.slice(chk.mask).contains(code)) { ok = false; break; }
        }
        if (ok) ++hits;
    }
    SampledProbability out;
    out.samples = samples;
    out.hits = hits;
    out.estimate = static_cast<double>(hits) / static_cast<double>(samples);
    out.standard_error =
        std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(samples));
    return out;
}

struct CountingVerdict {
    bool exact = false;
    double probability = 0.0;
    std::optional<Rational> probability_exact;
    Rational expected;          // prod_{A in J} delta_A
    double margin = 0.0;        // |p - prod delta|, minus 3 SE when sampled
    double allowed = 0.0;       // eps * prod delta
    double standard_error = 0.0;
    unsigned long long samples = 0;
    bool pass = false;
};

struct CountingOptions {
    unsigned long long map_budget = 100000000ull;  // exact path when totalMaps fits
    unsigned long long samples = 200000ull;
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

inline CountingVerdict counting_lemma_check(const Chain& J, const Chain& H, double epsilon,
                                            const CountingOptions& options = {}) {
    CountingVerdict v;
    Rational expected(1);
    for (const Edge& e : J.edges())
        expected *= H.relative_density(e.index());  // throws EmptyStarError when degenerate
    v.expected = expected;
    bool overflow = false;
    unsigned long long total = total_map_count(J, H, &overflow);
    Rational eps = Rational::from_double(epsilon);
    if (!overflow && total <= options.map_budget) {
        HomomorphismCount hom = count_homomorphisms(J, H, options.threads);
        v.exact = true;
        v.probability_exact = hom.probability;
        v.probability = hom.probability.to_double();
        Rational margin = (hom.probability - expected).abs();
        Rational allowed = eps * expected;
        v.margin = margin.to_double();
        v.allowed = allowed.to_double();
        v.pass = margin <= allowed;
    } else {
        SampledProbability sp = hom_probability_sample(J, H, options.samples, options.seed);
        v.exact = false;
        v.samples = sp.samples;
        v.probability = sp.estimate;
        v.standard_error = sp.standard_error;
        double raw = std::fabs(sp.estimate - expected.to_double());
        v.margin = std::max(0.0, raw - 3.0 * sp.standard_error);
        v.allowed = epsilon * expected.to_double();
        v.pass = v.margin <= v.allowed;
    }
    return v;
}

// E_tau prod_{A in J1} g^A(tau) prod_{A in J \ J1} H^A(tau) by exact
// enumeration. g assigns an A-function to every nonempty edge of J1; each must
// vanish outside H_*(A), and outside H(A) whenever H(A) is nonempty.
inline double weighted_hom_expectation(const Chain& J, const Chain& J1,
                                       const std::map<Edge, EdgeFunction>& g, const Chain& H,
                                       unsigned long long map_budget = 100000000ull) {
    std::vector<Edge> jEdges = J.edges();
    std::vector<Edge> j1Edges = J1.edges();
    for (const Edge& e : j1Edges) {
        if (!std::binary_search(jEdges.begin(), jEdges.end(), e))
            throw std::invalid_argument("weighted expectation: J1 is not a subchain of J");
        auto it = g.find(e);
        if (it == g.end())
            throw std::invalid_argument("weighted expectation: missing weight for a J1 edge");
        const EdgeFunction& fn = it->second;
        if (fn.index() != e.index())
            throw std::invalid_argument("weighted expectation: weight index mismatch");
        const EdgeTable& star = H.star(e.index());
        const EdgeTable& slice = H.slice(e.index());
        bool sliceNonempty = slice.count() > 0;
        for (std::uint64_t c = 0; c < fn.space().total; ++c) {
            if (fn[c] == 0.0) continue;
            if (!star.contains(c) || (sliceNonempty && !slice.contains(c)))
                throw std::invalid_argument("weighted expectation: weight not supported in the chain");
        }
    }
    bool overflow = false;
    unsigned long long total = total_map_count(J, H, &overflow);
    if (overflow || total > map_budget)
        throw BudgetExceeded("weighted expectation: map space exceeds budget");
    detail::TemplatePlan plan = detail::plan_template(J, H, jEdges);
    std::vector<const EdgeFunction*> weight(plan.checks.size(), nullptr);
    std::vector<bool> isJ1(plan.checks.size(), false);
    for (std::size_t i = 0; i < plan.checks.size(); ++i) {
        const Edge& e = *plan.checks[i].tmpl;
        auto it = g.find(e);
        if (it != g.end() && std::binary_search(j1Edges.begin(), j1Edges.end(), e)) {
            weight[i] = &it->second;
            isJ1[i] = true;
        }
    }
    std::vector<int> assign(plan.order.size(), 0);
    long double sum = 0.0L;
    // iterative product-carrying DFS
    struct Frame { int value; double product; };
    std::vector<Frame> stack(plan.order.size() + 1);
    std::size_t depth = 0;
    stack[0] = {-1, 1.0};
    while (true) {
        Frame& fr = stack[depth];
        if (depth == plan.order.size()) {
            sum += fr.product;
            if (depth == 0) break;
            --depth;
            continue;
        }
        ++fr.value;
        if (fr.value >= plan.domain_size[depth]) {
            if (depth == 0) break;
            --depth;
            continue;
        }
        assign[depth] = fr.value;
        double product = fr.product;
        bool ok = true;
        for (int ci : plan.checks_at[depth]) {
            const auto& chk = plan.checks[static_cast<std::size_t>(ci)];
            std::uint64_t code = 0;
            for (const auto& [p, stride] : chk.terms)
                code += static_cast<std::uint64_t>(assign[static_cast<std::size_t>(p)]) * stride;
            if (isJ1[static_cast<std::size_t>(ci)]) {
                double val = (*weight[static_cast<std::size_t>(ci)])[code];
                if (val == 0.0) { ok = false; break; }
                product *= val;
            } else if (!H.slice(chk.mask).contains(code)) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        ++depth;
        stack[depth] = {-1, product};
    }
    long double nonIsolatedMaps = 1.0L;
    for (std::size_t i = 0; i < plan.order.size(); ++i)
        nonIsolatedMaps *= static_cast<long double>(plan.domain_size[i]);
    return static_cast<double>(sum / nonIsolatedMaps);
}

// Simplices of an r-partite chain: r-tuples whose every (r-1)-subtuple is an
// edge. For a (k+1)-partite k-uniform top level these are the k-simplices.
template <typename F>
inline void for_each_simplex(const Chain& H, F&& fn) {
    int r = H.part_count();
    Mask full = (Mask{1} << r) - 1;
    std::vector<Mask> faces;
    for (int j = 1; j <= r; ++j) faces.push_back(full & ~mask_of_part(j));
    for (Mask f : faces)
        if (mask_size(f) > H.uniformity())
            throw std::invalid_argument("simplices: chain uniformity below r-1");
    std::vector<int> v(static_cast<std::size_t>(r), 0);
    // depth-first over parts; the face missing part j completes once every
    // other part is assigned
    std::size_t depth = 0;
    std::vector<int> cursor(static_cast<std::size_t>(r), -1);
    while (true) {
        if (depth == static_cast<std::size_t>(r)) {
            fn(v);
            --depth;
            continue;
        }
        ++cursor[depth];
        if (cursor[depth] >= H.partition().size_of(static_cast<int>(depth) + 1)) {
            cursor[depth] = -1;
            if (depth == 0) break;
            --depth;
            continue;
        }
        v[depth] = cursor[depth];
        bool ok = true;
        // check faces fully assigned at this depth
        for (int j = 1; j <= r && ok; ++j) {
            Mask face = faces[static_cast<std::size_t>(j - 1)];
            int lastPart = (j == r) ? r - 1 : r;
            if (static_cast<int>(depth) + 1 != lastPart) continue;
            const TupleSpace& sp = H.space(face);
            std::uint64_t code = 0;
            std::size_t ci = 0;
            for (int p = 1; p <= r; ++p) {
                if (p == j) continue;
                code += static_cast<std::uint64_t>(v[static_cast<std::size_t>(p - 1)]) *
                        sp.strides[ci++];
            }
            ok = H.slice(face).contains(code);
        }
        if (!ok) continue;
        ++depth;
    }
}

inline unsigned long long count_simplices(const Chain& H) {
    unsigned long long n = 0;
    for_each_simplex(H, [&](const std::vector<int>&) { ++n; });
    return n;
}

}  // namespace hyreg
