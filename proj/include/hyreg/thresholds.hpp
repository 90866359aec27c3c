#pragma once

// The (epsilon_j, eta_j) threshold recurrences, held in natural-log space
// with long-double accumulation:
//
//   eps_k     = eps
//   eps_{k-j} = 2^{-jk-1} |J|^{-1} (eps_{k-j+1} prod_{|A| >= k-j+1} delta_A)^{2^{jk}}
//   eta_{k-j} = (1/2) (eps_{k-j} prod_{|A| >= k-j} delta_A)^{2^{k(j+1)}}
//
// Products run over the edges of the template chain J, multiplicities
// included; |J| counts every edge of J, the empty edge included.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hyreg/chain.hpp"
#include "hyreg/log_number.hpp"

namespace hyreg {

struct ThresholdSchedule {
    int k = 0;
    double epsilon = 0.0;                 // eps_k, echoed
    std::uint64_t template_edge_count = 0;
    // per-edge (|A|, delta_A) echo of the inputs
    std::vector<std::pair<int, double>> edge_deltas;
    // index j in [1, k]; slot 0 unused
    std::vector<long double> log_epsilon;
    std::vector<long double> log_eta;
    std::vector<long double> log_delta_suffix;  // S_t = sum of ln delta over |A| >= t

    LogValue eta(int level) const { return LogValue::from_log(log_eta[static_cast<std::size_t>(level)]); }
    LogValue eps(int level) const { return LogValue::from_log(log_epsilon[static_cast<std::size_t>(level)]); }

    // Smallest eps_k whose schedule dominates the given measured eta* values
    // (zero entries impose no constraint). Inverts the recurrences level by
    // level; may exceed 1 on far-from-quasirandom instances.
    LogValue required_epsilon(const std::vector<LogValue>& eta_star_by_level) const {
        constexpr long double ln2 = 0.6931471805599453094172321214581766L;
        bool any = false;
        long double best = 0.0L;
        long double lnJ = std::log(static_cast<long double>(template_edge_count));
        for (int level = 1; level <= k; ++level) {
            const LogValue& star = eta_star_by_level[static_cast<std::size_t>(level)];
            if (star.is_zero()) continue;
            long double expEta = std::exp2(static_cast<long double>(k) * (k - level + 1));
            long double req = (star.lg + ln2) / expEta -
                              log_delta_suffix[static_cast<std::size_t>(level)];
            // propagate the eps_level requirement up to eps_k
            for (int j = level; j < k; ++j) {
                long double expStep = std::exp2(static_cast<long double>(k) * (k - j));
                req = (req + (static_cast<long double>(k) * (k - j) + 1) * ln2 + lnJ) / expStep -
                      log_delta_suffix[static_cast<std::size_t>(j + 1)];
            }
            if (!any || req > best) { best = req; any = true; }
        }
        if (!any) return LogValue::zero_value();
        return LogValue::from_log(best);
    }
};

// Core factory. Throws std::domain_error when some delta_A is zero (the
// schedule is undefined there; callers report the index as degenerate).
inline ThresholdSchedule threshold_schedule(double epsilon, std::uint64_t template_edge_count,
                                            const std::vector<std::pair<int, double>>& edge_deltas,
                                            int k) {
    if (!(epsilon > 0.0) || epsilon > 1.0)
        throw std::invalid_argument("threshold schedule: epsilon must lie in (0,1]");
    if (k < 1) throw std::invalid_argument("threshold schedule: k must be >= 1");
    if (template_edge_count == 0)
        throw std::invalid_argument("threshold schedule: empty template");
    constexpr long double ln2 = 0.6931471805599453094172321214581766L;
    ThresholdSchedule s;
    s.k = k;
    s.epsilon = epsilon;
    s.template_edge_count = template_edge_count;
    s.edge_deltas = edge_deltas;
    s.log_delta_suffix.assign(static_cast<std::size_t>(k) + 2, 0.0L);
    for (const auto& [size, delta] : edge_deltas) {
        if (size < 1 || size > k)
            throw std::invalid_argument("threshold schedule: edge size out of range");
        if (!(delta > 0.0))
            throw std::domain_error("threshold schedule undefined: zero density");
        if (delta > 1.0) throw std::invalid_argument("threshold schedule: delta above one");
        long double ld = std::log(static_cast<long double>(delta));
        for (int t = 1; t <= size; ++t) s.log_delta_suffix[static_cast<std::size_t>(t)] += ld;
    }
    s.log_epsilon.assign(static_cast<std::size_t>(k) + 1, 0.0L);
    s.log_eta.assign(static_cast<std::size_t>(k) + 1, 0.0L);
    long double lnJ = std::log(static_cast<long double>(template_edge_count));
    s.log_epsilon[static_cast<std::size_t>(k)] = std::log(static_cast<long double>(epsilon));
    for (int j = 1; j < k; ++j) {
        long double expo = std::exp2(static_cast<long double>(j) * k);
        s.log_epsilon[static_cast<std::size_t>(k - j)] =
            -(static_cast<long double>(j) * k + 1) * ln2 - lnJ +
            expo * (s.log_epsilon[static_cast<std::size_t>(k - j + 1)] +
                    s.log_delta_suffix[static_cast<std::size_t>(k - j + 1)]);
    }
    for (int j = 0; j < k; ++j) {
        long double expo = std::exp2(static_cast<long double>(k) * (j + 1));
        s.log_eta[static_cast<std::size_t>(k - j)] =
            -ln2 + expo * (s.log_epsilon[static_cast<std::size_t>(k - j)] +
                           s.log_delta_suffix[static_cast<std::size_t>(k - j)]);
    }
    return s;
}

// Convenience: deltas drawn from H at the indices of J's edges.
inline ThresholdSchedule threshold_schedule_for(const Chain& H, const Chain& J, double epsilon,
                                                int k = 0) {
    if (k == 0)
        for (const Edge& e : J.edges()) k = std::max(k, e.size());
    if (k == 0) throw std::invalid_argument("threshold schedule: template has no edges");
    std::vector<std::pair<int, double>> deltas;
    for (const Edge& e : J.edges()) {
        if (e.empty()) continue;
        Mask a = e.index();
        deltas.emplace_back(e.size(), H.relative_density(a).to_double());
    }
    return threshold_schedule(epsilon, J.edge_count(), deltas, k);
}

}  // namespace hyreg
