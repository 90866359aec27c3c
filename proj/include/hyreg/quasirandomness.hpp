#pragma once

// Measured octahedral quasirandomness and the (eps, J, k) verdict.
//
// For every index A realized in the template J: build the deviation function
// f^A, compute Oct(f^A), compare against the reference product
// prod_{C subset A} delta_C^{2^|C|} and the level threshold eta_{|A|}. The
// verdict uses the inequality form Oct(f) <= eta * reference, so zero-density
// slices (f identically zero) pass without dividing by zero; an index is
// degenerate only when its star is empty.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "hyreg/chain.hpp"
#include "hyreg/edge_function.hpp"
#include "hyreg/log_number.hpp"
#include "hyreg/oct.hpp"
#include "hyreg/thresholds.hpp"

namespace hyreg {

struct IndexVerdict {
    Mask index = 0;
    bool degenerate = false;        // empty star: no density to measure
    Rational delta;                 // delta_A
    double oct = 0.0;               // Oct(f^A)
    double oct_star = 0.0;          // Oct(H_*(A)), the trivial upper bound
    LogValue reference;             // prod_{C subset A} delta_C^{2^|C|}
    LogValue eta_star;              // measured eta*: oct / reference
    LogValue threshold;             // eta_{|A|}
    bool pass = false;
};

struct QuasirandomnessReport {
    double epsilon = 0.0;
    int k = 0;
    bool schedule_degenerate = false;  // some delta_A = 0: recurrence thresholds undefined
    bool eta_override = false;
    std::vector<IndexVerdict> indices;
    bool verdict = false;  // all non-degenerate pass and no index degenerate
    bool has_required_epsilon = false;
    LogValue required_epsilon;  // smallest eps whose schedule the chain passes
};

struct ReportOptions {
    OctStrategy strategy = OctStrategy::contraction;
    // When present, eta_by_level[j] replaces the schedule threshold at level j.
    std::vector<double> eta_by_level;
};

namespace detail {

inline std::vector<std::vector<int>> singleton_box(const Chain& H, Mask a) {
    std::vector<std::vector<int>> box;
    for (int p : mask_parts(a)) {
        std::vector<int> ids;
        H.slice(mask_of_part(p)).for_each([&](std::uint64_t c) { ids.push_back(static_cast<int>(c)); });
        box.push_back(std::move(ids));
    }
    return box;
}

// Oct over the full coordinate ranges, computed on the sub-box where the
// function can be nonzero and rescaled by the squared box densities.
inline double oct_boxed(const Chain& H, const EdgeFunction& f,
                        const std::vector<std::vector<int>>& box) {
    double scale = 1.0;
    const TupleSpace& sp = f.space();
    for (std::size_t i = 0; i < box.size(); ++i) {
        double r = static_cast<double>(box[i].size()) / sp.sizes[i];
        scale *= r * r;
    }
    (void)H;
    if (scale == 0.0) return 0.0;
    return oct_contraction_restricted(f, box) * scale;
}

}  // namespace detail

inline QuasirandomnessReport quasirandomness_report(const Chain& H, const Chain& J, double epsilon,
                                                    const ReportOptions& options = {}) {
    QuasirandomnessReport rep;
    rep.epsilon = epsilon;
    int k = 0;
    std::vector<Mask> indices = realized_indices(J);
    for (Mask a : indices) k = std::max(k, mask_size(a));
    if (k == 0) throw std::invalid_argument("quasirandomness: template has no edges");
    if (k > H.uniformity())
        throw std::invalid_argument("quasirandomness: template edges exceed chain uniformity");
    rep.k = k;
    rep.eta_override = !options.eta_by_level.empty();

    // Built even under an eta override: required_epsilon reads off it.
    std::optional<ThresholdSchedule> schedule;
    try {
        schedule = threshold_schedule_for(H, J, epsilon, k);
    } catch (const EmptyStarError&) {
        rep.schedule_degenerate = true;
    } catch (const std::domain_error&) {
        rep.schedule_degenerate = true;
    }

    bool allPass = true;
    bool anyDegenerate = false;
    std::vector<LogValue> etaStarByLevel(static_cast<std::size_t>(k) + 1);

    for (Mask a : indices) {
        IndexVerdict v;
        v.index = a;
        int s = mask_size(a);
        try {
            v.delta = H.relative_density(a);
        } catch (const EmptyStarError&) {
            v.degenerate = true;
            anyDegenerate = true;
            rep.indices.push_back(v);
            continue;
        }
        // reference product over all nonempty C subset A
        bool refZero = false;
        long double refLog = 0.0L;
        for_each_submask(a, [&](Mask c) {
            Rational dc = H.relative_density(c);  // star nonempty: A's star is nonempty
            if (dc.is_zero()) { refZero = true; return; }
            refLog += static_cast<long double>(1u << mask_size(c)) *
                      static_cast<long double>(std::log(dc.to_double()));
        });
        v.reference = refZero ? LogValue::zero_value() : LogValue::from_log(refLog);

        EdgeFunction f = deviation_function(H, a);
        EdgeFunction star = star_indicator(H, a);
        if (options.strategy == OctStrategy::naive) {
            v.oct = oct_naive(f);
            v.oct_star = oct_naive(star);
        } else if (s == 1) {
            // singleton deviations live on the whole part, not the slice box
            v.oct = oct_contraction(f);
            v.oct_star = oct_contraction(star);
        } else {
            auto box = detail::singleton_box(H, a);
            v.oct = detail::oct_boxed(H, f, box);
            v.oct_star = detail::oct_boxed(H, star, box);
        }

        // Oct of a deviation function is a square average; clip fp dust.
        double octClipped = v.oct > 1e-15 ? v.oct : 0.0;
        if (octClipped == 0.0) {
            v.eta_star = LogValue::zero_value();
        } else if (v.reference.is_zero()) {
            // delta_A = 0 forces f == 0, so oct > 0 with a zero reference is
            // numerical dust at worst; treat as zero.
            v.eta_star = LogValue::zero_value();
        } else {
            v.eta_star = LogValue::from_log(std::log(static_cast<long double>(octClipped)) -
                                            v.reference.lg);
        }
        if (etaStarByLevel[static_cast<std::size_t>(s)] < v.eta_star)
            etaStarByLevel[static_cast<std::size_t>(s)] = v.eta_star;

        if (rep.eta_override) {
            double eta = options.eta_by_level.size() == 1
                             ? options.eta_by_level[0]
                             : options.eta_by_level[static_cast<std::size_t>(s - 1)];
            v.threshold = LogValue::from_value(eta);
            v.pass = v.eta_star <= v.threshold;
        } else if (schedule) {
            v.threshold = schedule->eta(s);
            v.pass = v.eta_star <= v.threshold;
        } else {
            v.pass = false;  // recurrence schedule undefined
        }
        if (!v.pass) allPass = false;
        rep.indices.push_back(std::move(v));
    }

    if (schedule) {
        rep.has_required_epsilon = true;
        rep.required_epsilon = schedule->required_epsilon(etaStarByLevel);
    }
    if (!rep.eta_override && rep.schedule_degenerate) allPass = false;
    rep.verdict = allPass && !anyDegenerate;
    return rep;
}

}  // namespace hyreg
