#include <doctest.h>

#include <cmath>

#include "hyreg/thresholds.hpp"
#include "support.hpp"

using namespace hyreg;
using namespace testutil;

namespace {

// Exact evaluation of the recurrences when eps and every delta are rational:
// carries (value, huge power) pairs as exact rationals and reads the natural
// log off the bignum bit lengths.
long double exact_log_eps_level(int k, int level, const Rational& eps, const Rational& delta,
                                int edgesPerLevelTimes, std::uint64_t jSize) {
    // all edges share one delta here; edgesPerLevelTimes edges of each size
    // contribute delta^count to the suffix products
    long double curLog = std::log((long double)eps.to_double());
    // walk levels k-1 .. level with exact powers; the values underflow any
    // double quickly, so track in log space via exact bignum logs instead
    Rational curExact = eps;
    bool exact = true;
    for (int j = 1; k - j >= level; ++j) {
        // suffix product over |A| >= k-j+1
        int count = 0;
        for (int s = k - j + 1; s <= k; ++s) count += edgesPerLevelTimes;
        Rational inner = curExact * delta.pow(static_cast<unsigned>(count));
        unsigned expo = 1u << (static_cast<unsigned>(j) * static_cast<unsigned>(k));
        if (exact && inner.num().bit_length() * expo < 200000 &&
            inner.den().bit_length() * expo < 200000) {
            curExact = inner.pow(expo) * Rational(1, 2 * jSize) *
                       Rational(1, static_cast<std::int64_t>(1) << (static_cast<unsigned>(j) * k));
            curLog = static_cast<long double>(curExact.log2_abs()) * 0.6931471805599453094L;
        } else {
            exact = false;
            curLog = -(static_cast<long double>(j) * k + 1) * 0.6931471805599453094L -
                     std::log(static_cast<long double>(jSize)) +
                     std::exp2(static_cast<long double>(j) * k) *
                         (curLog + count * std::log(static_cast<long double>(delta.to_double())));
        }
    }
    return curLog;
}

}  // namespace

TEST_CASE("epsilon at the top level is the input") {
    std::vector<std::pair<int, double>> deltas{{1, 0.7}, {2, 0.3}, {2, 0.9}};
    ThresholdSchedule s = threshold_schedule(0.25, 9, deltas, 2);
    CHECK(static_cast<double>(s.log_epsilon[2]) == doctest::Approx(std::log(0.25)).epsilon(1e-15));
}

TEST_CASE("unit densities: log eps_{k-1} = -(k+1) log 2 - log m + 2^k log eps") {
    for (int k = 2; k <= 4; ++k) {
        std::uint64_t m = 11;
        double eps = 0.37;
        std::vector<std::pair<int, double>> deltas;
        for (int s = 1; s <= k; ++s) deltas.emplace_back(s, 1.0);
        ThresholdSchedule sch = threshold_schedule(eps, m, deltas, k);
        long double expect = -(k + 1) * std::log(2.0L) - std::log((long double)m) +
                             std::exp2((long double)k) * std::log((long double)eps);
        CHECK(std::fabs((double)(sch.log_epsilon[static_cast<std::size_t>(k - 1)] - expect)) <
              1e-12);
    }
}

TEST_CASE("k=2 schedule matches an exact bignum evaluation") {
    // eps = 1/2, |J| = 7, every delta = 1/2, one edge of each size per level
    int k = 2;
    Rational eps(1, 2), delta(1, 2);
    std::vector<std::pair<int, double>> deltas{{1, 0.5}, {2, 0.5}};
    ThresholdSchedule sch = threshold_schedule(0.5, 7, deltas, k);

    // eps_1 = 2^{-3} / 7 * (eps * delta_{|A|>=2})^{4}; exact: (1/2 * 1/2)^4 / 56
    Rational eps1 = (eps * delta).pow(4) * Rational(1, 56);
    long double expect1 = static_cast<long double>(eps1.log2_abs()) * 0.6931471805599453094L;
    CHECK(std::fabs((double)(sch.log_epsilon[1] - expect1)) < 1e-10);

    // eta_1 = (1/2) (eps_1 * delta_{|A|>=1}^2... here both edges count)^{2^{k*2}}
    Rational inner = eps1 * delta * delta;
    Rational eta1 = inner.pow(16) * Rational(1, 2);
    long double expectEta1 = static_cast<long double>(eta1.log2_abs()) * 0.6931471805599453094L;
    CHECK(std::fabs((double)(sch.log_eta[1] - expectEta1)) < 1e-9);

    // eta_2 = (1/2) (eps * delta_{|A|>=2})^{2^{k}}... exponent 2^{k(0+1)} = 4
    Rational eta2 = (eps * delta).pow(4) * Rational(1, 2);
    long double expectEta2 = static_cast<long double>(eta2.log2_abs()) * 0.6931471805599453094L;
    CHECK(std::fabs((double)(sch.log_eta[2] - expectEta2)) < 1e-12);
}

TEST_CASE("deeper exact cross-check at k=3") {
    long double viaExact = exact_log_eps_level(3, 1, Rational(1, 2), Rational(1, 2), 1, 7);
    std::vector<std::pair<int, double>> deltas{{1, 0.5}, {2, 0.5}, {3, 0.5}};
    ThresholdSchedule sch = threshold_schedule(0.5, 7, deltas, 3);
    CHECK(std::fabs((double)(sch.log_epsilon[1] - viaExact)) <
          1e-7 * std::max(1.0, std::fabs((double)viaExact)));
}

TEST_CASE("schedules decrease strictly as the level drops") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        Rng rng(seed);
        int k = 2 + static_cast<int>(rng.below(4));
        std::vector<std::pair<int, double>> deltas;
        for (int s = 1; s <= k; ++s)
            for (int c = 0; c < 2; ++c) deltas.emplace_back(s, 0.2 + 0.7 * rng.real());
        double eps = 0.1 + 0.8 * rng.real();
        ThresholdSchedule sch = threshold_schedule(eps, 20, deltas, k);
        for (int lvl = k; lvl > 1; --lvl) {
            CHECK(sch.log_epsilon[static_cast<std::size_t>(lvl - 1)] <
                  sch.log_epsilon[static_cast<std::size_t>(lvl)]);
            CHECK(sch.log_eta[static_cast<std::size_t>(lvl - 1)] <
                  sch.log_eta[static_cast<std::size_t>(lvl)]);
        }
    }
}

TEST_CASE("zero density makes the schedule undefined") {
    std::vector<std::pair<int, double>> deltas{{1, 0.5}, {2, 0.0}};
    CHECK_THROWS_AS(threshold_schedule(0.5, 5, deltas, 2), std::domain_error);
}

TEST_CASE("required_epsilon inverts the schedule at the binding level") {
    std::vector<std::pair<int, double>> deltas{{1, 0.8}, {1, 0.9}, {2, 0.4}, {2, 0.6}};
    ThresholdSchedule sch = threshold_schedule(0.5, 9, deltas, 2);
    // pick eta* below the level-2 threshold: any eps >= some smaller bound
    std::vector<LogValue> etaStar(3);
    etaStar[2] = LogValue::from_log(sch.log_eta[2] - 1.0L);
    LogValue req = sch.required_epsilon(etaStar);
    CHECK(!req.is_zero());
    CHECK((double)req.lg < std::log(0.5) + 1e-12);
    // rebuilding the schedule at the required epsilon meets eta* exactly
    double epsReq = std::exp((double)req.lg);
    ThresholdSchedule sch2 = threshold_schedule(epsReq, 9, deltas, 2);
    CHECK(std::fabs((double)(sch2.log_eta[2] - etaStar[2].lg)) < 1e-9);

    // a constraint at level 1 propagates up through the recurrence
    std::vector<LogValue> etaStar1(3);
    etaStar1[1] = LogValue::from_log(sch.log_eta[1] + 5.0L);  // easier than scheduled
    LogValue req1 = sch.required_epsilon(etaStar1);
    ThresholdSchedule sch3 =
        threshold_schedule(std::min(1.0, std::exp((double)req1.lg)), 9, deltas, 2);
    CHECK(sch3.log_eta[1] >= etaStar1[1].lg - 1e-6);
}

TEST_CASE("all-zero eta* imposes no epsilon requirement") {
    std::vector<std::pair<int, double>> deltas{{1, 0.8}, {2, 0.4}};
    ThresholdSchedule sch = threshold_schedule(0.5, 5, deltas, 2);
    std::vector<LogValue> etaStar(3);
    CHECK(sch.required_epsilon(etaStar).is_zero());
}

TEST_CASE("required_epsilon inverts multi-level constraints at k=3") {
    std::vector<std::pair<int, double>> deltas{{1, 0.9}, {2, 0.5}, {2, 0.7}, {3, 0.4}};
    ThresholdSchedule sch = threshold_schedule(0.8, 12, deltas, 3);
    std::vector<LogValue> etaStar(4);
    etaStar[2] = LogValue::from_log(sch.log_eta[2] - 3.0L);
    etaStar[3] = LogValue::from_log(sch.log_eta[3] - 1.0L);
    LogValue req = sch.required_epsilon(etaStar);
    REQUIRE(!req.is_zero());
    // the schedule at the required epsilon dominates both constraints, with
    // equality at the binding one
    double eps = std::exp(std::min(0.0, (double)req.lg));
    ThresholdSchedule at = threshold_schedule(eps, 12, deltas, 3);
    long double slack2 = at.log_eta[2] - etaStar[2].lg;
    long double slack3 = at.log_eta[3] - etaStar[3].lg;
    CHECK((double)slack2 >= -1e-6);
    CHECK((double)slack3 >= -1e-6);
    CHECK(std::min((double)slack2, (double)slack3) < 1e-6);
}
