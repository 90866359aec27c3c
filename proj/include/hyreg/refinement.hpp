#pragma once

// The randomized local refinement step: when the slice H(A,x) is not
// eta-quasirandom relative to the chain beneath it, partition the (|A|-1)-
// faces so that the mean-square density of the slice indicator over the
// induced partition of the weak class gains at least eta^2/32.
//
// Construction: sample witnesses psi from the weak class, split the failing
// product into per-face factors, randomized-round each factor to {-1,0,1}
// preserving its expectation, select r of the resulting functions, and cut
// each face class by the r-vector of rounded values (at most 3^r cells).
// A Las Vegas retry loop verifies the gain exactly before accepting.

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "hyreg/edge_function.hpp"
#include "hyreg/log_number.hpp"
#include "hyreg/oct.hpp"
#include "hyreg/partition_system.hpp"
#include "hyreg/rational.hpp"
#include "hyreg/rng.hpp"

namespace hyreg {

struct RefinementOutcome {
    PartitionSystem refined;
    Mask target = 0;
    bool accepted = false;
    Rational gain;              // msd(indicator) - delta^2 over the weak class
    Rational msd;               // msd of the slice indicator after refinement
    Rational delta;             // delta_{A,x}
    double oct = 0.0;           // Oct of the deviation before refinement
    double reference = 0.0;     // prod_{C subseteq A} delta_C^{2^|C|}
    double eta = 0.0;
    int retries = 0;
    int requested_r = 0;
    int required_r = 0;
    int effective_r = 0;
    bool r_capped = false;
    std::vector<std::pair<Mask, std::uint32_t>> face_cells;  // realized cells per face
    // raw per-face extra labelings over K(C), for common refinement by callers
    std::map<Mask, std::vector<std::uint32_t>> face_extras;
};

namespace detail {

struct RefinementBox {
    Mask a = 0;
    int s = 0;
    std::vector<int> parts;                  // global part numbers of A
    std::vector<std::vector<int>> cells;     // local -> global vertex id
    std::vector<std::vector<int>> inv;       // global vertex id -> local id or -1
    VertexPartition boxVp;                   // part sizes = cell sizes
    Mask fullLocal = 0;
    std::vector<std::uint64_t> wLocal;       // weak class, boxed codes
    std::vector<bool> inSlice;               // parallel to wLocal
    std::uint64_t sliceSize = 0;
};

inline RefinementBox build_box(const PartitionSystem& system, const ClassDecomposition& classes,
                               const std::vector<int>& x, Mask a) {
    RefinementBox box;
    box.a = a;
    box.s = mask_size(a);
    box.parts = mask_parts(a);
    std::vector<int> cellSizes;
    for (int p : box.parts) {
        Mask single = mask_of_part(p);
        std::uint32_t target = classes.strong_id(single, static_cast<std::uint64_t>(
                                                             x[static_cast<std::size_t>(p - 1)]));
        std::vector<int> cell, inv(static_cast<std::size_t>(system.partition().size_of(p)), -1);
        const auto& ids = classes.strong_ids(single);
        for (std::uint64_t v = 0; v < ids.size(); ++v) {
            if (ids[v] == target) {
                inv[v] = static_cast<int>(cell.size());
                cell.push_back(static_cast<int>(v));
            }
        }
        cellSizes.push_back(static_cast<int>(cell.size()));
        box.cells.push_back(std::move(cell));
        box.inv.push_back(std::move(inv));
    }
    box.boxVp = VertexPartition(cellSizes);
    box.fullLocal = (Mask{1} << box.s) - 1;

    // weak class of x(A), recoded into the box
    const TupleSpace& spA = system.space(a);
    TupleSpace boxA(box.fullLocal, box.boxVp);
    std::uint64_t codeX = classes.code_of(x, a);
    std::uint32_t weakTarget = classes.weak_id(a, codeX);
    std::uint32_t strongTarget = classes.strong_id(a, codeX);
    const auto& weakIds = classes.weak_ids(a);
    const auto& strongIds = classes.strong_ids(a);
    for (std::uint64_t c = 0; c < weakIds.size(); ++c) {
        if (weakIds[c] != weakTarget) continue;
        std::uint64_t local = 0;
        for (int i = 0; i < box.s; ++i) {
            int g = spA.coord_of(c, static_cast<std::size_t>(i));
            local += static_cast<std::uint64_t>(box.inv[static_cast<std::size_t>(i)][g]) *
                     boxA.strides[static_cast<std::size_t>(i)];
        }
        box.wLocal.push_back(local);
        bool inH = strongIds[c] == strongTarget;
        box.inSlice.push_back(inH);
        if (inH) ++box.sliceSize;
    }
    return box;
}

// Mean-square density of the slice indicator with respect to a cell labeling
// of the weak class; exact.
inline Rational indicator_msd(const std::vector<std::uint32_t>& cellOfW,
                              const std::vector<bool>& inSlice) {
    std::unordered_map<std::uint32_t, std::pair<std::uint64_t, std::uint64_t>> agg;
    for (std::size_t i = 0; i < cellOfW.size(); ++i) {
        auto& [total, hit] = agg[cellOfW[i]];
        ++total;
        if (inSlice[i]) ++hit;
    }
    BigInt w(static_cast<std::int64_t>(cellOfW.size()));
    RationalSum sum;
    for (const auto& [cell, counts] : agg) {
        (void)cell;
        BigInt hit(static_cast<std::int64_t>(counts.second));
        sum.add(hit * hit, w * BigInt(static_cast<std::int64_t>(counts.first)));
    }
    return sum.value();
}

}  // namespace detail

struct RefinementOptions {
    int retry_budget = 64;
    int r_cap = 64;
    unsigned threads = 1;
};

inline RefinementOutcome refinement_step(const PartitionSystem& system,
                                         const ClassDecomposition& classes,
                                         const std::vector<int>& x, Mask a, double eta, int r,
                                         std::uint64_t seed,
                                         const RefinementOptions& options = {}) {
    int s = mask_size(a);
    if (s < 2) throw std::invalid_argument("refinement: target index needs size >= 2");
    if (!(eta > 0.0)) throw std::invalid_argument("refinement: eta must be positive");
    if (options.retry_budget < 1) throw std::invalid_argument("refinement: retry budget must be >= 1");
    RefinementOutcome out;
    out.target = a;
    out.eta = eta;
    out.requested_r = r;

    detail::RefinementBox box = detail::build_box(system, classes, x, a);
    std::uint64_t wSize = box.wLocal.size();
    out.delta = Rational(static_cast<std::int64_t>(box.sliceSize),
                         static_cast<std::int64_t>(wSize));
    double deltaD = out.delta.to_double();

    // deviation function over the box
    TupleSpace boxA(box.fullLocal, box.boxVp);
    std::vector<double> fvals(boxA.total, 0.0);
    for (std::size_t i = 0; i < box.wLocal.size(); ++i)
        fvals[box.wLocal[i]] = box.inSlice[i] ? 1.0 - deltaD : -deltaD;
    EdgeFunction f(box.fullLocal, box.boxVp, std::move(fvals), false);

    // full-range Oct equals the boxed Oct times the squared box densities
    double boxScale = 1.0;
    for (int i = 0; i < box.s; ++i) {
        double ratio = static_cast<double>(box.cells[static_cast<std::size_t>(i)].size()) /
                       system.partition().size_of(box.parts[static_cast<std::size_t>(i)]);
        boxScale *= ratio * ratio;
    }
    out.oct = oct_contraction(f, options.threads) * boxScale;

    // The hypothesis lives relative to the face chain beneath the slice, so
    // the comparison product runs over proper subsets only; the top density
    // has no home in a (|A|-1)-chain.
    double reference = 1.0;
    double doubleOctProduct = 1.0;  // prod over the double octahedron D_A
    for_each_submask(a, [&](Mask c) {
        if (c == a) return;
        double dc = classes.delta(c, x).to_double();
        reference *= std::pow(dc, static_cast<double>(1u << mask_size(c)));
        doubleOctProduct *= std::pow(dc, static_cast<double>((1u << (mask_size(c) + 1)) - 1));
    });
    out.reference = reference;

    if (out.oct <= eta * reference)
        throw PreconditionNotViolated("refinement: slice is already eta-quasirandom at " +
                                      mask_to_string(a));

    out.required_r = doubleOctProduct > 0.0 && 1.0 / doubleOctProduct < 1e9
                         ? static_cast<int>(std::ceil(1.0 / doubleOctProduct))
                         : options.r_cap + 1;
    int effective = std::max(r, out.required_r);
    if (effective > options.r_cap) {
        effective = options.r_cap;
        out.r_capped = true;
    }
    out.effective_r = effective;

    // face data: for each j, the strong class H_j of x(A \ {j}) in boxed codes
    int rr = effective;
    std::vector<Mask> faceMasks(static_cast<std::size_t>(s));
    std::vector<TupleSpace> faceBox(static_cast<std::size_t>(s));
    std::vector<std::vector<std::uint64_t>> faceClassLocal(static_cast<std::size_t>(s));
    std::vector<std::vector<std::uint64_t>> faceClassGlobal(static_cast<std::size_t>(s));
    for (int j = 0; j < s; ++j) {
        Mask fm = a & ~mask_of_part(box.parts[static_cast<std::size_t>(j)]);
        faceMasks[static_cast<std::size_t>(j)] = fm;
        faceBox[static_cast<std::size_t>(j)] = TupleSpace(box.fullLocal & ~(Mask{1} << j), box.boxVp);
        const TupleSpace& spF = system.space(fm);
        std::uint32_t target = classes.strong_id(fm, classes.code_of(x, fm));
        const auto& ids = classes.strong_ids(fm);
        auto& localList = faceClassLocal[static_cast<std::size_t>(j)];
        auto& globalList = faceClassGlobal[static_cast<std::size_t>(j)];
        for (std::uint64_t c = 0; c < ids.size(); ++c) {
            if (ids[c] != target) continue;
            std::uint64_t local = 0;
            std::size_t li = 0;
            for (int i = 0; i < box.s; ++i) {
                if (i == j) continue;
                int g = spF.coord_of(c, li);
                local += static_cast<std::uint64_t>(box.inv[static_cast<std::size_t>(i)][g]) *
                         faceBox[static_cast<std::size_t>(j)].strides[li];
                ++li;
            }
            localList.push_back(local);
            globalList.push_back(c);
        }
    }
    // boxed faces of every weak-class member, for the induced partition
    std::vector<std::vector<std::uint64_t>> wFaces(static_cast<std::size_t>(s));
    for (int j = 0; j < s; ++j) {
        wFaces[static_cast<std::size_t>(j)].reserve(wSize);
        for (std::uint64_t code : box.wLocal)
            wFaces[static_cast<std::size_t>(j)].push_back(
                boxA.project(code, faceBox[static_cast<std::size_t>(j)]));
    }

    Rational etaExact = Rational::from_double(eta);
    Rational needed = etaExact * etaExact / Rational(32);
    Rational deltaSq = out.delta * out.delta;

    Rng master(seed);
    Rational bestGain(-1);
    std::vector<std::vector<std::uint32_t>> bestFaceCells;  // per face, labels on faceClass
    int attempt = 0;
    for (attempt = 0; attempt < options.retry_budget; ++attempt) {
        Rng rng = master.fork(static_cast<std::uint64_t>(attempt));
        int pool = 4 * rr;
        // pool of rounded candidates: pool x s tables over the boxed faces
        std::vector<std::vector<std::vector<std::int8_t>>> u(
            static_cast<std::size_t>(pool),
            std::vector<std::vector<std::int8_t>>(static_cast<std::size_t>(s)));
        for (int p = 0; p < pool; ++p) {
            std::uint64_t psi = box.wLocal[rng.below(wSize)];
            std::vector<int> psiCoord(static_cast<std::size_t>(s));
            for (int i = 0; i < box.s; ++i)
                psiCoord[static_cast<std::size_t>(i)] =
                    boxA.coord_of(psi, static_cast<std::size_t>(i));
            for (int j = 0; j < s; ++j) {
                auto& table = u[static_cast<std::size_t>(p)][static_cast<std::size_t>(j)];
                table.assign(faceBox[static_cast<std::size_t>(j)].total, 0);
                for (std::uint64_t t : faceClassLocal[static_cast<std::size_t>(j)]) {
                    // g_j(t): product of f over the corners whose lowest doubled
                    // coordinate is j
                    double g = 1.0;
                    for (Mask eps = 1; eps < (Mask{1} << s) && g != 0.0; ++eps) {
                        if (__builtin_ctz(eps) != j) continue;
                        std::uint64_t code = 0;
                        std::size_t li = 0;
                        for (int i = 0; i < s; ++i) {
                            int coord;
                            if ((eps >> i) & 1u) coord = psiCoord[static_cast<std::size_t>(i)];
                            else {
                                coord = static_cast<int>(
                                    (t / faceBox[static_cast<std::size_t>(j)].strides[li]) %
                                    static_cast<std::uint64_t>(
                                        faceBox[static_cast<std::size_t>(j)]
                                            .sizes[li]));
                            }
                            if (i != j) ++li;
                            code += static_cast<std::uint64_t>(coord) *
                                    boxA.strides[static_cast<std::size_t>(i)];
                        }
                        g *= f[code];
                    }
                    std::int8_t val = 0;
                    if (g >= 0) val = rng.bernoulli(g) ? 1 : 0;
                    else val = rng.bernoulli(-g) ? -1 : 0;
                    table[t] = val;
                }
            }
        }
        // select rr of the candidates uniformly, with replacement
        std::vector<int> chosen(static_cast<std::size_t>(rr));
        for (int i = 0; i < rr; ++i)
            chosen[static_cast<std::size_t>(i)] = static_cast<int>(rng.below(
                static_cast<std::uint64_t>(pool)));
        // cut each face class by its r-vector of rounded values
        std::vector<std::vector<std::uint32_t>> faceCells(static_cast<std::size_t>(s));
        std::vector<std::uint32_t> cellsPerFace(static_cast<std::size_t>(s), 0);
        std::vector<std::unordered_map<std::uint64_t, std::uint32_t>> faceCellOfLocal(
            static_cast<std::size_t>(s));
        for (int j = 0; j < s; ++j) {
            std::map<std::vector<std::int8_t>, std::uint32_t> ids;
            auto& cellsOut = faceCells[static_cast<std::size_t>(j)];
            cellsOut.reserve(faceClassLocal[static_cast<std::size_t>(j)].size());
            std::vector<std::int8_t> key(static_cast<std::size_t>(rr));
            for (std::uint64_t t : faceClassLocal[static_cast<std::size_t>(j)]) {
                for (int i = 0; i < rr; ++i)
                    key[static_cast<std::size_t>(i)] =
                        u[static_cast<std::size_t>(chosen[static_cast<std::size_t>(i)])]
                         [static_cast<std::size_t>(j)][t];
                auto [it, inserted] = ids.try_emplace(key, static_cast<std::uint32_t>(ids.size()));
                cellsOut.push_back(it->second);
                faceCellOfLocal[static_cast<std::size_t>(j)][t] = it->second;
            }
            cellsPerFace[static_cast<std::size_t>(j)] = static_cast<std::uint32_t>(ids.size());
        }
        // induced partition of the weak class and its exact gain
        std::vector<std::uint32_t> cellOfW(wSize);
        {
            std::map<std::vector<std::uint32_t>, std::uint32_t> ids;
            std::vector<std::uint32_t> key(static_cast<std::size_t>(s));
            for (std::size_t i = 0; i < wSize; ++i) {
                for (int j = 0; j < s; ++j)
                    key[static_cast<std::size_t>(j)] =
                        faceCellOfLocal[static_cast<std::size_t>(j)]
                            .at(wFaces[static_cast<std::size_t>(j)][i]);
                auto [it, inserted] = ids.try_emplace(key, static_cast<std::uint32_t>(ids.size()));
                cellOfW[i] = it->second;
            }
        }
        Rational msd = detail::indicator_msd(cellOfW, box.inSlice);
        Rational gain = msd - deltaSq;
        if (gain > bestGain) {
            bestGain = gain;
            out.msd = msd;
            bestFaceCells = faceCells;
            out.face_cells.clear();
            for (int j = 0; j < s; ++j)
                out.face_cells.emplace_back(faceMasks[static_cast<std::size_t>(j)],
                                            cellsPerFace[static_cast<std::size_t>(j)]);
        }
        if (gain >= needed) {
            out.accepted = true;
            ++attempt;
            break;
        }
    }
    out.retries = attempt;
    out.gain = bestGain;

    // extra labeling per face: 0 off the class, 1 + cell inside it
    for (int j = 0; j < s; ++j) {
        Mask fm = faceMasks[static_cast<std::size_t>(j)];
        std::vector<std::uint32_t> extra(system.space(fm).total, 0);
        const auto& globals = faceClassGlobal[static_cast<std::size_t>(j)];
        const auto& cells = bestFaceCells[static_cast<std::size_t>(j)];
        for (std::size_t i = 0; i < globals.size(); ++i) extra[globals[i]] = 1 + cells[i];
        out.face_extras.emplace(fm, std::move(extra));
    }
    out.refined = system;
    for (const auto& [fm, extra] : out.face_extras)
        out.refined.refine(fm, {&extra});
    return out;
}

inline RefinementOutcome refinement_step(const PartitionSystem& system, const std::vector<int>& x,
                                         Mask a, double eta, int r, std::uint64_t seed,
                                         const RefinementOptions& options = {}) {
    ClassDecomposition classes(system);
    return refinement_step(system, classes, x, a, eta, r, seed, options);
}

// Measured eta* in the refinement normalization: Oct of the slice deviation
// over the product across proper subsets. The largest eta at which the slice
// still fails the refinement precondition.
inline LogValue refinement_eta_star(const PartitionSystem& system,
                                    const ClassDecomposition& classes, const std::vector<int>& x,
                                    Mask a) {
    if (mask_size(a) < 2) return LogValue::zero_value();
    detail::RefinementBox box = detail::build_box(system, classes, x, a);
    TupleSpace boxA(box.fullLocal, box.boxVp);
    double delta = static_cast<double>(box.sliceSize) / static_cast<double>(box.wLocal.size());
    std::vector<double> fvals(boxA.total, 0.0);
    for (std::size_t i = 0; i < box.wLocal.size(); ++i)
        fvals[box.wLocal[i]] = box.inSlice[i] ? 1.0 - delta : -delta;
    EdgeFunction f(box.fullLocal, box.boxVp, std::move(fvals), false);
    double boxScale = 1.0;
    for (int i = 0; i < box.s; ++i) {
        double ratio = static_cast<double>(box.cells[static_cast<std::size_t>(i)].size()) /
                       system.partition().size_of(box.parts[static_cast<std::size_t>(i)]);
        boxScale *= ratio * ratio;
    }
    double oct = oct_contraction(f) * boxScale;
    if (oct <= 1e-15) return LogValue::zero_value();
    long double refLog = 0.0L;
    for_each_submask(a, [&](Mask c) {
        if (c == a) return;
        refLog += static_cast<long double>(1u << mask_size(c)) *
                  static_cast<long double>(std::log(classes.delta(c, x).to_double()));
    });
    return LogValue::from_log(std::log(static_cast<long double>(oct)) - refLog);
}

}  // namespace hyreg
