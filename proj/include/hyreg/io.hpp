#pragma once

// File formats and report serialization.
//
// Chain text format (canonical form sorts parts ascending and maximal edges
// lexicographically; closure is applied on load unless a `closed` line is
// present, in which case the listed edges must already be down-closed):
//
//   chain r=<r> k=<k>
//   part <i> <N_i>
//   edge <p:v> <p:v> ...
//
// Grid format: `grid dim=<d> n=<N>` then one coordinate row per point.
// Partition systems and reports are JSON; log-space numbers serialize as
// (mantissa, exponent-of-two) pairs so underflowed values survive printing.

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hyreg/chain.hpp"
#include "hyreg/grid.hpp"
#include "hyreg/homomorphism.hpp"
#include "hyreg/log_number.hpp"
#include "hyreg/partition_system.hpp"
#include "hyreg/quasirandomness.hpp"
#include "hyreg/reductions.hpp"
#include "hyreg/regularize.hpp"
#include "hyreg/removal.hpp"
#include "hyreg/thresholds.hpp"

namespace hyreg {

using Json = nlohmann::ordered_json;

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// ----------------------------------------------------------------- chains --

inline std::string serialize_chain(const Chain& chain) {
    std::ostringstream out;
    out << "chain r=" << chain.part_count() << " k=" << chain.uniformity() << "\n";
    for (int p = 1; p <= chain.part_count(); ++p)
        out << "part " << p << " " << chain.partition().size_of(p) << "\n";
    for (const Edge& e : chain.maximal_edges()) {
        out << "edge";
        for (const auto& [p, v] : e.vertices) out << " " << p << ":" << v;
        out << "\n";
    }
    return out.str();
}

inline Chain parse_chain(const std::string& text, std::vector<std::string>* warnings = nullptr) {
    std::istringstream in(text);
    std::string line;
    int r = -1, k = -1;
    std::vector<int> sizes;
    bool closed = false;
    std::vector<Edge> edges;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;
        if (tok == "chain") {
            std::string a, b;
            if (!(ls >> a >> b) || a.rfind("r=", 0) != 0 || b.rfind("k=", 0) != 0)
                throw ParseError("chain: malformed header");
            r = std::stoi(a.substr(2));
            k = std::stoi(b.substr(2));
            if (r < 1 || k < 1) throw ParseError("chain: r and k must be positive");
            sizes.assign(static_cast<std::size_t>(r), 0);
        } else if (tok == "part") {
            if (r < 0) throw ParseError("chain: part before header");
            int p, n;
            if (!(ls >> p >> n) || p < 1 || p > r) throw ParseError("chain: bad part line");
            sizes[static_cast<std::size_t>(p - 1)] = n;
        } else if (tok == "closed") {
            closed = true;
        } else if (tok == "edge") {
            if (r < 0) throw ParseError("chain: edge before header");
            std::vector<std::pair<int, int>> vs;
            std::string pv;
            while (ls >> pv) {
                auto colon = pv.find(':');
                if (colon == std::string::npos) throw ParseError("chain: bad vertex token " + pv);
                vs.emplace_back(std::stoi(pv.substr(0, colon)), std::stoi(pv.substr(colon + 1)));
            }
            edges.push_back(Edge(std::move(vs)));
        } else if (tok[0] == '#') {
            continue;
        } else {
            throw ParseError("chain: unknown directive '" + tok + "' on line " +
                             std::to_string(lineNo));
        }
    }
    if (r < 0) throw ParseError("chain: missing header");
    for (int i = 0; i < r; ++i)
        if (sizes[static_cast<std::size_t>(i)] < 1)
            throw ParseError("chain: missing part " + std::to_string(i + 1));
    VertexPartition vp(sizes);
    std::vector<Edge> sorted = edges;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() && warnings)
        warnings->push_back("duplicate edges ignored");
    ChainBuilder b(vp, k);
    for (const Edge& e : edges) {
        if (closed) b.insert_as_listed(e);
        else b.insert_closed(e);
    }
    return std::move(b).build(closed);
}

inline Json chain_to_json(const Chain& chain) {
    Json j;
    j["kind"] = "chain";
    j["r"] = chain.part_count();
    j["k"] = chain.uniformity();
    j["parts"] = chain.partition().sizes;
    j["closed"] = false;
    Json edges = Json::array();
    for (const Edge& e : chain.maximal_edges()) {
        Json je = Json::array();
        for (const auto& [p, v] : e.vertices) je.push_back(Json::array({p, v}));
        edges.push_back(std::move(je));
    }
    j["edges"] = std::move(edges);
    return j;
}

inline Chain chain_from_json(const Json& j, std::vector<std::string>* warnings = nullptr) {
    if (!j.contains("kind") || j["kind"] != "chain") throw ParseError("json: not a chain");
    int r = j.at("r").get<int>();
    int k = j.at("k").get<int>();
    std::vector<int> sizes = j.at("parts").get<std::vector<int>>();
    if (static_cast<int>(sizes.size()) != r) throw ParseError("json chain: parts length mismatch");
    bool closed = j.value("closed", false);
    VertexPartition vp(sizes);
    ChainBuilder b(vp, k);
    std::vector<Edge> edges;
    for (const auto& je : j.at("edges")) {
        std::vector<std::pair<int, int>> vs;
        for (const auto& jv : je) vs.emplace_back(jv.at(0).get<int>(), jv.at(1).get<int>());
        edges.push_back(Edge(std::move(vs)));
    }
    std::vector<Edge> sorted = edges;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() && warnings)
        warnings->push_back("duplicate edges ignored");
    for (const Edge& e : edges) {
        if (closed) b.insert_as_listed(e);
        else b.insert_closed(e);
    }
    return std::move(b).build(closed);
}

// ------------------------------------------------------------------ grids --

inline std::string serialize_grid(const GridSet& g) {
    std::ostringstream out;
    out << "grid dim=" << g.dimension() << " n=" << g.side() << "\n";
    for (const GridPoint& p : g.points()) {
        for (std::size_t i = 0; i < p.c.size(); ++i) out << (i ? " " : "") << p.c[i];
        out << "\n";
    }
    return out.str();
}

inline GridSet parse_grid(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("grid: empty input");
    std::istringstream hs(line);
    std::string tok, a, b;
    if (!(hs >> tok >> a >> b) || tok != "grid" || a.rfind("dim=", 0) != 0 || b.rfind("n=", 0) != 0)
        throw ParseError("grid: malformed header");
    GridSet g(std::stoi(a.substr(4)), std::stoll(b.substr(2)));
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        GridPoint p;
        long long v;
        while (ls >> v) p.c.push_back(v);
        if (p.c.empty()) continue;
        g.insert(std::move(p));
    }
    return g;
}

// ------------------------------------------------------- partition systems --

inline Json partition_system_to_json(const PartitionSystem& s) {
    Json j;
    j["kind"] = "partition-system";
    j["r"] = s.partition().part_count();
    j["k"] = s.uniformity();
    j["parts"] = s.partition().sizes;
    Json tables = Json::array();
    for (Mask a : s.masks()) {
        Json t;
        t["index"] = mask_parts(a);
        t["cells"] = s.cell_count(a);
        Json rle = Json::array();
        const auto& lab = s.labels(a);
        std::size_t i = 0;
        while (i < lab.size()) {
            std::size_t run = 1;
            while (i + run < lab.size() && lab[i + run] == lab[i]) ++run;
            rle.push_back(Json::array({lab[i], run}));
            i += run;
        }
        t["rle"] = std::move(rle);
        tables.push_back(std::move(t));
    }
    j["tables"] = std::move(tables);
    return j;
}

inline PartitionSystem partition_system_from_json(const Json& j) {
    if (!j.contains("kind") || j["kind"] != "partition-system")
        throw ParseError("json: not a partition system");
    VertexPartition vp(j.at("parts").get<std::vector<int>>());
    PartitionSystem s;
    s.init(vp, j.at("k").get<int>());
    for (const auto& t : j.at("tables")) {
        Mask a = mask_from_parts(t.at("index").get<std::vector<int>>());
        std::vector<std::uint32_t> labels;
        for (const auto& run : t.at("rle")) {
            std::uint32_t val = run.at(0).get<std::uint32_t>();
            std::size_t len = run.at(1).get<std::size_t>();
            labels.insert(labels.end(), len, val);
        }
        s.set_partition(a, std::move(labels), t.at("cells").get<std::uint32_t>());
    }
    return s;
}

// ---------------------------------------------------------------- reports --

inline Json log_value_to_json(const LogValue& v) {
    double m;
    std::int64_t e2;
    v.to_mantissa_exp2(&m, &e2);
    Json j;
    j["m"] = m;
    j["e2"] = e2;
    return j;
}

inline LogValue log_value_from_json(const Json& j) {
    return LogValue::from_mantissa_exp2(j.at("m").get<double>(), j.at("e2").get<std::int64_t>());
}

inline Json rational_to_json(const Rational& r) {
    Json j;
    j["num"] = r.num().to_string();
    j["den"] = r.den().to_string();
    j["value"] = r.to_double();
    return j;
}

inline Json quasirandomness_report_to_json(const QuasirandomnessReport& rep) {
    Json j;
    j["kind"] = "quasirandomness-report";
    j["epsilon"] = rep.epsilon;
    j["k"] = rep.k;
    j["eta_override"] = rep.eta_override;
    j["schedule_degenerate"] = rep.schedule_degenerate;
    j["verdict"] = rep.verdict;
    if (rep.has_required_epsilon)
        j["required_epsilon"] = log_value_to_json(rep.required_epsilon);
    Json idx = Json::array();
    for (const IndexVerdict& v : rep.indices) {
        Json e;
        e["index"] = mask_parts(v.index);
        e["degenerate"] = v.degenerate;
        if (!v.degenerate) {
            e["delta"] = rational_to_json(v.delta);
            e["oct"] = v.oct;
            e["oct_star"] = v.oct_star;
            e["reference"] = log_value_to_json(v.reference);
            e["eta_star"] = log_value_to_json(v.eta_star);
            e["threshold"] = log_value_to_json(v.threshold);
            e["pass"] = v.pass;
        }
        idx.push_back(std::move(e));
    }
    j["indices"] = std::move(idx);
    return j;
}

inline Json threshold_schedule_to_json(const ThresholdSchedule& s) {
    Json j;
    j["kind"] = "threshold-schedule";
    j["k"] = s.k;
    j["epsilon"] = s.epsilon;
    j["template_edge_count"] = s.template_edge_count;
    Json deltas = Json::array();
    for (const auto& [size, delta] : s.edge_deltas)
        deltas.push_back(Json::array({size, delta}));
    j["edge_deltas"] = std::move(deltas);
    Json eps = Json::array(), eta = Json::array();
    for (int lvl = 1; lvl <= s.k; ++lvl) {
        eps.push_back(log_value_to_json(s.eps(lvl)));
        eta.push_back(log_value_to_json(s.eta(lvl)));
    }
    j["log_epsilon"] = std::move(eps);
    j["log_eta"] = std::move(eta);
    return j;
}

inline Json counting_verdict_to_json(const CountingVerdict& v) {
    Json j;
    j["kind"] = "counting-verdict";
    j["exact"] = v.exact;
    j["probability"] = v.probability;
    if (v.probability_exact) j["probability_exact"] = rational_to_json(*v.probability_exact);
    j["expected"] = rational_to_json(v.expected);
    j["margin"] = v.margin;
    j["allowed"] = v.allowed;
    if (!v.exact) {
        j["standard_error"] = v.standard_error;
        j["samples"] = v.samples;
    }
    j["pass"] = v.pass;
    return j;
}

inline Json energy_vector_to_json(const EnergyVector& ev) {
    Json j = Json::object();
    for (const auto& [a, sigma] : ev.sigma) {
        std::string key;
        for (int p : mask_parts(a)) key += (key.empty() ? "" : ",") + std::to_string(p);
        j[key] = rational_to_json(sigma);
    }
    return j;
}

inline Json iteration_record_to_json(const IterationRecord& rec) {
    Json t;
    t["iteration"] = rec.iteration;
    t["failing_fraction"] = rec.failing_fraction;
    t["distinct_chains"] = rec.distinct_chains;
    t["energies"] = energy_vector_to_json(rec.energies);
    if (rec.refined_index != 0) {
        t["refined_index"] = mask_parts(rec.refined_index);
        t["classes_refined"] = rec.classes_refined;
        t["refinements_accepted"] = rec.refinements_accepted;
        t["min_accepted_gain"] = rec.min_accepted_gain;
        t["sigma_before"] = rational_to_json(rec.sigma_before);
        t["sigma_after"] = rational_to_json(rec.sigma_after);
    }
    return t;
}

inline Json regularize_result_to_json(const RegularizeResult& res) {
    Json j;
    j["kind"] = "regularize-trace";
    j["converged"] = res.converged;
    j["iterations"] = res.iterations;
    j["failing_fraction"] = res.failing_fraction;
    Json trace = Json::array();
    for (const IterationRecord& rec : res.trace) trace.push_back(iteration_record_to_json(rec));
    j["trace"] = std::move(trace);
    return j;
}

// CSV rows (iteration, energy..., failing fraction) for plotting.
inline std::string trace_to_csv(const std::vector<IterationRecord>& trace) {
    std::ostringstream out;
    out << "iteration,failing_fraction,refined_index,classes_refined,min_accepted_gain";
    if (!trace.empty())
        for (const auto& [a, sigma] : trace.front().energies.sigma) {
            (void)sigma;
            out << ",sigma_";
            for (int p : mask_parts(a)) out << p;
        }
    out << "\n";
    out.precision(17);
    for (const IterationRecord& rec : trace) {
        out << rec.iteration << "," << rec.failing_fraction << ",";
        for (int p : mask_parts(rec.refined_index)) out << p;
        out << "," << rec.classes_refined << "," << rec.min_accepted_gain;
        for (const auto& [a, sigma] : rec.energies.sigma) {
            (void)a;
            out << "," << sigma.to_double();
        }
        out << "\n";
    }
    return out.str();
}

inline std::string regularize_trace_to_csv(const RegularizeResult& res) {
    return trace_to_csv(res.trace);
}

inline Json removal_report_to_json(const RemovalReport& rep) {
    Json j;
    j["kind"] = "removal-report";
    j["a"] = rep.a;
    j["epsilon"] = rep.epsilon;
    j["gamma"] = rep.gamma;
    j["regularize_converged"] = rep.regularize_converged;
    j["regularize_iterations"] = rep.regularize_iterations;
    j["failing_fraction"] = rep.failing_fraction;
    Json sides = Json::array();
    for (std::size_t i = 1; i < rep.removed_total.size(); ++i) {
        Json s;
        s["side"] = i;
        s["edges"] = rep.side_edge_count[i];
        s["removed_quasirandom"] = rep.removed_quasirandom[i];
        s["removed_density"] = rep.removed_density[i];
        s["removed_total"] = rep.removed_total[i];
        sides.push_back(std::move(s));
    }
    j["sides"] = std::move(sides);
    j["initial_simplices"] = rep.initial_simplices;
    j["surviving_simplices"] = rep.surviving_simplices;
    Json trace = Json::array();
    for (const IterationRecord& rec : rep.trace) trace.push_back(iteration_record_to_json(rec));
    j["trace"] = std::move(trace);
    Json survivors = Json::array();
    for (std::size_t i = 0; i < rep.survivor_examples.size(); ++i) {
        Json s;
        s["vertices"] = rep.survivor_examples[i];
        s["counting_bound"] = rep.survivor_bounds[i];
        survivors.push_back(std::move(s));
    }
    j["survivors"] = std::move(survivors);
    return j;
}

inline Json configurations_to_json(const std::vector<Configuration>& cfgs) {
    Json arr = Json::array();
    for (const Configuration& c : cfgs) {
        Json j;
        j["base"] = c.base.c;
        j["d"] = std::llabs(c.d);
        j["orientation"] = c.d >= 0 ? "+" : "-";
        arr.push_back(std::move(j));
    }
    return arr;
}

// ------------------------------------------------------------------ files --

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write " + path);
    out << data;
}

enum class ArtifactKind { chain, grid, partition_system };

inline ArtifactKind detect_kind(const std::string& text) {
    std::size_t i = text.find_first_not_of(" \t\r\n");
    if (i == std::string::npos) throw ParseError("empty artifact");
    if (text.compare(i, 5, "chain") == 0) return ArtifactKind::chain;
    if (text.compare(i, 4, "grid") == 0) return ArtifactKind::grid;
    if (text[i] == '{') {
        Json j = Json::parse(text);
        std::string kind = j.value("kind", "");
        if (kind == "chain") return ArtifactKind::chain;
        if (kind == "partition-system") return ArtifactKind::partition_system;
        throw ParseError("json artifact of unknown kind '" + kind + "'");
    }
    throw ParseError("unrecognized artifact header");
}

inline Chain load_chain(const std::string& path, std::vector<std::string>* warnings = nullptr) {
    std::string text = read_file(path);
    if (detect_kind(text) != ArtifactKind::chain) throw ParseError(path + ": not a chain");
    std::size_t i = text.find_first_not_of(" \t\r\n");
    if (text[i] == '{') return chain_from_json(Json::parse(text), warnings);
    return parse_chain(text, warnings);
}

inline GridSet load_grid(const std::string& path) {
    std::string text = read_file(path);
    if (detect_kind(text) != ArtifactKind::grid) throw ParseError(path + ": not a grid");
    return parse_grid(text);
}

inline PartitionSystem load_partition_system(const std::string& path) {
    std::string text = read_file(path);
    if (detect_kind(text) != ArtifactKind::partition_system)
        throw ParseError(path + ": not a partition system");
    return partition_system_from_json(Json::parse(text));
}

inline std::string emit_report(const Json& report, const std::string& format = "json") {
    if (format == "json") return report.dump(2) + "\n";
    throw std::invalid_argument("emit_report: unsupported format " + format);
}

}  // namespace hyreg
