#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "straddle/certifier.hpp"
#include "straddle/io.hpp"
#include "straddle/qsd.hpp"
#include "straddle/schmidt.hpp"
#include "straddle/stateprep.hpp"

using namespace straddle;

namespace {

struct Opts {
    std::string state, unitary, partition, circuit;
    std::string method = "auto";
    std::string cut;
    std::string out, report, check_against;
    int budget = 0;
    int restarts = 20;
    std::uint64_t seed = 1;
    double tolerance = 1e-10;
    int max_qubits = 0;  // 0 = per-command default
};

using Digests = std::map<std::string, std::string>;

std::string slurp(const std::string& path, const std::string& key, Digests& digests) {
    std::string bytes = read_file(path);
    digests[key] = digest_hex(bytes);
    return bytes;
}

PureState load_state(const std::string& path, const std::string& key, Digests& digests) {
    slurp(path, key, digests);
    return read_state_json(path);
}

PartitionSpec resolve_partition(const Opts& o, Digests& digests,
                                const std::optional<PartitionSpec>& fallback = std::nullopt) {
    if (!o.partition.empty() && !o.cut.empty())
        throw InvalidInput("give either --partition or --cut, not both");
    if (!o.partition.empty()) {
        slurp(o.partition, "partition", digests);
        return read_partition_json(o.partition);
    }
    if (!o.cut.empty()) {
        digests["cut"] = digest_hex(o.cut);
        return parse_partition_string(o.cut);
    }
    if (fallback) {
        digests["cut"] = digest_hex(partition_to_string(*fallback));
        return *fallback;
    }
    throw InvalidInput("a partition is required: pass --partition <file> or --cut <spec>");
}

void emit_report(const Opts& o, const std::string& command, const Digests& digests, Json payload,
                 std::optional<std::uint64_t> seed = std::nullopt) {
    if (o.report.empty()) return;
    write_file(o.report, run_report(command, digests, std::move(payload), seed).dump());
}

template <class F>
int timed(const char* name, F&& body) {
    const auto t0 = std::chrono::steady_clock::now();
    const int rc = body();
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    std::fprintf(stderr, "%s: wall time %.1f ms\n", name, ms);
    return rc;
}

int run_prep(const Opts& o) {
    Digests digests;
    const PureState target = load_state(o.state, "state", digests);
    const PartitionSpec part = resolve_partition(o, digests);
    if (part.num_qubits() != target.n)
        throw InvalidInput("partition covers " + std::to_string(part.num_qubits()) +
                           " qubits but the state has " + std::to_string(target.n));
    const int cap = o.max_qubits > 0 ? o.max_qubits : 16;
    if (target.n > cap)
        throw ResourceLimit("state has " + std::to_string(target.n) +
                            " qubits, above the --max-qubits cap " + std::to_string(cap));

    std::string method = o.method;
    if (method == "auto") {
        const DecomposabilityResult d = is_schmidt_decomposable(target, part);
        if (d.verdict == DecomposabilityResult::Verdict::yes)
            method = "schmidt-decomposable";
        else if (part.num_parties() == 2)
            method = "schmidt-path";
        else
            method = "multipartite";
    }

    PrepResult res;
    if (method == "schmidt-path")
        res = prep_schmidt_path(target, part);
    else if (method == "mux-disentangle")
        res = prep_mux_disentangle(target, part);
    else if (method == "multipartite")
        res = prep_multipartite(target, part);
    else if (method == "schmidt-decomposable")
        res = prep_schmidt_decomposable(target, part);
    else
        throw InvalidInput("unknown method \"" + method +
                           "\"; want auto, schmidt-path, mux-disentangle, multipartite, or "
                           "schmidt-decomposable");

    if (!o.out.empty()) {
        const Circuit lowered = fuse_straddling(lower(res.circuit, part), part);
        write_sqc(o.out, lowered, part);
    }
    emit_report(o, "prep", digests, report_to_json(res.report));
    std::cout << "prep: method=" << res.report.method
              << " straddling_total=" << res.report.straddling_total
              << " predicted=" << res.report.predicted
              << " fidelity=" << format_real(res.report.fidelity) << "\n";
    return 0;
}

int run_synth(const Opts& o) {
    Digests digests;
    slurp(o.unitary, "unitary", digests);
    const Matrix u = read_unitary_json(o.unitary);
    const PartitionSpec part = resolve_partition(o, digests);

    QsdConfig cfg;
    if (o.max_qubits > 0) cfg.max_qubits = o.max_qubits;
    const QsdResult res = synth_unitary_qsd(u, part, cfg);

    if (!o.out.empty()) {
        const Circuit lowered = fuse_straddling(lower(res.circuit, part), part);
        write_sqc(o.out, lowered, part);
    }
    emit_report(o, "synth", digests, report_to_json(res.report));
    std::cout << "synth: straddling_total=" << res.report.straddling_total
              << " predicted=" << res.report.predicted
              << " fidelity=" << format_real(res.report.fidelity) << "\n";
    return 0;
}

int run_analyze(const Opts& o) {
    Digests digests;
    const PureState target = load_state(o.state, "state", digests);
    const PartitionSpec part = resolve_partition(o, digests);
    if (part.num_qubits() != target.n)
        throw InvalidInput("partition covers " + std::to_string(part.num_qubits()) +
                           " qubits but the state has " + std::to_string(target.n));

    std::vector<Json> cuts;
    for (int j = 0; j < part.num_parties(); ++j) {
        std::vector<int> rest;
        for (int q = 0; q < target.n; ++q)
            if (part.party_of(q) != j) rest.push_back(q);
        if (rest.empty()) continue;  // single-party partition has no cut
        const PartitionSpec cut = PartitionSpec::bipartition(part.party_sorted(j), rest);
        const SchmidtDecomposition sd = schmidt_decompose(target, cut);
        const double entropy = entanglement_entropy(target, cut);
        Json c = Json::object();
        c.set("entropy", Json::real(entropy));
        c.set("party", Json::integer(j));
        c.set("rank", Json::integer(sd.rank));
        cuts.push_back(std::move(c));
        std::cout << "analyze: party " << j << " vs rest: rank=" << sd.rank
                  << " entropy=" << format_real(entropy) << "\n";
    }

    const DecomposabilityResult d = is_schmidt_decomposable(target, part);
    const char* verdict = d.verdict == DecomposabilityResult::Verdict::yes  ? "yes"
                          : d.verdict == DecomposabilityResult::Verdict::no ? "no"
                                                                            : "indeterminate";
    Json payload = Json::object();
    payload.set("cuts", Json::array(std::move(cuts)));
    payload.set("decomposable", Json::str(verdict));
    payload.set("reason", Json::str(d.reason));
    if (d.form) payload.set("common_rank", Json::integer(static_cast<long long>(d.form->weights.size())));
    emit_report(o, "analyze", digests, std::move(payload));
    std::cout << "analyze: decomposable=" << verdict;
    if (!d.reason.empty()) std::cout << " (" << d.reason << ")";
    std::cout << "\n";
    return 0;
}

int run_certify(const Opts& o) {
    Digests digests;
    const PureState target = load_state(o.state, "state", digests);
    const PartitionSpec part = resolve_partition(o, digests);

    const CertificateResult res =
        certify_min_straddle(target, part, o.budget, o.restarts, o.seed);
    const bool found = res.verdict == CertVerdict::Achievable;

    if (!o.out.empty() && res.circuit) write_sqc(o.out, *res.circuit, part);
    Json payload = Json::object();
    payload.set("best_fidelity", Json::real(res.best_fidelity));
    payload.set("budget", Json::integer(o.budget));
    payload.set("restarts_used", Json::integer(res.restarts_used));
    payload.set("templates_tried", Json::integer(res.templates_tried));
    payload.set("verdict", Json::str(found ? "achievable" : "not_found"));
    emit_report(o, "certify", digests, std::move(payload), o.seed);
    std::cout << "certify: verdict=" << (found ? "achievable" : "not_found")
              << " best_fidelity=" << format_real(res.best_fidelity)
              << " restarts_used=" << res.restarts_used
              << " templates_tried=" << res.templates_tried << "\n";
    return found ? 0 : 3;
}

int run_simulate(const Opts& o) {
    Digests digests;
    slurp(o.circuit, "circuit", digests);
    const SqcFile f = read_sqc(o.circuit);

    PureState in = PureState::zero(f.circuit.n);
    if (!o.state.empty()) {
        in = load_state(o.state, "state", digests);
        if (in.n != f.circuit.n)
            throw InvalidInput("initial state has " + std::to_string(in.n) +
                               " qubits but the circuit has " + std::to_string(f.circuit.n));
    }
    const PureState out_state = apply_circuit(f.circuit, in);
    if (!o.out.empty()) write_state_json(o.out, out_state);

    Json payload = Json::object();
    payload.set("checked", Json::boolean(!o.check_against.empty()));
    payload.set("n", Json::integer(f.circuit.n));
    int rc = 0;
    if (!o.check_against.empty()) {
        const PureState ref = load_state(o.check_against, "check_against", digests);
        if (ref.n != out_state.n)
            throw InvalidInput("reference state has " + std::to_string(ref.n) +
                               " qubits but the circuit has " + std::to_string(out_state.n));
        // states are rays: align the global phase before comparing amplitudes
        const cx ip = ref.amps.dot(out_state.amps);
        const cx phase = std::abs(ip) > 0 ? ip / std::abs(ip) : cx(1, 0);
        const double dev = (out_state.amps - phase * ref.amps).cwiseAbs().maxCoeff();
        payload.set("max_deviation", Json::real(dev));
        std::cout << "simulate: n=" << out_state.n << " max_deviation=" << format_real(dev)
                  << " tolerance=" << format_real(o.tolerance) << "\n";
        if (dev > o.tolerance) {
            emit_report(o, "simulate", digests, std::move(payload));
            throw VerificationFailure("simulated state deviates from the reference by " +
                                      format_real(dev) + ", above " + format_real(o.tolerance));
        }
    } else {
        std::cout << "simulate: n=" << out_state.n << " ok\n";
    }
    emit_report(o, "simulate", digests, std::move(payload));
    return rc;
}

int run_count(const Opts& o) {
    Digests digests;
    slurp(o.circuit, "circuit", digests);
    const SqcFile f = read_sqc(o.circuit);
    const PartitionSpec part = resolve_partition(o, digests, f.partition);
    if (part.num_qubits() != f.circuit.n)
        throw InvalidInput("partition covers " + std::to_string(part.num_qubits()) +
                           " qubits but the circuit has " + std::to_string(f.circuit.n));

    const StraddleCount sc = count_straddling(f.circuit, part);
    Json per_pair = Json::object();
    for (const auto& [pair, cnt] : sc.per_pair)
        per_pair.set(std::to_string(pair.first) + "|" + std::to_string(pair.second),
                     Json::integer(cnt));
    Json payload = Json::object();
    payload.set("per_pair", std::move(per_pair));
    payload.set("total", Json::integer(sc.total));
    emit_report(o, "count", digests, std::move(payload));
    std::cout << "count: straddling_total=" << sc.total << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    Opts o;
    CLI::App app{"straddle: count, synthesize, and certify straddling gates on partitioned "
                 "qubit registers"};
    app.require_subcommand(1);
    app.footer("exit codes: 0 success or certificate found, 1 invalid input, "
               "2 verification failure, 3 certificate not found");

    CLI::App* prep = app.add_subcommand("prep", "synthesize a circuit preparing a state from |0>");
    prep->add_option("--state", o.state, "target state JSON")->required();
    prep->add_option("--partition", o.partition, "partition JSON");
    prep->add_option("--cut", o.cut, "inline partition, e.g. 0,1|2,3");
    prep->add_option("--method", o.method,
                     "auto|schmidt-path|mux-disentangle|multipartite|schmidt-decomposable");
    prep->add_option("--out", o.out, "write the lowered circuit (.sqc)");
    prep->add_option("--report", o.report, "write a run report (JSON)");
    prep->add_option("--max-qubits", o.max_qubits, "input size cap (default 16)");

    CLI::App* synth = app.add_subcommand("synth", "decompose a unitary across a bipartition");
    synth->add_option("--unitary", o.unitary, "unitary JSON")->required();
    synth->add_option("--partition", o.partition, "partition JSON");
    synth->add_option("--cut", o.cut, "inline partition, e.g. 0,1|2,3");
    synth->add_option("--out", o.out, "write the lowered circuit (.sqc)");
    synth->add_option("--report", o.report, "write a run report (JSON)");
    synth->add_option("--max-qubits", o.max_qubits, "input size cap (default 8)");

    CLI::App* analyze = app.add_subcommand("analyze", "per-cut Schmidt structure of a state");
    analyze->add_option("--state", o.state, "state JSON")->required();
    analyze->add_option("--partition", o.partition, "partition JSON");
    analyze->add_option("--cut", o.cut, "inline partition, e.g. 0,1|2,3");
    analyze->add_option("--report", o.report, "write a run report (JSON)");

    CLI::App* certify = app.add_subcommand(
        "certify", "search for a preparation circuit within a straddling-gate budget");
    certify->add_option("--state", o.state, "target state JSON")->required();
    certify->add_option("--partition", o.partition, "partition JSON");
    certify->add_option("--cut", o.cut, "inline partition, e.g. 0,1|2,3");
    certify->add_option("--budget", o.budget, "straddling-gate budget")->required();
    certify->add_option("--restarts", o.restarts, "optimizer restarts per template (default 20)");
    certify->add_option("--seed", o.seed, "search seed (default 1)");
    certify->add_option("--out", o.out, "write the certificate circuit (.sqc) when found");
    certify->add_option("--report", o.report, "write a run report (JSON)");

    CLI::App* simulate = app.add_subcommand("simulate", "apply a circuit to a state");
    simulate->add_option("--circuit", o.circuit, "circuit file (.sqc)")->required();
    simulate->add_option("--state", o.state, "initial state JSON (default |0...0>)");
    simulate->add_option("--out", o.out, "write the final state JSON");
    simulate->add_option("--check-against", o.check_against, "reference state JSON to compare");
    simulate->add_option("--tolerance", o.tolerance,
                         "max amplitude deviation for --check-against (default 1e-10)");
    simulate->add_option("--report", o.report, "write a run report (JSON)");

    CLI::App* count = app.add_subcommand("count", "count straddling gates in a lowered circuit");
    count->add_option("--circuit", o.circuit, "circuit file (.sqc)")->required();
    count->add_option("--partition", o.partition, "partition JSON (default: circuit header)");
    count->add_option("--cut", o.cut, "inline partition, e.g. 0,1|2,3");
    count->add_option("--report", o.report, "write a run report (JSON)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }

    try {
        if (app.got_subcommand(prep)) return timed("prep", [&] { return run_prep(o); });
        if (app.got_subcommand(synth)) return timed("synth", [&] { return run_synth(o); });
        if (app.got_subcommand(analyze)) return timed("analyze", [&] { return run_analyze(o); });
        if (app.got_subcommand(certify)) return timed("certify", [&] { return run_certify(o); });
        if (app.got_subcommand(simulate)) return timed("simulate", [&] { return run_simulate(o); });
        if (app.got_subcommand(count)) return timed("count", [&] { return run_count(o); });
    } catch (const VerificationFailure& e) {
        std::cerr << "verification failure: " << e.what() << "\n";
        return 2;
    } catch (const ResourceLimit& e) {
        std::cerr << "resource limit: " << e.what() << "\n";
        return 1;
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
