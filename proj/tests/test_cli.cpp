#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "straddle/io.hpp"
#include "straddle/random.hpp"
#include "straddle/stateprep.hpp"

using namespace straddle;
namespace fs = std::filesystem;

namespace {

const fs::path& work_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "straddle_cli_tests";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string at(const std::string& name) { return (work_dir() / name).string(); }

struct CliRun {
    int rc = -1;
    std::string out, err;
};

CliRun run_cli(const std::string& args) {
    static int seq = 0;
    const std::string so = at("stdout." + std::to_string(seq));
    const std::string se = at("stderr." + std::to_string(seq));
    ++seq;
    const std::string cmd = std::string(STRADDLE_CLI_PATH) + " " + args + " >" + so + " 2>" + se;
    const int raw = std::system(cmd.c_str());
    CliRun r;
    r.rc = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = read_file(so);
    r.err = read_file(se);
    return r;
}

bool has(const std::string& text, const std::string& needle) {
    return text.find(needle) != std::string::npos;
}

// shared input files, written once
const std::string& inputs_ready() {
    static const std::string marker = [] {
        write_state_json(at("bell.json"), state_library("ghz", {.n = 2}));
        write_partition_json(at("p2.json"), PartitionSpec{{{0}, {1}}});
        write_state_json(at("ghz3.json"), state_library("ghz", {.n = 3}));
        write_state_json(at("w3.json"), state_library("w", {.n = 3}));
        write_partition_json(at("p111.json"), PartitionSpec{{{0}, {1}, {2}}});
        Rng rng(5);
        write_unitary_json(at("u4.json"), random_unitary(16, rng));
        return std::string("ok");
    }();
    return marker;
}

}  // namespace

TEST_CASE("cli prep on a bell pair reports one straddling gate") {
    inputs_ready();
    const CliRun r = run_cli("prep --state " + at("bell.json") + " --partition " + at("p2.json") +
                             " --out " + at("bell.sqc") + " --report " + at("bell_rep.json"));
    CHECK(r.rc == 0);
    CHECK(has(r.out, "straddling_total=1"));
    CHECK(has(read_file(at("bell_rep.json")), "\"straddling_total\": 1"));

    const CliRun cnt = run_cli("count --circuit " + at("bell.sqc"));
    CHECK(cnt.rc == 0);
    CHECK(has(cnt.out, "straddling_total=1"));

    const CliRun sim = run_cli("simulate --circuit " + at("bell.sqc") + " --check-against " +
                               at("bell.json"));
    CHECK(sim.rc == 0);
}

TEST_CASE("cli accepts an inline cut in place of a partition file") {
    inputs_ready();
    const CliRun r = run_cli("prep --state " + at("bell.json") + " --cut '0|1' --out " +
                             at("bell_cut.sqc"));
    CHECK(r.rc == 0);
    CHECK(read_file(at("bell_cut.sqc")) == read_file(at("bell.sqc")));

    const CliRun both = run_cli("prep --state " + at("bell.json") + " --cut '0|1' --partition " +
                                at("p2.json"));
    CHECK(both.rc == 1);
    CHECK(has(both.err, "not both"));
}

TEST_CASE("cli runs are byte-identical across invocations") {
    inputs_ready();
    for (int pass = 0; pass < 2; ++pass) {
        const std::string tag = std::to_string(pass);
        const CliRun p = run_cli("prep --state " + at("w3.json") + " --partition " +
                                 at("p111.json") + " --out " + at("w3_" + tag + ".sqc") +
                                 " --report " + at("w3_rep_" + tag + ".json"));
        CHECK(p.rc == 0);
        const CliRun c = run_cli("certify --state " + at("ghz3.json") + " --cut '0|1|2' " +
                                 "--budget 2 --restarts 4 --seed 17 --report " +
                                 at("cert_rep_" + tag + ".json"));
        CHECK(c.rc == 0);
    }
    CHECK(read_file(at("w3_0.sqc")) == read_file(at("w3_1.sqc")));
    CHECK(read_file(at("w3_rep_0.json")) == read_file(at("w3_rep_1.json")));
    CHECK(read_file(at("cert_rep_0.json")) == read_file(at("cert_rep_1.json")));
}

TEST_CASE("cli synth decomposes a two-by-two-qubit unitary") {
    inputs_ready();
    const CliRun r = run_cli("synth --unitary " + at("u4.json") + " --cut '0,1|2,3' --out " +
                             at("u4.sqc") + " --report " + at("u4_rep.json"));
    CHECK(r.rc == 0);
    CHECK(has(r.out, "straddling_total=60"));
    CHECK(has(read_file(at("u4_rep.json")), "\"straddling_total\": 60"));

    const CliRun cnt = run_cli("count --circuit " + at("u4.sqc"));
    CHECK(cnt.rc == 0);
    CHECK(has(cnt.out, "straddling_total=60"));
}

TEST_CASE("cli count refuses macro circuits") {
    const std::string macro =
        "sqc 1\nqubits 3\npartition 0,1|2\nmuxry 2 ctrls=1,0 angles=0.5,0.25,0.125,0.0625\n";
    write_file(at("macro.sqc"), macro);
    const CliRun r = run_cli("count --circuit " + at("macro.sqc"));
    CHECK(r.rc == 1);
    CHECK(has(r.err, "lower the circuit first"));
}

TEST_CASE("cli simulate flags a wrong reference with exit two") {
    inputs_ready();
    write_state_json(at("zero2.json"), PureState::zero(2));
    const CliRun r = run_cli("simulate --circuit " + at("bell.sqc") + " --check-against " +
                             at("zero2.json"));
    CHECK(r.rc == 2);
    CHECK(has(r.err, "verification failure"));
}

TEST_CASE("cli certify finds a two-gate ghz certificate") {
    inputs_ready();
    const CliRun r = run_cli("certify --state " + at("ghz3.json") + " --partition " +
                             at("p111.json") + " --budget 2 --restarts 6 --seed 7 --out " +
                             at("ghz_cert.sqc"));
    CHECK(r.rc == 0);
    CHECK(has(r.out, "verdict=achievable"));

    const CliRun cnt = run_cli("count --circuit " + at("ghz_cert.sqc") + " --cut '0|1|2' ");
    CHECK(cnt.rc == 0);
    CHECK(has(cnt.out, "straddling_total=2"));

    const CliRun sim = run_cli("simulate --circuit " + at("ghz_cert.sqc") + " --check-against " +
                               at("ghz3.json") + " --tolerance 2e-3");
    CHECK(sim.rc == 0);
}

TEST_CASE("cli certify returns three when the budget is short") {
    inputs_ready();
    const CliRun r = run_cli("certify --state " + at("w3.json") + " --partition " +
                             at("p111.json") + " --budget 2 --restarts 2 --seed 3 --report " +
                             at("w3_cert_rep.json"));
    CHECK(r.rc == 3);
    CHECK(has(r.out, "verdict=not_found"));
    CHECK(has(r.out, "best_fidelity=0."));
    CHECK(has(read_file(at("w3_cert_rep.json")), "\"verdict\": \"not_found\""));
}

TEST_CASE("cli analyze labels decomposability") {
    inputs_ready();
    const CliRun g = run_cli("analyze --state " + at("ghz3.json") + " --partition " +
                             at("p111.json") + " --report " + at("ghz_an.json"));
    CHECK(g.rc == 0);
    CHECK(has(g.out, "decomposable=yes"));
    CHECK(has(read_file(at("ghz_an.json")), "\"common_rank\": 2"));
    CHECK(has(read_file(at("ghz_an.json")), "\"rank\": 2"));

    const CliRun w = run_cli("analyze --state " + at("w3.json") + " --cut '0|1|2' ");
    CHECK(w.rc == 0);
    CHECK(has(w.out, "decomposable=no"));
}

TEST_CASE("cli rejects bad invocations with exit one") {
    inputs_ready();
    CHECK(run_cli("frobnicate").rc == 1);
    CHECK(run_cli("").rc == 1);

    const CliRun unknown = run_cli("prep --state " + at("bell.json") + " --cut '0|1' --badflag");
    CHECK(unknown.rc == 1);
    CHECK_FALSE(unknown.err.empty());

    CHECK(run_cli("certify --state " + at("bell.json") + " --cut '0|1' ").rc == 1);
    CHECK(run_cli("prep --state " + at("bell.json") + " --cut '0|1' --method frobnicate").rc == 1);
    CHECK(run_cli("prep --state " + at("bell.json") + " --cut '0|1|2' ").rc == 1);
    CHECK(run_cli("prep --state " + at("ghz3.json") + " --cut '0|1|2' --max-qubits 2").rc == 1);
    CHECK(run_cli("prep --state " + at("w3.json") + " --cut '0|1|2' --method schmidt-decomposable")
              .rc == 1);
}

TEST_CASE("cli prep auto picks the multipartite engine") {
    inputs_ready();
    Rng rng(33);
    write_state_json(at("rand4.json"), PureState::from_amps(4, random_state_vector(16, rng)));
    const CliRun r = run_cli("prep --state " + at("rand4.json") + " --cut '0|1|2,3' --out " +
                             at("rand4.sqc") + " --report " + at("rand4_rep.json"));
    CHECK(r.rc == 0);
    CHECK(has(read_file(at("rand4_rep.json")), "\"method\": \"multipartite\""));

    const CliRun sim = run_cli("simulate --circuit " + at("rand4.sqc") + " --check-against " +
                               at("rand4.json") + " --tolerance 1e-7");
    CHECK(sim.rc == 0);
}
