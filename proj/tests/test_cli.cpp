#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "iosim/trace.hpp"
#include "support/tmpdir.hpp"

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(IOSIM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::size_t line_count(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::size_t lines = 0;
    std::string line;
    while (std::getline(in, line)) ++lines;
    return lines;
}

}  // namespace

TEST_CASE("simulate writes the expected trace shape") {
    testutil::TmpDir tmp;
    const std::string out = tmp.file("t.csv");
    CHECK(run_cli("simulate --size 4 --connected --duration-ms 100 --precision f64 --seed 1 "
                  "--threads 1 --out " + out) == 0);
    CHECK(line_count(out) == 102);  // header + 101 samples

    const iosim::TraceRecord t = iosim::read_trace_csv(out);
    CHECK(t.sample_count() == 101);
    CHECK(t.neuron_count() == 64);
    CHECK(line_count(out + ".json") > 0);  // config sidecar
}

TEST_CASE("validate of a trace against itself reports zero deviation") {
    testutil::TmpDir tmp;
    const std::string trace = tmp.file("a.csv");
    REQUIRE(run_cli("simulate --size 4 --duration-ms 10 --threads 1 --out " + trace) == 0);
    const std::string report = tmp.file("r.json");
    CHECK(run_cli("validate --ref " + trace + " --test " + trace + " --out " + report) == 0);

    std::ifstream in(report);
    const std::string text((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    CHECK(text.find("\"global_max_abs_mv\": 0.0") != std::string::npos);
}

TEST_CASE("bench emits one JSON entry per (size, mode)") {
    testutil::TmpDir tmp;
    const std::string out = tmp.file("b.json");
    CHECK(run_cli("bench --sizes 4,5 --mode unconnected --runs 1 --duration-ms 1 --threads 1 "
                  "--out " + out) == 0);
    std::ifstream in(out);
    const std::string text((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    CHECK(text.find("\"n_cells\": 64") != std::string::npos);
    CHECK(text.find("\"n_cells\": 125") != std::string::npos);
}

TEST_CASE("topology writes the edge list and sidecar") {
    testutil::TmpDir tmp;
    const std::string out = tmp.file("edges.csv");
    CHECK(run_cli("topology --size 4 --avg-degree 10 --rmax 4 --seed 3 --out " + out) == 0);
    CHECK(line_count(out) == 641);  // header + 640 directed edges
    CHECK(line_count(out + ".json") > 0);
}

TEST_CASE("stress runs the frozen scenario end to end") {
    testutil::TmpDir tmp;
    const std::string out = tmp.file("s.csv");
    const std::string spikes = tmp.file("spikes.csv");
    CHECK(run_cli("stress --size 4 --duration-ms 100 --seed 9 --threads 1 --out " + out +
                  " --spikes " + spikes) == 0);
    CHECK(line_count(out) == 102);
    CHECK(line_count(spikes) == 65);  // header + one row per neuron
}

TEST_CASE("identical flags and seed reproduce output files byte for byte") {
    testutil::TmpDir tmp;
    auto slurp = [](const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        REQUIRE(in.good());
        return std::string((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    };

    const std::string a = tmp.file("a.csv"), b = tmp.file("b.csv");
    const std::string flags = "simulate --size 4 --duration-ms 20 --seed 7 --precision f32 ";
    REQUIRE(run_cli(flags + "--threads 1 --out " + a) == 0);
    REQUIRE(run_cli(flags + "--threads 2 --out " + b) == 0);  // thread count is not state
    CHECK(slurp(a) == slurp(b));

    const std::string e1 = tmp.file("e1.csv"), e2 = tmp.file("e2.csv");
    REQUIRE(run_cli("topology --size 5 --avg-degree 10 --rmax 4 --seed 9 --out " + e1) == 0);
    REQUIRE(run_cli("topology --size 5 --avg-degree 10 --rmax 4 --seed 9 --out " + e2) == 0);
    CHECK(slurp(e1) == slurp(e2));

    const std::string s1 = tmp.file("s1.json"), s2 = tmp.file("s2.json");
    REQUIRE(run_cli("stress --size 4 --duration-ms 50 --seed 5 --threads 1 --scenario-out " + s1 +
                    " --out " + tmp.file("t1.csv")) == 0);
    REQUIRE(run_cli("stress --size 4 --duration-ms 50 --seed 5 --threads 1 --scenario-out " + s2 +
                    " --out " + tmp.file("t2.csv")) == 0);
    CHECK(slurp(s1) == slurp(s2));
    CHECK(slurp(tmp.file("t1.csv")) == slurp(tmp.file("t2.csv")));
}

TEST_CASE("usage errors exit with 2") {
    CHECK(run_cli("simulate --no-such-flag 3") == 2);
    CHECK(run_cli("bench --mode sideways --sizes 4 --out /dev/null") == 2);
    CHECK(run_cli("validate --ref /nonexistent.csv --test /nonexistent.csv") == 2);
    CHECK(run_cli("") == 2);  // a subcommand is required
}

TEST_CASE("contract violations exit with 3") {
    testutil::TmpDir tmp;
    // parameter file whose arrays disagree with --size
    const std::string params = tmp.file("p.json");
    {
        std::ofstream out(params);
        out << R"({"conductances": {"CaL": [1.0, 1.0, 1.0]}})";
    }
    CHECK(run_cli("simulate --size 4 --params " + params + " --out " + tmp.file("t.csv")) == 2);

    // mismatched trace shapes
    const std::string a = tmp.file("a.csv"), b = tmp.file("b.csv");
    REQUIRE(run_cli("simulate --size 4 --duration-ms 2 --threads 1 --out " + a) == 0);
    REQUIRE(run_cli("simulate --size 5 --duration-ms 2 --threads 1 --out " + b) == 0);
    CHECK(run_cli("validate --ref " + a + " --test " + b) == 3);
}

TEST_CASE("numerical divergence exits with 4") {
    testutil::TmpDir tmp;
    CHECK(run_cli("simulate --size 4 --dt 10 --steps-per-sample 2 --duration-ms 200 --threads 1 "
                  "--out " + tmp.file("t.csv")) == 4);
}
