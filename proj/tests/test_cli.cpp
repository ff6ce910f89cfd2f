#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "tiltbound/csv.hpp"

#ifndef TILTBOUND_CLI_PATH
#error "TILTBOUND_CLI_PATH must point at the tiltbound binary"
#endif

namespace {

namespace fs = std::filesystem;

struct CliResult {
    int status = -1;
    std::string out;
    std::string err;
};

fs::path scratch_dir() {
    fs::path dir = fs::temp_directory_path() / "tiltbound_cli_tests";
    fs::create_directories(dir);
    return dir;
}

CliResult run_cli(const std::string& args) {
    static int counter = 0;
    fs::path dir = scratch_dir();
    fs::path out = dir / ("stdout." + std::to_string(++counter));
    fs::path err = dir / ("stderr." + std::to_string(counter));
    std::string cmd = std::string(TILTBOUND_CLI_PATH) + " " + args + " >" + out.string() +
                      " 2>" + err.string();
    int rc = std::system(cmd.c_str());
    CliResult r;
    r.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = tiltbound::read_file(out.string());
    r.err = tiltbound::read_file(err.string());
    return r;
}

std::string write_scratch(const std::string& name, const std::string& content) {
    fs::path p = scratch_dir() / name;
    tiltbound::atomic_write_file(p.string(), content);
    return p.string();
}

}  // namespace

TEST_CASE("cli: version banner") {
    CliResult r = run_cli("--version");
    CHECK(r.status == 0);
    CHECK(r.out.find("tiltbound 1.0.0") != std::string::npos);
}

TEST_CASE("cli: classify prints bare verdict JSON") {
    CliResult r = run_cli("classify --m 1 --gamma -1");
    CHECK(r.status == 0);
    CHECK(r.out == "{\"verdict\":\"not_LC\"}\n");
    CHECK(r.err.empty());
    CliResult b = run_cli("classify --m 1 --gamma 0");
    CHECK(b.status == 0);
    CHECK(b.out == "{\"verdict\":\"LC\",\"boundary\":true}\n");
}

TEST_CASE("cli: usage problems exit 1 with a JSON error line") {
    CliResult none = run_cli("");
    CHECK(none.status == 1);
    CHECK(none.err.find("{\"error\":") == 0);
    CliResult unknown = run_cli("classify --m 1 --gamma 0 --frobnicate");
    CHECK(unknown.status == 1);
    CHECK(unknown.err.find("{\"error\":") == 0);
    CliResult badgrid = run_cli("cgf --source '{\"kind\":\"gaussian\"}' --grid banana");
    CHECK(badgrid.status == 1);
    CliResult badtail = run_cli("tailbound --invert --tail weird:x=1 --phi phi2");
    CHECK(badtail.status == 1);
    CliResult badtarget = run_cli("certify --target xyz --alpha 1");
    CHECK(badtarget.status == 1);
    CliResult missing = run_cli("cgf --source /nonexistent/source.json");
    CHECK(missing.status == 1);
}

TEST_CASE("cli: domain violations exit 2") {
    std::string tse = write_scratch("tse.json", "{\"kind\":\"two_sided_exponential\",\"rate\":1.5}");
    CliResult r = run_cli("tilt --source " + tse + " --lambda 2.0");
    CHECK(r.status == 2);
    CHECK(r.err.find("{\"error\":") == 0);
    // Structured-but-invalid parameters land in the same bucket.
    CliResult bad = run_cli("cgf --source '{\"kind\":\"gaussian\",\"sigma\":-1}'");
    CHECK(bad.status == 2);
}

TEST_CASE("cli: inconclusive certificates exit 3") {
    std::string csv = "x,value\n";
    for (int x = 0; x <= 8; ++x) {
        double v = static_cast<double>(x) * x + (x == 4 ? 1.5 : 0.0);
        csv += tiltbound::format_double(x) + "," + tiltbound::format_double(v) + "\n";
    }
    std::string path = write_scratch("bumped.csv", csv);
    CliResult r = run_cli("certify --target oc --in " + path + " --tol 0.5");
    CHECK(r.status == 3);
    CHECK(r.out.find("\"verdict\":\"inconclusive\"") != std::string::npos);
    CliResult hard = run_cli("certify --target oc --in " + path + " --tol 0.05");
    CHECK(hard.status == 0);  // a verdict was reached, even though not_convex
    CHECK(hard.out.find("\"verdict\":\"not_convex\"") != std::string::npos);
}

TEST_CASE("cli: norm reports infinity with exit 3 when no rho works") {
    // Narrow custom phi (window [0,2]) against a wide gaussian.
    std::string csv = "x,value\n";
    for (int i = 0; i <= 200; ++i) {
        double x = 0.01 * i;
        csv += tiltbound::format_double(x) + "," + tiltbound::format_double(0.5 * x * x) + "\n";
    }
    std::string phi_path = write_scratch("narrow_phi.csv", csv);
    write_scratch("narrow_phi.csv.json",
                  "{\"left_extension\":\"plus_infinity_outside\","
                  "\"right_extension\":\"plus_infinity_outside\"}");
    std::string src = write_scratch("gauss2.json", "{\"kind\":\"gaussian\",\"sigma\":2}");
    CliResult r = run_cli("norm --source " + src + " --phi custom:" + phi_path +
                          " --grid 0.5:3:26");
    CHECK(r.status == 3);
    CHECK(r.out.find("\"value\":\"infinity\"") != std::string::npos);
}

TEST_CASE("cli: pinned tail bound and inverse constants") {
    CliResult fwd = run_cli("tailbound --phi phi2 --rho 1 --x 2");
    CHECK(fwd.status == 0);
    CHECK(fwd.out.find("0.1353352832366127") != std::string::npos);
    CliResult inv = run_cli("tailbound --invert --tail zero --phi phi2");
    CHECK(inv.status == 0);
    CHECK(inv.out.find("\"C\":0.0625") != std::string::npos);
    CHECK(inv.out.find("\"prefix\":16") != std::string::npos);
}

TEST_CASE("cli: Monte Carlo output is byte-stable across runs") {
    std::string src = write_scratch("gauss1.json", "{\"kind\":\"gaussian\",\"sigma\":1}");
    fs::path out = scratch_dir() / "mc.csv";
    std::string cmd = "cgf --source " + src +
                      " --method monte_carlo --n 50000 --seed 3 --grid=-1:1:11 --out " +
                      out.string();
    CliResult ra = run_cli(cmd);
    CHECK(ra.status == 0);
    std::string first = tiltbound::read_file(out.string());
    CliResult rb = run_cli(cmd);
    CHECK(rb.status == 0);
    CHECK(ra.out == rb.out);
    CHECK(tiltbound::read_file(out.string()) == first);
    CHECK(first.find("lambda,log_mgf,phi") == 0);
}

TEST_CASE("cli: --config replays a command identically") {
    std::string cfg = write_scratch("classify.json",
                                    "{\"command\":\"classify\",\"m\":1,\"gamma\":0}");
    CliResult via_config = run_cli("--config " + cfg);
    CliResult via_flags = run_cli("classify --m 1 --gamma 0");
    CHECK(via_config.status == 0);
    CHECK(via_config.out == via_flags.out);
}

TEST_CASE("cli: plot merges series and renames duplicates") {
    std::string csv = "x,value\n0,0\n1,1\n2,4\n";
    fs::path d1 = scratch_dir() / "p1";
    fs::path d2 = scratch_dir() / "p2";
    fs::create_directories(d1);
    fs::create_directories(d2);
    tiltbound::atomic_write_file((d1 / "shape.csv").string(), csv);
    tiltbound::atomic_write_file((d2 / "shape.csv").string(), csv);
    fs::path out = scratch_dir() / "plot.csv";
    CliResult r = run_cli("plot --in " + (d1 / "shape.csv").string() + " --in " +
                          (d2 / "shape.csv").string() + " --out " + out.string());
    CHECK(r.status == 0);
    CHECK(r.err.find("{\"warning\":") == 0);
    std::string merged = tiltbound::read_file(out.string());
    CHECK(merged.rfind("series,x,y\n", 0) == 0);
    CHECK(merged.find("\nshape,") != std::string::npos);
    CHECK(merged.find("\nshape_2,") != std::string::npos);
}
