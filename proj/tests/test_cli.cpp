// Exit-code and file contracts of the rplab binary (path via RPLAB_BIN).

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

int checks_failed = 0;

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run(const std::string& cmd) {
    RunResult res;
    FILE* pipe = popen((cmd + " 2>&1").c_str(), "r");
    if (pipe == nullptr) {
        std::perror("popen");
        std::exit(1);
    }
    char buf[4096];
    while (fgets(buf, sizeof buf, pipe) != nullptr) res.output += buf;
    const int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

void expect(bool ok, const std::string& what) {
    if (!ok) {
        ++checks_failed;
        std::cout << "[FAIL] " << what << "\n";
    } else {
        std::cout << "[ ok ] " << what << "\n";
    }
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

long line_count(const std::filesystem::path& p) {
    const std::string text = slurp(p);
    long lines = 0;
    for (char c : text)
        if (c == '\n') ++lines;
    return lines;
}

}  // namespace

int main() {
    const std::string bin = RPLAB_BIN;
    const auto dir = std::filesystem::temp_directory_path() / "rplab_cli_test";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    const std::string d = dir.string();

    RunResult r = run(bin + " --help");
    expect(r.exit_code == 0, "--help exits 0");
    for (const char* cmd : {"gen", "certify", "sweep", "verify", "oracle-check", "exponent"})
        expect(r.output.find(cmd) != std::string::npos, std::string("--help lists ") + cmd);

    r = run(bin + " gen --preset grid --n 2 --delta0 1/16 -o " + d + "/grid.csv");
    expect(r.exit_code == 0, "gen grid exits 0");
    expect(line_count(dir / "grid.csv") == 17L * 17 * 17 + 1, "grid csv has 17^3 rows plus header");

    r = run(bin + " gen --preset cantor --n 2 --axis 3:0,2 --axis 3:0 --axis 3:0 --depth 0 -o " + d + "/one.csv");
    expect(r.exit_code == 0, "gen depth-0 cantor exits 0");
    expect(line_count(dir / "one.csv") == 2, "depth-0 cantor is a single atom");

    r = run(bin + " gen --preset cantor --n 2 --axis 3:0,5 --axis 3:0 --axis 3:0 --depth 2 -o " + d + "/bad.csv");
    expect(r.exit_code == 2, "invalid digit set exits 2");
    expect(r.output.find("axes[0]") != std::string::npos, "invalid digit message names the field");

    r = run(bin + " gen --preset segment --n 2 --direction 0,0,1 --delta0 1/1024 -o " + d +
            "/seg.csv --certify 1 --require-cert --cap 8");
    expect(r.exit_code == 0, "segment certifies alpha 1 under cap 8");

    r = run(bin + " gen --preset segment --n 2 --direction 0,0,1 --delta0 1/1024 -o " + d +
            "/seg.csv --certify 2 --require-cert --cap 8");
    expect(r.exit_code == 3, "segment fails alpha 2 under cap 8 with exit 3");

    r = run(bin + " certify --in " + d + "/seg.csv --n 2 --alpha 1 --delta0 1/1024 -o " + d + "/cert.json");
    expect(r.exit_code == 0, "certify exits 0 on pass");
    expect(slurp(dir / "cert.json").find("\"passed\": true") != std::string::npos, "certificate records passed");

    r = run(bin + " sweep --in " + d + "/seg.csv --n 2 --theorem 3 --k 2 --delta 2^-8 --alpha 1 "
                  "--delta0 2^-10 --epsilon 5e-5 --eta 0.02 --r-min 0.5 --r-max 1.0 --r-count 64 --out " +
            d + "/sweep1");
    expect(r.exit_code == 0, "sweep exits 0");
    expect(line_count(dir / "sweep1" / "report.csv") == 65, "sweep csv has 64 rows plus header");

    r = run(bin + " verify --in " + d + "/seg.csv --n 2 --theorem 3 --k 2 --delta 2^-8 --alpha 1 "
                  "--delta0 2^-10 --epsilon 5e-5 --eta 0.02 --r-min 0.5 --r-max 1.0 --r-count 64 --out " +
            d + "/verify1");
    expect(r.exit_code == 0, "verify passes on the healthy line source");

    RunResult r2 = run(bin + " verify --in " + d + "/seg.csv --n 2 --theorem 3 --k 2 --delta 2^-8 --alpha 1 "
                             "--delta0 2^-10 --epsilon 5e-5 --eta 0.02 --r-min 0.5 --r-max 1.0 --r-count 64 --out " +
                       d + "/verify2");
    expect(r2.exit_code == 0, "verify rerun exits 0");
    expect(slurp(dir / "verify1" / "report.json") == slurp(dir / "verify2" / "report.json"),
           "identical config yields identical report bytes");

    // Claiming a too-small c0 violates the hypothesis: reports still written, exit 4.
    r = run(bin + " verify --in " + d + "/seg.csv --n 2 --theorem 3 --k 2 --delta 2^-8 --alpha 1 --c0 0.5 "
                  "--delta0 2^-10 --epsilon 5e-5 --eta 0.02 --r-min 0.5 --r-max 1.0 --r-count 16 --out " +
            d + "/verify3");
    expect(r.exit_code == 4, "hypothesis violation exits 4");
    expect(slurp(dir / "verify3" / "report.json").find("hypothesis-violated") != std::string::npos,
           "report names the violated hypothesis");

    // Thm2 at t=0 and Thm3 at k=n+1 agree.
    const std::string common = " --in " + d + "/seg.csv --n 2 --delta 2^-8 --alpha 1 --delta0 2^-10 "
                               "--epsilon 2e-6 --eta 0.02 --r-min 0.5 --r-max 1.0 --r-count 32 --out " + d;
    RunResult a = run(bin + " verify --theorem 2 --t 0" + common + "/t2");
    RunResult b = run(bin + " verify --theorem 3 --k 3" + common + "/t3");
    expect(a.exit_code == b.exit_code, "thm2(t=0) and thm3(k=3) verdicts agree");
    expect(slurp(dir / "t2" / "report.csv") == slurp(dir / "t3" / "report.csv"),
           "thm2(t=0) and thm3(k=3) per-r tables agree");

    r = run(bin + " oracle-check --n-points 400");
    expect(r.exit_code == 0, "oracle-check passes");
    r = run(bin + " oracle-check --n-points 400 --inject-bug");
    expect(r.exit_code == 5, "injected cell bug exits 5");
    expect(r.output.find("mismatch") != std::string::npos, "mismatch is reported");
    r = run(bin + " oracle-check --n-points 6000");
    expect(r.exit_code == 2, "size bound exits 2");

    r = run(bin + " exponent --in " + d + "/seg.csv --n 2 --theorem 3 --k 1 --r 0.61 "
                  "--deltas 2^-9,2^-8,2^-7,2^-6");
    expect(r.exit_code == 0, "exponent exits 0");
    expect(r.output.find("fitted exponent") != std::string::npos, "exponent prints the slope");

    r = run(bin + " exponent --in " + d + "/one.csv --n 2 --theorem 3 --k 1 --r 0.61 --deltas 2^-9,2^-8");
    expect(r.exit_code == 2, "too few scales exits 2");

    // Seeded generation responds to RPLAB_SEED.
    r = run(bin + " gen --preset random --n 2 --count 400 --alpha-target 1.5 --seed 1 -o " + d + "/r1.csv");
    expect(r.exit_code == 0, "gen random exits 0");
    r = run("RPLAB_SEED=99 " + bin + " gen --preset random --n 2 --count 400 --alpha-target 1.5 --seed 1 -o " +
            d + "/r2.csv");
    expect(r.exit_code == 0, "gen random with RPLAB_SEED exits 0");
    expect(slurp(dir / "r1.csv") != slurp(dir / "r2.csv"), "RPLAB_SEED overrides the configured seed");
    r = run("RPLAB_SEED=99 " + bin + " gen --preset random --n 2 --count 400 --alpha-target 1.5 --seed 1 -o " +
            d + "/r3.csv");
    expect(slurp(dir / "r2.csv") == slurp(dir / "r3.csv"), "seeded generation is reproducible");

    if (checks_failed != 0) {
        std::cout << checks_failed << " cli checks failed\n";
        return 1;
    }
    std::cout << "all cli checks passed\n";
    return 0;
}
