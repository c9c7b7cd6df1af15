#include <specprune/io.hpp>

#include "oracles.hpp"

#include <doctest.h>

#include <cstdlib>
#include <sys/wait.h>

using namespace specprune;

namespace {

struct Run {
    int code;
    std::string err;
};

Run run(const std::string &args, const fs::path &dir) {
    const fs::path err = dir / "stderr.txt";
    const std::string cmd =
        std::string(SPECPRUNE_CLI) + " " + args + " > /dev/null 2> " + err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_text(err)};
}

} // namespace

TEST_CASE("command line round trip and exit codes") {
    const auto dir = oracle::temp_dir("cli");
    const std::string d = dir.string();
    CHECK(run("library --atoms 12 --bands 40 --seed 2 --out " + d + "/lib.csv", dir).code == 0);

    const Run bad_purity = run("synth --lib " + d + "/lib.csv --pixels 50 --endmembers 5 "
                               "--purity 0.1 --seed 1 --out " + d + "/s", dir);
    CHECK(bad_purity.code == 2);
    CHECK(bad_purity.err.find("infeasible purity") != std::string::npos);

    CHECK(run("synth --lib " + d + "/lib.csv --pixels 200 --endmembers 3 --purity 0.8 "
              "--snr 30 --seed 7 --out " + d + "/scene", dir).code == 0);
    CHECK(fs::exists(dir / "scene" / "scene.json"));
    CHECK(fs::exists(dir / "scene" / "scene.bin"));
    CHECK(fs::exists(dir / "scene" / "truth.json"));

    const std::string cube = " --cube " + d + "/scene/scene.json --lib " + d + "/lib.csv";
    CHECK(run("prune" + cube + " --p 3 --truth " + d + "/scene/truth.json --plot " + d +
              "/plot.svg --out " + d + "/report.json", dir).code == 0);
    CHECK(read_json(dir / "report.json").at("scores").size() == 12);
    CHECK(run("prune" + cube + " --p 13 --out " + d + "/r.json", dir).code == 2);
    CHECK(run("prune" + cube + " --p 3 --algo lars --out " + d + "/r.json", dir).code == 2);
    CHECK(run("prune --cube " + d + "/nope.json --lib " + d + "/lib.csv --p 3 --out " + d +
              "/r.json", dir).code == 3);
    CHECK(run("prune" + cube + " --p 3 --out /proc/nope/r.json", dir).code == 3);
    CHECK(run("prune" + cube + " --p 3 --no-denoise --lambda 0 --max-iter 5 --out " + d +
              "/r.json", dir).code == 0);

    CHECK(run("unmix" + cube + " --indices 0,1,2 --out " + d + "/ab.csv", dir).code == 0);
    CHECK(run("unmix" + cube + " --indices , ", dir).code == 2);
    CHECK(run("unmix" + cube + " --indices 0,40", dir).code == 2);

    CHECK(run("eval --truth " + d + "/scene/truth.json --report " + d + "/report.json --out " +
              d + "/eval.json", dir).code == 0);
    CHECK(read_json(dir / "eval.json").contains("asad"));

    write_text(dir / "exp.json", R"({"library": "lib.csv", "n_pixels": 60,
        "n_endmembers": 2, "trials_per_cell": 1, "algorithms": ["nnd", "omp"]})");
    CHECK(run("experiment --spec " + d + "/exp.json --out " + d + "/exp.csv --no-timing", dir)
              .code == 0);
    CHECK(fs::exists(dir / "exp.summary.csv"));

    CHECK(run("frobnicate", dir).code == 2);
}
