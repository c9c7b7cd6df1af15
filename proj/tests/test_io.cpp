#include <specprune/io.hpp>

#include "oracles.hpp"

#include <doctest.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>

using namespace specprune;

namespace {

ErrorKind kind_of(auto &&fn) {
    try {
        fn();
    } catch (const Error &e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::InvalidArgument;
}

void write_bytes(const fs::path &path, const std::string &bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string le_bytes(const std::vector<double> &values) {
    std::string out;
    for (double v : values) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        for (int b = 0; b < 8; ++b)
            out.push_back(static_cast<char>((bits >> (8 * b)) & 0xFF));
    }
    return out;
}

} // namespace

TEST_CASE("load_cube reads a 2 x 3 cube pixel-major") {
    const auto dir = oracle::temp_dir("io_load");
    write_text(dir / "c.json", R"({"lines": 2, "samples": 1, "bands": 3})");
    write_bytes(dir / "c.bin", le_bytes({1, 2, 3, 4, 5, 6}));
    const HsiCube cube = load_cube(dir / "c.json");
    REQUIRE(cube.pixels() == 2);
    REQUIRE(cube.bands() == 3);
    CHECK(cube.data()(0, 2) == 3.0);
    CHECK(cube.data()(1, 0) == 4.0);
}

TEST_CASE("load_cube rejects a short raw file") {
    const auto dir = oracle::temp_dir("io_short");
    write_text(dir / "c.json", R"({"lines": 2, "samples": 1, "bands": 3})");
    write_bytes(dir / "c.bin", std::string(40, '\0'));
    CHECK(kind_of([&] { load_cube(dir / "c.json"); }) == ErrorKind::SizeMismatch);
}

TEST_CASE("load_cube error kinds") {
    const auto dir = oracle::temp_dir("io_errors");
    CHECK(kind_of([&] { load_cube(dir / "none.json"); }) == ErrorKind::MissingFile);
    write_text(dir / "bad.json", "{lines: oops");
    write_bytes(dir / "bad.bin", "");
    CHECK(kind_of([&] { load_cube(dir / "bad.json"); }) == ErrorKind::HeaderParse);
    write_text(dir / "one.json", R"({"lines": 1, "samples": 1, "bands": 1})");
    write_bytes(dir / "one.bin", le_bytes({1}));
    CHECK(kind_of([&] { load_cube(dir / "one.json"); }) == ErrorKind::HeaderParse);
    write_text(dir / "dt.json", R"({"lines": 1, "samples": 1, "bands": 2, "dtype": "f32le"})");
    write_bytes(dir / "dt.bin", le_bytes({1, 2}));
    CHECK(kind_of([&] { load_cube(dir / "dt.json"); }) == ErrorKind::HeaderParse);
    write_text(dir / "nan.json", R"({"lines": 1, "samples": 1, "bands": 2})");
    write_bytes(dir / "nan.bin", le_bytes({1, std::numeric_limits<double>::quiet_NaN()}));
    CHECK(kind_of([&] { load_cube(dir / "nan.json"); }) == ErrorKind::NonFiniteData);
    write_text(dir / "nobin.json", R"({"lines": 1, "samples": 1, "bands": 2})");
    CHECK(kind_of([&] { load_cube(dir / "nobin.json"); }) == ErrorKind::MissingFile);
}

TEST_CASE("save_cube writes little-endian doubles") {
    const auto dir = oracle::temp_dir("io_bytes");
    Matrix x(1, 2);
    x << 0.5, 1.0;
    save_cube(HsiCube(x), dir / "c.json");
    CHECK(read_text(dir / "c.bin") == le_bytes({0.5, 1.0}));
    const Json header = read_json(dir / "c.json");
    CHECK(header.at("bands") == 2);
    CHECK(header.at("dtype") == "f64le");
    CHECK(header.at("interleave") == "pixel-major");
}

TEST_CASE("save_cube to an empty path fails") {
    CHECK(kind_of([] { save_cube(HsiCube(Matrix::Ones(1, 2)), fs::path()); }) ==
          ErrorKind::IoFailure);
}

TEST_CASE("cube round trip is bit exact") {
    const auto dir = oracle::temp_dir("io_roundtrip");
    Matrix x = oracle::gaussian(12, 7, 5);
    x(0, 0) = std::numeric_limits<double>::denorm_min();
    x(0, 1) = -0.0;
    x(0, 2) = std::numeric_limits<double>::max();
    std::vector<double> wl(7);
    for (int i = 0; i < 7; ++i)
        wl[static_cast<std::size_t>(i)] = 400.0 + 1.0 / 3.0 * i;
    save_cube(HsiCube(x, 3, 4, wl), dir / "c.json");
    const HsiCube back = load_cube(dir / "c.json");
    CHECK(back.lines() == 3);
    CHECK(back.samples() == 4);
    CHECK(back.wavelengths() == wl);
    CHECK(std::memcmp(back.data().data(), x.data(), sizeof(double) * 84) == 0);
}

TEST_CASE("load_library reads names and values") {
    const auto dir = oracle::temp_dir("io_lib");
    write_text(dir / "lib.csv", "# comment\n"
                                "wavelength,1,2,3,4,5\n"
                                "alunite,0.1,0.2,0.3,0.4,0.5\n"
                                "\n"
                                "\"calcite, coarse\",1e-1,2E-1,.3,4,5\n"
                                "kaolinite,1,1,1,1,1\n");
    const SpectralLibrary lib = load_library(dir / "lib.csv");
    CHECK(lib.atoms() == 3);
    CHECK(lib.bands() == 5);
    CHECK(lib.names() == std::vector<std::string>{"alunite", "calcite, coarse", "kaolinite"});
    CHECK(lib.wavelengths() == std::vector<double>{1, 2, 3, 4, 5});
    CHECK(lib.data()(1, 2) == 0.3);
}

TEST_CASE("load_library error kinds") {
    const auto dir = oracle::temp_dir("io_lib_errors");
    write_text(dir / "ragged.csv", "a,1,2,3,4,5\nb,1,2,3,4\nc,1,2,3,4,5\n");
    CHECK(kind_of([&] { load_library(dir / "ragged.csv"); }) == ErrorKind::RaggedRows);
    write_text(dir / "zero.csv", "a,1,2,3\nb,0,0,0\n");
    CHECK(kind_of([&] { load_library(dir / "zero.csv"); }) == ErrorKind::ZeroNormAtom);
    write_text(dir / "empty.csv", "# nothing\n");
    CHECK(kind_of([&] { load_library(dir / "empty.csv"); }) == ErrorKind::EmptyLibrary);
    write_text(dir / "nan.csv", "a,1,nan,3\nb,1,2,3\n");
    CHECK(kind_of([&] { load_library(dir / "nan.csv"); }) == ErrorKind::NonFiniteData);
    write_text(dir / "text.csv", "a,1,x,3\nb,1,2,3\n");
    CHECK(kind_of([&] { load_library(dir / "text.csv"); }) == ErrorKind::ValueParse);
    CHECK(kind_of([&] { load_library(dir / "missing.csv"); }) == ErrorKind::MissingFile);
}

TEST_CASE("library round trip preserves values") {
    const auto dir = oracle::temp_dir("io_lib_roundtrip");
    const Matrix d = oracle::gaussian(6, 9, 8).cwiseAbs() * (1.0 / 3.0);
    const SpectralLibrary lib(d, {"a", "b,c", "d\"e", "f", "g", "h"});
    save_library(lib, dir / "lib.csv");
    const SpectralLibrary back = load_library(dir / "lib.csv");
    CHECK(back.names() == lib.names());
    CHECK((back.data() - d).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("reports are deterministic and complete") {
    const auto dir = oracle::temp_dir("io_report");
    Report r;
    r.algorithm = "nnd";
    r.result.scores = {0.5, std::numeric_limits<double>::quiet_NaN(), 1.0 / 3.0, -2.0};
    r.result.selected = IndexSet({2, 0});
    r.result.base_nuclear_norm = 4.25;
    r.selected_names = {"c", "a"};
    r.metrics.sre_db = 12.5;
    r.seed = 7;
    save_report(r, dir / "a.json");
    save_report(r, dir / "b.json");
    CHECK(read_text(dir / "a.json") == read_text(dir / "b.json"));

    const Json doc = read_json(dir / "a.json");
    CHECK(doc.at("scores").size() == 4);
    CHECK(doc.at("scores")[1].is_null());
    CHECK(doc.at("selected_indices") == Json::array({2, 0}));
    CHECK(doc.at("seed") == 7);
    CHECK(doc.at("metrics").contains("asad"));
    CHECK(doc.at("metrics").contains("detection"));
    CHECK(doc.contains("config"));
    CHECK(read_text(dir / "a.json").find("0.333333333333") != std::string::npos);

    const ReportSummary s = load_report(dir / "a.json");
    CHECK(s.selected == r.result.selected);
    CHECK(std::isnan(s.scores[1]));
}

TEST_CASE("report to an unwritable path fails") {
    Report r;
    r.result.scores = {1.0};
    CHECK(kind_of([&] { save_report(r, "/proc/specprune/report.json"); }) == ErrorKind::IoFailure);
}

TEST_CASE("dump_json sorts keys and formats floats") {
    const Json doc = {{"b", 0.1}, {"a", 1}, {"c", std::numeric_limits<double>::infinity()}};
    CHECK(dump_json(doc) == "{\n  \"a\": 1,\n  \"b\": 0.1,\n  \"c\": null\n}\n");
}

TEST_CASE("truth records round trip") {
    const auto dir = oracle::temp_dir("io_truth");
    TruthRecord t;
    t.spec.n_pixels = 3;
    t.spec.n_endmembers = 2;
    t.spec.max_purity = 0.8;
    t.spec.snr_db = 30.0;
    t.spec.seed = 99;
    t.indices = IndexSet({4, 1});
    t.names = {"e", "b"};
    t.abundances = oracle::gaussian(3, 2, 1);
    t.library = "lib.csv";
    t.cube = "scene.json";
    save_truth(t, dir / "truth.json");
    const TruthRecord back = load_truth(dir / "truth.json");
    CHECK(back.indices == t.indices);
    CHECK(back.names == t.names);
    CHECK(back.abundances == t.abundances);
    CHECK(back.spec.snr_db == t.spec.snr_db);
    CHECK(back.spec.seed == 99);
    CHECK(back.library == "lib.csv");
    CHECK(read_json(dir / "truth.json").at("schema") == 1);
}
