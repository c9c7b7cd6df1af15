#include <specprune/io.hpp>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace specprune {

namespace {

std::string format_double(double v, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    return buf;
}

bool is_scalar(const Json &j) { return !j.is_object() && !j.is_array(); }

void dump_value(const Json &j, int precision, int depth, std::string &out) {
    const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
    const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
    switch (j.type()) {
    case Json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first)
                out += ",\n";
            first = false;
            out += pad + Json(it.key()).dump() + ": ";
            dump_value(it.value(), precision, depth + 1, out);
        }
        out += "\n" + close_pad + "}";
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        const bool flat = std::all_of(j.begin(), j.end(), is_scalar);
        out += flat ? "[" : "[\n";
        bool first = true;
        for (const auto &v : j) {
            if (!first)
                out += flat ? ", " : ",\n";
            first = false;
            if (!flat)
                out += pad;
            dump_value(v, precision, depth + 1, out);
        }
        out += flat ? "]" : "\n" + close_pad + "]";
        return;
    }
    case Json::value_t::number_float: {
        const double v = j.get<double>();
        out += std::isfinite(v) ? format_double(v, precision) : "null";
        return;
    }
    default:
        out += j.dump();
    }
}

Json nullable(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json nullable(const std::optional<double> &v) { return v ? nullable(*v) : Json(nullptr); }

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

// RFC 4180 field split of a single line (no embedded newlines).
std::vector<std::string> split_csv(const std::string &line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(trim(field));
            field.clear();
        } else {
            field += c;
        }
    }
    fields.push_back(trim(field));
    return fields;
}

std::string csv_quote(const std::string &s) {
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

double parse_double(std::string_view s, std::size_t line_no) {
    if (!s.empty() && s.front() == '+')
        s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw Error(ErrorKind::ValueParse,
                    "line " + std::to_string(line_no) + ": '" + std::string(s) + "'");
    return v;
}

void write_doubles_le(std::ostream &os, const double *data, std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) {
        auto bits = std::bit_cast<std::uint64_t>(data[i]);
        unsigned char bytes[8];
        for (int b = 0; b < 8; ++b)
            bytes[b] = static_cast<unsigned char>(bits >> (8 * b));
        os.write(reinterpret_cast<const char *>(bytes), 8);
    }
}

double read_double_le(const unsigned char *bytes) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b)
        bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
    return std::bit_cast<double>(bits);
}

template <typename T>
T require(const Json &doc, const char *key, const fs::path &path) {
    if (!doc.contains(key))
        throw Error(ErrorKind::HeaderParse, path.string() + ": missing '" + key + "'");
    try {
        return doc.at(key).get<T>();
    } catch (const Json::exception &e) {
        throw Error(ErrorKind::HeaderParse, path.string() + ": field '" + key + "': " + e.what());
    }
}

} // namespace

std::string dump_json(const Json &doc, int precision) {
    std::string out;
    dump_value(doc, precision, 0, out);
    out += "\n";
    return out;
}

void write_text(const fs::path &path, const std::string &text) {
    if (path.empty())
        throw Error(ErrorKind::IoFailure, "empty output path");
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw Error(ErrorKind::IoFailure, "cannot open " + path.string() + " for writing");
    os << text;
    if (!os)
        throw Error(ErrorKind::IoFailure, "write failed: " + path.string());
}

std::string read_text(const fs::path &path) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw Error(ErrorKind::MissingFile, path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

Json read_json(const fs::path &path) {
    const std::string text = read_text(path);
    try {
        return Json::parse(text);
    } catch (const Json::parse_error &e) {
        throw Error(ErrorKind::HeaderParse, path.string() + ": " + e.what());
    }
}

fs::path raw_path_for(const fs::path &header_path) {
    fs::path raw = header_path;
    raw.replace_extension(".bin");
    return raw;
}

HsiCube load_cube(const fs::path &header_path) {
    if (!fs::exists(header_path))
        throw Error(ErrorKind::MissingFile, header_path.string());
    const Json doc = read_json(header_path);
    if (!doc.is_object())
        throw Error(ErrorKind::HeaderParse, header_path.string() + ": not a JSON object");
    CubeHeader h;
    h.lines = require<Index>(doc, "lines", header_path);
    h.samples = require<Index>(doc, "samples", header_path);
    h.bands = require<Index>(doc, "bands", header_path);
    if (doc.contains("dtype"))
        h.dtype = require<std::string>(doc, "dtype", header_path);
    if (doc.contains("interleave"))
        h.interleave = require<std::string>(doc, "interleave", header_path);
    if (doc.contains("wavelengths") && !doc["wavelengths"].is_null())
        h.wavelengths = require<std::vector<double>>(doc, "wavelengths", header_path);
    if (h.dtype != "f64le" || h.interleave != "pixel-major")
        throw Error(ErrorKind::HeaderParse, "unsupported dtype/interleave " + h.dtype + "/" +
                                                h.interleave);
    if (h.lines < 1 || h.samples < 1 || h.bands < 2)
        throw Error(ErrorKind::HeaderParse, "invalid dimensions in " + header_path.string());

    const fs::path raw = raw_path_for(header_path);
    if (!fs::exists(raw))
        throw Error(ErrorKind::MissingFile, raw.string());
    const std::string bytes = read_text(raw);
    const Index n = h.lines * h.samples;
    const auto expected = static_cast<std::size_t>(8 * n * h.bands);
    if (bytes.size() != expected)
        throw Error(ErrorKind::SizeMismatch, raw.string() + " has " + std::to_string(bytes.size()) +
                                                 " bytes, expected " + std::to_string(expected));

    Matrix data(n, h.bands);
    const auto *p = reinterpret_cast<const unsigned char *>(bytes.data());
    for (Index r = 0; r < n; ++r)
        for (Index c = 0; c < h.bands; ++c, p += 8)
            data(r, c) = read_double_le(p);
    HsiCube cube(std::move(data), h.lines, h.samples, std::move(h.wavelengths));
    cube.check_finite();
    return cube;
}

void save_cube(const HsiCube &cube, const fs::path &header_path) {
    if (header_path.empty())
        throw Error(ErrorKind::IoFailure, "empty output path");
    Json doc = {{"lines", cube.lines()},
                {"samples", cube.samples()},
                {"bands", cube.bands()},
                {"dtype", "f64le"},
                {"interleave", "pixel-major"}};
    if (!cube.wavelengths().empty())
        doc["wavelengths"] = cube.wavelengths();
    write_text(header_path, dump_json(doc, 17));

    const fs::path raw = raw_path_for(header_path);
    std::ofstream os(raw, std::ios::binary | std::ios::trunc);
    if (!os)
        throw Error(ErrorKind::IoFailure, "cannot open " + raw.string() + " for writing");
    // Row-major order gives pixel-major bytes.
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows =
        cube.data();
    write_doubles_le(os, rows.data(), static_cast<std::size_t>(rows.size()));
    if (!os)
        throw Error(ErrorKind::IoFailure, "write failed: " + raw.string());
}

SpectralLibrary load_library(const fs::path &path) {
    if (!fs::exists(path))
        throw Error(ErrorKind::MissingFile, path.string());
    std::istringstream in(read_text(path));
    std::vector<double> wavelengths;
    std::vector<std::string> names;
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        std::vector<std::string> fields = split_csv(t);
        std::string head = fields.front();
        std::transform(head.begin(), head.end(), head.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        const bool is_wavelength_row = head == "wavelength" && names.empty() && wavelengths.empty();
        std::vector<double> values;
        values.reserve(fields.size() - 1);
        for (std::size_t i = 1; i < fields.size(); ++i)
            values.push_back(parse_double(fields[i], line_no));
        if (width == 0)
            width = values.size();
        else if (values.size() != width)
            throw Error(ErrorKind::RaggedRows, "line " + std::to_string(line_no) + " has " +
                                                  std::to_string(values.size()) + " values, expected " +
                                                  std::to_string(width));
        if (is_wavelength_row) {
            wavelengths = std::move(values);
            continue;
        }
        for (double v : values)
            if (!std::isfinite(v))
                throw Error(ErrorKind::NonFiniteData, "line " + std::to_string(line_no));
        names.push_back(fields.front());
        rows.push_back(std::move(values));
    }
    if (rows.empty())
        throw Error(ErrorKind::EmptyLibrary, path.string() + " has no atoms");
    if (rows.size() < 2)
        throw Error(ErrorKind::EmptyLibrary, path.string() + " needs at least two atoms");

    Matrix data(static_cast<Index>(rows.size()), static_cast<Index>(width));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < width; ++c)
            data(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
    SpectralLibrary lib(std::move(data), std::move(names), std::move(wavelengths));
    lib.check_atoms();
    return lib;
}

void save_library(const SpectralLibrary &lib, const fs::path &path) {
    std::string out;
    if (!lib.wavelengths().empty()) {
        out += "wavelength";
        for (double w : lib.wavelengths())
            out += "," + format_double(w, 17);
        out += "\n";
    }
    for (Index r = 0; r < lib.atoms(); ++r) {
        out += csv_quote(lib.names()[static_cast<std::size_t>(r)]);
        for (Index c = 0; c < lib.bands(); ++c)
            out += "," + format_double(lib.data()(r, c), 17);
        out += "\n";
    }
    write_text(path, out);
}

Json report_to_json(const Report &report) {
    const PruneResult &res = report.result;
    Json scores = Json::array();
    for (double s : res.scores)
        scores.push_back(nullable(s));
    Json iterations = Json::array();
    for (const auto &a : res.per_atom)
        iterations.push_back(a.iterations);

    Json metrics = {{"asad", nullable(report.metrics.asad)},
                    {"sre", nullable(report.metrics.sre_db)},
                    {"detection", nullable(report.metrics.detection)},
                    {"sre_exact", report.metrics.sre_db && std::isinf(*report.metrics.sre_db)},
                    {"sre_reference", report.metrics.sre_reference}};
    return {{"schema", 1},
            {"algorithm", report.algorithm},
            {"selected_indices", res.selected.indices()},
            {"selected_names", report.selected_names},
            {"scores", scores},
            {"base_nuclear_norm", nullable(res.base_nuclear_norm)},
            {"per_atom_iterations", iterations},
            {"config", report.config},
            {"metrics", metrics},
            {"seed", report.seed ? Json(*report.seed) : Json(nullptr)},
            {"notes", report.notes}};
}

void save_report(const Report &report, const fs::path &path) {
    write_text(path, dump_json(report_to_json(report), 12));
}

ReportSummary load_report(const fs::path &path) {
    const Json doc = read_json(path);
    ReportSummary s;
    s.algorithm = require<std::string>(doc, "algorithm", path);
    s.selected = IndexSet(require<std::vector<Index>>(doc, "selected_indices", path));
    for (const auto &v : require<Json>(doc, "scores", path))
        s.scores.push_back(v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>());
    return s;
}

void save_truth(const TruthRecord &truth, const fs::path &path) {
    Json abund = Json::array();
    for (Index r = 0; r < truth.abundances.rows(); ++r) {
        Json row = Json::array();
        for (Index c = 0; c < truth.abundances.cols(); ++c)
            row.push_back(truth.abundances(r, c));
        abund.push_back(std::move(row));
    }
    Json spec = {{"n_pixels", truth.spec.n_pixels},
                 {"n_endmembers", truth.spec.n_endmembers},
                 {"max_purity", truth.spec.max_purity},
                 {"snr_db", nullable(truth.spec.snr_db)}};
    Json doc = {{"schema", 1},
                {"seed", truth.spec.seed},
                {"spec", spec},
                {"indices", truth.indices.indices()},
                {"names", truth.names},
                {"library", truth.library},
                {"cube", truth.cube},
                {"abundances", abund}};
    write_text(path, dump_json(doc, 17));
}

TruthRecord load_truth(const fs::path &path) {
    const Json doc = read_json(path);
    TruthRecord t;
    t.spec.seed = require<std::uint64_t>(doc, "seed", path);
    const Json spec = require<Json>(doc, "spec", path);
    t.spec.n_pixels = require<Index>(spec, "n_pixels", path);
    t.spec.n_endmembers = require<Index>(spec, "n_endmembers", path);
    t.spec.max_purity = require<double>(spec, "max_purity", path);
    if (spec.contains("snr_db") && !spec["snr_db"].is_null())
        t.spec.snr_db = spec["snr_db"].get<double>();
    t.indices = IndexSet(require<std::vector<Index>>(doc, "indices", path));
    t.names = require<std::vector<std::string>>(doc, "names", path);
    t.library = require<std::string>(doc, "library", path);
    t.cube = require<std::string>(doc, "cube", path);
    const auto rows = require<std::vector<std::vector<double>>>(doc, "abundances", path);
    const Index p = static_cast<Index>(t.indices.size());
    t.abundances.resize(static_cast<Index>(rows.size()), p);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (static_cast<Index>(rows[r].size()) != p)
            throw Error(ErrorKind::HeaderParse, path.string() + ": abundance row width");
        for (Index c = 0; c < p; ++c)
            t.abundances(static_cast<Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
    }
    return t;
}

void save_abundances_csv(const AbundanceMatrix &m, const std::vector<std::string> &names,
                         const fs::path &path) {
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i)
        out += (i ? "," : "") + csv_quote(names[i]);
    out += "\n";
    for (Index r = 0; r < m.pixels(); ++r) {
        for (Index c = 0; c < m.atoms(); ++c)
            out += (c ? "," : "") + format_double(m.data()(r, c), 17);
        out += "\n";
    }
    write_text(path, out);
}

} // namespace specprune
