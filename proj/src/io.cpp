#include "qbound/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace qbound {

using nlohmann::json;

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void save_counts_csv(const CountRecord& rec, std::ostream& out) {
    out << "# d=" << rec.dim << " N=" << rec.n_settings
        << " integration_s=" << format_double(rec.integration_s) << "\n";
    if (!rec.meta.empty()) out << "# meta=" << rec.meta << "\n";
    out << "A,B,x,y,count\n";
    for (int a = 1; a <= rec.n_settings; ++a)
        for (int b = 1; b <= rec.n_settings; ++b)
            for (int x = 0; x < rec.dim; ++x)
                for (int y = 0; y < rec.dim; ++y)
                    out << a << ',' << b << ',' << x << ',' << y << ','
                        << rec.count(a, b, x, y) << "\n";
}

namespace {

long long parse_ll(const std::string& field, int line_no, const char* what) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(field, &pos);
        if (pos != field.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) + ": bad " + what + " '" + field + "'");
    }
}

}  // namespace

CountRecord load_counts_csv(std::istream& in) {
    CountRecord rec;
    std::string line;
    int line_no = 0;
    bool have_header = false;
    std::vector<bool> seen;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.rfind("# meta=", 0) == 0) {
            rec.meta = line.substr(7);
            continue;
        }
        if (line[0] == '#') {
            int d = 0, n = 0;
            double t = 0.0;
            if (std::sscanf(line.c_str(), "# d=%d N=%d integration_s=%lf", &d, &n, &t) != 3)
                throw ParseError("line " + std::to_string(line_no) + ": bad header '" + line + "'");
            if (d < 2 || n < 1)
                throw ParseError("line " + std::to_string(line_no) + ": bad dimensions in header");
            rec.dim = d;
            rec.n_settings = n;
            rec.integration_s = t;
            rec.counts.assign(static_cast<std::size_t>(n) * n * d * d, 0);
            seen.assign(rec.counts.size(), false);
            have_header = true;
            continue;
        }
        if (line == "A,B,x,y,count") continue;
        if (!have_header) throw ParseError("line " + std::to_string(line_no) + ": missing header");

        std::stringstream ss(line);
        std::string field;
        long long vals[5];
        for (int i = 0; i < 5; ++i) {
            if (!std::getline(ss, field, ','))
                throw ParseError("line " + std::to_string(line_no) + ": expected 5 fields");
            static const char* names[] = {"A", "B", "x", "y", "count"};
            vals[i] = parse_ll(field, line_no, names[i]);
        }
        if (std::getline(ss, field, ','))
            throw ParseError("line " + std::to_string(line_no) + ": expected 5 fields");
        if (vals[0] < 1 || vals[0] > rec.n_settings || vals[1] < 1 || vals[1] > rec.n_settings ||
            vals[2] < 0 || vals[2] >= rec.dim || vals[3] < 0 || vals[3] >= rec.dim)
            throw ParseError("line " + std::to_string(line_no) + ": cell index out of range");
        const int a = static_cast<int>(vals[0]), b = static_cast<int>(vals[1]);
        const int x = static_cast<int>(vals[2]), y = static_cast<int>(vals[3]);
        if (vals[4] < 0)
            throw ParseError("line " + std::to_string(line_no) + ": negative count");
        const std::size_t idx = rec.index(a, b, x, y);
        if (seen[idx]) throw ParseError("line " + std::to_string(line_no) + ": duplicate cell");
        seen[idx] = true;
        rec.counts[idx] = vals[4];
    }
    if (!have_header) throw ParseError("missing '# d=... N=... integration_s=...' header");
    for (int a = 1; a <= rec.n_settings; ++a)
        for (int b = 1; b <= rec.n_settings; ++b)
            for (int x = 0; x < rec.dim; ++x)
                for (int y = 0; y < rec.dim; ++y)
                    if (!seen[rec.index(a, b, x, y)])
                        throw ParseError("incomplete slice (A=" + std::to_string(a) +
                                         ", B=" + std::to_string(b) + ")");
    return rec;
}

void save_counts_json(const CountRecord& rec, std::ostream& out) {
    json j;
    j["dim"] = rec.dim;
    j["n_settings"] = rec.n_settings;
    j["integration_s"] = rec.integration_s;
    j["meta"] = rec.meta;
    json slices = json::array();
    for (int a = 1; a <= rec.n_settings; ++a)
        for (int b = 1; b <= rec.n_settings; ++b) {
            json table = json::array();
            for (int x = 0; x < rec.dim; ++x) {
                json row = json::array();
                for (int y = 0; y < rec.dim; ++y) row.push_back(rec.count(a, b, x, y));
                table.push_back(std::move(row));
            }
            slices.push_back(json{{"a", a}, {"b", b}, {"table", std::move(table)}});
        }
    j["counts"] = std::move(slices);
    out << j.dump(2) << "\n";
}

CountRecord load_counts_json(std::istream& in) {
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad JSON: ") + e.what());
    }
    CountRecord rec;
    try {
        rec.dim = j.at("dim").get<int>();
        rec.n_settings = j.at("n_settings").get<int>();
        rec.integration_s = j.at("integration_s").get<double>();
        rec.meta = j.value("meta", std::string{});
        if (rec.dim < 2 || rec.n_settings < 1) throw ParseError("bad dimensions");
        rec.counts.assign(static_cast<std::size_t>(rec.n_settings) * rec.n_settings * rec.dim *
                              rec.dim, 0);
        std::vector<bool> seen(static_cast<std::size_t>(rec.n_settings) * rec.n_settings, false);
        for (const auto& slice : j.at("counts")) {
            const int a = slice.at("a").get<int>();
            const int b = slice.at("b").get<int>();
            if (a < 1 || a > rec.n_settings || b < 1 || b > rec.n_settings)
                throw ParseError("slice (a=" + std::to_string(a) + ", b=" + std::to_string(b) +
                                 ") out of range");
            seen[static_cast<std::size_t>(a - 1) * rec.n_settings + (b - 1)] = true;
            const auto& table = slice.at("table");
            if (static_cast<int>(table.size()) != rec.dim) throw ParseError("table row count mismatch");
            for (int x = 0; x < rec.dim; ++x) {
                const auto& row = table.at(x);
                if (static_cast<int>(row.size()) != rec.dim)
                    throw ParseError("table column count mismatch");
                for (int y = 0; y < rec.dim; ++y) {
                    const auto& cell = row.at(y);
                    if (!cell.is_number_integer())
                        throw ParseError("count at (a=" + std::to_string(a) + ", b=" +
                                         std::to_string(b) + ", x=" + std::to_string(x) + ", y=" +
                                         std::to_string(y) + ") is not an integer");
                    const long long v = cell.get<long long>();
                    if (v < 0) throw ParseError("negative count");
                    rec.counts[rec.index(a, b, x, y)] = v;
                }
            }
        }
        for (int a = 1; a <= rec.n_settings; ++a)
            for (int b = 1; b <= rec.n_settings; ++b)
                if (!seen[static_cast<std::size_t>(a - 1) * rec.n_settings + (b - 1)])
                    throw ParseError("missing slice (A=" + std::to_string(a) + ", B=" +
                                     std::to_string(b) + ")");
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad count record: ") + e.what());
    }
    return rec;
}

void save_counts(const CountRecord& rec, const std::string& path, FileFormat format) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    format == FileFormat::csv ? save_counts_csv(rec, out) : save_counts_json(rec, out);
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

CountRecord load_counts(const std::string& path, FileFormat format) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return format == FileFormat::csv ? load_counts_csv(in) : load_counts_json(in);
}

CountRecord load_counts_auto(const std::string& path) {
    const bool is_json = path.size() > 5 && path.compare(path.size() - 5, 5, ".json") == 0;
    return load_counts(path, is_json ? FileFormat::json : FileFormat::csv);
}

void save_box_json(const NSBox& box, std::ostream& out) {
    json j;
    j["x"] = box.dims.x;
    j["y"] = box.dims.y;
    j["z"] = box.dims.z;
    j["a"] = box.dims.a;
    j["b"] = box.dims.b;
    j["c"] = box.dims.c;
    json ja = json::array();
    for (int a = 0; a < box.dims.a; ++a) {
        json jb = json::array();
        for (int b = 0; b < box.dims.b; ++b) {
            json jc = json::array();
            for (int ch = 0; ch < box.dims.c; ++ch) {
                json jx = json::array();
                for (int x = 0; x < box.dims.x; ++x) {
                    json jy = json::array();
                    for (int y = 0; y < box.dims.y; ++y) {
                        json jz = json::array();
                        for (int zo = 0; zo < box.dims.z; ++zo)
                            jz.push_back(box.p(a, b, ch, x, y, zo));
                        jy.push_back(std::move(jz));
                    }
                    jx.push_back(std::move(jy));
                }
                jc.push_back(std::move(jx));
            }
            jb.push_back(std::move(jc));
        }
        ja.push_back(std::move(jb));
    }
    j["table"] = std::move(ja);
    out << j.dump(2) << "\n";
}

NSBox load_box_json(std::istream& in) {
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad JSON: ") + e.what());
    }
    try {
        BoxDims dims;
        dims.x = j.at("x").get<int>();
        dims.y = j.at("y").get<int>();
        dims.z = j.at("z").get<int>();
        dims.a = j.at("a").get<int>();
        dims.b = j.at("b").get<int>();
        dims.c = j.at("c").get<int>();
        std::vector<double> data;
        data.reserve(dims.table_size());
        const auto& ja = j.at("table");
        for (int a = 0; a < dims.a; ++a)
            for (int b = 0; b < dims.b; ++b)
                for (int ch = 0; ch < dims.c; ++ch)
                    for (int x = 0; x < dims.x; ++x)
                        for (int y = 0; y < dims.y; ++y)
                            for (int zo = 0; zo < dims.z; ++zo)
                                data.push_back(ja.at(a).at(b).at(ch).at(x).at(y).at(zo).get<double>());
        return NSBox(dims, std::move(data));
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad box: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("bad box: ") + e.what());
    }
}

std::string summary_to_json(const ScanSummary& summary) {
    json j;
    j["d"] = summary.dim;
    json scans = json::array();
    for (const auto& [n, point] : summary.scan.scanned)
        scans.push_back(json{{"N", n}, {"value", point.value}, {"stderr", point.std_err}});
    j["scans"] = std::move(scans);
    j["i_star"] = summary.scan.i_star;
    j["argmin_n"] = summary.scan.argmin_n;
    json margins = json::object();
    if (summary.margin_bm_analytic) margins["bm_analytic"] = *summary.margin_bm_analytic;
    if (summary.margin_bm_bruteforce) margins["bm_bruteforce"] = *summary.margin_bm_bruteforce;
    if (summary.margin_lm) margins["lm"] = *summary.margin_lm;
    j["margins"] = std::move(margins);
    return j.dump(2) + "\n";
}

void save_scan_csv(const MinimumScan& scan, std::ostream& out) {
    out << "N,value,stderr\n";
    for (const auto& [n, point] : scan.scanned)
        out << n << ',' << format_double(point.value) << ',' << format_double(point.std_err)
            << "\n";
}

}  // namespace qbound
