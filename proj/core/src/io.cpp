#include "spinkin/io.hpp"

#include "json.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#ifndef SPINKIN_VERSION
#define SPINKIN_VERSION "unknown"
#endif

namespace spinkin::io {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string code_version() { return SPINKIN_VERSION; }

DiagnosticsSeries::DiagnosticsSeries(std::vector<std::string> columns) : columns_(std::move(columns)) {
    for (const auto& c : columns_)
        if (c.empty() || c == "t" || c.find_first_of(",\n\"") != std::string::npos)
            throw InvalidArgument("DiagnosticsSeries: bad column name '" + c + "'");
    data_.resize(columns_.size());
}

void DiagnosticsSeries::append(double t, const std::vector<double>& values) {
    if (values.size() != columns_.size())
        throw InvalidArgument("DiagnosticsSeries: expected " + std::to_string(columns_.size()) + " values, got " +
                              std::to_string(values.size()));
    if (!std::isfinite(t)) throw InvalidArgument("DiagnosticsSeries: non-finite time");
    if (!time_.empty() && !(t > time_.back()))
        throw InvalidArgument("DiagnosticsSeries: time must increase strictly");
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!std::isfinite(values[i])) throw InvalidArgument("DiagnosticsSeries: non-finite value in " + columns_[i]);
    time_.push_back(t);
    for (std::size_t i = 0; i < values.size(); ++i) data_[i].push_back(values[i]);
}

const std::vector<double>& DiagnosticsSeries::column(const std::string& name) const {
    if (name == "t") return time_;
    const auto it = std::find(columns_.begin(), columns_.end(), name);
    if (it == columns_.end()) throw InvalidArgument("DiagnosticsSeries: no column '" + name + "'");
    return data_[static_cast<std::size_t>(it - columns_.begin())];
}

std::string DiagnosticsSeries::to_csv() const {
    std::string out = "t";
    for (const auto& c : columns_) out += "," + c;
    out += "\n";
    char buf[40];
    for (std::size_t r = 0; r < time_.size(); ++r) {
        std::snprintf(buf, sizeof buf, "%.17g", time_[r]);
        out += buf;
        for (const auto& col : data_) {
            std::snprintf(buf, sizeof buf, ",%.17g", col[r]);
            out += buf;
        }
        out += "\n";
    }
    return out;
}

DiagnosticsSeries DiagnosticsSeries::from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw InvalidArgument("from_csv: empty input");
    std::vector<std::string> header;
    {
        std::istringstream h(line);
        std::string cell;
        while (std::getline(h, cell, ',')) header.push_back(cell);
    }
    if (header.empty() || header[0] != "t") throw InvalidArgument("from_csv: first column must be t");
    DiagnosticsSeries s({header.begin() + 1, header.end()});
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::vector<double> v;
        std::istringstream l(line);
        std::string cell;
        while (std::getline(l, cell, ',')) {
            char* end = nullptr;
            const double d = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || *end != '\0')
                throw InvalidArgument("from_csv: bad number '" + cell + "' on line " + std::to_string(row));
            v.push_back(d);
        }
        if (v.size() != header.size()) throw InvalidArgument("from_csv: wrong cell count on line " + std::to_string(row));
        s.append(v[0], {v.begin() + 1, v.end()});
    }
    return s;
}

void write_atomic(const std::string& path, const std::string& contents) {
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("write_atomic: cannot open '" + tmp.string() + "'");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) throw Error("write_atomic: write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw Error("write_atomic: rename to '" + path + "' failed: " + ec.message());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("read_file: cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_snapshot(const std::string& stem, const Snapshot& s) {
    std::size_t n = 1;
    for (const auto& a : s.axes) n *= a.n;
    if (s.axes.empty() || n != s.data.size())
        throw InvalidArgument("write_snapshot: data size " + std::to_string(s.data.size()) + " does not match the axes");
    std::string bytes(s.data.size() * sizeof(double), '\0');
    for (std::size_t i = 0; i < s.data.size(); ++i) {
        auto u = std::bit_cast<std::uint64_t>(s.data[i]);
        if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap64(u);
        std::memcpy(bytes.data() + i * 8, &u, 8);
    }
    json meta;
    meta["format_version"] = snapshot_format_version;
    meta["code_version"] = code_version();
    meta["quantity"] = s.quantity;
    meta["unit"] = s.unit;
    meta["time"] = s.time;
    meta["dtype"] = "float64";
    meta["byte_order"] = "little";
    meta["data_file"] = fs::path(stem + ".f64").filename().string();
    json shape = json::array();
    json axes = json::array();
    for (const auto& a : s.axes) {
        shape.push_back(a.n);
        axes.push_back({{"name", a.name}, {"unit", a.unit}, {"min", a.min}, {"max", a.max}, {"n", a.n}});
    }
    meta["shape"] = shape;
    meta["axes"] = axes;
    meta["attributes"] = s.attributes;
    write_atomic(stem + ".f64", bytes);
    write_atomic(stem + ".json", meta.dump(2) + "\n");
}

Snapshot read_snapshot(const std::string& stem) {
    json meta;
    try {
        meta = json::parse(read_file(stem + ".json"));
    } catch (const json::exception& e) {
        throw InvalidArgument("read_snapshot: bad sidecar for '" + stem + "': " + e.what());
    }
    if (meta.value("format_version", -1) != snapshot_format_version)
        throw InvalidArgument("read_snapshot: unsupported format version");
    Snapshot s;
    s.quantity = meta.at("quantity").get<std::string>();
    s.unit = meta.at("unit").get<std::string>();
    s.time = meta.at("time").get<double>();
    s.attributes = meta.at("attributes").get<std::map<std::string, std::string>>();
    std::size_t n = 1;
    for (const auto& a : meta.at("axes")) {
        s.axes.push_back({a.at("name"), a.at("unit"), a.at("min"), a.at("max"), a.at("n")});
        n *= s.axes.back().n;
    }
    const std::string bytes = read_file(stem + ".f64");
    if (bytes.size() != n * sizeof(double)) throw InvalidArgument("read_snapshot: data file size mismatch");
    s.data.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t u;
        std::memcpy(&u, bytes.data() + i * 8, 8);
        if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap64(u);
        s.data[i] = std::bit_cast<double>(u);
    }
    return s;
}

}  // namespace spinkin::io
