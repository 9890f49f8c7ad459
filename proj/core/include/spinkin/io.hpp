#pragma once

#include "spinkin/common.hpp"

#include <map>
#include <string>
#include <vector>

namespace spinkin::io {

/// Time series of named scalar diagnostics sampled at strictly increasing times.
class DiagnosticsSeries {
public:
    explicit DiagnosticsSeries(std::vector<std::string> columns);

    /// Throws InvalidArgument on a wrong column count, non-finite values or non-increasing time.
    void append(double t, const std::vector<double>& values);

    const std::vector<std::string>& columns() const { return columns_; }
    const std::vector<double>& time() const { return time_; }
    const std::vector<double>& column(const std::string& name) const;
    std::size_t size() const { return time_.size(); }

    /// CSV with header "t,<columns>" and 17 significant digits.
    std::string to_csv() const;
    static DiagnosticsSeries from_csv(const std::string& text);

private:
    std::vector<std::string> columns_;
    std::vector<double> time_;
    std::vector<std::vector<double>> data_;
};

/// Writes the file next to its destination and renames it into place.
void write_atomic(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

inline constexpr int snapshot_format_version = 1;

struct SnapshotAxis {
    std::string name;
    std::string unit;
    double min = 0.0;
    double max = 0.0;
    std::size_t n = 0;
};

/// Dense row-major float64 array with its axes; the last axis varies fastest.
struct Snapshot {
    std::string quantity;
    std::string unit;
    double time = 0.0;
    std::vector<SnapshotAxis> axes;
    std::vector<double> data;
    std::map<std::string, std::string> attributes;
};

/// Writes <stem>.f64 (little-endian) and <stem>.json (shape, axes, units, format and code versions).
void write_snapshot(const std::string& stem, const Snapshot& s);
Snapshot read_snapshot(const std::string& stem);

std::string code_version();

}  // namespace spinkin::io
