#pragma once

#include <string>
#include <vector>

#include "nltr/units.hpp"

namespace nltr {

// Shortest round-trippable decimal rendering ("%.17g", '.' decimal point).
std::string fmt_g17(double v);

// Write-temp-then-rename so readers never observe a partial file.
void atomic_write_file(const std::string& path, const std::string& content);

std::string read_text_file(const std::string& path);

// Minimal CSV with '\n' line endings and no quoting; none of the emitted
// fields can contain a comma.
struct csv_table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

csv_table parse_csv_text(const std::string& text);

// One 2-port S-parameter sample; Touchstone v1 column order S11 S21 S12 S22.
struct sparam_record {
    double f_hz = 0.0;
    cpx s11, s21, s12, s22;
};

// Version-1 2-port Touchstone: '!' comments, option line `# Hz S RI R <z>`,
// one ascending-frequency data line per record.
void write_touchstone(const std::string& path,
                      const std::vector<sparam_record>& records, double z_ref,
                      const std::vector<std::string>& comments);

struct touchstone_file {
    double z_ref = 50.0;
    std::vector<sparam_record> records;
    std::vector<std::string> comments;
};

// Strict v1 grammar re-parser (also the format-conformance checker): rejects
// anything but `# Hz S RI R <z>` options, '!' comments and 9-field data
// lines with ascending frequencies.
touchstone_file parse_touchstone(const std::string& text);

// FNV-1a 64-bit content hash, rendered as 16 hex digits.
std::string fnv1a_hex(const std::string& content);

} // namespace nltr
