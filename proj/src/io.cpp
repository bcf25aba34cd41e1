#include "nltr/io.hpp"

#include <cerrno>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace nltr {

std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void atomic_write_file(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw io_error("cannot open for writing: " + tmp);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out)
            throw io_error("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw io_error("rename failed: " + tmp + " -> " + path + " (" +
                       std::strerror(errno) + ")");
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io_error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad())
        throw io_error("read failed: " + path);
    return ss.str();
}

csv_table parse_csv_text(const std::string& text) {
    csv_table table;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            throw io_error("CSV parse: expected '\\n' line endings, found '\\r\\n'");
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            if (comma == std::string::npos) {
                cells.push_back(line.substr(start));
                break;
            }
            cells.push_back(line.substr(start, comma - start));
            start = comma + 1;
        }
        if (first) {
            table.header = std::move(cells);
            first = false;
        } else {
            if (cells.size() != table.header.size())
                throw io_error("CSV parse: row has " + std::to_string(cells.size()) +
                               " cells, header has " + std::to_string(table.header.size()));
            table.rows.push_back(std::move(cells));
        }
    }
    if (first)
        throw io_error("CSV parse: empty input");
    return table;
}

void write_touchstone(const std::string& path,
                      const std::vector<sparam_record>& records, double z_ref,
                      const std::vector<std::string>& comments) {
    if (records.empty())
        throw domain_error("touchstone: empty series");
    for (std::size_t i = 1; i < records.size(); ++i)
        if (!(records[i].f_hz > records[i - 1].f_hz))
            throw error("touchstone: frequencies must be strictly ascending");
    std::ostringstream out;
    for (const auto& c : comments)
        out << "! " << c << "\n";
    out << "# Hz S RI R " << fmt_g17(z_ref) << "\n";
    for (const auto& r : records) {
        out << fmt_g17(r.f_hz);
        for (const cpx& s : {r.s11, r.s21, r.s12, r.s22})
            out << ' ' << fmt_g17(s.real()) << ' ' << fmt_g17(s.imag());
        out << "\n";
    }
    atomic_write_file(path, out.str());
}

touchstone_file parse_touchstone(const std::string& text) {
    touchstone_file file;
    bool have_option = false;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '!') {
            file.comments.push_back(line.substr(line.size() > 1 && line[1] == ' ' ? 2 : 1));
            continue;
        }
        if (line[0] == '#') {
            if (have_option)
                throw io_error("touchstone parse: duplicate option line");
            std::istringstream opt(line.substr(1));
            std::string unit, param, fmt, rtag;
            double z = 0.0;
            if (!(opt >> unit >> param >> fmt >> rtag >> z) || (opt >> std::ws, !opt.eof()))
                throw io_error("touchstone parse: malformed option line: " + line);
            if (unit != "Hz" || param != "S" || fmt != "RI" || rtag != "R")
                throw io_error("touchstone parse: unsupported option line: " + line);
            file.z_ref = z;
            have_option = true;
            continue;
        }
        if (!have_option)
            throw io_error("touchstone parse: data before option line");
        std::istringstream data(line);
        double fields[9];
        for (double& f : fields)
            if (!(data >> f))
                throw io_error("touchstone parse: data line needs 9 fields: " + line);
        std::string extra;
        if (data >> extra)
            throw io_error("touchstone parse: trailing tokens on data line: " + line);
        sparam_record rec;
        rec.f_hz = fields[0];
        rec.s11 = {fields[1], fields[2]};
        rec.s21 = {fields[3], fields[4]};
        rec.s12 = {fields[5], fields[6]};
        rec.s22 = {fields[7], fields[8]};
        if (!file.records.empty() && !(rec.f_hz > file.records.back().f_hz))
            throw io_error("touchstone parse: frequencies must ascend");
        file.records.push_back(rec);
    }
    if (!have_option)
        throw io_error("touchstone parse: missing option line");
    if (file.records.empty())
        throw io_error("touchstone parse: no data lines");
    return file;
}

std::string fnv1a_hex(const std::string& content) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : content) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace nltr
