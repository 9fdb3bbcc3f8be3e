#include "discflow/csv.hpp"

#include "discflow/errors.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace discflow {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out.good()) throw Error("write failed: " + tmp.string());
    }
    fs::rename(tmp, target);
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::string body;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) body += ',';
        body += header[i];
    }
    body += '\n';
    for (const auto& row : rows) {
        if (row.size() != header.size()) throw Error("csv row width mismatch");
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) body += ',';
            body += format_double(row[i]);
        }
        body += '\n';
    }
    write_text_atomic(path, body);
}

} // namespace discflow
