#pragma once

#include <cstddef>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <zlib.h>

#include "expred/common.hpp"

namespace expred::ingest {

/// One skipped or dropped input record.
struct Diagnostic {
    std::string source;    // file path
    std::string location;  // line number, entry index, page name
    std::string message;
};

/// Per-parse accounting. Every input record ends up either in the output or
/// in `entries`, so records_in == records_out + entries.size().
struct Diagnostics {
    std::size_t records_in = 0;
    std::size_t records_out = 0;
    std::vector<Diagnostic> entries;
    std::vector<Diagnostic> warnings;  // anomalies in auxiliary inputs; not records

    void skip(std::string source, std::string location, std::string message) {
        entries.push_back({std::move(source), std::move(location), std::move(message)});
    }
    void warn(std::string source, std::string location, std::string message) {
        warnings.push_back({std::move(source), std::move(location), std::move(message)});
    }
    bool balanced() const { return records_in == records_out + entries.size(); }
};

/// Reads a whole file; gzip content (by magic bytes) is inflated transparently.
inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open file: " + path);
    std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (raw.size() < 2 || static_cast<unsigned char>(raw[0]) != 0x1f || static_cast<unsigned char>(raw[1]) != 0x8b) {
        return raw;
    }
    gzFile gz = gzopen(path.c_str(), "rb");
    if (gz == nullptr) throw InputError("cannot open gzip file: " + path);
    std::string out;
    char buf[1 << 16];
    int n;
    while ((n = gzread(gz, buf, sizeof(buf))) > 0) out.append(buf, static_cast<std::size_t>(n));
    const bool failed = n < 0;
    gzclose(gz);
    if (failed) throw InputError("corrupt gzip stream: " + path);
    return out;
}

}  // namespace expred::ingest
