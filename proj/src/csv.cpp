#include "cloudksvd/csv.hpp"

#include <cstdio>

#include "cloudksvd/errors.hpp"

namespace cksvd {

namespace {

std::string escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

}  // namespace

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : f_(path), width_(header.size()), path_(path) {
  if (!f_) throw Error(errc::io_error, "cannot open for writing: " + path);
  row(header);
}

CsvWriter::~CsvWriter() = default;

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != width_)
    throw Error(errc::invalid_input, "csv row width mismatch: " + path_);
  for (std::size_t i = 0; i < fields.size(); ++i)
    f_ << escape(fields[i]) << (i + 1 == fields.size() ? "" : ",");
  f_ << "\n";
  if (!f_) throw Error(errc::io_error, "write failed: " + path_);
}

std::string CsvWriter::num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string CsvWriter::num(std::size_t v) { return std::to_string(v); }

void write_manifest(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& entries) {
  std::ofstream f(path);
  if (!f) throw Error(errc::io_error, "cannot open for writing: " + path);
  for (const auto& [k, v] : entries) f << k << " = " << v << "\n";
  if (!f) throw Error(errc::io_error, "write failed: " + path);
}

}  // namespace cksvd
