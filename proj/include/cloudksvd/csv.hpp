#ifndef CLOUDKSVD_CSV_HPP
#define CLOUDKSVD_CSV_HPP

#include <fstream>
#include <string>
#include <utility>
#include <vector>

namespace cksvd {

inline constexpr const char* kVersion = "0.1.0";

// RFC-4180-style writer: header row mandatory, fields quoted only when they
// contain a comma, quote, or newline. Doubles print as %.17g so reruns are
// byte-identical.
class CsvWriter {
public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  ~CsvWriter();

  void row(const std::vector<std::string>& fields);

  static std::string num(double v);
  static std::string num(std::size_t v);

private:
  std::ofstream f_;
  std::size_t width_;
  std::string path_;
};

// Plain `key = value` lines, one per entry, in the given order.
void write_manifest(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& entries);

}  // namespace cksvd

#endif
