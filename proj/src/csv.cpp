#include "sparsepdo/csv.hpp"

#include <charconv>
#include <cmath>

#include "sparsepdo/func.hpp"

namespace sparsepdo {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(std::ostream& os, std::vector<std::string> header) : os_(&os), columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) *os_ << (i ? "," : "") << header[i];
  *os_ << '\n';
}

void CsvWriter::row(const std::vector<CsvCell>& cells) {
  if (cells.size() != columns_) throw Error("csv row has the wrong number of cells");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) *os_ << ',';
    if (const double* d = std::get_if<double>(&cells[i])) {
      nonfinite_ = nonfinite_ || !std::isfinite(*d);
      *os_ << format_number(*d);
    } else if (const long long* n = std::get_if<long long>(&cells[i])) {
      *os_ << *n;
    } else {
      const std::string& s = std::get<std::string>(cells[i]);
      if (s.find_first_of(",\"\n") == std::string::npos) {
        *os_ << s;
      } else {
        *os_ << '"';
        for (char c : s) *os_ << (c == '"' ? "\"\"" : std::string(1, c));
        *os_ << '"';
      }
    }
  }
  *os_ << '\n';
}

}  // namespace sparsepdo
