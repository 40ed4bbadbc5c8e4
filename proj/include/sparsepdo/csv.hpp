#pragma once

// CSV emission with shortest round-trip number formatting.

#include <initializer_list>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace sparsepdo {

// Shortest decimal string that parses back to exactly x; "inf", "-inf", "nan".
std::string format_number(double x);

using CsvCell = std::variant<double, long long, std::string>;

class CsvWriter {
 public:
  CsvWriter(std::ostream& os, std::vector<std::string> header);

  void row(const std::vector<CsvCell>& cells);
  // True once any double cell was NaN or infinite.
  bool saw_nonfinite() const { return nonfinite_; }

 private:
  std::ostream* os_;
  std::size_t columns_;
  bool nonfinite_ = false;
};

}  // namespace sparsepdo
