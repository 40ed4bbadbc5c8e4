#pragma once

// End-to-end acceptance checks. Each criterion reports one headline number
// against a threshold plus a free-form detail string.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace sparsepdo::acceptance {

struct Result {
  int id = 0;
  std::string name;
  double measured = 0.0;
  std::string relation;  // how measured compares with threshold, e.g. "<"
  double threshold = 0.0;
  bool pass = false;
  double seconds = 0.0;
  std::string detail;
};

struct Options {
  bool quick = false;
  // Declare the class-check symbols one order too smooth; the class gate in
  // criterion 2 must then fail while every other criterion is unaffected.
  bool mislabel = false;
  std::uint64_t seed = 1;
  std::vector<int> only;  // empty: all
};

inline constexpr int kCriteria = 17;

std::string criterion_name(int id);
Result run_criterion(int id, const Options& options);
std::vector<Result> run_all(const Options& options, const std::function<void(const Result&)>& on_result = {});
std::string format_line(const Result& r);

}  // namespace sparsepdo::acceptance
