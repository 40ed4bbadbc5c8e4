#include <CLI11.hpp>
#include <iostream>

#include "acceptance.hpp"

int main(int argc, char** argv) {
  using namespace sparsepdo::acceptance;
  CLI::App app{"Acceptance suite: one PASS/FAIL line per criterion"};
  Options opt;
  app.add_flag("--quick", opt.quick, "Smaller trial counts");
  app.add_flag("--mislabel", opt.mislabel, "Declare the class-check symbols with too much decay");
  app.add_option("--seed", opt.seed, "Base seed");
  app.add_option("--only", opt.only, "Criterion ids to run")->check(CLI::Range(1, kCriteria));
  CLI11_PARSE(app, argc, argv);

  int failed = 0;
  const auto results = run_all(opt, [&](const Result& r) {
    std::cout << format_line(r) << std::endl;
    failed += !r.pass;
  });
  std::cout << results.size() - std::size_t(failed) << '/' << results.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
