#include "strz/acceptance.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

int main(int argc, char** argv) {
  bool verbose = false;
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "-v" || a == "--verbose")
      verbose = true;
    else
      ids.push_back(std::atoi(a.c_str()));
  }
  int failed = 0;
  for (const auto& r : strz::acceptance::run_all(ids)) {
    std::printf("%s\n", strz::acceptance::summary_line(r).c_str());
    if (verbose || !r.passed)
      for (const auto& d : r.details) std::printf("    %s\n", d.c_str());
    std::fflush(stdout);
    if (!r.passed) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
