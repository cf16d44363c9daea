#pragma once

#include <string>
#include <vector>

namespace mfk {

struct SelftestCheck {
  std::string name;
  bool pass;
  std::string detail;
};

// Small, fast versions of the library's invariants; fixed seeds.
std::vector<SelftestCheck> run_selftest();

}  // namespace mfk
