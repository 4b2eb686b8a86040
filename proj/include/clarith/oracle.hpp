#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

// Brute-force oracle suites. Every case is independent and derives its
// randomness from (seed, case id), so serial and sharded runs agree.
namespace clarith::oracle {

inline constexpr std::uint64_t kDefaultSeed = 20240611;

struct CaseResult {
  bool ok = true;
  std::string detail;                          // counterexample description on failure
  std::map<std::string, std::uint64_t> tally;  // summed over cases
};

struct Suite {
  std::string name;
  std::string summary;
  std::size_t default_cases = 0;
  bool fixed_count = false;  // enumerative suites ignore the requested count
  std::function<CaseResult(std::size_t id, std::uint64_t seed)> run;
};

struct Report {
  std::string suite;
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::optional<std::size_t> first_failure;  // lowest failing case id
  std::string first_detail;
  std::map<std::string, std::uint64_t> tally;
  double seconds = 0;
  int threads = 1;
  bool ok() const { return failures == 0; }
};

const std::vector<Suite>& suites();
const Suite* find_suite(const std::string& name);

// cases = 0 means the suite default.
Report run_serial(const Suite& s, std::size_t cases = 0, std::uint64_t seed = kDefaultSeed);
// threads <= 0 uses the OpenMP default. Without OpenMP this is the serial runner.
Report run_parallel(const Suite& s, std::size_t cases = 0, std::uint64_t seed = kDefaultSeed, int threads = 0);

std::string report_str(const Report& r);

}  // namespace clarith::oracle
