#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "pqlab/config.hpp"
#include "pqlab/exponents.hpp"

namespace pqlab {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitFail = 2, kExitInconclusive = 3, kExitNoConvergence = 4 };

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<double> tolerance;
  std::string out_dir = ".";
};

struct ResolvedSchedule {
  bool accepted = false;
  ExponentParams params;
  std::optional<MoserSchedule> schedule;
  std::string reason;
};

ResolvedSchedule resolve_schedule(const ProblemConfig& c);

int cmd_check(const ProblemConfig& c, const RunOptions& o, std::ostream& out);
int cmd_params(const ProblemConfig& c, const RunOptions& o, std::ostream& out);
int cmd_solve(const ProblemConfig& c, const RunOptions& o, std::ostream& out);
int cmd_validate(const ProblemConfig& c, const RunOptions& o, std::ostream& out);

// Full command line: pqlab <check|params|solve|validate> CONFIG [--seed S] [--out DIR] [--tolerance T]
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pqlab
