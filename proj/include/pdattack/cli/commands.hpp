#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>

#include "pdattack/ncs/closed_loop.hpp"

namespace pdattack::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitIo = 3,
  kExitDecomposition = 4,
  kExitDefiniteness = 5,
};

struct GlobalOptions {
  std::string config;
  std::string out_dir = ".";
  bool timestamps = true;
  std::optional<std::uint64_t> seed;
  /// calibrate only; overrides detector.calibrate.n_runs.
  std::optional<long long> runs;
};

int cmd_simulate(const GlobalOptions& opts, std::ostream& out, std::ostream& err);
int cmd_calibrate(const GlobalOptions& opts, std::ostream& out, std::ostream& err);
int cmd_check_ic(const GlobalOptions& opts, std::ostream& out, std::ostream& err);
int cmd_omega(const GlobalOptions& opts, std::ostream& out, std::ostream& err);
int cmd_compare(const GlobalOptions& opts, std::ostream& out, std::ostream& err);

/// Header t,x1..xp,a1..ap,xa1..xap,u1..um,z1..zq,res_norm,alarm; values in
/// %.17g. Every stride-th sample is written, plus the last one.
void write_trace_csv(const SimTrace& trace, const std::string& path, std::size_t stride = 1);

/// Maps exceptions escaping a command body onto the exit-code contract.
int guarded(const std::function<int()>& body, std::ostream& err);

}  // namespace pdattack::cli
