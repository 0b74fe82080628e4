#ifndef DEALIAS_TOOLS_CLI_HPP
#define DEALIAS_TOOLS_CLI_HPP

#include "dealias/tuner.hpp"

#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dealias::cli {

enum class Subcommand { conv1d, conv2d, image, tune, bench, multiples };

std::string_view to_string(Subcommand sub);

/// Bad command line; reported with the usage text and exit status 1.
class UsageError : public std::runtime_error {
public:
   using std::runtime_error::runtime_error;
};

struct CliInvocation {
   Subcommand subcommand = Subcommand::multiples;
   std::map<std::string, std::string, std::less<>> flags; ///< name without '-', value ("" for -t)

   bool has(std::string_view name) const;
   Index integer(std::string_view name) const; ///< required integer flag
   Index integer_or(std::string_view name, Index fallback) const;
   std::string text(std::string_view name) const; ///< required string flag
   std::string text_or(std::string_view name, std::string fallback) const;
};

std::string usage();

/// Flags are written -name=value; -t takes no value. Throws UsageError.
CliInvocation parse_args(std::span<const std::string> args);

/// Runs a command line (without the program name). Returns the exit status:
/// 0 success, 1 usage error, 2 runtime error.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

struct StrategyTiming {
   std::string strategy;        ///< direct, explicit_smooth, explicit_pow2 or hybrid
   std::optional<Index> m;      ///< transform size; none for direct
   std::optional<Index> lambda; ///< hybrid only
   double mean_seconds = 0;
};

struct BenchReport {
   ProblemKey problem;
   TimingRecord hybrid_record;
   std::vector<StrategyTiming> rows;
   double gate_error = 0; ///< worst relative L2 error seen by the correctness gate
   std::optional<double> pow2_over_hybrid;
};

/// Correctness gate, hybrid search and strategy timings for a 1D problem with
/// L_f = -Lx, L_g = -Ly, M = -Mx. Writes bench.csv and bench.json into -out.
BenchReport run_bench(const CliInvocation& invocation, std::ostream& out);

/// Per-axis tuning of an Ly x Lx problem padded to My x Mx.
TuneResult run_tune(const CliInvocation& invocation, std::ostream& out);

} // namespace dealias::cli

#endif
