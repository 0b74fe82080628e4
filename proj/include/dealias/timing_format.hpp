#ifndef DEALIAS_TIMING_FORMAT_HPP
#define DEALIAS_TIMING_FORMAT_HPP

/**
 * @file timing_format.hpp
 * @brief Text format for timing tables.
 *
 *   m=<integer> t=<float>      one line per candidate
 *   Optimal time: <float>      terminator
 *
 * Floats use the shortest representation that reads back to the same double,
 * so a round trip is exact.
 */

#include "dealias/tuner.hpp"

#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dealias {

/// Shortest round-trippable rendering, e.g. "2.95e-07" or "0.5".
std::string format_seconds(double seconds);

void emit_timing_lines(const TimingRecord& record, std::optional<double> optimal_time,
                       std::ostream& sink);
std::string emit_timing_lines(const TimingRecord& record,
                              std::optional<double> optimal_time = std::nullopt);

enum class TimingPattern {
   m, ///< m=\d+
   t, ///< t=[+-]?\d+(\.\d+)?([eE][+-]?\d+)?
};

class TimingParseError : public std::runtime_error {
public:
   explicit TimingParseError(std::string substring);
   const std::string& substring() const { return substring_; }

private:
   std::string substring_;
};

/// Every non-overlapping match in `line`, with the two-character prefix
/// removed and the rest parsed as a number.
std::vector<double> match_pattern(TimingPattern pattern, std::string_view line);

/// m and t values of a whole emitted table, in order.
struct ParsedTimings {
   std::vector<Index> m_values;
   std::vector<double> time_values;
   std::optional<double> optimal_time;
};

ParsedTimings parse_timing_lines(std::string_view text);

} // namespace dealias

#endif
