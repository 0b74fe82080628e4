#include "dealias/timing_format.hpp"

#include <charconv>
#include <regex>
#include <sstream>

namespace dealias {

namespace {

const std::regex& regex_for(TimingPattern pattern)
{
   static const std::regex m_re(R"(m=\d+)");
   static const std::regex t_re(R"(t=[+-]?\d+(\.\d+)?([eE][+-]?\d+)?)");
   return pattern == TimingPattern::m ? m_re : t_re;
}

double parse_number(std::string_view text, std::string_view whole)
{
   // from_chars rejects a leading '+'.
   if (!text.empty() && text.front() == '+') {
      text.remove_prefix(1);
   }
   double value = 0;
   const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
   if (ec != std::errc{} || end != text.data() + text.size()) {
      throw TimingParseError(std::string(whole));
   }
   return value;
}

constexpr std::string_view optimal_prefix = "Optimal time: ";

} // namespace

TimingParseError::TimingParseError(std::string substring)
   : std::runtime_error("unparseable timing value '" + substring + "'")
   , substring_(std::move(substring))
{
}

std::string format_seconds(double seconds)
{
   char buffer[64];
   const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, seconds);
   if (ec != std::errc{}) {
      throw std::runtime_error("format_seconds: conversion failed");
   }
   std::string out(buffer, end);
   if (out.find_first_not_of("+-0123456789.eE") != std::string::npos) {
      throw std::invalid_argument("format_seconds: value is not finite");
   }
   return out;
}

void emit_timing_lines(const TimingRecord& record, std::optional<double> optimal_time,
                       std::ostream& sink)
{
   record.validate();
   for (std::size_t i = 0; i < record.m_values.size(); ++i) {
      sink << "m=" << record.m_values[i] << " t=" << format_seconds(record.time_values[i]) << '\n';
   }
   sink << optimal_prefix << format_seconds(optimal_time.value_or(record.best_time())) << '\n';
}

std::string emit_timing_lines(const TimingRecord& record, std::optional<double> optimal_time)
{
   std::ostringstream os;
   emit_timing_lines(record, optimal_time, os);
   return os.str();
}

std::vector<double> match_pattern(TimingPattern pattern, std::string_view line)
{
   std::vector<double> values;
   using It = std::string_view::const_iterator;
   for (std::regex_iterator<It> it(line.begin(), line.end(), regex_for(pattern)), last; it != last;
        ++it) {
      const std::string_view match = line.substr(static_cast<std::size_t>(it->position()),
                                                 static_cast<std::size_t>(it->length()));
      values.push_back(parse_number(match.substr(2), match));
   }
   return values;
}

ParsedTimings parse_timing_lines(std::string_view text)
{
   ParsedTimings out;
   std::size_t pos = 0;
   while (pos < text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) {
         end = text.size();
      }
      const std::string_view line = text.substr(pos, end - pos);
      pos = end + 1;

      if (line.starts_with(optimal_prefix)) {
         const std::string_view value = line.substr(optimal_prefix.size());
         out.optimal_time = parse_number(value, line);
         continue;
      }
      const std::vector<double> ms = match_pattern(TimingPattern::m, line);
      const std::vector<double> ts = match_pattern(TimingPattern::t, line);
      if (ms.size() == 1 && ts.size() == 1) {
         out.m_values.push_back(static_cast<Index>(ms[0]));
         out.time_values.push_back(ts[0]);
      }
   }
   return out;
}

} // namespace dealias
