#ifndef DEALIAS_TUNER_HPP
#define DEALIAS_TUNER_HPP

/**
 * @file tuner.hpp
 * @brief Selection of hybrid decomposition parameters by measurement.
 *
 * Every search takes an injectable Clock, so the selection logic can be tested
 * with synthetic costs. Measurements inside one search run sequentially on
 * the calling thread.
 */

#include "dealias/numeric.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

namespace dealias {

/// Monotone time source in seconds.
using Clock = std::function<double()>;

/// std::chrono::steady_clock in seconds.
Clock steady_clock_seconds();

/// Mean wall time of `repetitions` calls of `run`.
double time_conv(const std::function<void()>& run, int repetitions, const Clock& clock);

struct Candidate {
   Index m = 1;
   Index lambda = 1;

   auto operator<=>(const Candidate&) const = default;
};

/// Candidate transform sizes m and size ratios Lambda. Both lists are
/// nonempty and duplicate-free.
struct SearchSpace {
   std::vector<Index> m_candidates;
   std::vector<Index> lambda_candidates;

   std::size_t size() const { return m_candidates.size() * lambda_candidates.size(); }
   Candidate at(std::size_t i) const;
   void validate() const;

   /// m in divisors(L_f) + {M}, Lambda in divisors(L_g).
   static SearchSpace from_divisors(Index length_f, Index length_g, Index padded_length);
   /// m in the 7-smooth sizes <= M, Lambda in divisors(L_g).
   static SearchSpace from_smooth_sizes(Index length_g, Index padded_length);
};

struct Measurement {
   Candidate candidate;
   double seconds = 0;
};

struct SearchResult {
   Index m = 1;
   Index lambda = 1;
   double seconds = 0;
   std::vector<Measurement> measurements; ///< in measurement order
};

/// Runs one convolution with the given (m, Lambda).
using CandidateRunner = std::function<void(Index m, Index lambda)>;

struct SearchOptions {
   int repetitions = 2;
};

/// Measures every (m, Lambda). Ties go to the lexicographically smallest pair.
SearchResult grid_search(const SearchSpace& space, const CandidateRunner& run, const Clock& clock,
                         const SearchOptions& options = {});

/// Measures `samples` pairs drawn uniformly without replacement (all pairs when
/// samples >= |space|). Deterministic for a given seed.
SearchResult random_search(const SearchSpace& space, std::size_t samples, std::uint64_t seed,
                           const CandidateRunner& run, const Clock& clock,
                           const SearchOptions& options = {});

/// Tuning parameters of one axis. copies, residues_per_pass and in_place are
/// carried as metadata; no search varies them.
struct AxisParameters {
   Index length = 1;            ///< L
   Index padded_length = 1;     ///< M
   Index copies = 1;            ///< C
   Index fft_size = 1;          ///< m
   Index ratio = 1;             ///< Lambda
   Index residues_per_pass = 1; ///< D
   bool in_place = false;       ///< I

   void validate() const;
};

using TuneVector = std::vector<AxisParameters>;

/// A 1D sub-problem along one axis.
struct AxisProblem {
   Index length_f = 1;
   Index length_g = 1;
   Index padded_length = 1;
   CandidateRunner run;
};

struct TuneResult {
   TuneVector parameters;
   std::vector<SearchResult> axes;

   std::size_t measurement_count() const;
};

/// Grid search on each axis independently: sum, not product, of the axis space sizes.
TuneResult per_dimension_tune(std::span<const AxisProblem> axes, std::span<const SearchSpace> spaces,
                              const Clock& clock, const SearchOptions& options = {},
                              Index copies = 1);

struct ProblemKey {
   Index lx = 1;
   Index ly = 1;
   Index mx = 1;
   Index my = 1;

   auto operator<=>(const ProblemKey&) const = default;
};

/// Candidate m values of one benchmarked problem with their mean times.
struct TimingRecord {
   ProblemKey problem;
   std::vector<Index> m_values;
   std::vector<double> time_values; ///< parallel to m_values, seconds
   int repetitions = 1;

   void validate() const;
   std::size_t best_index() const; ///< first index of the minimal time
   Index best_m() const { return m_values[best_index()]; }
   double best_time() const { return time_values[best_index()]; }

   friend bool operator==(const TimingRecord&, const TimingRecord&) = default;
};

/// One entry per distinct m (ascending), keeping the fastest Lambda for that m.
TimingRecord record_from_search(const ProblemKey& problem, const SearchResult& result,
                                int repetitions);

template <typename T>
struct TopK {
   std::vector<T> values;
   std::vector<double> times;
   std::vector<std::size_t> indices;
};

/// The k entries with the smallest b (stable), with their original indices.
template <typename T>
TopK<T> sort_lists_topk(std::span<const T> a, std::span<const double> b, std::size_t k)
{
   if (a.size() != b.size()) {
      throw std::invalid_argument("sort_lists_topk: length mismatch");
   }
   std::vector<std::size_t> order(a.size());
   std::iota(order.begin(), order.end(), std::size_t{0});
   std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return b[i] < b[j]; });
   order.resize(std::min(k, order.size()));
   TopK<T> out;
   for (std::size_t i : order) {
      out.values.push_back(a[i]);
      out.times.push_back(b[i]);
      out.indices.push_back(i);
   }
   return out;
}

struct ThresholdSelection {
   std::vector<Index> values;
   std::vector<double> normalized; ///< (b - t_best) / (t_worst - t_best)
};

/// Entries with b <= t_best + eps (t_worst - t_best), sorted by b (stable).
/// When t_worst == t_best every entry passes with normalized value 0.
/// eps > 1 behaves like eps = 1.
ThresholdSelection sort_lists_eps(std::span<const Index> a, std::span<const double> b, double eps);

/// Smallest rectangle height whose eps-selection contains the square's best m.
std::optional<Index> epsilon_smallest_rectangle(const TimingRecord& square,
                                                const std::map<Index, TimingRecord>& rectangles,
                                                double eps);

struct TransferReport {
   Index m_transfer = 0;                  ///< fastest m on the rectangle
   std::optional<double> time_at_transfer; ///< square's time at m_transfer, if measured
   Index m_best = 0;                      ///< fastest m on the square
   double time_best = 0;

   bool hit() const { return time_at_transfer.has_value(); }
};

/// Reuse the rectangle's best m on the square and compare with the square's optimum.
TransferReport skinny_estimate(const TimingRecord& square, const TimingRecord& rectangle);

/**
 * Directory of TimingRecords, one JSON file per problem named
 * rec_Lx<lx>_Ly<ly>_Mx<mx>_My<my>:
 *
 *   {"Lx":..,"Ly":..,"Mx":..,"My":..,"repetitions":..,
 *    "m_values":[..],"time_values":[..]}
 *
 * Concurrent readers are allowed; writers are exclusive.
 */
class RecordCache {
public:
   explicit RecordCache(std::filesystem::path directory);

   const std::filesystem::path& directory() const { return directory_; }
   static std::string file_name(const ProblemKey& key);

   void put(const TimingRecord& record);
   std::optional<TimingRecord> get(const ProblemKey& key) const;

private:
   std::filesystem::path directory_;
   mutable std::shared_mutex mutex_;
};

} // namespace dealias

#endif
