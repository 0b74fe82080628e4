#include "dealias/tuner.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <fstream>
#include <limits>
#include <mutex>
#include <random>
#include <set>
#include <sstream>

namespace dealias {

namespace {

bool has_duplicates(std::vector<Index> v)
{
   std::sort(v.begin(), v.end());
   return std::adjacent_find(v.begin(), v.end()) != v.end();
}

bool better(const Measurement& a, const SearchResult& best)
{
   return a.seconds < best.seconds
      || (a.seconds == best.seconds && a.candidate < Candidate{best.m, best.lambda});
}

SearchResult measure(const SearchSpace& space, const std::vector<std::size_t>& order,
                     const CandidateRunner& run, const Clock& clock, const SearchOptions& options)
{
   SearchResult result;
   result.seconds = std::numeric_limits<double>::infinity();
   for (std::size_t i : order) {
      const Candidate c = space.at(i);
      const double t = time_conv([&] { run(c.m, c.lambda); }, options.repetitions, clock);
      const Measurement meas{c, t};
      result.measurements.push_back(meas);
      if (result.measurements.size() == 1 || better(meas, result)) {
         result.m = c.m;
         result.lambda = c.lambda;
         result.seconds = t;
      }
   }
   return result;
}

} // namespace

Clock steady_clock_seconds()
{
   return [] {
      const auto now = std::chrono::steady_clock::now().time_since_epoch();
      return std::chrono::duration<double>(now).count();
   };
}

double time_conv(const std::function<void()>& run, int repetitions, const Clock& clock)
{
   if (repetitions < 1) {
      throw std::invalid_argument("time_conv: repetitions must be positive");
   }
   double total = 0;
   for (int i = 0; i < repetitions; ++i) {
      const double start = clock();
      run();
      total += clock() - start;
   }
   return total / repetitions;
}

Candidate SearchSpace::at(std::size_t i) const
{
   const std::size_t n = lambda_candidates.size();
   return {m_candidates.at(i / n), lambda_candidates.at(i % n)};
}

void SearchSpace::validate() const
{
   if (m_candidates.empty() || lambda_candidates.empty()) {
      throw std::invalid_argument("search space: empty candidate list");
   }
   if (has_duplicates(m_candidates) || has_duplicates(lambda_candidates)) {
      throw std::invalid_argument("search space: duplicate candidates");
   }
   const auto positive = [](Index v) { return v >= 1; };
   if (!std::all_of(m_candidates.begin(), m_candidates.end(), positive)
       || !std::all_of(lambda_candidates.begin(), lambda_candidates.end(), positive)) {
      throw std::invalid_argument("search space: candidates must be positive");
   }
}

SearchSpace SearchSpace::from_divisors(Index length_f, Index length_g, Index padded_length)
{
   SearchSpace space;
   space.m_candidates = divisors(length_f);
   if (!std::binary_search(space.m_candidates.begin(), space.m_candidates.end(), padded_length)) {
      space.m_candidates.push_back(padded_length);
   }
   space.lambda_candidates = divisors(length_g);
   return space;
}

SearchSpace SearchSpace::from_smooth_sizes(Index length_g, Index padded_length)
{
   SearchSpace space;
   space.m_candidates = generate_multiples(62, 40, 27, 22, padded_length).sizes;
   space.lambda_candidates = divisors(length_g);
   return space;
}

SearchResult grid_search(const SearchSpace& space, const CandidateRunner& run, const Clock& clock,
                         const SearchOptions& options)
{
   space.validate();
   std::vector<std::size_t> order(space.size());
   std::iota(order.begin(), order.end(), std::size_t{0});
   return measure(space, order, run, clock, options);
}

SearchResult random_search(const SearchSpace& space, std::size_t samples, std::uint64_t seed,
                           const CandidateRunner& run, const Clock& clock,
                           const SearchOptions& options)
{
   space.validate();
   if (samples < 1) {
      throw std::invalid_argument("random_search: sample count must be positive");
   }
   std::vector<std::size_t> order(space.size());
   std::iota(order.begin(), order.end(), std::size_t{0});
   // Partial Fisher-Yates with an explicit uniform draw, so the sequence only
   // depends on the seed and not on the standard library's shuffle.
   std::mt19937_64 rng(seed);
   const std::size_t n = std::min(samples, order.size());
   for (std::size_t i = 0; i < n; ++i) {
      const std::uint64_t span = order.size() - i;
      const std::size_t j = i + static_cast<std::size_t>(rng() % span);
      std::swap(order[i], order[j]);
   }
   order.resize(n);
   return measure(space, order, run, clock, options);
}

void AxisParameters::validate() const
{
   if (length < 1 || padded_length < length || fft_size < 1 || ratio < 1 || copies < 1
       || residues_per_pass < 1) {
      throw std::invalid_argument("axis parameters: require 1 <= L <= M and m, lambda, C, D >= 1");
   }
}

std::size_t TuneResult::measurement_count() const
{
   std::size_t n = 0;
   for (const SearchResult& axis : axes) {
      n += axis.measurements.size();
   }
   return n;
}

TuneResult per_dimension_tune(std::span<const AxisProblem> axes, std::span<const SearchSpace> spaces,
                              const Clock& clock, const SearchOptions& options, Index copies)
{
   if (axes.size() != spaces.size()) {
      throw std::invalid_argument("per_dimension_tune: one search space per axis required");
   }
   TuneResult result;
   for (std::size_t i = 0; i < axes.size(); ++i) {
      SearchResult best = grid_search(spaces[i], axes[i].run, clock, options);
      AxisParameters p;
      p.length = axes[i].length_g;
      p.padded_length = axes[i].padded_length;
      p.copies = copies;
      p.fft_size = best.m;
      p.ratio = best.lambda;
      p.validate();
      result.parameters.push_back(p);
      result.axes.push_back(std::move(best));
   }
   return result;
}

void TimingRecord::validate() const
{
   if (m_values.empty() || m_values.size() != time_values.size()) {
      throw std::invalid_argument("timing record: m and time lists must be nonempty and parallel");
   }
   if (repetitions < 1) {
      throw std::invalid_argument("timing record: repetitions must be positive");
   }
   for (double t : time_values) {
      if (!(t > 0) || !std::isfinite(t)) {
         throw std::invalid_argument("timing record: times must be positive");
      }
   }
}

std::size_t TimingRecord::best_index() const
{
   if (time_values.empty()) {
      throw std::invalid_argument("timing record: empty");
   }
   return static_cast<std::size_t>(
      std::min_element(time_values.begin(), time_values.end()) - time_values.begin());
}

TimingRecord record_from_search(const ProblemKey& problem, const SearchResult& result,
                                int repetitions)
{
   std::map<Index, double> fastest;
   for (const Measurement& meas : result.measurements) {
      auto [it, inserted] = fastest.emplace(meas.candidate.m, meas.seconds);
      if (!inserted) {
         it->second = std::min(it->second, meas.seconds);
      }
   }
   TimingRecord record;
   record.problem = problem;
   record.repetitions = repetitions;
   for (const auto& [m, t] : fastest) {
      record.m_values.push_back(m);
      record.time_values.push_back(t);
   }
   return record;
}

ThresholdSelection sort_lists_eps(std::span<const Index> a, std::span<const double> b, double eps)
{
   if (a.size() != b.size()) {
      throw std::invalid_argument("sort_lists_eps: length mismatch");
   }
   if (a.empty()) {
      throw std::invalid_argument("sort_lists_eps: empty input");
   }
   if (!(eps >= 0.0)) {
      throw std::invalid_argument("sort_lists_eps: eps must be nonnegative");
   }
   const TopK<Index> sorted = sort_lists_topk<Index>(a, b, a.size());
   const double best = sorted.times.front();
   const double worst = sorted.times.back();
   const double spread = worst - best;
   // eps >= 1 must admit t_worst exactly; best + spread can round below it.
   const double threshold = eps >= 1.0 ? worst : best + eps * spread;

   ThresholdSelection out;
   for (std::size_t i = 0; i < sorted.values.size(); ++i) {
      const double t = sorted.times[i];
      if (t > threshold) {
         break;
      }
      out.values.push_back(sorted.values[i]);
      out.normalized.push_back(spread > 0 ? (t - best) / spread : 0.0);
   }
   return out;
}

std::optional<Index> epsilon_smallest_rectangle(const TimingRecord& square,
                                                const std::map<Index, TimingRecord>& rectangles,
                                                double eps)
{
   square.validate();
   if (rectangles.empty()) {
      throw std::invalid_argument("epsilon_smallest_rectangle: no rectangle records");
   }
   const Index target = square.best_m();
   for (const auto& [height, record] : rectangles) {
      record.validate();
      const ThresholdSelection sel = sort_lists_eps(record.m_values, record.time_values, eps);
      if (std::find(sel.values.begin(), sel.values.end(), target) != sel.values.end()) {
         return height;
      }
   }
   return std::nullopt;
}

TransferReport skinny_estimate(const TimingRecord& square, const TimingRecord& rectangle)
{
   square.validate();
   rectangle.validate();
   TransferReport report;
   report.m_transfer = rectangle.best_m();
   report.m_best = square.best_m();
   report.time_best = square.best_time();
   const auto it = std::find(square.m_values.begin(), square.m_values.end(), report.m_transfer);
   if (it != square.m_values.end()) {
      report.time_at_transfer = square.time_values[static_cast<std::size_t>(it - square.m_values.begin())];
   }
   return report;
}

RecordCache::RecordCache(std::filesystem::path directory)
   : directory_(std::move(directory))
{
}

std::string RecordCache::file_name(const ProblemKey& key)
{
   std::ostringstream os;
   os << "rec_Lx" << key.lx << "_Ly" << key.ly << "_Mx" << key.mx << "_My" << key.my;
   return os.str();
}

void RecordCache::put(const TimingRecord& record)
{
   record.validate();
   nlohmann::json j;
   j["Lx"] = record.problem.lx;
   j["Ly"] = record.problem.ly;
   j["Mx"] = record.problem.mx;
   j["My"] = record.problem.my;
   j["repetitions"] = record.repetitions;
   j["m_values"] = record.m_values;
   j["time_values"] = record.time_values;

   std::unique_lock lock(mutex_);
   std::filesystem::create_directories(directory_);
   const std::filesystem::path target = directory_ / file_name(record.problem);
   const std::filesystem::path temp = target.string() + ".tmp";
   {
      std::ofstream out(temp, std::ios::trunc);
      out << j.dump() << '\n';
      if (!out) {
         throw std::runtime_error("record cache: cannot write " + temp.string());
      }
   }
   std::filesystem::rename(temp, target);
}

std::optional<TimingRecord> RecordCache::get(const ProblemKey& key) const
{
   std::shared_lock lock(mutex_);
   const std::filesystem::path path = directory_ / file_name(key);
   std::ifstream in(path);
   if (!in) {
      return std::nullopt;
   }
   try {
      const nlohmann::json j = nlohmann::json::parse(in);
      TimingRecord record;
      record.problem = {j.at("Lx").get<Index>(), j.at("Ly").get<Index>(), j.at("Mx").get<Index>(),
                        j.at("My").get<Index>()};
      record.repetitions = j.at("repetitions").get<int>();
      record.m_values = j.at("m_values").get<std::vector<Index>>();
      record.time_values = j.at("time_values").get<std::vector<double>>();
      record.validate();
      return record;
   } catch (const std::exception& e) {
      throw std::runtime_error("record cache: malformed " + path.string() + ": " + e.what());
   }
}

} // namespace dealias
