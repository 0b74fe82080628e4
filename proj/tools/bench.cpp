#include "cli.hpp"

#include "dealias/conv1d.hpp"
#include "dealias/timing_format.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <random>

namespace dealias::cli {

namespace {

constexpr double gate_tolerance = 1e-9;
constexpr Index direct_work_limit = Index{1} << 22;

Eigen::VectorXcd random_signal(std::mt19937_64& rng, Index n)
{
   std::uniform_real_distribution<double> u(-1.0, 1.0);
   Eigen::VectorXcd v(n);
   for (Index i = 0; i < n; ++i) {
      v[i] = {u(rng), u(rng)};
   }
   return v;
}

std::uint64_t seed_of(const CliInvocation& inv)
{
   return static_cast<std::uint64_t>(inv.integer_or("seed", 1));
}

SearchOptions search_options(const CliInvocation& inv)
{
   return SearchOptions{static_cast<int>(inv.integer_or("R", 2))};
}

/// Grid or random search according to -search and -samples.
SearchResult search(const CliInvocation& inv, const SearchSpace& space, const CandidateRunner& run)
{
   const std::string kind = inv.text_or("search", "grid");
   if (kind == "grid") {
      return grid_search(space, run, steady_clock_seconds(), search_options(inv));
   }
   if (kind == "random") {
      const auto samples = static_cast<std::size_t>(inv.integer_or("samples", 8));
      return random_search(space, samples, seed_of(inv), run, steady_clock_seconds(), search_options(inv));
   }
   throw UsageError("-search must be grid or random");
}

/// Prebuilt plans so that timed runs exclude root-table setup.
class PlanSet {
public:
   PlanSet(const SearchSpace& space, Index lf, Index lg, Index M)
   {
      for (std::size_t i = 0; i < space.size(); ++i) {
         const Candidate c = space.at(i);
         plans_.emplace(c, HybridConvolution1D<double>(HybridPlan1D::make(lf, lg, M, c.m, c.lambda)));
      }
   }

   const HybridConvolution1D<double>& at(Index m, Index lambda) const { return plans_.at({m, lambda}); }

private:
   std::map<Candidate, HybridConvolution1D<double>> plans_;
};

/// -cache, else <out>/records, else no persistence.
std::optional<std::filesystem::path> cache_dir(const CliInvocation& inv)
{
   if (inv.has("cache")) {
      return std::filesystem::path(inv.text("cache"));
   }
   if (inv.has("out")) {
      return std::filesystem::path(inv.text("out")) / "records";
   }
   return std::nullopt;
}

/**
 * Every candidate, plus both explicit paddings, against the direct sum. Small
 * problems are checked as given; larger ones on a truncated instance with the
 * same (m, Lambda) candidates.
 */
double correctness_gate(const SearchSpace& space, Index lf, Index lg, Index M, Index smooth,
                        Index pow2, std::uint64_t seed)
{
   const bool full = lf * lg <= direct_work_limit;
   const Index gf = full ? lf : std::min<Index>(lf, 64);
   const Index gg = full ? lg : std::max(gf, std::min<Index>(lg, 1024));
   const Index gm = full ? M : gf + gg - 1;

   std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
   const Eigen::VectorXcd f = random_signal(rng, gf);
   const Eigen::VectorXcd g = random_signal(rng, gg);
   const Eigen::VectorXcd direct = direct_conv(f, g);

   double worst = 0;
   const auto check = [&](double error, const std::string& what) {
      worst = std::max(worst, error);
      if (!(error <= gate_tolerance)) {
         throw std::runtime_error("correctness gate failed for " + what + ": relative error "
                                  + format_seconds(error));
      }
   };
   for (std::size_t i = 0; i < space.size(); ++i) {
      const Candidate c = space.at(i);
      const Eigen::VectorXcd h = hybrid_conv_1d_raw(f, g, gm, c.m, c.lambda);
      check(relative_l2_error(h, cyclic_fold(direct, h.size())),
            "hybrid m " + std::to_string(c.m) + " lambda " + std::to_string(c.lambda));
   }
   const Index n = gf + gg - 1;
   for (Index size : {full ? smooth : next_smooth(n), full ? pow2 : next_pow2(n)}) {
      const Eigen::VectorXcd h = explicit_conv(f, g, size);
      check(relative_l2_error(h, cyclic_fold(direct, size)), "explicit size " + std::to_string(size));
   }
   return worst;
}

void write_tables(const std::filesystem::path& dir, const BenchReport& report)
{
   std::filesystem::create_directories(dir);
   const auto csv_path = dir / "bench.csv";
   std::ofstream csv(csv_path, std::ios::trunc);
   csv << "strategy,Lx,Ly,Mx,My,m,lambda,mean_seconds\n";
   nlohmann::json rows = nlohmann::json::array();
   for (const StrategyTiming& row : report.rows) {
      const auto opt = [](const std::optional<Index>& v) { return v ? std::to_string(*v) : std::string(); };
      csv << row.strategy << ',' << report.problem.lx << ',' << report.problem.ly << ','
          << report.problem.mx << ',' << report.problem.my << ',' << opt(row.m) << ','
          << opt(row.lambda) << ',' << format_seconds(row.mean_seconds) << '\n';
      nlohmann::json j;
      j["strategy"] = row.strategy;
      j["Lx"] = report.problem.lx;
      j["Ly"] = report.problem.ly;
      j["Mx"] = report.problem.mx;
      j["My"] = report.problem.my;
      j["m"] = row.m ? nlohmann::json(*row.m) : nlohmann::json(nullptr);
      j["lambda"] = row.lambda ? nlohmann::json(*row.lambda) : nlohmann::json(nullptr);
      j["mean_seconds"] = row.mean_seconds;
      rows.push_back(std::move(j));
   }
   if (!csv) {
      throw std::runtime_error("cannot write " + csv_path.string());
   }

   const auto json_path = dir / "bench.json";
   std::ofstream json(json_path, std::ios::trunc);
   nlohmann::json doc;
   doc["rows"] = std::move(rows);
   doc["gate_max_relative_error"] = report.gate_error;
   doc["pow2_over_hybrid"] = report.pow2_over_hybrid ? nlohmann::json(*report.pow2_over_hybrid)
                                                     : nlohmann::json(nullptr);
   json << doc.dump(2) << '\n';
   if (!json) {
      throw std::runtime_error("cannot write " + json_path.string());
   }
}

} // namespace

BenchReport run_bench(const CliInvocation& inv, std::ostream& out)
{
   const Index lf = inv.integer("Lx");
   const Index lg = inv.integer("Ly");
   if (lf > lg) {
      throw UsageError("bench expects -Lx (shorter input) <= -Ly");
   }
   const Index N = lf + lg - 1;
   const Index M = inv.integer_or("Mx", N);
   if (M < lg) {
      throw UsageError("-Mx must be at least -Ly");
   }
   const int reps = static_cast<int>(inv.integer_or("R", 2));
   const std::filesystem::path out_dir = inv.text_or("out", ".");
   const Index smooth = next_smooth(M);
   const Index pow2 = next_pow2(M);

   BenchReport report;
   report.problem = {lf, lg, M, 1};

   const SearchSpace space = SearchSpace::from_divisors(lf, lg, M);
   report.gate_error = correctness_gate(space, lf, lg, M, smooth, pow2, seed_of(inv));

   std::mt19937_64 rng(seed_of(inv));
   const Eigen::VectorXcd f = random_signal(rng, lf);
   const Eigen::VectorXcd g = random_signal(rng, lg);
   const Clock clock = steady_clock_seconds();

   const PlanSet plans(space, lf, lg, M);
   Eigen::VectorXcd sink;
   const SearchResult best = search(inv, space, [&](Index m, Index lambda) {
      sink = plans.at(m, lambda).run(f, g);
   });
   report.hybrid_record = record_from_search(report.problem, best, reps);

   if (lf * lg <= direct_work_limit) {
      report.rows.push_back({"direct", std::nullopt, std::nullopt,
                             time_conv([&] { sink = direct_conv(f, g); }, reps, clock)});
   }
   report.rows.push_back({"explicit_smooth", smooth, std::nullopt,
                          time_conv([&] { sink = explicit_conv(f, g, smooth); }, reps, clock)});
   report.rows.push_back({"explicit_pow2", pow2, std::nullopt,
                          time_conv([&] { sink = explicit_conv(f, g, pow2); }, reps, clock)});
   report.rows.push_back({"hybrid", best.m, best.lambda, best.seconds});
   if (best.seconds > 0) {
      report.pow2_over_hybrid = report.rows[report.rows.size() - 2].mean_seconds / best.seconds;
   }

   emit_timing_lines(report.hybrid_record, best.seconds, out);
   out << "correctness gate: max relative error " << format_seconds(report.gate_error) << '\n';
   for (const StrategyTiming& row : report.rows) {
      out << "strategy " << row.strategy;
      if (row.m) out << " size " << *row.m;
      if (row.lambda) out << " lambda " << *row.lambda;
      out << " mean seconds " << format_seconds(row.mean_seconds) << '\n';
   }
   if (report.pow2_over_hybrid) {
      out << "explicit_pow2 / hybrid time ratio: " << format_seconds(*report.pow2_over_hybrid) << '\n';
   }

   write_tables(out_dir, report);
   if (const auto dir = cache_dir(inv)) {
      RecordCache(*dir).put(report.hybrid_record);
   }
   return report;
}

TuneResult run_tune(const CliInvocation& inv, std::ostream& out)
{
   const Index lx = inv.integer("Lx");
   const Index ly = inv.integer("Ly");
   const Index mx = inv.integer_or("Mx", 2 * lx - 1);
   const Index my = inv.integer_or("My", 2 * ly - 1);
   if (mx < lx || my < ly) {
      throw UsageError("-Mx and -My must be at least -Lx and -Ly");
   }
   const Index threads = inv.integer_or("T", 1);
   const int reps = static_cast<int>(inv.integer_or("R", 2));

   std::mt19937_64 rng(seed_of(inv));
   struct Axis {
      Index length;
      Index padded;
      SearchSpace space;
      Eigen::VectorXcd f;
      Eigen::VectorXcd g;
   };
   std::vector<Axis> axes;
   for (auto [l, padded] : {std::pair{lx, mx}, std::pair{ly, my}}) {
      axes.push_back({l, padded, SearchSpace::from_divisors(l, l, padded), random_signal(rng, l),
                      random_signal(rng, l)});
   }

   // Each axis is tuned on its own 1D sub-problem; search is by hand so that
   // -search=random applies per axis too.
   TuneResult result;
   Eigen::VectorXcd sink;
   for (const Axis& axis : axes) {
      const PlanSet plans(axis.space, axis.length, axis.length, axis.padded);
      SearchResult best = search(inv, axis.space, [&](Index m, Index lambda) {
         sink = plans.at(m, lambda).run(axis.f, axis.g);
      });
      AxisParameters p;
      p.length = axis.length;
      p.padded_length = axis.padded;
      p.copies = threads;
      p.fft_size = best.m;
      p.ratio = best.lambda;
      p.validate();
      result.parameters.push_back(p);
      result.axes.push_back(std::move(best));
   }

   const ProblemKey key{lx, ly, mx, my};
   const TimingRecord record = record_from_search(key, result.axes[0], reps);
   emit_timing_lines(record, result.axes[0].seconds, out);
   const char* names[] = {"x", "y"};
   for (std::size_t i = 0; i < result.parameters.size(); ++i) {
      const AxisParameters& p = result.parameters[i];
      out << "axis " << names[i] << " L " << p.length << " M " << p.padded_length << " C " << p.copies
          << " fft " << p.fft_size << " lambda " << p.ratio << " D " << p.residues_per_pass
          << " I " << (p.in_place ? "in-place" : "out-of-place") << '\n';
   }
   out << "measurements " << result.measurement_count() << '\n';

   if (const auto dir = cache_dir(inv)) {
      RecordCache(*dir).put(record);
   }
   return result;
}

} // namespace dealias::cli
