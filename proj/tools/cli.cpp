#include "cli.hpp"

#include "dealias/conv2d.hpp"
#include "dealias/pnm.hpp"
#include "dealias/timing_format.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <random>
#include <set>

namespace dealias::cli {

namespace {

constexpr Index max_size = Index{1} << 28;

struct SubcommandInfo {
   Subcommand sub;
   std::string_view name;
   std::set<std::string_view> flags;
};

const std::array<SubcommandInfo, 6>& subcommands()
{
   static const std::array<SubcommandInfo, 6> table{{
      {Subcommand::conv1d, "conv1d", {"Lx", "Ly", "Mx", "m", "lambda", "R", "t", "seed", "out"}},
      {Subcommand::conv2d,
       "conv2d",
       {"Lx", "Ly", "Mx", "My", "m", "lambda", "mode", "T", "R", "t", "seed", "out"}},
      {Subcommand::image, "image", {"in", "out", "kernel", "mode", "m", "lambda", "T"}},
      {Subcommand::tune,
       "tune",
       {"Lx", "Ly", "Mx", "My", "T", "R", "t", "search", "samples", "seed", "cache", "out"}},
      {Subcommand::bench,
       "bench",
       {"Lx", "Ly", "Mx", "T", "R", "t", "search", "samples", "seed", "cache", "out"}},
      {Subcommand::multiples, "multiples", {"bound"}},
   }};
   return table;
}

const std::set<std::string_view> integer_flags{"Lx", "Ly", "Mx", "My", "T", "R", "m",
                                               "lambda", "bound", "samples", "seed"};

Index parse_integer(std::string_view name, std::string_view value)
{
   long long v = 0;
   const auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
   if (value.empty() || ec != std::errc{} || end != value.data() + value.size()) {
      throw UsageError("-" + std::string(name) + " expects an integer, got '" + std::string(value) + "'");
   }
   if (name == "seed") {
      if (v < 0) {
         throw UsageError("-seed must be nonnegative");
      }
   } else if (v < 1 || v > max_size) {
      throw UsageError("-" + std::string(name) + " must lie in [1, " + std::to_string(max_size) + "]");
   }
   return static_cast<Index>(v);
}

Eigen::VectorXcd random_complex(std::mt19937_64& rng, Index n)
{
   std::uniform_real_distribution<double> u(-1.0, 1.0);
   Eigen::VectorXcd v(n);
   for (Index i = 0; i < n; ++i) {
      v[i] = {u(rng), u(rng)};
   }
   return v;
}

Eigen::MatrixXcd random_complex(std::mt19937_64& rng, Index rows, Index cols)
{
   Eigen::MatrixXcd a(rows, cols);
   a.reshaped() = random_complex(rng, rows * cols);
   return a;
}

ConvMode mode_flag(const CliInvocation& inv, std::string_view fallback)
{
   try {
      return parse_conv_mode(inv.text_or("mode", std::string(fallback)));
   } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
   }
}

std::ofstream open_output(const std::string& path)
{
   std::ofstream out(path, std::ios::trunc);
   if (!out) {
      throw std::runtime_error("cannot open " + path + " for writing");
   }
   out.precision(17);
   return out;
}

int run_multiples(const CliInvocation& inv, std::ostream& out)
{
   const SmoothSizeSet set = generate_multiples(62, 40, 27, 22, inv.integer("bound"));
   for (std::size_t i = 0; i < set.sizes.size(); ++i) {
      out << (i ? " " : "") << set.sizes[i];
   }
   out << '\n';
   return 0;
}

int run_conv1d(const CliInvocation& inv, std::ostream& out)
{
   const Index la = inv.integer("Lx");
   const Index lb = inv.integer("Ly");
   const Index shorter = std::min(la, lb);
   const Index N = la + lb - 1;
   const Index M = inv.integer_or("Mx", N);
   if (M < std::max(la, lb)) {
      throw UsageError("-Mx must be at least max(Lx, Ly)");
   }
   const Index m = inv.integer_or("m", shorter);
   const Index ratio = inv.integer_or("lambda", 1);
   const int reps = static_cast<int>(inv.integer_or("R", 1));

   std::mt19937_64 rng(static_cast<std::uint64_t>(inv.integer_or("seed", 1)));
   const Eigen::VectorXcd a = random_complex(rng, la);
   const Eigen::VectorXcd b = random_complex(rng, lb);

   Eigen::VectorXcd h;
   const double seconds =
      time_conv([&] { h = linear_convolve(a, b, M, m, ratio); }, reps, steady_clock_seconds());

   const Index executed = HybridPlan1D::make(shorter, std::max(la, lb), M, m, ratio).executed_length;
   const Eigen::VectorXcd reference = cyclic_fold(direct_conv(a, b), executed).head(h.size());
   const double error = relative_l2_error(h, reference);

   out << "conv1d Lf " << shorter << " Lg " << std::max(la, lb) << " M " << M << " m " << m
       << " lambda " << ratio << " samples " << h.size() << '\n';
   out << "relative L2 error vs direct: " << format_seconds(error) << '\n';
   if (inv.has("t")) {
      emit_timing_lines(TimingRecord{{la, lb, M, 1}, {m}, {std::max(seconds, 1e-12)}, reps},
                        std::nullopt, out);
   }
   if (inv.has("out")) {
      std::ofstream csv = open_output(inv.text("out"));
      csv << "index,real,imag\n";
      for (Index k = 0; k < h.size(); ++k) {
         csv << k << ',' << h[k].real() << ',' << h[k].imag() << '\n';
      }
   }
   return 0;
}

int run_conv2d(const CliInvocation& inv, std::ostream& out)
{
   const Index lx = inv.integer("Lx");
   const Index ly = inv.integer("Ly");
   const AxisParams x{inv.integer_or("Mx", 2 * lx - 1), inv.integer_or("m", lx), inv.integer_or("lambda", 1)};
   const AxisParams y{inv.integer_or("My", 2 * ly - 1), inv.integer_or("m", ly), inv.integer_or("lambda", 1)};
   if (x.padded_length < lx || y.padded_length < ly) {
      throw UsageError("-Mx and -My must be at least -Lx and -Ly");
   }
   const ConvMode mode = mode_flag(inv, "full");
   const auto threads = static_cast<unsigned>(inv.integer_or("T", 1));
   const int reps = static_cast<int>(inv.integer_or("R", 1));

   std::mt19937_64 rng(static_cast<std::uint64_t>(inv.integer_or("seed", 1)));
   const Eigen::MatrixXcd f = random_complex(rng, ly, lx);
   const Eigen::MatrixXcd g = random_complex(rng, ly, lx);

   Eigen::MatrixXcd h;
   const double seconds = time_conv([&] { h = hybrid_conv_2d(f, g, x, y, mode, threads); }, reps,
                                    steady_clock_seconds());

   out << "conv2d " << ly << " x " << lx << " padded " << y.padded_length << " x " << x.padded_length
       << " mode " << to_string(mode) << " output " << h.rows() << " x " << h.cols() << '\n';
   const bool unaliased = x.padded_length >= 2 * lx - 1 && y.padded_length >= 2 * ly - 1;
   if (unaliased && lx * ly <= 4096) {
      const Eigen::MatrixXcd full = direct_conv_2d(f, g);
      const Window wy = mode_window(ly, ly, mode);
      const Window wx = mode_window(lx, lx, mode);
      const Eigen::MatrixXcd expected = full.block(wy.begin, wx.begin, wy.size(), wx.size());
      out << "relative L2 error vs direct: " << format_seconds(relative_l2_error(h, expected)) << '\n';
   }
   if (inv.has("t")) {
      emit_timing_lines(TimingRecord{{lx, ly, x.padded_length, y.padded_length},
                                     {x.fft_size},
                                     {std::max(seconds, 1e-12)},
                                     reps},
                        std::nullopt, out);
   }
   if (inv.has("out")) {
      std::ofstream csv = open_output(inv.text("out"));
      csv << "row,col,real,imag\n";
      for (Index c = 0; c < h.cols(); ++c) {
         for (Index r = 0; r < h.rows(); ++r) {
            csv << r << ',' << c << ',' << h(r, c).real() << ',' << h(r, c).imag() << '\n';
         }
      }
   }
   return 0;
}

int run_image(const CliInvocation& inv, std::ostream& out)
{
   const std::string in_path = inv.text("in");
   const std::string out_path = inv.text("out");
   Kernel kernel;
   try {
      kernel = kernel_library(inv.text_or("kernel", "identity"));
   } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
   }
   const ConvMode mode = mode_flag(inv, "same_big");
   const PnmImage image = read_pnm(std::filesystem::path(in_path));
   if (image.width < kernel.size() || image.height < kernel.size()) {
      throw std::runtime_error(in_path + ": image is smaller than the " + kernel.name + " kernel");
   }
   const auto planes = image_convolve(to_planes(image), kernel, mode, inv.integer_or("m", kernel.size()),
                                      inv.integer_or("lambda", 1),
                                      static_cast<unsigned>(inv.integer_or("T", 1)));
   const PnmImage result = from_planes(planes);
   write_pnm(result, std::filesystem::path(out_path));
   out << "image " << in_path << " -> " << out_path << " kernel " << kernel.name << " mode "
       << to_string(mode) << " size " << result.width << " x " << result.height << '\n';
   return 0;
}

} // namespace

std::string_view to_string(Subcommand sub)
{
   for (const auto& info : subcommands()) {
      if (info.sub == sub) {
         return info.name;
      }
   }
   return "?";
}

bool CliInvocation::has(std::string_view name) const
{
   return flags.find(name) != flags.end();
}

Index CliInvocation::integer(std::string_view name) const
{
   const auto it = flags.find(name);
   if (it == flags.end()) {
      throw UsageError(std::string(to_string(subcommand)) + " requires -" + std::string(name));
   }
   return parse_integer(name, it->second);
}

Index CliInvocation::integer_or(std::string_view name, Index fallback) const
{
   return has(name) ? integer(name) : fallback;
}

std::string CliInvocation::text(std::string_view name) const
{
   const auto it = flags.find(name);
   if (it == flags.end() || it->second.empty()) {
      throw UsageError(std::string(to_string(subcommand)) + " requires -" + std::string(name));
   }
   return it->second;
}

std::string CliInvocation::text_or(std::string_view name, std::string fallback) const
{
   return has(name) ? text(name) : fallback;
}

std::string usage()
{
   return "usage: hybridconv <subcommand> [-flag=value ...]\n"
          "\n"
          "  conv1d     -Lx -Ly [-Mx -m -lambda -R -seed -out=file.csv -t]\n"
          "             hybrid convolution of two random vectors, checked against direct\n"
          "  conv2d     -Lx -Ly [-Mx -My -m -lambda -mode -T -R -seed -out=file.csv -t]\n"
          "             hybrid convolution of two random Ly x Lx arrays\n"
          "  image      -in=file.pnm -out=file.pnm [-kernel -mode -m -lambda -T]\n"
          "             filter a P5/P6 image; kernels: identity ridge_1 ridge_2 sharpen\n"
          "             box_blur gaussian_blur_3 gaussian_blur_5 unsharp_5\n"
          "  tune       -Lx -Ly [-Mx -My -T -R -search=grid|random -samples -seed -cache=dir -out=dir]\n"
          "             per-axis search for the fastest FFT size and size ratio\n"
          "  bench      -Lx -Ly [-Mx -T -R -search -samples -seed -cache=dir -out=dir]\n"
          "             1D benchmark of direct, explicit and tuned hybrid convolution\n"
          "             (Lx = shorter input, Ly = longer input, Mx = padded length)\n"
          "  multiples  -bound   list the 7-smooth integers up to bound\n"
          "\n"
          "  -mode: full same_big same_small valid. -t prints the timing table.\n"
          "  -R=n sets the repetitions per measurement; a bare -R keeps the default.\n"
          "  Exit status: 0 success, 1 usage error, 2 runtime error.\n";
}

CliInvocation parse_args(std::span<const std::string> args)
{
   if (args.empty()) {
      throw UsageError("missing subcommand");
   }
   const SubcommandInfo* chosen = nullptr;
   for (const auto& s : subcommands()) {
      if (s.name == args[0]) {
         chosen = &s;
      }
   }
   if (chosen == nullptr) {
      throw UsageError("unknown subcommand '" + args[0] + "'");
   }

   CliInvocation inv;
   inv.subcommand = chosen->sub;
   for (const std::string& arg : args.subspan(1)) {
      if (arg.size() < 2 || arg[0] != '-') {
         throw UsageError("unexpected argument '" + arg + "'");
      }
      const std::size_t eq = arg.find('=');
      const std::string name = arg.substr(1, eq == std::string::npos ? std::string::npos : eq - 1);
      if (!chosen->flags.contains(name)) {
         throw UsageError("unknown flag '-" + name + "' for " + std::string(chosen->name));
      }
      if (name == "t") {
         if (eq != std::string::npos) {
            throw UsageError("-t takes no value");
         }
         inv.flags[name] = "";
         continue;
      }
      if (name == "R" && eq == std::string::npos) {
         continue; // bare -R keeps the default repetition count
      }
      if (eq == std::string::npos) {
         throw UsageError("flag '-" + name + "' needs a value (-" + name + "=...)");
      }
      if (inv.flags.contains(name)) {
         throw UsageError("flag '-" + name + "' given twice");
      }
      const std::string value = arg.substr(eq + 1);
      if (integer_flags.contains(name)) {
         parse_integer(name, value);
      } else if (value.empty()) {
         throw UsageError("flag '-" + name + "' needs a value");
      }
      inv.flags[name] = value;
   }
   return inv;
}

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err)
{
   if (!args.empty() && (args[0] == "-h" || args[0] == "--help" || args[0] == "help")) {
      out << usage();
      return 0;
   }
   try {
      const CliInvocation inv = parse_args(args);
      switch (inv.subcommand) {
      case Subcommand::conv1d: return run_conv1d(inv, out);
      case Subcommand::conv2d: return run_conv2d(inv, out);
      case Subcommand::image: return run_image(inv, out);
      case Subcommand::tune: run_tune(inv, out); return 0;
      case Subcommand::bench: run_bench(inv, out); return 0;
      case Subcommand::multiples: return run_multiples(inv, out);
      }
      return 0;
   } catch (const UsageError& e) {
      err << "error: " << e.what() << "\n\n" << usage();
      return 1;
   } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return 2;
   }
}

} // namespace dealias::cli
