#include "dealias/conv2d.hpp"

#include <array>
#include <cmath>
#include <utility>

namespace dealias {

namespace {

constexpr std::array<std::pair<std::string_view, ConvMode>, 4> mode_names{{
   {"full", ConvMode::full},
   {"same_big", ConvMode::same_big},
   {"same_small", ConvMode::same_small},
   {"valid", ConvMode::valid},
}};

Eigen::MatrixXd square(std::initializer_list<std::initializer_list<double>> rows)
{
   const auto n = static_cast<Index>(rows.size());
   Eigen::MatrixXd k(n, n);
   Index i = 0;
   for (const auto& row : rows) {
      Index j = 0;
      for (double v : row) {
         k(i, j++) = v;
      }
      ++i;
   }
   return k;
}

std::vector<Kernel> build_kernels()
{
   const Eigen::MatrixXd binomial5 = square({{1, 4, 6, 4, 1},
                                             {4, 16, 24, 16, 4},
                                             {6, 24, 36, 24, 6},
                                             {4, 16, 24, 16, 4},
                                             {1, 4, 6, 4, 1}});
   Eigen::MatrixXd unsharp = binomial5;
   unsharp(2, 2) = -476;

   return {
      {"identity", square({{0, 0, 0}, {0, 1, 0}, {0, 0, 0}})},
      {"ridge_1", square({{-1, -1, -1}, {-1, 4, -1}, {-1, -1, -1}})},
      {"ridge_2", square({{-1, -1, -1}, {-1, 8, -1}, {-1, -1, -1}})},
      {"sharpen", square({{0, -1, 0}, {-1, 5, -1}, {0, -1, 0}})},
      {"box_blur", Eigen::MatrixXd::Ones(3, 3) / 9.0},
      {"gaussian_blur_3", square({{1, 2, 1}, {2, 4, 2}, {1, 2, 1}}) / 16.0},
      {"gaussian_blur_5", binomial5 / 256.0},
      {"unsharp_5", unsharp * (-1.0 / 256.0)},
   };
}

const std::vector<Kernel>& kernels()
{
   static const std::vector<Kernel> all = build_kernels();
   return all;
}

} // namespace

ConvMode parse_conv_mode(std::string_view name)
{
   for (const auto& [label, mode] : mode_names) {
      if (label == name) {
         return mode;
      }
   }
   throw std::invalid_argument("unknown convolution mode '" + std::string(name)
                               + "' (expected full, same_big, same_small or valid)");
}

std::string_view to_string(ConvMode mode)
{
   for (const auto& [label, m] : mode_names) {
      if (m == mode) {
         return label;
      }
   }
   return "full";
}

Window mode_window(Index L1, Index L2, ConvMode mode)
{
   if (L1 < 1 || L2 < 1) {
      throw std::invalid_argument("mode_window: lengths must be positive");
   }
   if (L1 > L2) {
      throw std::invalid_argument("mode_window: L1 must not exceed L2");
   }
   const Index N = L1 + L2 - 1;
   Window w{0, N};
   switch (mode) {
   case ConvMode::full: break;
   case ConvMode::same_big: w = {0, L2}; break;
   case ConvMode::same_small: w = {1, 1 + L1}; break;
   case ConvMode::valid: w = {ceilquotient(N, L2) - 1, ceilquotient(N, L1) + 1}; break;
   }
   w.end = std::min(w.end, N);
   w.begin = std::min(w.begin, w.end);
   return w;
}

Window image_window(Index kernel_size, Index image_size, ConvMode mode)
{
   if (mode == ConvMode::same_big) {
      if (kernel_size < 1 || kernel_size > image_size) {
         throw std::invalid_argument("image_window: kernel larger than image");
      }
      const Index centre = (kernel_size - 1) / 2;
      return {centre, centre + image_size};
   }
   return mode_window(kernel_size, image_size, mode);
}

const std::vector<std::string>& kernel_names()
{
   static const std::vector<std::string> names = [] {
      std::vector<std::string> out;
      for (const Kernel& k : kernels()) {
         out.push_back(k.name);
      }
      return out;
   }();
   return names;
}

Kernel kernel_library(std::string_view name)
{
   for (const Kernel& k : kernels()) {
      if (k.name == name) {
         return k;
      }
   }
   std::string valid;
   for (const std::string& n : kernel_names()) {
      valid += valid.empty() ? n : ", " + n;
   }
   throw std::invalid_argument("unknown kernel '" + std::string(name) + "' (valid: " + valid + ")");
}

std::vector<ImagePlane> image_convolve(const std::vector<ImagePlane>& channels, const Kernel& kernel,
                                       ConvMode mode, Index m, Index ratio, unsigned threads)
{
   const Index k = kernel.size();
   if (k < 1 || kernel.coefficients.cols() != k || !kernel.coefficients.allFinite()) {
      throw std::invalid_argument("image_convolve: kernel must be a finite square matrix");
   }
   std::vector<ImagePlane> out;
   out.reserve(channels.size());
   for (const ImagePlane& plane : channels) {
      if (plane.rows() < k || plane.cols() < k) {
         throw std::invalid_argument("image_convolve: kernel larger than image");
      }
      const ComplexArray2D f = kernel.coefficients.cast<std::complex<double>>();
      const ComplexArray2D g = plane.cast<std::complex<double>>();
      const AxisParams x_axis{k + plane.cols() - 1, m, ratio};
      const AxisParams y_axis{k + plane.rows() - 1, m, ratio};
      const ComplexArray2D full = hybrid_conv_2d(f, g, x_axis, y_axis, ConvMode::full, threads);

      const Window wy = image_window(k, plane.rows(), mode);
      const Window wx = image_window(k, plane.cols(), mode);
      const Eigen::MatrixXd real = full.block(wy.begin, wx.begin, wy.size(), wx.size()).real();
      out.push_back(real.unaryExpr([](double v) { return std::round(std::clamp(v, 0.0, 255.0)); }));
   }
   return out;
}

} // namespace dealias
