#ifndef DEALIAS_CONV2D_HPP
#define DEALIAS_CONV2D_HPP

/**
 * @file conv2d.hpp
 * @brief Two-dimensional hybrid convolution and image filtering.
 *
 * Arrays are Eigen matrices with rows along y and columns along x. The
 * residue transform runs over every row first, then over every column of the
 * row-transformed data; the inverse runs columns first, then rows. Each axis
 * has its own (M, m, Lambda).
 */

#include "dealias/conv1d.hpp"

#include <algorithm>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace dealias {

enum class ConvMode { full, same_big, same_small, valid };

ConvMode parse_conv_mode(std::string_view name);
std::string_view to_string(ConvMode mode);

/// Half-open output window [begin, end) along one axis.
struct Window {
   Index begin = 0;
   Index end = 0;

   Index size() const { return end - begin; }
   friend bool operator==(const Window&, const Window&) = default;
};

/**
 * Output window for inputs of length L1 <= L2 along one axis, N = L1 + L2 - 1:
 * full [0, N), same_big [0, L2), same_small [1, 1 + L1),
 * valid [ceil(N/L2) - 1, ceil(N/L1) + 1). Windows are clamped into [0, N).
 *
 * The valid window is not the conventional L2 - L1 + 1 interior.
 */
Window mode_window(Index L1, Index L2, ConvMode mode);

/// Per-axis hybrid parameters.
struct AxisParams {
   Index padded_length = 0; ///< M
   Index fft_size = 1;      ///< m
   Index ratio = 1;         ///< Lambda
};

namespace detail {

/// Runs body(i) for i in [0, n) on up to `threads` threads. Iterations must be independent.
template <typename Body>
void parallel_for(Index n, unsigned threads, Body&& body)
{
   const Index workers = std::min<Index>(std::max(1u, threads), n);
   if (workers <= 1) {
      for (Index i = 0; i < n; ++i) {
         body(i);
      }
      return;
   }
   std::vector<std::jthread> pool;
   pool.reserve(static_cast<std::size_t>(workers));
   for (Index w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
         for (Index i = w; i < n; i += workers) {
            body(i);
         }
      });
   }
}

} // namespace detail

/// Full linear 2D convolution by direct summation.
template <typename DerivedF, typename DerivedG>
ComplexMatrix<typename DerivedF::RealScalar> direct_conv_2d(const Eigen::MatrixBase<DerivedF>& f,
                                                            const Eigen::MatrixBase<DerivedG>& g)
{
   using Real = typename DerivedF::RealScalar;
   if (f.size() == 0 || g.size() == 0) {
      throw std::invalid_argument("direct_conv_2d: empty input");
   }
   ComplexMatrix<Real> h = ComplexMatrix<Real>::Zero(f.rows() + g.rows() - 1, f.cols() + g.cols() - 1);
   for (Index fc = 0; fc < f.cols(); ++fc) {
      for (Index fr = 0; fr < f.rows(); ++fr) {
         const std::complex<Real> w = f(fr, fc);
         h.block(fr, fc, g.rows(), g.cols()) += w * g;
      }
   }
   return h;
}

/**
 * Hybrid dealiased 2D convolution. f must not exceed g along either axis and
 * each axis needs M >= the larger input's extent. The result is the window of
 * the (aliased when M < L_f + L_g - 1) convolution selected by `mode`, with
 * window ends clamped to min(M, L_f + L_g - 1).
 */
template <typename DerivedF, typename DerivedG>
ComplexMatrix<typename DerivedF::RealScalar>
hybrid_conv_2d(const Eigen::MatrixBase<DerivedF>& f, const Eigen::MatrixBase<DerivedG>& g,
               const AxisParams& x_axis, const AxisParams& y_axis, ConvMode mode,
               unsigned threads = 1)
{
   using Real = typename DerivedF::RealScalar;
   using Complex = std::complex<Real>;
   using RowMajor = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

   if (f.size() == 0 || g.size() == 0) {
      throw std::invalid_argument("hybrid_conv_2d: empty input");
   }
   if (f.rows() > g.rows() || f.cols() > g.cols()) {
      throw std::invalid_argument("hybrid_conv_2d: first input must fit inside the second");
   }
   require_finite(f, "hybrid_conv_2d");
   require_finite(g, "hybrid_conv_2d");

   const HybridConvolution1D<Real> along_x(HybridPlan1D::make(
      f.cols(), g.cols(), x_axis.padded_length, x_axis.fft_size, x_axis.ratio));
   const HybridConvolution1D<Real> along_y(HybridPlan1D::make(
      f.rows(), g.rows(), y_axis.padded_length, y_axis.fft_size, y_axis.ratio));
   const Index nx = along_x.plan().executed_length;
   const Index ny = along_y.plan().executed_length;

   // Row pass: rows of f and g become residue-blocked spectra of length nx.
   const RowMajor fr = f;
   const RowMajor gr = g;
   RowMajor fx(f.rows(), nx);
   RowMajor gx(g.rows(), nx);
   detail::parallel_for(g.rows(), threads, [&](Index i) {
      ComplexVector<Real> scratch(along_x.scratch_size());
      if (i < f.rows()) {
         along_x.spectrum_f(fr.row(i).data(), fx.row(i).data(), scratch.data());
      }
      along_x.spectrum_g(gr.row(i).data(), gx.row(i).data(), scratch.data());
   });

   // Column pass on the transposed layout: row c of `spectrum` holds column c.
   RowMajor spectrum(nx, ny);
   detail::parallel_for(nx, threads, [&](Index c) {
      ComplexVector<Real> scratch(along_y.scratch_size());
      const ComplexVector<Real> fcol = fx.col(c);
      const ComplexVector<Real> gcol = gx.col(c);
      ComplexVector<Real> gspec(ny);
      along_y.spectrum_f(fcol.data(), spectrum.row(c).data(), scratch.data());
      along_y.spectrum_g(gcol.data(), gspec.data(), scratch.data());
      spectrum.row(c).array() *= gspec.transpose().array();
   });

   // Inverse along y, then along x.
   RowMajor partial(nx, ny);
   detail::parallel_for(nx, threads, [&](Index c) {
      ComplexVector<Real> scratch(along_y.scratch_size());
      along_y.inverse(spectrum.row(c).data(), partial.row(c).data(), scratch.data());
   });
   RowMajor spatial(ny, nx);
   detail::parallel_for(ny, threads, [&](Index r) {
      ComplexVector<Real> scratch(along_x.scratch_size());
      const ComplexVector<Real> column = partial.col(r);
      along_x.inverse(column.data(), spatial.row(r).data(), scratch.data());
   });
   spatial /= Real(along_x.plan().normalization) * Real(along_y.plan().normalization);

   Window wy = mode_window(f.rows(), g.rows(), mode);
   Window wx = mode_window(f.cols(), g.cols(), mode);
   wy.end = std::min(wy.end, along_y.plan().output_length());
   wx.end = std::min(wx.end, along_x.plan().output_length());
   wy.begin = std::min(wy.begin, wy.end);
   wx.begin = std::min(wx.begin, wx.end);
   return spatial.block(wy.begin, wx.begin, wy.size(), wx.size());
}

/// Square-parameter form: the same (M, m, Lambda) on both axes.
template <typename DerivedF, typename DerivedG>
ComplexMatrix<typename DerivedF::RealScalar>
hybrid_conv_2d(const Eigen::MatrixBase<DerivedF>& f, const Eigen::MatrixBase<DerivedG>& g, Index M,
               Index m, Index ratio, ConvMode mode, unsigned threads = 1)
{
   const AxisParams axis{M, m, ratio};
   return hybrid_conv_2d(f, g, axis, axis, mode, threads);
}

/// Named square filter. Coefficients are applied by convolution (zero boundary).
struct Kernel {
   std::string name;
   Eigen::MatrixXd coefficients;

   Index size() const { return coefficients.rows(); }
};

/// Built-in kernels: identity, ridge_1, ridge_2, sharpen, box_blur,
/// gaussian_blur_3, gaussian_blur_5, unsharp_5.
Kernel kernel_library(std::string_view name);
const std::vector<std::string>& kernel_names();

/// One channel of an image, rows along y. Samples are intensities in [0, 255].
using ImagePlane = Eigen::MatrixXd;

/**
 * Filters every channel independently with the hybrid 2D convolution
 * (M = kernel + image - 1 on each axis), keeps the real part, clamps to
 * [0, 255] and rounds.
 *
 * same_big keeps an image-sized window centred on the kernel, so the identity
 * kernel reproduces the image. The other modes use mode_window().
 */
std::vector<ImagePlane> image_convolve(const std::vector<ImagePlane>& channels, const Kernel& kernel,
                                       ConvMode mode, Index m, Index ratio, unsigned threads = 1);

/// Output window used by image_convolve along one axis.
Window image_window(Index kernel_size, Index image_size, ConvMode mode);

} // namespace dealias

#endif
