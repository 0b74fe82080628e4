#include "doctest.h"
#include "oracles.hpp"

#include "dealias/conv2d.hpp"

#include <numeric>

using namespace dealias;
using oracle::cplx;
using oracle::Mat;
using oracle::Vec;

TEST_CASE("direct_conv_2d")
{
   std::mt19937_64 rng(1);
   const Mat g = oracle::random_matrix(rng, 4, 5);
   CHECK(direct_conv_2d(Mat::Constant(1, 1, 1.0), g) == g);

   Mat f(1, 2);
   f << 1, 2;
   Mat row(1, 4);
   row << 1, 2, 3, 4;
   Mat expected(1, 5);
   expected << 1, 4, 7, 10, 8;
   CHECK(direct_conv_2d(f, row) == expected);

   Mat ones_expected(3, 3);
   ones_expected << 1, 2, 1, 2, 4, 2, 1, 2, 1;
   CHECK(direct_conv_2d(Mat::Ones(2, 2), Mat::Ones(2, 2)) == ones_expected);

   const Mat a = oracle::random_matrix(rng, 3, 2);
   CHECK(oracle::rel_err(direct_conv_2d(a, g), oracle::linear_conv_2d(a, g)) < 1e-14);
   CHECK_THROWS_AS(direct_conv_2d(Mat(0, 0), g), std::invalid_argument);
}

TEST_CASE("mode_window")
{
   CHECK(mode_window(3, 5, ConvMode::full) == Window{0, 7});
   CHECK(mode_window(3, 5, ConvMode::same_big) == Window{0, 5});
   CHECK(mode_window(3, 5, ConvMode::same_small) == Window{1, 4});
   CHECK(mode_window(3, 5, ConvMode::valid) == Window{1, 4});
   CHECK_THROWS_AS(mode_window(5, 3, ConvMode::full), std::invalid_argument);

   for (Index l2 = 1; l2 <= 64; ++l2) {
      for (Index l1 = 1; l1 <= l2; ++l1) {
         const Index N = l1 + l2 - 1;
         for (ConvMode mode :
              {ConvMode::full, ConvMode::same_big, ConvMode::same_small, ConvMode::valid}) {
            const Window w = mode_window(l1, l2, mode);
            CHECK(0 <= w.begin);
            CHECK(w.begin <= w.end);
            CHECK(w.end <= N);
         }
      }
   }
}

TEST_CASE("conv mode names")
{
   for (ConvMode mode : {ConvMode::full, ConvMode::same_big, ConvMode::same_small, ConvMode::valid}) {
      CHECK(parse_conv_mode(to_string(mode)) == mode);
   }
   CHECK_THROWS_AS(parse_conv_mode("same"), std::invalid_argument);
}

TEST_CASE("hybrid_conv_2d examples")
{
   std::mt19937_64 rng(2);
   const Mat g = oracle::random_matrix(rng, 5, 5);
   CHECK(oracle::rel_err(hybrid_conv_2d(Mat::Constant(1, 1, 1.0), g, 5, 2, 1, ConvMode::full), g)
         < 1e-12);

   const Vec a = oracle::random_vector(rng, 3);
   const Vec b = oracle::random_vector(rng, 2);
   const Vec c = oracle::random_vector(rng, 6);
   const Vec d = oracle::random_vector(rng, 4);
   const Mat f = a * b.transpose();
   const Mat gg = c * d.transpose();
   const Mat expected = oracle::linear_conv(a, c) * oracle::linear_conv(b, d).transpose();
   const AxisParams x{5, 2, 2};
   const AxisParams y{8, 3, 1};
   CHECK(oracle::rel_err(hybrid_conv_2d(f, gg, x, y, ConvMode::full), expected) < 1e-9);

   Mat shift = Mat::Zero(2, 2);
   shift(1, 1) = 1;
   const Mat g3 = oracle::random_matrix(rng, 3, 3);
   Mat shifted = Mat::Zero(4, 4);
   shifted.block(1, 1, 3, 3) = g3;
   CHECK(oracle::rel_err(hybrid_conv_2d(shift, g3, 4, 2, 1, ConvMode::full), shifted) < 1e-12);

   CHECK_THROWS_AS(hybrid_conv_2d(g3, shift, 4, 2, 1, ConvMode::full), std::invalid_argument);
   CHECK_THROWS_AS(hybrid_conv_2d(shift, g3, 2, 2, 1, ConvMode::full), std::invalid_argument);
}

TEST_CASE("hybrid_conv_2d equals the 2D oracle across shapes and parameters")
{
   std::mt19937_64 rng(3);
   const Mat g = oracle::random_matrix(rng, 8, 8);
   for (Index h = 1; h <= 6; h += 2) {
      for (Index w = 1; w <= 6; ++w) {
         const Mat f = oracle::random_matrix(rng, h, w);
         const Mat expected = oracle::linear_conv_2d(f, g);
         for (Index m = 1; m <= 4; ++m) {
            for (Index ratio = 1; ratio <= 2; ++ratio) {
               const AxisParams x{w + 7, m, ratio};
               const AxisParams y{h + 7, m, ratio};
               CHECK(oracle::rel_err(hybrid_conv_2d(f, g, x, y, ConvMode::full), expected) <= 1e-9);
            }
         }
      }
   }
}

TEST_CASE("hybrid_conv_2d windows follow mode_window")
{
   std::mt19937_64 rng(4);
   const Mat f = oracle::random_matrix(rng, 3, 3);
   const Mat g = oracle::random_matrix(rng, 5, 5);
   const Mat full = oracle::linear_conv_2d(f, g);
   for (ConvMode mode : {ConvMode::same_big, ConvMode::same_small, ConvMode::valid}) {
      const Window w = mode_window(3, 5, mode);
      const Mat expected = full.block(w.begin, w.begin, w.size(), w.size());
      CHECK(oracle::rel_err(hybrid_conv_2d(f, g, 7, 2, 2, mode), expected) < 1e-9);
   }
}

TEST_CASE("hybrid_conv_2d aliases like the per-axis cyclic fold")
{
   std::mt19937_64 rng(5);
   const Mat f = oracle::random_matrix(rng, 3, 2);
   const Mat g = oracle::random_matrix(rng, 5, 6);
   const Mat full = oracle::linear_conv_2d(f, g);
   // M = 6 on x with m = 3, Lambda = 2 executes exactly 6 columns; y is unaliased.
   Mat folded = Mat::Zero(full.rows(), 6);
   for (Index c = 0; c < full.cols(); ++c) {
      folded.col(c % 6) += full.col(c);
   }
   const Mat out = hybrid_conv_2d(f, g, AxisParams{6, 3, 2}, AxisParams{7, 2, 1}, ConvMode::full);
   CHECK(oracle::rel_err(out, folded) < 1e-9);
}

TEST_CASE("hybrid_conv_2d is independent of the thread count")
{
   std::mt19937_64 rng(6);
   const Mat f = oracle::random_matrix(rng, 5, 7);
   const Mat g = oracle::random_matrix(rng, 17, 23);
   const Mat serial = hybrid_conv_2d(f, g, 40, 4, 2, ConvMode::full, 1);
   for (unsigned t : {2u, 3u, 8u}) {
      const Mat parallel = hybrid_conv_2d(f, g, 40, 4, 2, ConvMode::full, t);
      CHECK((parallel - serial).cwiseAbs().maxCoeff() <= 1e-12);
   }
}

TEST_CASE("kernel_library")
{
   Eigen::MatrixXd identity(3, 3);
   identity << 0, 0, 0, 0, 1, 0, 0, 0, 0;
   CHECK(kernel_library("identity").coefficients == identity);
   Eigen::MatrixXd sharpen(3, 3);
   sharpen << 0, -1, 0, -1, 5, -1, 0, -1, 0;
   CHECK(kernel_library("sharpen").coefficients == sharpen);
   Eigen::MatrixXd gauss(3, 3);
   gauss << 1, 2, 1, 2, 4, 2, 1, 2, 1;
   CHECK(kernel_library("gaussian_blur_3").coefficients.isApprox(gauss / 16.0));

   CHECK(kernel_library("gaussian_blur_5").size() == 5);
   CHECK(kernel_library("unsharp_5").coefficients(2, 2) == doctest::Approx(476.0 / 256.0));
   CHECK(kernel_library("ridge_2").coefficients.sum() == doctest::Approx(0.0));
   CHECK(kernel_names().size() == 8);
   for (const auto& name : kernel_names()) {
      const Kernel k = kernel_library(name);
      CHECK(k.size() % 2 == 1);
      CHECK(k.coefficients.rows() == k.coefficients.cols());
   }

   try {
      kernel_library("emboss");
      FAIL("expected an exception");
   } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find("gaussian_blur_5") != std::string::npos);
   }
}

TEST_CASE("image_convolve")
{
   std::mt19937_64 rng(7);
   std::uniform_int_distribution<int> px(0, 255);
   std::vector<ImagePlane> image(3, ImagePlane(20, 31));
   for (auto& plane : image) {
      plane = plane.unaryExpr([&](double) { return double(px(rng)); });
   }

   const auto same = image_convolve(image, kernel_library("identity"), ConvMode::same_big, 3, 1);
   REQUIRE(same.size() == 3);
   for (std::size_t c = 0; c < 3; ++c) {
      REQUIRE(same[c].rows() == 20);
      REQUIRE(same[c].cols() == 31);
      CHECK((same[c] - image[c]).cwiseAbs().maxCoeff() <= 1.0);
   }

   const std::vector<ImagePlane> flat(1, ImagePlane::Constant(12, 12, 100.0));
   for (const auto& name : kernel_names()) {
      const Kernel k = kernel_library(name);
      if (std::abs(k.coefficients.sum() - 1.0) > 1e-12) {
         continue;
      }
      const Index c = (k.size() - 1) / 2;
      // Away from the zero boundary a unit-sum kernel preserves constants.
      const Eigen::MatrixXd inner =
         image_convolve(flat, k, ConvMode::same_big, 3, 2)[0].block(c, c, 12 - 2 * c, 12 - 2 * c);
      CHECK((inner.array() - 100.0).abs().maxCoeff() <= 1.0);
   }

   const auto full = image_convolve(image, kernel_library("box_blur"), ConvMode::full, 4, 2);
   CHECK(full[0].rows() == 22);
   CHECK(full[0].cols() == 33);
   CHECK(full[0].minCoeff() >= 0.0);
   CHECK(full[0].maxCoeff() <= 255.0);

   CHECK_THROWS_AS(image_convolve({ImagePlane::Zero(2, 2)}, kernel_library("identity"),
                                  ConvMode::same_big, 3, 1),
                   std::invalid_argument);
}

TEST_CASE("image_convolve treats channels independently")
{
   std::mt19937_64 rng(8);
   std::uniform_int_distribution<int> px(0, 255);
   std::vector<ImagePlane> image(3, ImagePlane(9, 14));
   for (auto& plane : image) {
      plane = plane.unaryExpr([&](double) { return double(px(rng)); });
   }
   const Kernel k = kernel_library("sharpen");
   const auto out = image_convolve(image, k, ConvMode::same_big, 3, 1);
   const std::vector<ImagePlane> permuted{image[2], image[0], image[1]};
   const auto out_permuted = image_convolve(permuted, k, ConvMode::same_big, 3, 1);
   CHECK(out_permuted[0] == out[2]);
   CHECK(out_permuted[1] == out[0]);
   CHECK(out_permuted[2] == out[1]);
}
