#include "doctest.h"
#include "oracles.hpp"

#include "dealias/conv1d.hpp"

using namespace dealias;
using oracle::cplx;
using oracle::Vec;

namespace {

Vec vec(std::initializer_list<cplx> values)
{
   Vec v(static_cast<Index>(values.size()));
   Index i = 0;
   for (const cplx& x : values) {
      v[i++] = x;
   }
   return v;
}

const Vec f12 = vec({1, 2});
const Vec g1234 = vec({1, 2, 3, 4});

} // namespace

TEST_CASE("direct_conv")
{
   CHECK(direct_conv(f12, g1234) == vec({1, 4, 7, 10, 8}));
   const Vec g = vec({cplx(1, 2), cplx(-3, 0.5), 7});
   CHECK(direct_conv(vec({1}), g) == g);
   CHECK(direct_conv(vec({0, 1}), g) == vec({0, g[0], g[1], g[2]}));
   CHECK_THROWS_AS(direct_conv(Vec(0), g), std::invalid_argument);

   std::mt19937_64 rng(1);
   for (int trial = 0; trial < 50; ++trial) {
      const Vec a = oracle::random_vector(rng, 1 + trial % 9);
      const Vec b = oracle::random_vector(rng, 1 + trial % 13);
      CHECK(oracle::rel_err(direct_conv(a, b), direct_conv(b, a)) < 1e-15);
      CHECK(oracle::rel_err(direct_conv(a, b), oracle::linear_conv(a, b)) < 1e-15);
   }
}

TEST_CASE("explicit_conv")
{
   CHECK(oracle::rel_err(explicit_conv(f12, g1234, 5), vec({1, 4, 7, 10, 8})) < 1e-12);
   const Vec padded = explicit_conv(f12, g1234, 8);
   CHECK(oracle::rel_err(padded.head(5), vec({1, 4, 7, 10, 8})) < 1e-12);
   CHECK(padded.tail(3).cwiseAbs().maxCoeff() <= 1e-10);
   CHECK(oracle::rel_err(explicit_conv(f12, g1234, 4), vec({9, 4, 7, 10})) < 1e-12);
   CHECK_THROWS_AS(explicit_conv(f12, g1234, 3), std::invalid_argument);

   std::mt19937_64 rng(2);
   for (Index M = 8; M <= 30; ++M) {
      const Vec a = oracle::random_vector(rng, 5);
      const Vec b = oracle::random_vector(rng, 8);
      CHECK(oracle::rel_err(explicit_conv(a, b, M), oracle::fold(oracle::linear_conv(a, b), M))
            < 1e-12);
   }
}

TEST_CASE("residue_match")
{
   CHECK(residue_match(5, 1, 2, 3) == ResidueTriple{2, 1, 4});
   CHECK(3 * 5 + 1 == 6 * 2 + 4);
   for (Index l = 0; l < 10; ++l) {
      CHECK(residue_match(l, 2, 1, 5) == ResidueTriple{l, 0, 2});
   }
   CHECK(residue_match(0, 2, 3, 4) == ResidueTriple{0, 0, 2});
   CHECK_THROWS_AS(residue_match(1, 3, 2, 3), std::invalid_argument);
}

TEST_CASE("residue coverage and the index identity")
{
   for (Index ratio = 1; ratio <= 4; ++ratio) {
      for (Index m = 1; m <= 6; ++m) {
         for (Index qg = 1; qg <= 5; ++qg) {
            std::vector<int> hits(static_cast<std::size_t>(qg * ratio * m), 0);
            for (Index lg = 0; lg < ratio * m; ++lg) {
               for (Index rg = 0; rg < qg; ++rg) {
                  const ResidueTriple t = residue_match(lg, rg, ratio, qg);
                  CHECK(qg * lg + rg == ratio * qg * t.ell_f + t.r_f);
                  CHECK(t.lambda < ratio);
                  ++hits[static_cast<std::size_t>(qg * lg + rg)];
               }
            }
            CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
         }
      }
   }
}

TEST_CASE("forward_residue examples")
{
   const Vec f = vec({1, 2, 3});
   const ResidueShape shape{2, 3, 2, 2};
   CHECK(oracle::rel_err(forward_residue(f, shape, 0, 1, 4), vec({6, 2})) < 1e-14);
   CHECK(oracle::rel_err(forward_residue(f, shape, 1, 1, 4), vec({cplx(-2, 2), cplx(-2, -2)}))
         < 1e-14);

   std::mt19937_64 rng(4);
   const Vec x = oracle::random_vector(rng, 6);
   CHECK(oracle::rel_err(forward_residue(x, ResidueShape{6, 6, 1, 1}, 0, 1, 6),
                         oracle::dft(x, +1))
         < 1e-13);

   CHECK_THROWS_AS(forward_residue(f, ResidueShape{2, 3, 1, 2}, 0, 1, 4), std::invalid_argument);
   CHECK_THROWS_AS(forward_residue(f, ResidueShape{2, 3, 2, 3}, 0, 1, 4), std::invalid_argument);
   CHECK_THROWS_AS(forward_residue(f, shape, 2, 1, 4), std::invalid_argument);
}

TEST_CASE("forward_residue interleaves residues against the padded DFT oracle")
{
   std::mt19937_64 rng(5);
   for (Index interleave = 1; interleave <= 3; ++interleave) {
      for (Index m = 1; m <= 5; ++m) {
         for (Index L = 1; L <= 9; ++L) {
            const Index M = L + 3;
            const Index Q = ceilquotient(M, interleave * m);
            const Index q = interleave * Q;
            const Index p = ceilquotient(L, m);
            if (p > q) {
               continue;
            }
            const Vec f = oracle::random_vector(rng, L);
            Vec padded = Vec::Zero(q * m);
            padded.head(L) = f;
            const Vec F = oracle::dft(padded, +1);
            for (Index r = 0; r < Q; ++r) {
               const Vec block = forward_residue(f, ResidueShape{m, L, p, q}, r, interleave, M);
               REQUIRE(block.size() == interleave * m);
               for (Index lambda = 0; lambda < interleave; ++lambda) {
                  for (Index l = 0; l < m; ++l) {
                     CHECK(std::abs(block[interleave * l + lambda] - F[q * l + Q * lambda + r])
                           < 1e-12);
                  }
               }
            }
         }
      }
   }
}

TEST_CASE("backward_residue")
{
   const Vec f = vec({1, 2, 3});
   const ResidueShape shape{2, 3, 2, 2};
   Vec acc = Vec::Zero(4);
   for (Index r = 0; r < 2; ++r) {
      backward_residue<double>(forward_residue(f, shape, r, 1, 4), acc, 2, 4, 2, r);
   }
   CHECK(oracle::rel_err(acc / 4.0, vec({1, 2, 3, 0})) < 1e-14);

   std::mt19937_64 rng(6);
   const Vec x = oracle::random_vector(rng, 7);
   Vec single = Vec::Zero(7);
   backward_residue<double>(forward_residue(x, ResidueShape{7, 7, 1, 1}, 0, 1, 7), single, 7, 7, 1,
                            0);
   CHECK(oracle::rel_err(single / 7.0, x) < 1e-13);

   Vec unchanged = x;
   backward_residue<double>(Vec::Zero(7), unchanged, 7, 7, 1, 0);
   CHECK(unchanged == x);

   CHECK_THROWS_AS(backward_residue<double>(Vec::Zero(3), acc, 2, 4, 2, 0), std::invalid_argument);
   Vec small = Vec::Zero(2);
   CHECK_THROWS_AS(backward_residue<double>(Vec::Zero(2), small, 2, 4, 2, 0),
                   std::invalid_argument);
}

TEST_CASE("backward residues invert forward residues for general q")
{
   std::mt19937_64 rng(7);
   for (Index m = 1; m <= 4; ++m) {
      for (Index q = 1; q <= 4; ++q) {
         const Index L = q * m;
         const Vec x = oracle::random_vector(rng, L);
         const ResidueShape shape{m, L, q, q};
         Vec acc = Vec::Zero(L);
         for (Index r = 0; r < q; ++r) {
            backward_residue<double>(forward_residue(x, shape, r, 1, L), acc, m, L, q, r);
         }
         CHECK(oracle::rel_err(acc / double(q * m), x) < 1e-12);
      }
   }
}

TEST_CASE("hybrid plan constants")
{
   // L = 6, M = 11, m = 4 gives p = 2 and q = 3.
   const HybridPlan1D plan = HybridPlan1D::make(6, 6, 11, 4, 1);
   CHECK(plan.blocks_f == 2);
   CHECK(plan.residues_g == 3);
   CHECK(plan.executed_length == 12);

   const HybridPlan1D p2 = HybridPlan1D::make(2, 4, 5, 2, 2);
   CHECK(p2.blocks_f == 1);
   CHECK(p2.blocks_g == 1);
   CHECK(p2.residues_g == 2);
   CHECK(p2.residues_f == 4);
   CHECK(p2.executed_length == 8);
   CHECK(p2.normalization == 8);
   CHECK(p2.output_length() == 5);

   for (Index lf = 1; lf <= 12; ++lf)
      for (Index lg = lf; lg <= 12; ++lg)
         for (Index M = lg; M <= 26; M += 3)
            for (Index m = 1; m <= 8; ++m)
               for (Index ratio = 1; ratio <= 4; ++ratio) {
                  CHECK_NOTHROW(HybridPlan1D::make(lf, lg, M, m, ratio).check_invariants());
               }

   CHECK_THROWS_AS(HybridPlan1D::make(5, 4, 8, 2, 1), std::invalid_argument);
   CHECK_THROWS_AS(HybridPlan1D::make(2, 4, 3, 2, 1), std::invalid_argument);
   CHECK_THROWS_AS(HybridPlan1D::make(2, 4, 8, 0, 1), std::invalid_argument);
   CHECK_THROWS_AS(HybridPlan1D::make(0, 4, 8, 2, 1), std::invalid_argument);
}

TEST_CASE("hybrid_conv_1d examples")
{
   CHECK(oracle::rel_err(hybrid_conv_1d(f12, g1234, 5, 2, 2), vec({1, 4, 7, 10, 8})) < 1e-12);
   CHECK(oracle::rel_err(hybrid_conv_1d(f12, g1234, 4, 2, 2), vec({9, 4, 7, 10})) < 1e-12);

   std::mt19937_64 rng(8);
   for (Index M = 4; M <= 12; ++M) {
      const Vec a = oracle::random_vector(rng, 3);
      const Vec b = oracle::random_vector(rng, 4);
      const Vec expl = explicit_conv(a, b, M);
      const Vec hyb = hybrid_conv_1d(a, b, M, M, 1);
      CHECK(oracle::rel_err(hyb, expl.head(hyb.size())) < 1e-12);
   }

   CHECK_THROWS_AS(hybrid_conv_1d(g1234, f12, 5, 2, 1), std::invalid_argument);
   CHECK_THROWS_AS(hybrid_conv_1d(Vec(0), g1234, 5, 2, 1), std::invalid_argument);
   Vec bad = f12;
   bad[0] = cplx(std::numeric_limits<double>::quiet_NaN(), 0);
   CHECK_THROWS_AS(hybrid_conv_1d(bad, g1234, 5, 2, 1), std::domain_error);
}

TEST_CASE("hybrid_conv_1d equals the direct oracle for every small problem")
{
   std::mt19937_64 rng(9);
   for (Index lf = 1; lf <= 32; lf += (lf < 8 ? 1 : 5)) {
      for (Index lg = lf; lg <= 32; lg += (lg < 10 ? 1 : 7)) {
         const Vec f = oracle::random_vector(rng, lf);
         const Vec g = oracle::random_vector(rng, lg);
         const Vec h = oracle::linear_conv(f, g);
         const Index M = lf + lg - 1;
         for (Index m = 1; m <= 8; ++m) {
            for (Index ratio = 1; ratio <= 4; ++ratio) {
               CHECK(oracle::rel_err(hybrid_conv_1d(f, g, M, m, ratio), h) <= 1e-9);
            }
         }
      }
   }
}

TEST_CASE("aliasing folds at the executed length")
{
   std::mt19937_64 rng(10);
   for (int trial = 0; trial < 60; ++trial) {
      const Index lf = 1 + trial % 7;
      const Index lg = lf + trial % 11;
      const Index N = lf + lg - 1;
      const Vec f = oracle::random_vector(rng, lf);
      const Vec g = oracle::random_vector(rng, lg);
      const Index m = 1 + trial % 4;
      const Index ratio = 1 + trial % 3;
      for (Index M = lg; M < N; ++M) {
         const HybridPlan1D plan = HybridPlan1D::make(lf, lg, M, m, ratio);
         const Vec raw = hybrid_conv_1d_raw(f, g, M, m, ratio);
         REQUIRE(raw.size() == plan.executed_length);
         const Vec folded = oracle::fold(oracle::linear_conv(f, g), plan.executed_length);
         CHECK(oracle::rel_err(raw, folded) <= 1e-9);
      }
   }
}

TEST_CASE("padding beyond the linear length does not change the result")
{
   std::mt19937_64 rng(11);
   const Vec f = oracle::random_vector(rng, 5);
   const Vec g = oracle::random_vector(rng, 13);
   const Index N = 17;
   const Vec base = hybrid_conv_1d(f, g, N, 3, 2);
   for (Index M = N; M <= 3 * N; ++M) {
      const Vec h = hybrid_conv_1d(f, g, M, 1 + M % 5, 1 + M % 3);
      REQUIRE(h.size() == N);
      CHECK(oracle::rel_err(h, base) <= 1e-9);
   }
}

TEST_CASE("linear_convolve orders its inputs")
{
   std::mt19937_64 rng(12);
   const Vec a = oracle::random_vector(rng, 9);
   const Vec b = oracle::random_vector(rng, 4);
   CHECK(oracle::rel_err(linear_convolve(a, b, 12, 3, 1), oracle::linear_conv(a, b)) < 1e-12);
}

TEST_CASE("HybridConvolution1D spectrum and inverse compose to the same result")
{
   std::mt19937_64 rng(13);
   const Vec f = oracle::random_vector(rng, 6);
   const Vec g = oracle::random_vector(rng, 11);
   const HybridConvolution1D<double> conv(HybridPlan1D::make(6, 11, 16, 3, 2));
   const Index M1 = conv.plan().executed_length;
   Vec F(M1), G(M1), out(M1), scratch(conv.scratch_size());
   conv.spectrum_f(f.data(), F.data(), scratch.data());
   conv.spectrum_g(g.data(), G.data(), scratch.data());
   F.array() *= G.array();
   conv.inverse(F.data(), out.data(), scratch.data());
   out /= double(conv.plan().normalization);
   CHECK(oracle::rel_err(out, conv.run(f, g)) < 1e-14);
   CHECK(oracle::rel_err(out.head(16), oracle::linear_conv(f, g)) < 1e-12);
}

TEST_CASE("pow2_split_conv")
{
   CHECK(oracle::rel_err(pow2_split_conv(f12, g1234), vec({1, 4, 7, 10, 8})) < 1e-12);
   CHECK(oracle::rel_err(pow2_split_conv(vec({1, 0}), vec({1, 0, 0, 0})), vec({1, 0, 0, 0, 0}))
         < 1e-14);

   std::mt19937_64 rng(14);
   for (Index lf : {1, 2, 3, 5, 8}) {
      const Vec a = oracle::random_vector(rng, lf);
      const Vec b = oracle::random_vector(rng, lf);
      CHECK(oracle::rel_err(pow2_split_conv(a, b), hybrid_conv_1d(a, b, 2 * lf, lf, 1)) < 1e-12);
      for (Index ratio : {2, 4, 8}) {
         const Vec g = oracle::random_vector(rng, ratio * lf);
         CHECK(oracle::rel_err(pow2_split_conv(a, g), oracle::linear_conv(a, g)) <= 1e-9);
      }
   }
   CHECK_THROWS_AS(pow2_split_conv(f12, oracle::Vec::Ones(6)), std::invalid_argument);
   CHECK_THROWS_AS(pow2_split_conv(f12, oracle::Vec::Ones(5)), std::invalid_argument);
   CHECK_THROWS_AS(pow2_split_conv(g1234, f12), std::invalid_argument);
}
