#ifndef DEALIAS_CONV1D_HPP
#define DEALIAS_CONV1D_HPP

/**
 * @file conv1d.hpp
 * @brief One-dimensional dealiased linear convolution.
 *
 * Four routes to the same linear convolution h = f * g:
 *
 *  - direct_conv:     O(L_f L_g) summation, the reference.
 *  - explicit_conv:   zero pad both inputs to M and use one length-M FFT.
 *  - hybrid_conv_1d:  explicit padding of f (resp. g) to a multiple of m
 *                     (resp. Lambda m), followed by implicit padding to
 *                     M1 = q_g Lambda m by residue decomposition.
 *  - pow2_split_conv: the special case L_g = 2^(alpha-1) L_f, M = 2 L_g.
 *
 * For the hybrid route the output index k = q_g l_g + r_g of the length-M1
 * spectrum is visited one residue r_g at a time. The smaller input f is
 * transformed with size m, so for every r_g it contributes Lambda residues
 * r_f = q_g lambda + r_g which are interleaved into one block of size Lambda m
 * matching the block of g.
 */

#include "dealias/numeric.hpp"

#include <algorithm>
#include <vector>

namespace dealias {

/// Decomposition constants for one unequal-size convolution.
struct HybridPlan1D {
   Index length_f = 0;        ///< L_f, the smaller input
   Index length_g = 0;        ///< L_g, the larger input
   Index padded_length = 0;   ///< M, requested padded length
   Index fft_size = 0;        ///< m, transform size used for f
   Index ratio = 0;           ///< Lambda, g uses transforms of size Lambda m
   Index blocks_f = 0;        ///< p_f = ceil(L_f / m)
   Index blocks_g = 0;        ///< p_g = ceil(L_g / (Lambda m))
   Index residues_g = 0;      ///< q_g = ceil(M / (Lambda m))
   Index residues_f = 0;      ///< q_f = Lambda q_g
   Index executed_length = 0; ///< M1 = q_g Lambda m
   Index normalization = 0;   ///< Q_m = q_f m

   static HybridPlan1D make(Index length_f, Index length_g, Index padded_length, Index fft_size,
                            Index ratio);

   Index g_fft_size() const { return ratio * fft_size; }
   Index linear_length() const { return length_f + length_g - 1; }
   Index output_length() const { return std::min(padded_length, linear_length()); }

   /// Throws std::logic_error if any derived constant is inconsistent.
   void check_invariants() const;
};

inline HybridPlan1D HybridPlan1D::make(Index length_f, Index length_g, Index padded_length,
                                       Index fft_size, Index ratio)
{
   if (length_f < 1 || length_g < 1) {
      throw std::invalid_argument("hybrid plan: input lengths must be positive");
   }
   if (length_f > length_g) {
      throw std::invalid_argument("hybrid plan: the first input must not be longer than the second");
   }
   if (padded_length < length_g) {
      throw std::invalid_argument("hybrid plan: padded length smaller than the larger input");
   }
   if (fft_size < 1 || ratio < 1) {
      throw std::invalid_argument("hybrid plan: m and lambda must be positive");
   }
   HybridPlan1D plan;
   plan.length_f = length_f;
   plan.length_g = length_g;
   plan.padded_length = padded_length;
   plan.fft_size = fft_size;
   plan.ratio = ratio;
   const Index g_size = ratio * fft_size;
   plan.blocks_f = ceilquotient(length_f, fft_size);
   plan.blocks_g = ceilquotient(length_g, g_size);
   plan.residues_g = ceilquotient(padded_length, g_size);
   plan.residues_f = ratio * plan.residues_g;
   plan.executed_length = plan.residues_g * g_size;
   plan.normalization = plan.residues_f * fft_size;
   plan.check_invariants();
   return plan;
}

inline void HybridPlan1D::check_invariants() const
{
   const bool ok = length_f <= length_g && residues_g <= residues_f
      && executed_length >= padded_length && blocks_f * fft_size >= length_f
      && blocks_g * g_fft_size() >= length_g && residues_f == ratio * residues_g
      // The two normalizations in circulation, q_f m and q_g Lambda m, must agree.
      && normalization == residues_f * fft_size && normalization == residues_g * g_fft_size()
      && normalization == executed_length;
   if (!ok) {
      throw std::logic_error("hybrid plan: inconsistent decomposition constants");
   }
}

/// Position of one g-spectrum index inside the f decomposition.
struct ResidueTriple {
   Index ell_f = 0;
   Index lambda = 0;
   Index r_f = 0;

   friend bool operator==(const ResidueTriple&, const ResidueTriple&) = default;
};

/// Maps (l_g, r_g) to (l_f, lambda, r_f) with q_g l_g + r_g = Lambda q_g l_f + r_f.
inline ResidueTriple residue_match(Index ell_g, Index r_g, Index ratio, Index residues_g)
{
   if (ell_g < 0 || r_g < 0 || ratio < 1 || residues_g < 1) {
      throw std::invalid_argument("residue_match: arguments out of range");
   }
   if (r_g >= residues_g) {
      throw std::invalid_argument("residue_match: residue must be smaller than q_g");
   }
   const Index lambda = ell_g % ratio;
   return {ell_g / ratio, lambda, residues_g * lambda + r_g};
}

/// Geometry of one residue transform: block size m, data length L, p = ceil(L/m)
/// blocks, implicitly padded to q m.
struct ResidueShape {
   Index fft_size = 0;
   Index length = 0;
   Index blocks = 0;
   Index residues = 0;
};

namespace detail {

/// work[s] = sum_t x[t block + s] zeta_N^{R (t block + s)} for s < block, N = roots.size().
template <typename Real>
void fold_residue(const std::complex<Real>* x, Index n, Index block, Index R,
                  const ComplexVector<Real>& roots, std::complex<Real>* work)
{
   const Index N = roots.size();
   std::fill(work, work + block, std::complex<Real>(0));
   Index idx = 0;
   for (Index base = 0; base < n; base += block) {
      const Index stop = std::min(block, n - base);
      for (Index s = 0; s < stop; ++s) {
         work[s] += x[base + s] * roots[idx];
         idx += R;
         if (idx >= N) {
            idx %= N;
         }
      }
   }
}

/// out[j] += W[j mod block] conj(zeta_N^{r j}) for j < length, W the negative-exponent
/// unnormalized transform of the block. work needs room for block samples.
template <typename Real>
void unfold_residue(const std::complex<Real>* spectrum, Index block, Index r,
                    const ComplexVector<Real>& roots, Index length, std::complex<Real>* out,
                    std::complex<Real>* work)
{
   const Index N = roots.size();
   raw_transform<Real>(spectrum, work, block, -1);
   Index idx = 0;
   for (Index base = 0; base < length; base += block) {
      const Index stop = std::min(block, length - base);
      for (Index s = 0; s < stop; ++s) {
         out[base + s] += work[s] * std::conj(roots[idx]);
         idx += r;
         if (idx >= N) {
            idx %= N;
         }
      }
   }
}

} // namespace detail

/**
 * Executable hybrid plan: the integer plan plus the cached roots zeta_{M1}^n.
 * Immutable after construction; const members may be called concurrently
 * provided each caller passes its own scratch.
 */
template <typename Real>
class HybridConvolution1D {
public:
   using Complex = std::complex<Real>;

   explicit HybridConvolution1D(const HybridPlan1D& plan)
      : plan_(plan)
      , roots_(roots_of_unity<Real>(plan.executed_length))
   {
   }

   const HybridPlan1D& plan() const { return plan_; }
   const ComplexVector<Real>& roots() const { return roots_; }

   /// Scratch length required by the residue members.
   Index scratch_size() const { return 2 * plan_.g_fft_size(); }

   /// Spectrum samples k = q_g l + r_g, l < Lambda m, of f (length L_f).
   void forward_f(const Complex* f, Index r_g, Complex* block, Complex* scratch) const
   {
      const Index m = plan_.fft_size;
      const Index ratio = plan_.ratio;
      Complex* folded = scratch;
      Complex* transformed = scratch + m;
      for (Index lambda = 0; lambda < ratio; ++lambda) {
         const Index r_f = plan_.residues_g * lambda + r_g;
         detail::fold_residue<Real>(f, plan_.length_f, m, r_f, roots_, folded);
         detail::raw_transform<Real>(folded, transformed, m, +1);
         for (Index l = 0; l < m; ++l) {
            block[ratio * l + lambda] = transformed[l];
         }
      }
   }

   /// Spectrum samples k = q_g l + r_g, l < Lambda m, of g (length L_g).
   void forward_g(const Complex* g, Index r_g, Complex* block, Complex* scratch) const
   {
      const Index size = plan_.g_fft_size();
      detail::fold_residue<Real>(g, plan_.length_g, size, r_g, roots_, scratch);
      detail::raw_transform<Real>(scratch, block, size, +1);
   }

   /// Adds residue r_g of a product spectrum into out[0, M1), unnormalized.
   void accumulate_backward(const Complex* block, Index r_g, Complex* out, Complex* scratch) const
   {
      detail::unfold_residue<Real>(block, plan_.g_fft_size(), r_g, roots_, plan_.executed_length,
                                   out, scratch);
   }

   /// Whole residue-blocked spectrum (length M1, block r_g at offset r_g Lambda m).
   void spectrum_f(const Complex* f, Complex* spectrum, Complex* scratch) const
   {
      for (Index r = 0; r < plan_.residues_g; ++r) {
         forward_f(f, r, spectrum + r * plan_.g_fft_size(), scratch);
      }
   }

   void spectrum_g(const Complex* g, Complex* spectrum, Complex* scratch) const
   {
      for (Index r = 0; r < plan_.residues_g; ++r) {
         forward_g(g, r, spectrum + r * plan_.g_fft_size(), scratch);
      }
   }

   /// Inverse of a residue-blocked spectrum into out[0, M1), unnormalized.
   void inverse(const Complex* spectrum, Complex* out, Complex* scratch) const
   {
      std::fill(out, out + plan_.executed_length, Complex(0));
      for (Index r = 0; r < plan_.residues_g; ++r) {
         accumulate_backward(spectrum + r * plan_.g_fft_size(), r, out, scratch);
      }
   }

   /// M1-cyclic convolution of f and g, normalized.
   ComplexVector<Real> run(const ComplexVector<Real>& f, const ComplexVector<Real>& g) const
   {
      if (f.size() != plan_.length_f || g.size() != plan_.length_g) {
         throw std::invalid_argument("hybrid convolution: input lengths do not match the plan");
      }
      const Index size = plan_.g_fft_size();
      ComplexVector<Real> out = ComplexVector<Real>::Zero(plan_.executed_length);
      ComplexVector<Real> fblock(size);
      ComplexVector<Real> gblock(size);
      ComplexVector<Real> scratch(scratch_size());
      for (Index r = 0; r < plan_.residues_g; ++r) {
         forward_f(f.data(), r, fblock.data(), scratch.data());
         forward_g(g.data(), r, gblock.data(), scratch.data());
         fblock.array() *= gblock.array();
         accumulate_backward(fblock.data(), r, out.data(), scratch.data());
      }
      out /= Real(plan_.normalization);
      return out;
   }

private:
   HybridPlan1D plan_;
   ComplexVector<Real> roots_;
};

/// Full linear convolution, length L_f + L_g - 1, by direct summation.
template <typename DerivedF, typename DerivedG>
ComplexVector<typename DerivedF::RealScalar> direct_conv(const Eigen::MatrixBase<DerivedF>& f,
                                                         const Eigen::MatrixBase<DerivedG>& g)
{
   using Real = typename DerivedF::RealScalar;
   const Index lf = f.size();
   const Index lg = g.size();
   if (lf == 0 || lg == 0) {
      throw std::invalid_argument("direct_conv: empty input");
   }
   ComplexVector<Real> h = ComplexVector<Real>::Zero(lf + lg - 1);
   for (Index p = 0; p < lf; ++p) {
      for (Index j = 0; j < lg; ++j) {
         h[p + j] += f[p] * g[j];
      }
   }
   return h;
}

/// out_k = sum_s h_{k + s period}, k < period.
template <typename Derived>
ComplexVector<typename Derived::RealScalar> cyclic_fold(const Eigen::MatrixBase<Derived>& h,
                                                        Index period)
{
   if (period < 1) {
      throw std::invalid_argument("cyclic_fold: period must be positive");
   }
   ComplexVector<typename Derived::RealScalar> out =
      ComplexVector<typename Derived::RealScalar>::Zero(period);
   for (Index k = 0; k < h.size(); ++k) {
      out[k % period] += h[k];
   }
   return out;
}

/// Length-M cyclic convolution of the zero-padded inputs via one FFT pair.
template <typename DerivedF, typename DerivedG>
ComplexVector<typename DerivedF::RealScalar>
explicit_conv(const Eigen::MatrixBase<DerivedF>& f, const Eigen::MatrixBase<DerivedG>& g, Index M)
{
   using Real = typename DerivedF::RealScalar;
   if (f.size() == 0 || g.size() == 0) {
      throw std::invalid_argument("explicit_conv: empty input");
   }
   if (M < std::max(f.size(), g.size())) {
      throw std::invalid_argument("explicit_conv: padded length smaller than an input");
   }
   require_finite(f, "explicit_conv");
   require_finite(g, "explicit_conv");
   ComplexVector<Real> fp = ComplexVector<Real>::Zero(M);
   ComplexVector<Real> gp = ComplexVector<Real>::Zero(M);
   fp.head(f.size()) = f;
   gp.head(g.size()) = g;
   ComplexVector<Real> F = fft(fp, Direction::forward);
   const ComplexVector<Real> G = fft(gp, Direction::forward);
   F.array() *= G.array();
   return fft(F, Direction::backward);
}

/**
 * One residue of the implicitly padded transform.
 *
 * f holds shape.length samples (anything past that is ignored). With
 * Q = ceil(padded_length / (interleave m)), residue R = Q lambda + r is
 * computed for every lambda < interleave and the results are interleaved:
 * out[interleave l + lambda] = F_{q l + R}, where F is the forward transform of f
 * zero-padded to q m. shape.residues must equal interleave * Q.
 */
template <typename Derived>
ComplexVector<typename Derived::RealScalar>
forward_residue(const Eigen::MatrixBase<Derived>& f, const ResidueShape& shape, Index r,
                Index interleave, Index padded_length)
{
   using Real = typename Derived::RealScalar;
   const Index m = shape.fft_size;
   if (m < 1 || shape.length < 1 || shape.residues < 1 || interleave < 1) {
      throw std::invalid_argument("forward_residue: sizes must be positive");
   }
   if (shape.blocks != ceilquotient(shape.length, m) || f.size() < shape.length
       || shape.blocks > shape.residues) {
      throw std::invalid_argument("forward_residue: inconsistent (p, m, L)");
   }
   const Index Q = ceilquotient(padded_length, interleave * m);
   if (shape.residues != interleave * Q) {
      throw std::invalid_argument("forward_residue: q disagrees with ceil(M / (lambda m))");
   }
   if (r < 0 || r >= Q) {
      throw std::invalid_argument("forward_residue: residue out of range");
   }
   const ComplexVector<Real> x = f.head(shape.length);
   const ComplexVector<Real> roots = roots_of_unity<Real>(shape.residues * m);
   ComplexVector<Real> folded(m);
   ComplexVector<Real> transformed(m);
   ComplexVector<Real> out(interleave * m);
   for (Index lambda = 0; lambda < interleave; ++lambda) {
      detail::fold_residue<Real>(x.data(), shape.length, m, Q * lambda + r, roots, folded.data());
      detail::raw_transform<Real>(folded.data(), transformed.data(), m, +1);
      for (Index l = 0; l < m; ++l) {
         out[interleave * l + lambda] = transformed[l];
      }
   }
   return out;
}

/// Adds residue r of a spectrum block (size m) into accumulator[0, length); the
/// caller divides by q m after all q residues are in.
template <typename Real>
void backward_residue(const ComplexVector<Real>& block, ComplexVector<Real>& accumulator,
                      Index fft_size, Index length, Index residues, Index r)
{
   if (fft_size < 1 || residues < 1 || length < 0) {
      throw std::invalid_argument("backward_residue: sizes must be positive");
   }
   if (block.size() != fft_size) {
      throw std::invalid_argument("backward_residue: block length differs from m");
   }
   if (accumulator.size() < length || length > residues * fft_size) {
      throw std::invalid_argument("backward_residue: accumulator length mismatch");
   }
   if (r < 0 || r >= residues) {
      throw std::invalid_argument("backward_residue: residue out of range");
   }
   const ComplexVector<Real> roots = roots_of_unity<Real>(residues * fft_size);
   ComplexVector<Real> work(fft_size);
   detail::unfold_residue<Real>(block.data(), fft_size, r, roots, length, accumulator.data(),
                                work.data());
}

/// Hybrid convolution returning all M1 = q_g Lambda m executed samples.
template <typename DerivedF, typename DerivedG>
ComplexVector<typename DerivedF::RealScalar>
hybrid_conv_1d_raw(const Eigen::MatrixBase<DerivedF>& f, const Eigen::MatrixBase<DerivedG>& g,
                   Index M, Index m, Index ratio)
{
   using Real = typename DerivedF::RealScalar;
   require_finite(f, "hybrid_conv_1d");
   require_finite(g, "hybrid_conv_1d");
   const HybridConvolution1D<Real> conv(HybridPlan1D::make(f.size(), g.size(), M, m, ratio));
   return conv.run(f, g);
}

/// Hybrid convolution of f (L_f <= L_g) and g; returns min(M, L_f + L_g - 1) samples.
template <typename DerivedF, typename DerivedG>
ComplexVector<typename DerivedF::RealScalar>
hybrid_conv_1d(const Eigen::MatrixBase<DerivedF>& f, const Eigen::MatrixBase<DerivedG>& g, Index M,
               Index m, Index ratio)
{
   const ComplexVector<typename DerivedF::RealScalar> raw = hybrid_conv_1d_raw(f, g, M, m, ratio);
   const Index n = std::min<Index>(M, f.size() + g.size() - 1);
   return raw.head(n);
}

/// hybrid_conv_1d with the inputs ordered so the shorter one plays f.
template <typename DerivedF, typename DerivedG>
ComplexVector<typename DerivedF::RealScalar>
linear_convolve(const Eigen::MatrixBase<DerivedF>& a, const Eigen::MatrixBase<DerivedG>& b, Index M,
                Index m, Index ratio)
{
   if (a.size() <= b.size()) {
      return hybrid_conv_1d(a, b, M, m, ratio);
   }
   return hybrid_conv_1d(b, a, M, m, ratio);
}

/**
 * Convolution for L_g = 2^(alpha-1) L_f padded to M = 2 L_g.
 *
 * f is split into 2^alpha twiddled transforms of length L_f and g into two of
 * length L_g. Interleaving the even (resp. odd) f residues gives A_0 (A_1),
 * whose entries line up with the even (odd) residue of g; the two products
 * are inverted with a radix-2 butterfly. Returns the L_f + L_g - 1 samples of
 * the linear convolution.
 */
template <typename DerivedF, typename DerivedG>
ComplexVector<typename DerivedF::RealScalar>
pow2_split_conv(const Eigen::MatrixBase<DerivedF>& f, const Eigen::MatrixBase<DerivedG>& g)
{
   using Real = typename DerivedF::RealScalar;
   using Complex = std::complex<Real>;
   const Index lf = f.size();
   const Index lg = g.size();
   if (lf == 0 || lg == 0) {
      throw std::invalid_argument("pow2_split_conv: empty input");
   }
   if (lg < lf || lg % lf != 0) {
      throw std::invalid_argument("pow2_split_conv: L_g must be a power-of-two multiple of L_f");
   }
   const Index ratio = lg / lf;
   if ((ratio & (ratio - 1)) != 0) {
      throw std::invalid_argument("pow2_split_conv: size ratio is not a power of two");
   }
   require_finite(f, "pow2_split_conv");
   require_finite(g, "pow2_split_conv");
   const Index splits = 2 * ratio;
   const Index M = 2 * lg;
   const ComplexVector<Real> roots = roots_of_unity<Real>(M);

   // a[e][n] = F_{2n+e}, n < L_g
   std::array<ComplexVector<Real>, 2> a{ComplexVector<Real>(lg), ComplexVector<Real>(lg)};
   ComplexVector<Real> twiddled(lf);
   ComplexVector<Real> sub(lf);
   for (Index r = 0; r < splits; ++r) {
      for (Index j = 0; j < lf; ++j) {
         twiddled[j] = f[j] * roots[(r * j) % M];
      }
      detail::raw_transform<Real>(twiddled.data(), sub.data(), lf, +1);
      // F_{splits k + r} = sub[k] lands at n = ratio k + r / 2 of parity r % 2.
      for (Index k = 0; k < lf; ++k) {
         a[r % 2][ratio * k + r / 2] = sub[k];
      }
   }

   std::array<ComplexVector<Real>, 2> s{ComplexVector<Real>(lg), ComplexVector<Real>(lg)};
   ComplexVector<Real> gtw(lg);
   ComplexVector<Real> G(lg);
   for (Index e = 0; e < 2; ++e) {
      for (Index j = 0; j < lg; ++j) {
         gtw[j] = g[j] * roots[(e * j) % M];
      }
      detail::raw_transform<Real>(gtw.data(), G.data(), lg, +1);
      const ComplexVector<Real> H = (a[e].array() * G.array()).matrix();
      detail::raw_transform<Real>(H.data(), s[e].data(), lg, -1);
   }

   ComplexVector<Real> h(M);
   for (Index k = 0; k < lg; ++k) {
      const Complex odd = std::conj(roots[k]) * s[1][k];
      h[k] = (s[0][k] + odd) / Real(M);
      h[k + lg] = (s[0][k] - odd) / Real(M);
   }
   return h.head(lf + lg - 1);
}

} // namespace dealias

#endif
