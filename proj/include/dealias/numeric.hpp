#ifndef DEALIAS_NUMERIC_HPP
#define DEALIAS_NUMERIC_HPP

/**
 * @file numeric.hpp
 * @brief Complex buffers, roots of unity, the reference DFT and the FFT adapter.
 *
 * Transform convention used throughout the library:
 *
 *   forward   F_k = sum_j zeta_M^{+kj} f_j          (unnormalized)
 *   backward  f_j = (1/M) sum_k zeta_M^{-kj} F_k
 *
 * with zeta_M = exp(2 pi i / M). Most FFT backends use the opposite sign for
 * their forward transform; fft() hides that behind the adapter.
 */

#include <Eigen/Core>
#include <unsupported/Eigen/FFT>

#include <array>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dealias {

using Index = Eigen::Index;

template <typename Real>
using ComplexVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

template <typename Real>
using ComplexMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

/// Contiguous double-precision complex samples; the universal signal container.
using ComplexBuffer = ComplexVector<double>;
using ComplexArray2D = ComplexMatrix<double>;

enum class Direction { forward, backward };

class TransformError : public std::runtime_error {
public:
   TransformError(Index length, const std::string& what)
      : std::runtime_error("transform of length " + std::to_string(length) + ": " + what)
      , length_(length)
   {
   }

   Index length() const noexcept { return length_; }

private:
   Index length_;
};

/// ceil(a / b) for a >= 0, b > 0.
constexpr Index ceilquotient(Index a, Index b)
{
   if (b <= 0) {
      throw std::invalid_argument("ceilquotient: divisor must be positive");
   }
   if (a < 0) {
      throw std::invalid_argument("ceilquotient: dividend must be nonnegative");
   }
   return (a + b - 1) / b;
}

/// exp(2 pi i k / M). Multiples of a quarter turn are returned exactly.
template <typename Real = double>
std::complex<Real> primitive_root_power(Index M, Index k)
{
   if (M < 1) {
      throw std::invalid_argument("primitive_root_power: order must be positive");
   }
   Index n = k % M;
   if (n < 0) {
      n += M;
   }
   if ((4 * n) % M == 0) {
      switch ((4 * n) / M) {
      case 0: return {Real(1), Real(0)};
      case 1: return {Real(0), Real(1)};
      case 2: return {Real(-1), Real(0)};
      default: return {Real(0), Real(-1)};
      }
   }
   const Real angle = Real(2) * std::numbers::pi_v<Real> * Real(n) / Real(M);
   return std::polar(Real(1), angle);
}

/// Table of zeta_M^n for n in [0, M).
template <typename Real = double>
ComplexVector<Real> roots_of_unity(Index M)
{
   if (M < 1) {
      throw std::invalid_argument("roots_of_unity: order must be positive");
   }
   ComplexVector<Real> roots(M);
   for (Index n = 0; n < M; ++n) {
      roots[n] = primitive_root_power<Real>(M, n);
   }
   return roots;
}

/// O(M^2) direct evaluation of the transform pair. Used as the oracle for fft().
template <typename Derived>
ComplexVector<typename Derived::RealScalar>
naive_dft(const Eigen::MatrixBase<Derived>& input, Direction direction)
{
   using Real = typename Derived::RealScalar;
   const Index M = input.size();
   if (M == 0) {
      throw std::invalid_argument("naive_dft: empty input");
   }
   const ComplexVector<Real> roots = roots_of_unity<Real>(M);
   ComplexVector<Real> out(M);
   for (Index k = 0; k < M; ++k) {
      std::complex<Real> sum(0);
      Index idx = 0;
      for (Index j = 0; j < M; ++j) {
         const std::complex<Real>& w = roots[idx];
         sum += direction == Direction::forward ? w * input[j] : std::conj(w) * input[j];
         idx += k;
         if (idx >= M) {
            idx %= M;
         }
      }
      out[k] = sum;
   }
   if (direction == Direction::backward) {
      out /= Real(M);
   }
   return out;
}

namespace detail {

template <typename Real>
Eigen::FFT<Real>& fft_backend()
{
   thread_local Eigen::FFT<Real> backend = [] {
      Eigen::FFT<Real> b;
      b.SetFlag(Eigen::FFT<Real>::Unscaled);
      return b;
   }();
   return backend;
}

/// Unnormalized transform of n samples. sign = +1 computes sum zeta^{+kj} x_j,
/// sign = -1 computes sum zeta^{-kj} x_j. src and dst must not alias.
template <typename Real>
void raw_transform(const std::complex<Real>* src, std::complex<Real>* dst, Index n, int sign)
{
   if (n <= 0) {
      throw TransformError(n, "length must be positive");
   }
   if (n == 1) {
      dst[0] = src[0];
      return;
   }
   try {
      auto& backend = fft_backend<Real>();
      // The backend's forward transform uses the negative exponent.
      if (sign > 0) {
         backend.inv(dst, src, n);
      } else {
         backend.fwd(dst, src, n);
      }
   } catch (const std::exception& e) {
      throw TransformError(n, e.what());
   }
}

} // namespace detail

/// Fast transform with the same convention as naive_dft().
template <typename Derived>
ComplexVector<typename Derived::RealScalar>
fft(const Eigen::MatrixBase<Derived>& input, Direction direction)
{
   using Real = typename Derived::RealScalar;
   const Index M = input.size();
   if (M == 0) {
      throw TransformError(0, "empty input");
   }
   const ComplexVector<Real> in = input;
   ComplexVector<Real> out(M);
   if (direction == Direction::forward) {
      detail::raw_transform<Real>(in.data(), out.data(), M, +1);
   } else {
      detail::raw_transform<Real>(in.data(), out.data(), M, -1);
      out /= Real(M);
   }
   return out;
}

/// Relative L2 distance ||a - b|| / ||b||, or the absolute distance when b is zero.
template <typename DerivedA, typename DerivedB>
double relative_l2_error(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b)
{
   if (a.size() != b.size()) {
      throw std::invalid_argument("relative_l2_error: size mismatch");
   }
   const double diff = static_cast<double>((a - b).norm());
   const double ref = static_cast<double>(b.norm());
   return ref > 0 ? diff / ref : diff;
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& x, const char* what)
{
   if (!x.allFinite()) {
      throw std::domain_error(std::string(what) + ": non-finite sample");
   }
}

/// Divisors of n in ascending order.
std::vector<Index> divisors(Index n);

/// Integers of the form 2^a 3^b 5^c 7^d not exceeding a bound.
struct SmoothSizeSet {
   Index bound = 1;
   std::array<int, 4> exponent_caps{}; ///< caps for the exponents of 2, 3, 5, 7
   std::vector<Index> sizes;
};

SmoothSizeSet generate_multiples(int a_max, int b_max, int c_max, int d_max, Index bound);

/// True when n has no prime factor larger than 7.
bool is_smooth(Index n);

/// Smallest 7-smooth integer >= n.
Index next_smooth(Index n);

/// Smallest power of two >= n.
Index next_pow2(Index n);

} // namespace dealias

#endif
