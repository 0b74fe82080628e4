#include "dealias/numeric.hpp"

#include <algorithm>
#include <limits>

namespace dealias {

std::vector<Index> divisors(Index n)
{
   if (n < 1) {
      throw std::invalid_argument("divisors: n must be positive");
   }
   std::vector<Index> low;
   std::vector<Index> high;
   for (Index d = 1; d * d <= n; ++d) {
      if (n % d == 0) {
         low.push_back(d);
         if (d != n / d) {
            high.push_back(n / d);
         }
      }
   }
   low.insert(low.end(), high.rbegin(), high.rend());
   return low;
}

SmoothSizeSet generate_multiples(int a_max, int b_max, int c_max, int d_max, Index bound)
{
   if (bound < 1) {
      throw std::invalid_argument("generate_multiples: bound must be positive");
   }
   if (a_max < 0 || b_max < 0 || c_max < 0 || d_max < 0) {
      throw std::invalid_argument("generate_multiples: exponent caps must be nonnegative");
   }
   SmoothSizeSet set;
   set.bound = bound;
   set.exponent_caps = {a_max, b_max, c_max, d_max};

   // Each loop stops as soon as the partial product passes the bound, which
   // also keeps the products far from overflow.
   Index p2 = 1;
   for (int a = 0; a <= a_max && p2 <= bound; ++a, p2 *= 2) {
      Index p3 = p2;
      for (int b = 0; b <= b_max && p3 <= bound; ++b, p3 *= 3) {
         Index p5 = p3;
         for (int c = 0; c <= c_max && p5 <= bound; ++c, p5 *= 5) {
            Index p7 = p5;
            for (int d = 0; d <= d_max && p7 <= bound; ++d, p7 *= 7) {
               set.sizes.push_back(p7);
            }
         }
      }
   }
   std::sort(set.sizes.begin(), set.sizes.end());
   set.sizes.erase(std::unique(set.sizes.begin(), set.sizes.end()), set.sizes.end());
   return set;
}

bool is_smooth(Index n)
{
   if (n < 1) {
      return false;
   }
   for (Index p : {2, 3, 5, 7}) {
      while (n % p == 0) {
         n /= p;
      }
   }
   return n == 1;
}

Index next_smooth(Index n)
{
   Index candidate = std::max<Index>(n, 1);
   while (!is_smooth(candidate)) {
      ++candidate;
   }
   return candidate;
}

Index next_pow2(Index n)
{
   Index p = 1;
   while (p < n) {
      if (p > std::numeric_limits<Index>::max() / 2) {
         throw std::overflow_error("next_pow2: overflow");
      }
      p *= 2;
   }
   return p;
}

} // namespace dealias
