#pragma once

#include <memory>
#include <string>

#include "gnq/partition.hpp"
#include "gnq/qseries.hpp"

namespace gnq {

// Shared cache of content-power histograms, extended on demand.  The returned
// snapshot covers sizes 0..max_size (unrestricted length) and stays valid even
// if the cache grows later.
std::shared_ptr<const ContentHistogram> shared_content_histogram(int max_size);

// Weighted count of degree-n branched coverings of the torus (g = 1) or the
// sphere (g = 0) with 2k simple branch points, computed character-theoretically
// as a sum over partitions of n of the total-content power K(alpha)^{2k}
// (torus) or (f^alpha / n!)^2 K(alpha)^{2k} (sphere).  `k` here is the number
// of branch points, so odd values give an exact zero.  Requires n >= 1.
BigRat hurwitz_number(int g, int n, int k);

// Genus of the covering surface from the Riemann--Hurwitz count:
// g' = k/2 + 1 + n (g - 1) for a degree-n cover of a genus-g base with k
// simple branch points.
BigRat riemann_hurwitz_genus(int g, int n, int k);

// Generating function F_{1,g'}(q) = sum_{n>=1} H_1(n, 2g'-2) q^n of torus
// covers by genus-g' surfaces, truncated at degree M.  For g' = 1 the constant
// term 1 (the empty/degenerate cover) is adjoined so that F_{1,1} = 1/phi(q);
// that identity is *not* assumed here -- the coefficients come from the
// partition enumeration, so comparing against the pentagonal expansion of
// 1/phi is a genuine cross-check.  Enumeration cost caps M at 64.
TruncatedSeries hurwitz_gf(int gprime, int M);

// Moment E[K(alpha)^k |alpha|^ell] of total content and size under the
// q-uniform measure on partitions, evaluated with certified truncation error:
//   phi(q) * (D^ell F_{1, k/2+1})(q),  D = q d/dq.
// Odd k gives an exact zero.
CertifiedValue content_moment(int k, int ell, long double q, int M);

// Normalised moment E[|alpha|^ell] under the measure whose density against the
// q-uniform size weighting is proportional to the genus-g' cover counts:
//   (D^ell F_{1,g'})(q) / F_{1,g'}(q).
// Only the torus family (g = 1) is supported; throws Uncertifiable when the
// denominator cannot be certified positive.
CertifiedValue frobenius_moment(int g, int gprime, int ell, long double q,
                                int M);

// CSV table "n,k,H" of hurwitz_number(g, n, k) for n = 1..n_max and even
// k = 0, 2, ..., k_max (exact integers / rationals as plain strings).
std::string hurwitz_csv(int g, int n_max, int k_max);

}  // namespace gnq
