#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gnq/hurwitz.hpp"
#include "gnq/partition.hpp"
#include "gnq/qseries.hpp"

using namespace gnq;

namespace {

// Independent oracle: enumerate partitions and add box contents one box at a
// time (no per-row closed form, no histogram cache).
BigInt torus_count_oracle(int n, int k) {
  BigInt total = 0;
  for (const auto& a : enumerate_partitions(n)) {
    long long content = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
      for (int j = 1; j <= a[i]; ++j)
        content += j - static_cast<long long>(i + 1);
    BigInt p = 1;
    for (int t = 0; t < k; ++t) p *= content;
    total += p;
  }
  return total;
}

}  // namespace

TEST_CASE("no branching reduces to partition counting") {
  for (int n = 1; n <= 12; ++n)
    CHECK(hurwitz_number(1, n, 0) == BigRat(partition_count(n)));
}

TEST_CASE("two branch points against the box oracle") {
  const long long first[] = {0, 0, 2, 18, 80};
  for (int n = 1; n <= 4; ++n)
    CHECK(hurwitz_number(1, n, 2) == BigRat(first[n]));
  for (int n = 1; n <= 8; ++n)
    for (int k : {2, 4, 6})
      CHECK(hurwitz_number(1, n, k) == BigRat(torus_count_oracle(n, k)));
}

TEST_CASE("odd branch-point counts vanish") {
  for (int n = 1; n <= 8; ++n)
    for (int k : {1, 3, 5})
      CHECK(hurwitz_number(1, n, k) == BigRat(0));
}

TEST_CASE("sphere base with no branching sums squared dimensions") {
  for (int n = 1; n <= 8; ++n) {
    BigInt nfact = 1;
    for (int i = 2; i <= n; ++i) nfact *= i;
    CHECK(hurwitz_number(0, n, 0) == BigRat(BigInt(1), nfact));
  }
  // And against a direct weighted box oracle for k = 2.
  for (int n = 2; n <= 6; ++n) {
    BigInt nfact = 1;
    for (int i = 2; i <= n; ++i) nfact *= i;
    BigRat total(0);
    for (const auto& a : enumerate_partitions(n)) {
      BigInt d = hook_dimension(a);
      long long content = 0;
      for (std::size_t i = 0; i < a.size(); ++i)
        for (int j = 1; j <= a[i]; ++j)
          content += j - static_cast<long long>(i + 1);
      total += BigRat(d * d, nfact * nfact) *
               BigRat(BigInt(content) * content);
    }
    CHECK(hurwitz_number(0, n, 2) == total);
  }
}

TEST_CASE("domain guards") {
  CHECK_THROWS(hurwitz_number(2, 3, 0));
  CHECK_THROWS(hurwitz_number(1, 0, 0));
  CHECK_THROWS(hurwitz_number(1, 3, -2));
  CHECK_THROWS(hurwitz_gf(0, 10));
  CHECK_THROWS(hurwitz_gf(1, 100));
}

TEST_CASE("genus bookkeeping") {
  CHECK(riemann_hurwitz_genus(1, 5, 2) == BigRat(2));
  CHECK(riemann_hurwitz_genus(1, 5, 0) == BigRat(1));
  CHECK(riemann_hurwitz_genus(1, 5, 4) == BigRat(3));
  CHECK(riemann_hurwitz_genus(0, 3, 4) == BigRat(0));
  CHECK(riemann_hurwitz_genus(0, 2, 2) == BigRat(0));
}

TEST_CASE("generating functions from enumeration") {
  // Genus 1 covers of the torus: the series coincides with the reciprocal of
  // the pentagonal product -- a genuine cross-check because the coefficients
  // here come from the content enumeration.
  TruncatedSeries f11 = hurwitz_gf(1, 20);
  TruncatedSeries inv = inverse_phi(20);
  CHECK(f11.c[0] == 1);
  for (int n = 0; n <= 20; ++n) CHECK(f11.c[n] == inv.c[n]);
  TruncatedSeries f12 = hurwitz_gf(2, 12);
  CHECK(f12.c[0] == 0);
  for (int n = 1; n <= 12; ++n)
    CHECK(f12.c[n] == BigRat(torus_count_oracle(n, 2)));
}

TEST_CASE("content-and-size moments under the size-biased uniform measure") {
  // k odd is an exact zero.
  CertifiedValue odd = content_moment(1, 2, 0.2L, 30);
  CHECK(odd.val == 0.0L);
  CHECK(odd.err == 0.0L);
  // k = 0, l = 0 is the total mass 1.
  CertifiedValue one = content_moment(0, 0, 0.2L, 40);
  CHECK(fabsl(one.val - 1.0L) <= one.err);
  // Direct partial-sum comparison for E[K^2].
  long double q = 0.2L;
  CertifiedValue phi = evaluate(euler_phi(40), q, TailModel::BOUNDED_COEFF);
  long double direct = 0.0L;
  for (int n = 0; n <= 26; ++n) {
    for (const auto& a : enumerate_partitions(n)) {
      long long K = total_content(a);
      direct += static_cast<long double>(K) * K *
                powl(q, static_cast<long double>(n));
    }
  }
  direct *= phi.val;
  CertifiedValue m = content_moment(2, 0, q, 40);
  // The direct sum stops at size 26; its own tail at q = 0.2 is below
  // p(27) 27^4/4 q^27 / (1 - 2q) ~ 1e-10, well under the slack here.
  CHECK(fabsl(m.val - direct) <= m.err + 1e-8L);
  // Coarse and fine truncations agree within their certificates.
  CertifiedValue m25 = content_moment(2, 1, q, 25);
  CertifiedValue m40 = content_moment(2, 1, q, 40);
  CHECK(cv_overlap(m25, m40));
}

TEST_CASE("normalised size moments of the cover-weighted measure") {
  CertifiedValue r = frobenius_moment(1, 2, 1, 0.2L, 40);
  CHECK(r.val > 0.0L);
  // Consistency with the plain ratio of certified evaluations.
  TruncatedSeries f = hurwitz_gf(2, 40);
  CertifiedValue num =
      evaluate(d_operator(f, 1), 0.2L, TailModel::HURWITZ_TAIL, 1);
  CertifiedValue den = evaluate(f, 0.2L, TailModel::HURWITZ_TAIL, 1);
  CHECK(cv_overlap(r, cv_div(num, den)));
  CHECK_THROWS(frobenius_moment(0, 1, 1, 0.2L, 40));
  // A hopeless truncation cannot certify positivity.
  CHECK_THROWS_AS(frobenius_moment(1, 2, 0, 0.5L, 2), Uncertifiable);
}

TEST_CASE("CSV table shape") {
  std::string csv = hurwitz_csv(1, 4, 2);
  CHECK(csv.rfind("n,k,H\n", 0) == 0);
  CHECK(csv.find("\n2,2,2\n") != std::string::npos);
  CHECK(csv.find("\n4,2,80\n") != std::string::npos);
  CHECK(csv.find("\n4,0,5\n") != std::string::npos);
}
