#include "gnq/hurwitz.hpp"

#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace gnq {

namespace {

std::mutex g_hist_mutex;
std::shared_ptr<const ContentHistogram> g_hist;

BigInt int_pow(long long base, int exp) {
  BigInt b = base;
  BigInt out = 1;
  for (int i = 0; i < exp; ++i) out *= b;
  return out;
}

}  // namespace

std::shared_ptr<const ContentHistogram> shared_content_histogram(int max_size) {
  if (max_size < 0) throw std::domain_error("max_size must be >= 0");
  std::lock_guard<std::mutex> lock(g_hist_mutex);
  if (!g_hist || static_cast<int>(g_hist->size()) <= max_size) {
    g_hist = std::make_shared<const ContentHistogram>(
        content_histogram(max_size));
  }
  return g_hist;
}

BigRat hurwitz_number(int g, int n, int k) {
  if (g != 0 && g != 1)
    throw std::domain_error("base genus must be 0 or 1");
  if (n < 1) throw std::domain_error("cover degree must be >= 1");
  if (k < 0) throw std::domain_error("branch point count must be >= 0");
  if (k % 2 != 0) return BigRat(0);
  if (g == 1) {
    auto hist = shared_content_histogram(n);
    BigInt total = 0;
    for (const auto& [content, count] : (*hist)[n])
      total += int_pow(content, k) * count;
    return BigRat(total);
  }
  // Sphere base: weight each partition by its squared normalised dimension.
  BigRat total = 0;
  BigInt nfact = 1;
  for (int i = 2; i <= n; ++i) nfact *= i;
  for_each_partition(n, -1, [&](const Partition& a) {
    BigInt dim = hook_dimension(a);
    BigRat w(dim * dim, nfact * nfact);
    total += w * BigRat(int_pow(total_content(a), k));
  });
  return total;
}

BigRat riemann_hurwitz_genus(int g, int n, int k) {
  return BigRat(k, 2) + 1 + BigRat(n) * (g - 1);
}

TruncatedSeries hurwitz_gf(int gprime, int M) {
  if (gprime < 1) throw std::domain_error("cover genus must be >= 1");
  if (M < 0) throw std::domain_error("truncation must be >= 0");
  if (M > 64)
    throw std::domain_error(
        "truncation beyond degree 64 exceeds the enumeration budget");
  static std::mutex memo_mutex;
  static std::map<std::pair<int, int>, TruncatedSeries> memo;
  std::lock_guard<std::mutex> lock(memo_mutex);
  auto it = memo.find({gprime, M});
  if (it != memo.end()) return it->second;

  TruncatedSeries s;
  s.M = M;
  s.d_power = 0;
  s.c.assign(M + 1, BigRat(0));
  if (gprime == 1) s.c[0] = 1;
  int k = 2 * gprime - 2;
  auto hist = shared_content_histogram(M);
  for (int n = 1; n <= M; ++n) {
    BigInt total = 0;
    for (const auto& [content, count] : (*hist)[n])
      total += int_pow(content, k) * count;
    s.c[n] = BigRat(total);
  }
  memo.insert({{gprime, M}, s});
  return s;
}

CertifiedValue content_moment(int k, int ell, long double q, int M) {
  if (k < 0 || ell < 0) throw std::domain_error("moment orders must be >= 0");
  if (k % 2 != 0) return CertifiedValue{0.0L, 0.0L};
  CertifiedValue phi =
      evaluate(euler_phi(M), q, TailModel::BOUNDED_COEFF);
  TruncatedSeries f = hurwitz_gf(k / 2 + 1, M);
  CertifiedValue fd =
      evaluate(d_operator(f, ell), q, TailModel::HURWITZ_TAIL, k / 2);
  return cv_mul(phi, fd);
}

CertifiedValue frobenius_moment(int g, int gprime, int ell, long double q,
                                int M) {
  if (g != 1)
    throw std::domain_error("only the torus family is supported");
  if (ell < 0) throw std::domain_error("moment order must be >= 0");
  TruncatedSeries f = hurwitz_gf(gprime, M);
  CertifiedValue den =
      evaluate(f, q, TailModel::HURWITZ_TAIL, gprime - 1);
  if (!(den.lo() > 0.0L))
    throw Uncertifiable(
        "cannot certify positivity of the generating function at this q");
  CertifiedValue num =
      evaluate(d_operator(f, ell), q, TailModel::HURWITZ_TAIL, gprime - 1);
  return cv_div(num, den);
}

std::string hurwitz_csv(int g, int n_max, int k_max) {
  std::ostringstream out;
  out << "n,k,H\n";
  for (int n = 1; n <= n_max; ++n) {
    for (int k = 0; k <= k_max; k += 2) {
      BigRat h = hurwitz_number(g, n, k);
      out << n << "," << k << "," << h << "\n";
    }
  }
  return out.str();
}

}  // namespace gnq
