#include "gnq/qseries.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gnq {

CertifiedValue cv_exact(long double v) { return {v, 0.0L}; }

CertifiedValue cv_add(const CertifiedValue& a, const CertifiedValue& b) {
  return {a.val + b.val, a.err + b.err + fabsl(a.val + b.val) * kRelSlack};
}

CertifiedValue cv_sub(const CertifiedValue& a, const CertifiedValue& b) {
  return {a.val - b.val, a.err + b.err + fabsl(a.val - b.val) * kRelSlack};
}

CertifiedValue cv_mul(const CertifiedValue& a, const CertifiedValue& b) {
  long double v = a.val * b.val;
  long double e = fabsl(a.val) * b.err + fabsl(b.val) * a.err + a.err * b.err;
  return {v, e + fabsl(v) * kRelSlack};
}

CertifiedValue cv_div(const CertifiedValue& a, const CertifiedValue& b) {
  if (b.lo() <= 0.0L && b.hi() >= 0.0L)
    throw Uncertifiable("cv_div: denominator interval contains 0");
  long double v = a.val / b.val;
  long double babs = std::min(fabsl(b.lo()), fabsl(b.hi()));
  long double e = (a.err + fabsl(v) * b.err) / babs;
  return {v, e + fabsl(v) * kRelSlack};
}

CertifiedValue cv_scale(long double s, const CertifiedValue& a) {
  return {s * a.val, fabsl(s) * a.err + fabsl(s * a.val) * kRelSlack};
}

bool cv_overlap(const CertifiedValue& a, const CertifiedValue& b) {
  return a.lo() <= b.hi() && b.lo() <= a.hi();
}

CertifiedValue cv_intersect(const CertifiedValue& a, const CertifiedValue& b) {
  long double lo = std::max(a.lo(), b.lo());
  long double hi = std::min(a.hi(), b.hi());
  if (lo > hi) throw RouteDisagreement("cv_intersect: disjoint certified intervals");
  return {(lo + hi) / 2, (hi - lo) / 2 + fabsl(lo + hi) * kRelSlack};
}

TruncatedSeries euler_phi(int M) {
  TruncatedSeries s(M);
  for (int k = 0;; ++k) {
    long long g1 = static_cast<long long>(k) * (3 * k - 1) / 2;   // k and -k pentagonal
    long long g2 = static_cast<long long>(k) * (3 * k + 1) / 2;
    if (g1 > M && g2 > M) break;
    BigRat sign = (k % 2 == 0) ? 1 : -1;
    if (g1 <= M) s.c[g1] += sign;
    if (k > 0 && g2 <= M) s.c[g2] += sign;
  }
  return s;
}

TruncatedSeries inverse_phi(int M) {
  TruncatedSeries s(M);
  for (int n = 0; n <= M; ++n) s.c[n] = BigRat(partition_count(n));
  return s;
}

TruncatedSeries theta(int M) {
  TruncatedSeries s(M);
  s.c[0] = 1;
  for (long long n = 1; n * n <= M; ++n) s.c[n * n] = 2;
  return s;
}

TruncatedSeries d_operator(const TruncatedSeries& s, int k) {
  TruncatedSeries out = s;
  for (int d = 0; d <= s.M; ++d) {
    BigInt dk = 1;
    for (int j = 0; j < k; ++j) dk *= d;
    out.c[d] = s.c[d] * BigRat(dk);
  }
  out.d_power = s.d_power + k;
  return out;
}

TruncatedSeries ts_add(const TruncatedSeries& a, const TruncatedSeries& b) {
  TruncatedSeries out(std::min(a.M, b.M));
  for (int d = 0; d <= out.M; ++d) out.c[d] = a.c[d] + b.c[d];
  out.d_power = std::max(a.d_power, b.d_power);
  return out;
}

TruncatedSeries ts_mul(const TruncatedSeries& a, const TruncatedSeries& b) {
  TruncatedSeries out(std::min(a.M, b.M));
  for (int i = 0; i <= out.M; ++i) {
    if (a.c[i] == 0) continue;
    for (int j = 0; i + j <= out.M; ++j) {
      if (b.c[j] == 0) continue;
      out.c[i + j] += a.c[i] * b.c[j];
    }
  }
  out.d_power = std::max(a.d_power, b.d_power);
  return out;
}

TruncatedSeries ts_scale(const BigRat& s, const TruncatedSeries& a) {
  TruncatedSeries out = a;
  for (auto& x : out.c) x *= s;
  return out;
}

long double tail_sqrtexp_poly(long double q, long double cc, int pow, int M) {
  // Walk explicit terms forward until the term ratio
  //   h(m+1)/h(m) = e^{cc(sqrt(m+1)-sqrt(m))} (1+1/m)^pow q <= e^{cc/(2 sqrt m)} (1+1/m)^pow q
  // certifies below 0.9, then close with the geometric bound.
  long double lq = logl(q);
  long double total = 0.0L;
  for (long double m = static_cast<long double>(M) + 1.0L;; m += 1.0L) {
    long double h = expl(cc * sqrtl(m) + pow * logl(m) + m * lq);
    long double r = expl(cc / (2.0L * sqrtl(m))) * powl(1.0L + 1.0L / m, pow) * q;
    if (r < 0.9L) {
      total += h / (1.0L - r);
      break;
    }
    total += h;
    if (m > 2e6L || !std::isfinite(total)) return INFINITY;
  }
  return total * (1.0L + 1e-10L);
}

long double upper_S(long double q) {
  long double lq = logl(q);
  int nmax = std::max(400, static_cast<int>(kC * kC / (lq * lq)) + 100);
  long double s = 0.0L;
  for (int n = 1; n <= nmax; ++n) s += expl(n * lq + kC * sqrtl((long double)n));
  return s * (1.0L + 1e-10L) + tail_sqrtexp_poly(q, kC, 0, nmax);
}

long double upper_T(long double q) {
  return expl(kC * kC / (2.0L * fabsl(logl(q)))) * (1.0L + 1e-10L);
}

long double upper_C(long double q) { return upper_S(q) * upper_T(q); }

long double theta_tail_pow(long double q, int pow, int nmin) {
  if (nmin < 1) nmin = 1;
  long double n0 = nmin;
  long double r = powl(1.0L + 1.0L / n0, pow) * powl(q, 2.0L * n0 + 1.0L);
  if (!(r < 1.0L)) return INFINITY;
  long double h = powl(n0, (long double)pow) * expl(n0 * n0 * logl(q));
  return 2.0L * h / (1.0L - r) * (1.0L + 1e-10L);
}

long double theta_abs_power_sum(long double q, int pow) {
  int K = std::max({20, pow, static_cast<int>(sqrtl(40.0L / fabsl(logl(q)))) + 1});
  long double tail;
  while ((tail = theta_tail_pow(q, pow, K + 1)) == INFINITY && K < (1 << 20)) K *= 2;
  long double s = (pow == 0) ? 1.0L : 0.0L;  // n = 0 term
  for (int n = 1; n <= K; ++n)
    s += 2.0L * powl((long double)n, (long double)pow) * expl((long double)n * n * logl(q));
  return s * (1.0L + 1e-10L) + tail;
}

long double upper_C_theta(long double q) {
  return 1.0L + theta_abs_power_sum(q, 0);
}

CertifiedValue evaluate(const TruncatedSeries& s, long double q, TailModel model,
                        int hurwitz_k) {
  if (!(q > 0.0L && q < 1.0L)) throw std::domain_error("evaluate: q outside (0,1)");
  long double val = 0.0L;
  for (int d = s.M; d >= 0; --d) val = val * q + s.c[d].convert_to<long double>();
  int ell = s.d_power;
  long double tail = 0.0L;
  switch (model) {
    case TailModel::NONE:
      break;
    case TailModel::P_TAIL:
      tail = (ell == 0) ? upper_C(q) * powl(q, s.M / 2.0L)
                        : tail_sqrtexp_poly(q, kC, ell, s.M);
      break;
    case TailModel::BOUNDED_COEFF:
      tail = (ell == 0) ? powl(q, s.M + 1.0L) / (1.0L - q)
                        : tail_sqrtexp_poly(q, 0.0L, ell, s.M);
      break;
    case TailModel::THETA_TAIL: {
      int K1 = static_cast<int>(floorl(sqrtl((long double)s.M))) + 1;
      tail = (ell == 0) ? 2.0L * powl(q, (long double)K1 * K1) / (1.0L - q)
                        : theta_tail_pow(q, 2 * ell, K1);
      break;
    }
    case TailModel::HURWITZ_TAIL:
      tail = powl(2.0L, -2.0L * hurwitz_k) *
             tail_sqrtexp_poly(q, kC, 4 * hurwitz_k + ell, s.M);
      break;
  }
  if (!std::isfinite(tail))
    throw Uncertifiable("evaluate: tail bound diverges at this truncation");
  return {val, tail * (1.0L + kRelSlack) + fabsl(val) * kRelSlack + 1e-300L};
}

std::string series_json(const TruncatedSeries& s, const std::string& name) {
  std::ostringstream os;
  os << "{\"name\":\"" << name << "\",\"truncation_degree\":" << s.M
     << ",\"d_power\":" << s.d_power << ",\"coefficients\":[";
  for (int d = 0; d <= s.M; ++d) {
    if (d) os << ",";
    BigInt num = boost::multiprecision::numerator(s.c[d]);
    BigInt den = boost::multiprecision::denominator(s.c[d]);
    os << "\"" << num.str();
    if (den != 1) os << "/" << den.str();
    os << "\"";
  }
  os << "]}";
  return os.str();
}

}  // namespace gnq
