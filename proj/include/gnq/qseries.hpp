#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "gnq/partition.hpp"

namespace gnq {

// Requested certification tolerance cannot be met at the given truncations.
struct Uncertifiable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Two supposedly-equal computation routes produced disjoint certified
// intervals: an internal bug trap, never a data error.
struct RouteDisagreement : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// value together with a proven bound on |value - exact quantity|.
struct CertifiedValue {
  long double val = 0.0L;
  long double err = 0.0L;
  long double lo() const { return val - err; }
  long double hi() const { return val + err; }
};

// Relative floating-point slack charged per certified evaluation.
inline constexpr long double kRelSlack = 1e-12L;
// Upper bound for pi*sqrt(2/3) (p(n) < e^{c sqrt n}); every use is in an
// upper-bound position, so rounding c up keeps all bounds valid.
inline constexpr long double kC = 2.56509966032373L;

CertifiedValue cv_exact(long double v);
CertifiedValue cv_add(const CertifiedValue& a, const CertifiedValue& b);
CertifiedValue cv_sub(const CertifiedValue& a, const CertifiedValue& b);
CertifiedValue cv_mul(const CertifiedValue& a, const CertifiedValue& b);
// Throws Uncertifiable when the denominator interval reaches 0.
CertifiedValue cv_div(const CertifiedValue& a, const CertifiedValue& b);
CertifiedValue cv_scale(long double s, const CertifiedValue& a);
bool cv_overlap(const CertifiedValue& a, const CertifiedValue& b);
// Tightest interval contained in both; callers check cv_overlap first.
CertifiedValue cv_intersect(const CertifiedValue& a, const CertifiedValue& b);

// Formal power series in q truncated at degree M, exact rational coefficients.
// d_power counts applications of D = q d/dq since construction by a producer;
// evaluation tail models use it to dominate the differentiated tail.
struct TruncatedSeries {
  std::vector<BigRat> c;  // c[0..M]
  int M = 0;
  int d_power = 0;

  TruncatedSeries() = default;
  explicit TruncatedSeries(int M_) : c(M_ + 1, BigRat(0)), M(M_) {}
  const BigRat& coeff(int d) const { return c.at(d); }
};

// phi(q) = prod_{m>=1} (1-q^m), truncated: pentagonal-number coefficients.
TruncatedSeries euler_phi(int M);
// 1/phi = sum p(n) q^n.
TruncatedSeries inverse_phi(int M);
// theta(q) = sum_{n in Z} q^{n^2}.
TruncatedSeries theta(int M);
TruncatedSeries d_operator(const TruncatedSeries& s, int k);
TruncatedSeries ts_add(const TruncatedSeries& a, const TruncatedSeries& b);
// Product truncated at min of the operand degrees.
TruncatedSeries ts_mul(const TruncatedSeries& a, const TruncatedSeries& b);
TruncatedSeries ts_scale(const BigRat& s, const TruncatedSeries& a);

enum class TailModel {
  NONE,           // exact polynomial identity; rounding slack only
  P_TAIL,         // |c_n| <= p(n) * n^{d_power}
  THETA_TAIL,     // theta-type lattice coefficients
  HURWITZ_TAIL,   // |c_n| <= p(n) (n^2/2)^{2k} n^{d_power}; k passed separately
  BOUNDED_COEFF,  // |c_n| <= 1 * n^{d_power} (e.g. phi)
};

// Certified evaluation at real q in (0,1): Horner value, tail bound from the
// declared model at the series' truncation degree plus rounding slack.
CertifiedValue evaluate(const TruncatedSeries& s, long double q, TailModel model,
                        int hurwitz_k = 0);

// --- certified upper bounds for classical tails (all rigorous upper bounds) ---

// sum_{n>M} e^{cc*sqrt(n)} n^pow q^n  (ratio-bounded geometric tail).
long double tail_sqrtexp_poly(long double q, long double cc, int pow, int M);
// S_q = sum_{n>=1} e^{c sqrt n} q^n.
long double upper_S(long double q);
// T_q = e^{c^2/(2|log q|)} = sup_M e^{c sqrt M + (M/2) log q}.
long double upper_T(long double q);
// C_q = S_q T_q:  sum_{n>M} p(n) q^n <= C_q q^{M/2}.
long double upper_C(long double q);
// >= sup_{x in [0,1]} sum_{n in Z} q^{(n+x)^2}; uses the shift bound 1+theta(q).
long double upper_C_theta(long double q);
// sum_{|n| >= nmin} |n|^pow q^{n^2}  (upper bound).
long double theta_tail_pow(long double q, int pow, int nmin);
// sum_{n in Z} |n|^pow q^{n^2}  (upper bound).
long double theta_abs_power_sum(long double q, int pow);

// JSON object with exact decimal/rational coefficient strings and the
// truncation degree; no floating point.
std::string series_json(const TruncatedSeries& s, const std::string& name);

}  // namespace gnq
