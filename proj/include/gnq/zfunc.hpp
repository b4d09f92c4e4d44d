#pragma once

#include <string>
#include <vector>

#include "gnq/qseries.hpp"

namespace gnq {

// Default integer cutoff associated with a size cutoff M: ceil(sqrt(M)) + 10.
int default_m_int(int m_part);

// N = 1 normalisation: theta(q) / phi(q)^2 with certified truncation error.
CertifiedValue z1(long double q, int M);

// Finite part of the rank-N normalisation: the sum of q^{casimir} over
// decomposed triples (alpha, beta, n) with |alpha|, |beta| <= m_part and
// |n| <= m_int, computed by a factorised column DP per n-sector.  Deterministic
// summation order; no tail accounting.
long double zn_box_sum(int N, long double q, int m_part, int m_int);

// Certified rank-N normalisation: zn_box_sum plus a rigorous bound on the
// discarded size and integer tails.  Throws Uncertifiable when the cutoffs are
// too small for the bound to make sense (or leave the bound above the value).
CertifiedValue zn_bruteforce(int N, long double q, int m_part, int m_int);

// Certified single-sector (chiral) normalisation at coupling t: the sum of
// q_t^{|alpha| + (2/N) K(alpha)} over partitions with length at most
// floor((N+1)/2) - 1 and size at most m_part, q_t = e^{-t/2}, plus a tail
// bound.
CertifiedValue zn_chiral(int N, long double t, int m_part);

// Raw moment E[n^order] of the integer marginal with weights q^{n^2}/theta(q):
// exact zero for odd order, (D^{order/2} theta)(q) / theta(q) for even order.
CertifiedValue moment_theta(int order, long double q, int m);

// Even moment E[F^{2k}] of the cross-coupling
// F = K(alpha) + K(beta) + n(|alpha| - |beta|) under the product measure
// (q-uniform pair) x (integer marginal), via the closed multinomial formula in
// derivatives of the torus generating functions and theta.
CertifiedValue moment_F_closed(int k, long double q, int m);

// Same moment by two independent summation routes: (a) the multinomial
// assembly from separately enumerated content/size brackets, and (b) a direct
// triple sum over content classes of both partitions and the integer, each
// with certified truncation bounds.  Asserts the routes agree within their
// combined bounds (throws RouteDisagreement otherwise) and returns route (a).
// The triple sum restricts k <= 3 for cost control.
CertifiedValue moment_F_bruteforce(int k, long double q, int m);

// Odd raw moment E[F^{2j+1}] by the direct triple sum; exact cancellation
// makes this a certified interval around zero.
CertifiedValue moment_F_odd_bruteforce(int j, long double q, int m);

// Coefficient a_{2k}(t) of N^{-2k} in the large-N expansion of the rank-N
// normalisation at coupling t, computed by two independent routes (the moment
// formula and the direct genus/derivative double sum), cross-checked and
// intersected.  Throws RouteDisagreement if the certified intervals are
// disjoint.
CertifiedValue expansion_coeff(int k, long double t, int m);

// Chiral expansion coefficient t^{2k}/(2k)! * F_{1,k+1}(e^{-t/2}).
CertifiedValue expansion_coeff_chiral(int k, long double t, int m);

struct ExpansionReport {
  bool chiral = false;
  long double t = 0.0L;
  long double q = 0.0L;
  int p = 0;
  int m = 0;
  std::vector<int> n_grid;
  std::vector<CertifiedValue> coeffs;     // a_0 .. a_{2p}
  std::vector<CertifiedValue> zvals;      // certified Z_N per grid point
  std::vector<CertifiedValue> residuals;  // Z_N - sum_k a_{2k} N^{-2k}
  long double slope = 0.0L;     // least-squares slope of log|res| vs log N
  bool conclusive = false;      // every residual exceeds its certified bound
  bool signs_consistent = false;
};

// Fits the decay rate of the remainder after subtracting the first p + 1
// expansion coefficients across the given N grid.  The report is marked
// inconclusive when any residual is smaller than its certification bound, in
// which case the slope is not evidence of anything.
ExpansionReport verify_expansion(const std::vector<int>& n_grid, long double t,
                                 int p, int m, bool chiral);

std::string expansion_report_json(const ExpansionReport& r);
std::string expansion_report_csv(const ExpansionReport& r);

}  // namespace gnq
