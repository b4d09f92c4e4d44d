#include "gnq/zfunc.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <json.hpp>

#include "gnq/hurwitz.hpp"
#include "gnq/weights.hpp"

namespace gnq {

namespace {

long double fact_ld(int n) {
  long double f = 1.0L;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

long double pow_int(long double x, int k) {
  long double r = 1.0L;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

// Sum of q^{u*|a| + v*K(a)} over partitions a with at most L rows and size at
// most M, by a column-insertion DP: scanning candidate part sizes downward,
// R(i, a, s) sums over partitions using parts <= a drawn from rows i..L with
// total size s still available, and appending one part of size a at row i
// costs q^{a u + v (a(a+1)/2 - a i)}.
long double sector_dp(int L, int M, long double u, long double v,
                      long double lq) {
  if (L <= 0 || M <= 0) return 1.0L;
  std::vector<std::vector<long double>> nxt(M + 1,
                                            std::vector<long double>(M + 1, 1.0L));
  std::vector<std::vector<long double>> cur(M + 1,
                                            std::vector<long double>(M + 1, 0.0L));
  for (int i = L; i >= 1; --i) {
    for (int s = 0; s <= M; ++s) cur[0][s] = 1.0L;
    for (int a = 1; a <= M; ++a) {
      long double arow = static_cast<long double>(a);
      long double w =
          expl(lq * (arow * u + v * (arow * (arow + 1.0L) / 2.0L - arow * i)));
      for (int s = 0; s <= M; ++s) {
        long double t = cur[a - 1][s];
        if (s >= a) t += w * nxt[a][s - a];
        cur[a][s] = t;
      }
    }
    std::swap(cur, nxt);
  }
  return nxt[M][M];
}

// Certified upper bound for 1/phi(sqrt(q)).
long double inv_phi_half_hi(long double q) {
  return evaluate(inverse_phi(60), sqrtl(q), TailModel::P_TAIL).hi();
}

}  // namespace

int default_m_int(int m_part) {
  return static_cast<int>(std::ceil(std::sqrt(static_cast<double>(m_part)))) +
         10;
}

CertifiedValue z1(long double q, int M) {
  CertifiedValue phi = evaluate(euler_phi(M), q, TailModel::BOUNDED_COEFF);
  CertifiedValue th = evaluate(theta(M), q, TailModel::THETA_TAIL);
  return cv_div(th, cv_mul(phi, phi));
}

long double zn_box_sum(int N, long double q, int m_part, int m_int) {
  if (N < 2) throw std::domain_error("rank must be >= 2");
  if (!(q > 0.0L && q < 1.0L)) throw std::domain_error("q must be in (0,1)");
  int A = sector_A(N);
  int B = sector_B(N);
  long double lq = logl(q);
  long double v = 2.0L / N;
  long double total = 0.0L;
  for (int n = -m_int; n <= m_int; ++n) {
    long double ua = 1.0L + 2.0L * n / N;
    long double ub = 1.0L - 2.0L * n / N;
    long double sa = sector_dp(A, m_part, ua, v, lq);
    long double sb = sector_dp(B, m_part, ub, v, lq);
    total += expl(lq * static_cast<long double>(n) * n) * sa * sb;
  }
  return total;
}

CertifiedValue zn_bruteforce(int N, long double q, int m_part, int m_int) {
  long double box = zn_box_sum(N, q, m_part, m_int);
  long double sqq = sqrtl(q);
  long double phalf = inv_phi_half_hi(q);
  // Triples with |alpha| or |beta| beyond the size cutoff: the decomposed
  // quadratic form dominates q^{(|alpha|+|beta|)/2} times a shifted-lattice
  // sum over n bounded by upper_C_theta.
  long double size_tail = 2.0L * upper_C_theta(q) * upper_C(sqq) *
                          powl(sqq, m_part / 2.0L) * phalf;
  // Triples with |n| beyond the integer cutoff: after absorbing the cross
  // term, the lattice variable is shifted by at most ceil(m_part / N).
  int m0 = m_int + 1 - (m_part + N - 1) / N;
  if (m0 < 1)
    throw Uncertifiable(
        "integer cutoff too small relative to size cutoff / rank");
  long double qm0 = powl(q, static_cast<long double>(m0) * m0);
  long double int_tail =
      phalf * phalf * 2.0L * qm0 / (1.0L - powl(q, 2.0L * m0));
  long double err =
      (size_tail + int_tail) * (1.0L + 1e-10L) + box * kRelSlack;
  if (!(err < box))
    throw Uncertifiable("cutoffs too small: tail bound not below the value");
  return CertifiedValue{box, err};
}

CertifiedValue zn_chiral(int N, long double t, int m_part) {
  if (N < 2) throw std::domain_error("rank must be >= 2");
  if (!(t > 0.0L)) throw std::domain_error("coupling must be positive");
  long double lq = -t / 2.0L;
  long double q = expl(lq);
  int A = sector_A(N);
  long double s = sector_dp(A, m_part, 1.0L, 2.0L / N, lq);
  // Within the sector the exponent |alpha| + (2/N) K(alpha) is at least
  // |alpha| / 2, so the discarded sizes are dominated by a p(n)-remainder.
  long double tail = upper_C(sqrtl(q)) * powl(q, m_part / 4.0L);
  long double err = tail * (1.0L + 1e-10L) + s * kRelSlack;
  if (!(err < s))
    throw Uncertifiable("size cutoff too small: tail bound not below the value");
  return CertifiedValue{s, err};
}

CertifiedValue moment_theta(int order, long double q, int m) {
  if (order < 0) throw std::domain_error("moment order must be >= 0");
  if (order % 2 == 1) return CertifiedValue{0.0L, 0.0L};
  TruncatedSeries th = theta(m);
  CertifiedValue num =
      evaluate(d_operator(th, order / 2), q, TailModel::THETA_TAIL);
  CertifiedValue den = evaluate(th, q, TailModel::THETA_TAIL);
  return cv_div(num, den);
}

CertifiedValue moment_F_closed(int k, long double q, int m) {
  if (k < 0) throw std::domain_error("moment order must be >= 0");
  CertifiedValue phi = evaluate(euler_phi(m), q, TailModel::BOUNDED_COEFF);
  TruncatedSeries th = theta(m);
  CertifiedValue thv = evaluate(th, q, TailModel::THETA_TAIL);
  CertifiedValue pref = cv_div(cv_mul(phi, phi), thv);
  CertifiedValue acc{0.0L, 0.0L};
  long double f2k = fact_ld(2 * k);
  for (int k1 = 0; 2 * k1 <= 2 * k; ++k1) {
    for (int k2 = 0; 2 * k1 + 2 * k2 <= 2 * k; ++k2) {
      int rem = 2 * k - 2 * k1 - 2 * k2;
      for (int k3 = 0; k3 <= rem; ++k3) {
        int k4 = rem - k3;
        long double coef =
            f2k / (fact_ld(2 * k1) * fact_ld(2 * k2) * fact_ld(k3) *
                   fact_ld(k4));
        if (k4 % 2 == 1) coef = -coef;
        CertifiedValue f1 = evaluate(d_operator(hurwitz_gf(k1 + 1, m), k3), q,
                                     TailModel::HURWITZ_TAIL, k1);
        CertifiedValue f2 = evaluate(d_operator(hurwitz_gf(k2 + 1, m), k4), q,
                                     TailModel::HURWITZ_TAIL, k2);
        CertifiedValue dth =
            evaluate(d_operator(th, rem / 2), q, TailModel::THETA_TAIL);
        acc = cv_add(acc, cv_scale(coef, cv_mul(cv_mul(f1, f2), dth)));
      }
    }
  }
  return cv_mul(pref, acc);
}

namespace {

// ---- direct triple-sum route over content classes -------------------------

struct RawFMoments {
  static constexpr int kMaxPow = 7;
  std::array<long double, kMaxPow + 1> raw{};   // sum cnt1 cnt2 F^m w
  std::array<long double, kMaxPow + 1> absacc{};
  std::array<long double, kMaxPow + 1> err{};   // truncation + rounding bound
};

// Upper bound for sum_{S > M} (S+1) e^{c sqrt2 sqrt S} S^pow q^S  (M = -1
// gives the full sum from S = 0).
long double pair_size_tail(long double q, int pow, int M) {
  long double cc = kC * sqrtl(2.0L);
  if (M >= 0) {
    // (S+1) S^pow <= 2 S^{pow+1} for S >= 1.
    return 2.0L * tail_sqrtexp_poly(q, cc, pow + 1, M);
  }
  long double fin = (pow == 0) ? 1.0L : 0.0L;  // S = 0 term
  for (int S = 1; S <= 40; ++S)
    fin += (S + 1.0L) * expl(cc * sqrtl(static_cast<long double>(S))) *
           pow_int(static_cast<long double>(S), pow) *
           powl(q, static_cast<long double>(S));
  return fin + 2.0L * tail_sqrtexp_poly(q, cc, pow + 1, 40);
}

const RawFMoments& raw_f_moments(long double q, int M) {
  static std::mutex mu;
  static std::map<std::pair<long double, int>, RawFMoments> memo;
  std::lock_guard<std::mutex> lock(mu);
  auto it = memo.find({q, M});
  if (it != memo.end()) return it->second;

  RawFMoments r;
  int nmax =
      2 * static_cast<int>(std::ceil(std::sqrt(static_cast<double>(M))));
  auto hist = shared_content_histogram(M);
  struct Cls {
    long double s, K, wq;  // wq = cnt * q^s
  };
  std::vector<Cls> cls;
  for (int s = 0; s <= M; ++s) {
    long double qs = powl(q, static_cast<long double>(s));
    for (const auto& [K, cnt] : (*hist)[s])
      cls.push_back({static_cast<long double>(s), static_cast<long double>(K),
                     cnt * qs});
  }
  constexpr int P = RawFMoments::kMaxPow;
  for (int n = -nmax; n <= nmax; ++n) {
    long double nn = static_cast<long double>(n);
    long double qn2 = powl(q, nn * nn);
    for (const Cls& a : cls) {
      long double na = nn * a.s;
      long double wa = a.wq * qn2;
      for (const Cls& b : cls) {
        long double F = a.K + b.K + na - nn * b.s;
        long double w = wa * b.wq;
        long double p = w;
        for (int mth = 0; mth <= P; ++mth) {
          r.raw[mth] += p;
          r.absacc[mth] += fabsl(p);
          p *= F;
        }
      }
    }
  }
  // Truncation bounds.  Outside the box {s1 + s2 <= ... , |n| <= nmax} use
  // |F| <= (s1+s2)^2/2 + |n|(s1+s2) and (a+b)^m <= 2^{m-1}(a^m + b^m); the
  // number of (s1, s2) compositions of S is S+1 and p(s1)p(s2) <= e^{c sqrt 2
  // sqrt S}.  The complement of the summed region is contained in
  // {s1 > M} u {s2 > M} u {|n| > nmax}; {s1 > M} u {s2 > M} is covered twice
  // over by {S > M} counted with compositions.
  long double theta0 = theta_abs_power_sum(q, 0);
  long double tau0 = theta_tail_pow(q, 0, nmax + 1);
  for (int mth = 0; mth <= P; ++mth) {
    long double split = (mth == 0) ? 1.0L : pow_int(2.0L, mth - 1);
    long double inv2m = pow_int(0.5L, mth);
    long double thm = theta_abs_power_sum(q, mth);
    long double taum = theta_tail_pow(q, mth, nmax + 1);
    long double t_sizes, t_n;
    if (mth == 0) {
      t_sizes = pair_size_tail(q, 0, M) * theta0;
      t_n = pair_size_tail(q, 0, -1) * tau0;
    } else {
      t_sizes = split * (inv2m * pair_size_tail(q, 2 * mth, M) * theta0 +
                         pair_size_tail(q, mth, M) * thm);
      t_n = split * (inv2m * pair_size_tail(q, 2 * mth, -1) * tau0 +
                     pair_size_tail(q, mth, -1) * taum);
    }
    r.err[mth] =
        (t_sizes + t_n) * (1.0L + 1e-10L) + r.absacc[mth] * 5e-10L;
  }
  return memo.emplace(std::make_pair(q, M), r).first->second;
}

// Route (a): multinomial assembly from enumerated content/size brackets.
CertifiedValue bracket_route(int k, long double q, int m) {
  auto hist = shared_content_histogram(m);
  CertifiedValue phi = evaluate(euler_phi(m), q, TailModel::BOUNDED_COEFF);
  // powersum[s][j] = sum over partitions of s of K^j, exact.
  int jmax = 2 * k;
  std::vector<std::array<long double, 13>> powersum(m + 1);
  for (int s = 0; s <= m; ++s) {
    std::array<BigInt, 13> acc;
    acc.fill(BigInt(0));
    for (const auto& [K, cnt] : (*hist)[s]) {
      BigInt p = cnt;
      for (int j = 0; j <= jmax; ++j) {
        acc[j] += p;
        p *= K;
      }
    }
    for (int j = 0; j <= jmax; ++j)
      powersum[s][j] = acc[j].convert_to<long double>();
  }
  // A(j, l) = phi * sum_s q^s s^l powersum[s][j], with remainder bound
  // phi_hi * 2^{-j} * sum_{s>m} e^{c sqrt s} s^{2j+l} q^s.
  auto bracket = [&](int j, int l) {
    long double fin = 0.0L;
    for (int s = 0; s <= m; ++s)
      fin += powl(q, static_cast<long double>(s)) *
             pow_int(static_cast<long double>(s), l) * powersum[s][j];
    long double tail = pow_int(0.5L, j) * tail_sqrtexp_poly(q, kC, 2 * j + l, m);
    CertifiedValue fin_cv{fin, fabsl(fin) * kRelSlack + tail};
    return cv_mul(phi, fin_cv);
  };
  CertifiedValue acc{0.0L, 0.0L};
  long double f2k = fact_ld(2 * k);
  for (int k1 = 0; 2 * k1 <= 2 * k; ++k1) {
    for (int k2 = 0; 2 * k1 + 2 * k2 <= 2 * k; ++k2) {
      int rem = 2 * k - 2 * k1 - 2 * k2;
      for (int k3 = 0; k3 <= rem; ++k3) {
        int k4 = rem - k3;
        long double coef =
            f2k / (fact_ld(2 * k1) * fact_ld(2 * k2) * fact_ld(k3) *
                   fact_ld(k4));
        if (k4 % 2 == 1) coef = -coef;
        CertifiedValue term = cv_mul(
            cv_mul(bracket(2 * k1, k3), bracket(2 * k2, k4)),
            moment_theta(k3 + k4, q, m));
        acc = cv_add(acc, cv_scale(coef, term));
      }
    }
  }
  return acc;
}

CertifiedValue triple_route_raw(int power, long double q, int m) {
  int mb = std::min(m, 28);  // triple-sum cost cap; bounds stay certified
  const RawFMoments& r = raw_f_moments(q, mb);
  return CertifiedValue{r.raw[power], r.err[power]};
}

}  // namespace

CertifiedValue moment_F_bruteforce(int k, long double q, int m) {
  if (k < 0) throw std::domain_error("moment order must be >= 0");
  if (k > 3)
    throw std::domain_error("k > 3 not supported by the cross-checked path");
  CertifiedValue a = bracket_route(k, q, m);
  // Route (b): normalise the raw triple sum by phi^2 / theta.
  CertifiedValue phi = evaluate(euler_phi(m), q, TailModel::BOUNDED_COEFF);
  CertifiedValue thv = evaluate(theta(m), q, TailModel::THETA_TAIL);
  CertifiedValue b =
      cv_mul(cv_div(cv_mul(phi, phi), thv), triple_route_raw(2 * k, q, m));
  if (!cv_overlap(a, b))
    throw RouteDisagreement(
        "bracket assembly and direct triple sum produced disjoint intervals");
  return a;
}

CertifiedValue moment_F_odd_bruteforce(int j, long double q, int m) {
  if (j < 0) throw std::domain_error("moment order must be >= 0");
  if (2 * j + 1 > RawFMoments::kMaxPow)
    throw std::domain_error("odd moment order too large for the triple sum");
  CertifiedValue phi = evaluate(euler_phi(m), q, TailModel::BOUNDED_COEFF);
  CertifiedValue thv = evaluate(theta(m), q, TailModel::THETA_TAIL);
  return cv_mul(cv_div(cv_mul(phi, phi), thv),
                triple_route_raw(2 * j + 1, q, m));
}

CertifiedValue expansion_coeff(int k, long double t, int m) {
  if (k < 0) throw std::domain_error("coefficient index must be >= 0");
  long double q = expl(-t / 2.0L);
  CertifiedValue phi = evaluate(euler_phi(m), q, TailModel::BOUNDED_COEFF);
  TruncatedSeries th = theta(m);
  CertifiedValue thv = evaluate(th, q, TailModel::THETA_TAIL);
  // Moment route: t^{2k}/(2k)! * theta/phi^2 * E[F^{2k}].
  CertifiedValue route_a =
      cv_scale(pow_int(t, 2 * k) / fact_ld(2 * k),
               cv_mul(cv_div(thv, cv_mul(phi, phi)), moment_F_closed(k, q, m)));
  // Direct route: double sum over cover genera and derivative orders.
  CertifiedValue route_c{0.0L, 0.0L};
  for (int g1 = 1; 2 * g1 - 2 <= 2 * k; ++g1) {
    for (int g2 = 1; (2 * g1 - 2) + (2 * g2 - 2) <= 2 * k; ++g2) {
      int rem = 2 * k - (2 * g1 - 2) - (2 * g2 - 2);
      for (int k1 = 0; k1 <= rem; ++k1) {
        int k2 = rem - k1;
        if ((k1 + k2) % 2 == 1) continue;
        long double coef =
            pow_int(t, 2 * k) /
            (fact_ld(2 * g1 - 2) * fact_ld(2 * g2 - 2) * fact_ld(k1) *
             fact_ld(k2));
        if (k2 % 2 == 1) coef = -coef;
        CertifiedValue f1 = evaluate(d_operator(hurwitz_gf(g1, m), k1), q,
                                     TailModel::HURWITZ_TAIL, g1 - 1);
        CertifiedValue f2 = evaluate(d_operator(hurwitz_gf(g2, m), k2), q,
                                     TailModel::HURWITZ_TAIL, g2 - 1);
        CertifiedValue dth = evaluate(d_operator(th, (k1 + k2) / 2), q,
                                      TailModel::THETA_TAIL);
        route_c =
            cv_add(route_c, cv_scale(coef, cv_mul(cv_mul(f1, f2), dth)));
      }
    }
  }
  if (!cv_overlap(route_a, route_c))
    throw RouteDisagreement(
        "moment route and direct genus sum produced disjoint intervals");
  return cv_intersect(route_a, route_c);
}

CertifiedValue expansion_coeff_chiral(int k, long double t, int m) {
  if (k < 0) throw std::domain_error("coefficient index must be >= 0");
  long double q = expl(-t / 2.0L);
  CertifiedValue f =
      evaluate(hurwitz_gf(k + 1, m), q, TailModel::HURWITZ_TAIL, k);
  return cv_scale(pow_int(t, 2 * k) / fact_ld(2 * k), f);
}

ExpansionReport verify_expansion(const std::vector<int>& n_grid, long double t,
                                 int p, int m, bool chiral) {
  if (n_grid.empty()) throw std::domain_error("empty rank grid");
  if (p < 0) throw std::domain_error("expansion order must be >= 0");
  ExpansionReport rep;
  rep.chiral = chiral;
  rep.t = t;
  rep.q = expl(-t / 2.0L);
  rep.p = p;
  rep.m = m;
  rep.n_grid = n_grid;
  // The coefficient series are capped at degree 64 by the content-histogram
  // budget; their certified tails absorb the difference, so a larger rank-sum
  // cutoff m never needs a longer coefficient series.
  int ms = std::min(m, 64);
  for (int k = 0; k <= p; ++k)
    rep.coeffs.push_back(chiral ? expansion_coeff_chiral(k, t, ms)
                                : expansion_coeff(k, t, ms));
  for (int N : n_grid) {
    CertifiedValue z = chiral
                           ? zn_chiral(N, t, m)
                           : zn_bruteforce(N, rep.q, m, default_m_int(m));
    CertifiedValue pred{0.0L, 0.0L};
    for (int k = 0; k <= p; ++k)
      pred = cv_add(pred, cv_scale(powl(static_cast<long double>(N), -2.0L * k),
                                   rep.coeffs[k]));
    rep.zvals.push_back(z);
    rep.residuals.push_back(cv_sub(z, pred));
  }
  // Least-squares slope of log |residual| against log N.
  size_t nn = n_grid.size();
  long double sx = 0, sy = 0, sxx = 0, sxy = 0;
  bool pos = true, neg = true;
  bool conclusive = true;
  for (size_t i = 0; i < nn; ++i) {
    long double x = logl(static_cast<long double>(n_grid[i]));
    long double r = rep.residuals[i].val;
    if (r > 0) neg = false;
    if (r < 0) pos = false;
    if (!(fabsl(r) > rep.residuals[i].err)) conclusive = false;
    long double y = logl(fabsl(r) + 1e-300L);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  long double denom = nn * sxx - sx * sx;
  rep.slope = (denom != 0.0L) ? (nn * sxy - sx * sy) / denom : 0.0L;
  rep.conclusive = conclusive;
  rep.signs_consistent = pos || neg;
  return rep;
}

std::string expansion_report_json(const ExpansionReport& r) {
  nlohmann::json j;
  j["chiral"] = r.chiral;
  j["t"] = static_cast<double>(r.t);
  j["q"] = static_cast<double>(r.q);
  j["p"] = r.p;
  j["truncation"] = r.m;
  j["N_grid"] = r.n_grid;
  auto cv_json = [](const CertifiedValue& v) {
    return nlohmann::json{{"value", static_cast<double>(v.val)},
                          {"error_bound", static_cast<double>(v.err)}};
  };
  for (const auto& c : r.coeffs) j["coefficients"].push_back(cv_json(c));
  for (size_t i = 0; i < r.n_grid.size(); ++i) {
    j["rows"].push_back({{"N", r.n_grid[i]},
                         {"z", cv_json(r.zvals[i])},
                         {"residual", cv_json(r.residuals[i])}});
  }
  j["slope"] = static_cast<double>(r.slope);
  j["conclusive"] = r.conclusive;
  j["signs_consistent"] = r.signs_consistent;
  return j.dump(2);
}

std::string expansion_report_csv(const ExpansionReport& r) {
  std::ostringstream out;
  out.precision(17);
  out << "record,a,b,c,d\n";
  out << "meta," << (r.chiral ? "chiral" : "full") << ","
      << static_cast<double>(r.t) << "," << r.p << "," << r.m << "\n";
  for (size_t k = 0; k < r.coeffs.size(); ++k)
    out << "coeff," << 2 * k << "," << static_cast<double>(r.coeffs[k].val)
        << "," << static_cast<double>(r.coeffs[k].err) << ",\n";
  for (size_t i = 0; i < r.n_grid.size(); ++i)
    out << "row," << r.n_grid[i] << ","
        << static_cast<double>(r.zvals[i].val) << ","
        << static_cast<double>(r.residuals[i].val) << ","
        << static_cast<double>(r.residuals[i].err) << "\n";
  out << "slope," << static_cast<double>(r.slope) << ",,,\n";
  out << "conclusive," << (r.conclusive ? 1 : 0) << ",,,\n";
  out << "signs_consistent," << (r.signs_consistent ? 1 : 0) << ",,,\n";
  return out.str();
}

}  // namespace gnq
