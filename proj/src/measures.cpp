#include "gnq/measures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>
#include <json.hpp>

#include "gnq/zfunc.hpp"

namespace gnq {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Lower bound for pi*sqrt(2/3); kC in qseries.hpp is the matching upper bound.
constexpr long double kCLo = 2.56509966032372L;

// N(n, k) = #partitions of n with parts <= k, for 0 <= n, k <= nmax, exact in
// 64 bits (throws if the counts overflow).
std::vector<std::vector<long long>> bounded_count_table(int nmax) {
  std::vector<std::vector<long long>> c(
      nmax + 1, std::vector<long long>(nmax + 1, 0));
  for (int k = 0; k <= nmax; ++k) c[0][k] = 1;
  for (int n = 1; n <= nmax; ++n) {
    for (int k = 1; k <= nmax; ++k) {
      long long v = c[n][k - 1];
      if (n >= k) {
        long long add = c[n - k][k];
        if (v > std::numeric_limits<long long>::max() - add)
          throw std::domain_error("partition counts overflow 64 bits");
        v += add;
      }
      c[n][k] = v;
    }
  }
  return c;
}

}  // namespace

std::uint64_t Rng::uniform_below(std::uint64_t n) {
  if (n == 0) throw std::domain_error("uniform_below(0)");
  std::uint64_t scale = std::numeric_limits<std::uint64_t>::max() / n;
  std::uint64_t limit = scale * n;
  for (;;) {
    std::uint64_t r = eng_();
    if (r < limit) return r / scale;
  }
}

long double Rng::u01() {
  return static_cast<long double>(eng_() >> 11) * 0x1p-53L;
}

Rng Rng::split(std::uint64_t stream) const {
  return Rng(splitmix64(seed_ ^ (0x9E3779B97F4A7C15ULL * (stream + 1))));
}

// --- size-biased uniform sampler -------------------------------------------

QUniformSampler::QUniformSampler(long double q, int size_cap) : cap_(size_cap) {
  if (!(q > 0.0L && q < 1.0L)) throw std::domain_error("q must be in (0,1)");
  if (size_cap < 1) throw std::domain_error("size cap must be >= 1");
  cnt_ = bounded_count_table(size_cap);
  CertifiedValue phi = evaluate(euler_phi(60), q, TailModel::BOUNDED_COEFF);
  mass_beyond_cap_ =
      phi.hi() * upper_C(q) * powl(q, size_cap / 2.0L) * (1.0L + 1e-10L);
  if (!(mass_beyond_cap_ < 1e-12L))
    throw Uncertifiable(
        "size cap too small: resampled mass cannot be certified below 1e-12");
  prob_.resize(size_cap + 1);
  cdf_.resize(size_cap + 1);
  long double cum = 0.0L;
  for (int n = 0; n <= size_cap; ++n) {
    long double p = partition_count(n).convert_to<long double>();
    prob_[n] = phi.val * p * powl(q, static_cast<long double>(n));
    cum += prob_[n];
    cdf_[n] = cum;
  }
}

Partition QUniformSampler::sample(Rng& rng) const {
  long double u;
  do {
    u = rng.u01();
  } while (u >= cdf_.back());
  int n = static_cast<int>(
      std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
  Partition out;
  long long rem = n;
  long long cap = n;
  while (rem > 0) {
    if (cap > rem) cap = rem;
    // N(rem, cap) = N(rem - cap, cap)  [use a part of size cap]
    //             + N(rem, cap - 1)    [all parts <= cap - 1]
    std::uint64_t total = static_cast<std::uint64_t>(cnt_[rem][cap]);
    std::uint64_t r = rng.uniform_below(total);
    if (r < static_cast<std::uint64_t>(cnt_[rem - cap][cap])) {
      out.push_back(static_cast<int>(cap));
      rem -= cap;
    } else {
      cap -= 1;
    }
  }
  return out;
}

long long sample_integer_marginal(long double q, Rng& rng) {
  if (!(q > 0.0L && q < 1.0L)) throw std::domain_error("q must be in (0,1)");
  // Table n = 0, 1, -1, 2, -2, ... until the weights drop below 1e-25;
  // normalising by the finite total is equivalent to re-drawing the
  // discarded mass.
  std::vector<long long> vals{0};
  std::vector<long double> cum{1.0L};
  for (long long m = 1; m <= 200; ++m) {
    long double w = powl(q, static_cast<long double>(m) * m);
    if (w < 1e-25L) break;
    vals.push_back(m);
    cum.push_back(cum.back() + w);
    vals.push_back(-m);
    cum.push_back(cum.back() + w);
  }
  long double x = rng.u01() * cum.back();
  std::size_t i =
      std::upper_bound(cum.begin(), cum.end(), x) - cum.begin();
  if (i >= vals.size()) i = vals.size() - 1;
  return vals[i];
}

// --- rank-N Gaussian-weight sampler ----------------------------------------

GNSampler::GNSampler(int N, long double q, int size_cap, int int_cap,
                     long double tol)
    : N_(N), cap_(size_cap), int_cap_(int_cap), q_(q) {
  if (N < 2) throw std::domain_error("rank must be >= 2");
  if (!(q > 0.0L && q < 1.0L)) throw std::domain_error("q must be in (0,1)");
  int A = sector_A(N);
  int B = sector_B(N);
  for (int s = 0; s <= size_cap; ++s) {
    for (const Partition& a : enumerate_partitions(s, A)) {
      amap_[a] = alphas_.size();
      alphas_.push_back(a);
    }
    for (const Partition& b : enumerate_partitions(s, B)) {
      bmap_[b] = betas_.size();
      betas_.push_back(b);
    }
  }
  long double lq = logl(q);
  std::size_t nb = betas_.size();
  int width = 2 * int_cap + 1;
  cdf_.resize(alphas_.size() * nb * width);
  // Per-component data reused in the weight loop.
  struct Info {
    long double s, K;
  };
  std::vector<Info> ia(alphas_.size()), ib(betas_.size());
  for (std::size_t i = 0; i < alphas_.size(); ++i)
    ia[i] = {static_cast<long double>(part_size(alphas_[i])),
             static_cast<long double>(total_content(alphas_[i]))};
  for (std::size_t i = 0; i < betas_.size(); ++i)
    ib[i] = {static_cast<long double>(part_size(betas_[i])),
             static_cast<long double>(total_content(betas_[i]))};
  long double cum = 0.0L;
  std::size_t idx = 0;
  for (std::size_t a = 0; a < alphas_.size(); ++a) {
    for (std::size_t b = 0; b < nb; ++b) {
      long double base = ia[a].s + ib[b].s;
      long double kk = ia[a].K + ib[b].K;
      long double ds = ia[a].s - ib[b].s;
      for (int n = -int_cap; n <= int_cap; ++n) {
        long double nn = static_cast<long double>(n);
        long double expo =
            base + nn * nn + 2.0L * (kk + nn * ds) / N;
        cum += expl(lq * expo);
        cdf_[idx++] = static_cast<double>(cum);
      }
    }
  }
  total_ = cum;
  // Mass of the true law outside the truncated support, over the conditioned
  // total: size overflow, then integer overflow after absorbing the shift.
  long double x = sqrtl(q);
  auto cnt = bounded_count_table(size_cap);
  auto g_restricted = [&](int L) {
    long double fin = 0.0L;
    for (int s = 0; s <= size_cap; ++s) {
      int k = std::min(s, L);
      fin += cnt[s][k] * powl(x, static_cast<long double>(s));
    }
    long double tail =
        (L >= 1 ? powl(2.0L, static_cast<long double>(L - 1)) : 0.0L) *
        tail_sqrtexp_poly(x, 0.0L, std::max(L - 1, 0), size_cap);
    return std::pair<long double, long double>(fin + tail, tail);
  };
  auto [ga, tail_a] = g_restricted(A);
  auto [gb, tail_b] = g_restricted(B);
  int m0 = int_cap + 1 - (size_cap + N - 1) / N;
  if (m0 < 1)
    throw Uncertifiable("integer cap too small relative to the size cap");
  long double int_tail = ga * gb * 2.0L *
                         powl(q, static_cast<long double>(m0) * m0) /
                         (1.0L - powl(q, 2.0L * m0));
  long double eps_trunc =
      upper_C_theta(q) * (tail_a * gb + ga * tail_b) + int_tail;
  eps_tv_ = eps_trunc / total_ * (1.0L + 1e-10L) + 1e-9L;
  if (!(eps_tv_ < tol))
    throw Uncertifiable("truncated support misses too much mass for this tol");
}

long double GNSampler::triple_weight(std::size_t a, std::size_t b,
                                     int n) const {
  long double sa = static_cast<long double>(part_size(alphas_[a]));
  long double sb = static_cast<long double>(part_size(betas_[b]));
  long double kk = static_cast<long double>(total_content(alphas_[a]) +
                                            total_content(betas_[b]));
  long double nn = static_cast<long double>(n);
  long double expo =
      sa + sb + nn * nn + 2.0L * (kk + nn * (sa - sb)) / N_;
  return expl(logl(q_) * expo);
}

WeightTriple GNSampler::sample_triple(Rng& rng) const {
  double x = static_cast<double>(rng.u01() * total_);
  std::size_t idx =
      std::upper_bound(cdf_.begin(), cdf_.end(), x) - cdf_.begin();
  if (idx >= cdf_.size()) idx = cdf_.size() - 1;
  int width = 2 * int_cap_ + 1;
  int n = static_cast<int>(idx % width) - int_cap_;
  std::size_t rest = idx / width;
  std::size_t b = rest % betas_.size();
  std::size_t a = rest / betas_.size();
  return WeightTriple{alphas_[a], betas_[b], n};
}

HighestWeight GNSampler::sample(Rng& rng) const {
  return triple_to_weight(sample_triple(rng), N_);
}

long double GNSampler::prob(std::size_t i) const {
  int width = 2 * int_cap_ + 1;
  int n = static_cast<int>(i % width) - int_cap_;
  std::size_t rest = i / width;
  std::size_t b = rest % betas_.size();
  std::size_t a = rest / betas_.size();
  return triple_weight(a, b, n) / total_;
}

WeightTriple GNSampler::triple_at(std::size_t i) const {
  int width = 2 * int_cap_ + 1;
  int n = static_cast<int>(i % width) - int_cap_;
  std::size_t rest = i / width;
  std::size_t b = rest % betas_.size();
  std::size_t a = rest / betas_.size();
  return WeightTriple{alphas_.at(a), betas_.at(b), n};
}

std::size_t GNSampler::index_of(const WeightTriple& t) const {
  if (t.n < -int_cap_ || t.n > int_cap_) return npos;
  auto a = amap_.find(t.alpha);
  auto b = bmap_.find(t.beta);
  if (a == amap_.end() || b == bmap_.end()) return npos;
  int width = 2 * int_cap_ + 1;
  return (a->second * betas_.size() + b->second) * width + (t.n + int_cap_);
}

// --- exact-arithmetic deviation bound check --------------------------------

namespace {

// Exact dyadic rational equal to the long double x (x finite, >= 0).
BigRat rat_from_ld(long double x) {
  if (x == 0.0L) return BigRat(0);
  int e = 0;
  long double m = frexpl(x, &e);  // x = m * 2^e, m in [0.5, 1)
  BigInt num = 0;
  for (int i = 0; i < 2; ++i) {
    m = ldexpl(m, 32);
    long double ip = floorl(m);
    num = (num << 32) + static_cast<long long>(ip);
    m -= ip;
  }
  int shift = e - 64;
  BigRat r(num);
  if (shift >= 0)
    r *= BigRat(BigInt(1) << shift);
  else
    r /= BigRat(BigInt(1) << (-shift));
  return r;
}

const BigRat kSlackLo = BigRat(BigInt("999999999"), BigInt("1000000000"));
const BigRat kSlackHi = BigRat(BigInt("1000000001"), BigInt("1000000000"));

BigRat rat_lo(long double x) { return rat_from_ld(x) * kSlackLo; }
BigRat rat_hi(long double x) { return rat_from_ld(x) * kSlackHi; }

BigRat rat_pow(const BigRat& q, int k) {
  BigRat r(1);
  for (int i = 0; i < k; ++i) r *= q;
  return r;
}

// Rational s with s^2 <= y (y > 0), close to sqrt(y).
BigRat rat_sqrt_lo(const BigRat& y) {
  BigRat s = rat_lo(sqrtl(y.convert_to<long double>()));
  while (s * s > y) s *= kSlackLo;
  return s;
}

}  // namespace

DeviationReport deviation_check(const BigRat& q,
                                const std::vector<int>& n_grid) {
  if (!(q > 0 && q < 1)) throw std::domain_error("q must be in (0,1)");
  DeviationReport rep;
  rep.q = q;
  const int depth = 64;  // partial-product / partial-sum depth
  int max_n = 2;
  for (int N : n_grid) max_n = std::max(max_n, N);
  // phi(q) bracket from the depth-limited product.
  BigRat prod(1);
  std::vector<BigRat> qpow(
      std::max(max_n, (max_n - 1) / 2 + depth + 1) + 2);
  qpow[0] = 1;
  for (std::size_t i = 1; i < qpow.size(); ++i) qpow[i] = qpow[i - 1] * q;
  for (int m = 1; m <= depth; ++m) prod *= (1 - qpow[m]);
  BigRat tail_t = qpow[depth + 1] / (1 - q);
  if (tail_t >= 1) throw Uncertifiable("q too close to 1 for this depth");
  BigRat phi_lo = prod * (1 - tail_t);
  BigRat phi_hi = prod;
  // Envelope constants (one-sided rational enclosures of the
  // transcendental factors).
  long double qld = q.convert_to<long double>();
  BigRat r_factor_lo(0);  // sum_m (1 + e^{c sqrt m}) q^m, truncated below
  for (int m = 0; m <= depth; ++m)
    r_factor_lo +=
        (1 + rat_lo(expl(kCLo * sqrtl(static_cast<long double>(m))))) *
        qpow[m];
  BigRat s_q_lo(0);  // sum_{n>=1} e^{c sqrt n} q^n, truncated below
  for (int n = 1; n <= depth; ++n)
    s_q_lo += rat_lo(expl(kCLo * sqrtl(static_cast<long double>(n)))) *
              qpow[n];
  BigRat t_q_lo = rat_lo(expl(kCLo * kCLo / (2.0L * (-logl(qld)))));
  const BigRat c544(BigInt(136), BigInt(25));

  bool all_ok = true;
  for (int N : n_grid) {
    if (N < 2) throw std::domain_error("rank must be >= 2");
    BigRat qn2 = (N % 2 == 0) ? rat_pow(q, N / 2) : rat_sqrt_lo(rat_pow(q, N));
    // Row-count overflow: P(rows > floor((N-1)/2)) = 1 - prod_{m>L}(1-q^m).
    {
      DeviationRow row;
      row.N = N;
      int L = (N - 1) / 2;
      BigRat pl(1);
      for (int m = L + 1; m <= L + depth; ++m) pl *= (1 - qpow[m]);
      BigRat tl = qpow[L + depth + 1] / (1 - q);
      row.lhs_lo = 1 - pl;
      row.lhs_hi = 1 - pl * (1 - tl);
      row.rhs_lo = c544 * phi_lo * r_factor_lo * qn2;
      row.ok = row.lhs_hi <= row.rhs_lo;
      all_ok = all_ok && row.ok;
      rep.length_rows.push_back(row);
    }
    // Size overflow: P(|alpha| > N) = 1 - phi(q) sum_{n<=N} p(n) q^n.
    {
      DeviationRow row;
      row.N = N;
      BigRat s_part(0);
      for (int n = 0; n <= N; ++n)
        s_part += BigRat(partition_count(n)) * qpow[n];
      row.lhs_lo = 1 - phi_hi * s_part;
      row.lhs_hi = 1 - phi_lo * s_part;
      row.rhs_lo = phi_lo * s_q_lo * t_q_lo * qn2;
      row.ok = row.lhs_hi <= row.rhs_lo;
      all_ok = all_ok && row.ok;
      rep.size_rows.push_back(row);
    }
  }
  rep.all_ok = all_ok;
  return rep;
}

std::string deviation_report_json(const DeviationReport& r) {
  nlohmann::json j;
  j["q"] = r.q.str();
  // The comparison itself is decided in exact arithmetic; the report carries
  // decimal approximations, which is all a reader can use.
  auto row_json = [](const DeviationRow& row) {
    return nlohmann::json{{"N", row.N},
                          {"lhs_lo", row.lhs_lo.convert_to<double>()},
                          {"lhs_hi", row.lhs_hi.convert_to<double>()},
                          {"rhs_lo", row.rhs_lo.convert_to<double>()},
                          {"ok", row.ok}};
  };
  for (const auto& row : r.length_rows) j["length_rows"].push_back(row_json(row));
  for (const auto& row : r.size_rows) j["size_rows"].push_back(row_json(row));
  j["all_ok"] = r.all_ok;
  return j.dump(2);
}

// --- total-variation decoupling --------------------------------------------

TvResult tv_decoupling(int N, long double q, int box) {
  if (N < 2) throw std::domain_error("rank must be >= 2");
  if (!(q > 0.0L && q < 1.0L)) throw std::domain_error("q must be in (0,1)");
  if (box < 1) throw std::domain_error("window must be >= 1");
  TvResult res;
  res.N = N;
  res.q = q;
  res.box = box;
  int A = sector_A(N);
  int B = sector_B(N);
  ContentHistogram ha = content_histogram(box, A);
  ContentHistogram hb = content_histogram(box, B);
  struct Cls {
    int s;
    long long K;
    long double wq;  // count * q^s
  };
  std::vector<Cls> ca, cb;
  for (int s = 0; s <= box; ++s) {
    long double qs = powl(q, static_cast<long double>(s));
    for (const auto& [K, cnt] : ha[s]) ca.push_back({s, K, cnt * qs});
    for (const auto& [K, cnt] : hb[s]) cb.push_back({s, K, cnt * qs});
  }
  CertifiedValue z = zn_bruteforce(N, q, 60, default_m_int(60));
  long double box_sum = zn_box_sum(N, q, box, box);
  CertifiedValue phi = evaluate(euler_phi(60), q, TailModel::BOUNDED_COEFF);
  CertifiedValue th = evaluate(theta(60), q, TailModel::THETA_TAIL);
  CertifiedValue w2 = cv_div(cv_mul(phi, phi), th);
  // q^{2F/N} lookup over the attainable integer range of
  // F = K(alpha) + K(beta) + n (|alpha| - |beta|).
  long long fmax = static_cast<long long>(box) * (box - 1) +
                   static_cast<long long>(box) * box;
  std::vector<long double> qf(2 * fmax + 1);
  for (long long f = -fmax; f <= fmax; ++f)
    qf[f + fmax] = powl(q, 2.0L * f / static_cast<long double>(N));
  long double inv_z = 1.0L / z.val;
  long double main_mid = 0.0L;
  long double sum_base = 0.0L;
  std::vector<long long> gb(cb.size());
  std::vector<long double> wb(cb.size());
  for (int n = -box; n <= box; ++n) {
    long double nn = static_cast<long double>(n);
    long double qn2 = powl(q, nn * nn);
    for (std::size_t jb = 0; jb < cb.size(); ++jb) {
      gb[jb] = cb[jb].K - static_cast<long long>(n) * cb[jb].s;
      wb[jb] = cb[jb].wq;
    }
    for (const Cls& a : ca) {
      long long fa = a.K + static_cast<long long>(n) * a.s;
      long double wa = a.wq * qn2;
      for (std::size_t jb = 0; jb < cb.size(); ++jb) {
        long double base = wa * wb[jb];
        long double p1 = qf[fa + gb[jb] + fmax] * inv_z;
        main_mid += base * fabsl(p1 - w2.val);
        sum_base += base;
      }
    }
  }
  main_mid *= 0.5L;
  // Interval accounting for the main sum: the exact 1/Z and the exact
  // phi^2/theta constant each enter linearly.
  long double d_inv_z = 1.0L / z.lo() - 1.0L / z.hi();
  long double lip = 0.5L * (box_sum * d_inv_z + sum_base * w2.err);
  long double n_terms = static_cast<long double>(ca.size()) * cb.size() *
                        (2.0L * box + 1.0L);
  long double rounding = main_mid * n_terms * 1e-19L + 1e-30L;
  res.main_lo = main_mid - lip - rounding;
  res.main_hi = main_mid + lip + rounding;
  // Product-law mass outside the sector: 1 - P(rows(alpha) <= A) P(rows(beta) <= B).
  auto rows_le = [&](int L) {
    long double p = 1.0L;
    for (int m = L + 1; m <= L + 400; ++m)
      p *= (1.0L - powl(q, static_cast<long double>(m)));
    long double tail = powl(q, static_cast<long double>(L) + 401.0L) /
                       (1.0L - q);
    return std::pair<long double, long double>(p * (1.0L - tail), p);
  };
  auto [pa_lo, pa_hi] = rows_le(A);
  auto [pb_lo, pb_hi] = rows_le(B);
  res.outer_p2_lo = std::max(0.0L, 1.0L - pa_hi * pb_hi - 1e-15L);
  res.outer_p2_hi = 1.0L - pa_lo * pb_lo + 1e-15L;
  // Rank-N mass outside the window (within the sector).
  long double p1_in = box_sum * (1.0L - kRelSlack) / z.hi();
  res.outer_p1_hi = std::max(0.0L, 1.0L - p1_in);
  // Product-law mass inside the sector but outside the window.
  long double p2_box_out =
      2.0L * phi.hi() * upper_C(q) * powl(q, box / 2.0L) +
      theta_tail_pow(q, 0, box + 1) / th.lo();
  long double tv_lo = res.main_lo + 0.5L * res.outer_p2_lo;
  long double tv_hi = res.main_hi + 0.5L * res.outer_p2_hi +
                      0.5L * (res.outer_p1_hi + p2_box_out);
  res.tv = CertifiedValue{(tv_lo + tv_hi) / 2.0L, (tv_hi - tv_lo) / 2.0L};
  return res;
}

std::string tv_result_json(const TvResult& r) {
  nlohmann::json j;
  j["N"] = r.N;
  j["q"] = static_cast<double>(r.q);
  j["window"] = r.box;
  j["tv"] = {{"value", static_cast<double>(r.tv.val)},
             {"error_bound", static_cast<double>(r.tv.err)}};
  j["main_lo"] = static_cast<double>(r.main_lo);
  j["main_hi"] = static_cast<double>(r.main_hi);
  j["outer_p1_hi"] = static_cast<double>(r.outer_p1_hi);
  j["outer_p2_lo"] = static_cast<double>(r.outer_p2_lo);
  j["outer_p2_hi"] = static_cast<double>(r.outer_p2_hi);
  return j.dump(2);
}

long double chi_square_pvalue(long double stat, int dof) {
  if (dof < 1) throw std::domain_error("dof must be >= 1");
  if (!(stat >= 0.0L)) throw std::domain_error("statistic must be >= 0");
  return boost::math::gamma_q(dof / 2.0, static_cast<double>(stat) / 2.0);
}

}  // namespace gnq
