#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "gnq/partition.hpp"
#include "gnq/qseries.hpp"
#include "gnq/weights.hpp"

namespace gnq {

// Deterministic 64-bit generator with unbiased bounded draws and a documented
// sub-stream scheme: split(i) derives an independent generator seeded with
// splitmix64(seed ^ golden * (i + 1)), so staged consumers can be reproduced
// from (seed, stream) alone.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), eng_(seed) {}
  // Unbiased draw in [0, n) by scaled rejection.
  std::uint64_t uniform_below(std::uint64_t n);
  // 53-bit uniform in [0, 1).
  long double u01();
  Rng split(std::uint64_t stream) const;
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 eng_;
};

// Sampler for the size-biased uniform measure on all partitions with weights
// phi(q) q^{|alpha|}: a two-stage scheme drawing the size by inverse CDF on a
// certified table, then a partition of that size exactly uniformly by a
// counting walk on the table N(n, k) = #partitions of n with parts <= k.
// Construction throws Uncertifiable if the resampled mass beyond the size cap
// cannot be certified below 1e-12, and domain_error if the exact counts
// overflow 64 bits.
class QUniformSampler {
 public:
  QUniformSampler(long double q, int size_cap);
  Partition sample(Rng& rng) const;
  long double mass_beyond_cap() const { return mass_beyond_cap_; }
  int size_cap() const { return cap_; }
  // P(|alpha| = n) table entry used by the inverse CDF (midpoint values).
  long double size_prob(int n) const { return prob_.at(n); }

 private:
  int cap_;
  long double mass_beyond_cap_;
  std::vector<long double> prob_;  // phi(q) p(n) q^n
  std::vector<long double> cdf_;
  std::vector<std::vector<long long>> cnt_;  // N(n, k), k,n <= cap
};

// Integer marginal with weights q^{n^2} / theta(q), sampled by inverse CDF on
// a table covering all n with non-negligible mass; the discarded mass is
// re-drawn.
long long sample_integer_marginal(long double q, Rng& rng);

// Sampler for the rank-N Gaussian-weight measure on decomposed triples
// (alpha, beta, n): enumerates the whole truncated support (sector-bounded
// lengths, sizes <= size_cap, |n| <= int_cap), builds one CDF over it, and
// draws by binary search.  The constructor certifies that conditioning on the
// truncated support changes the law by at most `tol` in total variation
// (throws Uncertifiable otherwise).
class GNSampler {
 public:
  GNSampler(int N, long double q, int size_cap, int int_cap, long double tol);
  HighestWeight sample(Rng& rng) const;
  WeightTriple sample_triple(Rng& rng) const;
  std::size_t support_size() const { return cdf_.size(); }
  long double eps_tv() const { return eps_tv_; }
  // Conditional probability of the i-th support triple, and its decoding.
  long double prob(std::size_t i) const;
  WeightTriple triple_at(std::size_t i) const;
  // Index of a triple in the enumeration, or npos if outside the support.
  std::size_t index_of(const WeightTriple& t) const;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  int N_, cap_, int_cap_;
  long double q_, total_, eps_tv_;
  std::vector<Partition> alphas_, betas_;
  std::map<Partition, std::size_t> amap_, bmap_;
  std::vector<double> cdf_;
  long double triple_weight(std::size_t ia, std::size_t ib, int n) const;
};

// --- exact-arithmetic deviation bound check --------------------------------

struct DeviationRow {
  int N = 0;
  // Certified rational enclosure of the exact probability and a rational
  // lower bound for the stated envelope; ok means lhs_hi <= rhs_lo.
  BigRat lhs_lo, lhs_hi, rhs_lo;
  bool ok = false;
};

struct DeviationReport {
  BigRat q;
  std::vector<DeviationRow> length_rows;  // P(lambda_1 ... row count > floor((N-1)/2))
  std::vector<DeviationRow> size_rows;    // P(|alpha| > N)
  bool all_ok = false;
};

// Verifies, in exact rational arithmetic, that under the size-biased uniform
// measure both deviation probabilities stay below their proved envelopes:
//   P(length > floor((N-1)/2)) <= 5.44 phi(q) q^{N/2} sum_m (1+e^{c sqrt m}) q^m
//   P(size > N)               <= phi(q) S_q T_q q^{N/2}
// Transcendental factors enter only through one-sided rational enclosures.
DeviationReport deviation_check(const BigRat& q, const std::vector<int>& n_grid);

std::string deviation_report_json(const DeviationReport& r);

// --- total-variation decoupling --------------------------------------------

struct TvResult {
  int N = 0;
  long double q = 0.0L;
  int box = 0;                  // size/integer window of the main sum
  CertifiedValue tv;            // certified enclosure of the distance
  long double main_lo = 0.0L;   // inner-sum contribution
  long double main_hi = 0.0L;
  long double outer_p1_hi = 0.0L;      // rank-N mass outside the window
  long double outer_p2_lo = 0.0L;      // product-law mass outside the sector
  long double outer_p2_hi = 0.0L;
};

// Certified enclosure of the total-variation distance between the rank-N
// Gaussian-weight law on triples and the decoupled product law
// (size-biased uniform) x (size-biased uniform) x (integer marginal).
TvResult tv_decoupling(int N, long double q, int box);

std::string tv_result_json(const TvResult& r);

// --- helpers for statistical tests -----------------------------------------

// Upper tail of the chi-square distribution with `dof` degrees of freedom.
long double chi_square_pvalue(long double stat, int dof);

}  // namespace gnq
