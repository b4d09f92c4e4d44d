#include "gnq/weights.hpp"

#include <stdexcept>

namespace gnq {

bool in_lambda(const WeightTriple& t, int N) {
  return N >= 1 && part_length(t.alpha) <= sector_A(N) &&
         part_length(t.beta) <= sector_B(N);
}

bool is_valid_weight(const HighestWeight& w) {
  if (w.entries.empty()) return false;
  for (size_t i = 1; i < w.entries.size(); ++i)
    if (w.entries[i] > w.entries[i - 1]) return false;
  return true;
}

BigRat casimir_direct(const HighestWeight& w) {
  if (!is_valid_weight(w)) throw std::domain_error("casimir_direct: invalid weight");
  int N = w.N();
  BigInt s = 0;
  for (int i = 1; i <= N; ++i) {
    BigInt wi = w.entries[i - 1];
    s += wi * (wi + N + 1 - 2 * i);
  }
  return BigRat(s) / N;
}

WeightTriple weight_to_triple(const HighestWeight& w) {
  if (!is_valid_weight(w)) throw std::domain_error("weight_to_triple: invalid weight");
  int N = w.N();
  int k = (N + 1) / 2;
  WeightTriple t;
  t.n = w.entries[k - 1];
  for (int i = 1; i < k; ++i) {
    long long d = w.entries[i - 1] - t.n;
    if (d > 0) t.alpha.push_back(static_cast<int>(d));
  }
  // beta_j = n - w_{N-j+1}: scanning from the bottom entry upward yields the
  // parts in nonincreasing order already.
  for (int j = 1; j <= N - k; ++j) {
    long long d = t.n - w.entries[N - j];
    if (d > 0) t.beta.push_back(static_cast<int>(d));
  }
  return t;
}

HighestWeight triple_to_weight(const WeightTriple& t, int N) {
  if (!is_valid_partition(t.alpha) || !is_valid_partition(t.beta))
    throw std::domain_error("triple_to_weight: invalid partition");
  if (!in_lambda(t, N))
    throw std::domain_error("triple_to_weight: lengths exceed the sector bounds for this N");
  HighestWeight w;
  w.entries.reserve(N);
  for (int p : t.alpha) w.entries.push_back(t.n + p);
  int mid = N - part_length(t.alpha) - part_length(t.beta);
  for (int i = 0; i < mid; ++i) w.entries.push_back(t.n);
  for (int j = part_length(t.beta); j >= 1; --j)
    w.entries.push_back(t.n - t.beta[j - 1]);
  return w;
}

long long coupling_F(const WeightTriple& t) {
  return total_content(t.alpha) + total_content(t.beta) +
         t.n * (part_size(t.alpha) - part_size(t.beta));
}

BigRat casimir_decomposed(const WeightTriple& t, int N) {
  if (!in_lambda(t, N))
    throw std::domain_error("casimir_decomposed: triple outside the sector for this N");
  BigInt base = BigInt(part_size(t.alpha)) + part_size(t.beta) + BigInt(t.n) * t.n;
  return BigRat(base) + BigRat(2 * BigInt(coupling_F(t))) / N;
}

BigRat casimir_lower_bound(const WeightTriple& t, int N) {
  if (!in_lambda(t, N))
    throw std::domain_error("casimir_lower_bound: triple outside the sector for this N");
  BigInt sa = part_size(t.alpha), sb = part_size(t.beta);
  BigRat half = BigRat(sa + sb) / 2;
  BigRat shift = BigRat(t.n) + BigRat(sa - sb) / N;
  return half + shift * shift;
}

}  // namespace gnq
