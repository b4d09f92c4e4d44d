#include "gnq/partition.hpp"

#include <mutex>
#include <stdexcept>

namespace gnq {

bool is_valid_partition(const Partition& a) {
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] <= 0) return false;
    if (i > 0 && a[i] > a[i - 1]) return false;
  }
  return true;
}

long long part_size(const Partition& a) {
  long long s = 0;
  for (int p : a) s += p;
  return s;
}

namespace {

void gen_rec(int remaining, int max_part, Partition& cur,
             const std::function<void(const Partition&)>& fn, int slots_left) {
  if (remaining == 0) {
    fn(cur);
    return;
  }
  if (slots_left == 0) return;
  for (int p = std::min(remaining, max_part); p >= 1; --p) {
    cur.push_back(p);
    gen_rec(remaining - p, p, cur, fn, slots_left - 1);
    cur.pop_back();
  }
}

}  // namespace

void for_each_partition(int n, int max_length,
                        const std::function<void(const Partition&)>& fn) {
  if (n < 0) throw std::domain_error("for_each_partition: n < 0");
  Partition cur;
  cur.reserve(n);
  gen_rec(n, n, cur, fn, max_length < 0 ? n : max_length);
}

std::vector<Partition> enumerate_partitions(int n, int max_length) {
  std::vector<Partition> out;
  for_each_partition(n, max_length, [&](const Partition& a) { out.push_back(a); });
  return out;
}

BigInt partition_count(int n) {
  if (n < 0) throw std::domain_error("partition_count: n < 0");
  static std::mutex mu;
  static std::vector<BigInt> memo{1};  // p(0) = 1
  std::lock_guard<std::mutex> lock(mu);
  while (static_cast<int>(memo.size()) <= n) {
    int m = static_cast<int>(memo.size());
    BigInt v = 0;
    // p(m) = sum_{k>=1} (-1)^{k+1} [p(m - k(3k-1)/2) + p(m - k(3k+1)/2)]
    for (int k = 1;; ++k) {
      long long g1 = static_cast<long long>(k) * (3 * k - 1) / 2;
      long long g2 = static_cast<long long>(k) * (3 * k + 1) / 2;
      if (g1 > m) break;
      BigInt t = memo[m - g1];
      if (g2 <= m) t += memo[m - g2];
      if (k % 2 == 1)
        v += t;
      else
        v -= t;
    }
    memo.push_back(v);
  }
  return memo[n];
}

BigInt count_by_length(int n, int k) {
  if (n < 0 || k < 0) throw std::domain_error("count_by_length: negative argument");
  if (k == 0) return n == 0 ? 1 : 0;
  if (k > n) return 0;
  // P(n,k) = P(n-1,k-1) + P(n-k,k), partitions with exactly k parts.
  std::vector<std::vector<BigInt>> P(n + 1, std::vector<BigInt>(k + 1, 0));
  P[0][0] = 1;
  for (int m = 1; m <= n; ++m)
    for (int j = 1; j <= std::min(m, k); ++j) {
      P[m][j] = P[m - 1][j - 1];
      if (m - j >= 0) P[m][j] += P[m - j][j];
    }
  return P[n][k];
}

BigInt count_length_at_most(int n, int k) {
  BigInt s = 0;
  for (int j = 0; j <= std::min(n, k); ++j) s += count_by_length(n, j);
  if (n == 0) s = 1;
  return s;
}

long long total_content(const Partition& a) {
  long long K = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    long long c = a[i];
    long long row = static_cast<long long>(i) + 1;  // 1-based row index
    K += c * (c + 1) / 2 - c * row;
  }
  return K;
}

Partition conjugate(const Partition& a) {
  Partition out;
  if (a.empty()) return out;
  out.resize(a[0], 0);
  for (int j = 0; j < a[0]; ++j) {
    int cnt = 0;
    for (int p : a)
      if (p >= j + 1) ++cnt;
    out[j] = cnt;
  }
  return out;
}

BigInt hook_dimension(const Partition& a) {
  if (a.empty())
    throw std::domain_error("hook_dimension: empty partition has no assigned dimension");
  if (!is_valid_partition(a)) throw std::domain_error("hook_dimension: invalid partition");
  Partition conj = conjugate(a);
  long long n = part_size(a);
  BigInt num = 1;
  for (long long m = 2; m <= n; ++m) num *= m;
  BigInt hooks = 1;
  for (size_t i = 0; i < a.size(); ++i)
    for (int j = 1; j <= a[i]; ++j) {
      long long hook = (a[i] - j) + (conj[j - 1] - static_cast<long long>(i) - 1) + 1;
      hooks *= hook;
    }
  return num / hooks;
}

ContentHistogram content_histogram(int max_size, int max_length) {
  ContentHistogram h(max_size + 1);
  for (int s = 0; s <= max_size; ++s)
    for_each_partition(s, max_length,
                       [&](const Partition& a) { ++h[s][total_content(a)]; });
  return h;
}

}  // namespace gnq
