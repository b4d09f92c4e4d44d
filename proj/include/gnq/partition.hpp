#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace gnq {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

// A partition is its sequence of parts, strictly positive and nonincreasing.
// The empty vector is the empty partition (size 0, length 0).
using Partition = std::vector<int>;

bool is_valid_partition(const Partition& a);
long long part_size(const Partition& a);
inline int part_length(const Partition& a) { return static_cast<int>(a.size()); }

// Visit every partition of n (length <= max_length if max_length >= 0) in
// reverse-lexicographic order: (n), (n-1,1), ..., (1,...,1).
void for_each_partition(int n, int max_length,
                        const std::function<void(const Partition&)>& fn);
std::vector<Partition> enumerate_partitions(int n, int max_length = -1);

// p(n) by Euler's pentagonal recurrence (independent of enumeration).
// Memoized behind a lock; exact arbitrary-precision result.
BigInt partition_count(int n);
// p_k(n): partitions of n with exactly k parts.
BigInt count_by_length(int n, int k);
// p_{<=k}(n) = sum_{j<=k} p_j(n).
BigInt count_length_at_most(int n, int k);

// Total content K(a) = sum over boxes (i,j) of (j-i), via the per-row closed
// form sum_i [a_i(a_i+1)/2 - a_i*i].
long long total_content(const Partition& a);
Partition conjugate(const Partition& a);

// Number of standard Young tableaux of shape a (hook length formula), exact.
// Rejects the empty partition: the f(empty)=1 convention is left to callers.
BigInt hook_dimension(const Partition& a);

// Per-size histogram of total content over partitions with length <= max_length
// (max_length < 0: unrestricted): result[s][K] = #{a : |a|=s, K(a)=K}.
using ContentHistogram = std::vector<std::map<long long, long long>>;
ContentHistogram content_histogram(int max_size, int max_length = -1);

}  // namespace gnq
