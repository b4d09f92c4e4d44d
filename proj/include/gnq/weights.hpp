#pragma once

#include <vector>

#include "gnq/partition.hpp"

namespace gnq {

// Nonincreasing N-tuple of integers labelling an irreducible U(N)
// representation.
struct HighestWeight {
  std::vector<long long> entries;
  int N() const { return static_cast<int>(entries.size()); }
};

// (alpha, beta, n): steps of the weight above/below its middle entry n.
struct WeightTriple {
  Partition alpha;
  Partition beta;
  long long n = 0;
};

// Sector length bounds: A_N + B_N = N - 1.
inline int sector_A(int N) { return (N + 1) / 2 - 1; }
inline int sector_B(int N) { return N - (N + 1) / 2; }
// Membership in the set of triples with l(alpha) <= A_N, l(beta) <= B_N.
bool in_lambda(const WeightTriple& t, int N);

bool is_valid_weight(const HighestWeight& w);

// c_2(w) = (1/N) sum_i w_i (w_i + N + 1 - 2i), exact rational.
BigRat casimir_direct(const HighestWeight& w);

// Split a weight at its middle entry k = floor((N+1)/2):
// n = w_k, alpha_i = w_i - n (entries above), beta_j = n - w_{N-j+1} (below).
WeightTriple weight_to_triple(const HighestWeight& w);
// Inverse assembly; rejects triples whose lengths exceed the sector bounds
// (no canonical weight exists at this N).
HighestWeight triple_to_weight(const WeightTriple& t, int N);

// F(alpha,beta,n) = K(alpha) + K(beta) + n(|alpha| - |beta|).
long long coupling_F(const WeightTriple& t);
// c_2 = |alpha| + |beta| + n^2 + (2/N) F, exact rational; requires membership.
BigRat casimir_decomposed(const WeightTriple& t, int N);
// C_N = (|alpha|+|beta|)/2 + (n + (|alpha|-|beta|)/N)^2 <= c_2 on the sector.
BigRat casimir_lower_bound(const WeightTriple& t, int N);

}  // namespace gnq
