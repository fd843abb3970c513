#pragma once

#include <cstdint>
#include <vector>

#include "biuni/types.hpp"

namespace biuni {

// (F_n)_{jk} = exp(-2*pi*i*j*k/n)/sqrt(n), indices 0..n-1.
UnitaryMatrix fourier_matrix(int n);

// Haar-distributed unitary: complex Ginibre sample, QR, columns rescaled by
// the phases of diag(R). Bit-reproducible for a fixed seed.
UnitaryMatrix haar_random_unitary(int n, std::uint64_t seed);

// M = psd * unitary via SVD. The zero matrix maps to (0, I) so that
// rank-deficient inputs get a deterministic unitary factor.
PolarFactors polar_decompose(const Mat& m);

// Entrywise x/|x| with 0 kept at 0.
Vec sign_map(const Vec& v);

// Entrywise x/|x| with 0 mapped to 1 (projection onto the torus).
Vec sign1_map(const Vec& v);

// ||A v||_1; equals n exactly when v is biunimodular for A.
double inf_to_1_value(const UnitaryMatrix& a, const Vec& v);

// Product of the entries of A v.
Complex pi_value(const UnitaryMatrix& a, const TorusVector& v);

// Block-diagonal matrix with `count` copies of b.
Mat block_diag_repeat(const Mat& b, int count);

// Rank of a real matrix, counting singular values above rel_tol * sigma_max.
int real_rank(const Eigen::MatrixXd& m, double rel_tol = 1e-9);

// Per-start RNG stream seed derivation (splitmix64 mixing), so that parallel
// and serial evaluation of start k draw identical samples.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// Uniform i.i.d. phases; start vector for the projection search.
Vec random_torus_vector(int n, std::uint64_t seed);

}  // namespace biuni
