#pragma once

#include <cstdint>
#include <vector>

#include "biuni/projector.hpp"
#include "biuni/types.hpp"

namespace biuni {

// Quadratic-phase sequence u_k = c * exp((2 pi i / n)(lambda k^2 + mu k)) for
// odd n, with lambda k^2 / 2 for even n; gcd(lambda, n) must be 1.
Vec gauss_sequence(int n, int lambda, int mu, Complex c = Complex(1.0, 0.0));

// Prime-length sequence with entries on one or two circle arcs placed by the
// Legendre symbol; biunimodular for the Fourier matrix (asserted at runtime).
Vec bjorck_sequence(int p);

// max_i |sum_k u_k conj(u_{k+i mod n})| over i = 1..n-1.
double autocorr_residual(const Vec& u);

// Residual of the cyclic-roots system for x_k = u_{k+1}/u_k: the n-1 sums of
// cyclic products of consecutive entries, and |prod x_k - 1|.
double cyclic_root_residual(const Vec& u);

// One group generator acting on length-n torus vectors. All actions regauge
// the result so the first entry is 1.
struct GnGenerator {
    enum class Kind { Shift, Modulate, Dilate, Conjugate, Fourier } kind;
    int k = 1;  // parameter for Shift/Modulate/Dilate
};

Vec gn_action(const Vec& u, const GnGenerator& g);

struct Orbit {
    std::vector<Vec> members;       // closed under the group, first entries 1
    Vec representative;             // lexicographically minimal phase sequence
    std::size_t cardinality() const { return members.size(); }
};

// Closure of u under shifts, modulations, dilations, conjugation and the
// Fourier transform. Two vectors are identified when their l2 distance is at
// most match_tol; growth past the group order 4 n^2 phi(n) signals that the
// tolerance is too fine for the input's accuracy.
Orbit orbit_of(const Vec& u, double match_tol = 1e-6);

// min over members of b of the l2 distance to a's representative (valid since
// the group acts by isometries on both orbits).
double orbit_distance(const Orbit& a, const Orbit& b);

struct CensusOrbit {
    std::size_t cardinality = 0;
    Vec representative;
};

struct Census {
    int n = 0;
    double delta = 0.0;
    double tau = 0.0;
    std::vector<CensusOrbit> orbits;  // sorted by (cardinality, representative)
    std::size_t total = 0;
};

// Repeated random-start searches on the Fourier matrix; every converged hit is
// polished, orbit-closed, and kept when farther than tau from all known
// orbits. Deterministic for a fixed config, independent of the worker count.
Census census(int n, const SearchConfig& cfg, double tau, double match_tol = 1e-6);

}  // namespace biuni
