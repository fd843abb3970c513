#pragma once

#include <string>
#include <vector>

#include "biuni/types.hpp"

namespace biuni {

// Rank of the imaginary part of S (entrywise Im), singular values counted
// above rel_tol * sigma_max.
int im_rank(const Mat& s, double rel_tol = 1e-9);

// Jacobian rank (n-1)^2 + n + rank(Im S) of the phasing map at (I, S, I) for
// a unitary S fixing the all-ones vector.
int jacobian_rank(const Mat& s, double rel_tol = 1e-9);

// Unitary S fixing the all-ones vector whose Jacobian rank is the full n^2:
// v + c*1 -> i*P(v) + c*1 with P the cyclic shift restricted to the
// complement of the all-ones vector.
Mat full_rank_witness(int n);

// Dimension of the phased orbit {D1 A D2} of A: rank of the real-linear map
// (X, Z) -> X A + A Z over imaginary diagonals X and imaginary diagonals Z
// with vanishing first entry.
int phasing_dim(const UnitaryMatrix& a, double rel_tol = 1e-9);

// Indicator grids R_j = { (x, y) : |(A u_{xy})_j| >= 1 } for u_xy =
// (1, e^{ix}, e^{iy}) over [-pi, pi]^2.
struct RegionGrid {
    int resolution = 0;          // grid has (resolution+1)^2 sample points
    std::vector<uint8_t> r[3];   // row-major, index i*(resolution+1)+j
    bool covered = true;         // every sample point lies in some region
};

RegionGrid region_grid(const UnitaryMatrix& a, int resolution);

// Same grid for the two-parameter real family
// E_{st} = { s cos x + t cos y + cos(x - y) >= 0 } style presets: the grid of
// the 3x3 matrix with rows scaled by (1, s, t) is evaluated through the
// corresponding circulant-type unitary; here we expose the raw inequality.
std::vector<uint8_t> est_region(double s, double t, int resolution);

// Cells where all three region boundaries pass within one cell, grouped into
// 8-connected clusters.
int triple_boundary_clusters(const RegionGrid& g);

// CSV rows "x,y,r1,r2,r3"; PGM is a binary P5 bitmap of one region.
std::string region_grid_csv(const RegionGrid& g);
std::string region_pgm(const std::vector<uint8_t>& r, int resolution);

}  // namespace biuni
