#pragma once

#include <array>
#include <optional>
#include <vector>

#include "biuni/projector.hpp"
#include "biuni/types.hpp"

namespace biuni {

// Triangular phase table a_{jk} (1-based, j,k = 1..n) parameterizing U(n) by
// the recursion A_l = diag(a_{l,1..l}) F_l (1 (+) A_{l-1}) F_l* diag(1, a_{1..l-1,l}).
struct PhaseTable {
    int n = 0;
    Mat a;  // a(j-1, k-1) holds a_{jk}; entries with j<k from column steps

    static PhaseTable ones(int n);
};

UnitaryMatrix synthesize(const PhaseTable& table);

// Left/diagonal/right splitting A = D_L S D_R with S fixing the all-ones
// vector, L the phases of Av, and R = conj(v) for a biunimodular v with v_1=1.
struct LarDecomposition {
    Vec left;    // unimodular entries of D_L
    Mat stochastic_like;  // S, unitary with S 1 = S* 1 = 1
    Vec right;   // unimodular entries of D_R, first entry 1
};

// One analysis level: biunimodular pair (v, w = Av) and the reduced (n-1)x(n-1)
// unitary B with A = D_w F (1 (+) B) F* D_conj(v).
struct AnalysisResult {
    Vec v;
    Vec w;
    Mat b;
    double b_residual = 0.0;  // unitarity defect of B before any re-orthonormalization
};

AnalysisResult analyze(const UnitaryMatrix& a, const TorusVector& v);

LarDecomposition lar_decompose(const UnitaryMatrix& a, const TorusVector& v);

// Full recursive analysis to a phase table; closed forms are used for the
// 2x2 and 3x3 levels, the multi-start search (with polish) above that.
PhaseTable recursive_analyze(const UnitaryMatrix& a, const SearchConfig& cfg);

// --- 2x2 -----------------------------------------------------------------

struct U2Solutions {
    bool continuum = false;        // a zero entry makes every (1, d) biunimodular
    std::array<Vec, 2> vectors;    // the two isolated solutions otherwise
};

U2Solutions u2_biuni(const UnitaryMatrix& a);

// (1/2) [[a(1+z), a c (1-z)], [b(1-z), b c (1+z)]] for unimodular a, b, c, z.
UnitaryMatrix u2_from_phases(Complex a, Complex b, Complex c, Complex z);

// Inverse of u2_from_phases (canonical section).
std::array<Complex, 4> u2_to_phases(const UnitaryMatrix& a);

// --- 3x3 -----------------------------------------------------------------

struct U3Params {
    double alpha = 0.0, beta = 0.0, gamma = 0.0;  // in [0, pi/2]
    Complex z{1.0, 0.0};
    std::array<Complex, 3> left;   // diag(l1, l2, l3)
    std::array<Complex, 2> right;  // diag(1, r4, r5)
};

// Core family: first row (cos a, -sin a sin g, sin a cos g), first column
// (cos a, -sin a sin b, sin a cos b), lower block mixing through z.
UnitaryMatrix t_matrix(double alpha, double beta, double gamma, Complex z);

// A = diag(left) * T(alpha,beta,gamma,z) * diag(1, right).
U3Params u3_canonicalize(const UnitaryMatrix& a);

UnitaryMatrix u3_from_params(const U3Params& p);

// Constructive biunimodular vector for any A in U(3), first entry 1.
TorusVector u3_biuni_construct(const UnitaryMatrix& a);

// Euler-type factorization A = diag(left) * G1 * G2 * G3 * diag(1, right)
// with G2 = Y^z_alpha and (G1, G3) = (X_beta, X_gamma) or (Z_beta, X_gamma).
struct EulerFactors {
    bool z_variant = false;
    double alpha = 0.0, beta = 0.0, gamma = 0.0;
    Complex z{1.0, 0.0};
    std::array<Complex, 3> left;
    std::array<Complex, 2> right;
};

Mat x_rotation(double phi);                 // rotation in coordinates 2,3
Mat z_rotation(double phi);                 // rotation in coordinates 1,2
Mat y_twist(double phi, Complex z);         // rotation in 1,3 with z at (2,2)

EulerFactors euler_factor(const UnitaryMatrix& a, bool z_variant);
UnitaryMatrix euler_compose(const EulerFactors& f);

// --- 2n x 2n --------------------------------------------------------------

// U = (1/2) diag(A, B) [[I+Z, I-Z], [I-Z, I+Z]] diag(I, C).
struct BlockDecomposition {
    Mat a, b, c, z;
};

BlockDecomposition block2n_decompose(const UnitaryMatrix& u);
UnitaryMatrix block2n_synthesize(const BlockDecomposition& d);

// U(4) from sixteen phases: four 2x2 blocks built by u2_from_phases feeding
// the block synthesis above. Parameter order per block: (a0..a3) etc. with
// index 0 the z-type phase.
UnitaryMatrix u4_from_phases(const std::array<Complex, 4>& a,
                             const std::array<Complex, 4>& b,
                             const std::array<Complex, 4>& c,
                             const std::array<Complex, 4>& z);

// Continuum family u + z*w from a support-complementary biunimodular pair:
// supp(u) and supp(w) partition the index set, as do supp(Au) and supp(Aw),
// and all four restrictions are unimodular on their supports.
Vec continuum_family(const UnitaryMatrix& a, const Vec& u, const Vec& w, Complex zeta);

}  // namespace biuni
