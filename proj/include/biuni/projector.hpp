#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "biuni/types.hpp"

namespace biuni {

struct SearchConfig {
    double delta = 1e-10;      // stop when ||Av||_1 > n - delta
    int max_iters = 10000;     // per start
    int max_starts = 10000;
    std::uint64_t seed = 0;
    bool record_trace = false;
};

struct SearchResult {
    bool converged = false;
    double residual = 0.0;   // n - ||Av||_1 at the returned vector
    int iterations = 0;
    int starts_used = 0;
    Vec vector;              // best iterate (on the torus)
    std::vector<double> trace;  // ||Av||_1 per iteration when recorded
};

struct NearBiuniCertificate {
    double two_delta_bound = 0.0;       // ||1 - |Av|||_2, certified < sqrt(2 delta)
    double min_abs_av = 0.0;            // certified >= 1/2 when delta <= 1/8
    double min_abs_astar_sign = 0.0;    // min |A* sign(Av)|, certified >= 1/2
    double step_gap_bound = 0.0;        // 2 sqrt(n) (||A Pv||_1 - ||Av||_1)^{1/2}
    double step_diff = 0.0;             // measured ||Pv - v||_inf, <= step_gap_bound
    bool valid = false;                 // all certified inequalities hold
};

// One alternating-projection step sign(A* sign(Av)). Entries of the result may
// be zero when A* sign(Av) has a zero entry; callers must check.
Vec project_step(const UnitaryMatrix& a, const Vec& v);

// Iterate from v0 until ||Av||_1 > n - delta, the iteration count runs out, or
// the objective stagnates (gain < 1e-15 for 50 consecutive steps). A step that
// leaves the torus (zero entry) aborts the run as non-converged.
SearchResult run_from(const UnitaryMatrix& a, const Vec& v0, const SearchConfig& cfg);

// Repeated runs from uniform random phase starts. Parallel over starts; the
// reported result is the converged run with the lowest start index, so output
// is independent of the worker count. starts_used counts starts up to and
// including the successful one.
SearchResult multi_start_search(const UnitaryMatrix& a, const SearchConfig& cfg);

// Serial reference of the same search; bit-identical to the parallel version.
SearchResult multi_start_search_serial(const UnitaryMatrix& a, const SearchConfig& cfg);

// Certified near-biunimodularity bounds for an iterate with residual < delta.
NearBiuniCertificate certify_near(const UnitaryMatrix& a, const TorusVector& v,
                                  double delta);

// Gauss-Newton polish of the phase vector toward an exact biunimodular vector;
// returns the refined vector when the max-norm of |Av|^2 - 1 drops below tol.
std::optional<TorusVector> refine(const UnitaryMatrix& a, const Vec& v,
                                  double tol = 1e-13, int max_steps = 40);

}  // namespace biuni
