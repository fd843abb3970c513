#include "biuni/orbits.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "biuni/linalg.hpp"

namespace biuni {

namespace {

int gcd_int(int a, int b) { return std::gcd(a, b); }

int euler_phi(int n) {
    int out = 0;
    for (int k = 1; k <= n; ++k)
        if (gcd_int(k, n) == 1) ++out;
    return out;
}

}  // namespace

Vec gauss_sequence(int n, int lambda, int mu, Complex c) {
    if (n < 1) throw std::invalid_argument("gauss_sequence: n must be >= 1");
    if (gcd_int(((lambda % n) + n) % n == 0 ? n : ((lambda % n) + n) % n, n) != 1)
        throw std::invalid_argument("gauss_sequence: lambda must be coprime to n");
    if (std::abs(std::abs(c) - 1.0) > 1e-12)
        throw std::invalid_argument("gauss_sequence: c must be unimodular");
    Vec u(n);
    for (int k = 0; k < n; ++k) {
        double quad = (n % 2 == 1) ? double(lambda) * double(k) * double(k)
                                   : 0.5 * double(lambda) * double(k) * double(k);
        double angle = 2.0 * kPi * (quad + double(mu) * double(k)) / double(n);
        u[k] = c * std::polar(1.0, angle);
    }
    if (autocorr_residual(u) > 1e-9)
        throw std::logic_error("gauss_sequence: autocorrelation check failed");
    return u;
}

namespace {

bool is_prime(int p) {
    if (p < 2) return false;
    for (int d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

int legendre(int a, int p) {
    a %= p;
    if (a < 0) a += p;
    if (a == 0) return 0;
    // Euler's criterion by fast exponentiation mod p.
    long long base = a, e = (p - 1) / 2, acc = 1;
    while (e) {
        if (e & 1) acc = acc * base % p;
        base = base * base % p;
        e >>= 1;
    }
    return acc == 1 ? 1 : -1;
}

}  // namespace

Vec bjorck_sequence(int p) {
    if (!is_prime(p) || p < 3)
        throw std::invalid_argument("bjorck_sequence: p must be an odd prime");
    Vec u(p);
    if (p % 4 == 3) {
        double theta = std::acos((1.0 - double(p)) / (1.0 + double(p)));
        for (int k = 0; k < p; ++k)
            u[k] = (legendre(k, p) == -1) ? std::polar(1.0, theta) : Complex(1.0);
    } else {
        double eta = std::acos(1.0 / (std::sqrt(double(p)) + 1.0));
        for (int k = 0; k < p; ++k)
            u[k] = std::polar(1.0, eta * double(legendre(k, p)));
    }
    if (autocorr_residual(u) > 1e-9)
        throw std::logic_error("bjorck_sequence: autocorrelation check failed");
    return u;
}

double autocorr_residual(const Vec& u) {
    const int n = int(u.size());
    double worst = 0.0;
    for (int i = 1; i < n; ++i) {
        Complex s(0.0, 0.0);
        for (int k = 0; k < n; ++k) s += u[k] * std::conj(u[(k + i) % n]);
        worst = std::max(worst, std::abs(s));
    }
    return worst;
}

double cyclic_root_residual(const Vec& u) {
    const int n = int(u.size());
    Vec x(n);
    for (int k = 0; k < n; ++k) {
        if (std::abs(u[k]) == 0.0)
            throw std::invalid_argument("cyclic_root_residual: zero entry");
        x[k] = u[(k + 1) % n] / u[k];
    }
    double worst = 0.0;
    for (int j = 1; j < n; ++j) {
        Complex sum(0.0, 0.0);
        for (int k = 0; k < n; ++k) {
            Complex prod(1.0, 0.0);
            for (int t = 0; t < j; ++t) prod *= x[(k + t) % n];
            sum += prod;
        }
        worst = std::max(worst, std::abs(sum));
    }
    Complex prod(1.0, 0.0);
    for (int k = 0; k < n; ++k) prod *= x[k];
    worst = std::max(worst, std::abs(prod - Complex(1.0)));
    return worst;
}

Vec gn_action(const Vec& u, const GnGenerator& g) {
    const int n = int(u.size());
    Vec y(n);
    switch (g.kind) {
        case GnGenerator::Kind::Shift: {
            int k = ((g.k % n) + n) % n;
            for (int j = 0; j < n; ++j) y[j] = u[(j + k) % n];
            break;
        }
        case GnGenerator::Kind::Modulate: {
            for (int j = 0; j < n; ++j)
                y[j] = u[j] * std::polar(1.0, 2.0 * kPi * double((1LL * j * g.k) % n) / n);
            break;
        }
        case GnGenerator::Kind::Dilate: {
            int k = ((g.k % n) + n) % n;
            if (gcd_int(k == 0 ? n : k, n) != 1)
                throw std::invalid_argument("gn_action: dilation factor not coprime to n");
            for (int j = 0; j < n; ++j) y[j] = u[int((1LL * j * k) % n)];
            break;
        }
        case GnGenerator::Kind::Conjugate:
            y = u.conjugate();
            break;
        case GnGenerator::Kind::Fourier: {
            y = fourier_matrix(n).mat() * u;
            for (int j = 0; j < n; ++j) {
                if (std::abs(std::abs(y[j]) - 1.0) > 1e-6)
                    throw std::invalid_argument(
                        "gn_action: Fourier image is not on the torus");
            }
            y = sign1_map(y);
            break;
        }
    }
    y /= unit(y[0]);
    return sign1_map(y);
}

namespace {

// Lexicographic comparison on phase angles in [0, 2 pi), with a small snap so
// that nearly equal angles compare equal.
bool lex_less(const Vec& a, const Vec& b) {
    for (Eigen::Index k = 0; k < a.size(); ++k) {
        double pa = std::arg(a[k]), pb = std::arg(b[k]);
        if (pa < 0) pa += 2.0 * kPi;
        if (pb < 0) pb += 2.0 * kPi;
        if (std::abs(pa - pb) <= 1e-7) continue;
        return pa < pb;
    }
    return false;
}

}  // namespace

Orbit orbit_of(const Vec& u0, double match_tol) {
    const int n = int(u0.size());
    const std::size_t bound = std::size_t(4) * n * n * euler_phi(n);
    Vec seed = sign1_map(u0);
    seed /= unit(seed[0]);
    seed = sign1_map(seed);

    std::vector<GnGenerator> gens;
    gens.push_back({GnGenerator::Kind::Shift, 1});
    gens.push_back({GnGenerator::Kind::Modulate, 1});
    for (int k = 2; k < n; ++k)
        if (gcd_int(k, n) == 1) gens.push_back({GnGenerator::Kind::Dilate, k});
    gens.push_back({GnGenerator::Kind::Conjugate, 0});
    gens.push_back({GnGenerator::Kind::Fourier, 0});

    Orbit orbit;
    orbit.members.push_back(seed);
    std::deque<std::size_t> queue{0};
    while (!queue.empty()) {
        std::size_t idx = queue.front();
        queue.pop_front();
        Vec cur = orbit.members[idx];
        for (const auto& g : gens) {
            Vec img = gn_action(cur, g);
            bool known = false;
            for (const auto& m : orbit.members)
                if ((img - m).norm() <= match_tol) { known = true; break; }
            if (!known) {
                orbit.members.push_back(img);
                queue.push_back(orbit.members.size() - 1);
                if (orbit.members.size() > bound)
                    throw std::runtime_error(
                        "orbit_of: closure exceeds the group order; match "
                        "tolerance too fine for the input's accuracy");
            }
        }
    }
    orbit.representative = orbit.members[0];
    for (const auto& m : orbit.members)
        if (lex_less(m, orbit.representative)) orbit.representative = m;
    return orbit;
}

double orbit_distance(const Orbit& a, const Orbit& b) {
    double best = 1e300;
    for (const auto& m : b.members)
        best = std::min(best, (a.representative - m).norm());
    return best;
}

Census census(int n, const SearchConfig& cfg, double tau, double match_tol) {
    Census out;
    out.n = n;
    out.delta = cfg.delta;
    out.tau = tau;
    UnitaryMatrix f = fourier_matrix(n);

    std::vector<Orbit> orbits;
    const int block = std::max(2 * omp_get_max_threads(), 4);
    std::vector<SearchResult> slot(block);
    for (int base = 0; base < cfg.max_starts; base += block) {
        const int count = std::min(block, cfg.max_starts - base);
#pragma omp parallel for schedule(dynamic)
        for (int k = 0; k < count; ++k) {
            SearchConfig one = cfg;
            one.max_starts = 1;
            Vec v0 = random_torus_vector(n, mix_seed(cfg.seed, std::uint64_t(base + k)));
            slot[k] = run_from(f, v0, one);
        }
        for (int k = 0; k < count; ++k) {
            if (!slot[k].converged) continue;
            auto polished = refine(f, slot[k].vector);
            if (!polished) continue;  // could not certify to machine precision
            Vec v = polished->data();
            v /= unit(v[0]);
            Orbit orb = orbit_of(v, match_tol);
            bool fresh = true;
            for (const auto& known : orbits)
                if (orbit_distance(known, orb) <= tau) { fresh = false; break; }
            if (fresh) orbits.push_back(std::move(orb));
        }
    }

    std::sort(orbits.begin(), orbits.end(), [](const Orbit& a, const Orbit& b) {
        if (a.cardinality() != b.cardinality()) return a.cardinality() < b.cardinality();
        return lex_less(a.representative, b.representative);
    });
    for (const auto& o : orbits) {
        out.orbits.push_back({o.cardinality(), o.representative});
        out.total += o.cardinality();
    }
    return out;
}

}  // namespace biuni
