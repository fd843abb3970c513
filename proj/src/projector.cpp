#include "biuni/projector.hpp"

#include <omp.h>

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "biuni/linalg.hpp"

namespace biuni {

Vec project_step(const UnitaryMatrix& a, const Vec& v) {
    Vec av = a.mat() * v;
    Vec u = a.mat().adjoint() * sign_map(av);
    return sign_map(u);
}

SearchResult run_from(const UnitaryMatrix& a, const Vec& v0, const SearchConfig& cfg) {
    const Eigen::Index n = a.dim();
    if (v0.size() != n) throw std::invalid_argument("run_from: dimension mismatch");
    const double target = double(n) - cfg.delta;

    SearchResult res;
    res.vector = v0;
    Vec v = v0;
    Vec av = a.mat() * v;
    double l1 = av.cwiseAbs().sum();
    if (cfg.record_trace) res.trace.push_back(l1);
    if (l1 > target) {
        res.converged = true;
        res.residual = double(n) - l1;
        return res;
    }

    int stagnant = 0;
    for (int it = 1; it <= cfg.max_iters; ++it) {
        Vec u = a.mat().adjoint() * sign_map(av);
        bool off_torus = false;
        for (Eigen::Index k = 0; k < n; ++k) {
            double m = std::abs(u[k]);
            if (m == 0.0) { off_torus = true; break; }
            u[k] /= m;
        }
        if (off_torus) {
            res.iterations = it;
            res.residual = double(n) - l1;
            res.vector = v;
            return res;  // failed step; caller restarts
        }
        v = u;
        av = a.mat() * v;
        double l1_next = av.cwiseAbs().sum();
        if (cfg.record_trace) res.trace.push_back(l1_next);
        res.iterations = it;
        if (l1_next > target) {
            res.converged = true;
            res.residual = double(n) - l1_next;
            res.vector = v;
            return res;
        }
        if (l1_next - l1 < 1e-15) {
            if (++stagnant >= 50) break;
        } else {
            stagnant = 0;
        }
        l1 = l1_next;
    }
    res.residual = double(n) - l1;
    res.vector = v;
    return res;
}

namespace {

SearchResult search_impl(const UnitaryMatrix& a, const SearchConfig& cfg, bool parallel) {
    const int n = int(a.dim());
    SearchResult best;          // best non-converged result (lowest residual)
    best.residual = double(n);
    bool have_best = false;

    const int block = std::max(parallel ? 2 * omp_get_max_threads() : 1, 1);
    std::vector<SearchResult> slot(block);

    for (int base = 0; base < cfg.max_starts; base += block) {
        const int count = std::min(block, cfg.max_starts - base);
#pragma omp parallel for schedule(dynamic) if (parallel)
        for (int k = 0; k < count; ++k) {
            Vec v0 = random_torus_vector(n, mix_seed(cfg.seed, std::uint64_t(base + k)));
            slot[k] = run_from(a, v0, cfg);
        }
        for (int k = 0; k < count; ++k) {
            if (slot[k].converged) {
                slot[k].starts_used = base + k + 1;
                return slot[k];
            }
            if (!have_best || slot[k].residual < best.residual) {
                best = slot[k];
                have_best = true;
            }
        }
    }
    best.starts_used = cfg.max_starts;
    return best;
}

}  // namespace

SearchResult multi_start_search(const UnitaryMatrix& a, const SearchConfig& cfg) {
    return search_impl(a, cfg, true);
}

SearchResult multi_start_search_serial(const UnitaryMatrix& a, const SearchConfig& cfg) {
    return search_impl(a, cfg, false);
}

NearBiuniCertificate certify_near(const UnitaryMatrix& a, const TorusVector& v,
                                  double delta) {
    const Eigen::Index n = a.dim();
    NearBiuniCertificate c;
    Vec av = a.mat() * v.data();
    double l1 = av.cwiseAbs().sum();

    c.two_delta_bound = (Eigen::VectorXd::Ones(n) - av.cwiseAbs()).norm();
    c.min_abs_av = av.cwiseAbs().minCoeff();
    Vec astar = a.mat().adjoint() * sign_map(av);
    c.min_abs_astar_sign = astar.cwiseAbs().minCoeff();

    Vec pv = sign_map(astar);
    double l1_pv = (a.mat() * pv).cwiseAbs().sum();
    double gap = std::max(l1_pv - l1, 0.0);
    c.step_gap_bound = 2.0 * std::sqrt(double(n)) * std::sqrt(gap);
    c.step_diff = (pv - v.data()).cwiseAbs().maxCoeff();

    c.valid = (double(n) - l1 < delta) &&
              (c.two_delta_bound < std::sqrt(2.0 * delta)) &&
              (delta > 0.125 || (c.min_abs_av >= 0.5 && c.min_abs_astar_sign >= 0.5)) &&
              (c.step_diff <= c.step_gap_bound + 1e-12);
    return c;
}

std::optional<TorusVector> refine(const UnitaryMatrix& a, const Vec& v0,
                                  double tol, int max_steps) {
    const Eigen::Index n = a.dim();
    Vec v = sign1_map(v0);

    auto residual = [&](const Vec& w, Eigen::VectorXd& r) {
        Vec aw = a.mat() * w;
        double worst = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
            r[k] = std::norm(aw[k]) - 1.0;
            worst = std::max(worst, std::abs(r[k]));
        }
        return worst;
    };

    Eigen::VectorXd r(n);
    double worst = residual(v, r);
    Vec best_v = v;
    double best_worst = worst;

    for (int step = 0; step < max_steps && worst > tol; ++step) {
        Vec av = a.mat() * v;
        Eigen::MatrixXd jac(n, n);
        for (Eigen::Index k = 0; k < n; ++k)
            for (Eigen::Index j = 0; j < n; ++j)
                jac(k, j) = -2.0 * std::imag(std::conj(av[k]) * a.mat()(k, j) * v[j]);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
        svd.setThreshold(1e-10);
        Eigen::VectorXd dphi = svd.solve(-r);
        if (!dphi.allFinite()) break;
        Vec w(n);
        for (Eigen::Index j = 0; j < n; ++j)
            w[j] = v[j] * std::polar(1.0, dphi[j]);
        double w_worst = residual(w, r);
        if (w_worst >= worst && w_worst > tol) break;  // no progress
        v = w;
        worst = w_worst;
        if (worst < best_worst) {
            best_worst = worst;
            best_v = v;
        }
    }
    if (best_worst <= tol) return TorusVector(best_v, 1e-9).snapped();
    return std::nullopt;
}

}  // namespace biuni
