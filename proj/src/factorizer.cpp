#include "biuni/factorizer.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <functional>

#include "biuni/linalg.hpp"

namespace biuni {

namespace {

Complex phase_checked(Complex x, const char* what, double tol = 1e-6) {
    if (std::abs(std::abs(x) - 1.0) > tol)
        throw std::invalid_argument(std::string(what) + ": phase entry is not unimodular");
    return unit(x);
}

Eigen::Matrix2cd rot2(double t) {
    Eigen::Matrix2cd r;
    r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    return r;
}

// Gauss-Newton fit of nine real parameters (three angles, six phases folded
// into one z phase and five diagonal phases) against a 3x3 target.
using Params9 = std::array<double, 9>;
using Compose9 = std::function<Mat(const Params9&)>;

double resid9(const Compose9& f, const Params9& p, const Mat& target,
              Eigen::VectorXd& r) {
    Mat d = f(p) - target;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            r[2 * (3 * i + j)] = d(i, j).real();
            r[2 * (3 * i + j) + 1] = d(i, j).imag();
        }
    return r.cwiseAbs().maxCoeff();
}

Params9 gn_polish9(const Compose9& f, Params9 p, const Mat& target) {
    Eigen::VectorXd r(18), rt(18);
    double worst = resid9(f, p, target, r);
    for (int step = 0; step < 25 && worst > 1e-13; ++step) {
        Eigen::MatrixXd jac(18, 9);
        const double h = 1e-7;
        for (int k = 0; k < 9; ++k) {
            Params9 pp = p, pm = p;
            pp[k] += h;
            pm[k] -= h;
            Eigen::VectorXd rp(18), rm(18);
            resid9(f, pp, target, rp);
            resid9(f, pm, target, rm);
            jac.col(k) = (rp - rm) / (2.0 * h);
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
        svd.setThreshold(1e-9);
        Eigen::VectorXd dp = svd.solve(-r);
        if (!dp.allFinite()) break;
        double scale = 1.0;
        bool improved = false;
        for (int half = 0; half < 10; ++half, scale *= 0.5) {
            Params9 pt = p;
            for (int k = 0; k < 9; ++k) pt[k] += scale * dp[k];
            double wt = resid9(f, pt, target, rt);
            if (wt < worst) {
                p = pt;
                worst = wt;
                r = rt;
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }
    return p;
}

Mat t_matrix_raw(double alpha, double beta, double gamma, Complex z) {
    const double ca = std::cos(alpha), sa = std::sin(alpha);
    const double cb = std::cos(beta), sb = std::sin(beta);
    const double cg = std::cos(gamma), sg = std::sin(gamma);
    Mat t(3, 3);
    t << Complex(ca), Complex(-sa * sg), Complex(sa * cg),
         Complex(-sa * sb), z * (cb * cg) - Complex(ca * sb * sg),
                            z * (cb * sg) + Complex(ca * sb * cg),
         Complex(sa * cb), z * (sb * cg) + Complex(ca * cb * sg),
                           z * (sb * sg) - Complex(ca * cb * cg);
    return t;
}

Mat compose_u3(const Params9& p) {
    Mat t = t_matrix_raw(p[0], p[1], p[2], std::polar(1.0, p[3]));
    Mat out(3, 3);
    const Complex l[3] = {std::polar(1.0, p[4]), std::polar(1.0, p[5]),
                          std::polar(1.0, p[6])};
    const Complex rr[3] = {Complex(1.0), std::polar(1.0, p[7]),
                           std::polar(1.0, p[8])};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out(i, j) = l[i] * t(i, j) * rr[j];
    return out;
}

constexpr double kBranchTol = 1e-7;

}  // namespace

// --- phase table ------------------------------------------------------------

PhaseTable PhaseTable::ones(int n) {
    PhaseTable t;
    t.n = n;
    t.a = Mat::Ones(n, n);
    return t;
}

UnitaryMatrix synthesize(const PhaseTable& table) {
    const int n = table.n;
    if (n < 1 || table.a.rows() != n || table.a.cols() != n)
        throw std::invalid_argument("synthesize: inconsistent phase table");
    Mat acc(1, 1);
    acc(0, 0) = phase_checked(table.a(0, 0), "synthesize");
    for (int l = 2; l <= n; ++l) {
        const Mat f = fourier_matrix(l).mat();
        Mat inner = Mat::Zero(l, l);
        inner(0, 0) = 1.0;
        inner.block(1, 1, l - 1, l - 1) = acc;
        Mat next = f * inner * f.adjoint();
        for (int i = 0; i < l; ++i) {
            Complex li = phase_checked(table.a(l - 1, i), "synthesize");
            next.row(i) *= li;
        }
        for (int k = 1; k < l; ++k) {
            Complex rk = phase_checked(table.a(k - 1, l - 1), "synthesize");
            next.col(k) *= rk;
        }
        acc = std::move(next);
    }
    return UnitaryMatrix(std::move(acc), 1e-8);
}

AnalysisResult analyze(const UnitaryMatrix& a, const TorusVector& v_in) {
    const Eigen::Index n = a.dim();
    if (v_in.size() != n) throw std::invalid_argument("analyze: dimension mismatch");
    AnalysisResult out;
    out.v = sign1_map(v_in.data());
    out.v /= unit(out.v[0]);
    Vec av = a.mat() * out.v;
    out.w = sign1_map(av);

    const Mat f = fourier_matrix(int(n)).mat();
    Mat m = out.w.conjugate().asDiagonal() * a.mat() * Mat(out.v.asDiagonal());
    Mat nmat = f.adjoint() * m * f;
    Mat b = nmat.block(1, 1, n - 1, n - 1);
    Mat g = b.adjoint() * b;
    g.diagonal().array() -= 1.0;
    out.b_residual = g.cwiseAbs().maxCoeff();
    if (out.b_residual > 1e-6)
        throw std::runtime_error(
            "analyze: reduced block is not unitary (vector too far from biunimodular)");
    if (out.b_residual > 1e-10) b = polar_decompose(b).unitary;
    out.b = std::move(b);
    return out;
}

LarDecomposition lar_decompose(const UnitaryMatrix& a, const TorusVector& v_in) {
    LarDecomposition out;
    Vec v = sign1_map(v_in.data());
    v /= unit(v[0]);
    out.right = v.conjugate();
    Vec av = a.mat() * v;
    out.left = sign1_map(av);
    out.stochastic_like =
        out.left.conjugate().asDiagonal() * a.mat() * Mat(v.asDiagonal());
    return out;
}

PhaseTable recursive_analyze(const UnitaryMatrix& a, const SearchConfig& cfg) {
    const int n = int(a.dim());
    PhaseTable table = PhaseTable::ones(n);
    Mat cur = a.mat();
    for (int l = n; l >= 2; --l) {
        UnitaryMatrix al(cur, 1e-6);
        Vec v;
        if (l == 2) {
            v = u2_biuni(al).vectors[0];
        } else if (l == 3) {
            v = u3_biuni_construct(al).data();
        } else {
            SearchResult sr = multi_start_search(al, cfg);
            if (!sr.converged)
                throw std::runtime_error("recursive_analyze: search failed at level " +
                                         std::to_string(l));
            auto polished = refine(al, sr.vector);
            v = polished ? polished->data() : sr.vector;
        }
        AnalysisResult ar = analyze(al, TorusVector(sign1_map(v), 1e-6));
        for (int k = 0; k < l; ++k) table.a(l - 1, k) = ar.w[k];
        for (int k = 1; k < l; ++k) table.a(k - 1, l - 1) = std::conj(ar.v[k]);
        cur = ar.b;
    }
    table.a(0, 0) = unit(cur(0, 0));
    return table;
}

// --- 2x2 ---------------------------------------------------------------------

U2Solutions u2_biuni(const UnitaryMatrix& a) {
    if (a.dim() != 2) throw std::invalid_argument("u2_biuni: need a 2x2 matrix");
    const Complex x = a.mat()(0, 0), y = a.mat()(0, 1);
    U2Solutions out;
    if (std::abs(x) * std::abs(y) <= 1e-12) {
        out.continuum = true;
        out.vectors[0] = Vec(2);
        out.vectors[0] << 1.0, 1.0;
        out.vectors[1] = Vec(2);
        out.vectors[1] << 1.0, -1.0;
        return out;
    }
    const Complex d = Complex(0.0, 1.0) * unit(x) * std::conj(unit(y));
    out.vectors[0] = Vec(2);
    out.vectors[0] << 1.0, d;
    out.vectors[1] = Vec(2);
    out.vectors[1] << 1.0, -d;
    return out;
}

UnitaryMatrix u2_from_phases(Complex a, Complex b, Complex c, Complex z) {
    a = phase_checked(a, "u2_from_phases");
    b = phase_checked(b, "u2_from_phases");
    c = phase_checked(c, "u2_from_phases");
    z = phase_checked(z, "u2_from_phases");
    Mat m(2, 2);
    m << 0.5 * a * (1.0 + z), 0.5 * a * c * (1.0 - z),
         0.5 * b * (1.0 - z), 0.5 * b * c * (1.0 + z);
    return UnitaryMatrix(std::move(m), 1e-12);
}

std::array<Complex, 4> u2_to_phases(const UnitaryMatrix& m) {
    if (m.dim() != 2) throw std::invalid_argument("u2_to_phases: need a 2x2 matrix");
    const Mat& a = m.mat();
    if (std::abs(a(0, 0)) <= 1e-12)
        return {Complex(1.0), a(1, 0), a(0, 1), Complex(-1.0)};
    if (std::abs(a(0, 1)) <= 1e-12)
        return {a(0, 0), Complex(1.0), a(1, 1), Complex(1.0)};
    U2Solutions sols = u2_biuni(m);
    LarDecomposition lar = lar_decompose(m, TorusVector(sols.vectors[0], 1e-9));
    Complex z = lar.stochastic_like(0, 0) - lar.stochastic_like(0, 1);
    return {lar.left[0], lar.left[1], std::conj(lar.right[1]), unit(z)};
}

// --- 3x3 ---------------------------------------------------------------------

UnitaryMatrix t_matrix(double alpha, double beta, double gamma, Complex z) {
    return UnitaryMatrix(t_matrix_raw(alpha, beta, gamma, phase_checked(z, "t_matrix")),
                         1e-12);
}

UnitaryMatrix u3_from_params(const U3Params& p) {
    Mat t = t_matrix_raw(p.alpha, p.beta, p.gamma, p.z);
    Mat out(3, 3);
    const Complex rr[3] = {Complex(1.0), p.right[0], p.right[1]};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out(i, j) = p.left[i] * t(i, j) * rr[j];
    return UnitaryMatrix(std::move(out), 1e-8);
}

namespace {

struct MaybePhase {
    Complex val{1.0, 0.0};
    bool set = false;
};

// z-entry coefficients of the lower 2x2 block of T: entry = p + z*q.
void t_block_coeffs(double ca, double sb, double cb, double sg, double cg,
                    double p[2][2], double q[2][2]) {
    p[0][0] = -ca * sb * sg;  q[0][0] = cb * cg;
    p[0][1] = ca * sb * cg;   q[0][1] = cb * sg;
    p[1][0] = ca * cb * sg;   q[1][0] = sb * cg;
    p[1][1] = -ca * cb * cg;  q[1][1] = sb * sg;
}

U3Params u3_extract(const Mat& m) {
    U3Params out;
    const double ca = std::clamp(std::abs(m(0, 0)), 0.0, 1.0);
    out.alpha = std::acos(ca);
    const double sa = std::sin(out.alpha);

    if (sa < kBranchTol) {
        // Nearly block-diagonal after phasing: take gamma = 0 and read the
        // lower block as diag(l2,l3) [[z cb, ca sb],[z sb, -ca cb]] diag(r4,r5).
        out.gamma = 0.0;
        out.left[0] = unit(m(0, 0));
        Eigen::Matrix2cd nb = m.block(1, 1, 2, 2);
        out.beta = std::atan2(std::abs(nb(1, 0)), std::abs(nb(0, 0)));
        const double sb = std::sin(out.beta), cb = std::cos(out.beta);
        if (sb < kBranchTol) {
            out.left[1] = 1.0;
            out.right[0] = 1.0;
            out.z = unit(nb(0, 0));
            out.left[2] = 1.0;
            out.right[1] = unit(-nb(1, 1));
        } else if (cb < kBranchTol) {
            out.left[1] = 1.0;
            out.right[1] = unit(nb(0, 1));
            out.left[2] = 1.0;
            out.right[0] = 1.0;
            out.z = unit(nb(1, 0));
        } else {
            out.left[1] = 1.0;
            out.right[1] = unit(nb(0, 1));
            out.left[2] = unit(-nb(1, 1) * std::conj(out.right[1]));
            out.right[0] = 1.0;
            out.z = unit(nb(0, 0));
        }
        return out;
    }

    out.gamma = std::atan2(std::abs(m(0, 1)), std::abs(m(0, 2)));
    out.beta = std::atan2(std::abs(m(1, 0)), std::abs(m(2, 0)));
    const double sb = std::sin(out.beta), cb = std::cos(out.beta);
    const double sg = std::sin(out.gamma), cg = std::cos(out.gamma);

    MaybePhase l1, l2, l3, r4, r5;
    if (sa * sb > kBranchTol) { l2.val = unit(-m(1, 0)); l2.set = true; }
    if (sa * cb > kBranchTol) { l3.val = unit(m(2, 0)); l3.set = true; }
    if (ca > kBranchTol) {
        l1.val = unit(m(0, 0));
        l1.set = true;
    } else if (sa * cg > kBranchTol) {
        r5.val = 1.0; r5.set = true;
        l1.val = unit(m(0, 2));
        l1.set = true;
    } else {
        r4.val = 1.0; r4.set = true;
        l1.val = unit(-m(0, 1));
        l1.set = true;
    }
    if (!r4.set && sa * sg > kBranchTol) {
        r4.val = unit(-std::conj(l1.val) * m(0, 1));
        r4.set = true;
    }
    if (!r5.set && sa * cg > kBranchTol) {
        r5.val = unit(std::conj(l1.val) * m(0, 2));
        r5.set = true;
    }

    double pc[2][2], qc[2][2];
    t_block_coeffs(ca, sb, cb, sg, cg, pc, qc);
    MaybePhase* rows[2] = {&l2, &l3};
    MaybePhase* cols[2] = {&r4, &r5};
    auto extract_z = [&](int j, int k) -> Complex {
        if (std::abs(qc[j][k]) < 1e-12) return Complex(1.0, 0.0);
        Complex t = std::conj(rows[j]->val * cols[k]->val) * m(1 + j, 1 + k);
        return unit((t - pc[j][k]) / qc[j][k]);
    };

    int jr = !l2.set ? 0 : (!l3.set ? 1 : -1);
    int kc = !r4.set ? 0 : (!r5.set ? 1 : -1);
    if (jr >= 0 && kc >= 0) {
        rows[jr]->set = cols[kc]->set = true;
        out.z = extract_z(jr, kc);
    } else if (jr >= 0) {
        rows[jr]->set = true;
        int k = std::abs(qc[jr][0]) >= std::abs(qc[jr][1]) ? 0 : 1;
        out.z = extract_z(jr, k);
    } else if (kc >= 0) {
        cols[kc]->set = true;
        int j = std::abs(qc[0][kc]) >= std::abs(qc[1][kc]) ? 0 : 1;
        out.z = extract_z(j, kc);
    } else {
        int bj = 0, bk = 0;
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                if (std::abs(qc[j][k]) > std::abs(qc[bj][bk])) { bj = j; bk = k; }
        out.z = extract_z(bj, bk);
    }

    out.left = {l1.val, l2.val, l3.val};
    out.right = {r4.val, r5.val};
    return out;
}

}  // namespace

U3Params u3_canonicalize(const UnitaryMatrix& a) {
    if (a.dim() != 3) throw std::invalid_argument("u3_canonicalize: need a 3x3 matrix");
    U3Params p = u3_extract(a.mat());
    Params9 pv = {p.alpha, p.beta, p.gamma, std::arg(p.z),
                  std::arg(p.left[0]), std::arg(p.left[1]), std::arg(p.left[2]),
                  std::arg(p.right[0]), std::arg(p.right[1])};
    pv = gn_polish9(compose_u3, pv, a.mat());
    U3Params out;
    out.alpha = std::clamp(pv[0], 0.0, kPi / 2.0);
    out.beta = std::clamp(pv[1], 0.0, kPi / 2.0);
    out.gamma = std::clamp(pv[2], 0.0, kPi / 2.0);
    out.z = std::polar(1.0, pv[3]);
    out.left = {std::polar(1.0, pv[4]), std::polar(1.0, pv[5]), std::polar(1.0, pv[6])};
    out.right = {std::polar(1.0, pv[7]), std::polar(1.0, pv[8])};
    return out;
}

TorusVector u3_biuni_construct(const UnitaryMatrix& a) {
    if (a.dim() != 3) throw std::invalid_argument("u3_biuni_construct: need a 3x3 matrix");
    U3Params p = u3_canonicalize(a);
    const double ca = std::cos(p.alpha), sa = std::sin(p.alpha);
    const double sg = std::sin(p.gamma), cg = std::cos(p.gamma);
    UnitaryMatrix t = t_matrix(p.alpha, p.beta, p.gamma, p.z);

    Vec vt(3);
    if (ca >= 1.0 - 1e-10) {
        // Split form: the torus solutions of the lower 2x2 block lift directly.
        Mat nb = polar_decompose(Mat(t.mat().block(1, 1, 2, 2))).unitary;
        U2Solutions sols = u2_biuni(UnitaryMatrix(nb, 1e-8));
        vt << 1.0, sols.vectors[0][0], sols.vectors[0][1];
    } else {
        // Sweep the auxiliary phase m: the 2x2 family R(beta) diag(z, e^{im})
        // R(-gamma) supplies candidate phase pairs; a candidate solves the full
        // problem when the modulus of w = -sg*e^{ix} + cg*e^{iy} matches
        // |sa / (e^{im} + ca)|.
        auto eval = [&](double mm, int j, double& fm, double& gm, Complex& wj,
                        Complex& target, Complex& d) -> bool {
            Complex eim = std::polar(1.0, mm);
            Complex xm = p.z * (std::cos(p.beta) * cg) + eim * (std::sin(p.beta) * sg);
            Complex ym = p.z * (std::cos(p.beta) * sg) - eim * (std::sin(p.beta) * cg);
            if (std::min(std::abs(xm), std::abs(ym)) < 1e-9) return false;
            Complex eiphi = unit(xm) * std::conj(unit(ym));
            d = (j == 0 ? Complex(0.0, 1.0) : Complex(0.0, -1.0)) * eiphi;
            wj = -sg + d * cg;
            fm = std::norm(wj);
            target = sa / (eim + ca);
            gm = std::norm(target);
            return true;
        };

        double best_l1 = -1.0;
        Vec best_vt(3);
        auto consider = [&](double m0, int j) {
            double f, g;
            Complex w, target, d;
            if (!eval(m0, j, f, g, w, target, d)) return;
            // Phase pair e^{ix0} (1, d); x0 aligns w with the required value.
            Complex eix0 = unit(target * std::conj(w));
            Vec cand(3);
            cand << 1.0, eix0, eix0 * d;
            double l1 = (t.mat() * cand).cwiseAbs().sum();
            if (l1 > best_l1) {
                best_l1 = l1;
                best_vt = cand;
            }
        };

        const int grid = 720;
        for (int j = 0; j < 2; ++j) {
            double prev_m = 0.0, prev_t = 0.0;
            bool have_prev = false;
            for (int i = 0; i <= grid; ++i) {
                double mm = 2.0 * kPi * double(i) / double(grid);
                double f, g;
                Complex w, target, d;
                if (!eval(mm, j, f, g, w, target, d)) { have_prev = false; continue; }
                double tv = f - g;
                if (have_prev && prev_t * tv <= 0.0) {
                    double lo = prev_m, hi = mm, tlo = prev_t;
                    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
                        double mid = 0.5 * (lo + hi);
                        double fmid, gmid;
                        Complex wm, tm, dm;
                        if (!eval(mid, j, fmid, gmid, wm, tm, dm)) break;
                        double tmid = fmid - gmid;
                        if (tlo * tmid <= 0.0) hi = mid; else { lo = mid; tlo = tmid; }
                    }
                    consider(0.5 * (lo + hi), j);
                }
                prev_m = mm;
                prev_t = tv;
                have_prev = true;
            }
        }
        if (best_l1 < 2.999) {
            // No clean bracketed crossing (tangential or skipped samples):
            // dense argmin of |f - g| as a fallback.
            double best_gap = 1e300, best_m = 0.0;
            int best_j = 0;
            for (int i = 0; i < 20000; ++i) {
                double mm = 2.0 * kPi * double(i) / 20000.0;
                for (int j = 0; j < 2; ++j) {
                    double f, g;
                    Complex w, target, d;
                    if (!eval(mm, j, f, g, w, target, d)) continue;
                    if (std::abs(f - g) < best_gap) {
                        best_gap = std::abs(f - g);
                        best_m = mm;
                        best_j = j;
                    }
                }
            }
            consider(best_m, best_j);
        }
        vt = best_vt;
    }

    if (auto polished = refine(t, vt, 1e-13)) vt = polished->data();
    // Map back through the right diagonal: A * conj(D_r) u = D_l T u.
    Vec v(3);
    v << vt[0], std::conj(p.right[0]) * vt[1], std::conj(p.right[1]) * vt[2];
    v /= unit(v[0]);
    if (auto polished = refine(a, v, 1e-13)) v = polished->data();
    return TorusVector(sign1_map(v), 1e-9);
}

// --- Euler-type factorizations ------------------------------------------------

Mat x_rotation(double phi) {
    Mat m = Mat::Identity(3, 3);
    m(1, 1) = std::cos(phi);
    m(1, 2) = -std::sin(phi);
    m(2, 1) = std::sin(phi);
    m(2, 2) = std::cos(phi);
    return m;
}

Mat z_rotation(double phi) {
    Mat m = Mat::Identity(3, 3);
    m(0, 0) = std::cos(phi);
    m(0, 1) = -std::sin(phi);
    m(1, 0) = std::sin(phi);
    m(1, 1) = std::cos(phi);
    return m;
}

Mat y_twist(double phi, Complex z) {
    Mat m = Mat::Zero(3, 3);
    m(0, 0) = std::cos(phi);
    m(0, 2) = -std::sin(phi);
    m(1, 1) = z;
    m(2, 0) = std::sin(phi);
    m(2, 2) = std::cos(phi);
    return m;
}

UnitaryMatrix euler_compose(const EulerFactors& f) {
    Mat g1 = f.z_variant ? z_rotation(f.beta) : x_rotation(f.beta);
    Mat core = g1 * y_twist(f.alpha, f.z) * x_rotation(f.gamma);
    Mat out(3, 3);
    const Complex rr[3] = {Complex(1.0), f.right[0], f.right[1]};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out(i, j) = f.left[i] * core(i, j) * rr[j];
    return UnitaryMatrix(std::move(out), 1e-8);
}

namespace {

Mat compose_euler_z(const Params9& p) {
    Mat core = z_rotation(p[1]) * y_twist(p[0], std::polar(1.0, p[3])) * x_rotation(p[2]);
    Mat out(3, 3);
    const Complex l[3] = {std::polar(1.0, p[4]), std::polar(1.0, p[5]),
                          std::polar(1.0, p[6])};
    const Complex rr[3] = {Complex(1.0), std::polar(1.0, p[7]), std::polar(1.0, p[8])};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out(i, j) = l[i] * core(i, j) * rr[j];
    return out;
}

EulerFactors euler_extract_z(const Mat& m) {
    // Core pattern Z_b Y^z_a X_g:
    //   [ cb ca   -sb z cg - cb sa sg    sb z sg - cb sa cg ]
    //   [ sb ca    cb z cg - sb sa sg   -cb z sg - sb sa cg ]
    //   [ sa       ca sg                 ca cg              ]
    EulerFactors out;
    out.z_variant = true;
    const double sa = std::clamp(std::abs(m(2, 0)), 0.0, 1.0);
    out.alpha = std::asin(sa);
    const double ca = std::cos(out.alpha);
    out.beta = std::atan2(std::abs(m(1, 0)), std::abs(m(0, 0)));
    out.gamma = std::atan2(std::abs(m(2, 1)), std::abs(m(2, 2)));
    const double sb = std::sin(out.beta), cb = std::cos(out.beta);
    const double sg = std::sin(out.gamma), cg = std::cos(out.gamma);

    MaybePhase m1, m2, m3, n4, n5;
    if (sa > kBranchTol) {
        m3.val = unit(m(2, 0));
        m3.set = true;
    } else if (ca * cg > kBranchTol) {
        n5.val = 1.0; n5.set = true;
        m3.val = unit(m(2, 2));
        m3.set = true;
    } else {
        n4.val = 1.0; n4.set = true;
        m3.val = unit(m(2, 1));
        m3.set = true;
    }
    if (!n4.set && ca * sg > kBranchTol) {
        n4.val = unit(std::conj(m3.val) * m(2, 1));
        n4.set = true;
    }
    if (!n5.set && ca * cg > kBranchTol) {
        n5.val = unit(std::conj(m3.val) * m(2, 2));
        n5.set = true;
    }
    if (cb * ca > kBranchTol) { m1.val = unit(m(0, 0)); m1.set = true; }
    if (sb * ca > kBranchTol) { m2.val = unit(m(1, 0)); m2.set = true; }

    // z-entries: rows 1..2, cols 2..3, entry = p + z q.
    double pc[2][2], qc[2][2];
    pc[0][0] = -cb * sa * sg;  qc[0][0] = -sb * cg;
    pc[0][1] = -cb * sa * cg;  qc[0][1] = sb * sg;
    pc[1][0] = -sb * sa * sg;  qc[1][0] = cb * cg;
    pc[1][1] = -sb * sa * cg;  qc[1][1] = -cb * sg;
    MaybePhase* rows[2] = {&m1, &m2};
    MaybePhase* cols[2] = {&n4, &n5};
    auto extract_z = [&](int j, int k) -> Complex {
        if (std::abs(qc[j][k]) < 1e-12) return Complex(1.0, 0.0);
        Complex t = std::conj(rows[j]->val * cols[k]->val) * m(j, 1 + k);
        return unit((t - pc[j][k]) / qc[j][k]);
    };
    int jr = !m1.set ? 0 : (!m2.set ? 1 : -1);
    int kc = !n4.set ? 0 : (!n5.set ? 1 : -1);
    if (jr >= 0 && kc >= 0) {
        rows[jr]->set = cols[kc]->set = true;
        out.z = extract_z(jr, kc);
    } else if (jr >= 0) {
        rows[jr]->set = true;
        int k = std::abs(qc[jr][0]) >= std::abs(qc[jr][1]) ? 0 : 1;
        out.z = extract_z(jr, k);
    } else if (kc >= 0) {
        cols[kc]->set = true;
        int j = std::abs(qc[0][kc]) >= std::abs(qc[1][kc]) ? 0 : 1;
        out.z = extract_z(j, kc);
    } else {
        int bj = 0, bk = 0;
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                if (std::abs(qc[j][k]) > std::abs(qc[bj][bk])) { bj = j; bk = k; }
        out.z = extract_z(bj, bk);
    }
    out.left = {m1.val, m2.val, m3.val};
    out.right = {n4.val, n5.val};
    return out;
}

}  // namespace

EulerFactors euler_factor(const UnitaryMatrix& a, bool z_variant) {
    if (a.dim() != 3) throw std::invalid_argument("euler_factor: need a 3x3 matrix");
    if (!z_variant) {
        // T(a,b,g,z) = X_b Y^z_a X_g diag(1,1,-1), so the canonical form maps
        // directly with the last right phase negated.
        U3Params p = u3_canonicalize(a);
        EulerFactors f;
        f.z_variant = false;
        f.alpha = p.alpha;
        f.beta = p.beta;
        f.gamma = p.gamma;
        f.z = p.z;
        f.left = p.left;
        f.right = {p.right[0], -p.right[1]};
        return f;
    }
    EulerFactors f = euler_extract_z(a.mat());
    Params9 pv = {f.alpha, f.beta, f.gamma, std::arg(f.z),
                  std::arg(f.left[0]), std::arg(f.left[1]), std::arg(f.left[2]),
                  std::arg(f.right[0]), std::arg(f.right[1])};
    pv = gn_polish9(compose_euler_z, pv, a.mat());
    f.alpha = std::clamp(pv[0], 0.0, kPi / 2.0);
    f.beta = std::clamp(pv[1], 0.0, kPi / 2.0);
    f.gamma = std::clamp(pv[2], 0.0, kPi / 2.0);
    f.z = std::polar(1.0, pv[3]);
    f.left = {std::polar(1.0, pv[4]), std::polar(1.0, pv[5]), std::polar(1.0, pv[6])};
    f.right = {std::polar(1.0, pv[7]), std::polar(1.0, pv[8])};
    return f;
}

// --- 2n x 2n -------------------------------------------------------------------

BlockDecomposition block2n_decompose(const UnitaryMatrix& u) {
    const Eigen::Index dim = u.dim();
    if (dim % 2 != 0)
        throw std::invalid_argument("block2n_decompose: dimension must be even");
    const Eigen::Index n = dim / 2;
    const Complex i1(0.0, 1.0);
    Mat x = u.mat().topLeftCorner(n, n);
    Mat y = u.mat().topRightCorner(n, n);
    PolarFactors px = polar_decompose(x);
    PolarFactors py = polar_decompose(y);

    BlockDecomposition d;
    Mat cstar = i1 * py.unitary.adjoint() * px.unitary;
    d.c = cstar.adjoint();
    d.a = (px.psd + i1 * py.psd) * px.unitary;
    d.b = u.mat().bottomLeftCorner(n, n) + u.mat().bottomRightCorner(n, n) * cstar;

    Mat right = Mat::Identity(dim, dim);
    right.bottomRightCorner(n, n) = cstar;
    Mat left = Mat::Zero(dim, dim);
    left.topLeftCorner(n, n) = d.a.adjoint();
    left.bottomRightCorner(n, n) = d.b.adjoint();
    Mat v = left * u.mat() * right;

    Mat f = Mat::Zero(dim, dim);
    const double s = 1.0 / std::sqrt(2.0);
    f.topLeftCorner(n, n) = s * Mat::Identity(n, n);
    f.topRightCorner(n, n) = s * Mat::Identity(n, n);
    f.bottomLeftCorner(n, n) = s * Mat::Identity(n, n);
    f.bottomRightCorner(n, n) = -s * Mat::Identity(n, n);
    Mat w = f * v * f;
    d.z = w.bottomRightCorner(n, n);
    return d;
}

UnitaryMatrix block2n_synthesize(const BlockDecomposition& d) {
    const Eigen::Index n = d.a.rows();
    if (d.a.cols() != n || d.b.rows() != n || d.b.cols() != n ||
        d.c.rows() != n || d.c.cols() != n || d.z.rows() != n || d.z.cols() != n)
        throw std::invalid_argument("block2n_synthesize: block size mismatch");
    const Eigen::Index dim = 2 * n;
    Mat mid(dim, dim);
    Mat ipz = Mat::Identity(n, n) + d.z;
    Mat imz = Mat::Identity(n, n) - d.z;
    mid.topLeftCorner(n, n) = ipz;
    mid.topRightCorner(n, n) = imz;
    mid.bottomLeftCorner(n, n) = imz;
    mid.bottomRightCorner(n, n) = ipz;

    Mat out = Mat::Zero(dim, dim);
    out.topLeftCorner(n, n) = d.a;
    out.bottomRightCorner(n, n) = d.b;
    out = 0.5 * out * mid;
    out.rightCols(n) = out.rightCols(n) * d.c;
    return UnitaryMatrix(std::move(out), 1e-8);
}

UnitaryMatrix u4_from_phases(const std::array<Complex, 4>& a,
                             const std::array<Complex, 4>& b,
                             const std::array<Complex, 4>& c,
                             const std::array<Complex, 4>& z) {
    BlockDecomposition d;
    d.a = u2_from_phases(a[1], a[2], a[3], a[0]).mat();
    d.b = u2_from_phases(b[1], b[2], b[3], b[0]).mat();
    d.c = u2_from_phases(c[1], c[2], c[3], c[0]).mat();
    d.z = u2_from_phases(z[1], z[2], z[3], z[0]).mat();
    return block2n_synthesize(d);
}

Vec continuum_family(const UnitaryMatrix& a, const Vec& u, const Vec& w, Complex zeta) {
    const Eigen::Index n = a.dim();
    if (u.size() != n || w.size() != n)
        throw std::invalid_argument("continuum_family: dimension mismatch");
    zeta = phase_checked(zeta, "continuum_family");
    auto check_pair = [&](const Vec& p, const Vec& q, const char* what) {
        for (Eigen::Index k = 0; k < n; ++k) {
            double mp = std::abs(p[k]), mq = std::abs(q[k]);
            bool p_on = std::abs(mp - 1.0) <= 1e-9, p_off = mp <= 1e-9;
            bool q_on = std::abs(mq - 1.0) <= 1e-9, q_off = mq <= 1e-9;
            if (!((p_on && q_off) || (p_off && q_on)))
                throw std::invalid_argument(
                    std::string("continuum_family: ") + what +
                    " are not support-complementary unimodular");
        }
    };
    check_pair(u, w, "u, w");
    Vec au = a.mat() * u, aw = a.mat() * w;
    check_pair(au, aw, "Au, Aw");
    return u + zeta * w;
}

}  // namespace biuni
