#include "biuni/linalg.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <random>

namespace biuni {

UnitaryMatrix fourier_matrix(int n) {
    if (n < 1) throw std::invalid_argument("fourier_matrix: n must be >= 1");
    Mat f(n, n);
    const double scale = 1.0 / std::sqrt(double(n));
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            // reduce j*k mod n before forming the angle to keep phases exact
            long long r = (1LL * j * k) % n;
            f(j, k) = std::polar(scale, -2.0 * kPi * double(r) / double(n));
        }
    return UnitaryMatrix(std::move(f));
}

UnitaryMatrix haar_random_unitary(int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("haar_random_unitary: n must be >= 1");
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    Mat z(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            double re = nd(gen);
            double im = nd(gen);
            z(i, j) = Complex(re, im);
        }
    Eigen::HouseholderQR<Mat> qr(z);
    Mat q = qr.householderQ();
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j) q.col(j) *= unit(r(j, j));
    return UnitaryMatrix(std::move(q), 1e-9);
}

PolarFactors polar_decompose(const Mat& m) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("polar_decompose: matrix must be square");
    const Eigen::Index n = m.rows();
    if (m.cwiseAbs().maxCoeff() == 0.0)
        return {Mat::Zero(n, n), Mat::Identity(n, n)};
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat u = svd.matrixU();
    Mat v = svd.matrixV();
    PolarFactors out;
    out.psd = u * svd.singularValues().asDiagonal() * u.adjoint();
    out.unitary = u * v.adjoint();
    return out;
}

Vec sign_map(const Vec& v) {
    Vec w(v.size());
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        double m = std::abs(v[k]);
        w[k] = m > 0.0 ? v[k] / m : Complex(0.0, 0.0);
    }
    return w;
}

Vec sign1_map(const Vec& v) {
    Vec w(v.size());
    for (Eigen::Index k = 0; k < v.size(); ++k) w[k] = unit(v[k]);
    return w;
}

double inf_to_1_value(const UnitaryMatrix& a, const Vec& v) {
    if (a.dim() != v.size())
        throw std::invalid_argument("inf_to_1_value: dimension mismatch");
    return (a.mat() * v).cwiseAbs().sum();
}

Complex pi_value(const UnitaryMatrix& a, const TorusVector& v) {
    Vec av = a.mat() * v.data();
    Complex p(1.0, 0.0);
    for (Eigen::Index k = 0; k < av.size(); ++k) p *= av[k];
    return p;
}

Mat block_diag_repeat(const Mat& b, int count) {
    if (count < 1) throw std::invalid_argument("block_diag_repeat: count must be >= 1");
    const Eigen::Index r = b.rows(), c = b.cols();
    Mat out = Mat::Zero(r * count, c * count);
    for (int k = 0; k < count; ++k) out.block(k * r, k * c, r, c) = b;
    return out;
}

int real_rank(const Eigen::MatrixXd& m, double rel_tol) {
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s[0] == 0.0) return 0;
    int rank = 0;
    for (Eigen::Index k = 0; k < s.size(); ++k)
        if (s[k] > rel_tol * s[0]) ++rank;
    return rank;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

Vec random_torus_vector(int n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> ud(0.0, 2.0 * kPi);
    Vec v(n);
    for (int k = 0; k < n; ++k) v[k] = std::polar(1.0, ud(gen));
    return v;
}

}  // namespace biuni
