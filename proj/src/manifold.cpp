#include "biuni/manifold.hpp"

#include <omp.h>

#include <cmath>
#include <sstream>

#include "biuni/linalg.hpp"

namespace biuni {

int im_rank(const Mat& s, double rel_tol) {
    return real_rank(s.imag(), rel_tol);
}

int jacobian_rank(const Mat& s, double rel_tol) {
    const int n = int(s.rows());
    Vec ones = Vec::Ones(n);
    if (((s * ones) - ones).cwiseAbs().maxCoeff() > 1e-8)
        throw std::invalid_argument("jacobian_rank: S must fix the all-ones vector");
    return (n - 1) * (n - 1) + n + im_rank(s, rel_tol);
}

Mat full_rank_witness(int n) {
    if (n < 2) throw std::invalid_argument("full_rank_witness: n must be >= 2");
    Mat p = Mat::Zero(n, n);  // cyclic shift
    for (int k = 0; k < n; ++k) p((k + 1) % n, k) = 1.0;
    Mat j = Mat::Constant(n, n, Complex(1.0 / double(n)));
    // i * P on the complement of the all-ones vector, identity along it.
    return Complex(0.0, 1.0) * (p * (Mat::Identity(n, n) - j)) + j;
}

int phasing_dim(const UnitaryMatrix& a, double rel_tol) {
    const int n = int(a.dim());
    Eigen::MatrixXd map(2 * n * n, 2 * n - 1);
    int col = 0;
    auto fill = [&](const Mat& d, bool left) {
        Mat img = left ? Mat(d * a.mat()) : Mat(a.mat() * d);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                map(2 * (n * i + j), col) = img(i, j).real();
                map(2 * (n * i + j) + 1, col) = img(i, j).imag();
            }
        ++col;
    };
    for (int k = 0; k < n; ++k) {
        Mat d = Mat::Zero(n, n);
        d(k, k) = Complex(0.0, 1.0);
        fill(d, true);
    }
    for (int k = 1; k < n; ++k) {
        Mat d = Mat::Zero(n, n);
        d(k, k) = Complex(0.0, 1.0);
        fill(d, false);
    }
    return real_rank(map, rel_tol);
}

RegionGrid region_grid(const UnitaryMatrix& a, int resolution) {
    if (a.dim() != 3) throw std::invalid_argument("region_grid: need a 3x3 matrix");
    if (resolution < 2) throw std::invalid_argument("region_grid: resolution too small");
    RegionGrid g;
    g.resolution = resolution;
    const int side = resolution + 1;
    for (auto& r : g.r) r.assign(std::size_t(side) * side, 0);
    bool covered = true;
    const Mat& m = a.mat();
#pragma omp parallel for schedule(static) reduction(&& : covered)
    for (int i = 0; i < side; ++i) {
        double x = -kPi + 2.0 * kPi * double(i) / double(resolution);
        for (int j = 0; j < side; ++j) {
            double y = -kPi + 2.0 * kPi * double(j) / double(resolution);
            Vec u(3);
            u << 1.0, std::polar(1.0, x), std::polar(1.0, y);
            Vec au = m * u;
            bool any = false;
            for (int k = 0; k < 3; ++k) {
                bool in = std::abs(au[k]) >= 1.0 - 1e-12;
                g.r[k][std::size_t(i) * side + j] = in ? 1 : 0;
                any = any || in;
            }
            covered = covered && any;
        }
    }
    g.covered = covered;
    return g;
}

std::vector<uint8_t> est_region(double s, double t, int resolution) {
    const int side = resolution + 1;
    std::vector<uint8_t> out(std::size_t(side) * side, 0);
    for (int i = 0; i < side; ++i) {
        double x = -kPi + 2.0 * kPi * double(i) / double(resolution);
        for (int j = 0; j < side; ++j) {
            double y = -kPi + 2.0 * kPi * double(j) / double(resolution);
            out[std::size_t(i) * side + j] =
                (s * std::cos(x) + t * std::cos(y) + std::cos(x - y) >= 0.0) ? 1 : 0;
        }
    }
    return out;
}

int triple_boundary_clusters(const RegionGrid& g) {
    const int side = g.resolution + 1;
    const int cells = g.resolution;
    std::vector<uint8_t> mark(std::size_t(cells) * cells, 0);
    auto at = [&](const std::vector<uint8_t>& r, int i, int j) {
        return r[std::size_t(i) * side + j];
    };
    for (int i = 0; i < cells; ++i)
        for (int j = 0; j < cells; ++j) {
            bool triple = true;
            for (int k = 0; k < 3 && triple; ++k) {
                uint8_t c00 = at(g.r[k], i, j), c01 = at(g.r[k], i, j + 1);
                uint8_t c10 = at(g.r[k], i + 1, j), c11 = at(g.r[k], i + 1, j + 1);
                // region k's boundary crosses the cell iff its corner values differ
                triple = !(c00 == c01 && c00 == c10 && c00 == c11);
            }
            if (triple) mark[std::size_t(i) * cells + j] = 1;
        }
    // count 8-connected components of marked cells
    int clusters = 0;
    std::vector<std::pair<int, int>> stack;
    for (int i = 0; i < cells; ++i)
        for (int j = 0; j < cells; ++j) {
            if (mark[std::size_t(i) * cells + j] != 1) continue;
            ++clusters;
            stack.push_back({i, j});
            mark[std::size_t(i) * cells + j] = 2;
            while (!stack.empty()) {
                auto [ci, cj] = stack.back();
                stack.pop_back();
                for (int di = -1; di <= 1; ++di)
                    for (int dj = -1; dj <= 1; ++dj) {
                        int ni = ci + di, nj = cj + dj;
                        if (ni < 0 || nj < 0 || ni >= cells || nj >= cells) continue;
                        if (mark[std::size_t(ni) * cells + nj] == 1) {
                            mark[std::size_t(ni) * cells + nj] = 2;
                            stack.push_back({ni, nj});
                        }
                    }
            }
        }
    return clusters;
}

std::string region_grid_csv(const RegionGrid& g) {
    std::ostringstream out;
    out << "x,y,r1,r2,r3\n";
    const int side = g.resolution + 1;
    for (int i = 0; i < side; ++i) {
        double x = -kPi + 2.0 * kPi * double(i) / double(g.resolution);
        for (int j = 0; j < side; ++j) {
            double y = -kPi + 2.0 * kPi * double(j) / double(g.resolution);
            out << x << ',' << y << ',' << int(g.r[0][std::size_t(i) * side + j]) << ','
                << int(g.r[1][std::size_t(i) * side + j]) << ','
                << int(g.r[2][std::size_t(i) * side + j]) << '\n';
        }
    }
    return out.str();
}

std::string region_pgm(const std::vector<uint8_t>& r, int resolution) {
    const int side = resolution + 1;
    if (r.size() != std::size_t(side) * side)
        throw std::invalid_argument("region_pgm: size mismatch");
    std::ostringstream out;
    out << "P5\n" << side << " " << side << "\n255\n";
    for (auto v : r) out.put(v ? char(255) : char(0));
    return out.str();
}

}  // namespace biuni
