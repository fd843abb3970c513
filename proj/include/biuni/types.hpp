#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace biuni {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

constexpr double kPi = 3.141592653589793238462643383279502884;

// Unimodular complex number with the phase of x, or fallback when |x| is
// numerically zero.
inline Complex unit(Complex x, Complex fallback = Complex(1.0, 0.0)) {
    double m = std::abs(x);
    return m > 0.0 ? x / m : fallback;
}

class TorusVector {
public:
    explicit TorusVector(Vec v, double unimodularity_tol = 1e-12)
        : v_(std::move(v)), tol_(unimodularity_tol) {
        for (Eigen::Index k = 0; k < v_.size(); ++k) {
            if (std::abs(std::abs(v_[k]) - 1.0) > tol_)
                throw std::invalid_argument(
                    "TorusVector: entry " + std::to_string(k) +
                    " is not unimodular");
        }
    }

    const Vec& data() const { return v_; }
    Eigen::Index size() const { return v_.size(); }
    Complex operator[](Eigen::Index k) const { return v_[k]; }
    double tol() const { return tol_; }

    // Snap every entry to exact modulus one (phases preserved).
    TorusVector snapped() const {
        Vec w = v_;
        for (Eigen::Index k = 0; k < w.size(); ++k) w[k] = unit(w[k]);
        return TorusVector(w, tol_);
    }

private:
    Vec v_;
    double tol_;
};

class UnitaryMatrix {
public:
    explicit UnitaryMatrix(Mat a, double tol = 1e-10) : a_(std::move(a)) {
        if (a_.rows() != a_.cols())
            throw std::invalid_argument("UnitaryMatrix: matrix must be square");
        Mat g = a_.adjoint() * a_;
        g.diagonal().array() -= 1.0;
        residual_ = g.cwiseAbs().maxCoeff();
        if (residual_ > tol)
            throw std::invalid_argument(
                "UnitaryMatrix: A*A deviates from identity by " +
                std::to_string(residual_));
    }

    const Mat& mat() const { return a_; }
    Eigen::Index dim() const { return a_.rows(); }
    double residual() const { return residual_; }

private:
    Mat a_;
    double residual_ = 0.0;
};

struct PolarFactors {
    Mat psd;      // positive semidefinite factor S, M = S * unitary
    Mat unitary;  // unitary factor
};

}  // namespace biuni
