#include <doctest.h>

#include "biuni/json_io.hpp"
#include "biuni/linalg.hpp"

using namespace biuni;

TEST_CASE("fourier matrix entries and unitarity") {
    UnitaryMatrix f2 = fourier_matrix(2);
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(f2.mat()(0, 0) - Complex(s)) < 1e-15);
    CHECK(std::abs(f2.mat()(0, 1) - Complex(s)) < 1e-15);
    CHECK(std::abs(f2.mat()(1, 0) - Complex(s)) < 1e-15);
    CHECK(std::abs(f2.mat()(1, 1) - Complex(-s)) < 1e-15);

    // row 1 of 2*F4: powers of -i
    UnitaryMatrix f4 = fourier_matrix(4);
    CHECK(std::abs(2.0 * f4.mat()(1, 1) - Complex(0.0, -1.0)) < 1e-14);
    CHECK(std::abs(2.0 * f4.mat()(1, 2) - Complex(-1.0, 0.0)) < 1e-14);
    CHECK(std::abs(2.0 * f4.mat()(1, 3) - Complex(0.0, 1.0)) < 1e-14);

    for (int n : {1, 3, 7, 16, 33}) CHECK(fourier_matrix(n).residual() < 1e-12);
    CHECK_THROWS_AS(fourier_matrix(0), std::invalid_argument);
}

TEST_CASE("haar sampling is reproducible and statistically flat") {
    UnitaryMatrix a = haar_random_unitary(6, 123);
    UnitaryMatrix b = haar_random_unitary(6, 123);
    CHECK((a.mat() - b.mat()).cwiseAbs().maxCoeff() == 0.0);
    UnitaryMatrix c = haar_random_unitary(6, 124);
    CHECK((a.mat() - c.mat()).cwiseAbs().maxCoeff() > 1e-3);

    // mean |entry|^2 over Haar samples approaches 1/n
    const int n = 8, samples = 400;
    double acc = 0.0;
    for (int i = 0; i < samples; ++i)
        acc += haar_random_unitary(n, 1000 + i).mat().cwiseAbs2().mean();
    CHECK(acc / samples == doctest::Approx(1.0 / n).epsilon(0.05));
}

TEST_CASE("polar decomposition") {
    Mat m = haar_random_unitary(5, 7).mat() * Eigen::VectorXd::LinSpaced(5, 0.5, 3.0)
                                                  .cast<Complex>()
                                                  .asDiagonal()
                                                  .toDenseMatrix() *
            haar_random_unitary(5, 8).mat();
    PolarFactors pf = polar_decompose(m);
    CHECK((pf.psd * pf.unitary - m).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((pf.unitary.adjoint() * pf.unitary - Mat::Identity(5, 5)).cwiseAbs().maxCoeff() <
          1e-12);
    CHECK((pf.psd - pf.psd.adjoint()).cwiseAbs().maxCoeff() < 1e-12);

    PolarFactors zero = polar_decompose(Mat::Zero(3, 3));
    CHECK((zero.unitary - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(zero.psd.cwiseAbs().maxCoeff() == 0.0);

    // rank-deficient: unitary factor still unitary, product reconstructs
    Mat r = Mat::Zero(2, 2);
    r(0, 0) = 2.0;
    PolarFactors pr = polar_decompose(r);
    CHECK((pr.unitary.adjoint() * pr.unitary - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() <
          1e-14);
    CHECK((pr.psd * pr.unitary - r).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("sign maps") {
    Vec v(3);
    v << Complex(3.0, 4.0), Complex(0.0, 0.0), Complex(0.0, -2.0);
    Vec s = sign_map(v);
    CHECK(std::abs(s[0] - Complex(0.6, 0.8)) < 1e-15);
    CHECK(std::abs(s[1]) == 0.0);
    CHECK(std::abs(s[2] - Complex(0.0, -1.0)) < 1e-15);
    Vec s1 = sign1_map(v);
    CHECK(std::abs(s1[1] - Complex(1.0)) == 0.0);
    CHECK(std::abs(s1[2] - s[2]) == 0.0);
}

TEST_CASE("l1 functional and product invariant") {
    UnitaryMatrix f2 = fourier_matrix(2);
    Vec ones = Vec::Ones(2);
    CHECK(inf_to_1_value(f2, ones) == doctest::Approx(std::sqrt(2.0)));
    Vec v(2);
    v << 1.0, Complex(0.0, 1.0);
    CHECK(inf_to_1_value(f2, v) == doctest::Approx(2.0));
    CHECK(std::abs(pi_value(f2, TorusVector(v))) == doctest::Approx(1.0));

    // never exceeds the dimension
    for (int i = 0; i < 20; ++i) {
        UnitaryMatrix a = haar_random_unitary(6, 40 + i);
        Vec u = random_torus_vector(6, 90 + i);
        CHECK(inf_to_1_value(a, u) <= 6.0 + 1e-9);
    }
}

TEST_CASE("block diagonal repetition") {
    Mat b(1, 2);
    b << Complex(1.0), Complex(2.0);
    Mat r = block_diag_repeat(b, 3);
    CHECK(r.rows() == 3);
    CHECK(r.cols() == 6);
    CHECK(std::abs(r(1, 2) - Complex(1.0)) == 0.0);
    CHECK(std::abs(r(1, 0)) == 0.0);
}

TEST_CASE("type invariants") {
    Vec bad(2);
    bad << 1.0, 0.5;
    CHECK_THROWS_AS(TorusVector{bad}, std::invalid_argument);
    Mat notu = Mat::Identity(2, 2) * 1.5;
    CHECK_THROWS_AS(UnitaryMatrix{notu}, std::invalid_argument);
    CHECK(UnitaryMatrix(fourier_matrix(5).mat()).residual() < 1e-12);
}

TEST_CASE("json round trips and validation") {
    Mat a = haar_random_unitary(4, 3).mat();
    Mat back = matrix_from_json(matrix_to_json(a));
    CHECK((a - back).cwiseAbs().maxCoeff() == 0.0);

    Vec v = random_torus_vector(5, 11);
    CHECK((v - vector_from_json(vector_to_json(v))).cwiseAbs().maxCoeff() == 0.0);

    json j = matrix_to_json(a);
    j["re"][2].push_back(1.0);  // ragged row
    CHECK_THROWS_AS(matrix_from_json(j), std::invalid_argument);
    json k = matrix_to_json(a);
    k.erase("im");
    CHECK_THROWS_AS(matrix_from_json(k), std::invalid_argument);
    CHECK_THROWS_AS(vector_from_json(json{{"re", {1.0}}, {"im", {1.0, 2.0}}}),
                    std::invalid_argument);
}
