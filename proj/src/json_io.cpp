#include "biuni/json_io.hpp"

#include <fstream>

namespace biuni {

json matrix_to_json(const Mat& a) {
    json re = json::array(), im = json::array();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        json rre = json::array(), rim = json::array();
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            rre.push_back(a(i, j).real());
            rim.push_back(a(i, j).imag());
        }
        re.push_back(std::move(rre));
        im.push_back(std::move(rim));
    }
    return json{{"n", a.rows()}, {"m", a.cols()}, {"re", re}, {"im", im}};
}

static void check_rect(const json& part, Eigen::Index n, Eigen::Index m,
                       const char* name) {
    if (!part.is_array() || Eigen::Index(part.size()) != n)
        throw std::invalid_argument(std::string("matrix_from_json: bad row count in ") + name);
    for (const auto& row : part)
        if (!row.is_array() || Eigen::Index(row.size()) != m)
            throw std::invalid_argument(std::string("matrix_from_json: non-rectangular ") + name);
}

Mat matrix_from_json(const json& j) {
    if (!j.contains("n") || !j.contains("m") || !j.contains("re") || !j.contains("im"))
        throw std::invalid_argument("matrix_from_json: missing field (need n, m, re, im)");
    const Eigen::Index n = j.at("n").get<Eigen::Index>();
    const Eigen::Index m = j.at("m").get<Eigen::Index>();
    if (n < 1 || m < 1)
        throw std::invalid_argument("matrix_from_json: non-positive dimensions");
    check_rect(j.at("re"), n, m, "re");
    check_rect(j.at("im"), n, m, "im");
    Mat a(n, m);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index k = 0; k < m; ++k)
            a(i, k) = Complex(j.at("re")[i][k].get<double>(),
                              j.at("im")[i][k].get<double>());
    return a;
}

json vector_to_json(const Vec& v) {
    json re = json::array(), im = json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        re.push_back(v[k].real());
        im.push_back(v[k].imag());
    }
    return json{{"re", re}, {"im", im}};
}

Vec vector_from_json(const json& j) {
    if (!j.contains("re") || !j.contains("im"))
        throw std::invalid_argument("vector_from_json: missing field (need re, im)");
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    if (!re.is_array() || !im.is_array() || re.size() != im.size())
        throw std::invalid_argument("vector_from_json: re/im must be arrays of equal length");
    Vec v(re.size());
    for (std::size_t k = 0; k < re.size(); ++k)
        v[Eigen::Index(k)] = Complex(re[k].get<double>(), im[k].get<double>());
    return v;
}

Mat load_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    in >> j;
    return matrix_from_json(j);
}

void save_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
}

}  // namespace biuni
