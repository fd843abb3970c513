#include <CLI11.hpp>
#include <omp.h>

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "biuni/factorizer.hpp"
#include "biuni/json_io.hpp"
#include "biuni/linalg.hpp"
#include "biuni/manifold.hpp"
#include "biuni/orbits.hpp"
#include "biuni/projector.hpp"

namespace {

using namespace biuni;

constexpr int kExitOk = 0;
constexpr int kExitIoError = 1;
constexpr int kExitNoConvergence = 2;

struct MatrixSource {
    std::string path;
    int fourier_n = 0;
    int haar_n = 0;
    std::uint64_t haar_seed = 1;

    UnitaryMatrix get() const {
        if (!path.empty()) return UnitaryMatrix(load_matrix_file(path), 1e-8);
        if (fourier_n > 0) return fourier_matrix(fourier_n);
        if (haar_n > 0) return haar_random_unitary(haar_n, haar_seed);
        throw std::invalid_argument("no input matrix given (use --matrix, --fourier or --haar)");
    }
    void attach(CLI::App* cmd) {
        cmd->add_option("--matrix", path, "JSON file with the input unitary");
        cmd->add_option("--fourier", fourier_n, "use the n x n Fourier matrix");
        cmd->add_option("--haar", haar_n, "use a Haar random unitary of this size");
        cmd->add_option("--haar-seed", haar_seed, "seed for --haar");
    }
};

json search_result_json(const SearchResult& r) {
    return json{{"converged", r.converged},
                {"residual", r.residual},
                {"iterations", r.iterations},
                {"starts_used", r.starts_used},
                {"vector", vector_to_json(r.vector)}};
}

json phase_table_json(const PhaseTable& t) {
    json phases = json::array();
    for (int j = 1; j <= t.n; ++j)
        for (int k = 1; k <= t.n; ++k)
            phases.push_back(json{{"j", j},
                                  {"k", k},
                                  {"re", t.a(j - 1, k - 1).real()},
                                  {"im", t.a(j - 1, k - 1).imag()}});
    return json{{"n", t.n}, {"phases", phases}};
}

double reconstruction_error(const Mat& a, const Mat& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

TorusVector find_biuni(const UnitaryMatrix& a, const SearchConfig& cfg) {
    const int n = int(a.dim());
    if (n == 1) {
        Vec v(1);
        v << 1.0;
        return TorusVector(v);
    }
    if (n == 2) return TorusVector(u2_biuni(a).vectors[0], 1e-9);
    if (n == 3) return u3_biuni_construct(a);
    SearchResult sr = multi_start_search(a, cfg);
    if (!sr.converged) throw std::runtime_error("search did not converge");
    auto polished = refine(a, sr.vector);
    return polished ? *polished : TorusVector(sign1_map(sr.vector), 1e-6);
}

json complex_json(Complex z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"biunimodular vector laboratory"};
    app.require_subcommand(1);

    if (const char* workers = std::getenv("BIUNI_WORKERS")) {
        int w = std::atoi(workers);
        if (w > 0) omp_set_num_threads(w);
    }

    std::uint64_t seed = 0;
    bool quiet = false;
    app.add_option("--seed", seed, "RNG seed");
    app.add_flag("--quiet", quiet, "suppress diagnostics on stderr");

    // search ------------------------------------------------------------
    auto* search = app.add_subcommand("search", "alternating-projection search");
    MatrixSource search_src;
    search_src.attach(search);
    double s_delta = 1e-10;
    int s_iters = 10000, s_starts = 1000;
    std::string s_start = "random";
    bool s_refine = false;
    search->add_option("--delta", s_delta, "convergence threshold");
    search->add_option("--iters", s_iters, "max iterations per start");
    search->add_option("--starts", s_starts, "max starts");
    search->add_option("--start", s_start, "start vector: random | ones");
    search->add_flag("--refine", s_refine, "polish the result to machine precision");

    // bench --------------------------------------------------------------
    auto* bench = app.add_subcommand("bench", "success statistics over Haar matrices");
    std::vector<int> b_dims{3, 5, 10, 25};
    int b_matrices = 100;
    double b_delta = 1e-10;
    int b_iters = 10000, b_starts = 1000;
    std::string b_csv;
    bench->add_option("--dims", b_dims, "matrix sizes");
    bench->add_option("--matrices", b_matrices, "Haar samples per size");
    bench->add_option("--delta", b_delta, "convergence threshold");
    bench->add_option("--iters", b_iters, "max iterations per start");
    bench->add_option("--starts", b_starts, "max starts per matrix");
    bench->add_option("--csv", b_csv, "also write a CSV report to this path");

    // census ---------------------------------------------------------------
    auto* cens = app.add_subcommand("census", "orbit census for the Fourier matrix");
    int c_n = 7;
    double c_delta = 1e-7, c_tau = 1e-5, c_match = 1e-6;
    int c_starts = 2000, c_iters = 30000;
    std::string c_csv;
    cens->add_option("--n", c_n, "Fourier matrix size");
    cens->add_option("--delta", c_delta, "search convergence threshold");
    cens->add_option("--tau", c_tau, "orbit separation threshold");
    cens->add_option("--match-tol", c_match, "orbit member matching tolerance");
    cens->add_option("--starts", c_starts, "total searches");
    cens->add_option("--iters", c_iters, "max iterations per search");
    cens->add_option("--csv", c_csv, "also write representatives as CSV");

    // factor -----------------------------------------------------------------
    auto* factor = app.add_subcommand("factor", "unitary factorizations");
    MatrixSource f_src;
    f_src.attach(factor);
    std::string f_mode = "lar";
    double f_delta = 1e-10;
    int f_iters = 10000, f_starts = 1000;
    factor->add_option("--mode", f_mode, "lar | recursive | block2n | u3 | u4");
    factor->add_option("--delta", f_delta, "search threshold for inner searches");
    factor->add_option("--iters", f_iters, "max iterations for inner searches");
    factor->add_option("--starts", f_starts, "max starts for inner searches");

    // regions -------------------------------------------------------------------
    auto* regions = app.add_subcommand("regions", "torus region pictures for 3x3 unitaries");
    MatrixSource r_src;
    r_src.attach(regions);
    int r_res = 512;
    std::string r_out;
    std::vector<double> r_est;
    regions->add_option("--resolution", r_res, "grid resolution");
    regions->add_option("--out", r_out, "output prefix for CSV/PGM files");
    regions->add_option("--est", r_est, "preset: two reals s t for the cosine inequality region")
        ->expected(2);

    // diag -------------------------------------------------------------------------
    auto* diag = app.add_subcommand("diag", "manifold diagnostics");
    MatrixSource d_src;
    d_src.attach(diag);
    int d_witness = 0;
    bool d_imrank = false;
    diag->add_option("--witness", d_witness, "report the full-rank witness for this size");
    diag->add_flag("--im-rank", d_imrank, "treat the input as S fixing 1 and report ranks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*search) {
            UnitaryMatrix a = search_src.get();
            SearchConfig cfg{s_delta, s_iters, s_starts, seed, false};
            SearchResult res;
            if (s_start == "ones") {
                res = run_from(a, Vec::Ones(a.dim()), cfg);
                res.starts_used = 1;
            } else {
                res = multi_start_search(a, cfg);
            }
            if (res.converged && s_refine) {
                if (auto p = refine(a, res.vector)) {
                    res.vector = p->data();
                    res.residual = double(a.dim()) - inf_to_1_value(a, res.vector);
                }
            }
            json out = search_result_json(res);
            if (res.converged) {
                auto cert = certify_near(a, TorusVector(sign1_map(res.vector), 1e-6), s_delta);
                out["certificate"] = json{{"two_delta_bound", cert.two_delta_bound},
                                          {"min_abs_av", cert.min_abs_av},
                                          {"min_abs_astar_sign", cert.min_abs_astar_sign},
                                          {"step_gap_bound", cert.step_gap_bound},
                                          {"step_diff", cert.step_diff},
                                          {"valid", cert.valid}};
            }
            std::cout << out.dump(2) << "\n";
            if (!res.converged) {
                if (!quiet) std::cerr << "search: no convergence within budget\n";
                return kExitNoConvergence;
            }
            return kExitOk;
        }

        if (*bench) {
            json dims_out = json::array();
            std::string csv = "dim,matrices,converged,avg_starts,avg_iterations\n";
            bool all_ok = true;
            for (int dim : b_dims) {
                long long starts_sum = 0, iters_sum = 0;
                int ok = 0;
                SearchConfig cfg{b_delta, b_iters, b_starts, 0, false};
#pragma omp parallel for schedule(dynamic) reduction(+ : starts_sum, iters_sum, ok)
                for (int i = 0; i < b_matrices; ++i) {
                    UnitaryMatrix a = haar_random_unitary(
                        dim, mix_seed(seed, (std::uint64_t(dim) << 32) + std::uint64_t(i)));
                    SearchConfig one = cfg;
                    one.seed = mix_seed(seed ^ 0x5bd1e995, (std::uint64_t(dim) << 32) + std::uint64_t(i));
                    SearchResult r = multi_start_search_serial(a, one);
                    if (r.converged) {
                        ++ok;
                        starts_sum += r.starts_used;
                        iters_sum += r.iterations;
                    }
                }
                double avg_starts = ok ? double(starts_sum) / ok : 0.0;
                double avg_iters = ok ? double(iters_sum) / ok : 0.0;
                dims_out.push_back(json{{"dim", dim},
                                        {"matrices", b_matrices},
                                        {"converged", ok},
                                        {"avg_starts", avg_starts},
                                        {"avg_iterations", avg_iters}});
                csv += std::to_string(dim) + "," + std::to_string(b_matrices) + "," +
                       std::to_string(ok) + "," + std::to_string(avg_starts) + "," +
                       std::to_string(avg_iters) + "\n";
                all_ok = all_ok && (ok == b_matrices);
                if (!quiet)
                    std::cerr << "bench: dim " << dim << " converged " << ok << "/"
                              << b_matrices << "\n";
            }
            if (!b_csv.empty()) {
                std::ofstream out(b_csv);
                out << csv;
            }
            std::cout << json{{"delta", b_delta}, {"per_dim", dims_out}}.dump(2) << "\n";
            return all_ok ? kExitOk : kExitNoConvergence;
        }

        if (*cens) {
            SearchConfig cfg{c_delta, c_iters, c_starts, seed, false};
            Census c = census(c_n, cfg, c_tau, c_match);
            json orbits = json::array();
            std::string csv = "cardinality,entry,re,im\n";
            for (const auto& o : c.orbits) {
                orbits.push_back(json{{"cardinality", o.cardinality},
                                      {"representative", vector_to_json(o.representative)}});
                for (Eigen::Index k = 0; k < o.representative.size(); ++k)
                    csv += std::to_string(o.cardinality) + "," + std::to_string(k) + "," +
                           std::to_string(o.representative[k].real()) + "," +
                           std::to_string(o.representative[k].imag()) + "\n";
            }
            if (!c_csv.empty()) {
                std::ofstream out(c_csv);
                out << csv;
            }
            std::cout << json{{"n", c.n},
                              {"delta", c.delta},
                              {"tau", c.tau},
                              {"orbits", orbits},
                              {"total", c.total}}
                             .dump(2)
                      << "\n";
            return kExitOk;
        }

        if (*factor) {
            UnitaryMatrix a = f_src.get();
            SearchConfig cfg{f_delta, f_iters, f_starts, seed, false};
            json out;
            double err = 0.0;
            if (f_mode == "lar") {
                TorusVector v = find_biuni(a, cfg);
                LarDecomposition lar = lar_decompose(a, v);
                Mat rec = lar.left.asDiagonal() * lar.stochastic_like *
                          Mat(lar.right.asDiagonal());
                err = reconstruction_error(a.mat(), rec);
                out = json{{"mode", "lar"},
                           {"left", vector_to_json(lar.left)},
                           {"core", matrix_to_json(lar.stochastic_like)},
                           {"right", vector_to_json(lar.right)}};
            } else if (f_mode == "recursive") {
                PhaseTable t = recursive_analyze(a, cfg);
                err = reconstruction_error(a.mat(), synthesize(t).mat());
                out = json{{"mode", "recursive"}, {"table", phase_table_json(t)}};
            } else if (f_mode == "block2n") {
                BlockDecomposition d = block2n_decompose(a);
                err = reconstruction_error(a.mat(), block2n_synthesize(d).mat());
                out = json{{"mode", "block2n"},
                           {"a", matrix_to_json(d.a)},
                           {"b", matrix_to_json(d.b)},
                           {"c", matrix_to_json(d.c)},
                           {"z", matrix_to_json(d.z)}};
            } else if (f_mode == "u3") {
                U3Params p = u3_canonicalize(a);
                err = reconstruction_error(a.mat(), u3_from_params(p).mat());
                out = json{{"mode", "u3"},
                           {"alpha", p.alpha},
                           {"beta", p.beta},
                           {"gamma", p.gamma},
                           {"z", complex_json(p.z)},
                           {"left", json::array({complex_json(p.left[0]),
                                                 complex_json(p.left[1]),
                                                 complex_json(p.left[2])})},
                           {"right", json::array({complex_json(p.right[0]),
                                                  complex_json(p.right[1])})}};
            } else if (f_mode == "u4") {
                if (a.dim() != 4) throw std::invalid_argument("u4 mode needs a 4x4 matrix");
                BlockDecomposition d = block2n_decompose(a);
                auto pa = u2_to_phases(UnitaryMatrix(d.a, 1e-8));
                auto pb = u2_to_phases(UnitaryMatrix(d.b, 1e-8));
                auto pc = u2_to_phases(UnitaryMatrix(d.c, 1e-8));
                auto pz = u2_to_phases(UnitaryMatrix(polar_decompose(d.z).unitary, 1e-8));
                std::array<Complex, 4> qa{pa[3], pa[0], pa[1], pa[2]};
                std::array<Complex, 4> qb{pb[3], pb[0], pb[1], pb[2]};
                std::array<Complex, 4> qc{pc[3], pc[0], pc[1], pc[2]};
                std::array<Complex, 4> qz{pz[3], pz[0], pz[1], pz[2]};
                err = reconstruction_error(a.mat(),
                                           u4_from_phases(qa, qb, qc, qz).mat());
                auto dump4 = [](const std::array<Complex, 4>& q) {
                    return json::array({complex_json(q[0]), complex_json(q[1]),
                                        complex_json(q[2]), complex_json(q[3])});
                };
                out = json{{"mode", "u4"},
                           {"a", dump4(qa)},
                           {"b", dump4(qb)},
                           {"c", dump4(qc)},
                           {"z", dump4(qz)}};
            } else {
                throw std::invalid_argument("unknown factor mode: " + f_mode);
            }
            out["reconstruction_error"] = err;
            std::cout << out.dump(2) << "\n";
            return err <= 1e-8 ? kExitOk : kExitNoConvergence;
        }

        if (*regions) {
            if (!r_est.empty()) {
                auto grid = est_region(r_est[0], r_est[1], r_res);
                if (!r_out.empty()) {
                    std::ofstream pgm(r_out + "_est.pgm", std::ios::binary);
                    pgm << region_pgm(grid, r_res);
                }
                std::size_t inside = 0;
                for (auto v : grid) inside += v;
                std::cout << json{{"resolution", r_res},
                                  {"inside_fraction",
                                   double(inside) / double(grid.size())}}
                                 .dump(2)
                          << "\n";
                return kExitOk;
            }
            UnitaryMatrix a = r_src.get();
            RegionGrid g = region_grid(a, r_res);
            if (!r_out.empty()) {
                std::ofstream csv(r_out + ".csv");
                csv << region_grid_csv(g);
                for (int k = 0; k < 3; ++k) {
                    std::ofstream pgm(r_out + "_r" + std::to_string(k + 1) + ".pgm",
                                      std::ios::binary);
                    pgm << region_pgm(g.r[k], r_res);
                }
            }
            std::cout << json{{"resolution", g.resolution},
                              {"covered", g.covered},
                              {"triple_boundary_clusters", triple_boundary_clusters(g)}}
                             .dump(2)
                      << "\n";
            return kExitOk;
        }

        if (*diag) {
            if (d_witness > 0) {
                Mat s = full_rank_witness(d_witness);
                std::cout << json{{"n", d_witness},
                                  {"im_rank", im_rank(s)},
                                  {"jacobian_rank", jacobian_rank(s)}}
                                 .dump(2)
                          << "\n";
                return kExitOk;
            }
            UnitaryMatrix a = d_src.get();
            const int n = int(a.dim());
            json out{{"n", n}, {"phasing_dim", phasing_dim(a)}};
            out["stabilizer_dim"] = 2 * n - 1 - phasing_dim(a);
            if (d_imrank) {
                out["im_rank"] = im_rank(a.mat());
                out["jacobian_rank"] = jacobian_rank(a.mat());
            }
            std::cout << out.dump(2) << "\n";
            return kExitOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        const std::string what = e.what();
        if (what.find("converge") != std::string::npos ||
            what.find("search failed") != std::string::npos)
            return kExitNoConvergence;
        return kExitIoError;
    }
    return kExitIoError;
}
