// End-to-end acceptance suite. Each criterion prints exactly one PASS/FAIL
// line; the process exits nonzero if any criterion fails.

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "afmp/bounds.hpp"
#include "afmp/cli.hpp"
#include "afmp/correlations.hpp"
#include "afmp/protocols.hpp"

using namespace afmp;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& what, bool ok,
            const std::string& detail) {
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << criterion << ": "
              << what << " (" << detail << ")" << std::endl;
    if (!ok) ++g_failures;
}

SpinHamiltonian random_chain(int n, CounterRng& rng, double field_scale) {
    RydbergModelSpec spec;
    spec.n_sites = n;
    spec.u0 = 1.0;
    spec.rc = 1.0;
    for (int m = 0; m < n; ++m)
        spec.fields.emplace_back(field_scale * (2.0 * rng.uniform() - 1.0),
                                 field_scale * (2.0 * rng.uniform() - 1.0),
                                 field_scale * (2.0 * rng.uniform() - 1.0));
    return build_rydberg_chain(spec);
}

CorrelationQuery random_query(int n, CounterRng& rng) {
    CorrelationQuery q;
    q.hamiltonian = random_chain(n, rng, 0.6);
    q.initial_state = QuantumState::random(n, rng);
    const int i = static_cast<int>(rng.next() % static_cast<std::uint64_t>(n));
    int j = static_cast<int>(rng.next() % static_cast<std::uint64_t>(n));
    while (j == i) j = static_cast<int>(rng.next() % static_cast<std::uint64_t>(n));
    q.o1 = PauliObservable{i, static_cast<Axis>(rng.next() % 3)};
    q.o2 = PauliObservable{j, static_cast<Axis>(rng.next() % 3)};
    q.t1 = 1.5 * rng.uniform();
    q.t2 = q.t1 + 1.5 * rng.uniform();
    return q;
}

struct CliResult {
    int exit_code = -1;
    std::string out;
};

CliResult run_cli(const std::string& args) {
    const std::string cmd = std::string(AFMP_CLI_PATH) + " " + args + " 2>/dev/null";
    CliResult r;
    std::array<char, 4096> buf{};
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe))
        r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

// Spectral norm of i [O2(dt), sigma_i^a] via power iteration with
// matrix-free operator application; avoids dense matrix products on the
// 2^10-dimensional verification chain.
double commutator_norm_iterative(const CorrelationQuery& q,
                                 const EvolutionCache& cache) {
    const int n = q.hamiltonian.n_sites;
    const auto o2_mat = observable_matrix(q.o2);
    const auto o2_sites = observable_support(q.o2);
    auto apply_heis = [&](Vector v) {
        evolve_inplace(v, cache, q.dt(), Sign::Forward);
        apply_local(o2_mat, o2_sites, n, v);
        evolve_inplace(v, cache, q.dt(), Sign::Backward);
        return v;
    };
    auto apply_comm = [&](const Vector& v) {
        Vector sv = v;
        apply_single_site(pauli_matrix(q.o1.axis), q.o1.site, n, sv);
        Vector a = apply_heis(std::move(sv));  // O2(dt) sigma v
        Vector b = apply_heis(v);
        apply_single_site(pauli_matrix(q.o1.axis), q.o1.site, n, b);  // sigma O2(dt) v
        return Vector(cplx(0.0, 1.0) * (a - b));  // Hermitian i[A, B]
    };
    // Lanczos on the Hermitian operator i[A, B]: its spectral norm is the
    // largest |eigenvalue| of the tridiagonal projection. Full
    // reorthogonalization keeps the extreme eigenvalues accurate even when
    // the top of the spectrum is a near-degenerate +lambda/-lambda pair,
    // where plain power iteration stalls.
    CounterRng rng(1234, 999);
    const int max_steps = 160;
    std::vector<Vector> basis;
    std::vector<double> alphas, betas;
    Vector v = QuantumState::random(n, rng).amplitudes;
    v.normalize();
    basis.push_back(v);
    for (int j = 0; j < max_steps; ++j) {
        Vector w = apply_comm(basis.back());
        const double alpha = std::real(basis.back().dot(w));
        alphas.push_back(alpha);
        for (const Vector& u : basis) w -= u.dot(w) * u;
        for (const Vector& u : basis) w -= u.dot(w) * u;  // second pass
        const double beta = w.norm();
        if (beta < 1e-13) break;  // invariant subspace captured exactly
        betas.push_back(beta);
        basis.push_back(w / beta);
    }
    const int m = static_cast<int>(alphas.size());
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
    for (int j = 0; j < m; ++j) {
        tri(j, j) = alphas[static_cast<std::size_t>(j)];
        if (j + 1 < m) {
            tri(j, j + 1) = betas[static_cast<std::size_t>(j)];
            tri(j + 1, j) = betas[static_cast<std::size_t>(j)];
        }
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        tri, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

// -------------------------------------------------------------------
// Criteria

void criterion_1() {
    CounterRng rng(2025'01, 0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 3 + static_cast<int>(rng.next() % 4);  // 3..6
        const CorrelationQuery q = random_query(n, rng);
        const QueryCaches caches = make_query_caches(q);
        const double diff = std::abs(projective_correlation(q, caches.h) -
                                     exact_two_time(q, caches.h).real());
        worst = std::max(worst, diff);
    }
    std::ostringstream d;
    d << "max |deviation| = " << worst << " over 100 random queries";
    report(1, "projective protocol identity recovers Re C", worst < 1e-9, d.str());
}

void criterion_2() {
    CounterRng rng(2025'02, 0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 3 + static_cast<int>(rng.next() % 4);
        const CorrelationQuery q = random_query(n, rng);
        const QueryCaches caches = make_query_caches(q);
        const double im = exact_two_time(q, caches.h).imag();
        for (double theta : {0.3, M_PI / 2.0, 2.0}) {
            const double diff =
                std::abs(im_c_from_rotations(q, theta, caches.h) - im);
            worst = std::max(worst, diff);
        }
    }
    std::ostringstream d;
    d << "max |deviation| = " << worst
      << " over 100 random queries x 3 angles";
    report(2, "rotation protocol identity recovers Im C at any angle",
           worst < 1e-9, d.str());
}

void criterion_3() {
    CounterRng rng(2025'03, 0);
    int passed = 0;
    const std::uint64_t shots = 100000;
    for (int trial = 0; trial < 20; ++trial) {
        const CorrelationQuery q = random_query(4, rng);
        const SpinHamiltonian hp = decouple_site(q.hamiltonian, q.o1.site);
        const QueryCaches caches = make_query_caches(q, &hp);
        const std::uint64_t seed = 4000 + static_cast<std::uint64_t>(trial);
        bool ok = true;

        const ProtocolResult rot = run_rotation_protocol(
            q, M_PI / 2.0, AngleNoiseModel::none(), shots / 2, seed, 4);
        ok &= std::abs(rot.estimate - exact_two_time(q, caches.h).imag()) <=
              4.0 * rot.std_error;

        const ProtocolResult proj =
            run_projective_protocol(q, shots, seed, nullptr, false, 4);
        ok &= std::abs(proj.estimate - exact_two_time(q, caches.h).real()) <=
              4.0 * proj.std_error;

        const ProtocolResult mod =
            run_projective_protocol(q, shots, seed, &hp, false, 4);
        ok &= std::abs(mod.estimate - modified_projective_correlation(q, caches)) <=
              4.0 * mod.std_error;

        const ProtocolResult def =
            run_projective_protocol(q, shots, seed, &hp, true, 4);
        ok &= std::abs(def.estimate - deferred_correlation(q, caches)) <=
              4.0 * def.std_error;

        if (ok) ++passed;
    }
    std::ostringstream d;
    d << passed << "/20 queries within 4 std errors for all four estimators";
    report(3, "Monte Carlo estimators agree with exact oracles", passed >= 19,
           d.str());
}

void criterion_4() {
    bool ok = true;
    std::ostringstream d;

    const BoundParams p = BoundParams::make(1.0, 1.0);
    ok &= std::abs(p.kappa - 1.0 / 3.0) < 1e-15;
    ok &= std::abs(p.eta - 2.0 / 3.0) < 1e-15;
    ok &= std::abs(f_of_R(1.0, 1.0, 1.0) - 2.0 * M_PI / 3.0) < 1e-10;
    ok &= std::abs(p.v - 4.0 * M_PI * std::exp(1.0) / 3.0) < 1e-8;

    // quadrature oracle for the tail integral behind f(R): midpoint rule
    // with Richardson-free fine stepping plus the analytic power-law tail
    double worst_f = 0.0;
    for (double r : {1.0, 2.0, 5.0, 10.0}) {
        const double cut = r + 150.0;
        const int steps = 3000000;
        const double h = (cut - r) / steps;
        long double acc = 0.0L;
        for (int k = 0; k < steps; ++k) {
            const double x = r + (k + 0.5) * h;
            const double u = x - 1.0;
            acc += 1.0L / (1.0L + std::pow(u, 6));
        }
        const double numeric = 2.0 * (static_cast<double>(acc) * h +
                                      1.0 / (5.0 * std::pow(cut - 1.0, 5)));
        worst_f = std::max(worst_f, std::abs(f_of_R(r, 1.0, 1.0) - numeric));
    }
    ok &= worst_f < 1e-8;

    long double brute = 0.0L;
    for (int m = 1; m < 2000000; ++m) {
        const long double term = 1.0L / (1.0L + std::pow(static_cast<long double>(m), 6));
        brute += term;
        if (term < 1e-19L) break;
    }
    ok &= std::abs(s_of_a(1, 1.0) - static_cast<double>(brute)) < 1e-10;
    ok &= std::abs(s_of_a(1, 1.0) - 0.517096) < 1e-5;

    d << "kappa=" << p.kappa << " eta=" << p.eta << " f(1)=" << p.c0
      << " v=" << p.v << " s(1)=" << s_of_a(1, 1.0)
      << " max f-quadrature dev=" << worst_f;
    report(4, "analytic constants and closed forms match their definitions", ok,
           d.str());
}

void criterion_5() {
    const int n = 10;
    const BoundParams params = BoundParams::make(1.0, 1.0);
    const std::vector<double> dts{0.1, 0.25, 0.5, 1.0};
    int violations = 0;
    int points = 0;
    double max_ratio = 0.0;

    // sanity: the iterative commutator norm reproduces the dense one
    {
        CounterRng rng(55, 0);
        for (int k = 0; k < 3; ++k) {
            const CorrelationQuery q = random_query(5, rng);
            const QueryCaches caches = make_query_caches(q);
            const double dense = commutator_norm(q, caches.h);
            const double iter = commutator_norm_iterative(q, caches.h);
            if (std::abs(dense - iter) > 1e-6 * std::max(1.0, dense)) {
                report(5, "bound dominance on the N=10 chain", false,
                       "iterative norm cross-check failed");
                return;
            }
        }
    }

    for (int fc = 0; fc < 5; ++fc) {
        CounterRng rng(5000 + static_cast<std::uint64_t>(fc), 0);
        const SpinHamiltonian h = random_chain(n, rng, 0.5);
        const SpinHamiltonian hp = decouple_site(h, 0);
        QueryCaches caches;
        caches.h = make_evolution_cache(to_dense(h));
        caches.h_prime = make_evolution_cache(to_dense(hp));

        std::vector<QuantumState> states;
        for (int s = 0; s < 5; ++s) states.push_back(QuantumState::random(n, rng));

        for (double dt : dts) {
            for (int rho = 1; rho <= 7; ++rho) {
                CorrelationQuery q;
                q.hamiltonian = h;
                q.o1 = PauliObservable{0, Axis::Z};
                q.o2 = PauliObservable{rho, Axis::X};
                q.t1 = 0.0;
                q.t2 = dt;
                q.initial_state = states.front();

                const BoundGridPoint pt = combined_bound(dt, rho, params, h, 0, 1.0);
                const double comm = commutator_norm_iterative(q, caches.h);
                const double matsuta =
                    matsuta_commutator_bound(dt, rho, params, 1.0, 1, 1.0);
                if (comm > matsuta * (1.0 + 1e-10)) ++violations;

                for (const QuantumState& state : states) {
                    q.initial_state = state;
                    const double eps = epsilon_actual(q, caches);
                    ++points;
                    if (eps > pt.e_min + 1e-12) ++violations;
                    if (pt.e_min > 1e-15)
                        max_ratio = std::max(max_ratio, eps / pt.e_min);
                }
            }
        }
    }
    std::ostringstream d;
    d << points << " grid points, " << violations
      << " violations, max eps/e_min = " << max_ratio;
    report(5, "exact protocol errors stay below the analytic bounds",
           violations == 0, d.str());
}

void criterion_6() {
    const CliResult r = run_cli("bounds-grid");
    if (r.exit_code != 0) {
        report(6, "bound-grid causal-region structure", false,
               "bounds-grid command failed");
        return;
    }
    // parse the CSV into per-(dt,rho) values
    std::istringstream lines(r.out);
    std::string header;
    std::getline(lines, header);
    bool ok = header == "dt,rho,e_full,e_naive,e_trivial,e_min";

    struct Row {
        double dt, e_full, e_naive, e_trivial, e_min;
        int rho;
    };
    std::vector<Row> rows;
    std::string line;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        Row row{};
        std::istringstream cells(line);
        std::string cell;
        std::vector<double> v;
        while (std::getline(cells, cell, ',')) v.push_back(std::stod(cell));
        if (v.size() != 6) { ok = false; continue; }
        row.dt = v[0];
        row.rho = static_cast<int>(v[1]);
        row.e_full = v[2];
        row.e_naive = v[3];
        row.e_trivial = v[4];
        row.e_min = v[5];
        rows.push_back(row);
    }
    ok &= rows.size() == 81u * 20u;

    // (a) e_min vanishes on the dt = 0 row
    for (const Row& row : rows)
        if (row.dt == 0.0 && row.e_min != 0.0) ok = false;

    // (b) for short windows the rho-independent naive bound wins on a
    // contiguous band starting at rho = 1
    int bands_checked = 0;
    for (double dt_probe : {0.25, 0.5, 0.75}) {
        std::vector<const Row*> col;
        for (const Row& row : rows)
            if (std::abs(row.dt - dt_probe) < 1e-9) col.push_back(&row);
        if (col.size() != 20) { ok = false; continue; }
        bool in_band = true;
        int band_len = 0;
        for (const Row* row : col) {
            const bool naive_wins = row->e_min == row->e_naive;
            if (naive_wins && !in_band) ok = false;  // band must be contiguous
            if (!naive_wins) in_band = false;
            if (naive_wins) ++band_len;
        }
        if (band_len < 1) ok = false;
        ++bands_checked;
    }

    // (c) along fixed e_full contour levels, the crossing rho never moves
    // back toward smaller separations as dt grows
    int contours_checked = 0;
    for (double level : {0.5, 1.0, 2.0, 5.0, 10.0}) {
        int prev_rho = 0;
        bool crossed = false;
        for (int step = 0; step < 81; ++step) {
            const double dt = 4.0 * step / 80.0;
            int first_ok = 21;  // sentinel: beyond the grid
            for (const Row& row : rows) {
                if (std::abs(row.dt - dt) < 1e-9 && row.e_full <= level) {
                    first_ok = std::min(first_ok, row.rho);
                }
            }
            if (first_ok < prev_rho) ok = false;
            if (first_ok >= 1 && first_ok <= 20 && dt > 0.0) crossed = true;
            prev_rho = first_ok;
        }
        if (crossed) ++contours_checked;
    }
    ok &= contours_checked >= 3;

    std::ostringstream d;
    d << rows.size() << " grid rows, " << bands_checked
      << " naive bands, " << contours_checked << " informative contours";
    report(6, "grid data reproduces the causal-region structure", ok, d.str());
}

void criterion_7() {
    const BoundParams params = BoundParams::make(1.0, 1.0);
    RydbergModelSpec spec;
    spec.n_sites = 6;
    const SpinHamiltonian h = build_rydberg_chain(spec);
    const Observable o2 = PauliObservable{5, Axis::X};

    bool ok = true;
    int strict = 0;
    const std::vector<Eigen::Vector3d> onsite_terms{
        Eigen::Vector3d::Zero(), Eigen::Vector3d(0.5, 0.0, 0.0),
        Eigen::Vector3d(0.0, 0.0, 0.5)};
    for (const Eigen::Vector3d& h_i : onsite_terms) {
        for (int step = 0; step < 81; ++step) {
            const double dt = 4.0 * step / 80.0;
            for (int rho = 1; rho <= 20; ++rho) {
                const DeferredBound b =
                    e_prime(dt, rho, params, h_i, Axis::Z, o2, h, 0);
                if (!(b.value >= b.base)) ok = false;
                if (b.c_hat_norm == 0.0) {
                    if (b.value != b.base) ok = false;
                } else if (b.base < 1e12) {
                    // the added norm terms are O(1); only demand a strict
                    // increase where they exceed the base bound's ulp
                    if (!(b.value > b.base)) ok = false;
                    ++strict;
                }
            }
        }
    }

    // deferral is free when the decoupled site carries no on-site term
    CounterRng rng(2025'07, 0);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const CorrelationQuery q = random_query(5, rng);
        const SpinHamiltonian hp =
            decouple_site(q.hamiltonian, q.o1.site, /*keep_onsite=*/false);
        const QueryCaches caches = make_query_caches(q, &hp);
        worst = std::max(worst,
                         std::abs(deferred_correlation(q, caches) -
                                  modified_projective_correlation(q, caches)));
    }
    ok &= worst < 1e-12;

    std::ostringstream d;
    d << strict << " strictly-ordered points, max |deferred - modified| = "
      << worst << " with free site";
    report(7, "deferred-measurement bound dominates the base bound", ok, d.str());
}

void criterion_8() {
    CounterRng rng(2025'08, 0);
    const double delta = 0.05;
    const double theta = M_PI / 2.0;
    const BoundParams params = BoundParams::make(1.0, 1.0);
    bool ok = true;
    double worst_rel = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const CorrelationQuery q = random_query(4, rng);
        const QueryCaches caches = make_query_caches(q);
        const double biased = (rotation_expectation(q, -theta + delta, caches.h) -
                               rotation_expectation(q, theta + delta, caches.h)) /
                              (2.0 * std::sin(theta));
        const double bias = biased - exact_two_time(q, caches.h).imag();
        const double predicted = -0.5 * delta * scaling_term(q, caches.h);
        const double slack = 0.1 * std::abs(predicted) + 2.0 * delta * delta;
        if (std::abs(bias - predicted) > slack) ok = false;
        if (std::abs(predicted) > 1e-12)
            worst_rel = std::max(worst_rel,
                                 std::abs(bias - predicted) / std::abs(predicted));

        const RotationNoiseBound b =
            rotation_noise_bound(q.dt(), q.rho(), params, delta, delta);
        if (std::abs(bias) > b.leading_order + 10.0 * delta * delta) ok = false;
    }
    std::ostringstream d;
    d << "worst relative deviation from leading-order prediction = " << worst_rel;
    report(8, "systematic angle noise biases the estimator as predicted", ok,
           d.str());
}

void criterion_9() {
    bool ok = true;
    const std::string base = "protocol --shots 2000 --seed 424242";
    const CliResult first = run_cli(base + " --threads 1");
    ok &= first.exit_code == 0;
    for (int run = 0; run < 2; ++run) {
        const CliResult again = run_cli(base + " --threads 1");
        ok &= again.out == first.out;
    }
    for (int threads : {4, 8}) {
        const CliResult t = run_cli(base + " --threads " + std::to_string(threads));
        ok &= t.exit_code == 0;
        ok &= t.out == first.out;
    }
    report(9, "fixed-seed protocol output is byte-identical across runs and thread counts",
           ok, "3 repeat runs, threads {1,4,8}");
}

}  // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    const auto dt = std::chrono::duration_cast<std::chrono::seconds>(
        std::chrono::steady_clock::now() - t0);
    std::cout << (g_failures == 0 ? "ALL CRITERIA PASSED" : "CRITERIA FAILED")
              << " (" << dt.count() << " s)" << std::endl;
    return g_failures == 0 ? 0 : 1;
}
