#include "afmp/bounds.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace afmp {

namespace {
constexpr double kE = 2.718281828459045235360287;
}

BoundParams BoundParams::make(double u0, double rc, double alpha,
                              int lattice_dim, double series_tol) {
    if (u0 <= 0.0 || rc <= 0.0)
        throw std::invalid_argument("U0 and Rc must be positive");
    if (!(alpha > 2.0 * lattice_dim))
        throw std::invalid_argument("bound requires alpha > 2D");
    if (lattice_dim != 1)
        throw std::invalid_argument("bound formulas are implemented for D = 1");
    BoundParams p;
    p.u0 = u0;
    p.rc = rc;
    p.alpha = alpha;
    p.lattice_dim = lattice_dim;
    p.kappa = (1.0 + lattice_dim) / (1.0 + alpha - lattice_dim);
    p.eta = 1.0 - p.kappa;
    p.c0 = f_of_R(1.0, u0, rc);
    p.v = 2.0 * kE * p.c0;
    p.c2 = 8.0 * kE * kE;
    p.series_tol = series_tol;
    return p;
}

double f_of_R(double r, double u0, double rc) {
    if (r < 0.0) throw std::invalid_argument("f_of_R: R must be >= 0");
    const double u = (r - 1.0) / rc;
    const double sqrt3 = std::sqrt(3.0);
    const double bracket = 2.0 * M_PI + std::atan(sqrt3 - 2.0 * u) -
                           2.0 * std::atan(u) - std::atan(sqrt3 + 2.0 * u) -
                           sqrt3 * std::atanh(sqrt3 * u / (1.0 + u * u));
    return (2.0 * u0 * rc / 6.0) * bracket;
}

double g_of_x(double x) {
    if (x < 0.0) throw std::invalid_argument("g_of_x: x must be >= 0");
    return 2.0 * (1.0 + x);
}

double s_of_a(int a, double rc, double tol) {
    if (a < 1) throw std::invalid_argument("s_of_a: a must be >= 1");
    double sum = 0.0;
    for (int m = a;; ++m) {
        sum += 1.0 / (1.0 + std::pow(m / rc, 6));
        // integral tail bound: int_m^inf (rc/x)^6 dx = rc^6 / (5 m^5)
        const double tail = std::pow(rc, 6) / (5.0 * std::pow(m, 5));
        if (tail < tol) break;
    }
    return sum;
}

double beta(double dt, double x, const BoundParams& p) {
    if (dt < 0.0 || x < 0.0) throw std::invalid_argument("beta: negative input");
    const double exp_decay = std::exp(-std::pow(x, p.eta));
    const double f_val = f_of_R(std::pow(x, p.kappa), p.u0, p.rc);
    const double evdt = std::exp(p.v * dt);
    return 2.0 * ((evdt - 1.0) / p.v * exp_decay +
                  2.0 * g_of_x(x) * f_val * dt +
                  p.c2 * std::pow(x, p.kappa) * f_val / (p.v * p.v) *
                      (evdt * (p.v * dt - 1.0) + 1.0) * exp_decay);
}

double matsuta_commutator_bound(double dt, double x, const BoundParams& p,
                                double o2_norm, int x2_size, double hin_norm) {
    if (dt < 0.0 || x < 0.0)
        throw std::invalid_argument("matsuta bound: negative input");
    const double r = std::pow(x, p.kappa);
    const double f_val = f_of_R(r, p.u0, p.rc);
    const double light_cone = std::exp(p.v * dt - std::pow(x, p.eta));
    return 2.0 * o2_norm * hin_norm * x2_size *
           (light_cone + 2.0 * dt * g_of_x(x) * f_val +
            p.c2 * x2_size * r * f_val * dt * light_cone);
}

double exponential_commutator_bound(double dt, double x, double c, double v,
                                    double xi) {
    if (xi <= 0.0) throw std::invalid_argument("xi must be positive");
    return c * std::exp((v * dt - x) / xi);
}

double e_full(double dt, int rho, const BoundParams& p) {
    if (rho < 1) throw std::invalid_argument("e_full: rho must be >= 1");
    if (dt < 0.0) throw std::invalid_argument("e_full: dt must be >= 0");

    const double s_edge = s_of_a(1, p.rc, p.series_tol) +
                          s_of_a(2 * rho, p.rc, p.series_tol);

    auto coupling = [&p](int m) { return 1.0 / (1.0 + std::pow(m / p.rc, 6)); };
    auto fk = [&p](double x) { return f_of_R(std::pow(x, p.kappa), p.u0, p.rc); };
    auto decay = [&p](double x) { return std::exp(-std::pow(x, p.eta)); };

    // the three square brackets of the integrated bound
    double t1 = decay(rho) * s_edge;
    double t2 = g_of_x(rho) * fk(rho) * s_edge;
    double t3 = std::pow(rho, p.kappa) * fk(rho) * decay(rho) * s_edge;
    for (int m = 1; m <= 2 * rho - 1; ++m) {
        const double x = std::abs(rho - m);
        const double u = coupling(m);
        t1 += decay(x) * u;
        t2 += g_of_x(x) * fk(x) * u;
        t3 += std::pow(x, p.kappa) * fk(x) * decay(x) * u;
    }

    const double evdt = std::exp(p.v * dt);
    const double value =
        2.0 * p.u0 *
        ((evdt - 1.0) / p.v * t1 + 2.0 * dt * t2 +
         p.c2 / (p.v * p.v) * (evdt * (p.v * dt - 1.0) + 1.0) * t3);
    return value;
}

double e_naive(double dt, const SpinHamiltonian& h, int site, double o2_norm) {
    if (dt < 0.0) throw std::invalid_argument("e_naive: dt must be >= 0");
    return 2.0 * dt * o2_norm * coupling_sum_at_site(h, site);
}

double e_naive_infinite(double dt, const BoundParams& p, double o2_norm) {
    if (dt < 0.0) throw std::invalid_argument("e_naive: dt must be >= 0");
    return 2.0 * dt * o2_norm * 2.0 * p.u0 * s_of_a(1, p.rc, p.series_tol);
}

namespace {

BoundGridPoint combine(double dt, int rho, double full, double naive,
                       double o2_norm) {
    BoundGridPoint pt;
    pt.dt = dt;
    pt.rho = rho;
    pt.e_full = full;
    pt.e_naive = naive;
    pt.e_trivial = 2.0 * o2_norm;
    pt.e_min = std::min({pt.e_full, pt.e_naive, pt.e_trivial});
    pt.overflow = std::isinf(full);
    return pt;
}

}  // namespace

BoundGridPoint combined_bound(double dt, int rho, const BoundParams& params,
                              const SpinHamiltonian& h, int site,
                              double o2_norm) {
    return combine(dt, rho, e_full(dt, rho, params),
                   e_naive(dt, h, site, o2_norm), o2_norm);
}

BoundGridPoint combined_bound_infinite(double dt, int rho,
                                       const BoundParams& params,
                                       double o2_norm) {
    return combine(dt, rho, e_full(dt, rho, params),
                   e_naive_infinite(dt, params, o2_norm), o2_norm);
}

RotationNoiseBound rotation_noise_bound(double dt, int rho,
                                        const BoundParams& params,
                                        double delta1, double delta2,
                                        double o2_norm, int x2_size) {
    if (rho < 1) throw std::invalid_argument("rotation_noise_bound: rho >= 1");
    RotationNoiseBound b;
    b.leading_order = 0.5 * std::abs(delta1 + delta2) *
                      matsuta_commutator_bound(dt, rho, params, o2_norm,
                                               x2_size, /*hin_norm=*/1.0);
    return b;
}

DeferredBound e_prime(double dt, int rho, const BoundParams& params,
                      const Eigen::Vector3d& h_onsite, Axis axis,
                      const Observable& o2, const SpinHamiltonian& h,
                      int site) {
    if (rho < 1) throw std::invalid_argument("e_prime: rho must be >= 1");
    DeferredBound out;
    out.base = e_full(dt, rho, params);
    out.value = out.base;

    // single-site pieces: e^{i dt h.sigma} and the projectors of sigma^a
    const Eigen::Matrix2cd id2 = Eigen::Matrix2cd::Identity();
    Eigen::Matrix2cd u_onsite = id2;
    const double mag = h_onsite.norm();
    if (mag > 0.0) {
        const Eigen::Matrix2cd h_dir =
            (h_onsite[0] * pauli_matrix(Axis::X) +
             h_onsite[1] * pauli_matrix(Axis::Y) +
             h_onsite[2] * pauli_matrix(Axis::Z)) /
            mag;
        u_onsite = std::cos(mag * dt) * id2 +
                   cplx(0.0, 1.0) * std::sin(mag * dt) * h_dir;
    }

    // decoupled chain with the prescribed on-site term at the removed site
    SpinHamiltonian h_prime = decouple_site(h, site, /*keep_onsite=*/false);
    h_prime.fields[static_cast<std::size_t>(site)] = h_onsite;
    const EvolutionCache cache = make_evolution_cache(to_dense(h_prime));
    const Matrix u_back = propagator(cache, dt, Sign::Backward);  // e^{+iH'dt}
    const int n = h.n_sites;
    const Matrix o2_emb = embed_local(observable_matrix(o2),
                                      observable_support(o2), n);

    for (int nu : {+1, -1}) {
        const Eigen::Matrix2cd pi =
            0.5 * (id2 + static_cast<double>(nu) * pauli_matrix(axis));
        const Eigen::Matrix2cd c_hat2 = u_onsite * pi - pi * u_onsite;
        out.c_hat_norm = std::max(out.c_hat_norm, operator_norm(Matrix(c_hat2)));
        if (c_hat2.cwiseAbs().maxCoeff() == 0.0) continue;
        const Matrix c_hat = embed_local(Matrix(c_hat2), {site}, n);
        const Matrix pi_emb = embed_local(Matrix(pi), {site}, n);
        const double term_a = operator_norm(c_hat * o2_emb * c_hat.adjoint());
        const Matrix m = pi_emb * u_back * o2_emb * c_hat.adjoint();
        const double term_b = operator_norm(m + m.adjoint());
        out.value += term_a + term_b;
    }
    return out;
}

}  // namespace afmp
