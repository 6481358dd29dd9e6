#include "afmp/hamiltonian.hpp"

#include <cmath>
#include <stdexcept>

namespace afmp {

void SpinHamiltonian::validate() const {
    if (n_sites < 1) throw std::invalid_argument("n_sites must be positive");
    if (static_cast<int>(fields.size()) != n_sites)
        throw std::invalid_argument("field count mismatch");
    if (couplings.rows() != n_sites || couplings.cols() != n_sites)
        throw std::invalid_argument("coupling matrix dimension mismatch");
    for (int m = 0; m < n_sites; ++m) {
        if (couplings(m, m) != 0.0)
            throw std::invalid_argument("coupling diagonal must be zero");
        for (int n = m + 1; n < n_sites; ++n)
            if (std::abs(couplings(m, n) - couplings(n, m)) > 1e-14)
                throw std::invalid_argument("coupling matrix must be symmetric");
    }
}

double rydberg_coupling(double d, double u0, double rc) {
    if (u0 <= 0.0 || rc <= 0.0)
        throw std::invalid_argument("U0 and Rc must be positive");
    return u0 / (1.0 + std::pow(d / rc, 6));
}

SpinHamiltonian build_rydberg_chain(const RydbergModelSpec& spec) {
    if (spec.n_sites < 1) throw std::invalid_argument("n_sites must be positive");
    if (spec.u0 <= 0.0 || spec.rc <= 0.0)
        throw std::invalid_argument("U0 and Rc must be positive");
    SpinHamiltonian h;
    h.n_sites = spec.n_sites;
    h.fields = spec.fields;
    if (h.fields.empty())
        h.fields.assign(static_cast<std::size_t>(spec.n_sites), Eigen::Vector3d::Zero());
    if (static_cast<int>(h.fields.size()) != spec.n_sites)
        throw std::invalid_argument("field count mismatch");
    h.couplings = Eigen::MatrixXd::Zero(spec.n_sites, spec.n_sites);
    for (int m = 0; m < spec.n_sites; ++m)
        for (int n = m + 1; n < spec.n_sites; ++n) {
            const double u = rydberg_coupling(static_cast<double>(n - m), spec.u0, spec.rc);
            h.couplings(m, n) = u;
            h.couplings(n, m) = u;
        }
    return h;
}

SpinHamiltonian decouple_site(const SpinHamiltonian& h, int site, bool keep_onsite) {
    if (site < 0 || site >= h.n_sites)
        throw std::invalid_argument("decouple_site: site out of range");
    SpinHamiltonian out = h;
    out.couplings.row(site).setZero();
    out.couplings.col(site).setZero();
    if (!keep_onsite) out.fields[static_cast<std::size_t>(site)].setZero();
    return out;
}

Matrix to_dense(const SpinHamiltonian& h) {
    h.validate();
    check_site_count(h.n_sites);
    const std::size_t dim = 1ULL << h.n_sites;
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(dim),
                            static_cast<Eigen::Index>(dim));
    // bit 0 = spin up = sigma^z eigenvalue +1; site 0 = most significant bit
    auto zval = [&h](std::uint64_t idx, int site) {
        return (idx >> (h.n_sites - 1 - site)) & 1 ? -1.0 : 1.0;
    };
    for (std::uint64_t idx = 0; idx < dim; ++idx) {
        double diag = 0.0;
        for (int a = 0; a < h.n_sites; ++a) {
            const double za = zval(idx, a);
            diag += h.fields[static_cast<std::size_t>(a)][2] * za;
            for (int b = a + 1; b < h.n_sites; ++b)
                diag += h.couplings(a, b) * za * zval(idx, b);
        }
        m(static_cast<Eigen::Index>(idx), static_cast<Eigen::Index>(idx)) = diag;
        // transverse field terms flip one spin
        for (int a = 0; a < h.n_sites; ++a) {
            const double hx = h.fields[static_cast<std::size_t>(a)][0];
            const double hy = h.fields[static_cast<std::size_t>(a)][1];
            if (hx == 0.0 && hy == 0.0) continue;
            const std::uint64_t flipped = idx ^ (1ULL << (h.n_sites - 1 - a));
            // <flipped|sigma^x|idx> = 1; <flipped|sigma^y|idx> = +-i
            const double ysign = zval(idx, a);  // +i when flipping up -> down
            m(static_cast<Eigen::Index>(flipped), static_cast<Eigen::Index>(idx)) +=
                cplx(hx, ysign * hy);
        }
    }
    return m;
}

double coupling_sum_at_site(const SpinHamiltonian& h, int site) {
    if (site < 0 || site >= h.n_sites)
        throw std::invalid_argument("site out of range");
    double sum = 0.0;
    for (int n = 0; n < h.n_sites; ++n)
        if (n != site) sum += std::abs(h.couplings(site, n));
    return sum;
}

SpinHamiltonian hamiltonian_from_json(const nlohmann::json& j) {
    const int n = j.at("n_sites").get<int>();
    if (n < 1) throw std::invalid_argument("n_sites must be positive");
    std::vector<Eigen::Vector3d> fields(static_cast<std::size_t>(n),
                                        Eigen::Vector3d::Zero());
    if (j.contains("fields")) {
        const auto& jf = j.at("fields");
        if (static_cast<int>(jf.size()) != n)
            throw std::invalid_argument("fields length mismatch");
        for (int m = 0; m < n; ++m) {
            const auto& v = jf.at(static_cast<std::size_t>(m));
            if (v.size() != 3) throw std::invalid_argument("field vector must have 3 entries");
            fields[static_cast<std::size_t>(m)] =
                Eigen::Vector3d(v.at(0).get<double>(), v.at(1).get<double>(),
                                v.at(2).get<double>());
        }
    }
    if (j.contains("couplings")) {
        SpinHamiltonian h;
        h.n_sites = n;
        h.fields = std::move(fields);
        h.couplings = Eigen::MatrixXd::Zero(n, n);
        const auto& jc = j.at("couplings");
        if (static_cast<int>(jc.size()) != n)
            throw std::invalid_argument("couplings matrix dimension mismatch");
        for (int m = 0; m < n; ++m) {
            const auto& row = jc.at(static_cast<std::size_t>(m));
            if (static_cast<int>(row.size()) != n)
                throw std::invalid_argument("couplings matrix dimension mismatch");
            for (int k = 0; k < n; ++k)
                h.couplings(m, k) = row.at(static_cast<std::size_t>(k)).get<double>();
        }
        h.validate();
        return h;
    }
    RydbergModelSpec spec;
    spec.n_sites = n;
    spec.u0 = j.value("u0", 1.0);
    spec.rc = j.value("rc", 1.0);
    spec.fields = std::move(fields);
    return build_rydberg_chain(spec);
}

nlohmann::json hamiltonian_to_json(const SpinHamiltonian& h) {
    nlohmann::json j;
    j["n_sites"] = h.n_sites;
    nlohmann::json fields = nlohmann::json::array();
    for (const auto& f : h.fields) fields.push_back({f[0], f[1], f[2]});
    j["fields"] = fields;
    nlohmann::json rows = nlohmann::json::array();
    for (int m = 0; m < h.n_sites; ++m) {
        nlohmann::json row = nlohmann::json::array();
        for (int n = 0; n < h.n_sites; ++n) row.push_back(h.couplings(m, n));
        rows.push_back(row);
    }
    j["couplings"] = rows;
    return j;
}

}  // namespace afmp
