// Spin-1/2 lattice Hamiltonians with on-site fields and sigma^z sigma^z
// pair couplings:
//
//   H = sum_{m<n} U_mn sigma^z_m sigma^z_n + sum_m h_m . sigma_m
//
// plus builders for the Rydberg-dressed soft-core chain and the
// site-decoupled variants used to model atom removal. Chain geometry is
// one-dimensional with open boundaries; distances are 1-norm in units of
// the lattice constant.

#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "afmp/quantum.hpp"

namespace afmp {

struct SpinHamiltonian {
    int n_sites = 0;
    std::vector<Eigen::Vector3d> fields;  // h_m, energy units (hbar = 1)
    Eigen::MatrixXd couplings;            // symmetric U_mn, zero diagonal

    // Checks symmetry and zero diagonal of the coupling matrix.
    void validate() const;
};

struct RydbergModelSpec {
    int n_sites = 0;
    double u0 = 1.0;  // saturation energy
    double rc = 1.0;  // soft-core radius, lattice units
    std::vector<Eigen::Vector3d> fields;
};

// Soft-core coupling U0 / (1 + (d/Rc)^6).
double rydberg_coupling(double d, double u0, double rc);

// Builds the long-range Ising chain with soft-core couplings. Fields are
// copied through (zero if the spec provides none).
SpinHamiltonian build_rydberg_chain(const RydbergModelSpec& spec);

// Zeroes row/column i of the coupling matrix; the on-site field h_i is
// kept iff keep_onsite.
SpinHamiltonian decouple_site(const SpinHamiltonian& h, int site,
                              bool keep_onsite = true);

// Dense Hermitian 2^N realization.
Matrix to_dense(const SpinHamiltonian& h);

// Total pair-coupling strength attached to one site, sum_{n != i} U_in.
double coupling_sum_at_site(const SpinHamiltonian& h, int site);

// JSON model spec:
//   {"n_sites": int, "u0": float, "rc": float,
//    "fields": [[hx,hy,hz], ...],
//    "couplings": optional explicit matrix overriding the Rydberg law}
SpinHamiltonian hamiltonian_from_json(const nlohmann::json& j);
nlohmann::json hamiltonian_to_json(const SpinHamiltonian& h);

}  // namespace afmp
