#pragma once

#include "mblrevive/model.hpp"
#include "mblrevive/mps.hpp"
#include "mblrevive/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <vector>

namespace testutil {

using mblrevive::cplx;
using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;

// Single-site operator embedded with site 0 as the most significant factor.
inline MatrixXd embed(const Eigen::Matrix2d &op, std::size_t site, std::size_t L) {
    MatrixXd out = MatrixXd::Identity(1, 1);
    for(std::size_t j = 0; j < L; ++j) {
        const Eigen::Matrix2d f = j == site ? op : Eigen::Matrix2d::Identity();
        MatrixXd              k(out.rows() * 2, out.cols() * 2);
        for(Index a = 0; a < out.rows(); ++a)
            for(Index b = 0; b < out.cols(); ++b) k.block(2 * a, 2 * b, 2, 2) = out(a, b) * f;
        out = k;
    }
    return out;
}

// -J sum S.S + sum h S^z from explicit Kronecker products, up = basis state 0.
inline MatrixXd kron_hamiltonian(const std::vector<double> &h, double J = 1.0) {
    const std::size_t L = h.size();
    Eigen::Matrix2d   sz, sp, sm;
    sz << 0.5, 0, 0, -0.5;
    sp << 0, 1, 0, 0; // |up><down|
    sm = sp.transpose();
    MatrixXd H = MatrixXd::Zero(Index{1} << L, Index{1} << L);
    for(std::size_t j = 0; j + 1 < L; ++j) {
        H -= J * embed(sz, j, L) * embed(sz, j + 1, L);
        H -= 0.5 * J * (embed(sp, j, L) * embed(sm, j + 1, L) + embed(sm, j, L) * embed(sp, j + 1, L));
    }
    for(std::size_t j = 0; j < L; ++j) H += h[j] * embed(sz, j, L);
    return H;
}

inline VectorXcd random_vector(Index n, std::uint64_t seed) {
    mblrevive::rng::SplitMix64 g(seed);
    VectorXcd                  v(n);
    for(Index i = 0; i < n; ++i) v(i) = cplx(g.normal(), g.normal());
    return v.normalized();
}

// Random complex MPS with bonds min(2^j, 2^(L-j), chi), not normalized.
inline mblrevive::Mps random_mps(std::size_t L, Index chi, std::uint64_t seed) {
    mblrevive::rng::SplitMix64           g(seed);
    std::vector<mblrevive::SiteTensor>   sites(L);
    auto                                 bond = [&](std::size_t j) {
        const auto cap = [&](std::size_t n) { return n >= 30 ? chi : std::min(chi, Index{1} << n); };
        return std::min(cap(j), cap(L - j));
    };
    for(std::size_t j = 0; j < L; ++j)
        for(auto &t : sites[j]) {
            t.resize(bond(j), bond(j + 1));
            for(Index a = 0; a < t.rows(); ++a)
                for(Index b = 0; b < t.cols(); ++b) t(a, b) = cplx(g.normal(), g.normal());
        }
    return mblrevive::Mps(std::move(sites));
}

inline mblrevive::Mps normalized(const mblrevive::Mps &psi) { return psi.scaled(1.0 / std::sqrt(mblrevive::norm_squared(psi))); }

inline std::vector<Eigen::Vector2cd> random_product(std::size_t L, std::uint64_t seed) {
    mblrevive::rng::SplitMix64    g(seed);
    std::vector<Eigen::Vector2cd> out(L);
    for(auto &v : out) {
        v << cplx(g.normal(), g.normal()), cplx(g.normal(), g.normal());
        v.normalize();
    }
    return out;
}

} // namespace testutil
