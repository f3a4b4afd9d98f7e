#include "helpers.hpp"

#include "mblrevive/ed_oracle.hpp"
#include "mblrevive/errors.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <numbers>

using namespace mblrevive;

namespace {

// exp(-iHt) psi through the full-space eigendecomposition.
Eigen::VectorXcd reference_evolve(const Eigen::MatrixXd &H, const Eigen::VectorXcd &psi, double t) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    const Eigen::MatrixXcd                          v = es.eigenvectors().cast<cplx>();
    Eigen::VectorXcd                                c = v.adjoint() * psi;
    for(Eigen::Index i = 0; i < c.size(); ++i) c(i) *= std::exp(cplx(0.0, -es.eigenvalues()(i) * t));
    return v * c;
}

} // namespace

TEST(Ed, SectorSpectraCoverFullSpectrum) {
    const auto          d = sample_disorder(8, 3.0, 6);
    std::vector<double> all;
    for(int m : sector_magnetizations(8)) {
        const auto s = diagonalize_sector(d, m);
        ASSERT_EQ(s.refined.size(), s.size());
        for(std::size_t i = 0; i < s.size(); ++i) {
            all.push_back(s.values(static_cast<Eigen::Index>(i)));
            EXPECT_NEAR(static_cast<double>(s.refined[i]), s.values(static_cast<Eigen::Index>(i)), 1e-12);
        }
        const Eigen::MatrixXd gram = s.vectors.transpose() * s.vectors;
        EXPECT_LE((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff(), 1e-12);
    }
    std::sort(all.begin(), all.end());
    const Eigen::VectorXd ref = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(testutil::kron_hamiltonian(d.fields), Eigen::EigenvaluesOnly).eigenvalues();
    ASSERT_EQ(all.size(), 256u);
    for(std::size_t i = 0; i < all.size(); ++i) EXPECT_NEAR(all[i], ref(static_cast<Eigen::Index>(i)), 1e-11);
}

TEST(Ed, FullVectorsAreEigenvectors) {
    const auto d = sample_disorder(7, 5.0, 2);
    const auto H = testutil::kron_hamiltonian(d.fields).cast<cplx>().eval();
    const auto s = diagonalize_sector(d, 1);
    for(std::size_t i = 0; i < s.size(); i += 5) {
        const auto v = s.full_vector(i);
        EXPECT_NEAR(v.norm(), 1.0, 1e-13);
        EXPECT_LE((H * v - s.values(static_cast<Eigen::Index>(i)) * v).norm(), 1e-11);
    }
}

TEST(Ed, RayleighQuotientInExtendedPrecision) {
    const auto            d = sample_disorder(8, 2.0, 1);
    const SectorBasis     b(8, 0);
    const auto            sp = sparse_hamiltonian(d, b);
    const Eigen::VectorXd v  = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(b.size())).normalized();
    const double          ref = v.dot(Eigen::MatrixXd(sp) * v);
    EXPECT_NEAR(static_cast<double>(rayleigh_quotient(sp, v)), ref, 1e-13);
}

TEST(Ed, SublatticeEntropy) {
    // Product state: zero entropy.
    const auto prod = to_dense(from_product(testutil::random_product(6, 4)));
    EXPECT_NEAR(sublattice_entropy(prod, 6), 0.0, 1e-10);
    // Bell pair on sites 0 (even) and 1 (odd): ln 2.
    Eigen::VectorXcd bell = Eigen::VectorXcd::Zero(16);
    bell(0b0000) = bell(0b1100) = 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(sublattice_entropy(bell, 4), std::numbers::ln2, 1e-12);
    // Bell pair on sites 0 and 2, both even: zero.
    Eigen::VectorXcd same = Eigen::VectorXcd::Zero(16);
    same(0b0000) = same(0b1010) = 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(sublattice_entropy(same, 4), 0.0, 1e-12);
}

TEST(Ed, DenseRdmMatchesMpsRdm) {
    const auto psi = testutil::normalized(testutil::random_mps(6, 4, 9));
    const auto v   = to_dense(psi);
    const auto all = dense_rdms(v, 6);
    for(std::size_t j = 0; j < 6; ++j) {
        EXPECT_LE((all[j] - single_site_rdm(psi, j)).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LE((dense_rdm(v, 6, j) - all[j]).cwiseAbs().maxCoeff(), 0.0);
    }
}

TEST(Ed, EvolutionMatchesFullDiagonalization) {
    const auto d   = sample_disorder(8, 4.0, 12);
    const auto H   = testutil::kron_hamiltonian(d.fields);
    const auto psi = testutil::random_vector(256, 1);
    DenseEvolver ev(d);
    for(double t : {0.0, 0.37, 5.0, 120.0}) {
        const auto out = ev.evolve(psi, t);
        EXPECT_NEAR(out.norm(), 1.0, 1e-12);
        EXPECT_LE((out - reference_evolve(H, psi, t)).norm(), 1e-10 * (1.0 + t)) << "t=" << t;
    }
    EXPECT_LE((evolve_dense(psi, d, 0.0) - psi).norm(), 1e-12);
}

TEST(Ed, EvolutionKeepsSectorSupport) {
    const auto d    = sample_disorder(8, 4.0, 3);
    const auto c    = SpinConfiguration::domain_wall(8, 3);
    const auto out  = evolve_dense(to_dense(from_configuration(c)), d, 2.0);
    for(Eigen::Index i = 0; i < out.size(); ++i)
        if(std::popcount(static_cast<std::uint64_t>(i)) != 3) { EXPECT_EQ(out(i), cplx(0.0)); }
}

TEST(Ed, MatchingAndDominantConfiguration) {
    const auto d = sample_disorder(8, 8.0, 4);
    DenseEvolver ed(d);
    const auto seed = SpinConfiguration::domain_wall(8, 4);
    EigenMatch m;
    const auto e = matched_eigenpair(ed, to_dense(from_configuration(seed)), seed, &m);
    EXPECT_GT(m.overlap, 0.5);
    EXPECT_EQ(dominant_configuration(e.vector, 8), seed);
    const auto &s = ed.sector(seed.magnetization());
    const auto  again = match_eigenvector(s, e.vector);
    EXPECT_EQ(again.index, m.index);
    EXPECT_NEAR(again.overlap, 1.0, 1e-12);
}

TEST(Ed, CertifyDenseIsInvariantUnderGlobalPhase) {
    const auto d = sample_disorder(8, 8.0, 4);
    DenseEvolver ed(d);
    const auto s1 = SpinConfiguration::domain_wall(8, 3), s2 = SpinConfiguration::domain_wall(8, 4);
    auto       e1 = matched_eigenpair(ed, to_dense(from_configuration(s1)), s1);
    auto       e2 = matched_eigenpair(ed, to_dense(from_configuration(s2)), s2);
    const auto a  = certify_dense(e1, e2, 3);
    e1.vector *= std::polar(1.0, 1.3);
    e2.vector *= -1.0;
    const auto b = certify_dense(e1, e2, 3);
    EXPECT_LE(certificate_distance(a, b), 1e-12);
    EXPECT_THROW((void)certify_dense(e1, e1, 3), DegeneracyError);
}

TEST(Ed, SearchRespectsThresholdsAndRanking) {
    const auto                  d = sample_disorder(8, 8.0, 21);
    std::vector<SpectrumSector> spectra;
    for(int m : sector_magnetizations(8)) spectra.push_back(diagonalize_sector(d, m));
    SearchOptions o;
    const auto    found = search_product_pairs(spectra, o);
    ASSERT_FALSE(found.empty());
    for(std::size_t i = 0; i < found.size(); ++i) {
        const auto &c = found[i];
        EXPECT_EQ(std::abs(c.magnetization1 - c.magnetization2), 2);
        EXPECT_LE(c.entropy_plus, o.entropy_threshold);
        EXPECT_LE(c.entropy_minus, o.entropy_threshold);
        EXPECT_GE(std::min(c.certificate.F2_plus, c.certificate.F2_minus), o.fidelity_floor);
        if(i) { EXPECT_GE(found[i - 1].certificate.A_certified, c.certificate.A_certified); }
    }
    o.max_results = 3;
    EXPECT_LE(search_product_pairs(spectra, o).size(), 3u);
    EXPECT_EQ(to_json(found.front()).at("schema_version").get<int>(), 1);
}

TEST(Anderson, UncoupledModesSitOnSingleSites) {
    const auto d     = sample_disorder(8, 8.0, 5);
    const auto modes = anderson_modes(d, 0.0);
    ASSERT_EQ(modes.size(), 8u);
    for(std::size_t j = 0; j < 8; ++j) {
        EXPECT_EQ(modes[j].k, j);
        EXPECT_NEAR(modes[j].ipr, 1.0, 1e-14);
        EXPECT_NEAR(modes[j].peak_weight, 1.0, 1e-14);
        std::vector<Spin> spins(8, Spin::down);
        spins[j] = Spin::up;
        EXPECT_NEAR(modes[j].energy, classical_energy(d, SpinConfiguration(spins)), 1e-12);
    }
}

TEST(Anderson, ModesAreOneFlipEigenstates) {
    const auto d     = sample_disorder(8, 6.0, 8);
    const auto H     = testutil::kron_hamiltonian(d.fields).cast<cplx>().eval();
    const auto modes = anderson_modes(d);
    for(const auto &m : modes) {
        const auto v = one_flip_state(m, 8);
        EXPECT_NEAR(v.norm(), 1.0, 1e-12);
        EXPECT_LE((H * v - m.energy * v).norm(), 1e-10);
        EXPECT_GE(m.ipr, 1.0 / 8.0 - 1e-12);
        EXPECT_LE(m.ipr, 1.0 + 1e-12);
    }
}

TEST(Anderson, SingleParticleReviver) {
    const auto d     = sample_disorder(10, 8.0, 9);
    const auto modes = anderson_modes(d);
    for(const auto &m : modes) {
        const auto c = single_particle_reviver(d, m.k);
        EXPECT_EQ(c.k, m.k);
        EXPECT_GE(c.A_certified, 0.0);
        EXPECT_LE(c.A_certified, 1.0);
        EXPECT_EQ(c.has_flag("below_floor"), m.peak_weight < ReviverOptions{}.fidelity_floor);
    }
    ReviverOptions strict;
    strict.fidelity_floor = 1.0;
    EXPECT_TRUE(single_particle_reviver(d, modes.front().k, strict).has_flag("below_floor"));
}

TEST(Ed, ResourceLimits) {
    EXPECT_THROW(DenseEvolver{sample_disorder(21, 1.0, 0)}, ResourceError);
    EXPECT_THROW((void)diagonalize_sector(sample_disorder(18, 1.0, 0), 0), ResourceError);
}
