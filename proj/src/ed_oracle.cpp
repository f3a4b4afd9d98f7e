#include "mblrevive/ed_oracle.hpp"

#include "mblrevive/errors.hpp"
#include "mblrevive/linalg.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

namespace mblrevive {

using Eigen::Index;

Eigen::VectorXcd SpectrumSector::full_vector(std::size_t i) const {
    if(basis.length() > sparse_sector_max_length) throw ResourceError("full-space vectors limited to L <= 20");
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(Index{1} << basis.length());
    for(std::size_t r = 0; r < basis.size(); ++r) v(basis.state(r)) = vectors(static_cast<Index>(r), static_cast<Index>(i));
    return v;
}

long double rayleigh_quotient(const Eigen::SparseMatrix<double> &h, const Eigen::VectorXd &v) {
    long double num = 0.0L, den = 0.0L;
    for(Index c = 0; c < h.outerSize(); ++c)
        for(Eigen::SparseMatrix<double>::InnerIterator it(h, c); it; ++it)
            num += static_cast<long double>(v(it.row())) * static_cast<long double>(it.value()) * static_cast<long double>(v(it.col()));
    for(Index i = 0; i < v.size(); ++i) den += static_cast<long double>(v(i)) * static_cast<long double>(v(i));
    return num / den;
}

SpectrumSector diagonalize_sector(const DisorderRealization &d, int magnetization, HamiltonianOptions opts) {
    if(d.length > sparse_sector_max_length) throw ResourceError("sector diagonalization limited to L <= 20");
    SectorBasis basis(d.length, magnetization);
    if(basis.size() > dense_sector_max_dim)
        throw ResourceError("sector of dimension " + std::to_string(basis.size()) + " exceeds the dense limit " + std::to_string(dense_sector_max_dim));
    auto eig = linalg::eigh(dense_hamiltonian(d, basis, opts));
    const auto sparse = sparse_hamiltonian(d, basis, opts);
    std::vector<long double> refined(basis.size());
    for(std::size_t i = 0; i < basis.size(); ++i) refined[i] = rayleigh_quotient(sparse, eig.vectors.col(static_cast<Index>(i)));
    return SpectrumSector{std::move(basis), std::move(eig.values), std::move(eig.vectors), std::move(refined)};
}

// ---------------------------------------------------------------------------

Eigen::Matrix2cd dense_rdm(const DenseState &psi, std::size_t length, std::size_t site) {
    if(site >= length) throw ValidationError("site out of range");
    if(psi.size() != (Index{1} << length)) throw LengthMismatchError("dense vector size is not 2^L");
    const std::uint64_t mask = std::uint64_t{1} << (length - 1 - site);
    Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
    for(std::uint64_t i = 0; i < static_cast<std::uint64_t>(psi.size()); ++i) {
        if(i & mask) continue;
        const cplx up = psi(static_cast<Index>(i)), down = psi(static_cast<Index>(i | mask));
        rho(0, 0) += std::norm(up);
        rho(1, 1) += std::norm(down);
        rho(0, 1) += up * std::conj(down);
    }
    rho(1, 0) = std::conj(rho(0, 1));
    const double tr = rho.trace().real();
    if(!(tr > 0.0)) throw DegenerateNormError("reduced density matrix of a zero vector");
    return rho / tr;
}

std::vector<Eigen::Matrix2cd> dense_rdms(const DenseState &psi, std::size_t length) {
    std::vector<Eigen::Matrix2cd> out;
    for(std::size_t j = 0; j < length; ++j) out.push_back(dense_rdm(psi, length, j));
    return out;
}

double sublattice_entropy(const DenseState &psi, std::size_t length) {
    if(psi.size() != (Index{1} << length)) throw LengthMismatchError("dense vector size is not 2^L");
    const std::size_t n_even = (length + 1) / 2, n_odd = length / 2;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(Index{1} << n_even, Index{1} << n_odd);
    for(std::uint64_t i = 0; i < static_cast<std::uint64_t>(psi.size()); ++i) {
        std::uint64_t a = 0, b = 0;
        for(std::size_t j = 0; j < length; ++j) {
            const std::uint64_t bit = (i >> (length - 1 - j)) & 1U;
            if(j % 2 == 0)
                a = (a << 1U) | bit;
            else
                b = (b << 1U) | bit;
        }
        m(static_cast<Index>(a), static_cast<Index>(b)) = psi(static_cast<Index>(i));
    }
    // Spectrum of the smaller reduced density matrix.
    const Eigen::MatrixXcd rho = m.cols() <= m.rows() ? Eigen::MatrixXcd(m.adjoint() * m) : Eigen::MatrixXcd(m * m.adjoint());
    const Eigen::VectorXd  p   = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(rho, Eigen::EigenvaluesOnly).eigenvalues();
    const double           tr  = p.sum();
    double                 s   = 0.0;
    for(Index i = 0; i < p.size(); ++i) {
        const double x = p(i) / tr;
        if(x > 0.0) s -= x * std::log(x);
    }
    return s;
}

SpinConfiguration dominant_configuration(const DenseState &psi, std::size_t length) {
    Index best = 0;
    psi.cwiseAbs2().maxCoeff(&best);
    return SpinConfiguration::from_index(length, static_cast<std::uint64_t>(best));
}

namespace {

DenseState phase_fixed(const DenseEigenpair &e) {
    DenseState v = e.vector / e.vector.norm();
    const cplx a = v(static_cast<Index>(e.seed.index()));
    if(std::abs(a) > 0.0) v *= std::conj(a) / std::abs(a);
    return v;
}

} // namespace

Certificate certify_dense(const DenseEigenpair &e1, const DenseEigenpair &e2, std::size_t k) {
    const std::size_t L = e1.seed.size();
    if(e2.seed.size() != L || e1.vector.size() != e2.vector.size()) throw LengthMismatchError("dense eigenpairs have different lengths");
    const double E1 = static_cast<double>(e1.energy), E2 = static_cast<double>(e2.energy);
    if(std::abs(E1 - E2) <= degeneracy_tolerance) throw DegeneracyError("eigenpair energies coincide");

    const DenseState v1 = phase_fixed(e1), v2 = phase_fixed(e2);
    DenseState plus  = v1 + v2;
    DenseState minus = v1 - v2;
    plus.normalize();
    minus.normalize();
    Certificate c;
    try {
        const auto pp = product_from_rdms(dense_rdms(plus, L));
        const auto pm = product_from_rdms(dense_rdms(minus, L));
        const double fp = std::norm(plus.dot(pp.to_dense()));
        const double fm = std::norm(minus.dot(pm.to_dense()));
        c = assemble_certificate(k, E1, E2, fp, fm, pp, pm);
    } catch(const AmbiguousDirectionError &err) {
        c.k                = k;
        c.E1               = E1;
        c.E2               = E2;
        c.tau              = std::numbers::pi / std::abs(E1 - E2);
        c.j_star           = err.site();
        c.revival_bound    = 1.0 - 4.0 * c.eps;
        c.difference_bound = oscillation_difference_bound(c.f2, c.eps);
        c.flags.push_back("ambiguous_direction");
    }
    return c;
}

EigenMatch match_eigenvector(const SpectrumSector &s, const DenseState &psi) {
    Eigen::VectorXcd x(static_cast<Index>(s.size()));
    for(std::size_t r = 0; r < s.size(); ++r) x(static_cast<Index>(r)) = psi(s.basis.state(r));
    const double n2 = psi.squaredNorm();
    if(!(n2 > 0.0)) throw DegenerateNormError("cannot match a zero vector");
    const Eigen::VectorXd o = (s.vectors.transpose().cast<cplx>() * x).cwiseAbs2() / n2;
    EigenMatch m;
    Index      best = 0;
    m.overlap       = o.maxCoeff(&best);
    m.index         = static_cast<std::size_t>(best);
    return m;
}

// ---------------------------------------------------------------------------

std::vector<CandidatePair> search_product_pairs(const std::vector<SpectrumSector> &spectra, const SearchOptions &opts) {
    std::vector<CandidatePair> out;
    if(spectra.empty()) return out;
    const std::size_t L = spectra.front().basis.length();

    // Phase-fixed full-space eigenvectors per sector.
    std::vector<std::vector<DenseEigenpair>> states(spectra.size());
    for(std::size_t s = 0; s < spectra.size(); ++s)
        for(std::size_t i = 0; i < spectra[s].size(); ++i) {
            DenseEigenpair e;
            e.vector = spectra[s].full_vector(i);
            e.energy = spectra[s].refined[i];
            e.seed   = dominant_configuration(e.vector, L);
            e.vector = phase_fixed(e);
            states[s].push_back(std::move(e));
        }

    for(std::size_t s1 = 0; s1 < spectra.size(); ++s1)
        for(std::size_t s2 = s1; s2 < spectra.size(); ++s2) {
            const int m1 = spectra[s1].magnetization(), m2 = spectra[s2].magnetization();
            if(!opts.arbitrary_pairs && std::abs(m1 - m2) != 2) continue;
            for(std::size_t i = 0; i < states[s1].size(); ++i)
                for(std::size_t j = (s1 == s2 ? i + 1 : 0); j < states[s2].size(); ++j) {
                    const auto &a = states[s1][i];
                    const auto &b = states[s2][j];
                    if(std::abs(static_cast<double>(a.energy - b.energy)) <= degeneracy_tolerance) continue;
                    const double sp = sublattice_entropy((a.vector + b.vector) / std::numbers::sqrt2, L);
                    if(sp > opts.entropy_threshold) continue;
                    const double sm = sublattice_entropy((a.vector - b.vector) / std::numbers::sqrt2, L);
                    if(sm > opts.entropy_threshold) continue;
                    Certificate c = certify_dense(a, b, 0);
                    if(std::min(c.F2_plus, c.F2_minus) < opts.fidelity_floor) continue;
                    out.push_back({m1, m2, i, j, sp, sm, std::move(c)});
                }
        }
    std::stable_sort(out.begin(), out.end(), [](const CandidatePair &x, const CandidatePair &y) { return x.certificate.A_certified > y.certificate.A_certified; });
    if(opts.max_results > 0 && out.size() > opts.max_results) out.resize(opts.max_results);
    return out;
}

nlohmann::json to_json(const CandidatePair &c) {
    return {{"schema_version", 1},
            {"magnetization1", c.magnetization1},
            {"index1", c.index1},
            {"magnetization2", c.magnetization2},
            {"index2", c.index2},
            {"entropy_plus", c.entropy_plus},
            {"entropy_minus", c.entropy_minus},
            {"certificate", to_json(c.certificate)}};
}

// ---------------------------------------------------------------------------

DenseEvolver::DenseEvolver(DisorderRealization d, HamiltonianOptions opts) : d_(std::move(d)), opts_(opts) {
    if(d_.length > sparse_sector_max_length) throw ResourceError("dense evolution limited to L <= 20");
}

const SpectrumSector &DenseEvolver::sector(int magnetization) {
    auto &slot = sectors_[magnetization];
    if(!slot) slot = std::make_unique<SpectrumSector>(diagonalize_sector(d_, magnetization, opts_));
    return *slot;
}

DenseEigenpair matched_eigenpair(DenseEvolver &ed, const DenseState &psi, const SpinConfiguration &seed, EigenMatch *match) {
    if(seed.size() != ed.length()) throw LengthMismatchError("seed and evolver lengths differ");
    const auto &s = ed.sector(seed.magnetization());
    const auto  m = match_eigenvector(s, psi);
    if(match) *match = m;
    return {s.full_vector(m.index), s.refined[m.index], seed};
}

DenseState DenseEvolver::evolve(const DenseState &psi, double t) {
    const std::size_t L = d_.length;
    if(psi.size() != (Index{1} << L)) throw LengthMismatchError("dense vector size is not 2^L");
    DenseState out = DenseState::Zero(psi.size());
    for(int m : sector_magnetizations(L)) {
        const int downs = (static_cast<int>(L) - m) / 2;
        bool present = false;
        for(Index i = 0; i < psi.size() && !present; ++i) present = psi(i) != cplx(0.0) && std::popcount(static_cast<std::uint64_t>(i)) == downs;
        if(!present) continue;
        const auto &s = sector(m);
        Eigen::VectorXcd x(static_cast<Index>(s.size()));
        for(std::size_t r = 0; r < s.size(); ++r) x(static_cast<Index>(r)) = psi(s.basis.state(r));
        Eigen::VectorXcd c = s.vectors.transpose().cast<cplx>() * x;
        for(Index i = 0; i < c.size(); ++i) c(i) *= linalg::expi_neg(s.refined[static_cast<std::size_t>(i)] * static_cast<long double>(t));
        const Eigen::VectorXcd y = s.vectors.cast<cplx>() * c;
        for(std::size_t r = 0; r < s.size(); ++r) out(s.basis.state(r)) = y(static_cast<Index>(r));
    }
    return out;
}

DenseState evolve_dense(const DenseState &psi, const DisorderRealization &d, double t) {
    DenseEvolver ev(d);
    return ev.evolve(psi, t);
}

// ---------------------------------------------------------------------------

std::vector<AndersonMode> anderson_modes(const DisorderRealization &d, double hopping_scale) {
    const std::size_t L = d.length;
    if(L < 2 || L > sparse_sector_max_length) throw InvalidSizeError("anderson_modes supports 2 <= L <= 20");
    const SectorBasis basis(L, -static_cast<int>(L) + 2);
    Eigen::MatrixXd   h = dense_hamiltonian(d, basis);
    for(Index r = 0; r < h.rows(); ++r)
        for(Index c = 0; c < h.cols(); ++c)
            if(r != c) h(r, c) *= hopping_scale;
    const auto eig = linalg::eigh(h);

    // Sector position -> site of the up spin.
    std::vector<std::size_t> site_of(basis.size());
    for(std::size_t r = 0; r < basis.size(); ++r) {
        const std::uint32_t up_bits = ~basis.state(r) & ((1U << L) - 1U);
        site_of[r]                  = L - 1 - static_cast<std::size_t>(std::countr_zero(up_bits));
    }

    std::vector<AndersonMode> modes;
    for(Index n = 0; n < eig.values.size(); ++n) {
        AndersonMode m;
        m.amplitudes = Eigen::VectorXd::Zero(static_cast<Index>(L));
        for(std::size_t r = 0; r < basis.size(); ++r) m.amplitudes(static_cast<Index>(site_of[r])) = eig.vectors(static_cast<Index>(r), n);
        Index k = 0;
        m.amplitudes.cwiseAbs().maxCoeff(&k);
        if(m.amplitudes(k) < 0.0) m.amplitudes = -m.amplitudes;
        m.k           = static_cast<std::size_t>(k);
        m.energy      = eig.values(n);
        m.ipr         = m.amplitudes.array().pow(4).sum();
        m.peak_weight = m.amplitudes(k) * m.amplitudes(k);
        modes.push_back(std::move(m));
    }
    std::stable_sort(modes.begin(), modes.end(), [](const AndersonMode &a, const AndersonMode &b) { return a.k < b.k; });
    return modes;
}

DenseState one_flip_state(const AndersonMode &mode, std::size_t length) {
    if(static_cast<std::size_t>(mode.amplitudes.size()) != length) throw LengthMismatchError("mode length differs from chain length");
    DenseState v = DenseState::Zero(Index{1} << length);
    const std::uint64_t all_down = (std::uint64_t{1} << length) - 1U;
    for(std::size_t j = 0; j < length; ++j) v(static_cast<Index>(all_down & ~(std::uint64_t{1} << (length - 1 - j)))) = mode.amplitudes(static_cast<Index>(j));
    return v;
}

Certificate single_particle_reviver(const DisorderRealization &d, std::size_t k, const ReviverOptions &opts) {
    const std::size_t L = d.length;
    const auto modes = anderson_modes(d, opts.hopping_scale);
    const auto it    = std::find_if(modes.begin(), modes.end(), [&](const AndersonMode &m) { return m.k == k; });
    if(it == modes.end()) throw ValidationError("no one-flip mode is centered at site " + std::to_string(k));

    DenseEigenpair excited;
    excited.vector = one_flip_state(*it, L);
    excited.energy = it->energy;
    std::vector<Spin> spins(L, Spin::down);
    spins[k]       = Spin::up;
    excited.seed   = SpinConfiguration(spins);

    DenseEigenpair vacuum;
    vacuum.seed   = SpinConfiguration::all_down(L);
    vacuum.vector = DenseState::Zero(Index{1} << L);
    vacuum.vector(static_cast<Index>(vacuum.seed.index())) = 1.0;
    vacuum.energy = classical_energy(d, vacuum.seed);

    Certificate c = certify_dense(excited, vacuum, k);
    if(it->peak_weight < opts.fidelity_floor) c.flags.push_back("below_floor");
    return c;
}

} // namespace mblrevive
