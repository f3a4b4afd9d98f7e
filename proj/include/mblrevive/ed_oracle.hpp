#pragma once

#include "mblrevive/certifier.hpp"
#include "mblrevive/model.hpp"

#include <Eigen/Dense>

#include <map>
#include <memory>
#include <vector>

namespace mblrevive {

/// Full spectrum of one magnetization sector.
struct SpectrumSector {
    SectorBasis              basis;
    Eigen::VectorXd          values;  ///< ascending
    Eigen::MatrixXd          vectors; ///< columns over the sector basis
    std::vector<long double> refined; ///< Rayleigh quotients in extended precision

    [[nodiscard]] int magnetization() const noexcept { return basis.magnetization(); }
    [[nodiscard]] std::size_t size() const noexcept { return basis.size(); }
    /// Eigenvector i embedded in the 2^L space.
    [[nodiscard]] Eigen::VectorXcd full_vector(std::size_t i) const;
};

/// Dense diagonalization of one sector (dimension <= dense_sector_max_dim,
/// L <= sparse_sector_max_length).
[[nodiscard]] SpectrumSector diagonalize_sector(const DisorderRealization &d, int magnetization, HamiltonianOptions opts = {});

/// v^T H v accumulated in extended precision over the sparse sector matrix.
[[nodiscard]] long double rayleigh_quotient(const Eigen::SparseMatrix<double> &h, const Eigen::VectorXd &v);

/// Amplitude vector in the 2^L space, site 0 the most significant bit.
using DenseState = Eigen::VectorXcd;

/// Normalized single-site density matrix by explicit partial trace.
[[nodiscard]] Eigen::Matrix2cd dense_rdm(const DenseState &psi, std::size_t length, std::size_t site);
[[nodiscard]] std::vector<Eigen::Matrix2cd> dense_rdms(const DenseState &psi, std::size_t length);

/// Von Neumann entropy (nats) between the even and the odd sites.
[[nodiscard]] double sublattice_entropy(const DenseState &psi, std::size_t length);

/// An eigenvector in the full space with its energy and the Z configuration
/// used to fix its phase.
struct DenseEigenpair {
    DenseState        vector;
    long double       energy = 0.0L;
    SpinConfiguration seed;
};

/// Largest-weight Z configuration of a state (ties: lowest index).
[[nodiscard]] SpinConfiguration dominant_configuration(const DenseState &psi, std::size_t length);

/// Certificate computed with dense vectors only.
[[nodiscard]] Certificate certify_dense(const DenseEigenpair &e1, const DenseEigenpair &e2, std::size_t k);

/// Index of the sector eigenvector with the largest squared overlap.
struct EigenMatch {
    std::size_t index   = 0;
    double      overlap = 0.0; ///< squared, normalized
};
[[nodiscard]] EigenMatch match_eigenvector(const SpectrumSector &s, const DenseState &psi);

struct SearchOptions {
    double entropy_threshold = 0.05; ///< nats, applied to both superpositions
    double fidelity_floor    = 0.99; ///< min F+-^2
    /// Also consider pairs within one sector and across any two sectors.
    bool arbitrary_pairs = false;
    std::size_t max_results = 0; ///< 0 keeps all
};

struct CandidatePair {
    int         magnetization1 = 0, magnetization2 = 0;
    std::size_t index1 = 0, index2 = 0;
    double      entropy_plus = 0.0, entropy_minus = 0.0;
    Certificate certificate;
};

/// Pairs of eigenstates whose +- superpositions both have low sublattice
/// entropy and high product fidelity, ranked by certified amplitude.
[[nodiscard]] std::vector<CandidatePair> search_product_pairs(const std::vector<SpectrumSector> &spectra, const SearchOptions &opts = {});

[[nodiscard]] nlohmann::json to_json(const CandidatePair &c);

/// exp(-iHt) by sector-blocked spectral decomposition. Sector spectra are
/// computed lazily and cached; phases use extended-precision energies.
class DenseEvolver {
  public:
    explicit DenseEvolver(DisorderRealization d, HamiltonianOptions opts = {});

    [[nodiscard]] DenseState evolve(const DenseState &psi, double t);
    [[nodiscard]] const SpectrumSector &sector(int magnetization);
    [[nodiscard]] std::size_t length() const noexcept { return d_.length; }

  private:
    DisorderRealization                              d_;
    HamiltonianOptions                               opts_;
    std::map<int, std::unique_ptr<SpectrumSector>> sectors_;
};

/// ED eigenvector of the seed's sector with the largest overlap with `psi`,
/// carrying the refined energy and the seed.
[[nodiscard]] DenseEigenpair matched_eigenpair(DenseEvolver &ed, const DenseState &psi, const SpinConfiguration &seed, EigenMatch *match = nullptr);

[[nodiscard]] DenseState evolve_dense(const DenseState &psi, const DisorderRealization &d, double t);

struct AndersonMode {
    std::size_t     k = 0; ///< site of largest amplitude
    Eigen::VectorXd amplitudes;
    double          energy = 0.0; ///< many-body energy of the one-flip state
    double          ipr    = 0.0;
    double          peak_weight = 0.0; ///< |amplitude|^2 at k
};

/// Eigenmodes of the block with one up spin over the all-down vacuum. The
/// nearest-neighbor hopping is multiplied by `hopping_scale`. Sorted by k.
[[nodiscard]] std::vector<AndersonMode> anderson_modes(const DisorderRealization &d, double hopping_scale = 1.0);

/// Dense one-flip state sum_j a_j |..down, up_j, down..>.
[[nodiscard]] DenseState one_flip_state(const AndersonMode &mode, std::size_t length);

struct ReviverOptions {
    double hopping_scale  = 1.0;
    double fidelity_floor = 0.99;
};

/// Certificate for (|vacuum> + |mode k>)/sqrt 2 with the vacuum as second
/// eigenstate. Flags "below_floor" when the mode's peak weight is under the
/// fidelity floor.
[[nodiscard]] Certificate single_particle_reviver(const DisorderRealization &d, std::size_t k, const ReviverOptions &opts = {});

} // namespace mblrevive
