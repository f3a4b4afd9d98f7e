#pragma once

#include "mblrevive/model.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <optional>
#include <span>
#include <vector>

namespace mblrevive {

/// Site tensor A^{[j]s}: one (left x right) matrix per physical state,
/// index 0 = up, 1 = down.
using SiteTensor = std::array<Eigen::MatrixXcd, 2>;

/// U(1) labels (2 S^z of everything left of the bond) for bonds 0..L.
using BondCharges = std::vector<std::vector<int>>;

/// Open-boundary matrix product state. Immutable once built: every
/// operation below returns a new value.
class Mps {
  public:
    Mps() = default;
    /// Checks open boundaries, bond consistency and, if charges are given,
    /// the U(1) selection rule; throws ValidationError otherwise.
    explicit Mps(std::vector<SiteTensor> sites, std::optional<BondCharges> charges = std::nullopt, std::optional<std::size_t> center = std::nullopt);

    [[nodiscard]] std::size_t size() const noexcept { return sites_.size(); }
    [[nodiscard]] const SiteTensor &site(std::size_t j) const { return sites_.at(j); }
    [[nodiscard]] const std::vector<SiteTensor> &sites() const noexcept { return sites_; }
    /// L+1 entries, first and last equal to 1.
    [[nodiscard]] std::vector<Eigen::Index> bond_dims() const;
    [[nodiscard]] Eigen::Index max_bond_dim() const;
    [[nodiscard]] const std::optional<BondCharges> &charges() const noexcept { return charges_; }
    /// Canonical center if the state is known to be in mixed-canonical form.
    [[nodiscard]] std::optional<std::size_t> center() const noexcept { return center_; }

    [[nodiscard]] Mps without_charges() const;
    /// Multiplies site 0 by a scalar (phase fixing, normalization).
    [[nodiscard]] Mps scaled(cplx factor) const;

  private:
    std::vector<SiteTensor>    sites_;
    std::optional<BondCharges> charges_;
    std::optional<std::size_t> center_;
};

/// Bond-dimension-1 state from normalized local 2-vectors.
[[nodiscard]] Mps from_product(std::span<const Eigen::Vector2cd> states);

/// Z-basis configuration, carrying U(1) labels.
[[nodiscard]] Mps from_configuration(const SpinConfiguration &c);

/// Exact MPS of a dense vector by sequential SVD; singular values below
/// `cutoff` relative to the largest at each bond are dropped.
[[nodiscard]] Mps from_dense(const Eigen::VectorXcd &psi, std::size_t length, double cutoff = 1e-15);

/// Dense amplitude vector (L <= 20).
[[nodiscard]] Eigen::VectorXcd to_dense(const Mps &psi);

/// <a|b>.
[[nodiscard]] cplx overlap(const Mps &a, const Mps &b);
[[nodiscard]] double norm_squared(const Mps &psi);

/// <a|O|b>, unnormalized.
[[nodiscard]] cplx mpo_matrix_element(const Mps &a, const Mpo &o, const Mps &b);

/// <psi|O|psi> / <psi|psi>; the imaginary part is dropped.
[[nodiscard]] double expect_mpo(const Mps &psi, const Mpo &o);

/// Same contraction in 80-bit extended precision. Used where energies enter
/// phases at very long times.
[[nodiscard]] long double expect_mpo_extended(const Mps &psi, const Mpo &o);

struct EnergyStats {
    double energy   = 0.0;
    double variance = 0.0; ///< signed; tiny negative values are rounding noise
    double rescaled = 0.0; ///< variance / energy^2, or variance if |E| ~ 0
    bool   rescaled_is_absolute = false;
};

[[nodiscard]] EnergyStats energy_variance(const Mps &psi, const Mpo &h, const Mpo &h2);

/// Direct-sum superposition sum_i c_i |psi_i>, bond dims adding up. The
/// coefficients sit on the first site; the result is not normalized.
[[nodiscard]] Mps superpose(std::span<const Mps> states, std::span<const cplx> coefficients);

/// Normalized single-site reduced density matrix, entry (s, s') = <s|rho|s'>.
[[nodiscard]] Eigen::Matrix2cd single_site_rdm(const Mps &psi, std::size_t site);
/// All single-site density matrices in one pair of environment sweeps.
[[nodiscard]] std::vector<Eigen::Matrix2cd> single_site_rdms(const Mps &psi);

/// Pauli expectation vector r with rho = 1/2 + r.S.
[[nodiscard]] Eigen::Vector3d bloch_vector(const Eigen::Matrix2cd &rho);

/// Mixed-canonical form with the given center: sites left of it are left
/// isometries, sites right of it right isometries. Charges are dropped.
[[nodiscard]] Mps canonicalize(const Mps &psi, std::size_t center);

/// max | sum_s A^s+ A^s - 1 | over sites left of the center, and the mirror
/// quantity for sites right of it.
[[nodiscard]] double left_isometry_residual(const Mps &psi, std::size_t site);
[[nodiscard]] double right_isometry_residual(const Mps &psi, std::size_t site);

struct CompressResult {
    Mps                 state;
    std::vector<double> discarded; ///< squared Schmidt weight dropped at bonds 1..L-1
    [[nodiscard]] double total_discarded() const;
};

/// SVD truncation to at most `max_bond` states per bond, also dropping
/// singular values below `relative_cutoff` times the largest. The output
/// keeps the input norm.
[[nodiscard]] CompressResult compress(const Mps &psi, Eigen::Index max_bond, double relative_cutoff = 1e-14);

/// Schmidt decomposition across the bond left of `bond_site` (sites
/// [0, bond_site) vs [bond_site, L)).
struct SchmidtSplit {
    std::vector<SiteTensor> left;   ///< left isometries, Schmidt basis on their right bond
    Eigen::VectorXd         values; ///< normalized Schmidt coefficients, descending
    std::vector<SiteTensor> right;  ///< right isometries, Schmidt basis on their left bond
};
[[nodiscard]] SchmidtSplit schmidt_split(const Mps &psi, std::size_t bond_site);
[[nodiscard]] Eigen::VectorXd schmidt_values(const Mps &psi, std::size_t bond_site);

/// Local transfer operator T_O = sum_{s,s'} O_{ss'} (A_bra^s)^* (x) A_ket^{s'}
/// acting on bond-pair environments (bra x ket matrices).
class TransferOp {
  public:
    TransferOp(SiteTensor bra, SiteTensor ket, Eigen::Matrix2cd op = Eigen::Matrix2cd::Identity());

    /// E -> sum O_{ss'} A_bra^{s+} E A_ket^{s'}
    [[nodiscard]] Eigen::MatrixXcd apply_left(const Eigen::MatrixXcd &env) const;
    /// F -> sum O_{ss'} conj(A_bra^s) F A_ket^{s'T}
    [[nodiscard]] Eigen::MatrixXcd apply_right(const Eigen::MatrixXcd &env) const;
    /// Matrix acting on column-major vec(E) from the left.
    [[nodiscard]] Eigen::MatrixXcd dense() const;

  private:
    SiteTensor       bra_;
    SiteTensor       ket_;
    Eigen::Matrix2cd op_;
};

/// Left environment after sites [0, upto): bra x ket.
[[nodiscard]] Eigen::MatrixXcd left_environment(const Mps &bra, const Mps &ket, std::size_t upto);
/// Right environment of sites [from, L).
[[nodiscard]] Eigen::MatrixXcd right_environment(const Mps &bra, const Mps &ket, std::size_t from);

} // namespace mblrevive
