#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <json.hpp>
#include <span>
#include <string>
#include <vector>

namespace mblrevive {

using cplx = std::complex<double>;

inline constexpr int disorder_schema_version = 1;

/// Random fields of one disordered chain: h_j uniform on [-W, W].
struct DisorderRealization {
    std::size_t         length   = 0;
    double              strength = 0.0;
    std::uint64_t       seed     = 0;
    std::vector<double> fields;
};

/// Draws h_j = W (2u_j - 1) with u_j the j-th value of the counter-based
/// stream for `seed`. Realizations of different lengths with the same seed
/// share their common prefix.
[[nodiscard]] DisorderRealization sample_disorder(std::size_t length, double strength, std::uint64_t seed);

/// Realization with explicitly given fields (tests, imported data).
[[nodiscard]] DisorderRealization make_realization(std::vector<double> fields, double strength, std::uint64_t seed = 0);

[[nodiscard]] nlohmann::json to_json(const DisorderRealization &d);
[[nodiscard]] DisorderRealization disorder_from_json(const nlohmann::json &j);
void save_disorder(const DisorderRealization &d, const std::string &path);
[[nodiscard]] DisorderRealization load_disorder(const std::string &path);

enum class Spin : std::uint8_t { up = 0, down = 1 };

/// Z-basis product configuration. Site 0 is the most significant bit of the
/// dense basis index; bit value 1 means spin down, so index 0 is all-up.
class SpinConfiguration {
  public:
    SpinConfiguration() = default;
    explicit SpinConfiguration(std::vector<Spin> spins) : spins_(std::move(spins)) {}

    /// k down spins followed by L-k up spins.
    static SpinConfiguration domain_wall(std::size_t length, std::size_t k);
    /// k up spins followed by L-k down spins.
    static SpinConfiguration flipped_domain_wall(std::size_t length, std::size_t k);
    static SpinConfiguration all_up(std::size_t length) { return domain_wall(length, 0); }
    static SpinConfiguration all_down(std::size_t length) { return domain_wall(length, length); }
    static SpinConfiguration from_index(std::size_t length, std::uint64_t index);
    static SpinConfiguration from_string(std::string_view s); ///< "u"/"d" characters

    [[nodiscard]] std::size_t size() const noexcept { return spins_.size(); }
    [[nodiscard]] Spin operator[](std::size_t j) const { return spins_[j]; }
    [[nodiscard]] const std::vector<Spin> &spins() const noexcept { return spins_; }
    /// 2 * total S^z = #up - #down.
    [[nodiscard]] int magnetization() const noexcept;
    [[nodiscard]] std::uint64_t index() const;
    [[nodiscard]] std::string to_string() const;
    [[nodiscard]] SpinConfiguration flipped() const;

    bool operator==(const SpinConfiguration &) const = default;

  private:
    std::vector<Spin> spins_;
};

/// U(1) charge of a physical state in units of 2 S^z.
[[nodiscard]] constexpr int spin_charge(int sigma) noexcept { return sigma == 0 ? 1 : -1; }

namespace spin {
[[nodiscard]] Eigen::Matrix2cd identity();
[[nodiscard]] Eigen::Matrix2cd sx();
[[nodiscard]] Eigen::Matrix2cd sy();
[[nodiscard]] Eigen::Matrix2cd sz();
[[nodiscard]] Eigen::Matrix2cd splus();
[[nodiscard]] Eigen::Matrix2cd sminus();
} // namespace spin

struct HamiltonianOptions {
    /// Prefactor of the exchange term; 0 gives the field-only chain.
    double exchange = 1.0;
};

/// One MPO site: a (left x right) grid of 2x2 operators, entry (s, s') =
/// <s| W |s'> with s the ket-side physical index.
class MpoSite {
  public:
    MpoSite() = default;
    MpoSite(int left_dim, int right_dim) : left_dim_(left_dim), right_dim_(right_dim), w_(static_cast<std::size_t>(left_dim * right_dim), Eigen::Matrix2cd::Zero()) {}

    [[nodiscard]] int left_dim() const noexcept { return left_dim_; }
    [[nodiscard]] int right_dim() const noexcept { return right_dim_; }
    [[nodiscard]] Eigen::Matrix2cd &at(int l, int r) { return w_[static_cast<std::size_t>(l * right_dim_ + r)]; }
    [[nodiscard]] const Eigen::Matrix2cd &at(int l, int r) const { return w_[static_cast<std::size_t>(l * right_dim_ + r)]; }
    [[nodiscard]] bool is_zero(int l, int r) const { return at(l, r).isZero(0.0); }

  private:
    int                           left_dim_  = 0;
    int                           right_dim_ = 0;
    std::vector<Eigen::Matrix2cd> w_;
};

using Mpo = std::vector<MpoSite>;

[[nodiscard]] std::vector<int> mpo_bond_dims(const Mpo &mpo);

/// H = -J sum_j S_j.S_{j+1} + sum_j h_j S^z_j, interior bond dimension 5.
[[nodiscard]] Mpo build_hamiltonian_mpo(const DisorderRealization &d, HamiltonianOptions opts = {});

/// MPO of the operator product H*H (bond dimensions multiply, 25 inside).
[[nodiscard]] Mpo build_squared_mpo(const Mpo &h);

/// Contracts an MPO into a 2^L x 2^L matrix. Test-scale only (L <= 12).
[[nodiscard]] Eigen::MatrixXcd mpo_to_dense(const Mpo &mpo);

/// Z-basis states with fixed magnetization, ascending by dense index.
class SectorBasis {
  public:
    SectorBasis(std::size_t length, int magnetization);

    [[nodiscard]] std::size_t length() const noexcept { return length_; }
    [[nodiscard]] int magnetization() const noexcept { return magnetization_; }
    [[nodiscard]] std::size_t size() const noexcept { return states_.size(); }
    [[nodiscard]] std::uint32_t state(std::size_t i) const { return states_[i]; }
    [[nodiscard]] const std::vector<std::uint32_t> &states() const noexcept { return states_; }
    /// Position of a full-space index inside the sector, or -1.
    [[nodiscard]] std::ptrdiff_t find(std::uint32_t full_index) const;

  private:
    std::size_t                length_;
    int                        magnetization_;
    std::vector<std::uint32_t> states_;
};

/// Allowed magnetizations -L, -L+2, ..., L.
[[nodiscard]] std::vector<int> sector_magnetizations(std::size_t length);

inline constexpr std::size_t dense_full_max_length   = 12;
inline constexpr std::size_t dense_sector_max_dim    = 16384;
inline constexpr std::size_t sparse_sector_max_length = 20;

/// Real symmetric full-space Hamiltonian (L <= dense_full_max_length).
[[nodiscard]] Eigen::MatrixXd dense_hamiltonian(const DisorderRealization &d, HamiltonianOptions opts = {});

/// Hamiltonian restricted to one magnetization sector, dense.
[[nodiscard]] Eigen::MatrixXd dense_hamiltonian(const DisorderRealization &d, const SectorBasis &basis, HamiltonianOptions opts = {});

/// Sector Hamiltonian in sparse form for L <= sparse_sector_max_length.
[[nodiscard]] Eigen::SparseMatrix<double> sparse_hamiltonian(const DisorderRealization &d, const SectorBasis &basis, HamiltonianOptions opts = {});

/// Diagonal energy <c|H|c> of a Z-basis configuration.
[[nodiscard]] double classical_energy(const DisorderRealization &d, const SpinConfiguration &c, HamiltonianOptions opts = {});

} // namespace mblrevive
