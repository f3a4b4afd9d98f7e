#pragma once

#include "mblrevive/dmrgx.hpp"
#include "mblrevive/mps.hpp"

#include <json.hpp>
#include <string>
#include <vector>

namespace mblrevive {

/// Product of normalized local states, with their Bloch directions.
struct ProductState {
    std::vector<Eigen::Vector2cd> local;
    std::vector<Eigen::Vector3d>  directions;

    [[nodiscard]] std::size_t size() const noexcept { return local.size(); }
    [[nodiscard]] Mps to_mps() const;
    [[nodiscard]] Eigen::VectorXcd to_dense() const;
};

/// Spin-1/2 state pointing along the unit vector n.
[[nodiscard]] Eigen::Vector2cd coherent_state(const Eigen::Vector3d &n);

/// Product state from local density matrices: each site is the pure state
/// along the normalized Bloch vector. Throws AmbiguousDirectionError when a
/// Bloch vector is shorter than `min_norm`.
[[nodiscard]] ProductState product_from_rdms(const std::vector<Eigen::Matrix2cd> &rdms, double min_norm = 1e-10);
[[nodiscard]] ProductState product_approximation(const Mps &psi, double min_norm = 1e-10);

/// |<psi|phi>|^2 / <psi|psi>.
[[nodiscard]] double fidelity(const Mps &psi, const ProductState &phi);

struct LocalOverlap {
    double      f2     = 1.0;
    std::size_t j_star = 0;
};

/// min_j |<phi+_j|phi-_j>|^2, first minimizing site on ties.
[[nodiscard]] LocalOverlap min_local_overlap(const ProductState &plus, const ProductState &minus);

/// max{1 - f2 - 2 sqrt((1 - f2) eps), 0}.
[[nodiscard]] double certified_amplitude(double f2, double eps);

/// Twice the certified amplitude before clipping at zero: the bound on
/// <A(2k tau)> - <A((2k+1) tau)> that follows from the trace-distance
/// argument. Reported next to the certified amplitude.
[[nodiscard]] double oscillation_difference_bound(double f2, double eps);

/// |phi+><phi+| - |phi-><phi-| on site j.
[[nodiscard]] Eigen::Matrix2cd oscillating_observable(const ProductState &plus, const ProductState &minus, std::size_t j);

struct Certificate {
    std::size_t      k        = 0;
    double           E1       = 0.0;
    double           E2       = 0.0;
    double           tau      = 0.0;
    double           F2_plus  = 0.0;
    double           F2_minus = 0.0;
    double           eps      = 1.0;
    double           f2       = 1.0;
    std::size_t      j_star   = 0;
    Eigen::Matrix2cd A_obs    = Eigen::Matrix2cd::Zero();
    double           A_certified   = 0.0;
    double           revival_bound = 0.0; ///< 1 - 4 eps
    double           difference_bound = 0.0;
    std::vector<std::string> flags;

    [[nodiscard]] bool has_flag(const std::string &f) const;
};

inline constexpr int certificate_schema_version = 1;

/// Largest absolute difference over tau, F+-^2, eps, f2 and A_certified;
/// +inf when k or j* differ.
[[nodiscard]] double certificate_distance(const Certificate &a, const Certificate &b);

[[nodiscard]] nlohmann::json to_json(const Certificate &c);
[[nodiscard]] Certificate certificate_from_json(const nlohmann::json &j);

/// Pairs closer in energy than this are rejected.
inline constexpr double degeneracy_tolerance = 1e-12;

/// Multiplies the state by a phase so that <seed|psi> is real positive.
/// Leaves it untouched if the overlap vanishes.
[[nodiscard]] Mps fix_phase(const Mps &psi, const SpinConfiguration &seed);

struct PairSuperposition {
    Mps    plus;
    Mps    minus;
    double tau = 0.0;
};

/// (|E1> +- |E2>)/sqrt 2 renormalized, after phase fixing each eigenstate
/// against its seed. Throws DegeneracyError for |E1 - E2| <= 1e-12 and
/// ValidationError for unconverged inputs unless `allow_unconverged`.
[[nodiscard]] PairSuperposition pair_superpositions(const EigenpairMPS &e1, const EigenpairMPS &e2, bool allow_unconverged = false);

/// Full chain: superpose, approximate, fidelities, f2, A, bounds. A site
/// without a Bloch direction yields A_certified = 0 and a flag.
[[nodiscard]] Certificate certify(const EigenpairMPS &e1, const EigenpairMPS &e2, std::size_t k, bool allow_unconverged = false);

/// Remaining steps once Psi+- and their product approximations are known.
/// Shared by the MPS pipeline and the dense oracle.
[[nodiscard]] Certificate assemble_certificate(std::size_t k, double E1, double E2, double F2_plus, double F2_minus, const ProductState &plus,
                                               const ProductState &minus);

} // namespace mblrevive
