#pragma once

#include "mblrevive/dmrgx.hpp"
#include "mblrevive/mps.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mblrevive {

/// Superposition sum_i alpha_i e^{-i E_i t} |E_i> with environments around a
/// fixed probe site contracted once. Queries at any t cost O(r^2 chi^3).
class TimedSuperposition {
  public:
    [[nodiscard]] std::size_t probe_site() const noexcept { return site_; }
    [[nodiscard]] std::size_t components() const noexcept { return states_.size(); }
    [[nodiscard]] const std::vector<long double> &energies() const noexcept { return energies_; }
    [[nodiscard]] const std::vector<cplx> &coefficients() const noexcept { return coefficients_; }
    [[nodiscard]] const std::vector<Mps> &states() const noexcept { return states_; }
    /// Set when two components overlap by more than 1e-8.
    [[nodiscard]] const std::vector<std::string> &warnings() const noexcept { return warnings_; }

    /// <E_i| op_m |E_j> for all component pairs.
    [[nodiscard]] Eigen::MatrixXcd matrix_elements(const Eigen::Matrix2cd &op) const;

    /// Block MPS of the superposition at time t (direct sum, phases on the
    /// probe site), for cross-checks against a full contraction.
    [[nodiscard]] Mps block_state(double t) const;

    /// Normalized expectation at t from precomputed matrix elements.
    [[nodiscard]] double evaluate(const Eigen::MatrixXcd &elements, double t) const;

  private:
    friend TimedSuperposition prepare(std::vector<Mps>, std::vector<long double>, std::vector<cplx>, std::size_t);

    std::vector<Mps>                                states_;
    std::vector<long double>                        energies_;
    std::vector<cplx>                               coefficients_;
    std::size_t                                     site_ = 0;
    std::vector<std::vector<Eigen::MatrixXcd>>      left_, right_; ///< [i][j] bra i, ket j
    Eigen::MatrixXcd                                gram_;
    std::vector<std::string>                        warnings_;
};

/// Contracts the left environment of sites [0, m) and the right one of
/// (m, L) for every component pair.
[[nodiscard]] TimedSuperposition prepare(std::vector<Mps> states, std::vector<long double> energies, std::vector<cplx> coefficients, std::size_t site);

/// Convenience: energies from the eigenpairs, or recomputed in extended
/// precision from `h` when given.
[[nodiscard]] TimedSuperposition prepare(const std::vector<EigenpairMPS> &eigenpairs, std::vector<cplx> coefficients, std::size_t site,
                                         const Mpo *h = nullptr);

/// <op_m>(t), normalized by the t-dependent norm. Throws DegenerateNormError
/// for a vanishing norm and Error when the imaginary residue exceeds 1e-10.
[[nodiscard]] double expectation_at(const TimedSuperposition &ts, const Eigen::Matrix2cd &op, double t);

struct BoundedValue {
    double value      = 0.0;
    double half_width = 0.0; ///< ||op|| sqrt(eps)
    /// (lambda_max - lambda_min) sqrt(eps): the width that holds for any
    /// pair of pure states at fidelity 1 - eps.
    double rigorous_half_width = 0.0;
};

/// Superposition value plus the envelope containing the product state's value.
[[nodiscard]] BoundedValue bounded_expectation(const TimedSuperposition &ts, const Eigen::Matrix2cd &op, double t, double eps);

/// Operator norm and eigenvalue spread of a 2x2 Hermitian matrix.
[[nodiscard]] double operator_norm(const Eigen::Matrix2cd &op);
[[nodiscard]] double spectral_spread(const Eigen::Matrix2cd &op);

struct TimeHorizon {
    double t_star  = 0.0; ///< +inf for zero variance
    bool   clamped = false; ///< negative variance treated as zero
};

/// Largest t with 2 t sqrt(var) <= delta.
[[nodiscard]] TimeHorizon eigenstate_time_horizon(double variance, double delta);

struct TrajectoryPoint {
    double                t     = 0.0;
    double                value = 0.0;
    std::optional<double> half_width;
};

[[nodiscard]] std::vector<TrajectoryPoint> trajectory(const TimedSuperposition &ts, const Eigen::Matrix2cd &op, const std::vector<double> &times,
                                                      std::optional<double> eps = std::nullopt);

/// CSV with header t,value,half_width,site,op.
void write_trajectory_csv(std::ostream &out, const std::vector<TrajectoryPoint> &points, std::size_t site, const std::string &op_label);

} // namespace mblrevive
