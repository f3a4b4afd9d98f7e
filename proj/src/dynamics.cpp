#include "mblrevive/dynamics.hpp"

#include "mblrevive/errors.hpp"
#include "mblrevive/linalg.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

namespace mblrevive {

TimedSuperposition prepare(std::vector<Mps> states, std::vector<long double> energies, std::vector<cplx> coefficients, std::size_t site) {
    if(states.empty()) throw ValidationError("superposition needs at least one component");
    if(energies.size() != states.size() || coefficients.size() != states.size()) throw LengthMismatchError("one energy and one coefficient per component");
    const std::size_t L = states.front().size();
    for(const auto &s : states)
        if(s.size() != L) throw LengthMismatchError("components have different lengths");
    if(site >= L) throw ValidationError("probe site out of range");

    TimedSuperposition ts;
    const std::size_t  r = states.size();
    ts.left_.assign(r, std::vector<Eigen::MatrixXcd>(r));
    ts.right_.assign(r, std::vector<Eigen::MatrixXcd>(r));
    ts.gram_ = Eigen::MatrixXcd(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r));
    for(std::size_t i = 0; i < r; ++i)
        for(std::size_t j = 0; j < r; ++j) {
            ts.left_[i][j]  = left_environment(states[i], states[j], site);
            ts.right_[i][j] = right_environment(states[i], states[j], site + 1);
            ts.gram_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = overlap(states[i], states[j]);
        }
    for(std::size_t i = 0; i < r; ++i)
        for(std::size_t j = i + 1; j < r; ++j) {
            const auto   ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
            const double o  = std::abs(ts.gram_(ii, jj)) / std::sqrt(ts.gram_(ii, ii).real() * ts.gram_(jj, jj).real());
            if(o > 1e-8) ts.warnings_.push_back("components " + std::to_string(i) + " and " + std::to_string(j) + " overlap by " + std::to_string(o));
        }
    ts.states_       = std::move(states);
    ts.energies_     = std::move(energies);
    ts.coefficients_ = std::move(coefficients);
    ts.site_         = site;
    return ts;
}

TimedSuperposition prepare(const std::vector<EigenpairMPS> &eigenpairs, std::vector<cplx> coefficients, std::size_t site, const Mpo *h) {
    std::vector<Mps>         states;
    std::vector<long double> energies;
    for(const auto &e : eigenpairs) {
        states.push_back(e.state);
        energies.push_back(h ? expect_mpo_extended(e.state, *h) : static_cast<long double>(e.energy));
    }
    return prepare(std::move(states), std::move(energies), std::move(coefficients), site);
}

Eigen::MatrixXcd TimedSuperposition::matrix_elements(const Eigen::Matrix2cd &op) const {
    const auto       r = static_cast<Eigen::Index>(states_.size());
    Eigen::MatrixXcd g(r, r);
    for(Eigen::Index i = 0; i < r; ++i)
        for(Eigen::Index j = 0; j < r; ++j) {
            const TransferOp t(states_[static_cast<std::size_t>(i)].site(site_), states_[static_cast<std::size_t>(j)].site(site_), op);
            const auto      &right = right_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            g(i, j) = (t.apply_left(left_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]).array() * right.array()).sum();
        }
    return g;
}

double TimedSuperposition::evaluate(const Eigen::MatrixXcd &elements, double t) const {
    const std::size_t r = states_.size();
    cplx num = 0.0, den = 0.0;
    for(std::size_t i = 0; i < r; ++i)
        for(std::size_t j = 0; j < r; ++j) {
            // conj(alpha_i e^{-i E_i t}) alpha_j e^{-i E_j t}
            const cplx w = std::conj(coefficients_[i]) * coefficients_[j] * linalg::expi_neg((energies_[j] - energies_[i]) * static_cast<long double>(t));
            const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
            num += w * elements(ii, jj);
            den += w * gram_(ii, jj);
        }
    if(std::abs(den) < 1e-300) throw DegenerateNormError("superposition norm vanishes");
    const cplx v = num / den;
    if(std::abs(v.imag()) > 1e-10 * std::max(1.0, std::abs(v.real()))) throw Error("expectation value has imaginary residue " + std::to_string(v.imag()));
    return v.real();
}

Mps TimedSuperposition::block_state(double t) const {
    std::vector<Mps> parts;
    for(std::size_t i = 0; i < states_.size(); ++i) {
        auto sites = states_[i].sites();
        const cplx phase = coefficients_[i] * linalg::expi_neg(energies_[i] * static_cast<long double>(t));
        for(auto &m : sites[site_]) m *= phase;
        parts.emplace_back(std::move(sites));
    }
    const std::vector<cplx> ones(parts.size(), 1.0);
    return superpose(parts, ones);
}

double expectation_at(const TimedSuperposition &ts, const Eigen::Matrix2cd &op, double t) { return ts.evaluate(ts.matrix_elements(op), t); }

double operator_norm(const Eigen::Matrix2cd &op) {
    const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd>(op, Eigen::EigenvaluesOnly).eigenvalues();
    return ev.cwiseAbs().maxCoeff();
}

double spectral_spread(const Eigen::Matrix2cd &op) {
    const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd>(op, Eigen::EigenvaluesOnly).eigenvalues();
    return ev(1) - ev(0);
}

BoundedValue bounded_expectation(const TimedSuperposition &ts, const Eigen::Matrix2cd &op, double t, double eps) {
    if(!(eps >= 0.0 && eps < 1.0)) throw ValidationError("bounded_expectation needs eps in [0, 1)");
    BoundedValue b;
    b.value               = expectation_at(ts, op, t);
    b.half_width          = operator_norm(op) * std::sqrt(eps);
    b.rigorous_half_width = spectral_spread(op) * std::sqrt(eps);
    return b;
}

TimeHorizon eigenstate_time_horizon(double variance, double delta) {
    if(!(delta > 0.0)) throw ValidationError("deviation budget must be positive");
    TimeHorizon h;
    if(variance < 0.0) {
        h.clamped = true;
        variance  = 0.0;
    }
    h.t_star = variance == 0.0 ? std::numeric_limits<double>::infinity() : delta / (2.0 * std::sqrt(variance));
    return h;
}

std::vector<TrajectoryPoint> trajectory(const TimedSuperposition &ts, const Eigen::Matrix2cd &op, const std::vector<double> &times, std::optional<double> eps) {
    const Eigen::MatrixXcd g = ts.matrix_elements(op);
    std::optional<double>  width;
    if(eps) {
        if(!(*eps >= 0.0 && *eps < 1.0)) throw ValidationError("trajectory needs eps in [0, 1)");
        width = operator_norm(op) * std::sqrt(*eps);
    }
    std::vector<TrajectoryPoint> out;
    out.reserve(times.size());
    for(double t : times) out.push_back({t, ts.evaluate(g, t), width});
    return out;
}

void write_trajectory_csv(std::ostream &out, const std::vector<TrajectoryPoint> &points, std::size_t site, const std::string &op_label) {
    out << "t,value,half_width,site,op\n" << std::setprecision(17);
    for(const auto &p : points) {
        out << p.t << ',' << p.value << ',';
        if(p.half_width) out << *p.half_width;
        out << ',' << site << ',' << op_label << '\n';
    }
}

} // namespace mblrevive
