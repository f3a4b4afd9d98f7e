#include "mblrevive/certifier.hpp"

#include "mblrevive/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace mblrevive {

Mps ProductState::to_mps() const { return from_product(local); }

Eigen::VectorXcd ProductState::to_dense() const {
    Eigen::VectorXcd v = Eigen::VectorXcd::Ones(1);
    for(const auto &s : local) {
        Eigen::VectorXcd next(2 * v.size());
        for(Eigen::Index i = 0; i < v.size(); ++i) {
            next(2 * i)     = v(i) * s(0);
            next(2 * i + 1) = v(i) * s(1);
        }
        v = std::move(next);
    }
    return v;
}

Eigen::Vector2cd coherent_state(const Eigen::Vector3d &n) {
    const double theta = std::acos(std::clamp(n.z(), -1.0, 1.0));
    const double phi   = std::atan2(n.y(), n.x());
    return {std::cos(theta / 2), std::polar(std::sin(theta / 2), phi)};
}

ProductState product_from_rdms(const std::vector<Eigen::Matrix2cd> &rdms, double min_norm) {
    ProductState out;
    for(std::size_t j = 0; j < rdms.size(); ++j) {
        const Eigen::Vector3d r    = bloch_vector(rdms[j]);
        const double          norm = r.norm();
        if(norm < min_norm) throw AmbiguousDirectionError(j, norm);
        out.directions.push_back(r / norm);
        out.local.push_back(coherent_state(out.directions.back()));
    }
    return out;
}

ProductState product_approximation(const Mps &psi, double min_norm) { return product_from_rdms(single_site_rdms(psi), min_norm); }

double fidelity(const Mps &psi, const ProductState &phi) {
    if(psi.size() != phi.size()) throw LengthMismatchError("state and product approximation lengths differ");
    return std::norm(overlap(psi, phi.to_mps())) / norm_squared(psi);
}

LocalOverlap min_local_overlap(const ProductState &plus, const ProductState &minus) {
    if(plus.size() != minus.size()) throw LengthMismatchError("product states have different lengths");
    LocalOverlap out;
    for(std::size_t j = 0; j < plus.size(); ++j) {
        const double o = std::norm(plus.local[j].dot(minus.local[j]));
        if(j == 0 || o < out.f2) {
            out.f2     = o;
            out.j_star = j;
        }
    }
    return out;
}

double certified_amplitude(double f2, double eps) {
    if(!(f2 >= 0.0 && f2 <= 1.0) || !(eps >= 0.0 && eps <= 1.0)) throw ValidationError("certified_amplitude needs f2 and eps in [0, 1]");
    return std::max(1.0 - f2 - 2.0 * std::sqrt((1.0 - f2) * eps), 0.0);
}

double oscillation_difference_bound(double f2, double eps) {
    if(!(f2 >= 0.0 && f2 <= 1.0) || !(eps >= 0.0 && eps <= 1.0)) throw ValidationError("oscillation_difference_bound needs f2 and eps in [0, 1]");
    return 2.0 * (1.0 - f2 - 2.0 * std::sqrt((1.0 - f2) * eps));
}

Eigen::Matrix2cd oscillating_observable(const ProductState &plus, const ProductState &minus, std::size_t j) {
    if(j >= plus.size() || j >= minus.size()) throw ValidationError("observable site out of range");
    const auto &a = plus.local[j];
    const auto &b = minus.local[j];
    return a * a.adjoint() - b * b.adjoint();
}

bool Certificate::has_flag(const std::string &f) const { return std::find(flags.begin(), flags.end(), f) != flags.end(); }

nlohmann::json to_json(const Certificate &c) {
    nlohmann::json a = nlohmann::json::array();
    for(int r = 0; r < 2; ++r)
        for(int s = 0; s < 2; ++s) a.push_back({c.A_obs(r, s).real(), c.A_obs(r, s).imag()});
    return {{"schema_version", certificate_schema_version},
            {"k", c.k},
            {"E1", c.E1},
            {"E2", c.E2},
            {"tau", c.tau},
            {"F2_plus", c.F2_plus},
            {"F2_minus", c.F2_minus},
            {"eps", c.eps},
            {"f2", c.f2},
            {"j_star", c.j_star},
            {"A_obs", a},
            {"A_certified", c.A_certified},
            {"revival_bound", c.revival_bound},
            {"difference_bound", c.difference_bound},
            {"flags", c.flags}};
}

double certificate_distance(const Certificate &a, const Certificate &b) {
    if(a.k != b.k || a.j_star != b.j_star) return std::numeric_limits<double>::infinity();
    double d = 0.0;
    for(auto [x, y] : {std::pair{a.tau, b.tau}, {a.F2_plus, b.F2_plus}, {a.F2_minus, b.F2_minus}, {a.eps, b.eps}, {a.f2, b.f2}, {a.A_certified, b.A_certified}})
        d = std::max(d, std::abs(x - y));
    return d;
}

Certificate certificate_from_json(const nlohmann::json &j) {
    try {
        Certificate c;
        c.k        = j.at("k").get<std::size_t>();
        c.E1       = j.at("E1").get<double>();
        c.E2       = j.at("E2").get<double>();
        c.tau      = j.at("tau").get<double>();
        c.F2_plus  = j.at("F2_plus").get<double>();
        c.F2_minus = j.at("F2_minus").get<double>();
        c.eps      = j.at("eps").get<double>();
        c.f2       = j.at("f2").get<double>();
        c.j_star   = j.at("j_star").get<std::size_t>();
        const auto &a = j.at("A_obs");
        for(int i = 0; i < 4; ++i) c.A_obs(i / 2, i % 2) = cplx(a.at(static_cast<std::size_t>(i)).at(0).get<double>(), a.at(static_cast<std::size_t>(i)).at(1).get<double>());
        c.A_certified      = j.at("A_certified").get<double>();
        c.revival_bound    = j.at("revival_bound").get<double>();
        c.difference_bound = j.value("difference_bound", 0.0);
        c.flags            = j.value("flags", std::vector<std::string>{});
        return c;
    } catch(const nlohmann::json::exception &e) {
        throw ValidationError(std::string("malformed certificate: ") + e.what());
    }
}

Mps fix_phase(const Mps &psi, const SpinConfiguration &seed) {
    const cplx o = overlap(from_configuration(seed), psi);
    if(std::abs(o) == 0.0) return psi;
    return psi.scaled(std::conj(o) / std::abs(o));
}

PairSuperposition pair_superpositions(const EigenpairMPS &e1, const EigenpairMPS &e2, bool allow_unconverged) {
    if(e1.state.size() != e2.state.size()) throw LengthMismatchError("eigenpairs have different lengths");
    if(!allow_unconverged && (!e1.converged || !e2.converged)) throw ValidationError("pair_superpositions needs converged eigenpairs");
    const double gap = std::abs(e1.energy - e2.energy);
    if(gap <= degeneracy_tolerance) throw DegeneracyError("eigenpair energies coincide within " + std::to_string(degeneracy_tolerance));

    const auto normalize = [](const Mps &m) { return m.scaled(1.0 / std::sqrt(norm_squared(m))); };
    const std::array<Mps, 2> parts{normalize(fix_phase(e1.state, e1.seed)), normalize(fix_phase(e2.state, e2.seed))};
    const double s = 1.0 / std::numbers::sqrt2;
    PairSuperposition out;
    const std::array<cplx, 2> cp{s, s}, cm{s, -s};
    out.plus  = normalize(superpose(parts, cp));
    out.minus = normalize(superpose(parts, cm));
    out.tau   = std::numbers::pi / gap;
    return out;
}

Certificate assemble_certificate(std::size_t k, double E1, double E2, double F2_plus, double F2_minus, const ProductState &plus, const ProductState &minus) {
    Certificate c;
    c.k        = k;
    c.E1       = E1;
    c.E2       = E2;
    c.tau      = std::numbers::pi / std::abs(E1 - E2);
    c.F2_plus  = F2_plus;
    c.F2_minus = F2_minus;
    // Rounding can push a fidelity a few ulps above one.
    c.eps = std::clamp(1.0 - std::min(F2_plus, F2_minus), 0.0, 1.0);
    const auto lo    = min_local_overlap(plus, minus);
    c.f2             = std::clamp(lo.f2, 0.0, 1.0);
    c.j_star         = lo.j_star;
    c.A_obs          = oscillating_observable(plus, minus, lo.j_star);
    c.A_certified    = certified_amplitude(c.f2, c.eps);
    c.revival_bound  = 1.0 - 4.0 * c.eps;
    c.difference_bound = oscillation_difference_bound(c.f2, c.eps);
    return c;
}

Certificate certify(const EigenpairMPS &e1, const EigenpairMPS &e2, std::size_t k, bool allow_unconverged) {
    const auto pair = pair_superpositions(e1, e2, allow_unconverged);
    Certificate c;
    try {
        const auto plus  = product_approximation(pair.plus);
        const auto minus = product_approximation(pair.minus);
        c = assemble_certificate(k, e1.energy, e2.energy, fidelity(pair.plus, plus), fidelity(pair.minus, minus), plus, minus);
    } catch(const AmbiguousDirectionError &err) {
        c.k             = k;
        c.E1            = e1.energy;
        c.E2            = e2.energy;
        c.tau           = pair.tau;
        c.j_star        = err.site();
        c.revival_bound = 1.0 - 4.0 * c.eps;
        c.difference_bound = oscillation_difference_bound(c.f2, c.eps);
        c.flags.push_back("ambiguous_direction");
    }
    if(!e1.converged || !e2.converged) c.flags.push_back("unconverged");
    return c;
}

} // namespace mblrevive
