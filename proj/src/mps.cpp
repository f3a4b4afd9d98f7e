#include "mblrevive/mps.hpp"

#include "mblrevive/errors.hpp"

#include <cmath>
#include <numeric>

namespace mblrevive {

namespace {

using Eigen::Index;
using Eigen::MatrixXcd;

void require_same_length(const Mps &a, const Mps &b) {
    if(a.size() != b.size()) throw LengthMismatchError("MPS lengths differ: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
}

// [A^0; A^1] stacked vertically: row s*chi_l + a.
MatrixXcd stack_rows(const SiteTensor &t) {
    MatrixXcd m(2 * t[0].rows(), t[0].cols());
    m << t[0], t[1];
    return m;
}

// [A^0, A^1] side by side: column s*chi_r + b.
MatrixXcd stack_cols(const SiteTensor &t) {
    MatrixXcd m(t[0].rows(), 2 * t[0].cols());
    m << t[0], t[1];
    return m;
}

SiteTensor unstack_rows(const MatrixXcd &m) {
    const Index half = m.rows() / 2;
    return {m.topRows(half), m.bottomRows(half)};
}

SiteTensor unstack_cols(const MatrixXcd &m) {
    const Index half = m.cols() / 2;
    return {m.leftCols(half), m.rightCols(half)};
}

MatrixXcd env_step_left(const MatrixXcd &env, const SiteTensor &bra, const SiteTensor &ket) {
    return bra[0].adjoint() * env * ket[0] + bra[1].adjoint() * env * ket[1];
}

MatrixXcd env_step_right(const MatrixXcd &env, const SiteTensor &bra, const SiteTensor &ket) {
    return bra[0].conjugate() * env * ket[0].transpose() + bra[1].conjugate() * env * ket[1].transpose();
}

template <typename Real>
std::complex<Real> mpo_sandwich(const Mps &a, const Mpo &o, const Mps &b) {
    using C   = std::complex<Real>;
    using Mat = Eigen::Matrix<C, Eigen::Dynamic, Eigen::Dynamic>;
    require_same_length(a, b);
    if(o.size() != a.size()) throw LengthMismatchError("MPO and MPS lengths differ");

    std::vector<Mat> env(1, Mat::Ones(1, 1));
    for(std::size_t j = 0; j < a.size(); ++j) {
        const auto &w   = o[j];
        const auto &bra = a.site(j);
        const auto &ket = b.site(j);
        std::array<Mat, 2> bra_adj{bra[0].adjoint().template cast<C>(), bra[1].adjoint().template cast<C>()};
        std::array<Mat, 2> ket_c{ket[0].template cast<C>(), ket[1].template cast<C>()};
        std::vector<Mat> next(static_cast<std::size_t>(w.right_dim()), Mat::Zero(bra[0].cols(), ket[0].cols()));
        for(int l = 0; l < w.left_dim(); ++l) {
            for(int t = 0; t < 2; ++t) {
                bool needed = false;
                for(int r = 0; r < w.right_dim() && !needed; ++r)
                    for(int s = 0; s < 2; ++s) needed = needed || w.at(l, r)(s, t) != cplx(0.0);
                if(!needed) continue;
                const Mat x = env[static_cast<std::size_t>(l)] * ket_c[static_cast<std::size_t>(t)];
                for(int s = 0; s < 2; ++s) {
                    Mat y;
                    bool have_y = false;
                    for(int r = 0; r < w.right_dim(); ++r) {
                        const cplx coeff = w.at(l, r)(s, t);
                        if(coeff == cplx(0.0)) continue;
                        if(!have_y) {
                            y      = bra_adj[static_cast<std::size_t>(s)] * x;
                            have_y = true;
                        }
                        next[static_cast<std::size_t>(r)] += C(static_cast<Real>(coeff.real()), static_cast<Real>(coeff.imag())) * y;
                    }
                }
            }
        }
        env = std::move(next);
    }
    return env.front()(0, 0);
}

} // namespace

// ---------------------------------------------------------------------------

Mps::Mps(std::vector<SiteTensor> sites, std::optional<BondCharges> charges, std::optional<std::size_t> center)
    : sites_(std::move(sites)), charges_(std::move(charges)), center_(center) {
    if(sites_.empty()) throw ValidationError("MPS needs at least one site");
    for(std::size_t j = 0; j < sites_.size(); ++j) {
        const auto &t = sites_[j];
        if(t[0].rows() != t[1].rows() || t[0].cols() != t[1].cols())
            throw ValidationError("site " + std::to_string(j) + ": physical components have different shapes");
        if(t[0].rows() < 1 || t[0].cols() < 1) throw ValidationError("site " + std::to_string(j) + ": empty bond");
        if(j + 1 < sites_.size() && t[0].cols() != sites_[j + 1][0].rows())
            throw ValidationError("bond " + std::to_string(j + 1) + ": dimension mismatch");
    }
    if(sites_.front()[0].rows() != 1 || sites_.back()[0].cols() != 1) throw ValidationError("open boundary bonds must have dimension 1");
    if(center_ && *center_ >= sites_.size()) throw ValidationError("canonical center out of range");

    if(charges_) {
        const auto dims = bond_dims();
        if(charges_->size() != dims.size()) throw ValidationError("charge labels must cover every bond");
        for(std::size_t b = 0; b < dims.size(); ++b)
            if(static_cast<Index>((*charges_)[b].size()) != dims[b]) throw ValidationError("charge labels of bond " + std::to_string(b) + " have wrong size");
        for(std::size_t j = 0; j < sites_.size(); ++j) {
            const auto &ql = (*charges_)[j];
            const auto &qr = (*charges_)[j + 1];
            for(int s = 0; s < 2; ++s) {
                const auto &m = sites_[j][static_cast<std::size_t>(s)];
                for(Index a = 0; a < m.rows(); ++a)
                    for(Index b = 0; b < m.cols(); ++b)
                        if(m(a, b) != cplx(0.0) && ql[static_cast<std::size_t>(a)] + spin_charge(s) != qr[static_cast<std::size_t>(b)])
                            throw ValidationError("site " + std::to_string(j) + " violates the U(1) charge rule");
            }
        }
    }
}

std::vector<Index> Mps::bond_dims() const {
    std::vector<Index> dims;
    dims.reserve(sites_.size() + 1);
    dims.push_back(sites_.empty() ? 1 : sites_.front()[0].rows());
    for(const auto &t : sites_) dims.push_back(t[0].cols());
    return dims;
}

Index Mps::max_bond_dim() const {
    const auto dims = bond_dims();
    return *std::max_element(dims.begin(), dims.end());
}

Mps Mps::without_charges() const { return Mps(sites_, std::nullopt, center_); }

Mps Mps::scaled(cplx factor) const {
    auto sites = sites_;
    sites[0][0] *= factor;
    sites[0][1] *= factor;
    return Mps(std::move(sites), charges_, center_);
}

// ---------------------------------------------------------------------------

Mps from_product(std::span<const Eigen::Vector2cd> states) {
    if(states.empty()) throw ValidationError("product state needs at least one site");
    std::vector<SiteTensor> sites;
    sites.reserve(states.size());
    for(std::size_t j = 0; j < states.size(); ++j) {
        const auto &v = states[j];
        if(std::abs(v.squaredNorm() - 1.0) > 1e-12) throw ValidationError("local state at site " + std::to_string(j) + " is not normalized");
        SiteTensor t{MatrixXcd::Constant(1, 1, v(0)), MatrixXcd::Constant(1, 1, v(1))};
        sites.push_back(std::move(t));
    }
    return Mps(std::move(sites), std::nullopt, 0);
}

Mps from_configuration(const SpinConfiguration &c) {
    if(c.size() == 0) throw ValidationError("empty configuration");
    std::vector<SiteTensor> sites;
    BondCharges             charges{{0}};
    for(std::size_t j = 0; j < c.size(); ++j) {
        const int s = static_cast<int>(c[j]);
        SiteTensor t{MatrixXcd::Zero(1, 1), MatrixXcd::Zero(1, 1)};
        t[static_cast<std::size_t>(s)](0, 0) = 1.0;
        sites.push_back(std::move(t));
        charges.push_back({charges.back()[0] + spin_charge(s)});
    }
    return Mps(std::move(sites), std::move(charges), 0);
}

Mps from_dense(const Eigen::VectorXcd &psi, std::size_t length, double cutoff) {
    if(length == 0 || length > 24) throw InvalidSizeError("from_dense supports 1 <= L <= 24");
    if(psi.size() != (Index{1} << length)) throw LengthMismatchError("dense vector size is not 2^L");
    std::vector<SiteTensor> sites;
    // rest(a, s*tail + r) holds the not yet factorized amplitudes.
    MatrixXcd rest = psi.transpose();
    for(std::size_t j = 0; j + 1 < length; ++j) {
        const Index chi  = rest.rows();
        const Index tail = rest.cols() / 2;
        MatrixXcd m(2 * chi, tail);
        m.topRows(chi)    = rest.leftCols(tail);
        m.bottomRows(chi) = rest.rightCols(tail);
        Eigen::BDCSVD<MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto &s    = svd.singularValues();
        Index       keep = 1;
        while(keep < s.size() && s(keep) > cutoff * s(0)) ++keep;
        const MatrixXcd u = svd.matrixU().leftCols(keep);
        sites.push_back(unstack_rows(u));
        // Columns of S V^+ are already ordered as (next spin, remainder).
        rest = s.head(keep).asDiagonal() * svd.matrixV().leftCols(keep).adjoint();
    }
    sites.push_back(unstack_cols(rest));
    return Mps(std::move(sites), std::nullopt, length - 1);
}

Eigen::VectorXcd to_dense(const Mps &psi) {
    if(psi.size() > 20) throw ResourceError("to_dense limited to L <= 20");
    MatrixXcd v = MatrixXcd::Ones(1, 1);
    for(const auto &t : psi.sites()) {
        MatrixXcd next(2 * v.rows(), t[0].cols());
        const MatrixXcd v0 = v * t[0];
        const MatrixXcd v1 = v * t[1];
        for(Index r = 0; r < v.rows(); ++r) {
            next.row(2 * r)     = v0.row(r);
            next.row(2 * r + 1) = v1.row(r);
        }
        v = std::move(next);
    }
    return v.col(0);
}

cplx overlap(const Mps &a, const Mps &b) {
    require_same_length(a, b);
    MatrixXcd env = MatrixXcd::Ones(1, 1);
    for(std::size_t j = 0; j < a.size(); ++j) env = env_step_left(env, a.site(j), b.site(j));
    return env(0, 0);
}

double norm_squared(const Mps &psi) { return overlap(psi, psi).real(); }

cplx mpo_matrix_element(const Mps &a, const Mpo &o, const Mps &b) { return mpo_sandwich<double>(a, o, b); }

double expect_mpo(const Mps &psi, const Mpo &o) {
    const double n = norm_squared(psi);
    if(!(n > 0.0)) throw DegenerateNormError("expectation value of a zero-norm MPS");
    return mpo_sandwich<double>(psi, o, psi).real() / n;
}

long double expect_mpo_extended(const Mps &psi, const Mpo &o) {
    Mpo identity(psi.size(), MpoSite(1, 1));
    for(auto &w : identity) w.at(0, 0) = Eigen::Matrix2cd::Identity();
    const long double n = mpo_sandwich<long double>(psi, identity, psi).real();
    if(!(n > 0.0L)) throw DegenerateNormError("expectation value of a zero-norm MPS");
    return mpo_sandwich<long double>(psi, o, psi).real() / n;
}

EnergyStats energy_variance(const Mps &psi, const Mpo &h, const Mpo &h2) {
    EnergyStats out;
    out.energy          = expect_mpo(psi, h);
    const double second = expect_mpo(psi, h2);
    out.variance        = second - out.energy * out.energy;
    if(std::abs(out.energy) < 1e-300) {
        out.rescaled             = out.variance;
        out.rescaled_is_absolute = true;
    } else {
        out.rescaled = out.variance / (out.energy * out.energy);
    }
    return out;
}

Mps superpose(std::span<const Mps> states, std::span<const cplx> coefficients) {
    if(states.empty()) throw ValidationError("superpose needs at least one state");
    if(states.size() != coefficients.size()) throw LengthMismatchError("one coefficient per state is required");
    const std::size_t L = states.front().size();
    for(const auto &s : states) require_same_length(states.front(), s);

    std::vector<SiteTensor> sites(L);
    for(std::size_t j = 0; j < L; ++j) {
        const bool first = j == 0;
        const bool last  = j + 1 == L;
        Index rows = 0, cols = 0;
        for(const auto &s : states) {
            rows += first ? 0 : s.site(j)[0].rows();
            cols += last ? 0 : s.site(j)[0].cols();
        }
        if(first) rows = 1;
        if(last) cols = 1;
        for(int p = 0; p < 2; ++p) {
            MatrixXcd m = MatrixXcd::Zero(rows, cols);
            Index r0 = 0, c0 = 0;
            for(std::size_t i = 0; i < states.size(); ++i) {
                const auto &block = states[i].site(j)[static_cast<std::size_t>(p)];
                const cplx  c     = first ? coefficients[i] : cplx(1.0);
                m.block(first ? 0 : r0, last ? 0 : c0, block.rows(), block.cols()) += c * block;
                r0 += block.rows();
                c0 += block.cols();
            }
            sites[j][static_cast<std::size_t>(p)] = std::move(m);
        }
    }

    // Labels survive only when every input is labeled and all end in the same sector.
    std::optional<BondCharges> charges;
    const bool all_labeled = std::all_of(states.begin(), states.end(), [](const Mps &s) { return s.charges().has_value(); });
    if(all_labeled) {
        const int total = states.front().charges()->back()[0];
        const bool same = std::all_of(states.begin(), states.end(), [&](const Mps &s) { return s.charges()->back()[0] == total; });
        if(same) {
            BondCharges q(L + 1);
            q[0] = {0};
            q[L] = {total};
            for(std::size_t b = 1; b < L; ++b)
                for(const auto &s : states) q[b].insert(q[b].end(), (*s.charges())[b].begin(), (*s.charges())[b].end());
            charges = std::move(q);
        }
    }
    return Mps(std::move(sites), std::move(charges));
}

// ---------------------------------------------------------------------------

std::vector<Eigen::Matrix2cd> single_site_rdms(const Mps &psi) {
    const std::size_t L = psi.size();
    std::vector<MatrixXcd> left(L + 1), right(L + 1);
    left[0]  = MatrixXcd::Ones(1, 1);
    right[L] = MatrixXcd::Ones(1, 1);
    for(std::size_t j = 0; j < L; ++j) left[j + 1] = env_step_left(left[j], psi.site(j), psi.site(j));
    for(std::size_t j = L; j-- > 0;) right[j] = env_step_right(right[j + 1], psi.site(j), psi.site(j));
    const double n = left[L](0, 0).real();
    if(!(n > 0.0)) throw DegenerateNormError("reduced density matrix of a zero-norm MPS");

    std::vector<Eigen::Matrix2cd> out(L);
    for(std::size_t j = 0; j < L; ++j) {
        const auto &a = psi.site(j);
        Eigen::Matrix2cd rho;
        for(int s = 0; s < 2; ++s)
            for(int sp = 0; sp < 2; ++sp) {
                const MatrixXcd m = a[static_cast<std::size_t>(sp)].adjoint() * left[j] * a[static_cast<std::size_t>(s)];
                rho(s, sp)        = (m.array() * right[j + 1].array()).sum() / n;
            }
        // Exact Hermiticity for downstream eigen-analysis.
        out[j] = 0.5 * (rho + rho.adjoint());
    }
    return out;
}

Eigen::Matrix2cd single_site_rdm(const Mps &psi, std::size_t site) {
    if(site >= psi.size()) throw ValidationError("site " + std::to_string(site) + " out of range");
    const MatrixXcd left  = left_environment(psi, psi, site);
    const MatrixXcd right = right_environment(psi, psi, site + 1);
    const auto     &a     = psi.site(site);
    Eigen::Matrix2cd rho;
    for(int s = 0; s < 2; ++s)
        for(int sp = 0; sp < 2; ++sp) {
            const MatrixXcd m = a[static_cast<std::size_t>(sp)].adjoint() * left * a[static_cast<std::size_t>(s)];
            rho(s, sp)        = (m.array() * right.array()).sum();
        }
    const double n = rho.trace().real();
    if(!(n > 0.0)) throw DegenerateNormError("reduced density matrix of a zero-norm MPS");
    rho /= n;
    return 0.5 * (rho + rho.adjoint());
}

Eigen::Vector3d bloch_vector(const Eigen::Matrix2cd &rho) {
    return {2.0 * rho(0, 1).real(), -2.0 * rho(0, 1).imag(), (rho(0, 0) - rho(1, 1)).real()};
}

// ---------------------------------------------------------------------------

Mps canonicalize(const Mps &psi, std::size_t center) {
    const std::size_t L = psi.size();
    if(center >= L) throw ValidationError("canonical center out of range");
    auto sites = psi.sites();
    for(std::size_t j = 0; j < center; ++j) {
        const MatrixXcd m = stack_rows(sites[j]);
        Eigen::HouseholderQR<MatrixXcd> qr(m);
        const Index k = std::min(m.rows(), m.cols());
        const MatrixXcd q = qr.householderQ() * MatrixXcd::Identity(m.rows(), k);
        const MatrixXcd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
        sites[j] = unstack_rows(q);
        for(auto &t : sites[j + 1]) t = r * t;
    }
    for(std::size_t j = L - 1; j > center; --j) {
        const MatrixXcd m = stack_cols(sites[j]).adjoint();
        Eigen::HouseholderQR<MatrixXcd> qr(m);
        const Index k = std::min(m.rows(), m.cols());
        const MatrixXcd q = qr.householderQ() * MatrixXcd::Identity(m.rows(), k);
        const MatrixXcd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
        sites[j] = unstack_cols(q.adjoint());
        const MatrixXcd r_adj = r.adjoint();
        for(auto &t : sites[j - 1]) t = t * r_adj;
    }
    return Mps(std::move(sites), std::nullopt, center);
}

double left_isometry_residual(const Mps &psi, std::size_t site) {
    const auto &t = psi.site(site);
    const MatrixXcd g = t[0].adjoint() * t[0] + t[1].adjoint() * t[1];
    return (g - MatrixXcd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

double right_isometry_residual(const Mps &psi, std::size_t site) {
    const auto &t = psi.site(site);
    const MatrixXcd g = t[0] * t[0].adjoint() + t[1] * t[1].adjoint();
    return (g - MatrixXcd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

double CompressResult::total_discarded() const { return std::accumulate(discarded.begin(), discarded.end(), 0.0); }

CompressResult compress(const Mps &psi, Index max_bond, double relative_cutoff) {
    if(max_bond < 1) throw ValidationError("compress: max bond dimension must be at least 1");
    const std::size_t L = psi.size();
    const double norm_in = std::sqrt(norm_squared(psi));
    if(!(norm_in > 0.0)) throw DegenerateNormError("compress of a zero-norm MPS");

    auto sites = canonicalize(psi, 0).sites();
    CompressResult out;
    for(std::size_t j = 0; j + 1 < L; ++j) {
        const MatrixXcd m = stack_rows(sites[j]);
        Eigen::BDCSVD<MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Eigen::VectorXd &s = svd.singularValues();
        Index keep = 1;
        while(keep < s.size() && keep < max_bond && s(keep) > relative_cutoff * s(0)) ++keep;
        const double total = s.squaredNorm();
        out.discarded.push_back(total > 0.0 ? s.tail(s.size() - keep).squaredNorm() / total : 0.0);
        sites[j] = unstack_rows(svd.matrixU().leftCols(keep));
        const MatrixXcd carry = s.head(keep).asDiagonal() * svd.matrixV().leftCols(keep).adjoint();
        for(auto &t : sites[j + 1]) t = carry * t;
    }
    Mps result(std::move(sites), std::nullopt, L - 1);
    const double norm_out = std::sqrt(norm_squared(result));
    out.state = result.scaled(norm_in / norm_out);
    return out;
}

SchmidtSplit schmidt_split(const Mps &psi, std::size_t bond_site) {
    const std::size_t L = psi.size();
    if(bond_site == 0 || bond_site >= L) throw ValidationError("Schmidt cut must lie strictly inside the chain");
    const auto canon = canonicalize(psi, bond_site);
    const auto &sites = canon.sites();
    const MatrixXcd m = stack_cols(sites[bond_site]);
    Eigen::BDCSVD<MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd &s = svd.singularValues();
    if(!(s(0) > 0.0)) throw DegenerateNormError("Schmidt decomposition of a zero-norm MPS");
    Index keep = 1;
    while(keep < s.size() && s(keep) > 1e-15 * s(0)) ++keep;

    SchmidtSplit out;
    out.values = s.head(keep) / s.head(keep).norm();
    out.left.assign(sites.begin(), sites.begin() + static_cast<std::ptrdiff_t>(bond_site));
    const MatrixXcd u = svd.matrixU().leftCols(keep);
    for(auto &t : out.left.back()) t = t * u;
    out.right.assign(sites.begin() + static_cast<std::ptrdiff_t>(bond_site), sites.end());
    out.right.front() = unstack_cols(svd.matrixV().leftCols(keep).adjoint());
    return out;
}

Eigen::VectorXd schmidt_values(const Mps &psi, std::size_t bond_site) { return schmidt_split(psi, bond_site).values; }

// ---------------------------------------------------------------------------

TransferOp::TransferOp(SiteTensor bra, SiteTensor ket, Eigen::Matrix2cd op) : bra_(std::move(bra)), ket_(std::move(ket)), op_(op) {}

MatrixXcd TransferOp::apply_left(const MatrixXcd &env) const {
    MatrixXcd out = MatrixXcd::Zero(bra_[0].cols(), ket_[0].cols());
    for(int s = 0; s < 2; ++s) {
        const MatrixXcd x = bra_[static_cast<std::size_t>(s)].adjoint() * env;
        for(int t = 0; t < 2; ++t)
            if(op_(s, t) != cplx(0.0)) out += op_(s, t) * (x * ket_[static_cast<std::size_t>(t)]);
    }
    return out;
}

MatrixXcd TransferOp::apply_right(const MatrixXcd &env) const {
    MatrixXcd out = MatrixXcd::Zero(bra_[0].rows(), ket_[0].rows());
    for(int s = 0; s < 2; ++s) {
        const MatrixXcd x = bra_[static_cast<std::size_t>(s)].conjugate() * env;
        for(int t = 0; t < 2; ++t)
            if(op_(s, t) != cplx(0.0)) out += op_(s, t) * (x * ket_[static_cast<std::size_t>(t)].transpose());
    }
    return out;
}

MatrixXcd TransferOp::dense() const {
    const Index rin = bra_[0].rows(), cin = ket_[0].rows();
    const Index rout = bra_[0].cols(), cout = ket_[0].cols();
    MatrixXcd out(rout * cout, rin * cin);
    for(Index c = 0; c < cin; ++c)
        for(Index r = 0; r < rin; ++r) {
            MatrixXcd unit = MatrixXcd::Zero(rin, cin);
            unit(r, c)     = 1.0;
            const MatrixXcd image = apply_left(unit);
            out.col(c * rin + r) = Eigen::Map<const Eigen::VectorXcd>(image.data(), image.size());
        }
    return out;
}

MatrixXcd left_environment(const Mps &bra, const Mps &ket, std::size_t upto) {
    require_same_length(bra, ket);
    if(upto > bra.size()) throw ValidationError("environment range out of bounds");
    MatrixXcd env = MatrixXcd::Ones(1, 1);
    for(std::size_t j = 0; j < upto; ++j) env = env_step_left(env, bra.site(j), ket.site(j));
    return env;
}

MatrixXcd right_environment(const Mps &bra, const Mps &ket, std::size_t from) {
    require_same_length(bra, ket);
    if(from > bra.size()) throw ValidationError("environment range out of bounds");
    MatrixXcd env = MatrixXcd::Ones(1, 1);
    for(std::size_t j = bra.size(); j-- > from;) env = env_step_right(env, bra.site(j), ket.site(j));
    return env;
}

} // namespace mblrevive
