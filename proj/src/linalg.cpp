#include "mblrevive/linalg.hpp"

#include "mblrevive/errors.hpp"

#include <lapacke.h>

#include <cmath>
#include <numbers>
#include <vector>

namespace mblrevive::linalg {

SymmetricEigen eigh(const Eigen::MatrixXd &h) {
    const auto n = static_cast<lapack_int>(h.rows());
    if(h.cols() != h.rows()) throw ValidationError("eigh: matrix is not square");
    SymmetricEigen out{Eigen::VectorXd(n), h};
    if(n == 0) return out;
    const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, out.vectors.data(), n, out.values.data());
    if(info != 0) throw Error("dsyevd failed with info " + std::to_string(info));
    return out;
}

Eigen::VectorXd eigvalsh(const Eigen::MatrixXd &h) {
    const auto n = static_cast<lapack_int>(h.rows());
    Eigen::MatrixXd work = h;
    Eigen::VectorXd w(n);
    if(n == 0) return w;
    const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'U', n, work.data(), n, w.data());
    if(info != 0) throw Error("dsyevd failed with info " + std::to_string(info));
    return w;
}

OverlapSelection select_max_overlap(const Eigen::MatrixXd &h, const Eigen::VectorXd &target, double tie_tolerance) {
    const auto n = static_cast<lapack_int>(h.rows());
    if(h.cols() != h.rows() || target.size() != h.rows()) throw ValidationError("select_max_overlap: shape mismatch");
    if(n == 0) throw ValidationError("select_max_overlap: empty problem");
    const double target_norm2 = target.squaredNorm();
    if(target_norm2 == 0.0) throw ValidationError("select_max_overlap: zero target");

    OverlapSelection out;
    if(n == 1) {
        out.value   = h(0, 0);
        out.overlap = 1.0;
        out.vector  = Eigen::VectorXd::Ones(1);
        return out;
    }

    // H = Q T Q^T. Overlaps <z_i|Q^T target> are computed in the tridiagonal
    // basis; only the winner is transformed back.
    Eigen::MatrixXd reduced = h;
    Eigen::VectorXd diag(n), offdiag(n), tau(n);
    lapack_int info = LAPACKE_dsytrd(LAPACK_COL_MAJOR, 'U', n, reduced.data(), n, diag.data(), offdiag.data(), tau.data());
    if(info != 0) throw Error("dsytrd failed with info " + std::to_string(info));

    Eigen::VectorXd projected = target;
    info = LAPACKE_dormtr(LAPACK_COL_MAJOR, 'L', 'U', 'T', n, 1, reduced.data(), n, tau.data(), projected.data(), n);
    if(info != 0) throw Error("dormtr failed with info " + std::to_string(info));

    Eigen::VectorXd values(n);
    Eigen::MatrixXd z(n, n);
    std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
    lapack_int      found  = 0;
    lapack_logical  tryrac = 1;
    Eigen::VectorXd e_work = offdiag;
    info = LAPACKE_dstemr(LAPACK_COL_MAJOR, 'V', 'A', n, diag.data(), e_work.data(), 0.0, 0.0, 0, 0, &found, values.data(), z.data(), n, n,
                          support.data(), &tryrac);
    if(info != 0 || found != n) {
        // MRRR can fail on pathological spectra; fall back to QR on T.
        // dstemr clobbers its inputs; the reduction keeps T on the diagonal band.
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
        for(lapack_int i = 0; i < n; ++i) t(i, i) = reduced(i, i);
        for(lapack_int i = 0; i + 1 < n; ++i) t(i, i + 1) = t(i + 1, i) = offdiag(i);
        auto full = eigh(t);
        values    = full.values;
        z         = full.vectors;
    }

    const Eigen::VectorXd overlaps = (z.transpose() * projected).array().square() / target_norm2;
    Eigen::Index best = 0;
    overlaps.maxCoeff(&best);
    const double best_overlap = overlaps(best);
    // Ascending values: the first index within tolerance is the lowest energy.
    for(Eigen::Index i = 0; i < n; ++i) {
        if(best_overlap - overlaps(i) <= tie_tolerance) {
            best = i;
            break;
        }
    }

    Eigen::VectorXd v = z.col(best);
    info = LAPACKE_dormtr(LAPACK_COL_MAJOR, 'L', 'U', 'N', n, 1, reduced.data(), n, tau.data(), v.data(), n);
    if(info != 0) throw Error("dormtr failed with info " + std::to_string(info));
    v.normalize();
    if(v.dot(target) < 0.0) v = -v;

    out.value   = values(best);
    out.overlap = overlaps(best);
    out.index   = best;
    out.vector  = std::move(v);
    return out;
}

std::complex<double> expi_neg(long double angle) {
    const long double reduced = std::remainder(angle, 2.0L * std::numbers::pi_v<long double>);
    return {static_cast<double>(std::cos(reduced)), static_cast<double>(-std::sin(reduced))};
}

} // namespace mblrevive::linalg
