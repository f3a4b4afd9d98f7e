#include "mblrevive/multiexc.hpp"

#include "mblrevive/errors.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace mblrevive {

using Eigen::Index;
using Eigen::MatrixXcd;

GlueResult glue(const Mps &a, const Mps &b, std::size_t m, const GlueOptions &opts) {
    if(a.size() != b.size()) throw LengthMismatchError("glue inputs have different lengths");
    const std::size_t L = a.size();
    if(m == 0 || m >= L) throw ValidationError("glue cut must lie strictly inside the chain");

    const auto sa = schmidt_split(a, m);
    const auto sb = schmidt_split(b, m);
    GlueResult out;
    auto &rep            = out.report;
    rep.rank_left        = sa.values.size();
    rep.rank_right       = sb.values.size();
    rep.cut_weight_left  = sa.values.tail(sa.values.size() - 1).squaredNorm();
    rep.cut_weight_right = sb.values.tail(sb.values.size() - 1).squaredNorm();
    rep.product_like     = rep.cut_weight_left < opts.product_threshold && rep.cut_weight_right < opts.product_threshold;
    if(rep.rank_left != rep.rank_right && opts.mode == GlueMode::strict && !rep.product_like)
        throw GlueMismatchError("Schmidt ranks differ at the cut (" + std::to_string(rep.rank_left) + " vs " + std::to_string(rep.rank_right) +
                                    ") and the cut is not product-like",
                                std::max(rep.cut_weight_left, rep.cut_weight_right));

    const Index k = std::max(rep.rank_left, rep.rank_right);
    rep.padded    = rep.rank_left != rep.rank_right;
    std::vector<SiteTensor> sites = sa.left;
    for(auto &t : sites.back()) {
        MatrixXcd p = MatrixXcd::Zero(t.rows(), k);
        p.leftCols(t.cols()) = t;
        t = std::move(p);
    }
    auto right = sb.right;
    for(auto &t : right.front()) {
        MatrixXcd p = MatrixXcd::Zero(k, t.cols());
        p.topRows(t.rows()) = sb.values.asDiagonal() * t;
        t = std::move(p);
    }
    sites.insert(sites.end(), right.begin(), right.end());
    Mps glued(std::move(sites));
    out.state = glued.scaled(1.0 / std::sqrt(norm_squared(glued)));
    return out;
}

std::size_t glue_cut(std::size_t k1, std::size_t k2) {
    if(k2 <= k1) throw ValidationError("glue_cut needs k1 < k2");
    return (k1 + k2 + 1) / 2;
}

namespace {

double median_of(std::vector<double> v) {
    if(v.empty()) throw EmptyAggregateError("median of an empty set");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

const EigenpairMPS *find_converged(const EigenFamily &f, std::size_t k, std::string &why) {
    const auto it = f.find(k);
    if(it == f.end()) {
        why = "missing eigenpair for k=" + std::to_string(k);
        return nullptr;
    }
    if(!it->second.converged) {
        why = "unconverged eigenpair for k=" + std::to_string(k);
        return nullptr;
    }
    return &it->second;
}

} // namespace

GlueScan variance_vs_distance(const Mpo &h, const EigenFamily &down_up, const EigenFamily &up_down, const std::vector<std::size_t> &distances,
                              const GlueOptions &opts) {
    const std::size_t L  = h.size();
    const Mpo         h2 = build_squared_mpo(h);
    GlueScan          scan;
    for(std::size_t d : distances) {
        if(d == 0) throw ValidationError("glue distance must be positive");
        std::vector<double> values;
        for(std::size_t k1 = 1; k1 + d <= L - 1; ++k1) {
            GlueRow row;
            row.d  = d;
            row.k1 = k1;
            row.k2 = k1 + d;
            std::string why;
            const auto *a = find_converged(down_up, row.k1, why);
            const auto *b = a ? find_converged(up_down, row.k2, why) : nullptr;
            if(!a || !b) {
                row.error = why;
                scan.rows.push_back(std::move(row));
                continue;
            }
            try {
                const auto g     = glue(a->state, b->state, glue_cut(row.k1, row.k2), opts);
                const auto stats = energy_variance(g.state, h, h2);
                row.energy       = stats.energy;
                row.var_rescaled = stats.rescaled;
                row.cut_weight   = std::max(g.report.cut_weight_left, g.report.cut_weight_right);
                values.push_back(stats.rescaled);
            } catch(const Error &e) {
                row.error = e.what();
            }
            scan.rows.push_back(std::move(row));
        }
        if(!values.empty()) scan.median[d] = median_of(values);
    }
    return scan;
}

void write_glue_scan_csv(std::ostream &out, const GlueScan &scan) {
    out << "d,k1,k2,k3,var_rescaled,median,error\n" << std::setprecision(17);
    for(const auto &r : scan.rows) {
        out << r.d << ',' << r.k1 << ',' << r.k2 << ',';
        if(r.k3) out << *r.k3;
        out << ',';
        if(r.error.empty()) out << r.var_rescaled;
        out << ',';
        if(const auto it = scan.median.find(r.d); it != scan.median.end()) out << it->second;
        out << ',' << r.error << '\n';
    }
}

MultiReviver multi_reviver(const Mpo &h, const EigenFamily &down_up, const EigenFamily &up_down, const std::vector<std::size_t> &walls,
                           const std::vector<int> &signs, const ReviverConfig &cfg) {
    const std::size_t n = walls.size();
    if(n < 1 || n > 3) throw ValidationError("multi_reviver supports one to three walls");
    if(signs.size() != n) throw LengthMismatchError("one sign per wall is required");
    for(int s : signs)
        if(s != 1 && s != -1) throw ValidationError("signs must be +1 or -1");
    for(std::size_t i = 1; i < n; ++i) {
        if(walls[i] <= walls[i - 1]) throw ValidationError("wall positions must increase");
        if(walls[i] - walls[i - 1] < std::max<std::size_t>(cfg.min_separation, 2))
            throw ValidationError("walls " + std::to_string(walls[i - 1]) + " and " + std::to_string(walls[i]) + " are closer than the minimum separation");
    }

    // constituents[i][b]: wall i at position walls[i] + b.
    std::vector<std::array<const EigenpairMPS *, 2>> parts(n);
    std::string problems;
    for(std::size_t i = 0; i < n; ++i) {
        const EigenFamily &fam = i % 2 == 0 ? down_up : up_down;
        for(std::size_t b = 0; b < 2; ++b) {
            std::string why;
            parts[i][b] = find_converged(fam, walls[i] + b, why);
            if(!parts[i][b]) problems += (problems.empty() ? "" : "; ") + std::string(i % 2 == 0 ? "down-up " : "up-down ") + why;
        }
    }
    if(!problems.empty()) throw ValidationError("multi_reviver rejected: " + problems);

    MultiReviver out;
    if(n == 1) {
        const auto pair = pair_superpositions(*parts[0][0], *parts[0][1]);
        out.state       = signs[0] > 0 ? pair.plus : pair.minus;
        out.components  = {*parts[0][0], *parts[0][1]};
        const double s  = 1.0 / std::sqrt(2.0);
        out.coefficients = {s, signs[0] * s};
        for(const auto &c : out.components) {
            out.report.var_rescaled.push_back(c.var_rescaled);
            out.report.max_var_rescaled = std::max(out.report.max_var_rescaled, std::abs(c.var_rescaled));
        }
        out.report.all_eigenstates = out.report.max_var_rescaled <= cfg.variance_threshold;
        return out;
    }

    const Mpo h2 = build_squared_mpo(h);
    std::vector<std::size_t> cuts;
    for(std::size_t i = 1; i < n; ++i) cuts.push_back(glue_cut(walls[i - 1] + 1, walls[i]));
    const double norm = std::pow(2.0, -0.5 * static_cast<double>(n));
    for(unsigned bits = 0; bits < (1U << n); ++bits) {
        const auto pick = [&](std::size_t i) { return parts[i][(bits >> (n - 1 - i)) & 1U]; };
        Mps               state = pick(0)->state;
        std::vector<Spin> spins = pick(0)->seed.spins();
        cplx              coeff = norm;
        if((bits >> (n - 1)) & 1U) coeff *= signs[0];
        for(std::size_t i = 1; i < n; ++i) {
            const auto *e = pick(i);
            auto        g = glue(state, e->state, cuts[i - 1], cfg.glue);
            out.report.cuts.push_back(g.report);
            state = std::move(g.state);
            std::copy(e->seed.spins().begin() + static_cast<std::ptrdiff_t>(cuts[i - 1]), e->seed.spins().end(),
                      spins.begin() + static_cast<std::ptrdiff_t>(cuts[i - 1]));
            if((bits >> (n - 1 - i)) & 1U) coeff *= signs[i];
        }
        EigenpairMPS c;
        c.seed            = SpinConfiguration(spins);
        c.state           = fix_phase(state, c.seed);
        const auto stats  = energy_variance(c.state, h, h2);
        c.energy          = stats.energy;
        c.variance        = stats.variance;
        c.var_rescaled    = stats.rescaled;
        c.converged       = std::abs(stats.rescaled) <= cfg.variance_threshold;
        out.report.var_rescaled.push_back(stats.rescaled);
        out.report.max_var_rescaled = std::max(out.report.max_var_rescaled, std::abs(stats.rescaled));
        out.components.push_back(std::move(c));
        out.coefficients.push_back(coeff);
    }
    out.report.all_eigenstates = out.report.max_var_rescaled <= cfg.variance_threshold;
    std::vector<Mps> states;
    for(const auto &c : out.components) states.push_back(c.state);
    const Mps sum = superpose(states, out.coefficients);
    out.state     = sum.scaled(1.0 / std::sqrt(norm_squared(sum)));
    return out;
}

} // namespace mblrevive
