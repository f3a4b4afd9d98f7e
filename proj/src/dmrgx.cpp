#include "mblrevive/dmrgx.hpp"

#include "mblrevive/errors.hpp"
#include "mblrevive/linalg.hpp"
#include "mblrevive/mps_io.hpp"

#include <algorithm>
#include <atomic>
#include <cfloat>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace mblrevive {

using Eigen::Index;
using Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// Schedules

SweepSchedule SweepSchedule::standard() {
    SweepSchedule s;
    for(Index chi : {2, 4, 8, 16, 24, 32}) s.stages.push_back({chi, 20});
    return s;
}

SweepSchedule SweepSchedule::parse(const std::string &text, double threshold) {
    SweepSchedule s;
    s.threshold = threshold;
    std::stringstream in(text);
    std::string       item;
    while(std::getline(in, item, ',')) {
        const auto colon = item.find(':');
        if(colon == std::string::npos) throw ValidationError("schedule stage '" + item + "' is not chi:sweeps");
        try {
            std::size_t used_chi = 0, used_sweeps = 0;
            const std::string chi_text = item.substr(0, colon), sweeps_text = item.substr(colon + 1);
            SweepStage stage{std::stol(chi_text, &used_chi), std::stoi(sweeps_text, &used_sweeps)};
            if(used_chi != chi_text.size() || used_sweeps != sweeps_text.size()) throw std::invalid_argument(item);
            s.stages.push_back(stage);
        } catch(const std::logic_error &) {
            throw ValidationError("schedule stage '" + item + "' is not chi:sweeps");
        }
    }
    s.validate();
    return s;
}

void SweepSchedule::validate() const {
    if(stages.empty()) throw ValidationError("schedule has no stages");
    for(std::size_t i = 0; i < stages.size(); ++i) {
        if(stages[i].chi < 1) throw ValidationError("schedule bond dimensions must be positive");
        if(stages[i].sweeps < 1) throw ValidationError("schedule sweep counts must be >= 1");
        if(i > 0 && stages[i].chi <= stages[i - 1].chi) throw ValidationError("schedule bond dimensions must increase strictly");
    }
    if(!(threshold > 0.0)) throw ValidationError("convergence threshold must be positive");
}

std::string SweepSchedule::to_string() const {
    std::string out;
    for(const auto &st : stages) {
        if(!out.empty()) out += ',';
        out += std::to_string(st.chi) + ":" + std::to_string(st.sweeps);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Real block-sparse engine

namespace {

struct RealMpoSite {
    int                           left  = 0;
    int                           right = 0;
    std::vector<Eigen::Matrix2d>  w;
    [[nodiscard]] const Eigen::Matrix2d &at(int l, int r) const { return w[static_cast<std::size_t>(l * right + r)]; }
};

std::vector<RealMpoSite> to_real(const Mpo &mpo) {
    std::vector<RealMpoSite> out;
    for(const auto &site : mpo) {
        RealMpoSite r{site.left_dim(), site.right_dim(), {}};
        for(int l = 0; l < r.left; ++l)
            for(int c = 0; c < r.right; ++c) {
                const auto &m = site.at(l, c);
                if(m.imag().cwiseAbs().maxCoeff() != 0.0) throw ValidationError("dmrgx requires a real Hamiltonian MPO");
                r.w.push_back(m.real());
            }
        out.push_back(std::move(r));
    }
    return out;
}

using RealSite = std::array<MatrixXd, 2>;
using Env      = std::vector<MatrixXd>; // one (bra x ket) block per MPO channel

Env grow_left(const Env &env, const RealMpoSite &w, const RealSite &a) {
    Env next(static_cast<std::size_t>(w.right), MatrixXd::Zero(a[0].cols(), a[0].cols()));
    for(int l = 0; l < w.left; ++l)
        for(int t = 0; t < 2; ++t) {
            const MatrixXd x = env[static_cast<std::size_t>(l)] * a[static_cast<std::size_t>(t)];
            for(int s = 0; s < 2; ++s) {
                MatrixXd y;
                for(int r = 0; r < w.right; ++r) {
                    const double c = w.at(l, r)(s, t);
                    if(c == 0.0) continue;
                    if(y.size() == 0) y = a[static_cast<std::size_t>(s)].transpose() * x;
                    next[static_cast<std::size_t>(r)] += c * y;
                }
            }
        }
    return next;
}

Env grow_right(const Env &env, const RealMpoSite &w, const RealSite &a) {
    Env next(static_cast<std::size_t>(w.left), MatrixXd::Zero(a[0].rows(), a[0].rows()));
    for(int r = 0; r < w.right; ++r)
        for(int t = 0; t < 2; ++t) {
            const MatrixXd x = env[static_cast<std::size_t>(r)] * a[static_cast<std::size_t>(t)].transpose();
            for(int s = 0; s < 2; ++s) {
                MatrixXd y;
                for(int l = 0; l < w.left; ++l) {
                    const double c = w.at(l, r)(s, t);
                    if(c == 0.0) continue;
                    if(y.size() == 0) y = a[static_cast<std::size_t>(s)] * x;
                    next[static_cast<std::size_t>(l)] += c * y;
                }
            }
        }
    return next;
}

struct Term {
    int    w1 = 0, w3 = 0;
    double c  = 0.0;
};

class Engine {
  public:
    Engine(const Mpo &h, const SpinConfiguration &seed, const DmrgxOptions &opts) : w_(to_real(h)), opts_(opts), L_(seed.size()) {
        if(h.size() != seed.size()) throw LengthMismatchError("seed length does not match the Hamiltonian");
        if(L_ < 2) throw InvalidSizeError("dmrgx needs at least two sites");
        q_.push_back({0});
        for(std::size_t j = 0; j < L_; ++j) {
            const int s = static_cast<int>(seed[j]);
            RealSite a{MatrixXd::Zero(1, 1), MatrixXd::Zero(1, 1)};
            a[static_cast<std::size_t>(s)](0, 0) = 1.0;
            sites_.push_back(std::move(a));
            q_.push_back({q_.back()[0] + spin_charge(s)});
        }
        left_.resize(L_ + 1);
        right_.resize(L_ + 1);
        left_[0]  = Env(1, MatrixXd::Ones(1, 1));
        right_[L_] = Env(1, MatrixXd::Ones(1, 1));
        for(std::size_t j = L_; j-- > 0;) right_[j] = grow_right(right_[j + 1], w_[j], sites_[j]);
        for(std::size_t j = 0; j + 1 < L_; ++j) terms_.push_back(pair_terms(w_[j], w_[j + 1]));
    }

    void sweep(Index chi) {
        for(std::size_t j = 0; j + 1 < L_; ++j) {
            update(j, chi, true);
            left_[j + 1] = grow_left(left_[j], w_[j], sites_[j]);
        }
        for(std::size_t j = L_ - 1; j-- > 0;) {
            update(j, chi, false);
            right_[j + 1] = grow_right(right_[j + 2], w_[j + 1], sites_[j + 1]);
        }
    }

    [[nodiscard]] Mps state() const {
        std::vector<SiteTensor> sites;
        for(const auto &a : sites_) sites.push_back({a[0].cast<cplx>(), a[1].cast<cplx>()});
        return Mps(std::move(sites), q_, 0);
    }

    [[nodiscard]] Index max_bond() const {
        Index m = 1;
        for(const auto &a : sites_) m = std::max(m, a[0].cols());
        return m;
    }

  private:
    // coefficient lists indexed by (s1, t1, s2, t2) -> 16 combinations
    static std::array<std::vector<Term>, 16> pair_terms(const RealMpoSite &a, const RealMpoSite &b) {
        std::array<std::vector<Term>, 16> out;
        for(int s1 = 0; s1 < 2; ++s1)
            for(int t1 = 0; t1 < 2; ++t1)
                for(int s2 = 0; s2 < 2; ++s2)
                    for(int t2 = 0; t2 < 2; ++t2) {
                        auto &list = out[static_cast<std::size_t>(((s1 * 2 + t1) * 2 + s2) * 2 + t2)];
                        for(int w1 = 0; w1 < a.left; ++w1)
                            for(int w3 = 0; w3 < b.right; ++w3) {
                                double c = 0.0;
                                for(int w2 = 0; w2 < a.right; ++w2) c += a.at(w1, w2)(s1, t1) * b.at(w2, w3)(s2, t2);
                                if(c != 0.0) list.push_back({w1, w3, c});
                            }
                    }
        return out;
    }

    void update(std::size_t j, Index chi, bool moving_right) {
        const auto &ql = q_[j];
        const auto &qr = q_[j + 2];
        const Index cl = sites_[j][0].rows();
        const Index cr = sites_[j + 1][0].cols();

        // Valid (a, s1, s2, b) grouped by physical pair p = 2*s1 + s2.
        struct Entry {
            Index a, b;
        };
        std::array<std::vector<Entry>, 4> blocks;
        std::vector<Index> lookup(static_cast<std::size_t>(cl * 4 * cr), -1);
        Index dim = 0;
        for(int p = 0; p < 4; ++p) {
            const int dq = spin_charge(p / 2) + spin_charge(p % 2);
            for(Index a = 0; a < cl; ++a)
                for(Index b = 0; b < cr; ++b)
                    if(ql[static_cast<std::size_t>(a)] + dq == qr[static_cast<std::size_t>(b)]) {
                        blocks[static_cast<std::size_t>(p)].push_back({a, b});
                        lookup[static_cast<std::size_t>((a * 4 + p) * cr + b)] = dim++;
                    }
        }
        if(dim > opts_.max_effective_dim)
            throw ResourceError("dmrgx effective problem of dimension " + std::to_string(dim) + " at site " + std::to_string(j) + " (chi = " +
                                std::to_string(chi) + ") exceeds the dense limit " + std::to_string(opts_.max_effective_dim));

        std::array<Index, 4> offset{};
        for(int p = 1; p < 4; ++p) offset[static_cast<std::size_t>(p)] = offset[static_cast<std::size_t>(p - 1)] + static_cast<Index>(blocks[static_cast<std::size_t>(p - 1)].size());

        Eigen::VectorXd theta(dim);
        for(int p = 0; p < 4; ++p) {
            const MatrixXd two = sites_[j][static_cast<std::size_t>(p / 2)] * sites_[j + 1][static_cast<std::size_t>(p % 2)];
            const auto    &blk = blocks[static_cast<std::size_t>(p)];
            for(std::size_t i = 0; i < blk.size(); ++i) theta(offset[static_cast<std::size_t>(p)] + static_cast<Index>(i)) = two(blk[i].a, blk[i].b);
        }

        const Env &le = left_[j];
        const Env &re = right_[j + 2];
        const auto &terms = terms_[j];
        MatrixXd heff = MatrixXd::Zero(dim, dim);
        for(int p = 0; p < 4; ++p)
            for(int pp = 0; pp < 4; ++pp) {
                const int s1 = p / 2, s2 = p % 2, t1 = pp / 2, t2 = pp % 2;
                const auto &list = terms[static_cast<std::size_t>(((s1 * 2 + t1) * 2 + s2) * 2 + t2)];
                if(list.empty()) continue;
                const auto &rows = blocks[static_cast<std::size_t>(p)];
                const auto &cols = blocks[static_cast<std::size_t>(pp)];
                const Index r0 = offset[static_cast<std::size_t>(p)], c0 = offset[static_cast<std::size_t>(pp)];
                for(const auto &term : list) {
                    const MatrixXd &lm = le[static_cast<std::size_t>(term.w1)];
                    const MatrixXd &rm = re[static_cast<std::size_t>(term.w3)];
                    for(std::size_t ci = 0; ci < cols.size(); ++ci) {
                        const Index ap = cols[ci].a, bp = cols[ci].b;
                        double     *col = heff.col(c0 + static_cast<Index>(ci)).data() + r0;
                        for(std::size_t ri = 0; ri < rows.size(); ++ri) {
                            const double lv = lm(rows[ri].a, ap);
                            if(lv == 0.0) continue;
                            col[ri] += term.c * lv * rm(rows[ri].b, bp);
                        }
                    }
                }
            }
        heff = 0.5 * (heff + heff.transpose()).eval();

        const auto sel = linalg::select_max_overlap(heff, theta, opts_.tie_tolerance);
        split(j, chi, moving_right, sel.vector, lookup);
    }

    // Charge-block SVD of the selected two-site vector.
    void split(std::size_t j, Index chi, bool moving_right, const Eigen::VectorXd &v, const std::vector<Index> &lookup) {
        const auto &ql = q_[j];
        const auto &qr = q_[j + 2];
        const Index cl = sites_[j][0].rows();
        const Index cr = sites_[j + 1][0].cols();

        std::vector<int> charges;
        for(Index a = 0; a < cl; ++a)
            for(int s = 0; s < 2; ++s) charges.push_back(ql[static_cast<std::size_t>(a)] + spin_charge(s));
        std::sort(charges.begin(), charges.end());
        charges.erase(std::unique(charges.begin(), charges.end()), charges.end());

        struct Block {
            int                                        q;
            std::vector<std::pair<Index, int>>         rows; // (a, s1)
            std::vector<std::pair<int, Index>>         cols; // (s2, b)
            MatrixXd                                   u, vt;
            Eigen::VectorXd                            s;
        };
        std::vector<Block> blocks;
        struct Candidate {
            double      value;
            std::size_t block;
            Index       index;
        };
        std::vector<Candidate> cand;
        for(int q : charges) {
            Block blk{q, {}, {}, {}, {}, {}};
            for(Index a = 0; a < cl; ++a)
                for(int s = 0; s < 2; ++s)
                    if(ql[static_cast<std::size_t>(a)] + spin_charge(s) == q) blk.rows.emplace_back(a, s);
            for(int s = 0; s < 2; ++s)
                for(Index b = 0; b < cr; ++b)
                    if(qr[static_cast<std::size_t>(b)] - spin_charge(s) == q) blk.cols.emplace_back(s, b);
            if(blk.rows.empty() || blk.cols.empty()) continue;
            MatrixXd m(static_cast<Index>(blk.rows.size()), static_cast<Index>(blk.cols.size()));
            for(std::size_t r = 0; r < blk.rows.size(); ++r)
                for(std::size_t c = 0; c < blk.cols.size(); ++c) {
                    const auto [a, s1] = blk.rows[r];
                    const auto [s2, b] = blk.cols[c];
                    const Index idx    = lookup[static_cast<std::size_t>((a * 4 + s1 * 2 + s2) * cr + b)];
                    m(static_cast<Index>(r), static_cast<Index>(c)) = idx >= 0 ? v(idx) : 0.0;
                }
            if(m.norm() == 0.0) continue;
            Eigen::BDCSVD<MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
            blk.u  = svd.matrixU();
            blk.vt = svd.matrixV().transpose();
            blk.s  = svd.singularValues();
            for(Index i = 0; i < blk.s.size(); ++i) cand.push_back({blk.s(i), blocks.size(), i});
            blocks.push_back(std::move(blk));
        }
        if(cand.empty()) throw Error("dmrgx: selected two-site vector vanished");
        std::stable_sort(cand.begin(), cand.end(), [](const Candidate &x, const Candidate &y) { return x.value > y.value; });
        const double smax = cand.front().value;
        std::size_t  keep = 1;
        while(keep < cand.size() && static_cast<Index>(keep) < chi && cand[keep].value > opts_.truncation_cutoff * smax) ++keep;
        cand.resize(keep);
        // Group the new bond by charge for tidy tensors.
        std::stable_sort(cand.begin(), cand.end(), [&](const Candidate &x, const Candidate &y) { return blocks[x.block].q < blocks[y.block].q; });
        double norm2 = 0.0;
        for(const auto &c : cand) norm2 += c.value * c.value;
        const double scale = 1.0 / std::sqrt(norm2);

        const Index k = static_cast<Index>(keep);
        RealSite left{MatrixXd::Zero(cl, k), MatrixXd::Zero(cl, k)};
        RealSite right{MatrixXd::Zero(k, cr), MatrixXd::Zero(k, cr)};
        std::vector<int> mid(keep);
        for(std::size_t m = 0; m < keep; ++m) {
            const auto  &c   = cand[m];
            const Block &blk = blocks[c.block];
            mid[m]           = blk.q;
            const double sv  = c.value * scale;
            const double lw  = moving_right ? 1.0 : sv;
            const double rw  = moving_right ? sv : 1.0;
            for(std::size_t r = 0; r < blk.rows.size(); ++r) {
                const auto [a, s1] = blk.rows[r];
                left[static_cast<std::size_t>(s1)](a, static_cast<Index>(m)) = lw * blk.u(static_cast<Index>(r), c.index);
            }
            for(std::size_t cc = 0; cc < blk.cols.size(); ++cc) {
                const auto [s2, b] = blk.cols[cc];
                right[static_cast<std::size_t>(s2)](static_cast<Index>(m), b) = rw * blk.vt(c.index, static_cast<Index>(cc));
            }
        }
        sites_[j]     = std::move(left);
        sites_[j + 1] = std::move(right);
        q_[j + 1]     = std::move(mid);
    }

    std::vector<RealMpoSite>                        w_;
    DmrgxOptions                                    opts_;
    std::size_t                                     L_;
    std::vector<RealSite>                           sites_;
    BondCharges                                     q_;
    std::vector<Env>                                left_, right_;
    std::vector<std::array<std::vector<Term>, 16>> terms_;
};

} // namespace

EigenpairMPS dmrgx(const Mpo &h, const Mpo &h2, const SpinConfiguration &seed, const SweepSchedule &schedule, const DmrgxOptions &opts) {
    schedule.validate();
    Engine engine(h, seed, opts);
    EigenpairMPS out;
    out.seed = seed;
    int sweep_index = 0;
    std::optional<double> previous;
    for(const auto &stage : schedule.stages) {
        for(int s = 0; s < stage.sweeps; ++s) {
            engine.sweep(stage.chi);
            out.state          = engine.state();
            const auto stats   = energy_variance(out.state, h, h2);
            out.energy         = stats.energy;
            out.variance       = stats.variance;
            out.var_rescaled   = stats.rescaled;
            // <H^2> - <H>^2 cancels to within a few ulps of <H^2>.
            const double floor = 64.0 * DBL_EPSILON * (stats.variance + stats.energy * stats.energy);
            out.variance_is_noise = stats.variance < 0.0 &&
                                    (-stats.variance <= floor || (previous && *previous > 0.0 && -stats.variance <= 10.0 * *previous && *previous <= -10.0 * stats.variance));
            previous = stats.variance;
            out.sweeps.push_back({stage.chi, ++sweep_index, stats.energy, stats.variance, stats.rescaled, engine.max_bond()});
            if(std::abs(stats.rescaled) <= schedule.threshold) {
                out.converged        = true;
                out.converged_at_chi = stage.chi;
                return out;
            }
        }
    }
    return out;
}

EigenpairMPS dmrgx(const Mpo &h, const SpinConfiguration &seed, const SweepSchedule &schedule, const DmrgxOptions &opts) {
    return dmrgx(h, build_squared_mpo(h), seed, schedule, opts);
}

// ---------------------------------------------------------------------------

ConvergenceReport ConvergenceReport::for_schedule(const SweepSchedule &schedule) {
    ConvergenceReport r;
    for(const auto &st : schedule.stages) r.chi_caps.push_back(st.chi);
    r.unconverged.assign(r.chi_caps.size(), 0);
    return r;
}

void ConvergenceReport::add(const EigenpairMPS &e) {
    ++seeds;
    for(std::size_t i = 0; i < chi_caps.size(); ++i)
        if(!e.converged_at_chi || *e.converged_at_chi > chi_caps[i]) ++unconverged[i];
}

void ConvergenceReport::add_failure() {
    ++seeds;
    ++failed;
    for(auto &u : unconverged) ++u;
}

void ConvergenceReport::merge(const ConvergenceReport &other) {
    if(chi_caps.empty()) {
        *this = other;
        return;
    }
    if(other.chi_caps != chi_caps) throw ValidationError("cannot merge convergence reports of different schedules");
    seeds += other.seeds;
    failed += other.failed;
    for(std::size_t i = 0; i < unconverged.size(); ++i) unconverged[i] += other.unconverged[i];
}

unsigned worker_count(unsigned requested) {
    unsigned n = requested != 0 ? requested : std::max(1U, std::thread::hardware_concurrency());
    if(const char *env = std::getenv("MBLREVIVE_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if(cap >= 1) n = std::min(n, static_cast<unsigned>(cap));
    }
    return std::max(1U, n);
}

SeedFamily run_seed_family(const Mpo &h, const DisorderRealization &d, const SweepSchedule &schedule, const FamilyOptions &opts) {
    schedule.validate();
    if(h.size() != d.length) throw LengthMismatchError("Hamiltonian and disorder lengths differ");
    const std::size_t L     = d.length;
    const std::size_t first = opts.first_k;
    const std::size_t last  = opts.last_k.value_or(L - 1);
    if(first > last || last > L) throw ValidationError("invalid seed range");
    const Mpo h2 = build_squared_mpo(h);

    SeedFamily family;
    for(std::size_t k = first; k <= last; ++k) {
        SeedOutcome o;
        o.k    = k;
        o.seed = opts.orientation == SeedOrientation::domain_wall ? SpinConfiguration::domain_wall(L, k) : SpinConfiguration::flipped_domain_wall(L, k);
        family.seeds.push_back(std::move(o));
    }

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for(std::size_t i = next++; i < family.seeds.size(); i = next++) {
            auto &o = family.seeds[i];
            try {
                o.eigenpair = dmrgx(h, h2, o.seed, schedule, opts.dmrgx);
            } catch(const std::exception &e) {
                o.error = e.what();
            }
        }
    };
    const unsigned n = std::min<unsigned>(worker_count(opts.threads), static_cast<unsigned>(family.seeds.size()));
    if(n <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for(unsigned t = 0; t < n; ++t) pool.emplace_back(work);
    }

    family.report = ConvergenceReport::for_schedule(schedule);
    for(const auto &o : family.seeds) {
        if(o.eigenpair)
            family.report.add(*o.eigenpair);
        else
            family.report.add_failure();
    }
    return family;
}

// ---------------------------------------------------------------------------

void append_sweep_log(std::ostream &out, std::size_t seed_k, const EigenpairMPS &e) {
    for(const auto &s : e.sweeps) {
        nlohmann::json j{{"seed_k", seed_k}, {"stage_chi", s.stage_chi}, {"sweep_index", s.sweep_index}, {"E", s.energy}, {"var_rescaled", s.var_rescaled}};
        out << j.dump() << '\n';
    }
}

nlohmann::json eigenpair_summary(const EigenpairMPS &e) {
    nlohmann::json j;
    j["schema_version"]    = 1;
    j["seed"]              = e.seed.to_string();
    j["E"]                 = e.energy;
    j["variance"]          = e.variance;
    j["var_rescaled"]      = e.var_rescaled;
    j["converged"]         = e.converged;
    j["converged_at_chi"]  = e.converged_at_chi ? nlohmann::json(*e.converged_at_chi) : nlohmann::json(nullptr);
    j["variance_is_noise"] = e.variance_is_noise;
    j["sweeps"]            = e.sweeps.size();
    j["max_bond"]          = e.state.size() == 0 ? 0 : e.state.max_bond_dim();
    return j;
}

void save_eigenpair(const EigenpairMPS &e, const std::filesystem::path &dir) {
    save_mps(e.state, dir);
    auto j = eigenpair_summary(e);
    nlohmann::json log = nlohmann::json::array();
    for(const auto &s : e.sweeps) log.push_back({s.stage_chi, s.sweep_index, s.energy, s.variance, s.var_rescaled, s.max_bond});
    j["sweep_log"] = std::move(log);
    std::ofstream out(dir / "eigenpair.json", std::ios::trunc);
    out << j.dump(2) << '\n';
    if(!out) throw IoError("failed writing " + (dir / "eigenpair.json").string());
}

EigenpairMPS load_eigenpair(const std::filesystem::path &dir) {
    std::ifstream in(dir / "eigenpair.json");
    if(!in) throw IoError("missing " + (dir / "eigenpair.json").string());
    nlohmann::json j;
    try {
        in >> j;
    } catch(const nlohmann::json::exception &ex) {
        throw IoError("malformed eigenpair.json in " + dir.string() + ": " + ex.what());
    }
    EigenpairMPS e;
    e.state             = load_mps(dir);
    e.seed              = SpinConfiguration::from_string(j.at("seed").get<std::string>());
    e.energy            = j.at("E").get<double>();
    e.variance          = j.at("variance").get<double>();
    e.var_rescaled      = j.at("var_rescaled").get<double>();
    e.converged         = j.at("converged").get<bool>();
    e.variance_is_noise = j.value("variance_is_noise", false);
    if(!j.at("converged_at_chi").is_null()) e.converged_at_chi = j["converged_at_chi"].get<Index>();
    if(j.contains("sweep_log"))
        for(const auto &r : j["sweep_log"])
            e.sweeps.push_back({r[0].get<Index>(), r[1].get<int>(), r[2].get<double>(), r[3].get<double>(), r[4].get<double>(), r[5].get<Index>()});
    if(e.seed.size() != e.state.size()) throw IoError("seed and state lengths differ in " + dir.string());
    return e;
}

} // namespace mblrevive
