#include "mblrevive/certifier.hpp"
#include "mblrevive/dmrgx.hpp"
#include "mblrevive/dynamics.hpp"
#include "mblrevive/ed_oracle.hpp"
#include "mblrevive/errors.hpp"
#include "mblrevive/harness.hpp"
#include "mblrevive/linalg.hpp"
#include "mblrevive/multiexc.hpp"
#include "mblrevive/rng.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace mblrevive;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool        pass = false;
    std::string detail;
};

std::string sci(double x) {
    std::ostringstream s;
    s.precision(3);
    s << std::scientific << x;
    return s.str();
}

std::string fix(double x, int digits = 4) {
    std::ostringstream s;
    s.precision(digits);
    s << std::fixed << x;
    return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

DenseState phase_fixed(const DenseEigenpair &e) {
    const cplx a = e.vector(static_cast<Eigen::Index>(e.seed.index()));
    return std::abs(a) > 0.0 ? DenseState(e.vector * (std::conj(a) / std::abs(a))) : e.vector;
}

double local_expectation(const DenseState &psi, std::size_t L, std::size_t site, const Eigen::Matrix2cd &op) {
    return (op * dense_rdm(psi, L, site)).trace().real();
}

// One certified pair with both pipelines.
struct SuitePair {
    std::uint64_t  seed = 0;
    DenseEigenpair e1, e2;
    Certificate    mps, ed;
};

struct Suite {
    std::size_t                               L = 10;
    std::map<std::uint64_t, DisorderRealization> disorder;
    std::vector<SuitePair>                    pairs;
    std::size_t                               unconverged = 0;
    std::vector<std::string>                  errors;
    double                                    seconds = 0.0;
};

constexpr std::uint64_t suite_seeds[] = {11, 12, 13};

// MPS and ED certificates at L=10, W=8. The variance threshold is tightened
// to 1e-15 so that MPS eigenvectors reach the 1e-8 field agreement.
const Suite &oracle_suite() {
    static const Suite s = [] {
        Suite      out;
        const auto t0 = std::chrono::steady_clock::now();
        for(std::uint64_t seed : suite_seeds) {
            const auto d = sample_disorder(out.L, 8.0, seed);
            out.disorder.emplace(seed, d);
            const auto    h = build_hamiltonian_mpo(d);
            FamilyOptions fo;
            fo.last_k        = out.L;
            const auto fam   = run_seed_family(h, d, SweepSchedule::parse(SweepSchedule::standard().to_string(), 1e-15), fo);
            DenseEvolver ed(d);
            std::vector<std::optional<EigenpairMPS>> byk(out.L + 1);
            for(const auto &o : fam.seeds) {
                if(!o.eigenpair) {
                    out.errors.push_back("seed " + std::to_string(seed) + " k=" + std::to_string(o.k) + ": " + o.error);
                    continue;
                }
                if(!o.eigenpair->converged) ++out.unconverged;
                byk[o.k] = o.eigenpair;
            }
            for(std::size_t k = 1; k < out.L; ++k) {
                if(!byk[k] || !byk[k + 1]) continue;
                try {
                    SuitePair p;
                    p.seed = seed;
                    p.e1   = matched_eigenpair(ed, to_dense(byk[k]->state), byk[k]->seed);
                    p.e2   = matched_eigenpair(ed, to_dense(byk[k + 1]->state), byk[k + 1]->seed);
                    p.mps  = certify(*byk[k], *byk[k + 1], k, true);
                    p.ed   = certify_dense(p.e1, p.e2, k);
                    out.pairs.push_back(std::move(p));
                } catch(const Error &e) {
                    out.errors.push_back("seed " + std::to_string(seed) + " k=" + std::to_string(k) + ": " + e.what());
                }
            }
        }
        out.seconds = seconds_since(t0);
        return out;
    }();
    return s;
}

Outcome criterion1() {
    const auto &s     = oracle_suite();
    double      worst = 0.0;
    for(const auto &p : s.pairs) worst = std::max(worst, certificate_distance(p.mps, p.ed));
    const std::size_t expected = std::size(suite_seeds) * (s.L - 1);
    Outcome           o;
    o.pass   = s.errors.empty() && s.pairs.size() == expected && worst <= 1e-8 && s.seconds < 300.0;
    o.detail = std::to_string(s.pairs.size()) + "/" + std::to_string(expected) + " certificates, max field difference " + sci(worst) + ", " +
               std::to_string(s.unconverged) + " unconverged eigenpairs, " + fix(s.seconds, 1) + " s";
    if(!s.errors.empty()) o.detail += ", first error: " + s.errors.front();
    return o;
}

// Product approximation of the plus superposition of an ED pair.
std::optional<ProductState> plus_product(const SuitePair &p) {
    if(p.ed.has_flag("ambiguous_direction")) return std::nullopt;
    DenseState plus = phase_fixed(p.e1) + phase_fixed(p.e2);
    plus.normalize();
    return product_from_rdms(dense_rdms(plus, p.e1.seed.size()));
}

Outcome criterion2() {
    const auto &s = oracle_suite();
    std::map<std::uint64_t, DenseEvolver> evolvers;
    double      worst_margin = std::numeric_limits<double>::infinity();
    std::size_t checks = 0, violations = 0, trivial = 0;
    for(const auto &p : s.pairs) {
        const auto phi = plus_product(p);
        if(!phi) {
            ++trivial;
            continue;
        }
        auto &ed = evolvers.try_emplace(p.seed, s.disorder.at(p.seed)).first->second;
        const DenseState phi0 = phi->to_dense();
        for(int n = 1; n <= 5; ++n) {
            const double f      = std::norm(phi0.dot(ed.evolve(phi0, 2.0 * n * p.ed.tau)));
            const double margin = f - p.ed.revival_bound;
            worst_margin        = std::min(worst_margin, margin);
            ++checks;
            if(margin < -1e-10) ++violations;
        }
    }
    Outcome o;
    o.pass   = s.errors.empty() && checks > 0 && violations == 0;
    o.detail = std::to_string(checks) + " revivals, " + std::to_string(violations) + " violations, min |<Phi(0)|Phi(2n tau)>|^2 - (1 - 4 eps) = " + sci(worst_margin);
    if(trivial) o.detail += ", " + std::to_string(trivial) + " certificates without product direction";
    return o;
}

Outcome criterion3() {
    const auto &s = oracle_suite();
    std::map<std::uint64_t, DenseEvolver> evolvers;
    double      worst_margin = std::numeric_limits<double>::infinity(), worst_ratio = std::numeric_limits<double>::infinity();
    std::size_t checks = 0, violations = 0, below_difference_bound = 0;
    for(const auto &p : s.pairs) {
        const auto phi = plus_product(p);
        if(!phi) continue;
        auto &ed = evolvers.try_emplace(p.seed, s.disorder.at(p.seed)).first->second;
        const DenseState  phi0 = phi->to_dense();
        const std::size_t L    = p.e1.seed.size();
        for(int n = 0; n <= 5; ++n) {
            const double a    = local_expectation(ed.evolve(phi0, 2.0 * n * p.ed.tau), L, p.ed.j_star, p.ed.A_obs);
            const double b    = local_expectation(ed.evolve(phi0, (2.0 * n + 1.0) * p.ed.tau), L, p.ed.j_star, p.ed.A_obs);
            const double diff = a - b;
            worst_margin      = std::min(worst_margin, diff - p.ed.A_certified);
            if(p.ed.A_certified > 0.0) worst_ratio = std::min(worst_ratio, diff / p.ed.A_certified);
            if(diff < p.ed.difference_bound - 1e-8) ++below_difference_bound;
            ++checks;
            if(diff < p.ed.A_certified - 1e-8) ++violations;
        }
    }
    Outcome o;
    o.pass   = s.errors.empty() && checks > 0 && violations == 0;
    o.detail = std::to_string(checks) + " half-period differences, " + std::to_string(violations) + " below A_certified, min margin " + sci(worst_margin) +
               ", min difference / A_certified " + fix(worst_ratio) + ", " + std::to_string(below_difference_bound) + " below 2 A_certified (report only)";
    return o;
}

struct FidelityScan {
    std::size_t              checked = 0, unconverged = 0, bad_overlap = 0, bad_variance = 0;
    double                   worst_overlap = 1.0, worst_var = 0.0;
    std::vector<std::string> errors;
};

// Domain-wall families at L=12, W=8 compared against ED. An eigenpair counts
// as converged when the solver flagged it or its variance reached 1e-12.
FidelityScan fidelity_scan(double threshold) {
    const std::size_t L = 12;
    FidelityScan      out;
    for(std::uint64_t seed = 21; seed < 26; ++seed) {
        const auto    d = sample_disorder(L, 8.0, seed);
        FamilyOptions fo;
        fo.first_k = 0;
        fo.last_k  = L;
        const auto   fam = run_seed_family(build_hamiltonian_mpo(d), d, SweepSchedule::parse(SweepSchedule::standard().to_string(), threshold), fo);
        DenseEvolver ed(d);
        for(const auto &o : fam.seeds) {
            if(!o.eigenpair) {
                out.errors.push_back(o.error);
                continue;
            }
            const double var = std::abs(o.eigenpair->var_rescaled);
            if(!o.eigenpair->converged && var > 1e-12) {
                ++out.unconverged;
                continue;
            }
            EigenMatch m;
            (void)matched_eigenpair(ed, to_dense(o.eigenpair->state), o.seed, &m);
            out.worst_overlap = std::min(out.worst_overlap, m.overlap);
            out.worst_var     = std::max(out.worst_var, var);
            if(m.overlap < 1.0 - 1e-10) ++out.bad_overlap;
            if(var > 1e-12) ++out.bad_variance;
            ++out.checked;
        }
    }
    return out;
}

// Stopping at the first sweep below 1e-12 leaves overlaps of 1 - O(1e-10)
// for eigenpairs with close neighbours, so the solver runs to 1e-15 as in
// criterion 1; the run at 1e-12 is reported alongside.
Outcome criterion4() {
    const auto   t0    = std::chrono::steady_clock::now();
    const auto   tight = fidelity_scan(1e-15);
    const double secs  = seconds_since(t0);
    const auto   plain = fidelity_scan(1e-12);
    Outcome      o;
    o.pass   = tight.errors.empty() && tight.checked > 0 && tight.bad_overlap == 0 && tight.bad_variance == 0 && secs < 1800.0;
    o.detail = std::to_string(tight.checked) + " converged eigenpairs (" + std::to_string(tight.unconverged) + " unconverged), min overlap 1 - " +
               sci(1.0 - tight.worst_overlap) + ", max |var/E^2| " + sci(tight.worst_var) + ", " + fix(secs, 1) + " s; stopping at 1e-12: min overlap 1 - " +
               sci(1.0 - plain.worst_overlap) + ", " + std::to_string(plain.bad_overlap) + " of " + std::to_string(plain.checked) + " below 1 - 1e-10";
    if(!tight.errors.empty()) o.detail += ", " + std::to_string(tight.errors.size()) + " failed seeds";
    return o;
}

struct RunPaths {
    fs::path runs;
    fs::path configs;
};

EnsembleConfig cached_config(const RunPaths &paths, const std::string &name) {
    auto c   = load_ensemble_config(paths.configs / (name + ".json"));
    c.output = paths.runs;
    return c;
}

const AggregateRow *find_row(const std::vector<AggregateRow> &rows, std::size_t L, double W, bool post_selected = false) {
    for(const auto &r : rows)
        if(r.L == L && r.W == W && r.post_selected == post_selected) return &r;
    return nullptr;
}

Outcome criterion5(const RunPaths &paths) {
    const auto t0  = std::chrono::steady_clock::now();
    const auto cfg = cached_config(paths, "c5");
    const auto sum = run_ensemble(cfg, &std::cerr);
    const auto rows = aggregate(cfg.run_dir());
    const auto *a = find_row(rows, 20, 8.0), *b = find_row(rows, 40, 8.0);
    Outcome     o;
    if(!a || !b) {
        o.detail = "missing L=20 or L=40 rows";
        return o;
    }
    const auto in_range = [](double x) { return x >= 0.55 && x <= 0.85; };
    const double shortfall = a->max_A_median - b->max_A_median;
    o.pass   = sum.ok() && in_range(a->median_A) && in_range(b->median_A) && shortfall < 0.05;
    o.detail = "median A: L=20 " + fix(a->median_A) + " (" + std::to_string(a->realizations) + " realizations), L=40 " + fix(b->median_A) + " (" +
               std::to_string(b->realizations) + "); middle-half max median L=20 " + fix(a->max_A_median) + ", L=40 " + fix(b->max_A_median);
    if(shortfall > 0.0) o.detail += shortfall < 0.05 ? " (trend violated by " + fix(shortfall) + ", report only)" : " (trend violated)";
    o.detail += ", " + fix(seconds_since(t0), 1) + " s";
    if(!sum.ok()) o.detail += ", ensemble reported errors";
    return o;
}

Outcome criterion6(const RunPaths &paths) {
    const auto t0   = std::chrono::steady_clock::now();
    const auto cfg  = cached_config(paths, "c6");
    const auto rows = crossover_scan(cfg, &std::cerr);
    Outcome    o;
    std::map<double, const AggregateRow *> all, post;
    for(const auto &r : rows) (r.post_selected ? post : all)[r.W] = &r;
    for(double W : {1.0, 2.0, 8.0})
        if(!all.count(W)) {
            o.detail = "missing W row";
            return o;
        }
    const double m8 = all[8.0]->median_A, m2 = all[2.0]->median_A, m1 = all[1.0]->median_A;
    o.pass = m8 >= 3.0 * m2 && m1 < 0.2 && m2 < 0.2;
    std::ostringstream s;
    s << "median A by W:";
    for(const auto &[W, r] : all) s << " " << W << "->" << fix(r->median_A, 3);
    s << "; post-selected:";
    for(const auto &[W, r] : post) s << " " << W << "->" << (r->realizations ? fix(r->median_A, 3) : "none") << "(" << r->realizations << ")";
    s << "; W=8 / W=2 = " << (m2 > 0.0 ? fix(m8 / m2, 2) : "inf") << ", " << fix(seconds_since(t0), 1) << " s";
    o.detail = s.str();
    return o;
}

Outcome criterion7() {
    const std::size_t L = 10;
    DenseEvolver      ed(sample_disorder(L, 8.0, 31));
    std::vector<DenseEigenpair> eig;
    for(std::size_t k : {5u, 6u, 3u}) {
        const auto seed = SpinConfiguration::domain_wall(L, k);
        eig.push_back(matched_eigenpair(ed, to_dense(from_configuration(seed)), seed));
    }
    std::vector<Mps>         states;
    std::vector<long double> energies;
    for(const auto &e : eig) {
        states.push_back(from_dense(e.vector, L));
        energies.push_back(e.energy);
    }
    double worst = 0.0, worst_period = 0.0;
    const std::vector<std::vector<cplx>> coefficient_sets{{1.0, 1.0, 0.0}, {1.0, cplx(0.0, 1.0), 0.5}};
    for(const auto &alpha : coefficient_sets) {
        DenseState psi0 = DenseState::Zero(eig[0].vector.size());
        for(std::size_t i = 0; i < 3; ++i) psi0 += alpha[i] * eig[i].vector;
        psi0.normalize();
        const std::vector<double> times{0.0, 1.0, 1e3, 1e6};
        std::vector<DenseState>   evolved;
        for(double t : times) evolved.push_back(ed.evolve(psi0, t));
        for(std::size_t site : {0u, 5u, 9u}) {
            const auto ts = prepare(states, energies, alpha, site);
            for(const auto &op : {spin::sx(), spin::sy(), spin::sz()})
                for(std::size_t i = 0; i < times.size(); ++i)
                    worst = std::max(worst, std::abs(expectation_at(ts, op, times[i]) - local_expectation(evolved[i], L, site, op)));
        }
    }
    // Period 2 tau of the two-eigenstate superposition.
    const auto   pair = prepare({states[0], states[1]}, {energies[0], energies[1]}, {1.0, 1.0}, 5);
    const double tau  = static_cast<double>(std::numbers::pi_v<long double> / std::abs(energies[0] - energies[1]));
    for(const auto &op : {spin::sx(), spin::sy(), spin::sz()}) {
        const auto g = pair.matrix_elements(op);
        for(double t0 : {0.0, 0.4, 1.0})
            for(int n : {1, 10, 100, 1000}) worst_period = std::max(worst_period, std::abs(pair.evaluate(g, t0 + 2.0 * n * tau) - pair.evaluate(g, t0)));
    }
    Outcome o;
    o.pass   = worst <= 1e-10 && worst_period <= 1e-12;
    o.detail = "max |expectation_at - evolve_dense| " + sci(worst) + " over t in {0, 1, 1e3, 1e6}, max period-2tau deviation " + sci(worst_period);
    return o;
}

Outcome criterion8(const RunPaths &paths) {
    const auto t0  = std::chrono::steady_clock::now();
    const auto cfg = cached_config(paths, "c8");
    const auto sum = run_ensemble(cfg, &std::cerr);
    const std::size_t L   = cfg.lengths.front();
    const auto        dir = realization_dir(cfg, L, cfg.strengths.front(), 0);
    const auto        du  = load_family(dir, SeedOrientation::domain_wall);
    const auto        ud  = load_family(dir, SeedOrientation::flipped);
    const auto        h   = build_hamiltonian_mpo(load_disorder((dir / files::disorder).string()));
    std::vector<std::size_t> ds{4};
    for(std::size_t d = 20; d + 2 <= L; ++d) ds.push_back(d);
    const auto scan = variance_vs_distance(h, du, ud, ds);
    Outcome    o;
    if(!scan.median.count(4)) {
        o.detail = "no glued candidates at d=4";
        return o;
    }
    double      worst_far = -std::numeric_limits<double>::infinity(), largest_far = 0.0;
    std::size_t far_points = 0, errors = 0;
    for(const auto &r : scan.rows)
        if(!r.error.empty()) ++errors;
    for(const auto &[d, m] : scan.median)
        if(d >= 20) {
            worst_far   = std::max(worst_far, m);
            largest_far = std::max(largest_far, std::abs(m));
            ++far_points;
        }
    const double near = scan.median.at(4);
    o.pass   = sum.ok() && far_points > 0 && worst_far <= 1e-10 && near >= 1e3 * largest_far;
    o.detail = "median var/E^2 at d=4 " + sci(near) + ", max median over d=20.." + std::to_string(ds.back()) + " " + sci(worst_far) + " (largest |.| " +
               sci(largest_far) + "), ratio " + sci(largest_far > 0.0 ? near / largest_far : std::numeric_limits<double>::infinity()) + ", " +
               std::to_string(errors) + " skipped pairs, " + fix(seconds_since(t0), 1) + " s";
    return o;
}

Outcome criterion9() {
    const std::size_t     L = 8;
    const auto            d = sample_disorder(L, 8.0, 41);
    const Eigen::MatrixXcd H = dense_hamiltonian(d).cast<cplx>();
    DenseEvolver          ed(d);
    rng::SplitMix64       g(9);
    std::vector<double>   times;
    for(int i = 0; i <= 60; ++i) times.push_back(std::pow(10.0, i / 10.0));
    std::size_t checks = 0, violations = 0;
    double      worst_ratio = 0.0;
    const std::vector<int> sectors{-4, -2, 0, 0, 2, 4, -6, 6, -2, 2};
    for(std::size_t n = 0; n < 10; ++n) {
        const auto &s   = ed.sector(sectors[n]);
        const auto  idx = static_cast<std::size_t>(g.next() % s.size());
        DenseState  psi = s.full_vector(idx);
        DenseState  r(psi.size());
        for(Eigen::Index i = 0; i < r.size(); ++i) r(i) = cplx(g.normal(), g.normal());
        psi += std::pow(10.0, -2.0 - 0.5 * static_cast<double>(n)) * r.normalized();
        psi.normalize();
        const DenseState hpsi = H * psi;
        const double     E    = psi.dot(hpsi).real();
        const double     var  = std::max(0.0, hpsi.squaredNorm() - E * E);
        for(double t : times) {
            const DenseState diff  = ed.evolve(psi, t) - linalg::expi_neg(static_cast<long double>(E) * static_cast<long double>(t)) * psi;
            const double     f     = diff.squaredNorm();
            const double     bound = 2.0 * t * std::sqrt(var);
            worst_ratio            = std::max(worst_ratio, f / bound);
            ++checks;
            if(f > bound) ++violations;
        }
    }
    Outcome o;
    o.pass   = violations == 0;
    o.detail = std::to_string(checks) + " (state, t) points on [1, 1e6], " + std::to_string(violations) + " violations, max f(t) / (2 t sigma) " + fix(worst_ratio);
    return o;
}

struct PropertySuite {
    std::string binary, filter;
    int         tests = 0;
};

// Runs a gtest binary restricted to `filter`; true when it exits cleanly
// after running exactly the expected number of tests.
bool run_property_suite(const PropertySuite &s) {
    const std::string cmd  = "\"" + s.binary + "\" --gtest_filter='" + s.filter + "' 2>&1";
    FILE             *pipe = ::popen(cmd.c_str(), "r");
    if(!pipe) return false;
    std::string output;
    char        buf[4096];
    while(std::fgets(buf, sizeof buf, pipe)) output += buf;
    const int  status = ::pclose(pipe);
    const auto pos    = output.find("[  PASSED  ] ");
    return status == 0 && pos != std::string::npos && std::stoi(output.substr(pos + 13)) == s.tests;
}

Outcome criterion10() {
    const auto                       t0 = std::chrono::steady_clock::now();
    const std::vector<PropertySuite> suites{
        {MBLREVIVE_TEST_MPS, "MpsProperty.*", 4},
        {MBLREVIVE_TEST_MULTIEXC, "GlueProperty.*", 1},
        {MBLREVIVE_TEST_CERTIFIER, "CertifiedAmplitudeProperty.*", 1},
    };
    std::vector<std::string> failed;
    for(const auto &s : suites)
        if(!run_property_suite(s)) failed.push_back(fs::path(s.binary).filename().string() + ":" + s.filter);
    const double secs = seconds_since(t0);
    Outcome      o;
    o.pass   = failed.empty() && secs < 120.0;
    o.detail = "canonical form, charge conservation, superpose linearity, compress fidelity, self-glue, amplitude monotonicity: " +
               (failed.empty() ? std::string("all passed") : "failed " + failed.front()) + ", " + fix(secs, 1) + " s";
    return o;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App         app{"Acceptance checks"};
    std::vector<int> only;
    RunPaths         paths{MBLREVIVE_RUNS_DIR, fs::path(MBLREVIVE_RUNS_DIR) / "configs"};
    std::string      runs = paths.runs.string();
    app.add_option("criteria", only, "Criteria to run (default: all)")->check(CLI::Range(1, 10));
    app.add_option("--runs", runs, "Directory holding cached ensemble runs and configs/");
    CLI11_PARSE(app, argc, argv);
    paths.runs    = runs;
    paths.configs = paths.runs / "configs";

    const std::vector<std::function<Outcome()>> criteria{
        criterion1, criterion2, criterion3, criterion4, [&] { return criterion5(paths); }, [&] { return criterion6(paths); },
        criterion7, [&] { return criterion8(paths); }, criterion9, criterion10,
    };
    const std::set<int> selected(only.begin(), only.end());
    bool                all_pass = true;
    for(std::size_t i = 0; i < criteria.size(); ++i) {
        const int n = static_cast<int>(i) + 1;
        if(!selected.empty() && !selected.count(n)) continue;
        Outcome o;
        try {
            o = criteria[i]();
        } catch(const std::exception &e) {
            o.detail = std::string("error: ") + e.what();
        }
        all_pass = all_pass && o.pass;
        std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << std::endl;
    }
    return all_pass ? 0 : 1;
}
