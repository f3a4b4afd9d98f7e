#include "mblrevive/certifier.hpp"
#include "mblrevive/dmrgx.hpp"
#include "mblrevive/dynamics.hpp"
#include "mblrevive/ed_oracle.hpp"
#include "mblrevive/errors.hpp"
#include "mblrevive/harness.hpp"
#include "mblrevive/model.hpp"
#include "mblrevive/mps_io.hpp"
#include "mblrevive/multiexc.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace mblrevive;
using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string &s, char sep) {
    std::vector<std::string> out;
    std::stringstream        in(s);
    std::string              item;
    while(std::getline(in, item, sep))
        if(!item.empty()) out.push_back(item);
    return out;
}

double parse_double(const std::string &s) {
    std::size_t pos = 0;
    double      x   = 0.0;
    try {
        x = std::stod(s, &pos);
    } catch(const std::exception &) {
        pos = 0;
    }
    if(pos != s.size()) throw ValidationError("not a number: '" + s + "'");
    return x;
}

// "t1,t2,..." or "log:a:b:n" or "lin:a:b:n".
std::vector<double> parse_times(const std::string &s) {
    const auto parts = split(s, ':');
    if(parts.size() == 4 && (parts[0] == "log" || parts[0] == "lin")) {
        const double a = parse_double(parts[1]), b = parse_double(parts[2]);
        const auto   n = static_cast<std::size_t>(parse_double(parts[3]));
        if(n < 2) throw ValidationError("time grid needs at least two points");
        if(parts[0] == "log" && !(a > 0.0 && b > 0.0)) throw ValidationError("log grid needs positive bounds");
        std::vector<double> t(n);
        for(std::size_t i = 0; i < n; ++i) {
            const double x = static_cast<double>(i) / static_cast<double>(n - 1);
            t[i]           = parts[0] == "log" ? std::exp(std::log(a) + x * (std::log(b) - std::log(a))) : a + x * (b - a);
        }
        return t;
    }
    std::vector<double> t;
    for(const auto &x : split(s, ',')) t.push_back(parse_double(x));
    if(t.empty()) throw ValidationError("no times given");
    return t;
}

// "re" or "re:im" items separated by commas.
std::vector<cplx> parse_coeffs(const std::string &s) {
    std::vector<cplx> out;
    for(const auto &item : split(s, ',')) {
        const auto p = split(item, ':');
        if(p.empty() || p.size() > 2) throw ValidationError("bad coefficient '" + item + "'");
        out.emplace_back(parse_double(p[0]), p.size() == 2 ? parse_double(p[1]) : 0.0);
    }
    return out;
}

json read_json(const fs::path &p) {
    std::ifstream in(p);
    if(!in) throw IoError("cannot open " + p.string());
    try {
        return json::parse(in);
    } catch(const json::exception &e) {
        throw IoError("malformed JSON in " + p.string() + ": " + e.what());
    }
}

void write_file(const fs::path &p, const std::string &text) {
    if(p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::trunc);
    out << text;
    if(!out) throw IoError("failed writing " + p.string());
}

std::string family_name(std::size_t k) {
    std::ostringstream s;
    s << 'k' << std::setw(3) << std::setfill('0') << k;
    return s.str();
}

// Eigenpair directories below `dir` (k###), ordered by k.
std::map<std::size_t, EigenpairMPS> load_eigenpair_dir(const fs::path &dir) {
    std::map<std::size_t, EigenpairMPS> out;
    if(!fs::is_directory(dir)) throw IoError("no eigenpair directory " + dir.string());
    for(const auto &e : fs::directory_iterator(dir)) {
        const auto name = e.path().filename().string();
        if(e.is_directory() && name.size() > 1 && name[0] == 'k' && fs::exists(e.path() / "eigenpair.json"))
            out.emplace(std::stoul(name.substr(1)), load_eigenpair(e.path()));
    }
    if(out.empty()) throw IoError("no eigenpairs found in " + dir.string());
    return out;
}

int cmd_sample(std::size_t L, double W, std::uint64_t seed, const std::string &out) {
    const auto d = sample_disorder(L, W, seed);
    if(out.empty() || out == "-")
        std::cout << to_json(d).dump(2) << '\n';
    else
        save_disorder(d, out);
    return 0;
}

struct DmrgxArgs {
    std::string disorder, seeds = "dw", schedule = "2:20,4:20,8:20,16:20,24:20,32:20", out;
    double      threshold = 1e-12;
    std::size_t k_min = 1, k_max = 0;
    unsigned    threads = 0;
};

int cmd_dmrgx(const DmrgxArgs &a) {
    const auto d        = load_disorder(a.disorder);
    const auto schedule = SweepSchedule::parse(a.schedule, a.threshold);
    const Mpo  h        = build_hamiltonian_mpo(d);
    const fs::path out  = a.out;
    fs::create_directories(out);

    std::vector<SeedOutcome> outcomes;
    ConvergenceReport        report = ConvergenceReport::for_schedule(schedule);
    if(a.seeds == "dw" || a.seeds == "dw-flipped") {
        FamilyOptions o;
        o.orientation = a.seeds == "dw" ? SeedOrientation::domain_wall : SeedOrientation::flipped;
        o.first_k     = a.k_min;
        if(a.k_max) o.last_k = a.k_max;
        o.threads = a.threads;
        auto fam  = run_seed_family(h, d, schedule, o);
        outcomes  = std::move(fam.seeds);
        report    = fam.report;
    } else {
        std::ifstream in(a.seeds);
        if(!in) throw IoError("cannot open seed file " + a.seeds);
        std::string line;
        const Mpo   h2 = build_squared_mpo(h);
        for(std::size_t i = 0; std::getline(in, line);) {
            if(line.empty() || line[0] == '#') continue;
            SeedOutcome o;
            o.k    = i++;
            o.seed = SpinConfiguration::from_string(line);
            if(o.seed.size() != d.length) throw LengthMismatchError("seed '" + line + "' does not match L");
            try {
                o.eigenpair = dmrgx(h, h2, o.seed, schedule);
                report.add(*o.eigenpair);
            } catch(const Error &e) {
                o.error = e.what();
                report.add_failure();
            }
            outcomes.push_back(std::move(o));
        }
    }

    std::ostringstream lines, sweeps;
    bool               failed = false;
    for(const auto &o : outcomes) {
        json j{{"k", o.k}};
        if(o.eigenpair) {
            j.update(eigenpair_summary(*o.eigenpair));
            save_eigenpair(*o.eigenpair, out / family_name(o.k));
            append_sweep_log(sweeps, o.k, *o.eigenpair);
        } else {
            j["seed"]  = o.seed.to_string();
            j["error"] = o.error;
            failed     = true;
        }
        lines << j.dump() << '\n';
        std::cerr << "seed " << o.seed.to_string() << ": ";
        if(o.eigenpair)
            std::cerr << (o.eigenpair->converged ? "converged" : "unconverged") << ", var/E^2 = " << std::scientific << std::setprecision(3)
                      << o.eigenpair->var_rescaled << std::defaultfloat << '\n';
        else
            std::cerr << "error: " << o.error << '\n';
    }
    write_file(out / "eigenpairs.jsonl", lines.str());
    write_file(out / "sweeps.jsonl", sweeps.str());
    write_file(out / "convergence.json",
               json{{"schema_version", 1}, {"chi_caps", report.chi_caps}, {"unconverged", report.unconverged}, {"seeds", report.seeds}, {"failed", report.failed}}
                       .dump(2) +
                   "\n");
    return failed ? 1 : 0;
}

int cmd_certify(const std::string &dir, const std::string &out, bool strict) {
    const auto         pairs = load_eigenpair_dir(dir);
    std::ostringstream lines;
    bool               failed = false;
    for(auto it = pairs.begin(); it != pairs.end(); ++it) {
        const auto next = std::next(it);
        if(next == pairs.end() || next->first != it->first + 1) continue;
        try {
            CertificateRecord r;
            r.certificate = certify(it->second, next->second, it->first, !strict);
            r.var1        = it->second.var_rescaled;
            r.var2        = next->second.var_rescaled;
            r.converged1  = it->second.converged;
            r.converged2  = next->second.converged;
            lines << to_json(r).dump() << '\n';
        } catch(const Error &e) {
            std::cerr << "k=" << it->first << ": " << e.what() << '\n';
            failed = true;
        }
    }
    if(out.empty() || out == "-")
        std::cout << lines.str();
    else
        write_file(out, lines.str());
    return failed ? 1 : 0;
}

struct EvolveArgs {
    std::vector<std::string> eigenpairs;
    std::string              coeffs, op = "sz", times, out, disorder, certificate;
    int                      site = -1;
    double                   eps  = -1.0;
};

int cmd_evolve(const EvolveArgs &a) {
    std::vector<EigenpairMPS> states;
    for(const auto &p : a.eigenpairs) states.push_back(load_eigenpair(p));
    const auto coeffs = parse_coeffs(a.coeffs);
    if(coeffs.size() != states.size()) throw LengthMismatchError("one coefficient per eigenpair is required");
    for(std::size_t i = 0; i < states.size(); ++i) states[i].state = fix_phase(states[i].state, states[i].seed);

    Eigen::Matrix2cd op;
    int              site = a.site;
    double           eps  = a.eps;
    if(a.op == "sx")
        op = spin::sx();
    else if(a.op == "sy")
        op = spin::sy();
    else if(a.op == "sz")
        op = spin::sz();
    else if(a.op == "A") {
        if(a.certificate.empty()) throw ValidationError("--op A needs --certificate");
        const auto c = certificate_from_json(read_json(a.certificate));
        op           = c.A_obs;
        if(site < 0) site = static_cast<int>(c.j_star);
        if(eps < 0.0) eps = c.eps;
    } else
        throw ValidationError("unknown operator '" + a.op + "'");
    if(site < 0) throw ValidationError("--site is required");

    std::optional<Mpo> h;
    if(!a.disorder.empty()) h = build_hamiltonian_mpo(load_disorder(a.disorder));
    const auto ts     = prepare(states, coeffs, static_cast<std::size_t>(site), h ? &*h : nullptr);
    for(const auto &w : ts.warnings()) std::cerr << "warning: " << w << '\n';
    const auto points = trajectory(ts, op, parse_times(a.times), eps >= 0.0 ? std::optional<double>(eps) : std::nullopt);
    if(a.out.empty() || a.out == "-") {
        write_trajectory_csv(std::cout, points, static_cast<std::size_t>(site), a.op);
    } else {
        std::ostringstream s;
        write_trajectory_csv(s, points, static_cast<std::size_t>(site), a.op);
        write_file(a.out, s.str());
    }
    return 0;
}

int cmd_glue(const std::string &left, const std::string &right, std::size_t cut, const std::string &out, bool pad, const std::string &disorder) {
    const auto a = load_eigenpair(left), b = load_eigenpair(right);
    GlueOptions o;
    o.mode       = pad ? GlueMode::pad : GlueMode::strict;
    const auto g = glue(a.state, b.state, cut, o);
    save_mps(g.state, out);
    json rep{{"schema_version", 1},
             {"cut", cut},
             {"cut_weight_left", g.report.cut_weight_left},
             {"cut_weight_right", g.report.cut_weight_right},
             {"rank_left", g.report.rank_left},
             {"rank_right", g.report.rank_right},
             {"product_like", g.report.product_like},
             {"padded", g.report.padded}};
    if(!disorder.empty()) {
        const Mpo  h     = build_hamiltonian_mpo(load_disorder(disorder));
        const auto stats = energy_variance(g.state, h, build_squared_mpo(h));
        rep["E"]            = stats.energy;
        rep["var_rescaled"] = stats.rescaled;
    }
    write_file(fs::path(out) / "glue.json", rep.dump(2) + "\n");
    std::cout << rep.dump() << '\n';
    return 0;
}

struct GlueScanArgs {
    std::string disorder, realization, schedule = "2:20,4:20,8:20,16:20,24:20,32:20", out;
    std::size_t d_min = 1, d_max = 0;
    unsigned    threads = 0;
};

int cmd_glue_scan(const GlueScanArgs &a) {
    EigenFamily du, ud;
    Mpo         h;
    if(!a.realization.empty()) {
        const auto d = load_disorder((fs::path(a.realization) / files::disorder).string());
        h            = build_hamiltonian_mpo(d);
        du           = load_family(a.realization, SeedOrientation::domain_wall);
        ud           = load_family(a.realization, SeedOrientation::flipped);
    } else {
        if(a.disorder.empty()) throw ValidationError("glue-scan needs --disorder or --realization");
        const auto d        = load_disorder(a.disorder);
        h                   = build_hamiltonian_mpo(d);
        const auto schedule = SweepSchedule::parse(a.schedule);
        FamilyOptions o;
        o.last_k  = d.length;
        o.threads = a.threads;
        for(auto orient : {SeedOrientation::domain_wall, SeedOrientation::flipped}) {
            o.orientation = orient;
            auto fam      = run_seed_family(h, d, schedule, o);
            for(auto &s : fam.seeds)
                if(s.eigenpair) (orient == SeedOrientation::domain_wall ? du : ud).emplace(s.k, std::move(*s.eigenpair));
        }
    }
    const std::size_t L     = h.size();
    const std::size_t d_max = a.d_max ? a.d_max : L - 2;
    if(a.d_min < 1 || a.d_min > d_max) throw ValidationError("invalid distance range");
    std::vector<std::size_t> ds;
    for(std::size_t d = a.d_min; d <= d_max; ++d) ds.push_back(d);
    const auto scan = variance_vs_distance(h, du, ud, ds);
    std::ostringstream s;
    write_glue_scan_csv(s, scan);
    if(a.out.empty() || a.out == "-")
        std::cout << s.str();
    else
        write_file(a.out, s.str());
    return 0;
}

struct EdArgs {
    std::string disorder, mode, out, eigenpairs, certificates;
    std::optional<int> magnetization;
    bool               arbitrary = false;
    std::size_t        max_results = 20;
    double             tolerance = 1e-8, hopping_scale = 1.0;
};

int cmd_ed(const EdArgs &a) {
    const auto         d = load_disorder(a.disorder);
    std::ostringstream s;
    int                status = 0;
    std::vector<int>   sectors;
    if(a.magnetization)
        sectors = {*a.magnetization};
    else
        sectors = sector_magnetizations(d.length);

    if(a.mode == "spectrum") {
        json j{{"schema_version", 1}, {"L", d.length}, {"sectors", json::array()}};
        for(int m : sectors) {
            const auto sec = diagonalize_sector(d, m);
            json       e   = json::array();
            for(auto v : sec.refined) e.push_back(static_cast<double>(v));
            j["sectors"].push_back({{"magnetization", m}, {"energies", e}});
        }
        s << j.dump(2) << '\n';
    } else if(a.mode == "search") {
        std::vector<SpectrumSector> spectra;
        for(int m : sectors) spectra.push_back(diagonalize_sector(d, m));
        SearchOptions o;
        o.arbitrary_pairs = a.arbitrary;
        o.max_results     = a.max_results;
        for(const auto &c : search_product_pairs(spectra, o)) s << to_json(c).dump() << '\n';
    } else if(a.mode == "verify-certificates") {
        if(a.eigenpairs.empty() || a.certificates.empty()) throw ValidationError("verify-certificates needs --eigenpairs and --certificates");
        const auto   pairs = load_eigenpair_dir(a.eigenpairs);
        DenseEvolver ed(d);
        double       worst = 0.0;
        for(const auto &rec : read_certificates(a.certificates)) {
            const auto k = rec.certificate.k;
            const auto i = pairs.find(k), j = pairs.find(k + 1);
            if(i == pairs.end() || j == pairs.end()) throw ValidationError("eigenpairs for k=" + std::to_string(k) + " are missing");
            EigenMatch m1, m2;
            const auto e1    = matched_eigenpair(ed, to_dense(i->second.state), i->second.seed, &m1);
            const auto e2    = matched_eigenpair(ed, to_dense(j->second.state), j->second.seed, &m2);
            const auto dense = certify_dense(e1, e2, k);
            const double dist = certificate_distance(rec.certificate, dense);
            worst             = std::max(worst, dist);
            s << json{{"k", k}, {"overlap1", m1.overlap}, {"overlap2", m2.overlap}, {"distance", dist}, {"A_dense", dense.A_certified},
                      {"A_mps", rec.certificate.A_certified}}
                     .dump()
              << '\n';
        }
        std::cerr << "max field difference " << worst << (worst <= a.tolerance ? " (ok)" : " (exceeds tolerance)") << '\n';
        status = worst <= a.tolerance ? 0 : 1;
    } else if(a.mode == "anderson") {
        ReviverOptions o;
        o.hopping_scale = a.hopping_scale;
        for(const auto &mode : anderson_modes(d, a.hopping_scale)) {
            json j{{"k", mode.k}, {"energy", mode.energy}, {"ipr", mode.ipr}, {"peak_weight", mode.peak_weight}};
            try {
                j["certificate"] = to_json(single_particle_reviver(d, mode.k, o));
            } catch(const Error &e) {
                j["error"] = e.what();
            }
            s << j.dump() << '\n';
        }
    } else {
        throw ValidationError("unknown ed mode '" + a.mode + "'");
    }
    if(a.out.empty() || a.out == "-")
        std::cout << s.str();
    else
        write_file(a.out, s.str());
    return status;
}

int cmd_ensemble(const std::string &config, bool crossover) {
    const auto cfg = load_ensemble_config(config);
    if(crossover) {
        const auto rows = crossover_scan(cfg, &std::cerr);
        write_aggregate_table(std::cout, rows);
        return 0;
    }
    const auto summary = run_ensemble(cfg, &std::cerr);
    return summary.ok() ? 0 : 1;
}

int cmd_aggregate(const std::string &dir, bool middle_half, bool post_select, bool gnuplot) {
    AggregateOptions o;
    o.middle_half = middle_half;
    if(post_select) o.post_select_variance = post_selection_variance;
    const auto rows = aggregate(dir, o);
    write_aggregate_table(std::cout, rows, gnuplot ? TableFormat::gnuplot : TableFormat::csv);
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Certified oscillations in disordered Heisenberg chains"};
    app.require_subcommand(1);

    std::size_t   L = 0;
    double        W = 0.0;
    std::uint64_t seed = 0;
    std::string   sample_out;
    auto         *sample = app.add_subcommand("sample", "Draw a disorder realization");
    sample->add_option("--L", L, "Chain length")->required()->check(CLI::PositiveNumber);
    sample->add_option("--W", W, "Disorder strength")->required()->check(CLI::NonNegativeNumber);
    sample->add_option("--seed", seed, "RNG seed")->required();
    sample->add_option("--out", sample_out, "Output JSON (default stdout)");

    DmrgxArgs dx;
    auto     *dmrgx_cmd = app.add_subcommand("dmrgx", "Excited eigenstates from domain-wall seeds");
    dmrgx_cmd->add_option("--disorder", dx.disorder)->required()->check(CLI::ExistingFile);
    dmrgx_cmd->add_option("--seeds", dx.seeds, "dw, dw-flipped, or a file of u/d strings");
    dmrgx_cmd->add_option("--chi-schedule", dx.schedule);
    dmrgx_cmd->add_option("--threshold", dx.threshold);
    dmrgx_cmd->add_option("--k-min", dx.k_min);
    dmrgx_cmd->add_option("--k-max", dx.k_max);
    dmrgx_cmd->add_option("--threads", dx.threads);
    dmrgx_cmd->add_option("--out", dx.out)->required();

    std::string cert_in, cert_out;
    bool        cert_strict = false;
    auto       *certify_cmd = app.add_subcommand("certify", "Certificates for consecutive domain-wall eigenpairs");
    certify_cmd->add_option("--eigenpairs", cert_in)->required()->check(CLI::ExistingDirectory);
    certify_cmd->add_option("--out", cert_out);
    certify_cmd->add_flag("--strict", cert_strict, "Reject unconverged eigenpairs");

    EvolveArgs ev;
    auto      *evolve_cmd = app.add_subcommand("evolve", "Single-site expectation of an eigenstate superposition over time");
    evolve_cmd->add_option("--eigenpairs", ev.eigenpairs)->required()->delimiter(',');
    evolve_cmd->add_option("--coeffs", ev.coeffs)->required();
    evolve_cmd->add_option("--site", ev.site);
    evolve_cmd->add_option("--op", ev.op)->check(CLI::IsMember({"sx", "sy", "sz", "A"}));
    evolve_cmd->add_option("--times", ev.times)->required();
    evolve_cmd->add_option("--certificate", ev.certificate, "Certificate JSON supplying A and j*");
    evolve_cmd->add_option("--eps", ev.eps, "Add the bound half-width for this eps");
    evolve_cmd->add_option("--disorder", ev.disorder, "Recompute energies in extended precision");
    evolve_cmd->add_option("--out", ev.out);

    std::string glue_left, glue_right, glue_out, glue_disorder;
    std::size_t glue_cut_site = 0;
    bool        glue_pad      = false;
    auto       *glue_cmd      = app.add_subcommand("glue", "Join two eigenpair MPS at a cut");
    glue_cmd->add_option("--left", glue_left)->required()->check(CLI::ExistingDirectory);
    glue_cmd->add_option("--right", glue_right)->required()->check(CLI::ExistingDirectory);
    glue_cmd->add_option("--cut", glue_cut_site)->required();
    glue_cmd->add_option("--out", glue_out)->required();
    glue_cmd->add_option("--disorder", glue_disorder, "Report energy and variance");
    glue_cmd->add_flag("--pad", glue_pad, "Zero-pad mismatched Schmidt ranks");

    GlueScanArgs gs;
    auto        *scan_cmd = app.add_subcommand("glue-scan", "Variance of glued walls against their distance");
    scan_cmd->add_option("--d-min", gs.d_min);
    scan_cmd->add_option("--d-max", gs.d_max);
    scan_cmd->add_option("--disorder", gs.disorder);
    scan_cmd->add_option("--realization", gs.realization, "Ensemble directory with both saved families");
    scan_cmd->add_option("--chi-schedule", gs.schedule);
    scan_cmd->add_option("--threads", gs.threads);
    scan_cmd->add_option("--out", gs.out);

    EdArgs ed;
    auto  *ed_cmd = app.add_subcommand("ed", "Exact diagonalization utilities");
    ed_cmd->add_option("--disorder", ed.disorder)->required()->check(CLI::ExistingFile);
    ed_cmd->add_option("--mode", ed.mode)->required()->check(CLI::IsMember({"spectrum", "search", "verify-certificates", "anderson"}));
    ed_cmd->add_option("--magnetization", ed.magnetization);
    ed_cmd->add_flag("--arbitrary-pairs", ed.arbitrary);
    ed_cmd->add_option("--max-results", ed.max_results);
    ed_cmd->add_option("--eigenpairs", ed.eigenpairs);
    ed_cmd->add_option("--certificates", ed.certificates);
    ed_cmd->add_option("--tolerance", ed.tolerance);
    ed_cmd->add_option("--hopping-scale", ed.hopping_scale);
    ed_cmd->add_option("--out", ed.out);

    std::string ens_config;
    bool        ens_crossover = false;
    auto       *ens_cmd       = app.add_subcommand("ensemble", "Disorder-averaged certificate runs");
    ens_cmd->add_option("--config", ens_config)->required()->check(CLI::ExistingFile);
    ens_cmd->add_flag("--crossover", ens_crossover, "Aggregate with post-selection afterwards");

    std::string agg_dir;
    bool        agg_middle = false, agg_post = false, agg_gnuplot = false;
    auto       *agg_cmd = app.add_subcommand("aggregate", "Statistics over finished realizations");
    agg_cmd->add_option("--dir", agg_dir)->required()->check(CLI::ExistingDirectory);
    agg_cmd->add_flag("--middle-half", agg_middle);
    agg_cmd->add_flag("--post-select", agg_post);
    agg_cmd->add_flag("--gnuplot", agg_gnuplot);

    CLI11_PARSE(app, argc, argv);

    try {
        if(*sample) return cmd_sample(L, W, seed, sample_out);
        if(*dmrgx_cmd) return cmd_dmrgx(dx);
        if(*certify_cmd) return cmd_certify(cert_in, cert_out, cert_strict);
        if(*evolve_cmd) return cmd_evolve(ev);
        if(*glue_cmd) return cmd_glue(glue_left, glue_right, glue_cut_site, glue_out, glue_pad, glue_disorder);
        if(*scan_cmd) return cmd_glue_scan(gs);
        if(*ed_cmd) return cmd_ed(ed);
        if(*ens_cmd) return cmd_ensemble(ens_config, ens_crossover);
        if(*agg_cmd) return cmd_aggregate(agg_dir, agg_middle, agg_post, agg_gnuplot);
    } catch(const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
