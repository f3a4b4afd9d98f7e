#include "mblrevive/harness.hpp"

#include "mblrevive/errors.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace mblrevive {

namespace fs = std::filesystem;
using nlohmann::json;

void EnsembleConfig::validate() const {
    if(lengths.empty()) throw ValidationError("ensemble needs at least one length");
    if(strengths.empty()) throw ValidationError("ensemble needs at least one disorder strength");
    if(realizations < 1) throw ValidationError("ensemble needs at least one realization");
    for(auto L : lengths)
        if(L < 2) throw InvalidSizeError("ensemble lengths must be at least 2");
    for(auto W : strengths)
        if(!(W >= 0.0) || !std::isfinite(W)) throw ValidationError("disorder strengths must be finite and nonnegative");
    if(tag.empty() || tag.find('/') != std::string::npos) throw ValidationError("ensemble tag must be a plain directory name");
    schedule.validate();
}

json to_json(const EnsembleConfig &c) {
    return json{{"schema_version", ensemble_schema_version},
                {"L", c.lengths},
                {"W", c.strengths},
                {"realizations", c.realizations},
                {"seed_base", c.seed_base},
                {"chi_schedule", c.schedule.to_string()},
                {"threshold", c.schedule.threshold},
                {"middle_half", c.middle_half},
                {"output", c.output.string()},
                {"tag", c.tag},
                {"threads", c.threads},
                {"save_eigenpairs", c.save_eigenpairs},
                {"flipped_family", c.flipped_family}};
}

EnsembleConfig ensemble_config_from_json(const json &j) {
    EnsembleConfig c;
    try {
        if(j.contains("schema_version") && j["schema_version"].get<int>() != ensemble_schema_version)
            throw ValidationError("unsupported ensemble schema_version " + j["schema_version"].dump());
        c.lengths      = j.at("L").get<std::vector<std::size_t>>();
        c.strengths    = j.at("W").get<std::vector<double>>();
        c.realizations = j.value("realizations", c.realizations);
        c.seed_base    = j.value("seed_base", c.seed_base);
        const double threshold = j.value("threshold", c.schedule.threshold);
        c.schedule     = j.contains("chi_schedule") ? SweepSchedule::parse(j["chi_schedule"].get<std::string>(), threshold) : SweepSchedule::standard();
        c.schedule.threshold = threshold;
        c.middle_half     = j.value("middle_half", c.middle_half);
        c.output          = j.value("output", c.output.string());
        c.tag             = j.value("tag", c.tag);
        c.threads         = j.value("threads", c.threads);
        c.save_eigenpairs = j.value("save_eigenpairs", c.save_eigenpairs);
        c.flipped_family  = j.value("flipped_family", c.flipped_family);
    } catch(const json::exception &e) {
        throw ValidationError(std::string("malformed ensemble config: ") + e.what());
    }
    c.validate();
    return c;
}

EnsembleConfig load_ensemble_config(const fs::path &path) {
    std::ifstream in(path);
    if(!in) throw IoError("cannot open ensemble config " + path.string());
    json j;
    try {
        in >> j;
    } catch(const json::exception &e) {
        throw IoError("malformed ensemble config " + path.string() + ": " + e.what());
    }
    return ensemble_config_from_json(j);
}

namespace {

std::string shortest(double x) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return {buf, r.ptr};
}

void write_text(const fs::path &path, const std::string &text) {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    out << text;
    if(!out) throw IoError("failed writing " + path.string());
}

std::vector<json> read_jsonl(const fs::path &path) {
    std::vector<json> out;
    std::ifstream     in(path);
    if(!in) throw IoError("cannot open " + path.string());
    std::string line;
    std::size_t n = 0;
    while(std::getline(in, line)) {
        ++n;
        if(line.empty()) continue;
        try {
            out.push_back(json::parse(line));
        } catch(const json::exception &e) {
            throw IoError(path.string() + ":" + std::to_string(n) + ": " + e.what());
        }
    }
    return out;
}

double median_of(std::vector<double> v) {
    if(v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean_of(const std::vector<double> &v) {
    if(v.empty()) return std::numeric_limits<double>::quiet_NaN();
    double s = 0.0;
    for(double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Sample standard deviation; zero for a single value.
double std_of(const std::vector<double> &v) {
    if(v.empty()) return std::numeric_limits<double>::quiet_NaN();
    if(v.size() == 1) return 0.0;
    const double m = mean_of(v);
    double       s = 0.0;
    for(double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

const char *orientation_tag(SeedOrientation o) { return o == SeedOrientation::domain_wall ? "du" : "ud"; }

std::string family_dir_name(std::size_t k) {
    std::ostringstream s;
    s << 'k' << std::setw(3) << std::setfill('0') << k;
    return s.str();
}

json convergence_json(const ConvergenceReport &r) {
    return json{{"chi_caps", r.chi_caps}, {"unconverged", r.unconverged}, {"seeds", r.seeds}, {"failed", r.failed}};
}

} // namespace

fs::path point_dir(const EnsembleConfig &c, std::size_t L, double W) { return c.run_dir() / ("L" + std::to_string(L) + "_W" + shortest(W)); }

fs::path realization_dir(const EnsembleConfig &c, std::size_t L, double W, std::size_t idx) {
    return point_dir(c, L, W) / ("r" + std::to_string(idx));
}

bool EnsembleSummary::ok() const {
    return std::all_of(realizations.begin(), realizations.end(), [](const RealizationOutcome &r) { return r.failure.empty() && r.errors == 0; });
}

json to_json(const CertificateRecord &r) {
    json j          = to_json(r.certificate);
    j["var1"]       = r.var1;
    j["var2"]       = r.var2;
    j["converged1"] = r.converged1;
    j["converged2"] = r.converged2;
    return j;
}

CertificateRecord certificate_record_from_json(const json &j) {
    CertificateRecord r;
    r.certificate = certificate_from_json(j);
    try {
        r.var1       = j.at("var1").get<double>();
        r.var2       = j.at("var2").get<double>();
        r.converged1 = j.at("converged1").get<bool>();
        r.converged2 = j.at("converged2").get<bool>();
    } catch(const json::exception &e) {
        throw IoError(std::string("malformed certificate record: ") + e.what());
    }
    return r;
}

std::vector<CertificateRecord> read_certificates(const fs::path &jsonl) {
    std::vector<CertificateRecord> out;
    for(const auto &j : read_jsonl(jsonl)) out.push_back(certificate_record_from_json(j));
    return out;
}

RealizationOutcome run_realization(const DisorderRealization &d, const EnsembleConfig &cfg, const fs::path &dir) {
    RealizationOutcome outcome;
    outcome.L = d.length;
    outcome.W = d.strength;
    if(fs::exists(dir / files::done)) {
        outcome.skipped = true;
        return outcome;
    }
    fs::remove_all(dir);
    fs::create_directories(dir);
    write_text(dir / files::disorder, to_json(d).dump(2) + "\n");

    const std::size_t L = d.length;
    const Mpo         h = build_hamiltonian_mpo(d);
    FamilyOptions     fopts;
    fopts.first_k = 1;
    fopts.last_k  = L;
    fopts.threads = cfg.threads;

    std::vector<SeedOrientation> orientations{SeedOrientation::domain_wall};
    if(cfg.flipped_family) orientations.push_back(SeedOrientation::flipped);

    std::ostringstream errors, eigen_lines;
    json               convergence{{"schema_version", ensemble_schema_version}};
    SeedFamily         du;
    for(auto orientation : orientations) {
        fopts.orientation = orientation;
        SeedFamily fam    = run_seed_family(h, d, cfg.schedule, fopts);
        const char *tag   = orientation_tag(orientation);
        convergence[tag]  = convergence_json(fam.report);

        std::ostringstream sweeps;
        for(const auto &o : fam.seeds) {
            json line{{"k", o.k}, {"orientation", tag}};
            if(o.eigenpair) {
                line.update(eigenpair_summary(*o.eigenpair));
                append_sweep_log(sweeps, o.k, *o.eigenpair);
                if(cfg.save_eigenpairs || cfg.flipped_family) save_eigenpair(*o.eigenpair, dir / "eigenpairs" / tag / family_dir_name(o.k));
            } else {
                line["error"] = o.error;
                errors << json{{"k", o.k}, {"orientation", tag}, {"stage", "dmrgx"}, {"error", o.error}}.dump() << '\n';
                ++outcome.errors;
            }
            eigen_lines << line.dump() << '\n';
        }
        write_text(dir / (orientation == SeedOrientation::domain_wall ? files::sweeps : "sweeps_flipped.jsonl"), sweeps.str());
        if(orientation == SeedOrientation::domain_wall) du = std::move(fam);
    }

    std::ostringstream certs;
    for(std::size_t k = 1; k + 1 <= L; ++k) {
        const auto &a = du.seeds[k - 1];
        const auto &b = du.seeds[k];
        if(!a.eigenpair || !b.eigenpair) continue;
        try {
            CertificateRecord r;
            r.certificate = certify(*a.eigenpair, *b.eigenpair, k, true);
            r.var1        = a.eigenpair->var_rescaled;
            r.var2        = b.eigenpair->var_rescaled;
            r.converged1  = a.eigenpair->converged;
            r.converged2  = b.eigenpair->converged;
            certs << to_json(r).dump() << '\n';
            ++outcome.certificates;
        } catch(const Error &e) {
            errors << json{{"k", k}, {"orientation", "du"}, {"stage", "certify"}, {"error", e.what()}}.dump() << '\n';
            ++outcome.errors;
        }
    }

    write_text(dir / files::certificates, certs.str());
    write_text(dir / files::eigenpairs, eigen_lines.str());
    write_text(dir / files::convergence, convergence.dump(2) + "\n");
    write_text(dir / files::errors, errors.str());
    write_text(dir / files::done, json{{"certificates", outcome.certificates}, {"errors", outcome.errors}}.dump() + "\n");
    return outcome;
}

EnsembleSummary run_ensemble(const EnsembleConfig &cfg, std::ostream *progress) {
    cfg.validate();
    fs::create_directories(cfg.run_dir());
    write_text(cfg.run_dir() / "config.json", to_json(cfg).dump(2) + "\n");

    struct Item {
        std::size_t L, idx;
        double      W;
    };
    std::vector<Item> items;
    for(auto L : cfg.lengths)
        for(auto W : cfg.strengths)
            for(std::size_t r = 0; r < cfg.realizations; ++r) items.push_back({L, r, W});

    EnsembleSummary summary;
    summary.realizations.resize(items.size());
    const unsigned workers = std::min<unsigned>(worker_count(cfg.threads), static_cast<unsigned>(items.size()));
    EnsembleConfig inner   = cfg;
    inner.threads          = std::max(1U, worker_count(cfg.threads) / workers);

    std::atomic<std::size_t> next{0};
    std::mutex               log_mutex;
    auto work = [&] {
        for(std::size_t i = next++; i < items.size(); i = next++) {
            const auto &it  = items[i];
            auto       &out = summary.realizations[i];
            try {
                const auto d = sample_disorder(it.L, it.W, cfg.seed_base + it.idx);
                out          = run_realization(d, inner, realization_dir(cfg, it.L, it.W, it.idx));
            } catch(const std::exception &e) {
                out.L       = it.L;
                out.W       = it.W;
                out.failure = e.what();
            }
            out.index = it.idx;
            if(progress) {
                std::lock_guard lock(log_mutex);
                *progress << "L=" << it.L << " W=" << shortest(it.W) << " r=" << it.idx << ": "
                          << (out.skipped ? "complete on disk"
                              : !out.failure.empty()
                                  ? "failed: " + out.failure
                                  : std::to_string(out.certificates) + " certificates, " + std::to_string(out.errors) + " errors")
                          << std::endl;
            }
        }
    };
    if(workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for(unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
    }
    return summary;
}

EigenFamily load_family(const fs::path &realization, SeedOrientation orientation) {
    const fs::path base = realization / "eigenpairs" / orientation_tag(orientation);
    if(!fs::is_directory(base)) throw IoError("no saved eigenpairs in " + base.string());
    EigenFamily fam;
    for(const auto &entry : fs::directory_iterator(base)) {
        const auto name = entry.path().filename().string();
        if(!entry.is_directory() || name.size() < 2 || name[0] != 'k') continue;
        fam.emplace(std::stoul(name.substr(1)), load_eigenpair(entry.path()));
    }
    return fam;
}

bool in_middle_half(std::size_t k, std::size_t L) { return 4 * k >= L && 4 * k <= 3 * L; }

namespace {

struct RealizationData {
    std::size_t                    L = 0;
    double                         W = 0.0;
    std::vector<CertificateRecord> certs;
    std::vector<double>            variances; ///< |var_rescaled| of down-up eigenpairs
    std::size_t                    converged = 0, unconverged = 0;
};

RealizationData read_realization(const fs::path &dir) {
    RealizationData r;
    std::ifstream   in(dir / files::disorder);
    if(!in) throw IoError("missing " + (dir / files::disorder).string());
    json dj;
    try {
        in >> dj;
    } catch(const json::exception &e) {
        throw IoError("malformed " + (dir / files::disorder).string() + ": " + e.what());
    }
    const auto d = disorder_from_json(dj);
    r.L          = d.length;
    r.W          = d.strength;
    r.certs      = read_certificates(dir / files::certificates);
    for(const auto &j : read_jsonl(dir / files::eigenpairs)) {
        if(j.value("orientation", "du") != "du" || j.contains("error")) continue;
        r.variances.push_back(std::abs(j.at("var_rescaled").get<double>()));
        (j.at("converged").get<bool>() ? r.converged : r.unconverged)++;
    }
    return r;
}

AggregateRow summarize(std::size_t L, double W, const std::vector<const RealizationData *> &group, bool middle_half) {
    AggregateRow row;
    row.L = L;
    row.W = W;
    std::vector<double> medians, maxima, pooled, variances, fidelities;
    for(const auto *r : group) {
        ++row.realizations;
        row.converged += r->converged;
        row.unconverged += r->unconverged;
        variances.insert(variances.end(), r->variances.begin(), r->variances.end());
        std::vector<double> amps;
        double              best = -1.0;
        for(const auto &c : r->certs) {
            const double a = c.certificate.A_certified;
            amps.push_back(a);
            fidelities.push_back(std::min(c.certificate.F2_plus, c.certificate.F2_minus));
            if(!middle_half || in_middle_half(c.certificate.k, L)) best = std::max(best, a);
        }
        row.certificates += amps.size();
        pooled.insert(pooled.end(), amps.begin(), amps.end());
        if(amps.empty()) continue;
        medians.push_back(median_of(amps));
        if(best >= 0.0) maxima.push_back(best);
    }
    row.median_A        = median_of(medians);
    row.mean_A          = mean_of(medians);
    row.std_A           = std_of(medians);
    row.max_A_median    = median_of(maxima);
    row.max_A_mean      = mean_of(maxima);
    row.max_A_std       = std_of(maxima);
    row.all_k_mean      = mean_of(pooled);
    row.all_k_std       = std_of(pooled);
    row.var_median      = median_of(variances);
    row.var_mean        = mean_of(variances);
    row.fidelity_median = median_of(fidelities);
    return row;
}

} // namespace

std::vector<AggregateRow> aggregate(const fs::path &dir, const AggregateOptions &opts) {
    if(!fs::is_directory(dir)) throw EmptyAggregateError("no results directory " + dir.string());
    std::vector<RealizationData> data;
    std::vector<fs::path>        points;
    for(const auto &p : fs::directory_iterator(dir))
        if(p.is_directory()) points.push_back(p.path());
    std::sort(points.begin(), points.end());
    for(const auto &p : points) {
        std::vector<fs::path> reals;
        for(const auto &r : fs::directory_iterator(p))
            if(r.is_directory() && fs::exists(r.path() / files::done)) reals.push_back(r.path());
        std::sort(reals.begin(), reals.end());
        for(const auto &r : reals) data.push_back(read_realization(r));
    }
    if(data.empty()) throw EmptyAggregateError("no finished realizations below " + dir.string());

    std::map<std::pair<std::size_t, double>, std::vector<const RealizationData *>> groups;
    for(const auto &r : data) groups[{r.L, r.W}].push_back(&r);

    std::vector<AggregateRow> rows;
    for(const auto &[key, group] : groups) {
        rows.push_back(summarize(key.first, key.second, group, opts.middle_half));
        if(opts.post_select_variance) {
            std::vector<const RealizationData *> kept;
            for(const auto *r : group)
                if(!r->variances.empty() && median_of(r->variances) <= *opts.post_select_variance) kept.push_back(r);
            auto row          = summarize(key.first, key.second, kept, opts.middle_half);
            row.post_selected = true;
            rows.push_back(row);
        }
    }
    std::ofstream out(dir / files::aggregate, std::ios::trunc);
    write_aggregate_table(out, rows);
    if(!out) throw IoError("failed writing " + (dir / files::aggregate).string());
    return rows;
}

void write_aggregate_table(std::ostream &out, const std::vector<AggregateRow> &rows, TableFormat format) {
    static const char *columns[] = {"L",          "W",          "post_selected", "realizations", "certificates", "median_A",        "mean_A",
                                    "std_A",      "max_A_median", "max_A_mean",  "max_A_std",    "all_k_mean",   "all_k_std",       "var_median",
                                    "var_mean",   "fidelity_median", "converged", "unconverged"};
    const char  sep       = format == TableFormat::csv ? ',' : ' ';
    if(format == TableFormat::gnuplot) out << "# ";
    for(std::size_t i = 0; i < std::size(columns); ++i) out << (i ? std::string(1, sep) : "") << columns[i];
    out << '\n' << std::setprecision(17);
    for(const auto &r : rows) {
        out << r.L << sep << r.W << sep << (r.post_selected ? 1 : 0) << sep << r.realizations << sep << r.certificates << sep << r.median_A << sep
            << r.mean_A << sep << r.std_A << sep << r.max_A_median << sep << r.max_A_mean << sep << r.max_A_std << sep << r.all_k_mean << sep
            << r.all_k_std << sep << r.var_median << sep << r.var_mean << sep << r.fidelity_median << sep << r.converged << sep << r.unconverged
            << '\n';
    }
}

std::vector<AggregateRow> crossover_scan(EnsembleConfig cfg, std::ostream *progress) {
    if(cfg.strengths.empty()) throw ValidationError("crossover scan needs a nonempty W grid");
    if(cfg.lengths.size() != 1) throw ValidationError("crossover scan runs at a single length");
    (void)run_ensemble(cfg, progress);
    auto rows = aggregate(cfg.run_dir(), {cfg.middle_half, post_selection_variance});
    std::ofstream out(cfg.run_dir() / "crossover.csv", std::ios::trunc);
    write_aggregate_table(out, rows);
    if(!out) throw IoError("failed writing crossover.csv");
    return rows;
}

} // namespace mblrevive
