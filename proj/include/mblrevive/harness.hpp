#pragma once

#include "mblrevive/certifier.hpp"
#include "mblrevive/dmrgx.hpp"
#include "mblrevive/multiexc.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

namespace mblrevive {

inline constexpr int ensemble_schema_version = 1;

struct EnsembleConfig {
    std::vector<std::size_t> lengths;
    std::vector<double>      strengths;
    std::size_t              realizations = 1;
    std::uint64_t            seed_base    = 0;
    SweepSchedule            schedule     = SweepSchedule::standard();
    bool                     middle_half  = true;
    std::filesystem::path    output       = "runs";
    std::string              tag          = "default";
    /// Realizations processed concurrently; 0 means worker_count().
    unsigned threads = 0;
    /// Keep every eigenpair MPS under eigenpairs/.
    bool save_eigenpairs = false;
    /// Also run the up-down family (needed for gluing); implies saving.
    bool flipped_family = false;

    /// Throws ValidationError on empty grids, zero realizations or a bad schedule.
    void validate() const;
    [[nodiscard]] std::filesystem::path run_dir() const { return output / tag; }
};

[[nodiscard]] nlohmann::json to_json(const EnsembleConfig &c);
[[nodiscard]] EnsembleConfig ensemble_config_from_json(const nlohmann::json &j);
[[nodiscard]] EnsembleConfig load_ensemble_config(const std::filesystem::path &path);

/// <run>/L<L>_W<W>/r<idx>, W printed with the shortest round-trip form.
[[nodiscard]] std::filesystem::path point_dir(const EnsembleConfig &c, std::size_t L, double W);
[[nodiscard]] std::filesystem::path realization_dir(const EnsembleConfig &c, std::size_t L, double W, std::size_t idx);

/// Files of one finished realization directory.
namespace files {
inline constexpr const char *disorder     = "disorder.json";
inline constexpr const char *certificates = "certificates.jsonl";
inline constexpr const char *eigenpairs   = "eigenpairs.jsonl";
inline constexpr const char *sweeps       = "sweeps.jsonl";
inline constexpr const char *convergence  = "convergence.json";
inline constexpr const char *errors       = "errors.jsonl";
inline constexpr const char *done         = "done";
inline constexpr const char *aggregate    = "aggregate.csv";
} // namespace files

struct RealizationOutcome {
    std::size_t L = 0, index = 0;
    double      W = 0.0;
    bool        skipped = false; ///< already complete on disk
    std::size_t certificates = 0;
    std::size_t errors       = 0; ///< seeds or pairs that failed
    std::string failure;          ///< the realization as a whole failed
};

struct EnsembleSummary {
    std::vector<RealizationOutcome> realizations;
    [[nodiscard]] bool ok() const;
};

/// Runs one realization into `dir`: both families as configured, every
/// certificate k = 1..L-1, logs, and finally the done marker. A directory
/// without the marker is cleared first.
RealizationOutcome run_realization(const DisorderRealization &d, const EnsembleConfig &cfg, const std::filesystem::path &dir);

/// Every (L, W, realization) of the grid; completed directories are skipped.
EnsembleSummary run_ensemble(const EnsembleConfig &cfg, std::ostream *progress = nullptr);

/// Eigenpairs saved under <realization>/eigenpairs/{du,ud}.
[[nodiscard]] EigenFamily load_family(const std::filesystem::path &realization, SeedOrientation orientation);

/// One certificate line with the variances of its two eigenstates.
struct CertificateRecord {
    Certificate certificate;
    double      var1 = 0.0, var2 = 0.0;
    bool        converged1 = false, converged2 = false;
};

[[nodiscard]] nlohmann::json to_json(const CertificateRecord &r);
[[nodiscard]] CertificateRecord certificate_record_from_json(const nlohmann::json &j);
[[nodiscard]] std::vector<CertificateRecord> read_certificates(const std::filesystem::path &jsonl);

/// Statistics for one (L, W) point. Amplitude columns summarize
/// per-realization values: the median over k and the max over k (middle
/// half when requested).
struct AggregateRow {
    std::size_t L = 0;
    double      W = 0.0;
    bool        post_selected = false; ///< restricted to realizations with median |var| <= 1e-12
    std::size_t realizations  = 0;
    std::size_t certificates  = 0;
    double      median_A = 0.0, mean_A = 0.0, std_A = 0.0;             ///< of per-realization medians
    double      max_A_median = 0.0, max_A_mean = 0.0, max_A_std = 0.0; ///< of per-realization maxima
    double      all_k_mean = 0.0, all_k_std = 0.0;                      ///< pooled over every certificate
    double      var_median = 0.0, var_mean = 0.0;                       ///< |sigma^2 / E^2| over eigenpairs
    double      fidelity_median = 0.0;                                  ///< min(F+^2, F-^2) over certificates
    std::size_t converged = 0, unconverged = 0;                         ///< eigenpairs
};

struct AggregateOptions {
    bool middle_half = true;
    /// Adds a post-selected row per point when set.
    std::optional<double> post_select_variance;
};

/// k in [L/4, 3L/4], both ends included.
[[nodiscard]] bool in_middle_half(std::size_t k, std::size_t L);

/// Reads every finished realization below `dir` (the run directory) and
/// writes aggregate.csv there. Throws EmptyAggregateError when nothing is found.
[[nodiscard]] std::vector<AggregateRow> aggregate(const std::filesystem::path &dir, const AggregateOptions &opts = {});

enum class TableFormat { csv, gnuplot };
void write_aggregate_table(std::ostream &out, const std::vector<AggregateRow> &rows, TableFormat format = TableFormat::csv);

/// Ensemble over a W grid at one L, aggregated with post-selection; writes
/// crossover.csv next to aggregate.csv.
[[nodiscard]] std::vector<AggregateRow> crossover_scan(EnsembleConfig cfg, std::ostream *progress = nullptr);

/// Post-selection threshold on the per-realization median rescaled variance.
inline constexpr double post_selection_variance = 1e-12;

} // namespace mblrevive
