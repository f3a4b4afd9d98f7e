#pragma once

#include "mblrevive/model.hpp"
#include "mblrevive/mps.hpp"

#include <filesystem>
#include <functional>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

namespace mblrevive {

struct SweepStage {
    Eigen::Index chi    = 0;
    int          sweeps = 0;
};

struct SweepSchedule {
    std::vector<SweepStage> stages;
    double                  threshold = 1e-12; ///< on |sigma^2 / E^2|

    /// Caps 2, 4, 8, 16, 24, 32 with 20 sweeps each.
    static SweepSchedule standard();
    /// "chi:sweeps,chi:sweeps,..."
    static SweepSchedule parse(const std::string &text, double threshold = 1e-12);
    /// Throws ValidationError unless caps increase strictly and counts are >= 1.
    void validate() const;
    [[nodiscard]] std::string to_string() const;
};

struct DmrgxOptions {
    /// Largest two-site effective problem diagonalized densely.
    Eigen::Index max_effective_dim = 8192;
    /// Singular values below this fraction of the largest are dropped.
    double truncation_cutoff = 1e-14;
    /// Squared overlaps closer than this are ties, resolved to the lower energy.
    double tie_tolerance = 1e-12;
};

struct SweepRecord {
    Eigen::Index stage_chi   = 0;
    int          sweep_index = 0; ///< counts from 1 across all stages
    double       energy      = 0.0;
    double       variance    = 0.0;
    double       var_rescaled = 0.0;
    Eigen::Index max_bond    = 0;
};

struct EigenpairMPS {
    Mps                      state;
    double                   energy   = 0.0;
    double                   variance = 0.0; ///< signed
    double                   var_rescaled = 0.0;
    bool                     converged = false;
    /// Cap of the stage in which the threshold was first met.
    std::optional<Eigen::Index> converged_at_chi;
    /// Negative variance that is rounding noise: below the cancellation
    /// floor of <H^2> - <H>^2, or sign-alternating at comparable magnitude.
    bool                     variance_is_noise = false;
    std::vector<SweepRecord> sweeps;
    SpinConfiguration        seed;
};

/// Overlap-following excited-state search from a Z-basis seed. Two-site
/// updates with U(1) block structure; the state stays in the seed's sector.
[[nodiscard]] EigenpairMPS dmrgx(const Mpo &h, const Mpo &h2, const SpinConfiguration &seed, const SweepSchedule &schedule, const DmrgxOptions &opts = {});
[[nodiscard]] EigenpairMPS dmrgx(const Mpo &h, const SpinConfiguration &seed, const SweepSchedule &schedule, const DmrgxOptions &opts = {});

/// Unconverged seed counts after each stage cap.
struct ConvergenceReport {
    std::vector<Eigen::Index> chi_caps;
    std::vector<std::size_t>  unconverged; ///< per cap
    std::size_t               seeds  = 0;
    std::size_t               failed = 0; ///< seeds that raised an error

    static ConvergenceReport for_schedule(const SweepSchedule &schedule);
    void add(const EigenpairMPS &e);
    void add_failure();
    void merge(const ConvergenceReport &other);
};

enum class SeedOrientation { domain_wall, flipped };

struct SeedOutcome {
    std::size_t                 k = 0;
    SpinConfiguration           seed;
    std::optional<EigenpairMPS> eigenpair;
    std::string                 error;
};

struct SeedFamily {
    std::vector<SeedOutcome> seeds;
    ConvergenceReport        report;
};

struct FamilyOptions {
    SeedOrientation orientation = SeedOrientation::domain_wall;
    /// Seeds k = first_k .. last_k; defaults give 1 .. L-1.
    std::size_t first_k = 1;
    std::optional<std::size_t> last_k;
    /// Worker threads; 0 means hardware concurrency capped by MBLREVIVE_THREADS.
    unsigned threads = 0;
    DmrgxOptions dmrgx;
};

/// Runs dmrgx for every domain-wall seed. Failures are recorded per seed.
[[nodiscard]] SeedFamily run_seed_family(const Mpo &h, const DisorderRealization &d, const SweepSchedule &schedule, const FamilyOptions &opts = {});

/// Worker count honoring MBLREVIVE_THREADS.
[[nodiscard]] unsigned worker_count(unsigned requested = 0);

/// One JSON line per sweep: {seed_k, stage_chi, sweep_index, E, var_rescaled}.
void append_sweep_log(std::ostream &out, std::size_t seed_k, const EigenpairMPS &e);

/// Eigenpair directory: the MPS plus eigenpair.json with energy and seed.
void save_eigenpair(const EigenpairMPS &e, const std::filesystem::path &dir);
[[nodiscard]] EigenpairMPS load_eigenpair(const std::filesystem::path &dir);

[[nodiscard]] nlohmann::json eigenpair_summary(const EigenpairMPS &e);

} // namespace mblrevive
