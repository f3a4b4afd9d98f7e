#pragma once

#include "mblrevive/certifier.hpp"
#include "mblrevive/dmrgx.hpp"
#include "mblrevive/mps.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mblrevive {

enum class GlueMode {
    strict, ///< reject rank mismatch at a cut that is not product-like
    pad,    ///< always zero-pad the smaller Schmidt rank
};

struct GlueOptions {
    /// Schmidt weight beyond the dominant value below which a cut counts as
    /// product-like.
    double   product_threshold = 1e-6;
    GlueMode mode              = GlueMode::strict;
};

struct GlueReport {
    double       cut_weight_left  = 0.0; ///< of the state supplying sites < m
    double       cut_weight_right = 0.0; ///< of the state supplying sites >= m
    Eigen::Index rank_left  = 0;
    Eigen::Index rank_right = 0;
    bool         product_like = false;
    bool         padded       = false;
};

struct GlueResult {
    Mps        state; ///< normalized
    GlueReport report;
};

/// Sites [0, m) of `a` followed by sites [m, L) of `b`, both brought to
/// Schmidt gauge at the cut; the Schmidt values of `b` stay on the right
/// part. Gluing a state with itself returns it unchanged.
[[nodiscard]] GlueResult glue(const Mps &a, const Mps &b, std::size_t m, const GlueOptions &opts = {});

/// Cut site between walls k1 < k2: ceil((k1 + k2) / 2).
[[nodiscard]] std::size_t glue_cut(std::size_t k1, std::size_t k2);

/// Eigenpairs of one wall orientation indexed by wall position k (0..L).
/// Missing or unconverged entries are allowed.
using EigenFamily = std::map<std::size_t, EigenpairMPS>;

struct GlueRow {
    std::size_t                d  = 0;
    std::size_t                k1 = 0, k2 = 0;
    std::optional<std::size_t> k3;
    double                     energy       = 0.0;
    double                     var_rescaled = 0.0;
    double                     cut_weight   = 0.0;
    std::string                error; ///< non-empty when the pair was skipped
};

struct GlueScan {
    std::vector<GlueRow>          rows;
    std::map<std::size_t, double> median; ///< over successful rows per d
};

/// Glues down-up walls at k1 with up-down walls at k2 = k1 + d for every
/// admissible k1 and records the rescaled variance of each candidate.
[[nodiscard]] GlueScan variance_vs_distance(const Mpo &h, const EigenFamily &down_up, const EigenFamily &up_down, const std::vector<std::size_t> &distances,
                                            const GlueOptions &opts = {GlueOptions{1e-6, GlueMode::pad}});

/// CSV: d,k1,k2,k3,var_rescaled,median,error.
void write_glue_scan_csv(std::ostream &out, const GlueScan &scan);

struct ReviverReport {
    std::vector<GlueReport> cuts;
    std::vector<double>     var_rescaled; ///< per glued component
    double                  max_var_rescaled = 0.0;
    bool                    all_eigenstates  = false; ///< every component below the threshold
};

struct MultiReviver {
    Mps                       state; ///< normalized superposition
    std::vector<EigenpairMPS> components;
    std::vector<cplx>         coefficients;
    ReviverReport             report;
};

struct ReviverConfig {
    std::size_t min_separation     = 1;
    double      variance_threshold = 1e-10;
    GlueOptions glue{1e-6, GlueMode::pad};
};

/// Superposition carrying one localized oscillation per wall. Walls
/// alternate orientation: down-up at k1, up-down at k2, down-up at k3. Each
/// wall contributes the eigenstates with the wall at k_i and k_i + 1, and
/// signs[i] picks +-. With one wall this is the plain pair superposition.
[[nodiscard]] MultiReviver multi_reviver(const Mpo &h, const EigenFamily &down_up, const EigenFamily &up_down, const std::vector<std::size_t> &walls,
                                         const std::vector<int> &signs, const ReviverConfig &cfg = {});

} // namespace mblrevive
