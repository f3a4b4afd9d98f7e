#pragma once

#include "mblrevive/mps.hpp"

#include <filesystem>

namespace mblrevive {

inline constexpr int mps_schema_version = 1;

/// Writes manifest.json plus one little-endian complex128 file per site,
/// row-major in (left, physical, right).
void save_mps(const Mps &psi, const std::filesystem::path &dir);
[[nodiscard]] Mps load_mps(const std::filesystem::path &dir);

} // namespace mblrevive
