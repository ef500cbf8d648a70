#pragma once

#include "cpg/grating_reflection.hpp"

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

namespace cpg {

/// Content hash of everything a reflection matrix depends on.
std::uint64_t reflection_key(const GratingGeometry& geom, double eps_value, const TruncationSpec& trunc,
                             const SpectralNode& node);

/// Thread-safe memo of reflection matrices keyed by reflection_key().
///
/// File format (all integers and doubles little-endian, doubles IEEE-754 binary64):
///   magic   8 bytes  "CPGRCACH"
///   version u32      = 1
///   count   u64
///   count entries of
///     key u64, n_max i32, kx0 f64, ky f64, xi f64, reference_height f64, eps_value f64,
///     rcond f64, kappa f64[2 n_max + 1], matrix f64[(2 (2 n_max + 1))^2] row-major
/// Entries are written in ascending key order so equal caches produce equal files.
class ReflectionCache {
public:
    static constexpr std::uint32_t format_version = 1;

    std::optional<ReflectionMatrix> find(std::uint64_t key) const;
    void insert(std::uint64_t key, const ReflectionMatrix& m);
    std::size_t size() const;
    std::size_t hits() const;

    /// Merges entries from a cache file. Throws InputError on a malformed or foreign file.
    void load(const std::string& path);
    void save(const std::string& path) const;

private:
    mutable std::mutex mutex_;
    std::unordered_map<std::uint64_t, ReflectionMatrix> entries_;
    mutable std::size_t hits_ = 0;
};

} // namespace cpg
