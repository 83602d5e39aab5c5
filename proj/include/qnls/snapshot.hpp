#pragma once

#include <string>

#include "qnls/field.hpp"

namespace qnls {

struct SnapshotMeta {
    double kappa = 0.5;
    double time = 0;
};

/// Binary snapshot: magic "QNLS1", fixed-width little-endian header
/// (grid kind, dim, points, extent, kappa, time, payload checksum), then the
/// u and v payloads as contiguous complex doubles.
void save_snapshot(const std::string& path, const FieldPair& fp, const SnapshotMeta& meta);

/// Throws VersionMismatch on a wrong magic, CorruptSnapshot on truncation or
/// checksum failure.
FieldPair load_snapshot(const std::string& path, SnapshotMeta* meta = nullptr);

} // namespace qnls
