#pragma once

#include "chemflux/grid.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace chemflux {

/// Field snapshot, format CFSNAP1: one ASCII header line
///   CFSNAP1 <dim> <m_1> ... <m_dim> <L_1> ... <L_dim> <kind>
/// (kind in {cell, facex, facey, facez}), then the row-major little-endian
/// IEEE-754 binary64 payload.
struct Snapshot {
    GridSpec grid;
    std::string kind;
    std::vector<double> payload;
};

void write_snapshot(std::ostream& os, const GridSpec& grid, const std::string& kind,
                    const std::vector<double>& payload);
Snapshot read_snapshot(std::istream& is);

std::string kind_for_axis(int axis); // facex/facey/facez

void write_snapshot_file(const std::string& path, const GridSpec& grid, const std::string& kind,
                         const std::vector<double>& payload);
Snapshot read_snapshot_file(const std::string& path);

} // namespace chemflux
