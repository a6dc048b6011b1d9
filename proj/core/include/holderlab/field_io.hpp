#pragma once

// Field container on disk:
//
//   HOLDERLAB-FIELD 1\n
//   {"dim":..,"x":[lo,hi],"y":[lo,hi],"nx":..,"t":[lo,hi],"nt":..,
//    "name":..,"provenance":..,"metadata":{..},"count":N}\n
//   N little-endian IEEE-754 float64 values, row-major, time outermost.
//
// The CSV export has columns t,x[,y],u with one row per node.

#include <filesystem>

#include "holderlab/fields.hpp"

namespace holderlab {

/// Throws IoFailure.
void write_field(const std::filesystem::path& path, const SpaceTimeField& field);

/// Throws IoFailure on a missing file or a malformed header.
SpaceTimeField read_field(const std::filesystem::path& path);

/// Throws IoFailure.
void write_field_csv(const std::filesystem::path& path, const SpaceTimeField& field);

}  // namespace holderlab
