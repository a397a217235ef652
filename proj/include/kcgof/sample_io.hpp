#pragma once

#include <filesystem>
#include <iosfwd>

#include "kcgof/types.hpp"

namespace kcgof {

/// Reads a CSV whose header names columns x1..x{dx} and y1..y{dy} (any order,
/// extra columns ignored). Throws ParseError naming the missing column or the
/// row/column of a bad cell.
JointSample load_sample(const std::filesystem::path& path, Index dx, Index dy);
JointSample read_sample(std::istream& in, Index dx, Index dy);

/// Writes x1..,y1.. columns with shortest round-trip decimal formatting.
void save_sample(const std::filesystem::path& path, const JointSample& sample);
void write_sample(std::ostream& out, const JointSample& sample);

}  // namespace kcgof
