#pragma once

#include <iosfwd>
#include <string>

#include "phi4/sampler.hpp"

namespace phi4 {

// Binary record, all fields little-endian:
//   char[8]  "PHI4PATH"
//   u32      version (1)
//   f64      beta
//   f64      dt
//   u64      number of samples
//   u64      seed
//   u8       boundary kind (0 stationary, 1 free, 2 sde)
//   f64      grid half-width R
//   u32      grid point count n
// followed by the samples: u16 node indices for chain paths, f64
// coordinates for SDE paths.
void write_path(std::ostream& out, const PathSample& path);
PathSample read_path(std::istream& in);

void write_path_file(const std::string& file, const PathSample& path);
PathSample read_path_file(const std::string& file);

// "t,x" lines after a one-line header.
void write_path_csv(std::ostream& out, const PathSample& path);

}  // namespace phi4
