#pragma once

#include <cstdint>
#include <string>

namespace defplan {

// Writes a nine-trial synthetic CK-metric benchmark (three releases per
// trial, shared file names, seeded developer-style change patterns) and a
// manifest declaring the trials. Returns the manifest path.
std::string generate_benchmark(const std::string& out_dir, uint64_t seed);

}  // namespace defplan
