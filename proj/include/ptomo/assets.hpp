#pragma once

// Versioned data assets shipped under data/: the 7x7 device matrix ("u7")
// and the 35 published effect arrays, each listed in data/SHA256SUMS.

#include <string>
#include <vector>

#include "ptomo/linalg.hpp"

namespace ptomo {

// $PTOMO_DATA_DIR if set, otherwise the configured source data directory.
std::string data_dir();

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

// Reads `relative` below data_dir() after checking it against SHA256SUMS;
// a missing entry or mismatch throws kIo.
CMat load_verified_matrix(const std::string& relative);

CMat builtin_device_matrix(const std::string& name);
// Published effects for a 1-based input subset, dim x outcomes as printed.
CMat published_family_matrix(const std::vector<int>& subset);

}  // namespace ptomo
