#pragma once

#include <string>
#include <vector>

#include "bblab/grid.hpp"

namespace bblab {

// BBF1: "BBF1", u32 d, u32 n, n^d little-endian f64 values (row-major).
std::vector<unsigned char> encode_bbf(const ScalarField& f);
ScalarField decode_bbf(const std::vector<unsigned char>& bytes);

void write_bbf(const std::string& path, const ScalarField& f);
ScalarField read_bbf(const std::string& path);

}  // namespace bblab
