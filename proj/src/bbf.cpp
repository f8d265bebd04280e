#include "bblab/bbf.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

namespace bblab {
namespace {

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<unsigned char>(v >> (8 * b)));
}

std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b) v |= std::uint32_t(p[b]) << (8 * b);
  return v;
}

}  // namespace

std::vector<unsigned char> encode_bbf(const ScalarField& f) {
  std::vector<unsigned char> out;
  out.reserve(12 + 8 * f.size());
  for (char c : {'B', 'B', 'F', '1'}) out.push_back(static_cast<unsigned char>(c));
  put_u32(out, static_cast<std::uint32_t>(f.grid().dim()));
  put_u32(out, static_cast<std::uint32_t>(f.grid().n()));
  for (Index i = 0; i < f.size(); ++i) {
    std::uint64_t bits;
    const double v = f[i];
    std::memcpy(&bits, &v, 8);
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<unsigned char>(bits >> (8 * b)));
  }
  return out;
}

ScalarField decode_bbf(const std::vector<unsigned char>& bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "BBF1", 4) != 0)
    throw IoError("missing BBF1 header");
  const TorusGrid grid(static_cast<int>(get_u32(&bytes[4])), static_cast<int>(get_u32(&bytes[8])));
  if (bytes.size() != 12 + 8 * static_cast<std::size_t>(grid.size()))
    throw IoError("BBF1 payload length does not match header");
  Eigen::VectorXd v(grid.size());
  const unsigned char* p = bytes.data() + 12;
  for (Index i = 0; i < grid.size(); ++i, p += 8) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= std::uint64_t(p[b]) << (8 * b);
    std::memcpy(&v[i], &bits, 8);
  }
  return ScalarField(grid, std::move(v));
}

void write_bbf(const std::string& path, const ScalarField& f) {
  const auto bytes = encode_bbf(f);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw IoError("write failed for " + path);
}

ScalarField read_bbf(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return decode_bbf(bytes);
}

}  // namespace bblab
