#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "morsematch/hasse.hpp"
#include "morsematch/matching_complex.hpp"

namespace morsematch {

// Face-set line format:
//
//   morsematch-faces v1 <edge-count>
//   <face>
//   ...
//
// A face is the bitset of its Hasse-edge indices, little-endian: ceil(E/8)
// bytes, byte k holds edges 8k..8k+7 with the lowest edge in the lowest bit,
// written as two lowercase hex digits per byte, byte 0 first.

inline std::string encode_face(std::span<const EdgeIndex> edges, std::size_t edge_count) {
  std::vector<std::uint8_t> bytes((edge_count + 7) / 8, 0);
  for (EdgeIndex e : edges) {
    if (e >= edge_count) throw std::out_of_range("edge index beyond edge count");
    bytes[e / 8] |= std::uint8_t(1u << (e % 8));
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(hex[b >> 4]);
    out.push_back(hex[b & 15]);
  }
  return out;
}

inline std::vector<EdgeIndex> decode_face(const std::string& line, std::size_t edge_count) {
  if (line.size() != 2 * ((edge_count + 7) / 8)) throw std::invalid_argument("face line has the wrong length");
  auto nibble = [](char c) -> unsigned {
    if (c >= '0' && c <= '9') return unsigned(c - '0');
    if (c >= 'a' && c <= 'f') return unsigned(c - 'a' + 10);
    throw std::invalid_argument("face line is not lowercase hex");
  };
  std::vector<EdgeIndex> out;
  for (std::size_t k = 0; k < line.size() / 2; ++k) {
    const unsigned b = nibble(line[2 * k]) << 4 | nibble(line[2 * k + 1]);
    for (unsigned bit = 0; bit < 8; ++bit)
      if (b & (1u << bit)) {
        const auto e = EdgeIndex(8 * k + bit);
        if (e >= edge_count) throw std::invalid_argument("face line sets a bit beyond the edge count");
        out.push_back(e);
      }
  }
  if (out.empty()) throw std::invalid_argument("empty face in face file");
  return out;
}

/// Writes every face of the matching complex, by dimension then in canonical order.
inline void write_faces(std::ostream& os, const MatchingComplex& mc) {
  const std::size_t e_count = mc.hasse->edge_count();
  os << "morsematch-faces v1 " << e_count << '\n';
  for (int d = 0; d <= mc.complex.dimension(); ++d)
    for (std::size_t i = 0; i < mc.complex.face_count(d); ++i) os << encode_face(mc.edges_of(d, i), e_count) << '\n';
}

inline std::string faces_to_string(const MatchingComplex& mc) {
  std::ostringstream os;
  write_faces(os, mc);
  return os.str();
}

struct FaceFile {
  std::size_t edge_count = 0;
  std::vector<std::vector<EdgeIndex>> faces;
};

inline FaceFile read_faces(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("missing face file header");
  std::istringstream header(line);
  std::string magic, version;
  FaceFile out;
  if (!(header >> magic >> version >> out.edge_count) || magic != "morsematch-faces" || version != "v1")
    throw std::invalid_argument("bad face file header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    out.faces.push_back(decode_face(line, out.edge_count));
  }
  return out;
}

}  // namespace morsematch
