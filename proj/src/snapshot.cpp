#include "lael/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace lael::io {
namespace {

void put_le(std::string& out, std::uint64_t v, int bytes) {
  for (int b = 0; b < bytes; ++b) out.push_back(char((v >> (8 * b)) & 0xFF));
}

std::uint64_t get_le(const std::string& in, std::size_t& pos, int bytes) {
  if (pos + std::size_t(bytes) > in.size())
    throw Error("LAEF snapshot is truncated");
  std::uint64_t v = 0;
  for (int b = 0; b < bytes; ++b)
    v |= std::uint64_t(static_cast<unsigned char>(in[pos + b])) << (8 * b);
  pos += std::size_t(bytes);
  return v;
}

} // namespace

std::string encode_snapshot(const std::vector<const Array2*>& comps) {
  if (comps.empty() || comps.size() > 255)
    throw Error("snapshot needs between 1 and 255 components");
  const auto n = comps.front()->rows();
  for (const auto* c : comps)
    if (c->rows() != n || c->cols() != n)
      throw ShapeError("snapshot components must be n x n arrays of one size");
  std::string out = "LAEF";
  put_le(out, laef_version, 2);
  put_le(out, std::uint64_t(n), 4);
  put_le(out, comps.size(), 1);
  out.reserve(out.size() + comps.size() * std::size_t(n * n) * 8);
  for (const auto* c : comps)
    for (Eigen::Index i = 0; i < c->size(); ++i)
      put_le(out, std::bit_cast<std::uint64_t>(c->data()[i]), 8);
  return out;
}

Snapshot decode_snapshot(const std::string& in) {
  if (in.size() < 4 || in.compare(0, 4, "LAEF") != 0)
    throw Error("not a LAEF snapshot (bad magic)");
  std::size_t pos = 4;
  const auto version = get_le(in, pos, 2);
  if (version != laef_version)
    throw Error("unsupported LAEF version " + std::to_string(version));
  const auto n = get_le(in, pos, 4);
  const auto count = get_le(in, pos, 1);
  if (n == 0 || n > 65536 || count == 0)
    throw Error("LAEF header has invalid dimensions");
  const std::size_t need = pos + count * n * n * 8;
  if (in.size() < need) throw Error("LAEF snapshot is truncated");
  if (in.size() > need) throw Error("LAEF snapshot has trailing bytes");
  Snapshot s;
  s.n = int(n);
  for (std::uint64_t c = 0; c < count; ++c) {
    Array2 a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < a.size(); ++i)
      a.data()[i] = std::bit_cast<double>(get_le(in, pos, 8));
    s.components.push_back(std::move(a));
  }
  return s;
}

void write_snapshot(const std::string& path,
                    const std::vector<const Array2*>& comps) {
  const std::string bytes = encode_snapshot(comps);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  f.write(bytes.data(), std::streamsize(bytes.size()));
  if (!f) throw Error("write to '" + path + "' failed");
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return decode_snapshot(ss.str());
}

} // namespace lael::io
