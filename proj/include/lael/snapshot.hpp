#pragma once

// LAEF field snapshots.
//
//   bytes 0-3  "LAEF"
//   u16        version (1)
//   u32        n
//   u8         component count
//   f64[...]   components in order, each n*n values in (ix, iy) row-major
//
// Every integer and float is little endian regardless of the host.

#include <string>
#include <vector>

#include "lael/fields.hpp"

namespace lael::io {

inline constexpr unsigned short laef_version = 1;

struct Snapshot {
  int n = 0;
  std::vector<Array2> components;
};

void write_snapshot(const std::string& path, const std::vector<const Array2*>& comps);

template <std::size_t N, class Tag>
void write_snapshot(const ComponentField<N, Tag>& f, const std::string& path) {
  std::vector<const Array2*> comps;
  for (const auto& a : f.c) comps.push_back(&a);
  write_snapshot(path, comps);
}

/// Reads a whole file; throws on bad magic, version or truncation.
Snapshot read_snapshot(const std::string& path);

/// Rebuilds a field with N components on the default-length grid.
template <class FieldT>
FieldT snapshot_as(const Snapshot& s) {
  if (s.components.size() != FieldT::components)
    throw ShapeError("snapshot has " + std::to_string(s.components.size()) +
                     " components, expected " +
                     std::to_string(FieldT::components));
  FieldT f{GridSpec(s.n)};
  for (std::size_t i = 0; i < FieldT::components; ++i) f.c[i] = s.components[i];
  return f;
}

/// Serialized bytes (used by writer and tests).
std::string encode_snapshot(const std::vector<const Array2*>& comps);
Snapshot decode_snapshot(const std::string& bytes);

} // namespace lael::io
