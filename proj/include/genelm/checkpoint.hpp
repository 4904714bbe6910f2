#pragma once

// Versioned binary container of named parameter arrays.
//
// Layout (little-endian):
//   magic   "GLMC"            4 bytes
//   version u32               currently 1
//   prec    u8                0 = f64, 1 = f32 (advisory tag)
//   count   u32
//   entries: name_len u32, name bytes, ndim u32, dims u64 each,
//            values f64 each (row-major)

#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "genelm/model.hpp"
#include "genelm/tensor.hpp"

namespace genelm {

class CheckpointError : public std::runtime_error {
 public:
  explicit CheckpointError(const std::string& msg) : std::runtime_error(msg) {}
};

namespace detail {

template <typename T>
void write_pod(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw CheckpointError("checkpoint: truncated file");
  return v;
}

}  // namespace detail

inline void save_checkpoint(const std::string& path, const NamedParams& params) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw CheckpointError("checkpoint: cannot open " + path);
  os.write("GLMC", 4);
  detail::write_pod<std::uint32_t>(os, 1);
  detail::write_pod<std::uint8_t>(
      os, precision_mode() == Precision::f64 ? 0 : 1);
  detail::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(params.size()));
  for (const auto& [name, t] : params) {
    detail::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    detail::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(t.ndim()));
    for (std::size_t d : t.shape()) {
      detail::write_pod<std::uint64_t>(os, static_cast<std::uint64_t>(d));
    }
    os.write(reinterpret_cast<const char*>(t.values().data()),
             static_cast<std::streamsize>(t.size() * sizeof(double)));
  }
}

struct CheckpointEntry {
  std::vector<std::size_t> shape;
  std::vector<double> values;
};

inline std::map<std::string, CheckpointEntry> load_checkpoint(
    const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CheckpointError("checkpoint: cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "GLMC", 4) != 0) {
    throw CheckpointError("checkpoint: bad magic in " + path);
  }
  std::uint32_t version = detail::read_pod<std::uint32_t>(is);
  if (version != 1) {
    throw CheckpointError("checkpoint: unsupported version " +
                          std::to_string(version));
  }
  detail::read_pod<std::uint8_t>(is);  // precision tag
  std::uint32_t count = detail::read_pod<std::uint32_t>(is);
  std::map<std::string, CheckpointEntry> out;
  for (std::uint32_t i = 0; i < count; ++i) {
    std::uint32_t name_len = detail::read_pod<std::uint32_t>(is);
    std::string name(name_len, '\0');
    is.read(name.data(), name_len);
    std::uint32_t ndim = detail::read_pod<std::uint32_t>(is);
    CheckpointEntry e;
    std::size_t n = 1;
    for (std::uint32_t d = 0; d < ndim; ++d) {
      std::size_t dim =
          static_cast<std::size_t>(detail::read_pod<std::uint64_t>(is));
      e.shape.push_back(dim);
      n *= dim;
    }
    e.values.resize(n);
    is.read(reinterpret_cast<char*>(e.values.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
    if (!is) throw CheckpointError("checkpoint: truncated values for " + name);
    out.emplace(std::move(name), std::move(e));
  }
  return out;
}

// restore values into live parameters by name; shapes must match
inline void restore_params(const NamedParams& params,
                           const std::map<std::string, CheckpointEntry>& ckpt) {
  for (const auto& [name, t] : params) {
    auto it = ckpt.find(name);
    if (it == ckpt.end()) {
      throw CheckpointError("checkpoint: missing parameter " + name);
    }
    if (it->second.shape != t.shape()) {
      throw CheckpointError("checkpoint: shape mismatch for " + name);
    }
    const_cast<Tensor&>(t).mutable_values() = it->second.values;
  }
}

// FNV-1a over raw parameter bytes, for frozen-weight and no-mutation checks
inline std::uint64_t params_hash(const NamedParams& params) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* data, std::size_t n) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  };
  for (const auto& [name, t] : params) {
    mix(name.data(), name.size());
    mix(t.values().data(), t.size() * sizeof(double));
  }
  return h;
}

}  // namespace genelm
