#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mdslab/tensor.hpp"

namespace mdslab {

// On-disk layout: a text manifest terminated by "end\n", then the raw
// little-endian payload, row-major per tensor.
//
//   mdslab-container 1
//   byte_order little
//   payload_offset 0000000187
//   tensor name=adc dtype=c64 offset=0 shape=128,128,2,4 axes=fast_time,chirp,tx,rx
//   end
inline constexpr int kContainerVersion = 1;

enum class DType { kC64, kF32, kF64, kI64 };

const char* dtype_name(DType dtype);
DType parse_dtype(const std::string& name);
std::size_t dtype_size(DType dtype);

struct StoredTensor {
  std::string name;
  DType dtype = DType::kF64;
  Shape shape;
  std::vector<std::string> axes;  // empty, or one per dimension
  std::string bytes;              // payload slice

  std::size_t elements() const { return shape_elements(shape); }
};

class Container {
 public:
  void add(const std::string& name, const RTensor& t, std::vector<std::string> axes = {},
           DType dtype = DType::kF64);
  // Stored as c64, i.e. float32 real/imag pairs.
  void add(const std::string& name, const CTensor& t, std::vector<std::string> axes = {});
  void add(const std::string& name, const std::vector<std::int64_t>& values, Shape shape,
           std::vector<std::string> axes = {});

  bool contains(const std::string& name) const;
  const StoredTensor& get(const std::string& name) const;
  const std::vector<StoredTensor>& tensors() const { return tensors_; }

  // Typed views. An expected shape, when given, must match exactly (kShapeMismatch).
  RTensor real(const std::string& name, const Shape& expected = {}) const;
  CTensor complex(const std::string& name, const Shape& expected = {}) const;
  std::vector<std::int64_t> ints(const std::string& name) const;

  void push(StoredTensor t);

 private:
  std::vector<StoredTensor> tensors_;
};

std::string encode_container(const Container& c);
// kVersionMismatch for an unknown version, kTruncated when the manifest is
// cut short, kSizeMismatch when the payload length disagrees with the
// manifest, kParse for malformed lines.
Container decode_container(std::string_view bytes);

void write_container(const std::string& path, const Container& c);
Container read_container(const std::string& path);

// Single-tensor shorthands; the tensor is named "data".
void write_tensor(const std::string& path, const RTensor& t, std::vector<std::string> axes = {});
void write_tensor(const std::string& path, const CTensor& t, std::vector<std::string> axes = {});
RTensor read_real_tensor(const std::string& path);
CTensor read_complex_tensor(const std::string& path);

}  // namespace mdslab
