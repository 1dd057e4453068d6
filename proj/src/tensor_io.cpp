#include "mdslab/tensor_io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <sstream>

#include "mdslab/fs_util.hpp"

namespace mdslab {

static_assert(std::endian::native == std::endian::little, "container payloads are little-endian");

namespace {

constexpr std::string_view kMagic = "mdslab-container";
constexpr int kOffsetDigits = 10;

template <class T>
void append_raw(std::string& out, const T& v) {
  out.append(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T load_raw(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  return v;
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) s += sep;
    s += parts[i];
  }
  return s;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::uint64_t parse_u64(std::string_view s, const std::string& what) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  require(ec == std::errc() && ptr == s.data() + s.size() && !s.empty(), ErrorCode::kParse,
          "container: bad " + what + " '" + std::string(s) + "'");
  return v;
}

void check_name(const std::string& name) {
  require(!name.empty() && name.find_first_of(" \n=,") == std::string::npos, ErrorCode::kInvalidArgument,
          "container: invalid tensor name '" + name + "'");
}

void check_axes(const std::vector<std::string>& axes, const Shape& shape) {
  require(axes.empty() || axes.size() == shape.size(), ErrorCode::kShapeMismatch,
          "container: axis names do not match rank " + std::to_string(shape.size()));
  for (const auto& a : axes) {
    require(!a.empty() && a.find_first_of(" \n=,") == std::string::npos, ErrorCode::kInvalidArgument,
            "container: invalid axis name '" + a + "'");
  }
}

StoredTensor make(const std::string& name, DType dtype, Shape shape, std::vector<std::string> axes) {
  check_name(name);
  check_axes(axes, shape);
  StoredTensor t;
  t.name = name;
  t.dtype = dtype;
  t.shape = std::move(shape);
  t.axes = std::move(axes);
  t.bytes.reserve(t.elements() * dtype_size(dtype));
  return t;
}

void check_expected(const StoredTensor& t, const Shape& expected) {
  require(expected.empty() || t.shape == expected, ErrorCode::kShapeMismatch,
          "container: tensor '" + t.name + "' has shape " + shape_to_string(t.shape) + ", expected " +
              shape_to_string(expected));
}

}  // namespace

const char* dtype_name(DType dtype) {
  switch (dtype) {
    case DType::kC64: return "c64";
    case DType::kF32: return "f32";
    case DType::kF64: return "f64";
    case DType::kI64: return "i64";
  }
  return "?";
}

DType parse_dtype(const std::string& name) {
  if (name == "c64") return DType::kC64;
  if (name == "f32") return DType::kF32;
  if (name == "f64") return DType::kF64;
  if (name == "i64") return DType::kI64;
  fail(ErrorCode::kParse, "container: unknown dtype '" + name + "'");
}

std::size_t dtype_size(DType dtype) {
  switch (dtype) {
    case DType::kC64: return 8;
    case DType::kF32: return 4;
    case DType::kF64: return 8;
    case DType::kI64: return 8;
  }
  return 0;
}

void Container::push(StoredTensor t) {
  require(!contains(t.name), ErrorCode::kInvalidArgument, "container: duplicate tensor '" + t.name + "'");
  require(t.bytes.size() == t.elements() * dtype_size(t.dtype), ErrorCode::kSizeMismatch,
          "container: payload of '" + t.name + "' does not match its shape");
  tensors_.push_back(std::move(t));
}

void Container::add(const std::string& name, const RTensor& t, std::vector<std::string> axes, DType dtype) {
  require(dtype == DType::kF64 || dtype == DType::kF32, ErrorCode::kInvalidArgument,
          "container: real tensors are stored as f64 or f32");
  StoredTensor s = make(name, dtype, t.shape(), std::move(axes));
  for (double v : t.flat()) {
    if (dtype == DType::kF64) {
      append_raw(s.bytes, v);
    } else {
      append_raw(s.bytes, static_cast<float>(v));
    }
  }
  push(std::move(s));
}

void Container::add(const std::string& name, const CTensor& t, std::vector<std::string> axes) {
  StoredTensor s = make(name, DType::kC64, t.shape(), std::move(axes));
  for (const Complex& v : t.flat()) {
    append_raw(s.bytes, static_cast<float>(v.real()));
    append_raw(s.bytes, static_cast<float>(v.imag()));
  }
  push(std::move(s));
}

void Container::add(const std::string& name, const std::vector<std::int64_t>& values, Shape shape,
                    std::vector<std::string> axes) {
  require(values.size() == shape_elements(shape), ErrorCode::kShapeMismatch,
          "container: '" + name + "' value count does not match shape " + shape_to_string(shape));
  StoredTensor s = make(name, DType::kI64, std::move(shape), std::move(axes));
  for (std::int64_t v : values) append_raw(s.bytes, v);
  push(std::move(s));
}

bool Container::contains(const std::string& name) const {
  for (const auto& t : tensors_) {
    if (t.name == name) return true;
  }
  return false;
}

const StoredTensor& Container::get(const std::string& name) const {
  for (const auto& t : tensors_) {
    if (t.name == name) return t;
  }
  fail(ErrorCode::kInvalidArgument, "container: no tensor named '" + name + "'");
}

RTensor Container::real(const std::string& name, const Shape& expected) const {
  const StoredTensor& t = get(name);
  check_expected(t, expected);
  RTensor out(t.shape);
  const char* p = t.bytes.data();
  switch (t.dtype) {
    case DType::kF64:
      for (double& v : out.flat()) v = load_raw<double>(p), p += 8;
      break;
    case DType::kF32:
      for (double& v : out.flat()) v = load_raw<float>(p), p += 4;
      break;
    case DType::kI64:
      for (double& v : out.flat()) v = static_cast<double>(load_raw<std::int64_t>(p)), p += 8;
      break;
    case DType::kC64:
      fail(ErrorCode::kShapeMismatch, "container: '" + name + "' is complex, expected real");
  }
  return out;
}

CTensor Container::complex(const std::string& name, const Shape& expected) const {
  const StoredTensor& t = get(name);
  check_expected(t, expected);
  require(t.dtype == DType::kC64, ErrorCode::kShapeMismatch,
          "container: '" + name + "' is " + dtype_name(t.dtype) + ", expected c64");
  CTensor out(t.shape);
  const char* p = t.bytes.data();
  for (Complex& v : out.flat()) {
    v = {load_raw<float>(p), load_raw<float>(p + 4)};
    p += 8;
  }
  return out;
}

std::vector<std::int64_t> Container::ints(const std::string& name) const {
  const StoredTensor& t = get(name);
  require(t.dtype == DType::kI64, ErrorCode::kShapeMismatch,
          "container: '" + name + "' is " + dtype_name(t.dtype) + ", expected i64");
  std::vector<std::int64_t> out(t.elements());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = load_raw<std::int64_t>(t.bytes.data() + 8 * i);
  return out;
}

std::string encode_container(const Container& c) {
  std::string body;
  std::size_t offset = 0;
  for (const auto& t : c.tensors()) {
    std::vector<std::string> dims;
    for (std::size_t d : t.shape) dims.push_back(std::to_string(d));
    body += "tensor name=" + t.name + " dtype=" + dtype_name(t.dtype) + " offset=" + std::to_string(offset) +
            " shape=" + join(dims, ',') + " axes=" + join(t.axes, ',') + "\n";
    offset += t.bytes.size();
  }
  body += "end\n";

  const std::string head = std::string(kMagic) + " " + std::to_string(kContainerVersion) + "\nbyte_order little\n";
  const std::size_t header_len = head.size() + std::string("payload_offset ").size() + kOffsetDigits + 1 + body.size();
  std::string digits = std::to_string(header_len);
  digits.insert(0, kOffsetDigits - digits.size(), '0');

  std::string out = head + "payload_offset " + digits + "\n" + body;
  out.reserve(out.size() + offset);
  for (const auto& t : c.tensors()) out += t.bytes;
  return out;
}

Container decode_container(std::string_view bytes) {
  std::size_t pos = 0;
  auto next_line = [&](const char* what) {
    const std::size_t nl = bytes.find('\n', pos);
    require(nl != std::string_view::npos, ErrorCode::kTruncated,
            std::string("container: manifest ends before ") + what);
    std::string_view line = bytes.substr(pos, nl - pos);
    pos = nl + 1;
    return line;
  };

  const std::string_view magic = next_line("the version line");
  const std::size_t sp = magic.find(' ');
  require(magic.substr(0, sp) == kMagic && sp != std::string_view::npos, ErrorCode::kParse,
          "container: not an mdslab container");
  const std::uint64_t version = parse_u64(magic.substr(sp + 1), "version");
  require(version == kContainerVersion, ErrorCode::kVersionMismatch,
          "container: version " + std::to_string(version) + " is not supported (expected " +
              std::to_string(kContainerVersion) + ")");
  require(next_line("the byte order") == "byte_order little", ErrorCode::kParse,
          "container: only little-endian payloads are supported");
  const std::string_view off_line = next_line("the payload offset");
  require(off_line.starts_with("payload_offset "), ErrorCode::kParse, "container: missing payload_offset");
  const std::uint64_t payload_offset = parse_u64(off_line.substr(15), "payload offset");

  std::vector<StoredTensor> entries;
  std::vector<std::uint64_t> offsets;
  while (true) {
    const std::string_view line = next_line("the end marker");
    if (line == "end") break;
    require(line.starts_with("tensor "), ErrorCode::kParse, "container: unexpected manifest line '" +
                                                                std::string(line) + "'");
    StoredTensor t;
    bool has_name = false, has_dtype = false, has_offset = false, has_shape = false;
    std::uint64_t offset = 0;
    for (const std::string& field : split(line.substr(7), ' ')) {
      const std::size_t eq = field.find('=');
      require(eq != std::string::npos, ErrorCode::kParse, "container: malformed field '" + field + "'");
      const std::string key = field.substr(0, eq), value = field.substr(eq + 1);
      if (key == "name") {
        t.name = value, has_name = true;
      } else if (key == "dtype") {
        t.dtype = parse_dtype(value), has_dtype = true;
      } else if (key == "offset") {
        offset = parse_u64(value, "offset"), has_offset = true;
      } else if (key == "shape") {
        for (const auto& d : split(value, ',')) t.shape.push_back(parse_u64(d, "dimension"));
        has_shape = true;
      } else if (key == "axes") {
        t.axes = split(value, ',');
      } else {
        fail(ErrorCode::kParse, "container: unknown field '" + key + "'");
      }
    }
    require(has_name && has_dtype && has_offset && has_shape, ErrorCode::kParse,
            "container: incomplete tensor line '" + std::string(line) + "'");
    check_axes(t.axes, t.shape);
    entries.push_back(std::move(t));
    offsets.push_back(offset);
  }
  require(pos == payload_offset, ErrorCode::kParse, "container: payload_offset does not follow the manifest");

  std::uint64_t expected = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    require(offsets[i] == expected, ErrorCode::kShapeMismatch,
            "container: tensor '" + entries[i].name + "' offset disagrees with preceding shapes");
    expected += entries[i].elements() * dtype_size(entries[i].dtype);
  }
  const std::uint64_t actual = bytes.size() - payload_offset;
  require(actual == expected, ErrorCode::kSizeMismatch,
          "container: payload is " + std::to_string(actual) + " bytes, manifest declares " +
              std::to_string(expected));

  Container c;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::size_t n = entries[i].elements() * dtype_size(entries[i].dtype);
    entries[i].bytes.assign(bytes.substr(payload_offset + offsets[i], n));
    c.push(std::move(entries[i]));
  }
  return c;
}

void write_container(const std::string& path, const Container& c) { write_file_atomic(path, encode_container(c)); }

Container read_container(const std::string& path) {
  try {
    return decode_container(read_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIo) throw;
    fail(e.code(), "'" + path + "': " + e.what());
  }
}

void write_tensor(const std::string& path, const RTensor& t, std::vector<std::string> axes) {
  Container c;
  c.add("data", t, std::move(axes));
  write_container(path, c);
}

void write_tensor(const std::string& path, const CTensor& t, std::vector<std::string> axes) {
  Container c;
  c.add("data", t, std::move(axes));
  write_container(path, c);
}

RTensor read_real_tensor(const std::string& path) { return read_container(path).real("data"); }

CTensor read_complex_tensor(const std::string& path) { return read_container(path).complex("data"); }

}  // namespace mdslab
