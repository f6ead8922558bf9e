// Copyright (c) 2026 The ECF8 Authors.
// SPDX-License-Identifier: Apache-2.0

#include "ecf8/container.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <ostream>

#include "json.hpp"

namespace ecf8 {

namespace {

constexpr char kRawMagic[4] = {'F', 'P', '8', 'R'};
constexpr char kContainerMagic[4] = {'E', 'C', 'F', '8'};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> buf) : buf_(buf) {}

  std::uint8_t u8() {
    need(1);
    return buf_[pos_++];
  }
  std::uint16_t u16() { return static_cast<std::uint16_t>(le(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::uint64_t u64() { return le(8); }

  std::span<const std::uint8_t> bytes(std::uint64_t n) {
    need(n);
    auto s = buf_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  void expect_done() const {
    if (pos_ != buf_.size()) throw FormatError("trailing bytes after last tensor");
  }

 private:
  void need(std::uint64_t n) const {
    if (buf_.size() - pos_ < n) throw FormatError("truncated file");
  }
  std::uint64_t le(unsigned width) {
    need(width);
    std::uint64_t v = 0;
    for (unsigned i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(buf_[pos_ + i]) << (8 * i);
    pos_ += width;
    return v;
  }

  std::span<const std::uint8_t> buf_;
  std::size_t pos_ = 0;
};

class ByteWriter {
 public:
  void u8(std::uint8_t v) { out.push_back(v); }
  void u16(std::uint16_t v) { le(v, 2); }
  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void bytes(std::span<const std::uint8_t> b) { out.insert(out.end(), b.begin(), b.end()); }

  std::vector<std::uint8_t> out;

 private:
  void le(std::uint64_t v, unsigned width) {
    for (unsigned i = 0; i < width; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
};

void write_shape(ByteWriter& w, const TensorShape& shape) {
  if (shape.name.size() > 0xffff) throw std::invalid_argument("tensor name too long");
  if (shape.dims.size() > 0xff) throw std::invalid_argument("tensor rank too large");
  w.u16(static_cast<std::uint16_t>(shape.name.size()));
  w.bytes({reinterpret_cast<const std::uint8_t*>(shape.name.data()), shape.name.size()});
  w.u8(static_cast<std::uint8_t>(shape.dims.size()));
  for (auto d : shape.dims) w.u64(d);
}

TensorShape read_shape(ByteReader& r) {
  TensorShape shape;
  const std::uint16_t name_len = r.u16();
  const auto name = r.bytes(name_len);
  shape.name.assign(reinterpret_cast<const char*>(name.data()), name.size());
  const std::uint8_t rank = r.u8();
  shape.dims.resize(rank);
  for (auto& d : shape.dims) d = r.u64();
  return shape;
}

// LE helpers for the streaming write path.
void os_u16(std::ostream& out, std::uint16_t v) {
  const char b[2] = {static_cast<char>(v), static_cast<char>(v >> 8)};
  out.write(b, 2);
}
void os_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>(v >> (8 * i));
  out.write(b, 4);
}
void os_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>(v >> (8 * i));
  out.write(b, 8);
}

bool is_valid_thread_count(std::uint32_t t) {
  return t >= 1 && t <= 1024 && (t & (t - 1)) == 0;
}

}  // namespace

std::uint64_t TensorShape::element_count() const {
  std::uint64_t n = 1;
  for (auto d : dims) {
    if (d != 0 && n > UINT64_MAX / d) throw FormatError("dimension product overflow");
    n *= d;
  }
  return n;
}

std::vector<std::uint8_t> serialize(const RawTensorFile& f) {
  ByteWriter w;
  w.bytes({reinterpret_cast<const std::uint8_t*>(kRawMagic), 4});
  w.u32(kFormatVersion);
  w.u32(static_cast<std::uint32_t>(f.tensors.size()));
  for (const auto& t : f.tensors) {
    if (t.shape.element_count() != t.data.size())
      throw std::invalid_argument("tensor data does not match its dims");
    write_shape(w, t.shape);
    w.bytes(t.data);
  }
  return std::move(w.out);
}

std::vector<std::uint8_t> serialize(const Ecf8File& f) {
  ByteWriter w;
  w.bytes({reinterpret_cast<const std::uint8_t*>(kContainerMagic), 4});
  w.u32(kFormatVersion);
  w.u32(static_cast<std::uint32_t>(f.tensors.size()));
  for (const auto& t : f.tensors) {
    const EncodedStream& s = t.tensor.stream;
    write_shape(w, t.shape);
    w.u64(s.n_elem);
    w.u32(s.geometry.threads_per_block);
    w.bytes({s.lengths.data(), s.lengths.size()});
    w.u64(s.encoded.size());
    w.bytes(s.encoded);
    w.u64(s.gaps.size());
    w.bytes(s.gaps);
    for (auto o : s.outpos) w.u64(o);
    w.u64(t.tensor.packed.size());
    w.bytes(t.tensor.packed);
  }
  return std::move(w.out);
}

RawTensorFile parse_raw(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (std::memcmp(r.bytes(4).data(), kRawMagic, 4) != 0) throw FormatError("bad magic");
  if (r.u32() != kFormatVersion) throw FormatError("unsupported version");
  const std::uint32_t count = r.u32();
  RawTensorFile f;
  for (std::uint32_t i = 0; i < count; ++i) {
    RawTensor t;
    t.shape = read_shape(r);
    const std::uint64_t n = t.shape.element_count();
    const auto data = r.bytes(n);
    t.data.assign(data.begin(), data.end());
    f.tensors.push_back(std::move(t));
  }
  r.expect_done();
  return f;
}

Ecf8File parse_container(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (std::memcmp(r.bytes(4).data(), kContainerMagic, 4) != 0) throw FormatError("bad magic");
  if (r.u32() != kFormatVersion) throw FormatError("unsupported version");
  const std::uint32_t count = r.u32();
  Ecf8File f;
  for (std::uint32_t i = 0; i < count; ++i) {
    CompressedTensor t;
    t.shape = read_shape(r);
    EncodedStream& s = t.tensor.stream;
    s.n_elem = r.u64();
    if (s.n_elem != t.shape.element_count())
      throw FormatError("element count does not match dims");

    const std::uint32_t T = r.u32();
    if (!is_valid_thread_count(T)) throw FormatError("invalid thread count");

    const auto lengths = r.bytes(s.lengths.size());
    std::copy(lengths.begin(), lengths.end(), s.lengths.begin());
    std::uint64_t kraft = 0;
    bool any_len = false;
    for (auto l : s.lengths) {
      if (l > kMaxCodeLength) throw FormatError("invalid length vector in container");
      if (l > 0) {
        kraft += 1ull << (kMaxCodeLength - l);
        any_len = true;
      }
    }
    if (kraft > (1ull << kMaxCodeLength) || (s.n_elem > 0 && !any_len))
      throw FormatError("invalid length vector in container");

    const std::uint64_t encoded_len = r.u64();
    const std::uint64_t block_bytes = static_cast<std::uint64_t>(T) * BlockGeometry::kBytesPerThread;
    if (encoded_len < BlockGeometry::kLookaheadBytes ||
        (encoded_len - BlockGeometry::kLookaheadBytes) % block_bytes != 0)
      throw FormatError("encoded section length mismatch");
    s.geometry.threads_per_block = T;
    s.geometry.n_blocks = (encoded_len - BlockGeometry::kLookaheadBytes) / block_bytes;
    if (s.n_elem > 0 && s.geometry.n_blocks == 0)
      throw FormatError("encoded section length mismatch");
    const auto encoded = r.bytes(encoded_len);
    s.encoded.assign(encoded.begin(), encoded.end());

    const std::uint64_t gaps_len = r.u64();
    if (gaps_len != (s.geometry.thread_count() + 1) / 2)
      throw FormatError("gap section length mismatch");
    const auto gaps = r.bytes(gaps_len);
    s.gaps.assign(gaps.begin(), gaps.end());

    s.outpos.resize(s.geometry.n_blocks + 1);
    for (auto& o : s.outpos) o = r.u64();
    if (s.outpos.front() != 0 || s.outpos.back() != s.n_elem)
      throw FormatError("block offsets do not cover the tensor");
    const std::uint64_t max_block = static_cast<std::uint64_t>(T) * BlockGeometry::kMaxSymbolsPerWindow;
    for (std::size_t b = 0; b + 1 < s.outpos.size(); ++b) {
      if (s.outpos[b + 1] < s.outpos[b] || s.outpos[b + 1] - s.outpos[b] > max_block)
        throw FormatError("block offsets out of range");
    }

    const std::uint64_t packed_len = r.u64();
    if (packed_len != (s.n_elem + 1) / 2) throw FormatError("packed section length mismatch");
    const auto packed = r.bytes(packed_len);
    t.tensor.packed.assign(packed.begin(), packed.end());

    f.tensors.push_back(std::move(t));
  }
  r.expect_done();
  return f;
}

std::uint64_t tensor_section_bytes(const CompressedTensor& t) {
  const EncodedStream& s = t.tensor.stream;
  return 2 + t.shape.name.size() + 1 + 8ull * t.shape.dims.size()  // shape
         + 8 + 4 + 16                                              // n_elem, T, lengths
         + 8 + s.encoded.size() + 8 + s.gaps.size()                // bitstream, gaps
         + 8ull * s.outpos.size() + 8 + t.tensor.packed.size();    // offsets, nibbles
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  in.seekg(0, std::ios::end);
  const std::streamoff size = in.tellg();
  if (size < 0) throw IoError("cannot determine size of " + path);
  std::vector<std::uint8_t> buf(static_cast<std::size_t>(size));
  in.seekg(0);
  in.read(reinterpret_cast<char*>(buf.data()), size);
  if (!in) throw IoError("short read from " + path);
  return buf;
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to " + path);
}

RawTensorFile load_raw_file(const std::string& path) {
  const auto bytes = read_file(path);
  return parse_raw(bytes);
}

Ecf8File load_container_file(const std::string& path) {
  const auto bytes = read_file(path);
  return parse_container(bytes);
}

Ecf8File compress_tensors(const RawTensorFile& raw, std::uint32_t threads_per_block) {
  make_geometry(0, threads_per_block);  // reject bad T before fanning out

  Ecf8File out;
  out.tensors.resize(raw.tensors.size());
  std::exception_ptr err;
  const long long n = static_cast<long long>(raw.tensors.size());
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < n; ++i) {
    try {
      const RawTensor& rt = raw.tensors[i];
      if (rt.shape.element_count() != rt.data.size())
        throw std::invalid_argument("tensor data does not match its dims");
      CompressedTensor ct;
      ct.shape = rt.shape;
      if (rt.data.empty()) {
        ct.tensor.stream.geometry = make_geometry(0, threads_per_block);
        ct.tensor.stream.encoded.assign(BlockGeometry::kLookaheadBytes, 0);
        ct.tensor.stream.outpos.assign(1, 0);
      } else {
        const auto h = ExponentHistogram::of_bytes(rt.data);
        ct.tensor = encode_tensor(rt.data, build_code(h), threads_per_block);
      }
      out.tensors[i] = std::move(ct);
    } catch (...) {
#pragma omp critical
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return out;
}

DecompressStats decompress_streaming(const Ecf8File& in, std::ostream& out) {
  ReusableBuffer buf;
  std::uint64_t max_elems = 0;
  for (const auto& t : in.tensors)
    max_elems = std::max(max_elems, t.tensor.stream.n_elem);
  if (max_elems > 0) buf.acquire(max_elems);

  out.write(kRawMagic, 4);
  os_u32(out, kFormatVersion);
  os_u32(out, static_cast<std::uint32_t>(in.tensors.size()));
  for (const auto& t : in.tensors) {
    const std::uint64_t n = t.tensor.stream.n_elem;
    auto dst = buf.acquire(n);
    if (n > 0) {
      const CascadedLut lut = build_lut(canonical_codes(t.tensor.stream.lengths));
      decode_parallel_into(t.tensor, lut, dst);
    }
    if (t.shape.name.size() > 0xffff) throw std::invalid_argument("tensor name too long");
    if (t.shape.dims.size() > 0xff) throw std::invalid_argument("tensor rank too large");
    os_u16(out, static_cast<std::uint16_t>(t.shape.name.size()));
    out.write(t.shape.name.data(), static_cast<std::streamsize>(t.shape.name.size()));
    out.put(static_cast<char>(t.shape.dims.size()));
    for (auto d : t.shape.dims) os_u64(out, d);
    if (n > 0)
      out.write(reinterpret_cast<const char*>(dst.data()), static_cast<std::streamsize>(n));
  }
  if (!out) throw IoError("write failed");
  return {buf.allocations(), buf.capacity_bytes()};
}

VerifyReport verify_tensors(const RawTensorFile& raw,
                            std::span<const std::uint32_t> thread_counts) {
  VerifyReport rep;
  for (const auto& rt : raw.tensors) {
    for (const std::uint32_t T : thread_counts) {
      CodeTable table;
      if (!rt.data.empty()) table = build_code(ExponentHistogram::of_bytes(rt.data));
      const EncodedTensor enc = encode_tensor(rt.data, table, T);
      const CascadedLut lut =
          rt.data.empty() ? CascadedLut{} : build_lut(table);

      const auto check = [&](const std::vector<Fp8Byte>& got, const char* decoder) {
        ++rep.checks;
        if (got.size() != rt.data.size()) {
          rep.issues.push_back({rt.shape.name, T, decoder,
                                std::min(got.size(), rt.data.size())});
          return;
        }
        const auto [a, b] = std::mismatch(rt.data.begin(), rt.data.end(), got.begin());
        if (a != rt.data.end())
          rep.issues.push_back({rt.shape.name, T, decoder,
                                static_cast<std::uint64_t>(a - rt.data.begin())});
      };
      check(rt.data.empty() ? std::vector<Fp8Byte>{} : decode_reference(enc, lut),
            "sequential");
      check(rt.data.empty() ? std::vector<Fp8Byte>{} : decode_parallel(enc, lut),
            "parallel");
    }
  }
  return rep;
}

std::vector<EntropyReport> make_stats(const RawTensorFile& raw,
                                      std::uint32_t threads_per_block) {
  const EntropyBounds gauss = entropy_bounds(2.0);
  std::vector<EntropyReport> reports;
  reports.reserve(raw.tensors.size());
  for (const auto& rt : raw.tensors) {
    EntropyReport r;
    r.name = rt.shape.name;
    r.n_elem = rt.data.size();
    r.bound_lower = gauss.lower;
    r.bound_upper = gauss.upper;
    if (!rt.data.empty()) {
      const auto h = ExponentHistogram::of_bytes(rt.data);
      r.entropy_bits = shannon_entropy(h);
      const CodeTable table = build_code(h);
      r.bits_per_symbol = expected_length(table, h);
      r.bits_per_weight = 1.0 + 3.0 + r.bits_per_symbol;
      r.projected_savings = (4.0 - r.bits_per_symbol) / 8.0;
      CompressedTensor ct;
      ct.shape = rt.shape;
      ct.tensor = encode_tensor(rt.data, table, threads_per_block);
      r.actual_savings =
          1.0 - static_cast<double>(tensor_section_bytes(ct)) / static_cast<double>(r.n_elem);
    }
    reports.push_back(std::move(r));
  }
  return reports;
}

namespace {

// Minimal CSV quoting: only names need it, the rest is numeric.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  q += '"';
  return q;
}

}  // namespace

void stats_to_csv(std::span<const EntropyReport> reports, std::ostream& out) {
  out << "name,n_elem,entropy_bits,bits_per_symbol,projected_savings,actual_savings\n";
  for (const auto& r : reports) {
    out << csv_field(r.name) << ',' << r.n_elem << ',' << r.entropy_bits << ','
        << r.bits_per_symbol << ',' << r.projected_savings << ',' << r.actual_savings
        << '\n';
  }
}

void stats_to_json(std::span<const EntropyReport> reports, std::ostream& out) {
  nlohmann::json tensors = nlohmann::json::array();
  for (const auto& r : reports) {
    tensors.push_back({{"name", r.name},
                       {"n_elem", r.n_elem},
                       {"entropy_bits", r.entropy_bits},
                       {"bits_per_symbol", r.bits_per_symbol},
                       {"bits_per_weight", r.bits_per_weight},
                       {"bound_lower", r.bound_lower},
                       {"bound_upper", r.bound_upper},
                       {"projected_savings", r.projected_savings},
                       {"actual_savings", r.actual_savings}});
  }
  const nlohmann::json doc = {{"floor_bits_per_weight", compression_floor_bits()},
                              {"tensors", tensors}};
  out << doc.dump(2) << '\n';
}

Fp8Byte e4m3_from_double(double v) {
  if (std::isnan(v)) return 0x00;
  const Fp8Byte sign = std::signbit(v) ? 0x80 : 0x00;
  const double mag = std::fabs(v);
  if (mag == 0.0) return sign;
  if (mag >= 448.0) return sign | 0x7e;  // saturate, infinities included

  int e = std::ilogb(mag);
  if (e < -6) {
    // Subnormal grid: multiples of 2^-9. nearbyint rounds to nearest even
    // in the default mode, matching the normal-path rounding.
    const auto q = static_cast<std::uint32_t>(std::nearbyint(std::scalbn(mag, 9)));
    if (q == 0) return sign;  // underflow keeps the sign
    if (q <= 7) return sign | static_cast<Fp8Byte>(q);
    return sign | 0x08;  // rounded up to the smallest normal
  }
  auto q = static_cast<std::uint32_t>(std::nearbyint(std::scalbn(mag, 3 - e)));  // [8, 16]
  if (q == 16) {
    q = 8;
    ++e;
  }
  return sign | static_cast<Fp8Byte>(((e + 7) << 3) | (q - 8));
}

RawTensorFile synth_raw(double alpha, double gamma, std::uint64_t n, std::uint64_t seed) {
  const auto xs = sample_stable(alpha, gamma, n, seed);
  RawTensor t;
  char name[96];
  std::snprintf(name, sizeof name, "stable_a%g_g%g_s%llu", alpha, gamma,
                static_cast<unsigned long long>(seed));
  t.shape.name = name;
  t.shape.dims = {n};
  t.data.resize(n);
  for (std::uint64_t i = 0; i < n; ++i) t.data[i] = e4m3_from_double(xs[i]);
  RawTensorFile f;
  f.tensors.push_back(std::move(t));
  return f;
}

}  // namespace ecf8
