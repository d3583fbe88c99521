#include "fedalign/embedding_store.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "fedalign/error.hpp"

namespace fedalign {
namespace {

constexpr std::array<char, 4> kMagic{'F', 'E', 'D', 'M'};

class ByteWriter {
 public:
  explicit ByteWriter(std::vector<std::byte>& out) : out_(out) {}

  template <typename T>
  void put_le(T value) {
    using U = std::make_unsigned_t<T>;
    auto u = static_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      out_.push_back(static_cast<std::byte>(u & 0xFFu));
      u = static_cast<U>(u >> 8);
    }
  }

  void put_f32(float f) { put_le(std::bit_cast<std::uint32_t>(f)); }

  void put_string16(const std::string& s) {
    if (s.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw Error(Errc::invalid_argument, "string longer than 65535 bytes");
    }
    put_le(static_cast<std::uint16_t>(s.size()));
    const auto* p = reinterpret_cast<const std::byte*>(s.data());
    out_.insert(out_.end(), p, p + s.size());
  }

 private:
  std::vector<std::byte>& out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::byte> in) : in_(in) {}

  void need(std::size_t n, const char* what) const {
    if (in_.size() - pos_ < n) {
      throw Error(Errc::truncated_file, std::string("unexpected end of file reading ") + what +
                                            " at offset " + std::to_string(pos_));
    }
  }

  template <typename T>
  T get_le(const char* what) {
    need(sizeof(T), what);
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= std::to_integer<std::uint64_t>(in_[pos_ + i]) << (8 * i);
    }
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }

  std::string get_string16(const char* what) {
    const auto len = get_le<std::uint16_t>(what);
    need(len, what);
    std::string s(reinterpret_cast<const char*>(in_.data() + pos_), len);
    pos_ += len;
    return s;
  }

  void get_f32s(float* dst, std::size_t n) {
    need(n * 4, "vector payload");
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t bits = 0;
      for (std::size_t b = 0; b < 4; ++b) {
        bits |= std::to_integer<std::uint32_t>(in_[pos_ + b]) << (8 * b);
      }
      dst[i] = std::bit_cast<float>(bits);
      pos_ += 4;
    }
  }

  std::size_t remaining() const noexcept { return in_.size() - pos_; }
  std::size_t offset() const noexcept { return pos_; }

 private:
  std::span<const std::byte> in_;
  std::size_t pos_ = 0;
};

}  // namespace

EmbeddingStore::EmbeddingStore(std::uint32_t dim, std::string encoder_id)
    : dim_(dim), encoder_id_(std::move(encoder_id)) {
  if (dim_ == 0) throw Error(Errc::invalid_argument, "store dim must be positive");
}

void EmbeddingStore::add(const std::string& record_id, std::span<const float> values) {
  if (values.size() != dim_) {
    throw Error(Errc::dimension_mismatch, "record '" + record_id + "' has " +
                                              std::to_string(values.size()) +
                                              " values, store dim is " + std::to_string(dim_));
  }
  if (!index_.emplace(record_id, ids_.size()).second) {
    throw Error(Errc::duplicate_record_id, "record '" + record_id + "' already stored");
  }
  ids_.push_back(record_id);
  data_.insert(data_.end(), values.begin(), values.end());
}

void EmbeddingStore::add(const std::string& record_id, std::span<const double> values) {
  std::vector<float> narrowed(values.begin(), values.end());
  add(record_id, std::span<const float>(narrowed));
}

std::optional<std::span<const float>> EmbeddingStore::find(const std::string& record_id) const {
  const auto it = index_.find(record_id);
  if (it == index_.end()) return std::nullopt;
  return row(it->second);
}

std::uint64_t EmbeddingStore::file_size() const noexcept {
  std::uint64_t n = 4 + 4 + 4 + 8 + 2 + encoder_id_.size();
  for (const auto& id : ids_) n += 2 + id.size();
  return n + static_cast<std::uint64_t>(data_.size()) * 4;
}

bool operator==(const EmbeddingStore& a, const EmbeddingStore& b) {
  if (a.dim_ != b.dim_ || a.encoder_id_ != b.encoder_id_ || a.ids_ != b.ids_ ||
      a.data_.size() != b.data_.size()) {
    return false;
  }
  return a.data_.empty() ||
         std::memcmp(a.data_.data(), b.data_.data(), a.data_.size() * sizeof(float)) == 0;
}

std::vector<std::byte> encode_store(const EmbeddingStore& store) {
  std::vector<std::byte> out;
  out.reserve(static_cast<std::size_t>(store.file_size()));
  ByteWriter w(out);
  for (const char c : kMagic) out.push_back(static_cast<std::byte>(c));
  w.put_le(EmbeddingStore::kVersion);
  w.put_le(store.dim());
  w.put_le(static_cast<std::uint64_t>(store.size()));
  w.put_string16(store.encoder_id());
  for (std::size_t i = 0; i < store.size(); ++i) {
    w.put_string16(store.record_ids()[i]);
    for (const float f : store.row(i)) w.put_f32(f);
  }
  return out;
}

EmbeddingStore decode_store(std::span<const std::byte> bytes) {
  ByteReader r(bytes);
  if (bytes.size() < kMagic.size() ||
      std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
    throw Error(Errc::bad_magic, "not a FEDEMB file (expected magic \"FEDM\")");
  }
  r.need(4, "magic");
  (void)r.get_le<std::uint32_t>("magic");
  const auto version = r.get_le<std::uint32_t>("version");
  if (version != EmbeddingStore::kVersion) {
    throw Error(Errc::version_unsupported, "FEDEMB version " + std::to_string(version));
  }
  const auto dim = r.get_le<std::uint32_t>("dim");
  const auto count = r.get_le<std::uint64_t>("count");
  auto encoder_id = r.get_string16("encoder_id");
  if (dim == 0) throw Error(Errc::truncated_file, "FEDEMB header declares dim 0");
  // Each entry needs at least 2 + 4*dim bytes; reject impossible counts early.
  const std::uint64_t min_entry = 2 + 4ULL * dim;
  if (count > r.remaining() / min_entry) {
    throw Error(Errc::truncated_file, "FEDEMB header declares " + std::to_string(count) +
                                          " records but the file is too short");
  }
  EmbeddingStore store(dim, std::move(encoder_id));
  std::vector<float> buf(dim);
  for (std::uint64_t i = 0; i < count; ++i) {
    auto id = r.get_string16("record_id");
    r.get_f32s(buf.data(), dim);
    store.add(id, std::span<const float>(buf));
  }
  if (r.remaining() != 0) {
    throw Error(Errc::truncated_file, std::to_string(r.remaining()) +
                                          " trailing bytes after the last record");
  }
  return store;
}

EmbeddingStore read_store(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::missing_file, "cannot open store '" + path.string() + "'");
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_store(std::as_bytes(std::span(raw)));
}

void write_store(const std::filesystem::path& path, const EmbeddingStore& store) {
  const auto bytes = encode_store(store);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io_error, "cannot write '" + tmp.string() + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(Errc::io_error, "failed writing '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace fedalign
