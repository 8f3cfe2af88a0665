#include "cliffkern/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace cliffkern {

namespace {

constexpr char kMagic[4] = {'C', 'L', 'F', 'T'};
constexpr std::uint32_t kMaxRank = 16;

template <class T>
void put_le(std::string& out, T value) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  U bits = std::bit_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    out.push_back(static_cast<char>(bits & 0xffu));
    bits >>= 8;
  }
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <class T>
  T get() {
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    if (bytes_.size() - pos_ < sizeof(U)) throw Error(Errc::IoError, "tensor file truncated");
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      bits |= static_cast<U>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(U);
    return std::bit_cast<T>(bits);
  }

  void expect_magic() {
    if (bytes_.size() < 4 || std::memcmp(bytes_.data(), kMagic, 4) != 0) {
      throw Error(Errc::IoError, "not a tensor file (bad magic)");
    }
    pos_ = 4;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_tensor(const TensorFile& t) {
  if (t.data.size() != shape_volume(t.shape)) {
    throw Error(Errc::ShapeMismatch, "payload size does not match shape " + shape_to_string(t.shape));
  }
  std::string out(kMagic, 4);
  put_le(out, kTensorFileVersion);
  put_le(out, static_cast<std::uint32_t>(t.tag));
  put_le(out, t.k);
  put_le(out, static_cast<std::uint32_t>(t.shape.size()));
  for (std::size_t s : t.shape) put_le(out, static_cast<std::uint64_t>(s));
  out.reserve(out.size() + 4 * t.data.size());
  for (float v : t.data) put_le(out, v);
  return out;
}

TensorFile decode_tensor(const std::string& bytes) {
  Reader r(bytes);
  r.expect_magic();
  const auto version = r.get<std::uint32_t>();
  if (version != kTensorFileVersion) {
    throw Error(Errc::IoError, "unsupported tensor file version " + std::to_string(version));
  }
  TensorFile t;
  t.tag = static_cast<LayoutTag>(r.get<std::uint32_t>());
  t.k = r.get<std::uint32_t>();
  const auto rank = r.get<std::uint32_t>();
  if (rank > kMaxRank) throw Error(Errc::IoError, "implausible tensor rank " + std::to_string(rank));
  for (std::uint32_t i = 0; i < rank; ++i) t.shape.push_back(static_cast<std::size_t>(r.get<std::uint64_t>()));
  const std::size_t n = shape_volume(t.shape);
  if (r.remaining() != 4 * n) {
    throw Error(Errc::IoError, "payload holds " + std::to_string(r.remaining()) + " bytes, expected " +
                                   std::to_string(4 * n));
  }
  t.data.resize(n);
  for (std::size_t i = 0; i < n; ++i) t.data[i] = r.get<float>();
  return t;
}

void write_tensor_file(const std::filesystem::path& path, const TensorFile& t) {
  const std::string bytes = encode_tensor(t);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(Errc::IoError, "cannot open " + path.string() + " for writing");
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw Error(Errc::IoError, "write failed for " + path.string());
}

TensorFile read_tensor_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(Errc::IoError, "cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return decode_tensor(bytes);
}

}  // namespace cliffkern
