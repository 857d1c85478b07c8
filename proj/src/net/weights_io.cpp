#include "sntl/net/weights_io.hpp"

#include "sntl/error.hpp"

#include <boost/crc.hpp>

#include <bit>
#include <fstream>
#include <iterator>

namespace sntl {
namespace {

constexpr std::uint8_t kMagic[4] = {'S', 'N', 'T', 'L'};

template <typename T>
void put(std::vector<std::uint8_t>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double value) { put(out, std::bit_cast<std::uint64_t>(value)); }

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    if (remaining() < sizeof(T)) throw FormatError("weights: file is truncated");
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(static_cast<T>(bytes_[at_ + i]) << (8 * i));
    at_ += sizeof(T);
    return value;
  }
  double get_f64() { return std::bit_cast<double>(get<std::uint64_t>()); }
  std::size_t remaining() const { return bytes_.size() - at_; }
  std::size_t position() const { return at_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t at_ = 0;
};

}  // namespace

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
  boost::crc_32_type crc;
  crc.process_bytes(bytes.data(), bytes.size());
  return crc.checksum();
}

std::vector<std::uint8_t> encode_weights(const NetworkParams& params) {
  if (params.layers.empty() || params.layers.size() > UINT16_MAX) {
    throw FormatError("weights: network must have between 1 and 65535 layers");
  }
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  put<std::uint16_t>(out, kWeightFormatVersion);
  put<std::uint16_t>(out, static_cast<std::uint16_t>(params.layers.size()));
  for (const auto& layer : params.layers) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(layer.weight.rows()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(layer.weight.cols()));
    for (Eigen::Index i = 0; i < layer.weight.rows(); ++i)
      for (Eigen::Index j = 0; j < layer.weight.cols(); ++j) put_f64(out, layer.weight(i, j));
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) put_f64(out, layer.bias[i]);
  }
  put<std::uint32_t>(out, crc32(std::span(out).subspan(sizeof(kMagic))));
  return out;
}

NetworkParams decode_weights(std::span<const std::uint8_t> bytes, const std::optional<Architecture>& expected) {
  if (bytes.size() < sizeof(kMagic) || !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    throw FormatError("weights: bad magic");
  }
  Reader reader(bytes.subspan(sizeof(kMagic)));
  const auto version = reader.get<std::uint16_t>();
  if (version != kWeightFormatVersion) {
    throw FormatError("weights: unsupported format version " + std::to_string(version));
  }
  const auto layer_count = reader.get<std::uint16_t>();
  if (layer_count == 0) throw FormatError("weights: no layers");

  NetworkParams params;
  for (std::uint16_t k = 0; k < layer_count; ++k) {
    const auto out_dim = reader.get<std::uint32_t>();
    const auto in_dim = reader.get<std::uint32_t>();
    if (out_dim == 0 || in_dim == 0) throw FormatError("weights: zero-sized layer");
    if (!params.layers.empty() && params.layers.back().weight.rows() != static_cast<Eigen::Index>(in_dim)) {
      throw FormatError("weights: layer " + std::to_string(k) + " does not chain with its predecessor");
    }
    const std::uint64_t values = (static_cast<std::uint64_t>(out_dim) * in_dim + out_dim) * sizeof(double);
    if (reader.remaining() < values) throw FormatError("weights: file is truncated");
    LayerParams layer{Eigen::MatrixXd(out_dim, in_dim), Eigen::VectorXd(out_dim)};
    for (Eigen::Index i = 0; i < layer.weight.rows(); ++i)
      for (Eigen::Index j = 0; j < layer.weight.cols(); ++j) layer.weight(i, j) = reader.get_f64();
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias[i] = reader.get_f64();
    params.layers.push_back(std::move(layer));
  }
  const std::size_t payload_size = reader.position();
  const auto stored_crc = reader.get<std::uint32_t>();
  if (reader.remaining() != 0) throw FormatError("weights: trailing bytes after checksum");
  if (stored_crc != crc32(bytes.subspan(sizeof(kMagic), payload_size))) {
    throw FormatError("weights: checksum mismatch");
  }
  if (params.layers.back().weight.rows() != 1) throw FormatError("weights: output layer must be scalar");
  if (expected && params.architecture() != *expected) {
    throw ArchitectureMismatch("weights: file holds architecture " + params.architecture().describe() +
                               ", expected " + expected->describe());
  }
  return params;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_atomically(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

void save_weights(const NetworkParams& params, const std::filesystem::path& path) {
  write_file_atomically(path, encode_weights(params));
}

NetworkParams load_weights(const std::filesystem::path& path, const std::optional<Architecture>& expected) {
  return decode_weights(read_file_bytes(path), expected);
}

}  // namespace sntl
