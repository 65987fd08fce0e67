#include "nilm/bundle.hpp"

#include <bit>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

namespace nilm {

std::string_view to_string(BundleErrorKind kind) {
  switch (kind) {
    case BundleErrorKind::bad_magic: return "bad magic";
    case BundleErrorKind::bad_version: return "bad version";
    case BundleErrorKind::unexpected_end: return "unexpected end";
    case BundleErrorKind::malformed: return "malformed";
    case BundleErrorKind::io: return "io";
  }
  return "unknown";
}

namespace {

constexpr char kMagic[4] = {'N', 'I', 'L', 'M'};
// Upper bound on any single hyperparameter or dimension read from a file.
constexpr std::uint32_t kMaxDim = 1u << 16;

class Writer {
 public:
  template <typename T>
  void uint(T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void i64(std::int64_t v) { uint(static_cast<std::uint64_t>(v)); }
  void f64(double v) { uint(std::bit_cast<std::uint64_t>(v)); }
  void f32(float v) { uint(std::bit_cast<std::uint32_t>(v)); }
  void str(std::string_view s) {
    if (s.size() > std::numeric_limits<std::uint16_t>::max())
      throw BundleError(BundleErrorKind::malformed, "string too long");
    uint(static_cast<std::uint16_t>(s.size()));
    out_.insert(out_.end(), s.begin(), s.end());
  }
  void bytes(std::span<const char> b) { out_.insert(out_.end(), b.begin(), b.end()); }

  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  template <typename T>
  T uint() {
    need(sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(static_cast<T>(in_[pos_ + i]) << (8 * i));
    pos_ += sizeof(T);
    return v;
  }
  std::int64_t i64() { return static_cast<std::int64_t>(uint<std::uint64_t>()); }
  double f64() { return std::bit_cast<double>(uint<std::uint64_t>()); }
  float f32() { return std::bit_cast<float>(uint<std::uint32_t>()); }
  std::string str() {
    const auto n = uint<std::uint16_t>();
    need(n);
    std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::uint32_t dim(const char* what) {
    const auto v = uint<std::uint32_t>();
    if (v > kMaxDim) throw BundleError(BundleErrorKind::malformed, std::string(what) + " out of range");
    return v;
  }
  bool done() const { return pos_ == in_.size(); }
  std::size_t remaining() const { return in_.size() - pos_; }
  std::size_t position() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n)
      throw BundleError(BundleErrorKind::unexpected_end, "need " + std::to_string(n) + " bytes at offset " +
                                                             std::to_string(pos_) + ", file has " +
                                                             std::to_string(in_.size()));
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

// Weights a layer would allocate, used to reject absurd sizes before allocating.
std::uint64_t implied_weights(std::uint8_t kind, const std::vector<std::uint32_t>& hp) {
  auto at = [&](std::size_t i) -> std::uint64_t { return i < hp.size() ? hp[i] : 0; };
  switch (static_cast<nn::LayerKind>(kind)) {
    case nn::LayerKind::conv1d: return at(1) * at(2) * at(0) + at(1);
    case nn::LayerKind::dense: return at(0) * at(1) + at(1);
    case nn::LayerKind::lstm: return 4 * at(1) * (at(0) + at(1) + 1);
    default: return 0;
  }
}

void write_network(Writer& w, const nn::Network<float>& net) {
  w.uint(static_cast<std::uint32_t>(net.input_shape().length));
  w.uint(static_cast<std::uint32_t>(net.input_shape().features));
  w.uint(static_cast<std::uint16_t>(net.size()));
  std::uint16_t tensors = 0;
  for (std::size_t i = 0; i < net.size(); ++i) {
    const auto& layer = net.layer(i);
    const auto hp = layer.hyperparameters();
    w.uint(static_cast<std::uint8_t>(layer.kind()));
    w.uint(static_cast<std::uint8_t>(hp.size()));
    for (auto v : hp) w.uint(v);
    tensors = static_cast<std::uint16_t>(tensors + layer.parameters().size());
  }
  w.uint(tensors);
  for (std::size_t i = 0; i < net.size(); ++i) {
    for (const auto& p : net.layer(i).parameters()) {
      w.str(std::to_string(i) + "." + p.name);
      w.uint(static_cast<std::uint8_t>(p.shape.size()));
      for (auto d : p.shape) w.uint(d);
      const auto& m = p.value;
      for (Index r = 0; r < m.rows(); ++r)
        for (Index c = 0; c < m.cols(); ++c) w.f32(m(r, c));
    }
  }
}

nn::Network<float> read_network(Reader& r) {
  const auto length = r.dim("input length");
  const auto features = r.dim("input features");
  const auto layers = r.uint<std::uint16_t>();
  nn::Network<float> net(nn::Shape{length, features});
  std::uint64_t weights = 0;
  try {
    for (std::uint16_t i = 0; i < layers; ++i) {
      const auto kind = r.uint<std::uint8_t>();
      const auto count = r.uint<std::uint8_t>();
      std::vector<std::uint32_t> hp(count);
      for (auto& v : hp) v = r.dim("hyperparameter");
      weights += implied_weights(kind, hp);
      if (weights * sizeof(float) > r.remaining())
        throw BundleError(BundleErrorKind::unexpected_end, "layer weights run past the end of the file");
      net.add(nn::make_layer<float>(static_cast<nn::LayerKind>(kind), hp));
    }
  } catch (const ShapeError& e) {
    throw BundleError(BundleErrorKind::malformed, e.what());
  }
  const auto tensors = r.uint<std::uint16_t>();
  std::uint16_t seen = 0;
  for (std::size_t i = 0; i < net.size(); ++i) {
    for (auto& p : net.layer(i).parameters()) {
      if (seen++ >= tensors) throw BundleError(BundleErrorKind::malformed, "too few tensors");
      const auto name = r.str();
      if (name != std::to_string(i) + "." + p.name)
        throw BundleError(BundleErrorKind::malformed, "expected tensor '" + std::to_string(i) + "." + p.name +
                                                          "', found '" + name + "'");
      const auto rank = r.uint<std::uint8_t>();
      if (rank != p.shape.size()) throw BundleError(BundleErrorKind::malformed, "rank mismatch for " + name);
      for (auto d : p.shape)
        if (r.uint<std::uint32_t>() != d) throw BundleError(BundleErrorKind::malformed, "shape mismatch for " + name);
      auto& m = p.value;
      for (Index row = 0; row < m.rows(); ++row)
        for (Index c = 0; c < m.cols(); ++c) m(row, c) = r.f32();
    }
  }
  if (seen != tensors) throw BundleError(BundleErrorKind::malformed, "unexpected extra tensors");
  return net;
}

}  // namespace

std::vector<std::uint8_t> encode_bundle(const ModelBundle& b) {
  Writer w;
  w.bytes(kMagic);
  w.uint(kBundleVersion);
  w.str(b.appliance);
  w.str(b.params.name);
  w.f64(b.params.on_threshold);
  w.i64(b.params.min_on);
  w.i64(b.params.min_off);
  w.i64(b.period);
  w.f64(b.mains_scaler.x_min);
  w.f64(b.mains_scaler.x_max);
  w.f64(b.power_scaler.x_min);
  w.f64(b.power_scaler.x_max);
  w.f64(b.index_scale);
  w.f64(b.off.off_mean);
  write_network(w, b.classifier);
  write_network(w, b.regressor);
  return w.take();
}

ModelBundle decode_bundle(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  for (char c : kMagic)
    if (r.uint<std::uint8_t>() != static_cast<std::uint8_t>(c))
      throw BundleError(BundleErrorKind::bad_magic, "not a bundle file");
  if (const auto v = r.uint<std::uint16_t>(); v != kBundleVersion)
    throw BundleError(BundleErrorKind::bad_version,
                      "version " + std::to_string(v) + ", expected " + std::to_string(kBundleVersion));
  ModelBundle b;
  b.appliance = r.str();
  b.params.name = r.str();
  b.params.on_threshold = r.f64();
  b.params.min_on = r.i64();
  b.params.min_off = r.i64();
  b.period = r.i64();
  b.mains_scaler.x_min = r.f64();
  b.mains_scaler.x_max = r.f64();
  b.power_scaler.x_min = r.f64();
  b.power_scaler.x_max = r.f64();
  b.index_scale = r.f64();
  b.off.off_mean = r.f64();
  b.classifier = read_network(r);
  b.regressor = read_network(r);
  if (!r.done())
    throw BundleError(BundleErrorKind::malformed, "trailing bytes after offset " + std::to_string(r.position()));
  return b;
}

std::size_t save_bundle(const ModelBundle& bundle, const std::filesystem::path& path) {
  const auto bytes = encode_bundle(bundle);
  if (bytes.size() > kMaxBundleBytes)
    throw BundleError(BundleErrorKind::malformed, "bundle is " + std::to_string(bytes.size()) + " bytes, limit " +
                                                      std::to_string(kMaxBundleBytes));
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw BundleError(BundleErrorKind::io, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw BundleError(BundleErrorKind::io, "write failed: " + path.string());
  return bytes.size();
}

ModelBundle load_bundle(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BundleError(BundleErrorKind::io, "cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw BundleError(BundleErrorKind::io, "read failed: " + path.string());
  return decode_bundle(bytes);
}

}  // namespace nilm
