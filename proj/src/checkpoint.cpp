#include "follownet/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "follownet/errors.hpp"

namespace follownet {

namespace {

constexpr char kMagic[4] = {'F', 'N', 'E', 'T'};

std::uint64_t fnv1a(const std::vector<std::uint8_t>& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  return h;
}

class Writer {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void raw(const char* data, std::size_t n) {
    bytes_.insert(bytes_.end(), data, data + n);
  }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    raw(s.data(), s.size());
  }
  void int_list(const std::vector<int>& v) {
    u32(static_cast<std::uint32_t>(v.size()));
    for (int x : v) i32(x);
  }
  std::vector<std::uint8_t>& bytes() { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(std::vector<std::uint8_t> bytes) : bytes_(std::move(bytes)) {}

  std::uint8_t u8() {
    need(1);
    return bytes_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  float f32() { return std::bit_cast<float>(u32()); }
  std::string str() {
    const std::uint32_t n = u32();
    need(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data()) + pos_, n);
    pos_ += n;
    return s;
  }
  std::vector<int> int_list() {
    const std::uint32_t n = u32();
    std::vector<int> v(n);
    for (std::uint32_t i = 0; i < n; ++i) v[i] = i32();
    return v;
  }
  std::size_t pos() const { return pos_; }
  std::size_t size() const { return bytes_.size(); }
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

 private:
  void need(std::size_t n) {
    if (pos_ + n > bytes_.size()) throw ParseError("checkpoint: truncated file");
  }
  std::vector<std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

void write_config(Writer& w, const ArchitectureConfig& c) {
  w.i32(c.image_height);
  w.i32(c.image_width);
  w.i32(c.image_channels);
  w.int_list(c.semantic_channels);
  w.int_list(c.semantic_kernels);
  w.int_list(c.semantic_strides);
  w.int_list(c.depth_channels);
  w.int_list(c.depth_kernels);
  w.int_list(c.depth_strides);
  w.i32(c.embedding_dim);
  w.i32(c.gru_dim);
  w.i32(c.semantic_dim);
  w.i32(c.depth_dim);
  w.i32(c.attention_hidden);
  w.int_list(c.q_hiddens);
  w.i32(c.num_actions);
  w.i32(c.vocab_size);
  w.i32(c.max_tokens);
  w.u8(c.use_attention ? 1 : 0);
}

ArchitectureConfig read_config(Reader& r) {
  ArchitectureConfig c;
  c.image_height = r.i32();
  c.image_width = r.i32();
  c.image_channels = r.i32();
  c.semantic_channels = r.int_list();
  c.semantic_kernels = r.int_list();
  c.semantic_strides = r.int_list();
  c.depth_channels = r.int_list();
  c.depth_kernels = r.int_list();
  c.depth_strides = r.int_list();
  c.embedding_dim = r.i32();
  c.gru_dim = r.i32();
  c.semantic_dim = r.i32();
  c.depth_dim = r.i32();
  c.attention_hidden = r.i32();
  c.q_hiddens = r.int_list();
  c.num_actions = r.i32();
  c.vocab_size = r.i32();
  c.max_tokens = r.i32();
  c.use_attention = r.u8() != 0;
  return c;
}

}  // namespace

void save_checkpoint(const FollowNetModel& model, const std::string& path) {
  Writer w;
  w.raw(kMagic, 4);
  w.u32(kCheckpointVersion);
  write_config(w, model.config());

  w.u32(static_cast<std::uint32_t>(model.params().size()));
  for (const auto& [name, tensor] : model.params()) {
    w.str(name);
    w.u32(static_cast<std::uint32_t>(tensor->shape.size()));
    for (int dim : tensor->shape) w.i32(dim);
    for (double v : tensor->values) w.f32(static_cast<float>(v));
  }
  w.u64(fnv1a(w.bytes()));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint '" + path + "'");
  out.write(reinterpret_cast<const char*>(w.bytes().data()),
            static_cast<std::streamsize>(w.bytes().size()));
  if (!out) throw IoError("failed writing checkpoint '" + path + "'");
}

FollowNetModel load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());

  if (bytes.size() < 12) throw ParseError("checkpoint: truncated file");
  std::uint64_t stored = 0;
  for (int i = 0; i < 8; ++i) {
    stored |= static_cast<std::uint64_t>(bytes[bytes.size() - 8 + i]) << (8 * i);
  }
  std::vector<std::uint8_t> payload(bytes.begin(), bytes.end() - 8);
  if (fnv1a(payload) != stored) {
    throw ParseError("checkpoint: checksum mismatch — file corrupted");
  }

  Reader r(std::move(payload));
  char magic[4];
  for (char& m : magic) m = static_cast<char>(r.u8());
  if (magic[0] != 'F' || magic[1] != 'N' || magic[2] != 'E' || magic[3] != 'T') {
    throw ParseError("checkpoint: bad magic bytes (not a checkpoint file)");
  }
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw UnsupportedError("checkpoint: unsupported format version " +
                           std::to_string(version));
  }
  const ArchitectureConfig config = read_config(r);

  FollowNetModel model(config, 0);
  const std::uint32_t count = r.u32();
  if (count != static_cast<std::uint32_t>(model.params().size())) {
    throw ConfigError("checkpoint: parameter count " + std::to_string(count) +
                      " does not match the architecture (" +
                      std::to_string(model.params().size()) + ")");
  }
  for (std::uint32_t p = 0; p < count; ++p) {
    const std::string name = r.str();
    const std::uint32_t rank = r.u32();
    Shape shape(rank);
    for (std::uint32_t d = 0; d < rank; ++d) shape[d] = r.i32();
    const TensorPtr& tensor = model.params().get(name);  // throws on unknown name
    if (tensor->shape != shape) {
      throw ConfigError("checkpoint: parameter '" + name + "' has shape " + shape_str(shape) +
                        ", expected " + shape_str(tensor->shape));
    }
    for (double& v : tensor->values) v = static_cast<double>(r.f32());
  }
  if (r.pos() != r.size()) throw ParseError("checkpoint: trailing bytes after parameters");
  return model;
}

}  // namespace follownet
