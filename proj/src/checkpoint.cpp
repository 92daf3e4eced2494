#include "ndpc/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include <zlib.h>

namespace ndpc {

namespace {

constexpr char kMagic[4] = {'N', 'D', 'P', 'C'};

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void raw(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    bytes.insert(bytes.end(), b, b + n);
  }
  std::vector<std::uint8_t> bytes;
};

class Reader {
 public:
  Reader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}
  void need(std::size_t n) const {
    if (size_ - pos_ < n) throw CheckpointError("checkpoint truncated");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_++]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_++]) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(data_ + pos_), n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == size_; }

 private:
  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

std::uint32_t crc_of(const std::uint8_t* p, std::size_t n) {
  return static_cast<std::uint32_t>(crc32(crc32(0L, Z_NULL, 0), p, static_cast<uInt>(n)));
}

void write_dims(Writer& w, const std::vector<int>& dims) {
  w.u32(static_cast<std::uint32_t>(dims.size()));
  for (int d : dims) w.u32(static_cast<std::uint32_t>(d));
}

std::vector<int> read_dims(Reader& r) {
  const auto n = r.u32();
  if (n < 2 || n > 64) throw CheckpointError("checkpoint has an invalid layer count");
  std::vector<int> dims(n);
  for (auto& d : dims) {
    d = static_cast<int>(r.u32());
    if (d < 1 || d > (1 << 20)) throw CheckpointError("checkpoint has an invalid layer width");
  }
  return dims;
}

MlpParams shaped(const std::vector<int>& dims, Activation act, double omega0) {
  MlpParams p;
  p.hidden = act;
  p.omega0 = omega0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l)
    p.layers.push_back({Eigen::MatrixXd::Zero(dims[l + 1], dims[l]), Eigen::VectorXd::Zero(dims[l + 1])});
  return p;
}

}  // namespace

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& ckpt) {
  const auto& m = ckpt.model;
  m.validate();
  Writer w;
  w.u32(static_cast<std::uint32_t>(m.dim()));
  w.u32(static_cast<std::uint32_t>(m.num_messages()));
  w.u32(static_cast<std::uint32_t>(m.encoder.hidden.kind));
  w.f64(m.encoder.hidden.slope);
  w.f64(m.encoder.omega0);
  w.f64(m.lambda);
  w.u64(ckpt.seed);
  w.f64(ckpt.final_loss);
  w.u32(ckpt.channel.interference.is_gaussian() ? 0 : 1);
  w.f64(ckpt.channel.interference.power());
  w.f64(ckpt.channel.noise_var);
  write_dims(w, m.encoder.dims());
  write_dims(w, m.decoder.dims());
  for (const auto& p : m.constellation.points())
    for (Eigen::Index i = 0; i < p.size(); ++i) w.f64(p(i));
  w.u32(static_cast<std::uint32_t>(ckpt.config_echo.size()));
  w.raw(ckpt.config_echo.data(), ckpt.config_echo.size());
  for (double v : m.encoder.flatten()) w.f64(v);
  for (double v : m.decoder.flatten()) w.f64(v);

  Writer out;
  out.raw(kMagic, 4);
  out.u32(ckpt.version);
  out.raw(w.bytes.data(), w.bytes.size());
  out.u32(crc_of(w.bytes.data(), w.bytes.size()));
  return out.bytes;
}

Checkpoint deserialize_checkpoint(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) throw CheckpointError("bad magic");
  if (bytes.size() < 12) throw CheckpointError("checkpoint truncated");
  Reader head(bytes.data() + 4, 4);
  const auto version = head.u32();
  if (version != kCheckpointVersion) throw CheckpointError("unsupported checkpoint version " + std::to_string(version));

  const std::size_t payload_size = bytes.size() - 12;
  const std::uint8_t* payload = bytes.data() + 8;
  Reader tail(payload + payload_size, 4);
  if (tail.u32() != crc_of(payload, payload_size))
    throw CheckpointError("checksum mismatch (corrupted or truncated checkpoint)");

  Reader r(payload, payload_size);
  const auto k = static_cast<int>(r.u32());
  const auto num_messages = r.u32();
  const auto act_id = r.u32();
  const double slope = r.f64();
  const double omega0 = r.f64();
  if (k != 1 && k != 2) throw CheckpointError("checkpoint has invalid dimension");
  if (num_messages < 1 || num_messages > 4096) throw CheckpointError("checkpoint has invalid message count");
  if (act_id > 1) throw CheckpointError("checkpoint has unknown activation id");
  const Activation act{static_cast<ActivationKind>(act_id), slope};
  const double lambda = r.f64();
  const auto seed = r.u64();
  const double final_loss = r.f64();
  const auto interference_kind = r.u32();
  const double interference_power = r.f64();
  ChannelConfig channel;
  channel.k = k;
  channel.noise_var = r.f64();
  if (interference_kind == 0)
    channel.interference = GaussianInterference{interference_power};
  else if (interference_kind == 1)
    channel.interference = QpskInterference{interference_power};
  else
    throw CheckpointError("checkpoint has unknown interference kind");

  const auto enc_dims = read_dims(r);
  const auto dec_dims = read_dims(r);
  std::vector<Point> pts(num_messages, Point(k));
  for (auto& p : pts)
    for (int i = 0; i < k; ++i) p(i) = r.f64();
  const auto echo_len = r.u32();
  std::string config_echo = r.str(echo_len);

  MlpParams encoder = shaped(enc_dims, act, omega0);
  MlpParams decoder = shaped(dec_dims, act, omega0);
  for (auto* net : {&encoder, &decoder}) {
    std::vector<double> flat(net->parameter_count());
    for (auto& v : flat) v = r.f64();
    net->assign(flat);
  }
  if (!r.done()) throw CheckpointError("checkpoint has trailing bytes");

  const auto echo = parse_echo(config_echo);
  const auto it = echo.find("constellation");
  try {
    Constellation constellation(std::move(pts), it != echo.end() ? it->second : std::string("custom"));
    Checkpoint ckpt{version,
                    NeuralDpcModel{std::move(encoder), std::move(decoder), std::move(constellation), lambda},
                    channel,
                    std::move(config_echo),
                    final_loss,
                    seed};
    ckpt.model.validate();
    return ckpt;
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(std::string("checkpoint model: ") + e.what());
  }
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  const auto bytes = serialize_checkpoint(ckpt);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw CheckpointError("cannot open '" + path.string() + "' for writing");
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw CheckpointError("failed writing '" + path.string() + "'");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CheckpointError("cannot open checkpoint '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return deserialize_checkpoint(bytes);
}

std::map<std::string, std::string> parse_echo(const std::string& echo) {
  std::map<std::string, std::string> out;
  std::istringstream is(echo);
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

}  // namespace ndpc
