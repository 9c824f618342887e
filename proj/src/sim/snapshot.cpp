#include "ibprf/sim/snapshot.hpp"

#include <bit>
#include <cstring>
#include <istream>
#include <ostream>

#include "ibprf/sim/simulation.hpp"

namespace ibprf {

namespace {

constexpr char kMagic[8] = {'I', 'B', 'P', 'R', 'F', 'S', 'N', 'P'};
constexpr std::uint64_t kMaxCount = std::uint64_t{1} << 32;

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  void raw(const std::uint8_t* p, std::size_t n) {
    out_.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n));
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::uint8_t u8() {
    const int c = in_.get();
    if (c == std::char_traits<char>::eof()) throw SnapshotError("snapshot truncated");
    return static_cast<std::uint8_t>(c);
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{u8()} << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{u8()} << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const std::uint32_t n = u32();
    if (n > (1u << 20)) throw SnapshotError("snapshot string too long");
    std::string s(n, '\0');
    raw(reinterpret_cast<std::uint8_t*>(s.data()), n);
    return s;
  }
  void raw(std::uint8_t* p, std::size_t n) {
    in_.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) throw SnapshotError("snapshot truncated");
  }
  std::uint64_t count() {
    const std::uint64_t n = u64();
    if (n > kMaxCount) throw SnapshotError("snapshot count out of range");
    return n;
  }

 private:
  std::istream& in_;
};

void write_edge(Writer& w, const EstablishedKey& e) {
  w.u64(e.pair.lo.value);
  w.u64(e.pair.hi.value);
  w.raw(e.key.bytes.data(), e.key.bytes.size());
  w.u8(static_cast<std::uint8_t>(e.provenance));
  w.u32(e.hops);
  w.u8(e.master_side ? 1 : 0);
  w.u64(e.master_side ? e.master_side->value : 0);
  w.u32(static_cast<std::uint32_t>(e.route.size()));
  for (NodeId r : e.route) w.u64(r.value);
}

EstablishedKey read_edge(Reader& r) {
  EstablishedKey e;
  e.pair.lo = NodeId{r.u64()};
  e.pair.hi = NodeId{r.u64()};
  if (!(e.pair.lo < e.pair.hi)) throw SnapshotError("snapshot edge pair not ordered");
  r.raw(e.key.bytes.data(), e.key.bytes.size());
  const std::uint8_t prov = r.u8();
  if (prov != 1 && prov != 2) throw SnapshotError("snapshot edge provenance invalid");
  e.provenance = static_cast<Provenance>(prov);
  e.hops = r.u32();
  const bool has_side = r.u8() != 0;
  const std::uint64_t side = r.u64();
  if (has_side) e.master_side = NodeId{side};
  const std::uint32_t route = r.u32();
  if (route > 64) throw SnapshotError("snapshot route too long");
  for (std::uint32_t i = 0; i < route; ++i) e.route.push_back(NodeId{r.u64()});
  return e;
}

}  // namespace

Snapshot take_snapshot(const Simulation& sim) {
  Snapshot snap;
  snap.seed = sim.seed();
  snap.config = sim.config();
  snap.radius = sim.topology().radius();
  for (std::uint64_t u = 0; u < sim.topology().size(); ++u) {
    snap.positions.push_back(sim.topology().position(NodeId{u}));
  }
  for (const EstablishedKey* e : sim.links().edges()) snap.edges.push_back(*e);
  snap.metrics = sim.metrics();
  return snap;
}

void write_snapshot(std::ostream& out, const Snapshot& snap) {
  Writer w(out);
  out.write(kMagic, sizeof kMagic);
  w.u32(kSnapshotVersion);
  w.u64(snap.seed);

  const auto kv = snap.config.to_key_values();
  w.u32(static_cast<std::uint32_t>(kv.size()));
  for (const auto& [k, v] : kv) {
    w.str(k);
    w.str(v);
  }

  w.f64(snap.radius);
  w.u64(snap.positions.size());
  for (const Position& p : snap.positions) {
    w.f64(p.x);
    w.f64(p.y);
  }
  w.u64(snap.edges.size());
  for (const EstablishedKey& e : snap.edges) write_edge(w, e);

  const Metrics& m = snap.metrics;
  for (std::uint64_t v : {m.messages_sent, m.bytes_sent, m.prf_ops, m.direct_keys, m.path_keys,
                          m.storage_max, m.establish_attempts, m.ids_sent}) {
    w.u64(v);
  }
  w.u64(m.resilience_samples.size());
  for (const ResilienceSample& s : m.resilience_samples) {
    w.u64(s.captured);
    w.f64(s.compromised_fraction);
  }
  if (!out) throw SnapshotError("snapshot write failed");
}

Snapshot read_snapshot(std::istream& in) {
  Reader r(in);
  char magic[sizeof kMagic];
  in.read(magic, sizeof magic);
  if (in.gcount() != sizeof magic || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw SnapshotError("not a snapshot");
  }
  const std::uint32_t version = r.u32();
  if (version != kSnapshotVersion) {
    throw SnapshotError("unsupported snapshot version " + std::to_string(version));
  }

  Snapshot snap;
  snap.seed = r.u64();
  const std::uint32_t lines = r.u32();
  if (lines > 256) throw SnapshotError("snapshot config too large");
  try {
    for (std::uint32_t i = 0; i < lines; ++i) {
      const std::string key = r.str();
      const std::string value = r.str();
      snap.config.set(key, value);
    }
  } catch (const SnapshotError&) {
    throw;
  } catch (const std::exception& e) {
    throw SnapshotError(std::string("snapshot config: ") + e.what());
  }

  snap.radius = r.f64();
  const std::uint64_t nodes = r.count();
  for (std::uint64_t i = 0; i < nodes; ++i) {
    const double x = r.f64();
    const double y = r.f64();
    snap.positions.push_back(Position{x, y});
  }
  const std::uint64_t edges = r.count();
  for (std::uint64_t i = 0; i < edges; ++i) snap.edges.push_back(read_edge(r));

  Metrics& m = snap.metrics;
  for (std::uint64_t* v : {&m.messages_sent, &m.bytes_sent, &m.prf_ops, &m.direct_keys,
                           &m.path_keys, &m.storage_max, &m.establish_attempts, &m.ids_sent}) {
    *v = r.u64();
  }
  const std::uint64_t samples = r.count();
  for (std::uint64_t i = 0; i < samples; ++i) {
    ResilienceSample s;
    s.captured = r.u64();
    s.compromised_fraction = r.f64();
    m.resilience_samples.push_back(s);
  }
  return snap;
}

}  // namespace ibprf
