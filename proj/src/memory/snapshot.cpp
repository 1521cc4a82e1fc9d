#include "memory/snapshot.hpp"

#include "common/bytes.hpp"

namespace eham {

std::vector<std::uint8_t> encode_snapshot(const Hamr4D& mem) {
  ByteWriter w;
  w.tag("EHAM");
  w.u16(kSnapshotVersion);
  const auto& d = mem.dims();
  w.u32(d.n);
  w.u32(d.m);
  w.u32(d.p);
  w.u32(d.q);
  w.u32(mem.cap());
  for (auto c : mem.cells()) w.u16(c);
  return w.take();
}

Hamr4D decode_snapshot(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  r.expect_tag("EHAM");
  const auto version_at = r.offset();
  const auto version = r.u16();
  if (version != kSnapshotVersion) {
    throw ParseError("unsupported snapshot version " + std::to_string(version),
                     version_at);
  }
  Dims d;
  d.n = r.u32();
  d.m = r.u32();
  d.p = r.u32();
  d.q = r.u32();
  const auto cap = r.u32();
  if (d.n == 0 || d.m == 0 || d.p == 0 || d.q == 0) {
    throw ParseError("zero dimension in snapshot header", 6);
  }
  // Guard against absurd headers (and size_t wraparound) before allocating.
  std::uint64_t expected = 1;
  for (std::uint64_t dim : {d.n, d.m, d.p, d.q}) {
    expected *= dim;
    if (expected > r.remaining() / 2) {
      throw ParseError("truncated cell table", r.offset());
    }
  }
  std::vector<Hamr4D::Cell> cells(d.cells());
  for (auto& c : cells) {
    const auto at = r.offset();
    c = r.u16();
    if (c > cap) throw ParseError("cell exceeds cap", at);
  }
  if (r.remaining() != 0) throw ParseError("trailing bytes", r.offset());
  return Hamr4D(d, cap, std::move(cells));
}

void save_snapshot(const Hamr4D& mem, const std::filesystem::path& path) {
  write_file(path, encode_snapshot(mem));
}

Hamr4D load_snapshot(const std::filesystem::path& path) {
  return decode_snapshot(read_file(path));
}

}  // namespace eham
