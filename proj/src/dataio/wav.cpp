#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>

#include "pcg/dataio.hpp"
#include "pcg/error.hpp"

namespace pcg {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

// KSDATAFORMAT_SUBTYPE_{PCM,IEEE_FLOAT} share this tail after the format tag.
constexpr std::array<std::uint8_t, 14> kGuidTail = {0x00, 0x00, 0x00, 0x00, 0x10, 0x00, 0x80,
                                                    0x00, 0x00, 0xAA, 0x00, 0x38, 0x9B, 0x71};

struct Reader {
  const std::vector<std::uint8_t>& buf;
  std::size_t pos = 0;

  bool has(std::size_t n) const { return pos + n <= buf.size(); }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[pos + i]) << (8 * i);
    pos += 4;
    return v;
  }
  std::uint16_t u16() {
    std::uint16_t v = static_cast<std::uint16_t>(buf[pos] | (buf[pos + 1] << 8));
    pos += 2;
    return v;
  }
  std::string tag() {
    std::string t(reinterpret_cast<const char*>(buf.data() + pos), 4);
    pos += 4;
    return t;
  }
};

std::uint32_t le32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}
void put32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}
void put_tag(std::vector<std::uint8_t>& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

struct Format {
  std::uint16_t tag = 0;
  std::uint16_t channels = 0;
  std::uint32_t rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits = 0;
};

}  // namespace

void validate(const Recording& rec) {
  if (rec.channels.empty()) throw DataError("zero channels");
  if (rec.channels.size() > 7) throw DataError("recording has more than 7 channels");
  if (!(rec.fs_hz > 0.0)) throw DataError("sampling rate must be positive");
  const std::size_t n = rec.channels.front().size();
  for (const auto& ch : rec.channels) {
    if (ch.size() != n) throw DataError("channels have unequal length");
  }
}

Recording read_recording(std::istream& in, std::string subject_id) {
  std::vector<std::uint8_t> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Reader r{buf};
  if (!r.has(12) || r.tag() != "RIFF") throw DataError("unreadable file: not a RIFF container");
  r.u32();
  if (r.tag() != "WAVE") throw DataError("unreadable file: not a WAVE container");

  std::optional<Format> fmt;
  std::optional<double> exact_rate;
  const std::uint8_t* data = nullptr;
  std::size_t data_size = 0;

  while (r.has(8)) {
    const std::string id = r.tag();
    const std::uint32_t size = r.u32();
    if (!r.has(size)) throw DataError("unreadable file: truncated '" + id + "' chunk");
    const std::size_t body = r.pos;
    if (id == "fmt ") {
      if (size < 16) throw DataError("unreadable file: short fmt chunk");
      Format f;
      f.tag = r.u16();
      f.channels = r.u16();
      f.rate = r.u32();
      r.u32();
      f.block_align = r.u16();
      f.bits = r.u16();
      if (f.tag == kFormatExtensible) {
        if (size < 40) throw DataError("unreadable file: short extensible fmt chunk");
        r.pos = body + 24;
        const std::uint16_t sub = r.u16();
        if (!std::equal(kGuidTail.begin(), kGuidTail.end(), buf.begin() + static_cast<long>(r.pos))) {
          throw DataError("unsupported encoding: unknown extensible subformat");
        }
        f.tag = sub;
      }
      fmt = f;
    } else if (id == "rate" && size >= 8) {
      std::uint64_t bits = static_cast<std::uint64_t>(le32(buf.data() + body)) |
                           (static_cast<std::uint64_t>(le32(buf.data() + body + 4)) << 32);
      exact_rate = std::bit_cast<double>(bits);
    } else if (id == "data") {
      data = buf.data() + body;
      data_size = size;
    }
    r.pos = body + size + (size & 1u);
  }

  if (!fmt) throw DataError("unreadable file: missing fmt chunk");
  if (!data) throw DataError("unreadable file: missing data chunk");
  if (fmt->channels == 0) throw DataError("zero channels");
  const bool is_int = fmt->tag == kFormatPcm && (fmt->bits == 16 || fmt->bits == 24);
  const bool is_float = fmt->tag == kFormatFloat && fmt->bits == 32;
  if (!is_int && !is_float) {
    throw DataError("unsupported encoding: format " + std::to_string(fmt->tag) + ", " +
                    std::to_string(fmt->bits) + " bits");
  }
  const std::size_t bytes = fmt->bits / 8;
  if (fmt->block_align != bytes * fmt->channels) throw DataError("unreadable file: bad block alignment");

  Recording rec;
  rec.subject_id = std::move(subject_id);
  rec.fs_hz = exact_rate.value_or(static_cast<double>(fmt->rate));
  rec.bit_depth = fmt->bits;
  const std::size_t frames = data_size / fmt->block_align;
  rec.channels.assign(fmt->channels, std::vector<double>(frames));
  const double scale = std::ldexp(1.0, -(fmt->bits - 1));
  const std::uint8_t* p = data;
  for (std::size_t i = 0; i < frames; ++i) {
    for (std::size_t c = 0; c < fmt->channels; ++c, p += bytes) {
      double v;
      if (is_float) {
        v = static_cast<double>(std::bit_cast<float>(le32(p)));
      } else if (bytes == 2) {
        v = static_cast<std::int16_t>(p[0] | (p[1] << 8)) * scale;
      } else {
        std::int32_t s = p[0] | (p[1] << 8) | (p[2] << 16);
        if (s & 0x800000) s -= 0x1000000;
        v = s * scale;
      }
      rec.channels[c][i] = v;
    }
  }
  if (!(rec.fs_hz > 0.0)) throw DataError("unreadable file: non-positive sampling rate");
  return rec;
}

Recording load_recording(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("unreadable file: cannot open " + path.string());
  return read_recording(in, path.stem().string());
}

void write_recording(const Recording& rec, std::ostream& out) {
  validate(rec);
  const int bits = rec.bit_depth;
  if (bits != 16 && bits != 24 && bits != 32) throw DataError("unsupported encoding: bit depth " + std::to_string(bits));
  const bool is_float = bits == 32;
  const std::uint16_t channels = static_cast<std::uint16_t>(rec.num_channels());
  const std::size_t frames = rec.num_samples();
  const std::uint16_t bytes = static_cast<std::uint16_t>(bits / 8);
  const std::uint16_t block = static_cast<std::uint16_t>(bytes * channels);
  const bool extensible = channels > 2 || bits > 16;
  const std::uint32_t rate = static_cast<std::uint32_t>(std::llround(rec.fs_hz));

  std::vector<std::uint8_t> body;
  put_tag(body, "WAVE");
  put_tag(body, "fmt ");
  put32(body, extensible ? 40 : 16);
  put16(body, extensible ? kFormatExtensible : (is_float ? kFormatFloat : kFormatPcm));
  put16(body, channels);
  put32(body, rate);
  put32(body, rate * block);
  put16(body, block);
  put16(body, static_cast<std::uint16_t>(bits));
  if (extensible) {
    put16(body, 22);
    put16(body, static_cast<std::uint16_t>(bits));
    put32(body, 0);
    put16(body, is_float ? kFormatFloat : kFormatPcm);
    body.insert(body.end(), kGuidTail.begin(), kGuidTail.end());
  }
  if (static_cast<double>(rate) != rec.fs_hz) {
    put_tag(body, "rate");
    put32(body, 8);
    const auto raw = std::bit_cast<std::uint64_t>(rec.fs_hz);
    put32(body, static_cast<std::uint32_t>(raw & 0xFFFFFFFFu));
    put32(body, static_cast<std::uint32_t>(raw >> 32));
  }
  put_tag(body, "data");
  const std::size_t data_size = frames * block;
  put32(body, static_cast<std::uint32_t>(data_size));
  body.reserve(body.size() + data_size + 1);

  const double scale = std::ldexp(1.0, bits - 1);
  const double lo = -scale;
  const double hi = scale - 1.0;
  for (std::size_t i = 0; i < frames; ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      const double x = rec.channels[c][i];
      if (is_float) {
        put32(body, std::bit_cast<std::uint32_t>(static_cast<float>(x)));
        continue;
      }
      const auto s = static_cast<std::int32_t>(std::clamp(std::nearbyint(x * scale), lo, hi));
      const auto u = static_cast<std::uint32_t>(s);
      for (int b = 0; b < bytes; ++b) body.push_back(static_cast<std::uint8_t>((u >> (8 * b)) & 0xFF));
    }
  }
  if (data_size & 1u) body.push_back(0);

  std::vector<std::uint8_t> file;
  put_tag(file, "RIFF");
  put32(file, static_cast<std::uint32_t>(body.size()));
  file.insert(file.end(), body.begin(), body.end());
  out.write(reinterpret_cast<const char*>(file.data()), static_cast<std::streamsize>(file.size()));
  if (!out) throw DataError("failed to write recording");
}

void write_recording(const Recording& rec, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open " + path.string() + " for writing");
  write_recording(rec, out);
}

}  // namespace pcg
