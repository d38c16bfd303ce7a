#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>

#include "pcg/error.hpp"
#include "pcg/learn.hpp"

namespace pcg {

namespace {

constexpr char kMagic[6] = {'P', 'C', 'G', 'S', 'V', 'M'};
constexpr std::uint16_t kVersion = 1;
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 32;

void put_u64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  out.write(b, 8);
}
void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw DataError("unreadable model: truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}
double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

}  // namespace

void save_model(const SvmModel& m, std::ostream& out) {
  out.write(kMagic, sizeof kMagic);
  const char version[2] = {static_cast<char>(kVersion & 0xFF), static_cast<char>(kVersion >> 8)};
  out.write(version, 2);
  out.put(static_cast<char>(m.kernel.kind));
  put_f64(out, m.kernel.gamma.value_or(0.0));
  put_f64(out, m.kernel.coef0);
  put_f64(out, m.kernel.c);
  const std::uint64_t d = m.num_features();
  const std::uint64_t n_sv = m.dual_coefs.size();
  put_u64(out, d);
  put_u64(out, n_sv);
  for (double v : m.feature_mean) put_f64(out, v);
  for (double v : m.feature_scale) put_f64(out, v);
  put_f64(out, m.bias);
  for (double v : m.dual_coefs) put_f64(out, v);
  for (double v : m.support_vectors.data()) put_f64(out, v);
  if (!out) throw DataError("failed to write model");
}

SvmModel load_model(std::istream& in) {
  char magic[6];
  if (!in.read(magic, 6) || !std::equal(magic, magic + 6, kMagic)) throw DataError("unreadable model: bad magic");
  unsigned char version[2];
  if (!in.read(reinterpret_cast<char*>(version), 2)) throw DataError("unreadable model: truncated");
  const int v = version[0] | (version[1] << 8);
  if (v != kVersion) throw DataError("unsupported model version " + std::to_string(v));
  const int kind = in.get();
  if (kind < 0 || kind > static_cast<int>(KernelKind::sigmoid)) throw DataError("unreadable model: bad kernel");

  SvmModel m;
  m.kernel.kind = static_cast<KernelKind>(kind);
  m.kernel.gamma = get_f64(in);
  m.kernel.coef0 = get_f64(in);
  m.kernel.c = get_f64(in);
  const std::uint64_t d = get_u64(in);
  const std::uint64_t n_sv = get_u64(in);
  if (d > kMaxElements || n_sv > kMaxElements || d * n_sv > kMaxElements) throw DataError("unreadable model: bad shape");
  m.feature_mean.resize(d);
  m.feature_scale.resize(d);
  for (auto& x : m.feature_mean) x = get_f64(in);
  for (auto& x : m.feature_scale) x = get_f64(in);
  m.bias = get_f64(in);
  m.dual_coefs.resize(n_sv);
  for (auto& x : m.dual_coefs) x = get_f64(in);
  m.support_vectors = Matrix(n_sv, d);
  for (auto& x : m.support_vectors.data()) x = get_f64(in);
  return m;
}

}  // namespace pcg
