#include "pcg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>

#include "pcg/error.hpp"
#include "pcg/fft.hpp"
#include "pcg/preprocess.hpp"
#include "pcg/rng.hpp"

namespace pcg {

namespace {

constexpr double kFirstOnsetS = 0.2;
constexpr double kS1DurationS = 0.12;
constexpr double kS2DurationS = 0.10;
constexpr double kS2OffsetFraction = 0.36;   // S2 onset, as a fraction of the beat period
constexpr double kDiastolicMurmurFraction = 0.5;
constexpr double kMurmurTaperS = 0.01;
constexpr double kEpochLeadS = 0.05;
constexpr double kEpochRateHz = 2000.0;
constexpr double kPeak = 0.9;

// Stream indices for substream_seed.
constexpr std::uint64_t kStreamS1 = 1, kStreamS2 = 2, kStreamMurmur = 3, kStreamAmbient = 16;

std::size_t total_samples() { return static_cast<std::size_t>(std::llround(kSynthDurationS * kSynthRateHz)); }

void check_band(const Band& b, const char* name) {
  if (!(b.lo_hz > 0.0 && b.hi_hz > b.lo_hz && b.hi_hz < 1000.0)) {
    throw ConfigError(std::string("invalid band edges for ") + name);
  }
}

/// White Gaussian noise brick-wall filtered to the band, unit RMS.
std::vector<double> band_noise(const Band& band, std::size_t n, std::uint64_t seed) {
  const std::size_t nfft = next_power_of_two(n);
  Rng rng(seed);
  std::vector<std::complex<double>> buf(nfft);
  for (auto& v : buf) v = rng.normal();
  fft_inplace(buf);
  const double df = kSynthRateHz / static_cast<double>(nfft);
  for (std::size_t k = 0; k < nfft; ++k) {
    const std::size_t mirrored = k <= nfft / 2 ? k : nfft - k;
    const double f = static_cast<double>(mirrored) * df;
    if (f < band.lo_hz || f > band.hi_hz) buf[k] = 0.0;
  }
  fft_inplace(buf, true);
  std::vector<double> out(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = buf[i].real();
    ss += out[i] * out[i];
  }
  const double rms = std::sqrt(ss / static_cast<double>(n));
  for (auto& v : out) v /= rms;
  return out;
}

void add_hann(std::vector<double>& env, double start_s, double dur_s) {
  const auto a = static_cast<long>(std::ceil(start_s * kSynthRateHz));
  const auto b = static_cast<long>(std::floor((start_s + dur_s) * kSynthRateHz));
  for (long i = std::max(0L, a); i <= b && i < static_cast<long>(env.size()); ++i) {
    const double u = (static_cast<double>(i) / kSynthRateHz - start_s) / dur_s;
    env[static_cast<std::size_t>(i)] = std::max(env[static_cast<std::size_t>(i)], 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * u));
  }
}

void add_tukey(std::vector<double>& env, double start_s, double end_s) {
  if (end_s <= start_s) return;
  const double taper = std::min(kMurmurTaperS, 0.5 * (end_s - start_s));
  const auto a = static_cast<long>(std::ceil(start_s * kSynthRateHz));
  const auto b = static_cast<long>(std::floor(end_s * kSynthRateHz));
  for (long i = std::max(0L, a); i <= b && i < static_cast<long>(env.size()); ++i) {
    const double t = static_cast<double>(i) / kSynthRateHz;
    const double edge = std::min(t - start_s, end_s - t);
    const double w = edge >= taper ? 1.0 : 0.5 - 0.5 * std::cos(std::numbers::pi * edge / taper);
    env[static_cast<std::size_t>(i)] = std::max(env[static_cast<std::size_t>(i)], w);
  }
}

/// Envelope-weighted stream scaled so its power over the active region equals `power`.
std::vector<double> shaped(const std::vector<double>& stream, const std::vector<double>& env, double power) {
  std::vector<double> out(stream.size());
  double ss = 0.0;
  std::size_t active = 0;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    out[i] = stream[i] * env[i];
    if (env[i] > 0.0) {
      ss += out[i] * out[i];
      ++active;
    }
  }
  const double scale = active == 0 || ss == 0.0 ? 0.0 : std::sqrt(power * static_cast<double>(active) / ss);
  for (auto& v : out) v *= scale;
  return out;
}

/// Integer delay plus a first-order Thiran all-pass for the remaining
/// fraction in [0.5, 1.5).
std::vector<double> delay_signal(const std::vector<double>& x, double delay_samples) {
  if (delay_samples <= 0.0) return x;
  std::size_t whole = 0;
  double frac = delay_samples;
  if (delay_samples >= 0.5) {
    whole = static_cast<std::size_t>(std::floor(delay_samples - 0.5));
    frac = delay_samples - static_cast<double>(whole);
  }
  const double a = (1.0 - frac) / (1.0 + frac);
  std::vector<double> y(x.size(), 0.0);
  double x_prev = 0.0, y_prev = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = i >= whole ? x[i - whole] : 0.0;
    const double yi = a * xi + x_prev - a * y_prev;
    y[i] = yi;
    x_prev = xi;
    y_prev = yi;
  }
  return y;
}

double quantize24(double v) {
  constexpr double scale = 8388608.0;
  return std::clamp(std::round(v * scale), -scale, scale - 1.0) / scale;
}

}  // namespace

void validate(const SynthParams& p) {
  check_band(p.s1_band, "S1");
  check_band(p.s2_band, "S2");
  check_band(p.murmur_band, "murmur");
  if (!(p.heart_rate_bpm > 0.0)) throw ConfigError("heart rate must be positive");
  if (!(p.murmur_rel_power >= 0.0)) throw ConfigError("murmur power must be non-negative");
  if (!(p.ambient_noise_std >= 0.0)) throw ConfigError("ambient noise std must be non-negative");
  for (double g : p.channel_gains) {
    if (!(g > 0.0)) throw ConfigError("channel gains must be positive");
  }
  for (double d : p.channel_delays_ms) {
    if (!(d >= 0.0 && d < 50.0)) throw ConfigError("channel delays must lie in [0, 50) ms");
  }
}

SynthSubject synth_subject(Label label, const SynthParams& params, std::uint64_t seed, const std::string& subject_id) {
  validate(params);
  const double period = 60.0 / params.heart_rate_bpm;
  const auto epoch_len = static_cast<std::size_t>(std::llround(2.0 * period * kEpochRateHz));
  if (epoch_len < kMinEpochSamples || epoch_len > kMaxEpochSamples) {
    throw ConfigError("heart rate gives two-cycle epochs outside the supported length range");
  }
  const std::size_t n = total_samples();

  std::vector<double> env_s1(n, 0.0), env_s2(n, 0.0), env_m(n, 0.0);
  std::vector<double> onsets;
  for (double t = kFirstOnsetS; t < kSynthDurationS; t += period) {
    onsets.push_back(t);
    const double s2 = t + kS2OffsetFraction * period;
    add_hann(env_s1, t, kS1DurationS);
    add_hann(env_s2, s2, kS2DurationS);
    const double s2_end = s2 + kS2DurationS;
    add_tukey(env_m, t + kS1DurationS, s2);
    add_tukey(env_m, s2_end, s2_end + kDiastolicMurmurFraction * (t + period - s2_end));
  }
  if (onsets.size() < 2 * kEpochsPerSubject + 2) throw ConfigError("heart rate too low for three two-cycle epochs");

  std::vector<double> heart = shaped(band_noise(params.s1_band, n, substream_seed(seed, kStreamS1)), env_s1, 1.0);
  const auto s2 = shaped(band_noise(params.s2_band, n, substream_seed(seed, kStreamS2)), env_s2, 1.0);
  for (std::size_t i = 0; i < n; ++i) heart[i] += s2[i];
  if (label == Label::cad && params.murmur_rel_power > 0.0) {
    const auto murmur = shaped(band_noise(params.murmur_band, n, substream_seed(seed, kStreamMurmur)), env_m,
                               params.murmur_rel_power);
    for (std::size_t i = 0; i < n; ++i) heart[i] += murmur[i];
  }

  SynthSubject out;
  Recording& rec = out.recording;
  rec.subject_id = subject_id;
  rec.fs_hz = kSynthRateHz;
  rec.bit_depth = 24;
  double peak = 0.0;
  for (std::size_t c = 0; c < kSynthChannels; ++c) {
    auto ch = delay_signal(heart, params.channel_delays_ms[c] * 1e-3 * kSynthRateHz);
    Rng ambient(substream_seed(seed, kStreamAmbient + c));
    for (auto& v : ch) v = params.channel_gains[c] * (v + params.ambient_noise_std * ambient.normal());
    for (double v : ch) peak = std::max(peak, std::abs(v));
    rec.channels.push_back(std::move(ch));
  }
  const double scale = peak > 0.0 ? kPeak / peak : 1.0;
  for (auto& ch : rec.channels) {
    for (auto& v : ch) v = quantize24(v * scale);
  }

  // Epoch k covers beats 2k+1 and 2k+2 (0-based), from just before their S1.
  for (int k = 0; k < kEpochsPerSubject; ++k) {
    const double start = onsets[static_cast<std::size_t>(2 * k + 1)] - kEpochLeadS;
    const double end = onsets[static_cast<std::size_t>(2 * k + 3)] - kEpochLeadS;
    out.annotations.spans.push_back({subject_id, k, static_cast<std::size_t>(std::llround(start * kEpochRateHz)),
                                     static_cast<std::size_t>(std::llround(end * kEpochRateHz))});
  }
  return out;
}

SynthDataset synth_dataset(std::size_t n_per_class, const SynthParams& params, std::uint64_t seed,
                           std::size_t n_heldout_per_class) {
  if (n_per_class == 0) throw ConfigError("n_per_class must be at least 1");
  validate(params);
  SynthDataset ds;
  const std::size_t total = 2 * (n_per_class + n_heldout_per_class);
  for (std::size_t i = 0; i < total; ++i) {
    const Label label = i % 2 == 0 ? Label::cad : Label::normal;
    const Cohort cohort = i < 2 * n_per_class ? Cohort::train : Cohort::heldout;
    char id[32];
    std::snprintf(id, sizeof id, "%s%03zu", cohort == Cohort::train ? "s" : "h", i + 1);

    Rng jitter(substream_seed(seed, i));
    SynthParams p = params;
    p.heart_rate_bpm *= jitter.uniform(0.9, 1.1);
    for (auto& g : p.channel_gains) g *= jitter.uniform(0.8, 1.2);
    auto subject = synth_subject(label, p, jitter.next(), id);

    ds.manifest.entries.push_back({id, std::string(id) + ".wav", label, cohort});
    ds.annotations.spans.insert(ds.annotations.spans.end(), subject.annotations.spans.begin(),
                                subject.annotations.spans.end());
    ds.recordings.push_back(std::move(subject.recording));
  }
  return ds;
}

void write_dataset(const SynthDataset& ds, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < ds.recordings.size(); ++i) {
    write_recording(ds.recordings[i], dir / ds.manifest.entries[i].path);
  }
  write_manifest(ds.manifest, dir / "manifest.csv");
  write_annotations(ds.annotations, dir / "annotations.csv");
}

}  // namespace pcg
