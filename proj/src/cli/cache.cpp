#include <bit>
#include <cstring>
#include <fstream>

#include <openssl/evp.h>

#include "pcg/error.hpp"
#include "pcg/log.hpp"
#include "stages.hpp"

namespace pcg::cli {

static_assert(std::endian::native == std::endian::little, "cache files assume a little-endian host");

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'P', 'C', 'G', 'C', 'A', 'C', 'H', 'E'};
constexpr std::uint32_t kCacheVersion = 1;

EVP_MD_CTX* md(void* p) { return static_cast<EVP_MD_CTX*>(p); }

}  // namespace

Hasher::Hasher() : ctx_(EVP_MD_CTX_new()) {
  if (!ctx_ || EVP_DigestInit_ex(md(ctx_), EVP_sha256(), nullptr) != 1) throw NumericError("SHA-256 init failed");
}

Hasher::~Hasher() { EVP_MD_CTX_free(md(ctx_)); }

Hasher& Hasher::update(std::string_view bytes) {
  // Length prefix keeps field boundaries unambiguous.
  const std::uint64_t n = bytes.size();
  EVP_DigestUpdate(md(ctx_), &n, sizeof n);
  EVP_DigestUpdate(md(ctx_), bytes.data(), bytes.size());
  return *this;
}

Hasher& Hasher::update_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("unreadable file " + path.string());
  std::vector<char> buf(1 << 16);
  std::uint64_t total = 0;
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    const auto got = static_cast<std::size_t>(in.gcount());
    EVP_DigestUpdate(md(ctx_), buf.data(), got);
    total += got;
  }
  EVP_DigestUpdate(md(ctx_), &total, sizeof total);
  return *this;
}

std::string Hasher::hex() {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(md(ctx_), digest, &len);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 15];
  }
  return out;
}

std::string sha256_hex(std::string_view bytes) { return Hasher().update(bytes).hex(); }

void write_cache(const std::filesystem::path& path, const json& header, std::span<const double> payload) {
  std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write cache " + tmp);
    const std::string text = header.dump();
    const std::uint64_t len = text.size();
    out.write(kMagic, sizeof kMagic);
    out.write(reinterpret_cast<const char*>(&kCacheVersion), sizeof kCacheVersion);
    out.write(reinterpret_cast<const char*>(&len), sizeof len);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size_bytes()));
    if (!out) throw DataError("failed writing cache " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::optional<CacheBlob> read_cache(const std::filesystem::path& path, const std::string& key) {
  if (!std::filesystem::exists(path)) return std::nullopt;
  std::ifstream in(path, std::ios::binary);
  char magic[8];
  std::uint32_t version = 0;
  std::uint64_t len = 0;
  in.read(magic, sizeof magic);
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  in.read(reinterpret_cast<char*>(&len), sizeof len);
  const auto reject = [&](const std::string& why) -> std::optional<CacheBlob> {
    log::warn("ignoring cache " + path.string() + ": " + why);
    return std::nullopt;
  };
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0) return reject("bad magic");
  if (version != kCacheVersion) return reject("version " + std::to_string(version));
  const auto file_size = std::filesystem::file_size(path);
  if (len > file_size) return reject("truncated header");
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  CacheBlob blob;
  try {
    blob.header = json::parse(text);
  } catch (const json::exception&) {
    return reject("unparseable header");
  }
  if (blob.header.value("key", "") != key) return reject("key mismatch");
  const std::uint64_t offset = sizeof magic + sizeof version + sizeof len + len;
  const std::uint64_t payload_bytes = file_size - offset;
  if (payload_bytes % sizeof(double) != 0 || payload_bytes / sizeof(double) != blob.header.value("payload_size", 0ull)) {
    return reject("payload size mismatch");
  }
  blob.payload.resize(payload_bytes / sizeof(double));
  in.read(reinterpret_cast<char*>(blob.payload.data()), static_cast<std::streamsize>(payload_bytes));
  if (!in) return reject("short read");
  return blob;
}

Inputs load_inputs(const PipelineConfig& cfg) {
  if (cfg.paths.manifest.empty()) throw ConfigError("paths.manifest is not set");
  if (!std::filesystem::exists(cfg.paths.manifest)) {
    throw ConfigError("manifest not found: " + cfg.paths.manifest.string());
  }
  if (cfg.paths.annotations.empty()) throw ConfigError("paths.annotations is not set");
  if (!std::filesystem::exists(cfg.paths.annotations)) {
    throw ConfigError("annotations not found: " + cfg.paths.annotations.string());
  }
  return {load_manifest(cfg.paths.manifest), load_annotations(cfg.paths.annotations, cfg.strict)};
}

namespace {

std::string cohort_name(Cohort c) { return c == Cohort::train ? "train" : "heldout"; }

std::string epochs_key(const PipelineConfig& cfg, const Inputs& in, Cohort cohort) {
  Hasher h;
  h.update("epochs/1").update(cohort_name(cohort));
  const json pre = {{"order", cfg.preprocess.filter.order},
                    {"cutoff", cfg.preprocess.filter.cutoff_hz},
                    {"fs", cfg.preprocess.target_fs_hz},
                    {"strict", cfg.strict}};
  h.update(pre.dump());
  for (const auto& e : in.manifest.cohort(cohort)) {
    h.update(e.subject_id).update(to_string(e.label)).update_file(e.path);
    for (const auto& s : in.annotations.for_subject(e.subject_id)) {
      h.update(std::to_string(s.epoch_idx) + ":" + std::to_string(s.start_sample) + ":" + std::to_string(s.end_sample));
    }
  }
  return h.hex();
}

}  // namespace

std::vector<Epoch> cohort_epochs(const PipelineConfig& cfg, const Inputs& in, Cohort cohort, StageResult* info) {
  const std::string key = epochs_key(cfg, in, cohort);
  const auto path = cfg.paths.cache_dir / ("epochs-" + cohort_name(cohort) + "-" + key.substr(0, 16) + ".bin");
  if (info) *info = {false, path, key};

  if (auto blob = read_cache(path, key)) {
    std::vector<Epoch> epochs;
    std::size_t offset = 0;
    for (const auto& meta : blob->header.at("epochs")) {
      Epoch e;
      e.subject_id = meta.at("subject").get<std::string>();
      e.channel_id = meta.at("channel").get<int>();
      e.epoch_idx = meta.at("epoch").get<int>();
      e.label = parse_label(meta.at("label").get<std::string>());
      const auto n = meta.at("n").get<std::size_t>();
      if (offset + n > blob->payload.size()) throw DataError("corrupt epochs cache " + path.string());
      e.samples.assign(blob->payload.begin() + static_cast<long>(offset),
                       blob->payload.begin() + static_cast<long>(offset + n));
      offset += n;
      epochs.push_back(std::move(e));
    }
    if (info) info->cache_hit = true;
    log::info("epochs cache hit " + path.string());
    return epochs;
  }

  auto epochs = preprocess_cohort(in.manifest, in.annotations, cohort, cfg.preprocess, cfg.jobs);
  json meta = json::array();
  std::vector<double> payload;
  for (const auto& e : epochs) {
    meta.push_back({{"subject", e.subject_id},
                    {"channel", e.channel_id},
                    {"epoch", e.epoch_idx},
                    {"label", to_string(e.label)},
                    {"n", e.samples.size()}});
    payload.insert(payload.end(), e.samples.begin(), e.samples.end());
  }
  write_cache(path, {{"key", key}, {"kind", "epochs"}, {"payload_size", payload.size()}, {"epochs", meta}}, payload);
  return epochs;
}

std::map<int, FeatureMatrix> cohort_features(const PipelineConfig& cfg, const Inputs& in, Cohort cohort,
                                             std::span<const int> channels, std::vector<StageResult>* info) {
  std::optional<std::vector<Epoch>> epochs;
  StageResult epoch_info;
  const std::string ekey = epochs_key(cfg, in, cohort);
  std::map<int, FeatureMatrix> out;
  for (int c : channels) {
    const FeatureSpec spec = cfg.spec_for(c);
    const json spec_doc = {{"family", to_string(spec.family)},
                           {"frames", spec.cepstral.num_frames},
                           {"lo", spec.cepstral.coeff_lo},
                           {"hi", spec.cepstral.coeff_hi},
                           {"filters", spec.cepstral.num_filters},
                           {"fmax", spec.cepstral.fmax_hz},
                           {"sbw", spec.subband.sbw_hz},
                           {"tbw", spec.subband.tbw_hz},
                           {"strict", cfg.strict}};
    const std::string key = Hasher().update("features/1").update(ekey).update(std::to_string(c)).update(spec_doc.dump()).hex();
    const auto path = cfg.paths.cache_dir /
                      ("features-" + cohort_name(cohort) + "-ch" + std::to_string(c) + "-" + key.substr(0, 16) + ".bin");
    StageResult r{false, path, key};

    if (auto blob = read_cache(path, key)) {
      const auto& h = blob->header;
      FeatureMatrix fm;
      const auto rows = h.at("rows").get<std::size_t>();
      const auto cols = h.at("cols").get<std::size_t>();
      if (rows * cols != blob->payload.size()) throw DataError("corrupt feature cache " + path.string());
      fm.x = Matrix(rows, cols);
      std::copy(blob->payload.begin(), blob->payload.end(), fm.x.data().begin());
      fm.subject_ids = h.at("subjects").get<std::vector<std::string>>();
      fm.epoch_idx = h.at("epoch_idx").get<std::vector<int>>();
      for (const auto& l : h.at("labels")) fm.y.push_back(parse_label(l.get<std::string>()));
      for (const auto& d : h.at("columns")) fm.columns.push_back({c, d.get<std::string>()});
      validate(fm);
      r.cache_hit = true;
      out.emplace(c, std::move(fm));
    } else {
      if (!epochs) epochs = cohort_epochs(cfg, in, cohort, &epoch_info);
      FeatureMatrix fm = channel_features(*epochs, c, spec, cfg.jobs);
      std::vector<std::string> labels, columns;
      for (Label l : fm.y) labels.emplace_back(to_string(l));
      for (const auto& col : fm.columns) columns.push_back(col.description);
      write_cache(path,
                  {{"key", key},
                   {"kind", "features"},
                   {"channel", c},
                   {"rows", fm.rows()},
                   {"cols", fm.cols()},
                   {"payload_size", fm.x.data().size()},
                   {"subjects", fm.subject_ids},
                   {"epoch_idx", fm.epoch_idx},
                   {"labels", labels},
                   {"columns", columns}},
                  fm.x.data());
      out.emplace(c, std::move(fm));
    }
    if (info) info->push_back(r);
  }
  return out;
}

}  // namespace pcg::cli
