#include <fstream>
#include <set>

#include "pcg/cli.hpp"
#include "pcg/error.hpp"

namespace pcg::cli {

using nlohmann::json;

namespace {

void allow_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const json& obj, const char* key, T& target) {
  if (obj.contains(key) && !obj.at(key).is_null()) target = obj.at(key).get<T>();
}

std::filesystem::path resolve(const std::filesystem::path& p, const std::filesystem::path& base) {
  if (p.empty() || p.is_absolute()) return p;
  return (base / p).lexically_normal();
}

Band read_band(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) throw ConfigError(where + " must be [lo, hi]");
  return {j[0].get<double>(), j[1].get<double>()};
}

void read_spec(const json& j, const std::string& where, FeatureSpec& spec) {
  allow_keys(j, where,
             {"family", "num_frames", "coeff_lo", "coeff_hi", "num_filters", "fmax_hz", "sbw_hz", "tbw_hz"});
  if (j.contains("family")) spec.family = parse_feature_family(j.at("family").get<std::string>());
  read(j, "num_frames", spec.cepstral.num_frames);
  read(j, "coeff_lo", spec.cepstral.coeff_lo);
  read(j, "coeff_hi", spec.cepstral.coeff_hi);
  read(j, "num_filters", spec.cepstral.num_filters);
  read(j, "fmax_hz", spec.cepstral.fmax_hz);
  read(j, "sbw_hz", spec.subband.sbw_hz);
  read(j, "tbw_hz", spec.subband.tbw_hz);
}

json spec_json(const FeatureSpec& s) {
  return {{"family", to_string(s.family)},
          {"num_frames", s.cepstral.num_frames},
          {"coeff_lo", s.cepstral.coeff_lo},
          {"coeff_hi", s.cepstral.coeff_hi},
          {"num_filters", s.cepstral.num_filters},
          {"fmax_hz", s.cepstral.fmax_hz},
          {"sbw_hz", s.subband.sbw_hz},
          {"tbw_hz", s.subband.tbw_hz}};
}

void validate_spec(FeatureSpec spec, bool strict) {
  spec.subband.strict = strict;
  spec.cepstral.strict = strict;
  if (spec.family == FeatureFamily::psd) {
    subband_bins(spec.subband, 2000.0 / 1024.0);
  } else {
    spec.cepstral.scale = scale_of(spec.family);
    validate(spec.cepstral);
  }
}

void validate_channels(const std::vector<int>& channels, const std::string& where) {
  for (int c : channels) {
    if (c < 1 || c > 7) throw ConfigError(where + " channel ids must lie in 1..7");
  }
}

}  // namespace

std::vector<int> PipelineConfig::extracted_channels() const {
  if (channel_features.empty()) return {1, 2, 3, 4, 5, 6, 7};
  std::vector<int> out;
  for (const auto& [c, spec] : channel_features) out.push_back(c);
  return out;
}

FeatureSpec PipelineConfig::spec_for(int channel) const {
  const auto it = channel_features.find(channel);
  FeatureSpec spec = it == channel_features.end() ? default_features : it->second;
  spec.subband.strict = strict;
  spec.cepstral.strict = strict;
  if (spec.family != FeatureFamily::psd) spec.cepstral.scale = scale_of(spec.family);
  return spec;
}

PipelineConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  PipelineConfig cfg;
  try {
    allow_keys(doc, "config",
               {"paths", "seed", "jobs", "strict", "preprocess", "features", "fusion", "selection", "cv", "synth"});
    read(doc, "seed", cfg.seed);
    read(doc, "jobs", cfg.jobs);
    read(doc, "strict", cfg.strict);

    if (doc.contains("paths")) {
      const auto& p = doc.at("paths");
      allow_keys(p, "paths", {"dataset_dir", "manifest", "annotations", "output_dir", "cache_dir"});
      std::string s;
      if (p.contains("dataset_dir")) cfg.paths.dataset_dir = p.at("dataset_dir").get<std::string>();
      if (p.contains("manifest")) cfg.paths.manifest = p.at("manifest").get<std::string>();
      if (p.contains("annotations")) cfg.paths.annotations = p.at("annotations").get<std::string>();
      if (p.contains("output_dir")) cfg.paths.output_dir = p.at("output_dir").get<std::string>();
      if (p.contains("cache_dir")) cfg.paths.cache_dir = p.at("cache_dir").get<std::string>();
    }

    if (doc.contains("preprocess")) {
      const auto& p = doc.at("preprocess");
      allow_keys(p, "preprocess", {"filter_order", "cutoff_hz", "target_fs_hz"});
      read(p, "filter_order", cfg.preprocess.filter.order);
      read(p, "cutoff_hz", cfg.preprocess.filter.cutoff_hz);
      read(p, "target_fs_hz", cfg.preprocess.target_fs_hz);
    }

    if (doc.contains("features")) {
      const auto& f = doc.at("features");
      allow_keys(f, "features", {"family", "default", "channels"});
      if (f.contains("family")) cfg.default_features.family = parse_feature_family(f.at("family").get<std::string>());
      if (cfg.default_features.family == FeatureFamily::gfcc) cfg.default_features.cepstral.num_filters = 14;
      if (f.contains("default")) read_spec(f.at("default"), "features.default", cfg.default_features);
      if (f.contains("channels")) {
        const auto& ch = f.at("channels");
        if (!ch.is_object()) throw ConfigError("features.channels must map channel ids to settings");
        for (const auto& [key, value] : ch.items()) {
          int c = 0;
          try {
            c = std::stoi(key);
          } catch (const std::exception&) {
            throw ConfigError("features.channels key '" + key + "' is not a channel id");
          }
          FeatureSpec spec = cfg.default_features;
          read_spec(value, "features.channels." + key, spec);
          cfg.channel_features[c] = spec;
        }
      }
    }

    if (doc.contains("fusion")) {
      const auto& f = doc.at("fusion");
      allow_keys(f, "fusion", {"mode", "channels", "search_channels", "search_family"});
      if (f.contains("mode")) cfg.fusion.mode = parse_fusion_mode(f.at("mode").get<std::string>());
      read(f, "channels", cfg.fusion.channels);
      read(f, "search_channels", cfg.fusion.search_channels);
      read(f, "search_family", cfg.fusion.search_family);
    }

    if (doc.contains("selection")) {
      const auto& s = doc.at("selection");
      allow_keys(s, "selection", {"method", "search", "step", "max_dim", "fixed_dim", "mrmr_bins", "relieff_k"});
      if (s.contains("method")) cfg.selection.method = parse_ranking_method(s.at("method").get<std::string>());
      read(s, "search", cfg.selection.search);
      read(s, "step", cfg.selection.step);
      read(s, "max_dim", cfg.selection.max_dim);
      if (s.contains("fixed_dim") && !s.at("fixed_dim").is_null()) cfg.selection.fixed_dim = s.at("fixed_dim").get<std::size_t>();
      read(s, "mrmr_bins", cfg.selection.mrmr_bins);
      read(s, "relieff_k", cfg.selection.relieff_k);
    }

    if (doc.contains("cv")) {
      const auto& c = doc.at("cv");
      allow_keys(c, "cv", {"k", "iterations", "classifier", "grid_search", "probability", "vote"});
      read(c, "k", cfg.cv.k);
      read(c, "iterations", cfg.cv.iterations);
      read(c, "grid_search", cfg.cv.grid_search);
      if (c.contains("probability")) {
        const auto p = c.at("probability").get<std::string>();
        if (p == "logistic") cfg.cv.probability = ProbabilityMode::logistic;
        else if (p == "platt") cfg.cv.probability = ProbabilityMode::platt;
        else throw ConfigError("unknown probability mode '" + p + "'");
      }
      if (c.contains("vote")) {
        const auto v = c.at("vote").get<std::string>();
        if (v == "strict") cfg.cv.vote = VoteMode::strict;
        else if (v == "permissive") cfg.cv.vote = VoteMode::permissive;
        else throw ConfigError("unknown vote mode '" + v + "'");
      }
      if (c.contains("classifier")) {
        const auto& k = c.at("classifier");
        allow_keys(k, "cv.classifier", {"type", "kernel", "c", "gamma", "coef0", "k", "metric"});
        const std::string type = k.value("type", "svm");
        if (type == "svm") {
          KernelSpec spec;
          if (k.contains("kernel")) spec.kind = parse_kernel_kind(k.at("kernel").get<std::string>());
          read(k, "c", spec.c);
          read(k, "coef0", spec.coef0);
          if (k.contains("gamma") && !k.at("gamma").is_null()) spec.gamma = k.at("gamma").get<double>();
          cfg.cv.classifier = spec;
        } else if (type == "knn") {
          KnnSpec spec;
          read(k, "k", spec.k);
          if (k.contains("metric")) spec.metric = parse_distance_metric(k.at("metric").get<std::string>());
          cfg.cv.classifier = spec;
        } else {
          throw ConfigError("unknown classifier type '" + type + "'");
        }
      }
    }

    if (doc.contains("synth")) {
      const auto& s = doc.at("synth");
      allow_keys(s, "synth",
                 {"n_per_class", "n_heldout_per_class", "heart_rate_bpm", "s1_band_hz", "s2_band_hz", "murmur_band_hz",
                  "murmur_rel_power", "channel_gains", "channel_delays_ms", "ambient_noise_std"});
      auto& p = cfg.synth.params;
      read(s, "n_per_class", cfg.synth.n_per_class);
      read(s, "n_heldout_per_class", cfg.synth.n_heldout_per_class);
      read(s, "heart_rate_bpm", p.heart_rate_bpm);
      if (s.contains("s1_band_hz")) p.s1_band = read_band(s.at("s1_band_hz"), "synth.s1_band_hz");
      if (s.contains("s2_band_hz")) p.s2_band = read_band(s.at("s2_band_hz"), "synth.s2_band_hz");
      if (s.contains("murmur_band_hz")) p.murmur_band = read_band(s.at("murmur_band_hz"), "synth.murmur_band_hz");
      read(s, "murmur_rel_power", p.murmur_rel_power);
      read(s, "channel_gains", p.channel_gains);
      read(s, "channel_delays_ms", p.channel_delays_ms);
      read(s, "ambient_noise_std", p.ambient_noise_std);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config value: ") + e.what());
  }

  cfg.paths.dataset_dir = resolve(cfg.paths.dataset_dir, base_dir);
  cfg.paths.manifest = resolve(cfg.paths.manifest, base_dir);
  cfg.paths.annotations = resolve(cfg.paths.annotations, base_dir);
  cfg.paths.output_dir = resolve(cfg.paths.output_dir, base_dir);
  cfg.paths.cache_dir = cfg.paths.cache_dir.empty() ? cfg.paths.output_dir / "cache" : resolve(cfg.paths.cache_dir, base_dir);

  cfg.cv.rng_seed = cfg.seed;
  cfg.cv.jobs = cfg.jobs;
  cfg.synth.params.rng_seed = cfg.seed;
  cfg.preprocess.strict = cfg.strict;

  // Validation of everything that does not need the file system.
  if (cfg.jobs < 1) throw ConfigError("jobs must be at least 1");
  validate(cfg.cv);
  validate(cfg.synth.params);
  if (cfg.synth.n_per_class < 1) throw ConfigError("synth.n_per_class must be at least 1");
  if (cfg.selection.step < 1) throw ConfigError("selection.step must be at least 1");
  if (cfg.selection.fixed_dim && *cfg.selection.fixed_dim < 1) throw ConfigError("selection.fixed_dim must be at least 1");
  validate_spec(cfg.default_features, cfg.strict);
  for (const auto& [c, spec] : cfg.channel_features) {
    validate_channels({c}, "features.channels");
    validate_spec(spec, cfg.strict);
  }
  validate_channels(cfg.fusion.channels, "fusion.channels");
  validate_channels(cfg.fusion.search_channels, "fusion.search_channels");
  for (const auto& subset : cfg.fusion.search_family) validate_channels(subset, "fusion.search_family");
  if (cfg.fusion.channels.empty()) throw ConfigError("fusion.channels must not be empty");
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_config(doc, path.parent_path());
}

json to_json(const PipelineConfig& cfg) {
  json j;
  j["paths"] = {{"dataset_dir", cfg.paths.dataset_dir.generic_string()},
                {"manifest", cfg.paths.manifest.generic_string()},
                {"annotations", cfg.paths.annotations.generic_string()},
                {"output_dir", cfg.paths.output_dir.generic_string()},
                {"cache_dir", cfg.paths.cache_dir.generic_string()}};
  j["seed"] = cfg.seed;
  j["jobs"] = cfg.jobs;
  j["strict"] = cfg.strict;
  j["preprocess"] = {{"filter_order", cfg.preprocess.filter.order},
                     {"cutoff_hz", cfg.preprocess.filter.cutoff_hz},
                     {"target_fs_hz", cfg.preprocess.target_fs_hz}};
  json channels = json::object();
  for (int c : cfg.extracted_channels()) channels[std::to_string(c)] = spec_json(cfg.spec_for(c));
  j["features"] = {{"family", to_string(cfg.default_features.family)},
                   {"default", spec_json(cfg.default_features)},
                   {"channels", channels}};
  j["fusion"] = {{"mode", to_string(cfg.fusion.mode)},
                 {"channels", cfg.fusion.channels},
                 {"search_channels", cfg.fusion.search_channels},
                 {"search_family", cfg.fusion.search_family}};
  const auto& s = cfg.selection;
  j["selection"] = {{"method", to_string(s.method)},
                    {"search", s.search},
                    {"step", s.step},
                    {"max_dim", s.max_dim},
                    {"fixed_dim", s.fixed_dim ? json(*s.fixed_dim) : json(nullptr)},
                    {"mrmr_bins", s.mrmr_bins},
                    {"relieff_k", s.relieff_k}};
  json classifier;
  if (const auto* k = std::get_if<KernelSpec>(&cfg.cv.classifier)) {
    classifier = {{"type", "svm"},
                  {"kernel", to_string(k->kind)},
                  {"c", k->c},
                  {"gamma", k->gamma ? json(*k->gamma) : json(nullptr)},
                  {"coef0", k->coef0}};
  } else {
    const auto& knn = std::get<KnnSpec>(cfg.cv.classifier);
    classifier = {{"type", "knn"}, {"k", knn.k}, {"metric", to_string(knn.metric)}};
  }
  j["cv"] = {{"k", cfg.cv.k},
             {"iterations", cfg.cv.iterations},
             {"classifier", classifier},
             {"grid_search", cfg.cv.grid_search},
             {"probability", cfg.cv.probability == ProbabilityMode::platt ? "platt" : "logistic"},
             {"vote", cfg.cv.vote == VoteMode::strict ? "strict" : "permissive"}};
  const auto& p = cfg.synth.params;
  j["synth"] = {{"n_per_class", cfg.synth.n_per_class},
                {"n_heldout_per_class", cfg.synth.n_heldout_per_class},
                {"heart_rate_bpm", p.heart_rate_bpm},
                {"s1_band_hz", {p.s1_band.lo_hz, p.s1_band.hi_hz}},
                {"s2_band_hz", {p.s2_band.lo_hz, p.s2_band.hi_hz}},
                {"murmur_band_hz", {p.murmur_band.lo_hz, p.murmur_band.hi_hz}},
                {"murmur_rel_power", p.murmur_rel_power},
                {"channel_gains", p.channel_gains},
                {"channel_delays_ms", p.channel_delays_ms},
                {"ambient_noise_std", p.ambient_noise_std}};
  return j;
}

}  // namespace pcg::cli
