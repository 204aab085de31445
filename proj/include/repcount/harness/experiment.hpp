#pragma once

#include "repcount/repcount.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace repcount::harness {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "repcount 1.0.0";
inline constexpr int kSchemaVersion = 1;

inline std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

/// Shortest round-trip decimal text for a double.
inline std::string format_double(double v) {
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

/// Largest variable index appearing in form text, e.g. 7 for "x1^2 + x7^2".
inline std::size_t infer_variable_count(std::string_view text) {
  std::size_t s = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != 'x') continue;
    std::size_t k = 0, j = i + 1;
    while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) k = k * 10 + (text[j++] - '0');
    s = std::max(s, k);
  }
  if (s == 0) throw InputError("form mentions no variables");
  return s;
}

struct ExperimentSpec {
  std::string form_text;
  std::size_t s = 0;
  int m = 0;
  std::vector<TargetForm> family;
  std::vector<std::string> labels;  // one per family member
  DensityConfig density;
  bool seed_given = false;
  std::optional<std::string> csv_path, json_path;
  double max_candidates = 1e8;

  Form form() const { return parse_form(form_text, s); }

  static ExperimentSpec from_json(const Json& j, const std::filesystem::path& base_dir = {}) {
    ExperimentSpec spec;
    if (j.contains("schema") && j.at("schema").get<int>() != kSchemaVersion)
      throw InputError("unsupported experiment schema version");
    if (j.contains("form")) {
      spec.form_text = j.at("form").get<std::string>();
    } else if (j.contains("form_file")) {
      auto path = base_dir / j.at("form_file").get<std::string>();
      std::ifstream in(path);
      if (!in) throw InputError("form file not found: " + path.string());
      std::stringstream ss;
      ss << in.rdbuf();
      spec.form_text = ss.str();
    } else {
      throw InputError("experiment spec needs \"form\" or \"form_file\"");
    }
    spec.s = j.contains("s") ? j.at("s").get<std::size_t>() : infer_variable_count(spec.form_text);
    const Json& fam = j.at("family");
    const std::string kind = fam.at("kind").get<std::string>();
    if (kind == "diag-scale") {
      auto rows = fam.at("base").get<std::vector<std::vector<long long>>>();
      const std::size_t m = rows.size();
      IntMatrix base(m, m);
      for (std::size_t a = 0; a < m; ++a) {
        if (rows[a].size() != m) throw InputError("family base must be square");
        for (std::size_t b = 0; b < m; ++b) base(a, b) = rows[a][b];
      }
      spec.m = static_cast<int>(m);
      for (long long n : fam.at("n").get<std::vector<long long>>()) {
        IntMatrix scaled = base;
        for (std::size_t a = 0; a < m; ++a)
          for (std::size_t b = 0; b < m; ++b) scaled(a, b) *= n;
        spec.family.push_back(TargetForm::from_gram(scaled));
        spec.labels.push_back(std::to_string(n));
      }
    } else if (kind == "explicit") {
      spec.m = fam.at("m").get<int>();
      for (auto& text : fam.at("psi").get<std::vector<std::string>>()) {
        spec.family.push_back(parse_psi(text, spec.m));
        spec.labels.push_back(text);
      }
    } else {
      throw InputError("unknown family kind: " + kind);
    }
    if (spec.family.empty()) throw InputError("experiment family is empty");

    if (j.contains("density")) {
      const Json& d = j.at("density");
      auto& c = spec.density;
      c.p_max = d.value("p_max", c.p_max);
      c.eps = d.value("eps", c.eps);
      c.samples = d.value("samples", c.samples);
      c.check_half_eps = d.value("check_half_eps", c.check_half_eps);
      if (d.contains("seed")) {
        c.seed = d.at("seed").get<std::uint64_t>();
        spec.seed_given = true;
      }
      if (d.contains("levels")) {
        const Json& l = d.at("levels");
        c.schedule.small_prime_max = l.value("small_prime_max", c.schedule.small_prime_max);
        c.schedule.small_level = l.value("small_level", c.schedule.small_level);
        c.schedule.default_level = l.value("default_level", c.schedule.default_level);
        if (l.contains("overrides"))
          for (auto& [p, lv] : l.at("overrides").items()) c.schedule.overrides[std::stoll(p)] = lv.get<int>();
      }
    }
    if (!spec.seed_given) throw InputError("experiment spec needs an explicit density.seed");
    spec.max_candidates = j.value("max_candidates", spec.max_candidates);
    if (j.contains("outputs")) {
      const Json& o = j.at("outputs");
      if (o.contains("csv")) spec.csv_path = (base_dir / o.at("csv").get<std::string>()).string();
      if (o.contains("json")) spec.json_path = (base_dir / o.at("json").get<std::string>()).string();
    }
    return spec;
  }

  static ExperimentSpec from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("experiment spec not found: " + path.string());
    Json j;
    try {
      j = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw InputError(std::string("invalid experiment JSON: ") + e.what());
    }
    return from_json(j, path.parent_path());
  }
};

struct ResultRecord {
  std::string digest;
  std::string label;
  std::string psi;
  std::optional<std::uint64_t> exact_count;
  double magnitude_factor = 0;
  double chi_inf = 0, chi_inf_se = 0;
  double euler = 0, euler_se = 0;
  bool local_obstruction = false;
  double prediction = 0, prediction_se = 0;
  std::optional<double> ratio;
  double count_seconds = 0, density_seconds = 0;
  std::string tool_version = kToolVersion;
  std::string status = "ok";

  Json to_json() const {
    Json j;
    j["digest"] = digest;
    j["label"] = label;
    j["psi"] = psi;
    j["exact_count"] = exact_count ? Json(*exact_count) : Json(nullptr);
    j["magnitude_factor"] = magnitude_factor;
    j["chi_inf"] = chi_inf;
    j["chi_inf_se"] = chi_inf_se;
    j["euler_product"] = euler;
    j["euler_product_se"] = euler_se;
    j["local_obstruction"] = local_obstruction;
    j["prediction"] = prediction;
    j["prediction_se"] = prediction_se;
    j["ratio"] = ratio ? Json(*ratio) : Json(nullptr);
    j["count_seconds"] = count_seconds;
    j["density_seconds"] = density_seconds;
    j["tool_version"] = tool_version;
    j["status"] = status;
    return j;
  }

  static ResultRecord from_json(const Json& j) {
    ResultRecord r;
    r.digest = j.at("digest").get<std::string>();
    r.label = j.at("label").get<std::string>();
    r.psi = j.at("psi").get<std::string>();
    if (!j.at("exact_count").is_null()) r.exact_count = j.at("exact_count").get<std::uint64_t>();
    r.magnitude_factor = j.at("magnitude_factor").get<double>();
    r.chi_inf = j.at("chi_inf").get<double>();
    r.chi_inf_se = j.at("chi_inf_se").get<double>();
    r.euler = j.at("euler_product").get<double>();
    r.euler_se = j.at("euler_product_se").get<double>();
    r.local_obstruction = j.at("local_obstruction").get<bool>();
    r.prediction = j.at("prediction").get<double>();
    r.prediction_se = j.at("prediction_se").get<double>();
    if (!j.at("ratio").is_null()) r.ratio = j.at("ratio").get<double>();
    r.count_seconds = j.at("count_seconds").get<double>();
    r.density_seconds = j.at("density_seconds").get<double>();
    r.tool_version = j.at("tool_version").get<std::string>();
    r.status = j.at("status").get<std::string>();
    return r;
  }
};

/// Canonical text of everything that determines a verify row.
inline std::string canonical_instance(const Form& f, const TargetForm& psi, const DensityConfig& c,
                                      double max_candidates) {
  std::ostringstream o;
  o << "repcount-instance-v" << kSchemaVersion << "\n"
    << "s=" << f.s() << "\nform=" << to_string(f) << "\nm=" << psi.m() << "\npsi=" << to_string(psi)
    << "\np_max=" << c.p_max << "\nlevels=" << c.schedule.small_prime_max << "," << c.schedule.small_level << ","
    << c.schedule.default_level;
  for (auto& [p, l] : c.schedule.overrides) o << ";" << p << ":" << l;
  o << "\neps=" << format_double(c.eps) << "\nsamples=" << c.samples << "\nseed=" << c.seed
    << "\nhalf_eps=" << c.check_half_eps << "\nmax_candidates=" << format_double(max_candidates) << "\n";
  return o.str();
}

/// One JSON file per record, named by digest, under REPCOUNT_CACHE_DIR.
class ResultCache {
public:
  explicit ResultCache(std::optional<std::filesystem::path> dir) : dir_(std::move(dir)) {}

  static ResultCache from_environment() {
    const char* env = std::getenv("REPCOUNT_CACHE_DIR");
    if (!env || !*env) return ResultCache(std::nullopt);
    return ResultCache(std::filesystem::path(env));
  }

  bool enabled() const noexcept { return dir_.has_value(); }

  std::optional<ResultRecord> load(const std::string& digest) const {
    if (!dir_) return std::nullopt;
    std::ifstream in(*dir_ / (digest + ".json"));
    if (!in) return std::nullopt;
    try {
      auto rec = ResultRecord::from_json(Json::parse(in));
      if (rec.digest != digest) return std::nullopt;
      return rec;
    } catch (const std::exception&) {
      return std::nullopt;  // unreadable entries are recomputed
    }
  }

  void store(const ResultRecord& rec) const {
    if (!dir_) return;
    std::filesystem::create_directories(*dir_);
    std::random_device rd;
    const auto tmp = *dir_ / (rec.digest + ".tmp." + std::to_string(rd()) + std::to_string(rd()));
    {
      std::ofstream out(tmp);
      if (!out) throw Error("cannot write cache file " + tmp.string());
      out << rec.to_json().dump(2) << "\n";
    }
    std::filesystem::rename(tmp, *dir_ / (rec.digest + ".json"));
  }

private:
  std::optional<std::filesystem::path> dir_;
};

/// Exact count versus the main-term prediction for one target.
inline ResultRecord run_instance(const Form& f, const TargetForm& psi, const std::string& label,
                                 const DensityConfig& cfg, double max_candidates) {
  using clock = std::chrono::steady_clock;
  ResultRecord rec;
  rec.digest = sha256_hex(canonical_instance(f, psi, cfg, max_candidates));
  rec.label = label;
  rec.psi = to_string(psi);
  std::vector<std::string> problems;
  auto t0 = clock::now();
  try {
    rec.exact_count = count_representations(f, psi, EnumerationOptions{cfg.threads, max_candidates});
  } catch (const Error& e) {
    problems.push_back(std::string("count: ") + e.what());
  }
  auto t1 = clock::now();
  try {
    auto mt = main_term(f, psi, cfg);
    rec.magnitude_factor = mt.magnitude_factor;
    rec.chi_inf = mt.chi_inf.value;
    rec.chi_inf_se = mt.chi_inf.std_error;
    rec.euler = mt.euler.total.value;
    rec.euler_se = mt.euler.total.std_error;
    rec.local_obstruction = mt.euler.local_obstruction;
    rec.prediction = mt.prediction;
    rec.prediction_se = mt.prediction_std_error;
  } catch (const Error& e) {
    problems.push_back(std::string("prediction: ") + e.what());
  }
  auto t2 = clock::now();
  rec.count_seconds = std::chrono::duration<double>(t1 - t0).count();
  rec.density_seconds = std::chrono::duration<double>(t2 - t1).count();
  if (rec.exact_count && rec.prediction > 0) rec.ratio = static_cast<double>(*rec.exact_count) / rec.prediction;
  if (!problems.empty()) {
    rec.status = "failed";
    for (auto& p : problems) rec.status += "; " + p;
  }
  return rec;
}

inline std::vector<ResultRecord> run_experiment(const ExperimentSpec& spec, const ResultCache& cache) {
  const Form f = spec.form();
  std::vector<ResultRecord> rows;
  for (std::size_t k = 0; k < spec.family.size(); ++k) {
    const auto digest = sha256_hex(canonical_instance(f, spec.family[k], spec.density, spec.max_candidates));
    if (auto hit = cache.load(digest)) {
      rows.push_back(*hit);
      continue;
    }
    rows.push_back(run_instance(f, spec.family[k], spec.labels[k], spec.density, spec.max_candidates));
    if (rows.back().status == "ok") cache.store(rows.back());
  }
  return rows;
}

/// RFC 4180 field quoting.
inline std::string csv_field(const std::string& v) {
  if (v.find_first_of(",\"\r\n") == std::string::npos) return v;
  std::string out = "\"";
  for (char c : v) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (k) out << ',';
    out << csv_field(fields[k]);
  }
  out << "\r\n";
}

inline const std::vector<std::string>& record_columns() {
  static const std::vector<std::string> cols = {
      "digest", "label", "psi", "exact_count", "magnitude_factor", "chi_inf", "chi_inf_se", "euler_product",
      "euler_product_se", "local_obstruction", "prediction", "prediction_se", "ratio", "count_seconds",
      "density_seconds", "tool_version", "status"};
  return cols;
}

inline std::string json_scalar_text(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_float()) return format_double(v.get<double>());
  return v.dump();
}

inline void write_records_csv(std::ostream& out, const std::vector<ResultRecord>& rows) {
  write_csv_row(out, record_columns());
  for (auto& r : rows) {
    Json j = r.to_json();
    std::vector<std::string> f;
    for (auto& c : record_columns()) f.push_back(json_scalar_text(j.at(c)));
    write_csv_row(out, f);
  }
}

inline Json records_json(const std::vector<ResultRecord>& rows) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["tool_version"] = kToolVersion;
  j["rows"] = Json::array();
  for (auto& r : rows) j["rows"].push_back(r.to_json());
  return j;
}

} // namespace repcount::harness
