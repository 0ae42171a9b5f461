#include "roughscat/cli/config.hpp"

#include <openssl/evp.h>

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace roughscat::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

std::string format_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(const std::string& key, const std::string& v) {
  const std::string t = unquote(trim(v));
  if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw InvalidArgument("config: value of '" + key + "' is not a number: '" + v + "'");
  }
  return x;
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
  const std::string t = unquote(trim(v));
  std::int64_t x = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw InvalidArgument("config: value of '" + key + "' is not an integer: '" + v + "'");
  }
  return x;
}

bool parse_bool(const std::string& key, const std::string& v) {
  const std::string t = unquote(trim(v));
  if (t == "true" || t == "1") return true;
  if (t == "false" || t == "0") return false;
  throw InvalidArgument("config: value of '" + key + "' is not a boolean: '" + v + "'");
}

Vec3 parse_vec3(const std::string& key, const std::string& v) {
  std::string t = trim(v);
  if (t.size() >= 2 && t.front() == '[' && t.back() == ']') t = t.substr(1, t.size() - 2);
  std::vector<std::string> parts;
  std::stringstream ss(t);
  for (std::string item; std::getline(ss, item, ',');) parts.push_back(item);
  if (parts.size() != 3) throw InvalidArgument("config: '" + key + "' needs three components");
  return {parse_double(key, parts[0]), parse_double(key, parts[1]), parse_double(key, parts[2])};
}

struct Field {
  const char* key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

Field real(const char* key, double RunConfig::*m) {
  return {key, [key, m](RunConfig& c, const std::string& v) { c.*m = parse_double(key, v); },
          [m](const RunConfig& c) { return format_double(c.*m); }};
}

template <class Int>
Field integer(const char* key, Int RunConfig::*m) {
  return {key, [key, m](RunConfig& c, const std::string& v) { c.*m = static_cast<Int>(parse_int(key, v)); },
          [m](const RunConfig& c) { return std::to_string(c.*m); }};
}

Field text(const char* key, std::string RunConfig::*m) {
  return {key, [m](RunConfig& c, const std::string& v) { c.*m = unquote(trim(v)); },
          [m](const RunConfig& c) { return "\"" + c.*m + "\""; }};
}

// Canonical order; the KL hash covers the first kKLFields entries.
const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      text("geometry", &RunConfig::geometry),
      real("geometry.radius", &RunConfig::radius),
      real("geometry.major_radius", &RunConfig::major_radius),
      real("geometry.minor_radius", &RunConfig::minor_radius),
      real("geometry.half_width", &RunConfig::half_width),
      integer("landmarks.q", &RunConfig::q),
      real("covariance.diag_nu", &RunConfig::diag_nu),
      real("covariance.diag_scale", &RunConfig::diag_scale),
      real("covariance.diag_amplitude", &RunConfig::diag_amplitude),
      real("covariance.offdiag_nu", &RunConfig::offdiag_nu),
      real("covariance.offdiag_scale", &RunConfig::offdiag_scale),
      real("covariance.offdiag_amplitude", &RunConfig::offdiag_amplitude),
      real("covariance.tol", &RunConfig::cholesky_tol),
      real("alpha", &RunConfig::alpha),
      real("kappa", &RunConfig::kappa),
      {"direction", [](RunConfig& c, const std::string& v) { c.direction = parse_vec3("direction", v); },
       [](const RunConfig& c) {
         return "[" + format_double(c.direction.x()) + ", " + format_double(c.direction.y()) + ", " +
                format_double(c.direction.z()) + "]";
       }},
      real("interface.half_width", &RunConfig::interface_half_width),
      integer("interface.grid", &RunConfig::interface_grid),
      integer("eval.points", &RunConfig::eval_points),
      real("eval.radius", &RunConfig::eval_radius),
      integer("solve.sample", &RunConfig::sample),
      integer("solve.degree", &RunConfig::degree),
      integer("bem.p_max", &RunConfig::p_max),
      integer("mlmc.max_degree", &RunConfig::max_degree),
      integer("mlmc.pilot", &RunConfig::pilot),
      integer("mlmc.finest_samples", &RunConfig::finest_samples),
      real("mlmc.epsilon", &RunConfig::epsilon),
      {"mlmc.reference", [](RunConfig& c, const std::string& v) { c.reference = parse_bool("mlmc.reference", v); },
       [](const RunConfig& c) { return std::string(c.reference ? "true" : "false"); }},
      integer("seed", &RunConfig::seed),
      text("kl.cache", &RunConfig::kl_cache),
  };
  return f;
}

constexpr int kKLFields = 13;

// kl.cache only says where files go, so it is left out of the hash.
bool hashed(const Field& f) { return std::string(f.key) != "kl.cache"; }

}  // namespace

void RunConfig::validate() {
  auto positive = [](double x, const char* what) {
    if (!(x > 0.0)) throw InvalidArgument(std::string("config: ") + what + " must be positive");
  };
  positive(radius, "geometry.radius");
  positive(major_radius, "geometry.major_radius");
  positive(minor_radius, "geometry.minor_radius");
  positive(half_width, "geometry.half_width");
  if (q < 1) throw InvalidArgument("config: landmarks.q must be at least 1");
  positive(diag_nu, "covariance.diag_nu");
  positive(diag_scale, "covariance.diag_scale");
  positive(diag_amplitude, "covariance.diag_amplitude");
  positive(offdiag_nu, "covariance.offdiag_nu");
  positive(offdiag_scale, "covariance.offdiag_scale");
  if (!(offdiag_amplitude >= 0.0)) throw InvalidArgument("config: covariance.offdiag_amplitude must be nonnegative");
  positive(cholesky_tol, "covariance.tol");
  if (!(alpha >= 0.0)) throw InvalidArgument("config: alpha must be nonnegative");
  positive(kappa, "kappa");
  const double dn = direction.norm();
  if (!(dn > 0.0) || !std::isfinite(dn)) throw InvalidArgument("config: direction must be a nonzero vector");
  direction /= dn;
  positive(interface_half_width, "interface.half_width");
  if (interface_grid < 1) throw InvalidArgument("config: interface.grid must be at least 1");
  if (eval_points < 1) throw InvalidArgument("config: eval.points must be at least 1");
  positive(eval_radius, "eval.radius");
  if (sample < -1) throw InvalidArgument("config: solve.sample must be nonnegative or -1 (y = 0)");
  if (degree < 0 || p_max < 0) throw InvalidArgument("config: degrees must be nonnegative");
  if (max_degree < 0) throw InvalidArgument("config: mlmc.max_degree must be nonnegative");
  if (pilot < 2) throw InvalidArgument("config: mlmc.pilot must be at least 2");
  if (finest_samples < 1) throw InvalidArgument("config: mlmc.finest_samples must be at least 1");
  if (!(epsilon >= 0.0)) throw InvalidArgument("config: mlmc.epsilon must be nonnegative");
}

geometry::MultiPatchSurface RunConfig::surface() const {
  if (geometry == "torus") return geometry::make_torus(major_radius, minor_radius);
  if (geometry == "sphere") return geometry::make_sphere(radius);
  if (geometry == "cuboid") return geometry::make_cuboid(half_width);
  return geometry::read_multipatch(geometry);
}

randfield::CovarianceModel RunConfig::covariance() const {
  randfield::CovarianceModel m;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      m.terms[3 * a + b] = a == b ? randfield::KernelTerm{diag_amplitude, diag_scale, {diag_nu, 1.0}}
                                  : randfield::KernelTerm{offdiag_amplitude, offdiag_scale, {offdiag_nu, 1.0}};
    }
  }
  m.validate();
  return m;
}

std::string RunConfig::canonical() const {
  std::string out;
  for (const Field& f : fields()) out += std::string(f.key) + " = " + f.get(*this) + "\n";
  return out;
}

std::string RunConfig::hash() const {
  std::string text;
  for (const Field& f : fields()) {
    if (hashed(f)) text += std::string(f.key) + " = " + f.get(*this) + "\n";
  }
  return sha256_hex(text);
}

std::string RunConfig::kl_hash() const {
  std::string text;
  for (int k = 0; k < kKLFields; ++k) text += std::string(fields()[k].key) + " = " + fields()[k].get(*this) + "\n";
  return sha256_hex(text);
}

void set_field(RunConfig& config, const std::string& key, const std::string& value) {
  for (const Field& f : fields()) {
    if (key == f.key) {
      f.set(config, value);
      return;
    }
  }
  throw InvalidArgument("config: unknown key '" + key + "'");
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::stringstream ss(text);
  std::string section;
  int line_no = 0;
  for (std::string line; std::getline(ss, line);) {
    ++line_no;
    // '#' inside a quoted string is kept.
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.resize(i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']' && line.find('=') == std::string::npos) {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    set_field(c, section.empty() ? key : section + "." + key, line.substr(eq + 1));
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void apply_overrides(RunConfig& config, const std::vector<std::string>& assignments) {
  for (const std::string& a : assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos) throw InvalidArgument("override '" + a + "' is not of the form key=value");
    set_field(config, trim(a.substr(0, eq)), a.substr(eq + 1));
  }
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

}  // namespace roughscat::cli
