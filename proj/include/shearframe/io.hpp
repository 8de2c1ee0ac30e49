#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>
#include <openssl/evp.h>

#include "cartoon.hpp"
#include "shearlet.hpp"
#include "transform.hpp"

namespace shearframe {

using json = nlohmann::json;

// ---- number formatting -----------------------------------------------------

/// Six significant digits, trailing zeros kept ("4.00000").
inline std::string fmt6(double v) {
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), "%#.6g", v);
  return buf.data();
}

/// Shortest round-trip representation.
inline std::string fmt17(double v) {
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

/// In-memory CSV table; rendered with a fixed formatter so equal inputs give
/// equal bytes.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) {
    if (row.size() != header.size()) throw std::invalid_argument("CSV row width mismatch");
    rows.push_back(std::move(row));
  }

  [[nodiscard]] std::string str() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& r) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (i) out += ',';
        out += r[i];
      }
      out += '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
  }
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& p, const std::string& data) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw std::runtime_error("write failed for " + p.string());
}

inline std::string sha256_hex(const std::string& data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

// ---- PGM -------------------------------------------------------------------

/// Binary 16-bit PGM. Values are mapped linearly from [lo, hi] onto
/// [0, 65535]; the range is stored in a "# range lo hi" comment so that
/// read_pgm can undo the mapping. Row i of the file is image row i.
inline std::string encode_pgm(const Image& img) {
  img.validate();
  double lo = img.pixels.front();
  double hi = lo;
  for (double v : img.pixels) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double span = hi > lo ? hi - lo : 1.0;
  std::string out = "P5\n# range " + fmt17(lo) + " " + fmt17(hi) + "\n" + std::to_string(img.M) + " " +
                    std::to_string(img.M) + "\n65535\n";
  out.reserve(out.size() + 2 * img.pixels.size());
  for (double v : img.pixels) {
    const auto q = static_cast<std::uint16_t>(std::lround(std::clamp((v - lo) / span, 0.0, 1.0) * 65535.0));
    out += static_cast<char>(q >> 8);
    out += static_cast<char>(q & 0xff);
  }
  return out;
}

inline void write_pgm(const std::filesystem::path& p, const Image& img) { write_file(p, encode_pgm(img)); }

inline Image decode_pgm(const std::string& data) {
  std::size_t pos = 0;
  double lo = 0.0;
  double hi = 1.0;
  bool have_range = false;
  auto skip_space_and_comments = [&] {
    while (pos < data.size()) {
      if (std::isspace(static_cast<unsigned char>(data[pos]))) {
        ++pos;
      } else if (data[pos] == '#') {
        const std::size_t end = data.find('\n', pos);
        std::istringstream cs(data.substr(pos + 1, end - pos - 1));
        std::string tag;
        if (cs >> tag && tag == "range" && cs >> lo >> hi) have_range = true;
        pos = end == std::string::npos ? data.size() : end + 1;
      } else {
        break;
      }
    }
  };
  auto read_int = [&] {
    skip_space_and_comments();
    std::size_t start = pos;
    while (pos < data.size() && std::isdigit(static_cast<unsigned char>(data[pos]))) ++pos;
    if (start == pos) throw std::runtime_error("malformed PGM header");
    return std::stoul(data.substr(start, pos - start));
  };
  if (data.compare(0, 2, "P5") != 0) throw std::runtime_error("not a binary PGM (P5)");
  pos = 2;
  const std::size_t w = read_int();
  const std::size_t h = read_int();
  const std::size_t maxval = read_int();
  if (w != h) throw std::runtime_error("PGM image must be square");
  if (maxval == 0 || maxval > 65535) throw std::runtime_error("PGM maxval out of range");
  ++pos;  // single whitespace before the raster
  const std::size_t bytes = maxval > 255 ? 2 : 1;
  if (data.size() < pos + w * h * bytes) throw std::runtime_error("PGM raster truncated");
  Image img(w);
  for (std::size_t i = 0; i < w * h; ++i) {
    unsigned q = static_cast<unsigned char>(data[pos + i * bytes]);
    if (bytes == 2) q = (q << 8) | static_cast<unsigned char>(data[pos + i * bytes + 1]);
    const double t = static_cast<double>(q) / static_cast<double>(maxval);
    img.pixels[i] = have_range ? lo + t * (hi - lo) : t;
  }
  return img;
}

inline Image read_pgm(const std::filesystem::path& p) { return decode_pgm(read_file(p)); }

// ---- coefficient container -------------------------------------------------

/// One JSON header line {"M", "dtype", "channels": [{cone, j, k}]} followed by
/// the channels as little-endian complex128, channel-major, row-major.
inline std::string encode_stack(const FilterBank& fb, const CoefficientStack& st) {
  if (st.channels.size() != fb.size()) throw std::invalid_argument("stack does not match filter bank");
  json h;
  h["M"] = fb.M;
  h["dtype"] = "complex128-le";
  h["channels"] = json::array();
  for (const auto& ch : fb.channels) h["channels"].push_back({{"cone", to_string(ch.kind)}, {"j", ch.j}, {"k", ch.k}});
  std::string out = h.dump() + "\n";
  static_assert(std::endian::native == std::endian::little, "container writer assumes a little-endian host");
  for (const auto& c : st.channels) {
    out.append(reinterpret_cast<const char*>(c.data()), c.size() * sizeof(std::complex<double>));
  }
  return out;
}

struct StackFile {
  json header;
  CoefficientStack stack;
};

inline StackFile decode_stack(const std::string& data) {
  const std::size_t nl = data.find('\n');
  if (nl == std::string::npos) throw std::runtime_error("coefficient container: missing header");
  StackFile f;
  f.header = json::parse(data.substr(0, nl));
  const std::size_t M = f.header.at("M").get<std::size_t>();
  const std::size_t nch = f.header.at("channels").size();
  const std::size_t bytes = nch * M * M * sizeof(std::complex<double>);
  if (data.size() - nl - 1 != bytes) throw std::runtime_error("coefficient container: payload size mismatch");
  f.stack.M = M;
  f.stack.channels.assign(nch, cvec(M * M));
  const char* p = data.data() + nl + 1;
  for (auto& c : f.stack.channels) {
    std::memcpy(c.data(), p, M * M * sizeof(std::complex<double>));
    p += M * M * sizeof(std::complex<double>);
  }
  return f;
}

// ---- JSON mappings ---------------------------------------------------------

inline json to_json(const CartoonSpec& s) {
  json j;
  j["rho0"] = s.rho0;
  j["harmonics"] = json::array();
  for (const auto& h : s.harmonics) j["harmonics"].push_back({h.n, h.a});
  j["center"] = {s.cx, s.cy};
  auto poly = [](const std::vector<PolyTerm>& p) {
    json a = json::array();
    for (const auto& t : p) a.push_back({t.px, t.py, t.c});
    return a;
  };
  j["f0_coeffs"] = poly(s.f0);
  j["f1_coeffs"] = poly(s.f1);
  j["nu"] = s.nu;
  return j;
}

inline CartoonSpec cartoon_from_json(const json& j) {
  CartoonSpec s;
  s.rho0 = j.value("rho0", s.rho0);
  if (j.contains("harmonics")) {
    s.harmonics.clear();
    for (const auto& h : j.at("harmonics")) s.harmonics.push_back({h.at(0).get<int>(), h.at(1).get<double>()});
  }
  if (j.contains("center")) {
    s.cx = j.at("center").at(0).get<double>();
    s.cy = j.at("center").at(1).get<double>();
  }
  auto poly = [](const json& a) {
    std::vector<PolyTerm> p;
    for (const auto& t : a) p.push_back({t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<double>()});
    return p;
  };
  if (j.contains("f0_coeffs")) s.f0 = poly(j.at("f0_coeffs"));
  if (j.contains("f1_coeffs")) s.f1 = poly(j.at("f1_coeffs"));
  s.nu = j.value("nu", s.nu);
  return s;
}

inline json to_json(const ShearSystemConfig& c) {
  json j;
  if (const auto* b = std::get_if<BSplineGenerator>(&c.generator)) {
    j["generator"] = {{"type", "bspline"}, {"N1", b->n1}, {"N2", b->n2}};
  } else {
    const auto& p = std::get<PseudoGenerator>(c.generator);
    j["generator"] = {{"type", "pseudo"},
                      {"N1", p.wavelet.n()},
                      {"l1", p.wavelet.l()},
                      {"N2", p.scaling.n()},
                      {"l2", p.scaling.l()}};
  }
  j["alpha"] = c.alpha;
  j["j_max"] = c.j_max;
  j["c"] = {c.c1, c.c2};
  return j;
}

inline ShearSystemConfig shear_config_from_json(const json& j, ShearSystemConfig base = {}) {
  ShearSystemConfig c = std::move(base);
  if (j.contains("generator")) {
    const auto& g = j.at("generator");
    const std::string type = g.value("type", "bspline");
    if (type == "bspline") {
      c.generator = BSplineGenerator{g.at("N1").get<int>(), g.at("N2").get<int>()};
    } else if (type == "pseudo") {
      c.generator = PseudoGenerator{MaskOrder(g.at("N1").get<int>(), g.at("l1").get<int>()),
                                    MaskOrder(g.at("N2").get<int>(), g.at("l2").get<int>())};
    } else {
      throw std::invalid_argument("unknown generator type: " + type);
    }
  }
  c.alpha = j.value("alpha", c.alpha);
  c.j_max = j.value("j_max", c.j_max);
  if (j.contains("c")) {
    c.c1 = j.at("c").at(0).get<double>();
    c.c2 = j.at("c").at(1).get<double>();
  }
  c.validate();
  return c;
}

}  // namespace shearframe
