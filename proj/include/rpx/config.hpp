#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "rpx/cfar.hpp"
#include "rpx/extractors.hpp"
#include "rpx/spatial.hpp"

namespace rpx {

enum class ExtractorKind : std::uint8_t {
  Ca, Cago, Caso, Is, Vi, Os, Tm, Msca, Bfar, KStrongest, C18, C19, Cfear
};

using ExtractorParams = std::variant<CaCfg, CagoCfg, CasoCfg, IsCfg, ViCfg, OsCfg, TmCfg, MscaCfg,
                                     BfarCfg, KStrongestCfg, C18Cfg, C19Cfg, CfearCfg>;

/// One of the 13 extractor parameterizations plus the shared CFAR window
/// geometry (ignored by the non-CFAR extractors).
struct ExtractorConfig {
  ExtractorParams params;
  CfarWindow window{};
};

inline ExtractorKind kind_of(const ExtractorParams& p) {
  return static_cast<ExtractorKind>(p.index());
}
inline ExtractorKind kind_of(const ExtractorConfig& c) { return kind_of(c.params); }

inline bool is_cfar(ExtractorKind k) { return static_cast<int>(k) <= static_cast<int>(ExtractorKind::Bfar); }

inline const char* kind_name(ExtractorKind k) {
  switch (k) {
    case ExtractorKind::Ca: return "ca";
    case ExtractorKind::Cago: return "cago";
    case ExtractorKind::Caso: return "caso";
    case ExtractorKind::Is: return "is";
    case ExtractorKind::Vi: return "vi";
    case ExtractorKind::Os: return "os";
    case ExtractorKind::Tm: return "tm";
    case ExtractorKind::Msca: return "msca";
    case ExtractorKind::Bfar: return "bfar";
    case ExtractorKind::KStrongest: return "kstr";
    case ExtractorKind::C18: return "c18";
    case ExtractorKind::C19: return "c19";
    case ExtractorKind::Cfear: return "cfear";
  }
  return "?";
}

inline ExtractorParams default_params(ExtractorKind k) {
  switch (k) {
    case ExtractorKind::Ca: return CaCfg{};
    case ExtractorKind::Cago: return CagoCfg{};
    case ExtractorKind::Caso: return CasoCfg{};
    case ExtractorKind::Is: return IsCfg{};
    case ExtractorKind::Vi: return ViCfg{};
    case ExtractorKind::Os: return OsCfg{};
    case ExtractorKind::Tm: return TmCfg{};
    case ExtractorKind::Msca: return MscaCfg{};
    case ExtractorKind::Bfar: return BfarCfg{};
    case ExtractorKind::KStrongest: return KStrongestCfg{};
    case ExtractorKind::C18: return C18Cfg{};
    case ExtractorKind::C19: return C19Cfg{};
    case ExtractorKind::Cfear: return CfearCfg{};
  }
  throw std::invalid_argument("unknown extractor kind");
}

inline ExtractorKind parse_kind(const std::string& name) {
  for (int k = 0; k <= static_cast<int>(ExtractorKind::Cfear); ++k)
    if (name == kind_name(static_cast<ExtractorKind>(k))) return static_cast<ExtractorKind>(k);
  throw std::invalid_argument("unknown extractor '" + name + "'");
}

namespace detail {
inline std::uint32_t to_count(double v, const char* key) {
  const double r = std::nearbyint(v);
  if (!(r >= 0.0) || r > 4.0e9)
    throw std::invalid_argument(std::string("parameter ") + key + " out of range");
  return static_cast<std::uint32_t>(r);
}
}  // namespace detail

/// Sets one parameter by its Table-I key. Shared by the key-value parser and
/// the sweep harness. Integer-valued parameters are rounded to the nearest
/// count. Throws on a key the variant does not have.
inline void set_extractor_param(ExtractorConfig& cfg, const std::string& key, double value) {
  if (key == "N") {
    cfg.window.size = detail::to_count(value, "N");
    return;
  }
  if (key == "g") {
    cfg.window.guard = detail::to_count(value, "g");
    return;
  }
  const bool handled = std::visit(
      [&](auto& c) -> bool {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, CaCfg> || std::is_same_v<T, CagoCfg> ||
                      std::is_same_v<T, CasoCfg>) {
          if (key == "T") return c.scale = value, true;
        } else if constexpr (std::is_same_v<T, IsCfg>) {
          if (key == "T") return c.scale = value, true;
          if (key == "alpha") return c.cut_scale = value, true;
          if (key == "I") return c.max_interferers = detail::to_count(value, "I"), true;
        } else if constexpr (std::is_same_v<T, ViCfg>) {
          if (key == "T") return c.scale = value, true;
          if (key == "V") return c.variability = value, true;
          if (key == "R") return c.mean_ratio = value, true;
        } else if constexpr (std::is_same_v<T, OsCfg>) {
          if (key == "T") return c.scale = value, true;
          if (key == "q") return c.quantile = value, true;
        } else if constexpr (std::is_same_v<T, TmCfg>) {
          if (key == "T") return c.scale = value, true;
          if (key == "N_T") return c.trim = detail::to_count(value, "N_T"), true;
        } else if constexpr (std::is_same_v<T, MscaCfg>) {
          if (key == "T") return c.scale = value, true;
          if (key == "M") return c.subwindow = detail::to_count(value, "M"), true;
        } else if constexpr (std::is_same_v<T, BfarCfg>) {
          if (key == "T") return c.scale = value, true;
          if (key == "b") return c.offset_db = value, true;
        } else if constexpr (std::is_same_v<T, KStrongestCfg>) {
          if (key == "K" || key == "k") return c.count = detail::to_count(value, "K"), true;
          if (key == "z_min") return c.min_value = value, true;
        } else if constexpr (std::is_same_v<T, C18Cfg>) {
          if (key == "w_binom" || key == "w_b") return c.smooth_width = value, true;
          if (key == "z_q") return c.noise_scale = value, true;
        } else if constexpr (std::is_same_v<T, C19Cfg>) {
          if (key == "l_max") return c.max_regions = detail::to_count(value, "l_max"), true;
          if (key == "region_drop") return c.region_drop = value, true;
        } else if constexpr (std::is_same_v<T, CfearCfg>) {
          if (key == "k" || key == "K") return c.count = detail::to_count(value, "k"), true;
          if (key == "z_min") return c.min_value = value, true;
          if (key == "r") return c.radius = value, true;
          if (key == "grid") return c.grid_side = value, true;
          if (key == "p_min") return c.min_cluster = detail::to_count(value, "p_min"), true;
        }
        return false;
      },
      cfg.params);
  if (!handled)
    throw std::invalid_argument("extractor '" + std::string(kind_name(kind_of(cfg))) +
                                "' has no parameter '" + key + "'");
}

inline void validate(const ExtractorConfig& cfg) {
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_constructible_v<CfarVariant, T>) {
          validate(CfarVariant{c}, cfg.window);
        } else {
          validate(c);
        }
      },
      cfg.params);
}

/// Parses the flat key-value form, e.g. "extractor=ca T=35" or "kstr K=5
/// z_min=31.875". The leading extractor name may appear bare or as
/// extractor=<name>; remaining tokens are key=value pairs.
inline ExtractorConfig parse_extractor_config(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> tokens;
  for (std::string tok; in >> tok;) tokens.push_back(tok);
  if (tokens.empty()) throw std::invalid_argument("empty extractor config");

  std::string name = tokens.front();
  if (name.rfind("extractor=", 0) == 0) name = name.substr(10);
  ExtractorConfig cfg{default_params(parse_kind(name)), CfarWindow{}};

  for (std::size_t i = 1; i < tokens.size(); ++i) {
    const auto eq = tokens[i].find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::invalid_argument("malformed config token '" + tokens[i] + "'");
    const std::string key = tokens[i].substr(0, eq);
    const std::string value_text = tokens[i].substr(eq + 1);
    double value = 0.0;
    try {
      std::size_t pos = 0;
      value = std::stod(value_text, &pos);
      if (pos != value_text.size()) throw std::invalid_argument(value_text);
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed value in config token '" + tokens[i] + "'");
    }
    set_extractor_param(cfg, key, value);
  }
  validate(cfg);
  return cfg;
}

namespace detail {
inline std::string format_param(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}
}  // namespace detail

/// Canonical serialized form; parse_extractor_config round-trips it.
inline std::string format_extractor_config(const ExtractorConfig& cfg) {
  std::string out = "extractor=";
  out += kind_name(kind_of(cfg));
  auto add = [&out](const char* key, double v) {
    out += ' ';
    out += key;
    out += '=';
    out += detail::format_param(v);
  };
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, CaCfg> || std::is_same_v<T, CagoCfg> ||
                      std::is_same_v<T, CasoCfg>) {
          add("T", c.scale);
        } else if constexpr (std::is_same_v<T, IsCfg>) {
          add("T", c.scale);
          add("alpha", c.cut_scale);
          add("I", c.max_interferers);
        } else if constexpr (std::is_same_v<T, ViCfg>) {
          add("T", c.scale);
          add("V", c.variability);
          add("R", c.mean_ratio);
        } else if constexpr (std::is_same_v<T, OsCfg>) {
          add("T", c.scale);
          add("q", c.quantile);
        } else if constexpr (std::is_same_v<T, TmCfg>) {
          add("T", c.scale);
          add("N_T", c.trim);
        } else if constexpr (std::is_same_v<T, MscaCfg>) {
          add("T", c.scale);
          add("M", c.subwindow);
        } else if constexpr (std::is_same_v<T, BfarCfg>) {
          add("T", c.scale);
          add("b", c.offset_db);
        } else if constexpr (std::is_same_v<T, KStrongestCfg>) {
          add("K", c.count);
          add("z_min", c.min_value);
        } else if constexpr (std::is_same_v<T, C18Cfg>) {
          add("w_binom", c.smooth_width);
          add("z_q", c.noise_scale);
        } else if constexpr (std::is_same_v<T, C19Cfg>) {
          add("l_max", c.max_regions);
          add("region_drop", c.region_drop);
        } else if constexpr (std::is_same_v<T, CfearCfg>) {
          add("k", c.count);
          add("z_min", c.min_value);
          add("r", c.radius);
          add("grid", c.grid_side);
          add("p_min", c.min_cluster);
        }
      },
      cfg.params);
  if (is_cfar(kind_of(cfg)) && (cfg.window.size != CfarWindow{}.size || cfg.window.guard != CfarWindow{}.guard)) {
    add("N", cfg.window.size);
    add("g", cfg.window.guard);
  }
  return out;
}

/// Uniform entry point: maps a Decibel scan through the configured
/// extractor. CFAR variants get the Watt / squared-Watt chain applied here.
inline PointCloud extract(const PolarScan& scan, const ExtractorConfig& cfg) {
  require_unit(scan.unit, PowerUnit::Decibel, "extract");
  validate(cfg);
  return std::visit(
      [&](const auto& c) -> PointCloud {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_constructible_v<CfarVariant, T>) {
          return run_cfar(square_law(to_watts(scan)), CfarVariant{c}, cfg.window);
        } else if constexpr (std::is_same_v<T, KStrongestCfg>) {
          return extract_kstrongest(scan, c);
        } else if constexpr (std::is_same_v<T, C18Cfg>) {
          return extract_c18(scan, c);
        } else if constexpr (std::is_same_v<T, C19Cfg>) {
          return extract_c19(scan, c);
        } else {
          return extract_cfear(scan, c);
        }
      },
      cfg.params);
}

/// Table-I tuned parameter sets, shipped as named starting points. These are
/// the values tuned on the source datasets, not synthetic-world optima.
struct NamedConfig {
  std::string name;
  ExtractorConfig config;
};

inline std::vector<NamedConfig> f1_default_configs() {
  auto mk = [](const char* text) { return parse_extractor_config(text); };
  return {
      {"ca", mk("ca T=35")},
      {"cago", mk("cago T=25")},
      {"caso", mk("caso T=400")},
      {"is", mk("is T=15 alpha=0.075 I=6")},
      {"vi", mk("vi T=400 V=5 R=1.5")},
      {"os", mk("os T=120 q=0.5")},
      {"tm", mk("tm T=100 N_T=30")},
      {"msca", mk("msca T=100 M=8")},
      {"bfar", mk("bfar T=15 b=19.13")},
      {"kstr", mk("kstr K=5 z_min=31.875")},
      {"c18", mk("c18 w_binom=10 z_q=2.75")},
      {"c19", mk("c19 l_max=400")},
      {"cfear", mk("cfear k=20 z_min=31.875 r=0.5 grid=0.5 p_min=5")},
  };
}

inline std::vector<NamedConfig> f2_default_configs() {
  auto mk = [](const char* text) { return parse_extractor_config(text); };
  return {
      {"ca", mk("ca T=55")},
      {"cago", mk("cago T=50")},
      {"caso", mk("caso T=3700")},
      {"is", mk("is T=5 alpha=0.003 I=6")},
      {"vi", mk("vi T=2000 V=5 R=1.5")},
      {"os", mk("os T=1000 q=0.5")},
      {"tm", mk("tm T=1050 N_T=44")},
      {"msca", mk("msca T=400 M=10")},
      {"bfar", mk("bfar T=12.5 b=38.25")},
      {"kstr", mk("kstr K=3 z_min=44.625")},
      {"c18", mk("c18 w_binom=6 z_q=2")},
      {"c19", mk("c19 l_max=300")},
      {"cfear", mk("cfear k=20 z_min=44.625 r=0.5 grid=0.5 p_min=5")},
  };
}

}  // namespace rpx
