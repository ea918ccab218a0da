#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

namespace wavelab::cli {

using nlohmann::json;

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error([&] {
        std::string msg = "invalid configuration:";
        for (const auto& p : problems) msg += "\n  " + p;
        return msg;
      }()),
      problems_(std::move(problems)) {}

json default_config_json() {
  return json::parse(R"({
    "version": 1,
    "model": {"kind": "landau", "B": 1.0},
    "modes": {"cutoff": 99.0},
    "speed": {"kind": "sinusoid", "offset": 2.0, "amplitude": 1.0},
    "data": {"kind": "law", "law": {"kind": "sobolev", "r": 2.0}},
    "time": {"T": 1.0, "samples": 32},
    "regularization": {
      "mollifiers": [{"sharpness": 1.0}, {"sharpness": 2.0}],
      "scale": {"kind": "power", "p": 1.0},
      "epsilons": {"first": 0.1, "last": 0.001, "count": 6}
    },
    "norms": [{"kind": "sobolev", "s": 0.0}]
  })");
}

json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into line and column.
    std::size_t line = 1, col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string what = e.what();
    const auto pos = what.find("parse error");
    if (pos != std::string::npos) what = what.substr(pos);
    throw ConfigError({origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + what});
  }
}

namespace {

struct Range {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_open = false, hi_open = false;
  std::string describe() const {
    std::ostringstream os;
    os.precision(17);
    if (std::isinf(lo)) os << "<" << (hi_open ? " " : "= ") << hi;
    else if (std::isinf(hi)) os << ">" << (lo_open ? " " : "= ") << lo;
    else os << "in " << (lo_open ? "(" : "[") << lo << ", " << hi << (hi_open ? ")" : "]");
    return os.str();
  }
  bool contains(double v) const {
    if (!std::isfinite(v)) return false;
    if (lo_open ? !(v > lo) : !(v >= lo)) return false;
    if (hi_open ? !(v < hi) : !(v <= hi)) return false;
    return true;
  }
};

Range any() { return {}; }
Range positive() { return {0, std::numeric_limits<double>::infinity(), true, false}; }
Range nonneg() { return {0, std::numeric_limits<double>::infinity(), false, false}; }
Range at_least(double v) { return {v, std::numeric_limits<double>::infinity(), false, false}; }
Range open(double a, double b) { return {a, b, true, true}; }
Range closed(double a, double b) { return {a, b, false, false}; }

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

class Reader {
 public:
  std::vector<std::string> errors;

  void fail(const std::string& path, const std::string& msg) { errors.push_back(path + ": " + msg); }

  /// True when `node` is an object whose keys are all allowed.
  bool object(const json& node, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!node.is_object()) {
      fail(path, "expected an object");
      return false;
    }
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : node.items())
      if (!ok.count(k)) fail(join(path, k), "unknown key");
    return true;
  }

  double number(const json& obj, const std::string& path, const char* key, std::optional<double> def, Range r) {
    const std::string p = join(path, key);
    if (!obj.contains(key)) {
      if (!def) {
        fail(p, "required");
        return std::numeric_limits<double>::quiet_NaN();
      }
      return *def;
    }
    const auto& v = obj.at(key);
    if (!v.is_number()) {
      fail(p, "expected a number");
      return def.value_or(std::numeric_limits<double>::quiet_NaN());
    }
    const double x = v.get<double>();
    if (!r.contains(x)) fail(p, "must be " + r.describe());
    return x;
  }

  std::int64_t integer(const json& obj, const std::string& path, const char* key, std::optional<std::int64_t> def,
                       std::int64_t lo, std::int64_t hi) {
    const std::string p = join(path, key);
    if (!obj.contains(key)) {
      if (!def) fail(p, "required");
      return def.value_or(lo);
    }
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) {
      fail(p, "expected an integer");
      return def.value_or(lo);
    }
    const std::int64_t x = v.is_number_unsigned() ? std::int64_t(std::min<std::uint64_t>(v.get<std::uint64_t>(), std::uint64_t(INT64_MAX)))
                                                  : v.get<std::int64_t>();
    if (x < lo || x > hi) fail(p, "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return std::clamp(x, lo, hi);
  }

  std::uint64_t unsigned_integer(const json& obj, const std::string& path, const char* key, std::uint64_t def) {
    const std::string p = join(path, key);
    if (!obj.contains(key)) return def;
    const auto& v = obj.at(key);
    if (!v.is_number_unsigned()) {
      fail(p, "expected a nonnegative integer");
      return def;
    }
    return v.get<std::uint64_t>();
  }

  bool boolean(const json& obj, const std::string& path, const char* key, bool def) {
    if (!obj.contains(key)) return def;
    const auto& v = obj.at(key);
    if (!v.is_boolean()) {
      fail(join(path, key), "expected true or false");
      return def;
    }
    return v.get<bool>();
  }

  std::string string(const json& obj, const std::string& path, const char* key, std::optional<std::string> def,
                     std::initializer_list<const char*> choices = {}) {
    const std::string p = join(path, key);
    if (!obj.contains(key)) {
      if (!def) fail(p, "required");
      return def.value_or("");
    }
    const auto& v = obj.at(key);
    if (!v.is_string()) {
      fail(p, "expected a string");
      return def.value_or("");
    }
    auto s = v.get<std::string>();
    if (choices.size() > 0 && std::find_if(choices.begin(), choices.end(), [&](const char* c) { return s == c; }) == choices.end()) {
      std::string list;
      for (const char* c : choices) list += std::string(list.empty() ? "" : ", ") + c;
      fail(p, "must be one of: " + list);
    }
    return s;
  }

  std::vector<double> numbers(const json& obj, const std::string& path, const char* key, Range r) {
    std::vector<double> out;
    const std::string p = join(path, key);
    if (!obj.contains(key)) {
      fail(p, "required");
      return out;
    }
    const auto& v = obj.at(key);
    if (!v.is_array()) {
      fail(p, "expected an array of numbers");
      return out;
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string pi = p + "[" + std::to_string(i) + "]";
      if (!v[i].is_number()) {
        fail(pi, "expected a number");
        continue;
      }
      const double x = v[i].get<double>();
      if (!r.contains(x)) fail(pi, "must be " + r.describe());
      out.push_back(x);
    }
    return out;
  }
};

SpectralModel read_model(Reader& rd, const json& doc) {
  SpectralModel m{model::Landau2D{}, 0.0};
  if (!doc.contains("model")) {
    rd.fail("model", "required");
    return m;
  }
  const auto& j = doc.at("model");
  if (!j.is_object()) {
    rd.fail("model", "expected an object");
    return m;
  }
  const std::string kind =
      rd.string(j, "model", "kind", std::nullopt, {"landau", "harmonic", "anisotropic", "torus", "flow", "custom"});
  if (kind == "landau") {
    rd.object(j, "model", {"kind", "B", "multiplicity", "shift"});
    m.kind = model::Landau2D{rd.number(j, "model", "B", std::nullopt, positive()),
                             rd.integer(j, "model", "multiplicity", 1, 1, 1 << 20)};
  } else if (kind == "harmonic") {
    rd.object(j, "model", {"kind", "d", "shift"});
    m.kind = model::HarmonicOscillator{int(rd.integer(j, "model", "d", 1, 1, 16))};
  } else if (kind == "anisotropic") {
    rd.object(j, "model", {"kind", "B", "shift"});
    auto B = rd.numbers(j, "model", "B", positive());
    if (B.empty() && j.contains("B")) rd.fail("model.B", "needs at least one entry");
    if (B.size() > 16) rd.fail("model.B", "at most 16 entries");
    m.kind = model::AnisotropicHamiltonian{B.empty() ? std::vector<double>{1.0} : B};
  } else if (kind == "torus") {
    rd.object(j, "model", {"kind", "d", "shift"});
    m.kind = model::TorusLaplacian{int(rd.integer(j, "model", "d", 1, 1, 8))};
  } else if (kind == "flow") {
    rd.object(j, "model", {"kind", "h", "shift"});
    const double h = rd.number(j, "model", "h", std::nullopt, positive());
    if (h == 1.0) rd.fail("model.h", "must differ from 1");
    m.kind = model::NonSelfAdjointFlow{h};
  } else if (kind == "custom") {
    rd.object(j, "model", {"kind", "eigenvalues", "shift"});
    model::Custom c;
    if (!j.contains("eigenvalues") || !j.at("eigenvalues").is_array() || j.at("eigenvalues").empty()) {
      rd.fail("model.eigenvalues", "required: a nonempty array of numbers or [re, im] pairs");
    } else {
      const auto& ev = j.at("eigenvalues");
      for (std::size_t i = 0; i < ev.size(); ++i) {
        const std::string p = "model.eigenvalues[" + std::to_string(i) + "]";
        if (ev[i].is_number()) {
          c.eigenvalues.emplace_back(ev[i].get<double>(), 0.0);
        } else if (ev[i].is_array() && ev[i].size() == 2 && ev[i][0].is_number() && ev[i][1].is_number()) {
          c.eigenvalues.emplace_back(ev[i][0].get<double>(), ev[i][1].get<double>());
        } else {
          rd.fail(p, "expected a number or a [re, im] pair");
        }
      }
    }
    m.kind = c;
  }
  m.shift = rd.number(j, "model", "shift", 0.0, nonneg());
  return m;
}

DecayLaw read_law(Reader& rd, const json& j, const std::string& path) {
  DecayLaw law;
  if (!j.is_object()) {
    rd.fail(path, "expected an object");
    return law;
  }
  const std::string kind = rd.string(j, path, "kind", std::nullopt, {"constant", "sobolev", "gevrey", "dual"});
  law.c = rd.number(j, path, "c", 1.0, nonneg());
  if (kind == "constant") {
    rd.object(j, path, {"kind", "c"});
    law.kind = DecayLaw::Kind::Constant;
  } else if (kind == "sobolev") {
    rd.object(j, path, {"kind", "c", "r"});
    law.kind = DecayLaw::Kind::Sobolev;
    law.r = rd.number(j, path, "r", std::nullopt, any());
  } else if (kind == "gevrey") {
    rd.object(j, path, {"kind", "c", "A", "s"});
    law.kind = DecayLaw::Kind::Gevrey;
    law.A = rd.number(j, path, "A", std::nullopt, positive());
    law.s = rd.number(j, path, "s", 1.0, at_least(1.0));
  } else if (kind == "dual") {
    rd.object(j, path, {"kind", "c", "eta", "s"});
    law.kind = DecayLaw::Kind::Dual;
    law.eta = rd.number(j, path, "eta", std::nullopt, positive());
    law.s = rd.number(j, path, "s", 1.0, at_least(1.0));
  }
  return law;
}

RealFn read_profile(Reader& rd, const json& j, const std::string& path) {
  if (!j.is_object()) {
    rd.fail(path, "expected an object");
    return [](double) { return 0.0; };
  }
  const std::string kind = rd.string(j, path, "kind", std::nullopt, {"constant", "sinusoid"});
  if (kind == "sinusoid") {
    rd.object(j, path, {"kind", "offset", "amplitude", "frequency", "phase"});
    const double o = rd.number(j, path, "offset", 0.0, any()), a = rd.number(j, path, "amplitude", 1.0, any()),
                 f = rd.number(j, path, "frequency", 1.0, any()), ph = rd.number(j, path, "phase", 0.0, any());
    return [=](double t) { return o + a * std::sin(f * t + ph); };
  }
  rd.object(j, path, {"kind", "value"});
  const double v = rd.number(j, path, "value", 1.0, any());
  return [v](double) { return v; };
}

std::optional<PropagationSpeed> read_speed(Reader& rd, const json& doc, double T) {
  if (!doc.contains("speed")) {
    rd.fail("speed", "required");
    return std::nullopt;
  }
  const auto& j = doc.at("speed");
  if (!j.is_object()) {
    rd.fail("speed", "expected an object");
    return std::nullopt;
  }
  const std::string p = "speed";
  const std::string kind = rd.string(j, p, "kind", std::nullopt,
                                     {"constant", "sinusoid", "holder_cusp", "holder_oscillatory", "weakly_hyperbolic", "measure"});
  const std::size_t before = rd.errors.size();
  std::optional<PropagationSpeed> out;
  auto guarded = [&](auto&& make) {
    if (rd.errors.size() != before || !(T > 0)) return;
    try {
      out = make();
    } catch (const std::exception& e) {
      rd.fail(p, e.what());
    }
  };
  if (kind == "constant") {
    rd.object(j, p, {"kind", "value"});
    const double v = rd.number(j, p, "value", std::nullopt, nonneg());
    guarded([&] { return PropagationSpeed::constant(v, T); });
  } else if (kind == "sinusoid") {
    rd.object(j, p, {"kind", "offset", "amplitude", "frequency", "phase"});
    const double o = rd.number(j, p, "offset", std::nullopt, any()), a = rd.number(j, p, "amplitude", std::nullopt, any()),
                 f = rd.number(j, p, "frequency", 1.0, any()), ph = rd.number(j, p, "phase", 0.0, any());
    if (std::isfinite(o) && std::isfinite(a) && o - std::abs(a) < 0) rd.fail("speed.offset", "offset - |amplitude| must be >= 0");
    guarded([&] { return PropagationSpeed::sinusoid(o, a, f, ph, T); });
  } else if (kind == "holder_cusp") {
    rd.object(j, p, {"kind", "base", "alpha", "center", "scale"});
    const double b = rd.number(j, p, "base", 1.0, nonneg()), al = rd.number(j, p, "alpha", std::nullopt, open(0, 2)),
                 c = rd.number(j, p, "center", 0.5, any()), s = rd.number(j, p, "scale", 1.0, nonneg());
    guarded([&] { return PropagationSpeed::holder_cusp(b, al, c, s, T); });
  } else if (kind == "holder_oscillatory") {
    rd.object(j, p, {"kind", "base", "alpha", "scale", "terms"});
    const double b = rd.number(j, p, "base", 1.0, nonneg()), al = rd.number(j, p, "alpha", std::nullopt, open(0, 2)),
                 s = rd.number(j, p, "scale", 1.0, nonneg());
    const int terms = int(rd.integer(j, p, "terms", 16, 1, 60));
    guarded([&] {
      return PropagationSpeed(speed::Holder{speed::Holder::Family::Oscillatory, b, al, 0.0, s, terms}, T);
    });
  } else if (kind == "weakly_hyperbolic") {
    rd.object(j, p, {"kind", "center", "m", "shift", "smoothness"});
    const double c = rd.number(j, p, "center", 0.0, any()), sh = rd.number(j, p, "shift", 0.0, nonneg());
    const int m = int(rd.integer(j, p, "m", 1, 1, 32));
    const double ell = rd.number(j, p, "smoothness", double(2 * m), positive());
    guarded([&] { return PropagationSpeed::weakly_hyperbolic(c, m, sh, ell, T); });
  } else if (kind == "measure") {
    rd.object(j, p, {"kind", "density", "atoms"});
    const double d = rd.number(j, p, "density", 0.0, nonneg());
    std::vector<Atom> atoms;
    if (j.contains("atoms")) {
      const auto& a = j.at("atoms");
      if (!a.is_array()) {
        rd.fail("speed.atoms", "expected an array");
      } else {
        for (std::size_t i = 0; i < a.size(); ++i) {
          const std::string pi = "speed.atoms[" + std::to_string(i) + "]";
          if (!rd.object(a[i], pi, {"t", "mass"})) continue;
          const double t = rd.number(a[i], pi, "t", std::nullopt, open(0, T));
          const double mass = rd.number(a[i], pi, "mass", std::nullopt, positive());
          atoms.push_back({t, mass});
        }
      }
    }
    guarded([&] { return PropagationSpeed::measure([d](double) { return d; }, d, atoms, T); });
  }
  return out;
}

SourceSpec read_source(Reader& rd, const json& doc) {
  SourceSpec src;
  if (!doc.contains("source")) return src;
  const auto& j = doc.at("source");
  const std::string p = "source";
  if (!j.is_object()) {
    rd.fail(p, "expected an object");
    return src;
  }
  const std::string kind = rd.string(j, p, "kind", std::nullopt, {"zero", "separable", "tabulated"});
  if (kind == "zero") {
    rd.object(j, p, {"kind"});
  } else if (kind == "separable") {
    rd.object(j, p, {"kind", "profile", "law", "mollify"});
    src.kind = SourceSpec::Kind::Separable;
    if (j.contains("profile")) src.time_profile = read_profile(rd, j.at("profile"), "source.profile");
    else rd.fail("source.profile", "required");
    src.modal = j.contains("law") ? read_law(rd, j.at("law"), "source.law") : DecayLaw{};
    src.mollify = rd.boolean(j, p, "mollify", false);
  } else if (kind == "tabulated") {
    rd.object(j, p, {"kind", "times", "values"});
    src.kind = SourceSpec::Kind::Tabulated;
    src.times = rd.numbers(j, p, "times", any());
    if (src.times.size() < 2) rd.fail("source.times", "needs at least two samples");
    if (!std::is_sorted(src.times.begin(), src.times.end()) ||
        std::adjacent_find(src.times.begin(), src.times.end()) != src.times.end())
      rd.fail("source.times", "must be strictly increasing");
    if (!j.contains("values") || !j.at("values").is_array()) {
      rd.fail("source.values", "required: one row of samples per mode");
    } else {
      const auto& rows = j.at("values");
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::string pi = "source.values[" + std::to_string(i) + "]";
        std::vector<double> row;
        if (!rows[i].is_array()) {
          rd.fail(pi, "expected an array of numbers");
        } else {
          for (const auto& v : rows[i]) {
            if (!v.is_number() || !std::isfinite(v.get<double>())) rd.fail(pi, "expected finite numbers");
            else row.push_back(v.get<double>());
          }
          if (row.size() != src.times.size()) rd.fail(pi, "needs one value per time sample");
        }
        src.values.push_back(row);
      }
    }
  }
  return src;
}

InitialDataSpec read_data(Reader& rd, const json& doc) {
  InitialDataSpec d;
  d.law = DecayLaw{};
  if (!doc.contains("data")) {
    rd.fail("data", "required");
    return d;
  }
  const auto& j = doc.at("data");
  const std::string p = "data";
  if (!rd.object(j, p, {"kind", "law", "mode", "seed", "u0_weight", "u1_weight"})) return d;
  const std::string kind = rd.string(j, p, "kind", std::nullopt, {"law", "delta", "random"});
  auto weight = [&](const char* key, double def) -> Complex {
    if (!j.contains(key)) return def;
    const auto& v = j.at(key);
    if (v.is_number()) return v.get<double>();
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
      return {v[0].get<double>(), v[1].get<double>()};
    rd.fail(join(p, key), "expected a number or a [re, im] pair");
    return def;
  };
  d.u0_weight = weight("u0_weight", 1.0);
  d.u1_weight = weight("u1_weight", 0.0);
  d.seed = rd.unsigned_integer(j, p, "seed", 0);
  if (kind == "delta") {
    d.kind = InitialDataSpec::Kind::Delta;
    if (!j.contains("mode") || !j.at("mode").is_array()) {
      rd.fail("data.mode", "required: index coordinates");
    } else {
      for (const auto& c : j.at("mode")) {
        if (!c.is_number_integer()) rd.fail("data.mode", "expected integers");
        else d.delta_mode.coords.push_back(c.get<std::int64_t>());
      }
    }
  } else {
    d.kind = kind == "random" ? InitialDataSpec::Kind::Random : InitialDataSpec::Kind::Law;
    if (j.contains("law")) d.law = read_law(rd, j.at("law"), "data.law");
    else rd.fail("data.law", "required");
  }
  return d;
}

WeightSpec read_weight(Reader& rd, const json& j, const std::string& p) {
  WeightSpec w;
  if (!j.is_object()) {
    rd.fail(p, "expected an object");
    return w;
  }
  const std::string kind = rd.string(j, p, "kind", std::nullopt,
                                     {"sobolev", "gevrey_roumieu", "gevrey_beurling", "dual_roumieu", "dual_beurling"});
  if (kind == "sobolev") {
    rd.object(j, p, {"kind", "s"});
    return WeightSpec::sobolev(rd.number(j, p, "s", std::nullopt, any()));
  }
  const char* key = kind == "gevrey_roumieu" ? "A" : kind == "gevrey_beurling" ? "B" : kind == "dual_roumieu" ? "delta" : "eta";
  rd.object(j, p, {"kind", key, "s"});
  const double v = rd.number(j, p, key, std::nullopt, positive());
  const double s = rd.number(j, p, "s", 1.0, at_least(1.0));
  if (kind == "gevrey_roumieu") return WeightSpec::gevrey_roumieu(v, s);
  if (kind == "gevrey_beurling") return WeightSpec::gevrey_beurling(v, s);
  if (kind == "dual_roumieu") return WeightSpec::dual_roumieu(v, s);
  return WeightSpec::dual_beurling(v, s);
}

void read_time(Reader& rd, const json& doc, RunConfig& c) {
  if (!doc.contains("time")) return;
  const auto& j = doc.at("time");
  const std::string p = "time";
  if (!rd.object(j, p, {"T", "samples", "theta_osc", "phase_tol", "mollifier_fraction", "max_steps"})) return;
  c.T = rd.number(j, p, "T", 1.0, positive());
  c.samples = std::size_t(rd.integer(j, p, "samples", 64, 1, 1 << 20));
  c.policy.theta_osc = rd.number(j, p, "theta_osc", c.policy.theta_osc, {0, 1, true, false});
  c.policy.phase_tol = rd.number(j, p, "phase_tol", c.policy.phase_tol, open(0, 1));
  c.policy.mollifier_fraction = rd.number(j, p, "mollifier_fraction", c.policy.mollifier_fraction, {0, 1, true, false});
  c.policy.max_steps = std::uint64_t(rd.integer(j, p, "max_steps", std::int64_t(c.policy.max_steps), 1, std::int64_t(1) << 40));
}

void read_regularization(Reader& rd, const json& doc, RunConfig& c) {
  const bool measure = c.speed && c.speed->is_measure();
  c.rule = measure ? ScaleRule::logarithmic(1.0) : ScaleRule::power(1.0);
  c.mollifiers = {Mollifier(1.0)};
  if (!doc.contains("regularization")) return;
  const auto& j = doc.at("regularization");
  const std::string p = "regularization";
  if (!rd.object(j, p, {"mollifiers", "scale", "epsilons"})) return;
  if (j.contains("mollifiers")) {
    const auto& m = j.at("mollifiers");
    if (!m.is_array() || m.empty() || m.size() > 2) {
      rd.fail("regularization.mollifiers", "expected an array of one or two mollifiers");
    } else {
      c.mollifiers.clear();
      for (std::size_t i = 0; i < m.size(); ++i) {
        const std::string pi = "regularization.mollifiers[" + std::to_string(i) + "]";
        if (!rd.object(m[i], pi, {"sharpness"})) continue;
        const double sharp = rd.number(m[i], pi, "sharpness", 1.0, closed(0.05, 20));
        if (std::isfinite(sharp) && sharp >= 0.05 && sharp <= 20) c.mollifiers.emplace_back(sharp);
      }
      if (c.mollifiers.size() == 2 && c.mollifiers[0] == c.mollifiers[1])
        rd.fail("regularization.mollifiers", "the two mollifiers must differ");
      if (c.mollifiers.empty()) c.mollifiers = {Mollifier(1.0)};
    }
  }
  if (j.contains("scale")) {
    const auto& s = j.at("scale");
    const std::string ps = "regularization.scale";
    if (s.is_object()) {
      const std::string kind = rd.string(s, ps, "kind", std::nullopt, {"power", "logarithmic"});
      if (kind == "power") {
        rd.object(s, ps, {"kind", "p"});
        c.rule = ScaleRule::power(rd.number(s, ps, "p", 1.0, positive()));
      } else if (kind == "logarithmic") {
        rd.object(s, ps, {"kind", "constant"});
        c.rule = ScaleRule::logarithmic(rd.number(s, ps, "constant", 1.0, positive()));
      }
    } else {
      rd.fail(ps, "expected an object");
    }
  }
  if (j.contains("epsilons")) {
    const auto& e = j.at("epsilons");
    const std::string pe = "regularization.epsilons";
    if (e.is_array()) {
      c.epsilons = rd.numbers(j, p, "epsilons", open(0, 1));
    } else if (e.is_object()) {
      rd.object(e, pe, {"first", "last", "count"});
      const double first = rd.number(e, pe, "first", std::nullopt, open(0, 1));
      const double last = rd.number(e, pe, "last", std::nullopt, open(0, 1));
      const auto count = std::size_t(rd.integer(e, pe, "count", std::nullopt, 2, 1000));
      if (first > 0 && first < 1 && last > 0 && last < 1 && count >= 2) c.epsilons = log_grid(first, last, count);
    } else {
      rd.fail(pe, "expected an array or {first, last, count}");
    }
    std::sort(c.epsilons.begin(), c.epsilons.end(), std::greater<>());
    if (std::adjacent_find(c.epsilons.begin(), c.epsilons.end()) != c.epsilons.end()) rd.fail(pe, "values must be distinct");
    if (c.rule.kind == ScaleRule::Kind::Logarithmic)
      for (double x : c.epsilons)
        if (x > ScaleRule::log_rule_max_epsilon()) {
          rd.fail(pe, "the logarithmic scale rule needs every epsilon <= e^-2");
          break;
        }
  }
}

void read_experiments(Reader& rd, const json& doc, RunConfig& c) {
  if (!doc.contains("experiments")) return;
  const auto& j = doc.at("experiments");
  const std::string p = "experiments";
  if (!rd.object(j, p, {"orders", "s", "negligibility", "consistency", "threshold"})) return;
  c.s = rd.number(j, p, "s", 0.0, any());
  if (j.contains("orders")) {
    c.orders.clear();
    for (double k : rd.numbers(j, p, "orders", closed(0, 4))) {
      if (k != std::floor(k)) rd.fail("experiments.orders", "orders must be integers");
      c.orders.push_back(int(k));
    }
    std::sort(c.orders.begin(), c.orders.end());
    c.orders.erase(std::unique(c.orders.begin(), c.orders.end()), c.orders.end());
    if (c.orders.empty()) rd.fail("experiments.orders", "needs at least one order");
  }
  c.negligibility = rd.boolean(j, p, "negligibility", false);
  c.consistency = rd.boolean(j, p, "consistency", false);
  if (j.contains("threshold")) {
    const auto& t = j.at("threshold");
    if (!t.is_array()) {
      rd.fail("experiments.threshold", "expected an array");
      return;
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
      const std::string pi = "experiments.threshold[" + std::to_string(i) + "]";
      if (!rd.object(t[i], pi, {"case", "alpha", "ell", "cutoff", "modes", "nu_min", "nu_max", "A", "s", "tolerance"}))
        continue;
      ThresholdConfig tc;
      const std::string which = rd.string(t[i], pi, "case", std::nullopt, {"holder_strict", "weak_smooth", "weak_holder"});
      tc.which = which == "weak_smooth" ? ThresholdCase::WeakSmooth
                 : which == "weak_holder" ? ThresholdCase::WeakHolder
                                          : ThresholdCase::HolderStrict;
      tc.alpha = rd.number(t[i], pi, "alpha", which == "weak_holder" ? 1.0 : 0.5, {0, 2, true, true});
      tc.ell = int(rd.integer(t[i], pi, "ell", 2, 2, 64));
      if (tc.which == ThresholdCase::WeakSmooth && tc.ell % 2 != 0) rd.fail(pi + ".ell", "must be even");
      if (tc.which == ThresholdCase::HolderStrict && !(tc.alpha < 1)) rd.fail(pi + ".alpha", "must be < 1 for the strict family");
      tc.model = c.model;
      tc.cutoff = rd.number(t[i], pi, "cutoff", 1e4, positive());
      tc.mode_count = std::size_t(rd.integer(t[i], pi, "modes", 16, 6, 4096));
      tc.nu_min = rd.number(t[i], pi, "nu_min", 1.0, positive());
      tc.nu_max = rd.number(t[i], pi, "nu_max", 100.0, positive());
      if (tc.nu_max < 10 * tc.nu_min) rd.fail(pi + ".nu_max", "needs at least a decade above nu_min");
      tc.data.law.A = rd.number(t[i], pi, "A", 1.0, positive());
      tc.data.law.s = rd.number(t[i], pi, "s", 1.5, at_least(1.0));
      tc.tolerance = rd.number(t[i], pi, "tolerance", 0.1, nonneg());
      tc.T = c.T;
      tc.policy = c.policy;
      c.thresholds.push_back(tc);
    }
  }
}

json sorted_copy(const json& j) {
  // nlohmann::json objects are std::map-backed, so a copy is already key-sorted.
  return j;
}

}  // namespace

RunConfig build_config(const json& doc) {
  Reader rd;
  RunConfig c;
  if (!doc.is_object()) throw ConfigError({"(root): expected an object"});
  rd.object(doc, "", {"version", "model", "modes", "speed", "source", "data", "time", "regularization", "norms",
                      "experiments", "outputs"});
  if (doc.contains("version")) {
    const auto v = rd.integer(doc, "", "version", kConfigVersion, 0, 1000);
    if (v != kConfigVersion) rd.fail("version", "unsupported version " + std::to_string(v));
  }
  c.model = read_model(rd, doc);
  if (doc.contains("modes")) {
    const auto& m = doc.at("modes");
    if (rd.object(m, "modes", {"cutoff", "max_modes"})) {
      c.cutoff = rd.number(m, "modes", "cutoff", std::nullopt, positive());
      c.max_modes = std::size_t(rd.integer(m, "modes", "max_modes", 200000, 1, 10'000'000));
    }
  } else {
    rd.fail("modes", "required");
  }
  read_time(rd, doc, c);
  c.speed = read_speed(rd, doc, c.T);
  c.source = read_source(rd, doc);
  c.data = read_data(rd, doc);
  read_regularization(rd, doc, c);
  if (doc.contains("norms")) {
    const auto& n = doc.at("norms");
    if (!n.is_array()) rd.fail("norms", "expected an array");
    else
      for (std::size_t i = 0; i < n.size(); ++i) c.norms.push_back(read_weight(rd, n[i], "norms[" + std::to_string(i) + "]"));
  }
  read_experiments(rd, doc, c);
  if (doc.contains("outputs")) {
    const auto& o = doc.at("outputs");
    if (rd.object(o, "outputs", {"dir"})) c.out_dir = rd.string(o, "outputs", "dir", c.out_dir);
    if (c.out_dir.empty()) rd.fail("outputs.dir", "must not be empty");
  }
  if (c.speed && c.speed->is_measure() && c.epsilons.empty())
    rd.fail("regularization.epsilons", "required for a measure speed");
  try {
    c.model.validate();
  } catch (const std::exception& e) {
    rd.fail("model", e.what());
  }
  if (!rd.errors.empty()) throw ConfigError(rd.errors);
  c.echo = sorted_copy(doc);
  return c;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({path + ": cannot open file"});
  std::ostringstream buf;
  buf << in.rdbuf();
  return build_config(parse_json_text(buf.str(), path));
}

}  // namespace wavelab::cli
