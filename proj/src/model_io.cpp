#include "thorin/model_io.hpp"

#include "thorin/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace thorin::model_io {

using measure::Atom;
using measure::AtomTrain;
using measure::DensityPiece;
using measure::MapKind;
using measure::MonotoneMap;
using measure::RadialMeasure;

namespace {

constexpr const char* kernel_tags = "power_exp, linnik_rational, lamperti_cdf, beta, log_power, composed, riemann_liouville";
constexpr const char* map_kinds = "hyperbolic, quadratic, affine, reciprocal, inv_one_plus, bilateral_root";

json number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

// Collects every problem instead of stopping at the first.
class Reader {
 public:
  std::vector<std::string> issues;

  void issue(const std::string& path, const std::string& what) { issues.push_back(path + ": " + what); }

  void keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) return;
    for (const auto& [k, v] : obj.items()) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || k == a;
      if (!ok) issue(path, "unexpected key '" + k + "'");
    }
  }

  const json* field(const json& obj, const std::string& path, const char* key, bool required = true) {
    if (!obj.is_object()) {
      issue(path, "expected an object");
      return nullptr;
    }
    const auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) issue(path, std::string("missing '") + key + "'");
      return nullptr;
    }
    return &*it;
  }

  // numbers, "inf", "-inf" or exact rationals "p/q"
  double num(const json& obj, const std::string& path, const char* key, std::optional<double> fallback = {}) {
    const json* v = field(obj, path, key, !fallback);
    if (!v) return fallback.value_or(std::nan(""));
    return value(*v, path + "." + key);
  }

  double value(const json& v, const std::string& path) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
      const auto s = v.get<std::string>();
      if (s == "inf") return INFINITY;
      if (s == "-inf") return -INFINITY;
      const auto slash = s.find('/');
      if (slash != std::string::npos) {
        long long p = 0, q = 0;
        const auto r1 = std::from_chars(s.data(), s.data() + slash, p);
        const auto r2 = std::from_chars(s.data() + slash + 1, s.data() + s.size(), q);
        if (r1.ec == std::errc() && r1.ptr == s.data() + slash && r2.ec == std::errc() &&
            r2.ptr == s.data() + s.size() && q != 0)
          return static_cast<double>(p) / static_cast<double>(q);
      }
      issue(path, "'" + s + "' is not a number, \"inf\" or a rational \"p/q\"");
      return std::nan("");
    }
    issue(path, "expected a number");
    return std::nan("");
  }

  std::optional<MonotoneMap> map(const json& j, const std::string& path) {
    keys(j, path, {"kind", "params"});
    const json* kind = field(j, path, "kind");
    if (!kind) return std::nullopt;
    if (!kind->is_string()) {
      issue(path + ".kind", "expected a string");
      return std::nullopt;
    }
    const auto k = kind->get<std::string>();
    double a = 0.0, b = 0.0;
    const bool two = k != "reciprocal" && k != "inv_one_plus";
    if (two) {
      const json* p = field(j, path, "params");
      if (!p) return std::nullopt;
      if (!p->is_array() || p->size() != 2) {
        issue(path + ".params", "expected two numbers");
        return std::nullopt;
      }
      a = value((*p)[0], path + ".params[0]");
      b = value((*p)[1], path + ".params[1]");
    }
    try {
      if (k == "hyperbolic") return MonotoneMap::hyperbolic(a, b);
      if (k == "quadratic") return MonotoneMap::quadratic(a, b);
      if (k == "affine") return MonotoneMap::affine(a, b);
      if (k == "bilateral_root") return MonotoneMap::bilateral_root(a, b);
      if (k == "reciprocal") return MonotoneMap::reciprocal();
      if (k == "inv_one_plus") return MonotoneMap::inv_one_plus();
    } catch (const std::exception& e) {
      issue(path, e.what());
      return std::nullopt;
    }
    issue(path + ".kind", "unknown map '" + k + "' (supported: " + map_kinds + ")");
    return std::nullopt;
  }

  std::optional<Atom> atom(const json& j, const std::string& path) {
    keys(j, path, {"location", "weight", "origin"});
    Atom a{num(j, path, "location"), num(j, path, "weight"), nullptr};
    if (!(a.location >= 0.0 && std::isfinite(a.location))) issue(path + ".location", "must be finite and >= 0");
    if (!(a.weight > 0.0 && std::isfinite(a.weight))) issue(path + ".weight", "must be finite and > 0");
    if (const json* o = field(j, path, "origin", false)) {
      keys(*o, path + ".origin", {"prev", "via"});
      const json* prev = field(*o, path + ".origin", "prev");
      const json* via = field(*o, path + ".origin", "via");
      if (prev && via) {
        const auto p = atom(*prev, path + ".origin.prev");
        const auto m = map(*via, path + ".origin.via");
        if (p && m) a.origin = std::make_shared<measure::AtomOrigin>(measure::AtomOrigin{*p, *m});
      }
    }
    return a;
  }

  std::optional<DensityPiece> piece(const json& j, const std::string& path) {
    keys(j, path, {"lo", "hi", "coef", "kernel", "origin"});
    DensityPiece p;
    p.lo = num(j, path, "lo");
    p.hi = num(j, path, "hi", INFINITY);
    p.coef = num(j, path, "coef", 1.0);
    if (!(p.lo >= 0.0 && std::isfinite(p.lo))) issue(path + ".lo", "must be finite and >= 0");
    if (!(p.hi > p.lo)) issue(path + ".hi", "must exceed lo");
    if (!(p.coef > 0.0 && std::isfinite(p.coef))) issue(path + ".coef", "must be finite and > 0");
    bool ok = true;
    if (const json* k = field(j, path, "kernel")) {
      ok = kernel(*k, path + ".kernel", p);
    } else {
      ok = false;
    }
    if (const json* o = field(j, path, "origin", false)) {
      keys(*o, path + ".origin", {"prev", "via"});
      const json* prev = field(*o, path + ".origin", "prev");
      const json* via = field(*o, path + ".origin", "via");
      if (prev && via) {
        const auto q = piece(*prev, path + ".origin.prev");
        const auto m = map(*via, path + ".origin.via");
        if (q && m) p.origin = std::make_shared<measure::PieceOrigin>(measure::PieceOrigin{*q, *m});
      }
    }
    if (!ok) return std::nullopt;
    return p;
  }

  bool kernel(const json& k, const std::string& path, DensityPiece& p) {
    const json* tag = field(k, path, "tag");
    if (!tag) return false;
    if (!tag->is_string()) {
      issue(path + ".tag", "expected a string");
      return false;
    }
    const auto t = tag->get<std::string>();
    if (t == "power_exp") {
      keys(k, path, {"tag", "power", "rate"});
      p.kernel = measure::PowerExp{num(k, path, "power"), num(k, path, "rate", 0.0)};
    } else if (t == "linnik_rational") {
      keys(k, path, {"tag", "rho", "beta"});
      p.kernel = measure::LinnikRational{num(k, path, "rho"), num(k, path, "beta")};
    } else if (t == "lamperti_cdf") {
      keys(k, path, {"tag", "rho", "beta"});
      p.kernel = measure::LampertiCdf{num(k, path, "rho"), num(k, path, "beta")};
    } else if (t == "beta") {
      keys(k, path, {"tag", "a", "b"});
      p.kernel = measure::BetaKernel{num(k, path, "a"), num(k, path, "b")};
    } else if (t == "log_power") {
      keys(k, path, {"tag", "power", "log_power"});
      p.kernel = measure::LogPower{num(k, path, "power"), num(k, path, "log_power")};
    } else if (t == "composed") {
      keys(k, path, {"tag", "base", "map"});
      const json* base = field(k, path, "base");
      const json* m = field(k, path, "map");
      if (!base || !m) return false;
      const auto b = piece(*base, path + ".base");
      const auto mm = map(*m, path + ".map");
      if (!b || !mm) return false;
      p.kernel = measure::Composed{std::make_shared<DensityPiece>(*b), *mm};
    } else if (t == "riemann_liouville") {
      keys(k, path, {"tag", "source", "alpha"});
      const json* src = field(k, path, "source");
      const double alpha = num(k, path, "alpha");
      if (!src) return false;
      p.kernel = measure::RiemannLiouville{std::make_shared<RadialMeasure>(radial(*src, path + ".source")), alpha};
    } else {
      issue(path + ".tag", "unknown kernel tag '" + t + "' (supported: " + kernel_tags + ")");
      return false;
    }
    return true;
  }

  std::optional<AtomTrain> train(const json& j, const std::string& path) {
    keys(j, path, {"first", "step", "weight", "maps"});
    AtomTrain t{num(j, path, "first"), num(j, path, "step"), num(j, path, "weight"), {}};
    if (!(t.weight > 0.0)) issue(path + ".weight", "must be > 0");
    if (const json* maps = field(j, path, "maps", false)) {
      if (!maps->is_array()) {
        issue(path + ".maps", "expected an array");
      } else {
        for (std::size_t i = 0; i < maps->size(); ++i) {
          if (auto m = map((*maps)[i], path + ".maps[" + std::to_string(i) + "]")) t.maps.push_back(*m);
        }
      }
    }
    return t;
  }

  RadialMeasure radial(const json& j, const std::string& path) {
    if (!j.is_object()) {
      issue(path, "expected an object with atoms, pieces and trains");
      return {};
    }
    keys(j, path, {"atoms", "pieces", "trains"});
    std::vector<Atom> atoms;
    std::vector<DensityPiece> pieces;
    std::vector<AtomTrain> trains;
    const auto each = [&](const char* key, auto&& f) {
      if (const json* arr = field(j, path, key, false)) {
        if (!arr->is_array()) {
          issue(path + "." + key, "expected an array");
          return;
        }
        for (std::size_t i = 0; i < arr->size(); ++i) f((*arr)[i], path + "." + key + "[" + std::to_string(i) + "]");
      }
    };
    each("atoms", [&](const json& e, const std::string& p) {
      if (auto a = atom(e, p)) atoms.push_back(*a);
    });
    each("pieces", [&](const json& e, const std::string& p) {
      if (auto q = piece(e, p)) pieces.push_back(*q);
    });
    each("trains", [&](const json& e, const std::string& p) {
      if (auto t = train(e, p)) trains.push_back(*t);
    });
    try {
      return RadialMeasure(std::move(atoms), std::move(pieces), std::move(trains));
    } catch (const std::exception& e) {
      issue(path, e.what());
      return {};
    }
  }
};

json map_json(const MonotoneMap& m) {
  static const std::map<MapKind, const char*> names{
      {MapKind::hyperbolic, "hyperbolic"}, {MapKind::quadratic, "quadratic"},   {MapKind::affine, "affine"},
      {MapKind::reciprocal, "reciprocal"}, {MapKind::inv_one_plus, "inv_one_plus"}, {MapKind::bilateral_root, "bilateral_root"}};
  json j{{"kind", names.at(m.kind())}};
  if (m.kind() != MapKind::reciprocal && m.kind() != MapKind::inv_one_plus)
    j["params"] = {number(m.params()[0]), number(m.params()[1])};
  return j;
}

json atom_json(const Atom& a) {
  json j{{"location", number(a.location)}, {"weight", number(a.weight)}};
  if (a.origin) j["origin"] = {{"prev", atom_json(a.origin->prev)}, {"via", map_json(a.origin->via)}};
  return j;
}

json piece_json(const DensityPiece& p);

json kernel_json(const measure::Kernel& k) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, measure::PowerExp>) {
          return {{"tag", "power_exp"}, {"power", number(v.power)}, {"rate", number(v.rate)}};
        } else if constexpr (std::is_same_v<T, measure::LinnikRational>) {
          return {{"tag", "linnik_rational"}, {"rho", number(v.rho)}, {"beta", number(v.beta)}};
        } else if constexpr (std::is_same_v<T, measure::LampertiCdf>) {
          return {{"tag", "lamperti_cdf"}, {"rho", number(v.rho)}, {"beta", number(v.beta)}};
        } else if constexpr (std::is_same_v<T, measure::BetaKernel>) {
          return {{"tag", "beta"}, {"a", number(v.a)}, {"b", number(v.b)}};
        } else if constexpr (std::is_same_v<T, measure::LogPower>) {
          return {{"tag", "log_power"}, {"power", number(v.power)}, {"log_power", number(v.log_power)}};
        } else if constexpr (std::is_same_v<T, measure::Composed>) {
          return {{"tag", "composed"}, {"base", piece_json(*v.base)}, {"map", map_json(v.map)}};
        } else {
          return {{"tag", "riemann_liouville"}, {"source", to_json(*v.source)}, {"alpha", number(v.alpha)}};
        }
      },
      k);
}

json piece_json(const DensityPiece& p) {
  json j{{"lo", number(p.lo)}, {"hi", number(p.hi)}, {"coef", number(p.coef)}, {"kernel", kernel_json(p.kernel)}};
  if (p.origin) j["origin"] = {{"prev", piece_json(p.origin->prev)}, {"via", map_json(p.origin->via)}};
  return j;
}

CanonicalSpec canonical(Reader& r, const json& j, const std::string& path) {
  CanonicalSpec c;
  const json* kind = r.field(j, path, "kind");
  if (!kind || !kind->is_string()) {
    if (kind) r.issue(path + ".kind", "expected a string");
    return c;
  }
  c.kind = kind->get<std::string>();
  if (c.kind == "indicator") {
    r.keys(j, path, {"kind", "theta", "upper"});
    const double theta = r.num(j, path, "theta"), upper = r.num(j, path, "upper", 1.0);
    if (!(theta > 0.0)) r.issue(path + ".theta", "must be > 0");
    if (!(upper > 0.0)) r.issue(path + ".upper", "must be > 0");
    c.params = {{"theta", theta}, {"upper", upper}};
    c.k = [=](double x) { return x > 0.0 && x < upper ? theta : 0.0; };
  } else if (c.kind == "power_exp") {
    r.keys(j, path, {"kind", "lambda", "alpha", "rate"});
    const double lambda = r.num(j, path, "lambda"), alpha = r.num(j, path, "alpha"), rate = r.num(j, path, "rate");
    if (!(lambda > 0.0)) r.issue(path + ".lambda", "must be > 0");
    c.params = {{"lambda", lambda}, {"alpha", alpha}, {"rate", rate}};
    c.k = [=](double x) { return x > 0.0 ? lambda * std::pow(x, -alpha) * std::exp(-rate * x) : 0.0; };
  } else {
    r.issue(path + ".kind", "unknown canonical function '" + c.kind + "' (supported: indicator, power_exp)");
  }
  return c;
}

}  // namespace

json to_json(const RadialMeasure& m) {
  json j = json::object();
  if (!m.atoms().empty()) {
    j["atoms"] = json::array();
    for (const auto& a : m.atoms()) j["atoms"].push_back(atom_json(a));
  }
  if (!m.pieces().empty()) {
    j["pieces"] = json::array();
    for (const auto& p : m.pieces()) j["pieces"].push_back(piece_json(p));
  }
  if (!m.trains().empty()) {
    j["trains"] = json::array();
    for (const auto& t : m.trains()) {
      json tj{{"first", number(t.first)}, {"step", number(t.step)}, {"weight", number(t.weight)}};
      if (!t.maps.empty()) {
        tj["maps"] = json::array();
        for (const auto& mm : t.maps) tj["maps"].push_back(map_json(mm));
      }
      j["trains"].push_back(tj);
    }
  }
  return j;
}

json to_json(const exponent::ThorinTriplet& t) {
  return {{"drift", number(t.drift)},
          {"gaussian_var", number(t.gaussian_var)},
          {"truncation", exponent::to_string(t.truncation)},
          {"tau_plus", to_json(t.tau_plus)},
          {"tau_minus", to_json(t.tau_minus)}};
}

json to_json(const catalog::Model& m) {
  if (m.name == "triplet") return {{"triplet", to_json(m.triplet)}};
  json params = json::object();
  for (const auto& [k, v] : m.params) params[k] = number(v);
  return {{"family", m.name}, {"params", params}};
}

json to_json(const Document& d) {
  json j{{"schema_version", schema_version}};
  if (!d.note.empty()) j["note"] = d.note;
  if (d.model) j.update(to_json(*d.model));
  if (d.canonical) {
    json c{{"kind", d.canonical->kind}};
    for (const auto& [k, v] : d.canonical->params) c[k] = number(v);
    j["canonical_function"] = c;
  }
  if (d.lgnbc) {
    j["lgnbc"] = {{"c", number(d.lgnbc->c)},
                  {"alpha_scale", number(d.lgnbc->alpha_scale)},
                  {"a", number(d.lgnbc->a_poisson)},
                  {"pi", to_json(d.lgnbc->pi)}};
  }
  return j;
}

Document from_json(const json& j) {
  Reader r;
  Document d;
  if (!j.is_object()) throw SchemaError({"document: expected a JSON object"});
  r.keys(j, "document", {"schema_version", "note", "family", "params", "triplet", "canonical_function", "lgnbc"});
  if (const json* v = r.field(j, "document", "schema_version")) {
    if (!v->is_number_integer() || v->get<int>() != schema_version)
      r.issue("document.schema_version", "unsupported (this build reads version " + std::to_string(schema_version) + ")");
  }
  if (const json* n = r.field(j, "document", "note", false)) {
    if (n->is_string()) d.note = n->get<std::string>();
    else r.issue("document.note", "expected a string");
  }
  int kinds = 0;
  for (const char* k : {"family", "triplet", "canonical_function", "lgnbc"}) kinds += j.contains(k) ? 1 : 0;
  if (kinds != 1) r.issue("document", "exactly one of family, triplet, canonical_function, lgnbc is required");
  if (j.contains("params") && !j.contains("family")) r.issue("document.params", "only allowed with family");

  std::optional<std::string> family;
  catalog::Params params;
  if (const json* f = r.field(j, "document", "family", false)) {
    if (!f->is_string()) {
      r.issue("document.family", "expected a string");
    } else {
      family = f->get<std::string>();
      if (const json* p = r.field(j, "document", "params")) {
        if (!p->is_object()) r.issue("document.params", "expected an object");
        else
          for (const auto& [k, v] : p->items()) params[k] = r.value(v, "document.params." + k);
      }
    }
  }
  std::optional<exponent::ThorinTriplet> triplet;
  if (const json* t = r.field(j, "document", "triplet", false)) {
    const std::string path = "document.triplet";
    r.keys(*t, path, {"drift", "gaussian_var", "truncation", "tau_plus", "tau_minus"});
    exponent::ThorinTriplet tt;
    tt.drift = r.num(*t, path, "drift", 0.0);
    tt.gaussian_var = r.num(*t, path, "gaussian_var", 0.0);
    if (const json* h = r.field(*t, path, "truncation", false)) {
      try {
        tt.truncation = exponent::truncation_from_string(h->get<std::string>());
      } catch (const std::exception&) {
        r.issue(path + ".truncation", "expected indicator, centered or none");
      }
    }
    if (const json* m = r.field(*t, path, "tau_plus", false)) tt.tau_plus = r.radial(*m, path + ".tau_plus");
    if (const json* m = r.field(*t, path, "tau_minus", false)) tt.tau_minus = r.radial(*m, path + ".tau_minus");
    triplet = tt;
  }
  if (const json* c = r.field(j, "document", "canonical_function", false))
    d.canonical = canonical(r, *c, "document.canonical_function");
  if (const json* q = r.field(j, "document", "lgnbc", false)) {
    const std::string path = "document.lgnbc";
    r.keys(*q, path, {"c", "alpha_scale", "a", "pi"});
    subordinate::LgnbcQuadruplet lq;
    lq.c = r.num(*q, path, "c");
    lq.alpha_scale = r.num(*q, path, "alpha_scale");
    lq.a_poisson = r.num(*q, path, "a", 0.0);
    if (const json* pi = r.field(*q, path, "pi", false)) lq.pi = r.radial(*pi, path + ".pi");
    d.lgnbc = lq;
  }
  if (!r.issues.empty()) throw SchemaError(r.issues);

  if (family) d.model = catalog::make(*family, params);
  if (triplet) {
    exponent::validate(*triplet);
    d.model = catalog::Model{"triplet", {}, *triplet, {}, {}, {}, {}};
  }
  if (d.lgnbc) {
    const auto report = subordinate::lgnbc_validate(*d.lgnbc);
    if (!report.valid) throw PreconditionError("lgnbc_quadruplet", report.issues.front());
  }
  return d;
}

Document parse(const std::string& text) { return from_json(json::parse(text)); }

Document load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

Document triplet_document(const exponent::ThorinTriplet& t, const std::string& note) {
  Document d;
  d.note = note;
  d.model = catalog::Model{"triplet", {}, t, {}, {}, {}, {}};
  return d;
}

subordinate::GgcSubordinator as_subordinator(const catalog::Model& m) {
  const auto& t = m.triplet;
  if (t.gaussian_var != 0.0 || !t.tau_minus.empty())
    throw PreconditionError("subordinator", "a GGC subordinator has no Gaussian part and no negative jumps");
  const double a = exponent::convert_truncation(t, exponent::Truncation::none).drift;
  if (a < -1e-12 * std::max(1.0, std::abs(t.drift)))
    throw PreconditionError("subordinator", "drift without compensation must be non-negative");
  return {std::max(0.0, a), t.tau_plus};
}

}  // namespace thorin::model_io
