#include "prodstate/io.hpp"

#include <fstream>
#include <sstream>

namespace prodstate {

json rational_to_json(const Rational& q) { return format_rational(q); }

Rational rational_from_json(const json& j) {
  try {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long>());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("bad rational: ") + e.what());
  }
  throw FormatError("expected a rational string such as \"1/2\", got " + j.dump());
}

json value_to_json(const Value& v) {
  if (is_exact(v)) return format_value(v);
  return json{{"mean", format_value(v)}, {"std_error", format_value(Estimate{std_error(v), 0})}};
}

namespace {

const json& field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw FormatError(std::string("missing field \"") + name + "\"");
  return j.at(name);
}

Point point_from_json(const json& j) {
  if (!j.is_array()) throw FormatError("a point is an array of rationals");
  Point p;
  for (const auto& c : j) p.push_back(rational_from_json(c));
  return p;
}

json point_to_json(const Point& p) {
  json a = json::array();
  for (const auto& c : p) a.push_back(rational_to_json(c));
  return a;
}

SamplerLaw law_from_json(const json& j, std::optional<std::size_t>& arity) {
  std::string name = j.is_string() ? j.get<std::string>() : field(j, "law").get<std::string>();
  if (name == "uniform") return SamplerLaw::uniform();
  if (name == "product-beta") {
    const json& params = field(j, "params");
    std::vector<std::pair<double, double>> ab;
    for (const auto& p : params) {
      if (!p.is_array() || p.size() != 2) throw FormatError("product-beta params are [alpha, beta] pairs");
      ab.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    if (!arity) arity = ab.size();
    return SamplerLaw::product_beta(std::move(ab));
  }
  if (name == "atom-mix") {
    std::vector<SamplerLaw::Component> comps;
    for (const auto& c : field(j, "components")) {
      SamplerLaw::Component comp;
      comp.weight = rational_from_json(field(c, "weight"));
      if (c.contains("point")) {
        comp.atom = point_from_json(c.at("point"));
        if (!arity) arity = comp.atom->size();
      } else {
        comp.law = std::make_shared<SamplerLaw>(law_from_json(c, arity));
      }
      comps.push_back(std::move(comp));
    }
    return SamplerLaw::atom_mix(std::move(comps));
  }
  throw FormatError("unknown sampler law \"" + name + "\"");
}

json law_to_json(const SamplerLaw& law) {
  switch (law.kind) {
    case SamplerLaw::Kind::Uniform:
      return json{{"law", "uniform"}};
    case SamplerLaw::Kind::ProductBeta: {
      json params = json::array();
      for (auto [a, b] : law.beta) params.push_back({a, b});
      return json{{"law", "product-beta"}, {"params", params}};
    }
    case SamplerLaw::Kind::AtomMix: {
      json comps = json::array();
      for (const auto& c : law.components) {
        json o = c.law ? law_to_json(*c.law) : json{{"point", point_to_json(*c.atom)}};
        o["weight"] = rational_to_json(c.weight);
        comps.push_back(o);
      }
      return json{{"law", "atom-mix"}, {"components", comps}};
    }
  }
  return {};
}

}  // namespace

StatePtr state_from_json(const json& j, std::optional<std::size_t> default_arity) {
  try {
    std::string type = field(j, "type").get<std::string>();
    if (type == "dirac") return std::make_shared<DiracState>(point_from_json(field(j, "point")));
    if (type == "mixture") {
      std::vector<Point> pts;
      for (const auto& p : field(j, "points")) pts.push_back(point_from_json(p));
      std::vector<Rational> ws;
      for (const auto& w : field(j, "weights")) ws.push_back(rational_from_json(w));
      return std::make_shared<MixtureState>(std::move(pts), std::move(ws));
    }
    if (type == "sampler") {
      std::optional<std::size_t> arity;
      if (j.contains("arity")) arity = j.at("arity").get<std::size_t>();
      SamplerLaw law = law_from_json(j, arity);
      if (!arity) arity = default_arity;
      if (!arity) arity = 1;
      std::size_t n = field(j, "n").get<std::size_t>();
      std::uint64_t seed = j.value("seed", std::uint64_t{0});
      return std::make_shared<SamplerState>(*arity, std::move(law), n, seed);
    }
    throw FormatError("unknown state type \"" + type + "\"");
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed state: ") + e.what());
  }
}

json state_to_json(const State& s) {
  if (const auto* d = dynamic_cast<const DiracState*>(&s)) return json{{"type", "dirac"}, {"point", point_to_json(d->point())}};
  if (const auto* m = dynamic_cast<const MixtureState*>(&s)) {
    json pts = json::array(), ws = json::array();
    for (const auto& p : m->points()) pts.push_back(point_to_json(p));
    for (const auto& w : m->weights()) ws.push_back(rational_to_json(w));
    return json{{"type", "mixture"}, {"points", pts}, {"weights", ws}};
  }
  if (const auto* smp = dynamic_cast<const SamplerState*>(&s)) {
    json o = law_to_json(smp->law());
    o["type"] = "sampler";
    o["arity"] = smp->arity();
    o["n"] = smp->samples();
    o["seed"] = smp->seed();
    return o;
  }
  throw FormatError("state of kind \"" + s.kind() + "\" has no JSON form");
}

SpectrumDist dist_from_json(const json& j) {
  try {
    SpectrumDist d;
    d.neg = rational_from_json(field(j, "neg"));
    d.nn = rational_from_json(field(j, "nn"));
    for (const auto& m : j.value("prefix", json::array())) d.prefix.push_back(rational_from_json(m));
    for (const auto& t : j.value("tails", json::array()))
      d.tails.push_back({rational_from_json(field(t, "c")), rational_from_json(field(t, "r"))});
    d.limit = j.contains("limit") ? rational_from_json(j.at("limit")) : Rational(0);
    return d;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed distribution: ") + e.what());
  }
}

json dist_to_json(const SpectrumDist& d) {
  json prefix = json::array(), tails = json::array();
  for (const auto& m : d.prefix) prefix.push_back(rational_to_json(m));
  for (const auto& t : d.tails) tails.push_back({{"c", rational_to_json(t.c)}, {"r", rational_to_json(t.r)}});
  return json{{"neg", rational_to_json(d.neg)},
              {"nn", rational_to_json(d.nn)},
              {"prefix", prefix},
              {"tails", tails},
              {"limit", rational_to_json(d.limit)}};
}

SatProblem problem_from_json(const json& j) {
  try {
    SatProblem p;
    p.arity = field(j, "arity").get<std::size_t>();
    for (const auto& g : j.value("gamma", json::array())) p.gamma.push_back(parse_modal(g.get<std::string>(), p.arity));
    if (j.contains("target") && !j.at("target").is_null()) p.target = parse_modal(j.at("target").get<std::string>(), p.arity);
    if (j.contains("budget")) {
      const json& b = j.at("budget");
      if (b.contains("support")) p.budget.support = b.at("support").get<std::size_t>();
      if (b.contains("samples")) p.budget.samples = b.at("samples").get<std::size_t>();
      if (b.contains("delta")) p.budget.delta = rational_from_json(b.at("delta"));
      if (b.contains("seed")) p.budget.seed = b.at("seed").get<std::uint64_t>();
    }
    return p;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed problem: ") + e.what());
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

}  // namespace prodstate
