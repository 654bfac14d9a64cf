#include "dpbc/model_io.hpp"

#include <fstream>
#include <sstream>

#include "dpbc/error.hpp"
#include "json.hpp"

namespace dpbc {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
  return j.at(key);
}

template <class T>
T get_as(const json& j, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

Polynomial poly_from_json(const json& j, const VarSpace& space, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": polynomial must be a list of terms");
  Polynomial p(space);
  for (std::size_t t = 0; t < j.size(); ++t) {
    const std::string w = where + "[" + std::to_string(t) + "]";
    auto exps = get_as<std::vector<int>>(field(j[t], "exps", w), w + ".exps");
    const double c = get_as<double>(field(j[t], "coef", w), w + ".coef");
    if (static_cast<int>(exps.size()) == space.state_dim) exps.resize(space.size(), 0);
    if (static_cast<int>(exps.size()) != space.size()) {
      throw ConfigError(w + ".exps: expected " + std::to_string(space.state_dim) + " or " +
                        std::to_string(space.size()) + " exponents");
    }
    for (int e : exps) {
      if (e < 0) throw ConfigError(w + ".exps: negative exponent");
    }
    p = p + Polynomial::monomial(space, Monomial(exps), c);
  }
  return p;
}

json poly_to_json(const Polynomial& p) {
  json arr = json::array();
  for (const auto& [m, c] : p.terms()) arr.push_back({{"exps", m.exponents()}, {"coef", c}});
  return arr;
}

Box box_from_json(const json& j, int n, const std::string& where) {
  Box b{get_as<std::vector<double>>(field(j, "lower", where), where + ".lower"),
        get_as<std::vector<double>>(field(j, "upper", where), where + ".upper")};
  if (b.dim() != n || static_cast<int>(b.upper.size()) != n) throw ConfigError(where + ": dimension mismatch");
  for (int k = 0; k < n; ++k) {
    if (!(b.lower[k] < b.upper[k])) throw ConfigError(where + ": lower must be below upper");
  }
  return b;
}

json box_to_json(const Box& b) { return {{"lower", b.lower}, {"upper", b.upper}}; }

}  // namespace

SystemModel parse_model(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("model JSON: ") + e.what());
  }
  SystemModel m;
  m.name = j.value("name", std::string("model"));
  const json& sp = field(j, "space", "model");
  const int n = get_as<int>(field(sp, "state_dim", "space"), "space.state_dim");
  const int nw = get_as<int>(field(sp, "noise_dim", "space"), "space.noise_dim");
  if (n < 1 || nw < 0) throw ConfigError("space: state_dim >= 1 and noise_dim >= 0 required");
  m.space = VarSpace(n, nw);

  const json& dyn = field(j, "dynamics", "model");
  if (!dyn.is_array() || static_cast<int>(dyn.size()) != n) {
    throw ConfigError("dynamics: expected one polynomial per state variable");
  }
  for (int i = 0; i < n; ++i) m.dynamics.push_back(poly_from_json(dyn[i], m.space, "dynamics[" + std::to_string(i) + "]"));

  std::vector<NoiseComponent> comps;
  const json& nz = field(j, "noise", "model");
  if (!nz.is_array()) throw ConfigError("noise: expected a list");
  for (std::size_t k = 0; k < nz.size(); ++k) {
    const std::string w = "noise[" + std::to_string(k) + "]";
    const auto type = get_as<std::string>(field(nz[k], "type", w), w + ".type");
    try {
      if (type == "uniform") {
        comps.push_back(NoiseComponent::uniform(get_as<double>(field(nz[k], "a", w), w + ".a"),
                                                get_as<double>(field(nz[k], "b", w), w + ".b")));
      } else if (type == "normal") {
        comps.push_back(NoiseComponent::normal(get_as<double>(field(nz[k], "sigma", w), w + ".sigma")));
      } else {
        throw ConfigError(w + ".type: expected uniform or normal");
      }
    } catch (const DomainError& e) {
      throw ConfigError(w + ": " + e.what());
    } catch (const InvalidInputError& e) {
      throw ConfigError(w + ": " + e.what());
    }
  }
  m.noise = NoiseVector(std::move(comps));
  m.horizon = get_as<int>(field(j, "horizon", "model"), "horizon");

  const json& regs = field(j, "regions", "model");
  if (!regs.is_object()) throw ConfigError("regions: expected an object");
  for (const auto& [key, val] : regs.items()) {
    RegionName r;
    try {
      r = region_from_string(key);
    } catch (const InvalidInputError& e) {
      throw ConfigError(std::string("regions: ") + e.what());
    }
    if (!val.is_array() || val.empty()) throw ConfigError("regions." + key + ": expected a non-empty list");
    std::vector<Polynomial> polys;
    for (std::size_t k = 0; k < val.size(); ++k) {
      polys.push_back(poly_from_json(val[k], m.space, "regions." + key + "[" + std::to_string(k) + "]"));
    }
    try {
      m.regions.emplace(r, SemialgebraicSet(r, std::move(polys)));
    } catch (const InvalidInputError& e) {
      throw ConfigError(std::string("regions.") + key + ": " + e.what());
    }
  }
  if (j.contains("initial_points")) {
    m.initial_points = get_as<std::vector<std::vector<double>>>(j["initial_points"], "initial_points");
  }
  if (j.contains("grid_box")) m.grid_box = box_from_json(j["grid_box"], n, "grid_box");
  if (j.contains("check_box")) m.check_box = box_from_json(j["check_box"], n, "check_box");
  validate(m);
  return m;
}

SystemModel load_model(const std::string& path) { return parse_model(read_file(path)); }

std::string model_to_json(const SystemModel& m) {
  json j;
  j["name"] = m.name;
  j["space"] = {{"state_dim", m.space.state_dim}, {"noise_dim", m.space.noise_dim}};
  j["dynamics"] = json::array();
  for (const auto& f : m.dynamics) j["dynamics"].push_back(poly_to_json(f));
  j["noise"] = json::array();
  for (const auto& c : m.noise.components()) {
    if (const auto* u = std::get_if<UniformNoise>(&c.distribution())) {
      j["noise"].push_back({{"type", "uniform"}, {"a", u->a}, {"b", u->b}});
    } else {
      j["noise"].push_back({{"type", "normal"}, {"sigma", std::get<NormalNoise>(c.distribution()).sigma}});
    }
  }
  j["horizon"] = m.horizon;
  j["regions"] = json::object();
  for (const auto& [r, set] : m.regions) {
    json polys = json::array();
    for (const auto& p : set.polys()) polys.push_back(poly_to_json(p));
    j["regions"][to_string(r)] = polys;
  }
  if (!m.initial_points.empty()) j["initial_points"] = m.initial_points;
  if (m.grid_box) j["grid_box"] = box_to_json(*m.grid_box);
  if (m.check_box) j["check_box"] = box_to_json(*m.check_box);
  return j.dump(2);
}

BarrierCertificate parse_certificate(const std::string& text, const VarSpace& space) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("certificate JSON: ") + e.what());
  }
  CertificateKind kind;
  try {
    kind = kind_from_string(get_as<std::string>(field(j, "kind", "certificate"), "kind"));
  } catch (const InvalidInputError& e) {
    throw ConfigError(e.what());
  }
  const double alpha = get_as<double>(field(j, "alpha", "certificate"), "alpha");
  const double beta = get_as<double>(field(j, "beta", "certificate"), "beta");
  std::optional<double> delta;
  if (j.contains("delta") && !j["delta"].is_null()) delta = get_as<double>(j["delta"], "delta");
  Polynomial v = poly_from_json(field(j, "v", "certificate"), space, "v");
  return BarrierCertificate::make(kind, std::move(v), alpha, beta, delta);
}

BarrierCertificate load_certificate(const std::string& path, const VarSpace& space) {
  return parse_certificate(read_file(path), space);
}

std::string certificate_to_json(const BarrierCertificate& c) {
  json j;
  j["kind"] = to_string(c.kind);
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["delta"] = c.delta ? json(*c.delta) : json(nullptr);
  j["v"] = poly_to_json(c.v);
  return j.dump(2);
}

void save_certificate(const BarrierCertificate& cert, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open '" + path + "' for writing");
  f << certificate_to_json(cert) << "\n";
}

namespace {

Polynomial x_poly(const VarSpace& sp) { return Polynomial::variable(sp, 0); }

SystemModel interval_model(const std::string& name, int noise_dim) {
  SystemModel m;
  m.name = name;
  m.space = VarSpace(1, noise_dim);
  const Polynomial x = x_poly(m.space);
  const Polynomial one = Polynomial::constant(m.space, 1.0);
  m.regions.emplace(RegionName::S, SemialgebraicSet(RegionName::S, {one - x * x}));
  m.regions.emplace(RegionName::XminusS, SemialgebraicSet(RegionName::XminusS, {x * x - one}));
  m.grid_box = Box::cube(1, -1.0, 1.0);
  return m;
}

}  // namespace

SystemModel example1_model() {
  SystemModel m = interval_model("example1", 1);
  const Polynomial x = x_poly(m.space);
  const Polynomial w = Polynomial::variable(m.space, 1);
  m.dynamics = {(w - 0.5) * x};
  m.noise = NoiseVector({NoiseComponent::uniform(-1.0, 1.0)});
  m.horizon = 50;
  const Polynomial xp = x + 0.9;
  m.regions.emplace(RegionName::X0, SemialgebraicSet(RegionName::X0, {xp * xp * -1.0}));
  const Polynomial g = Polynomial::constant(m.space, 0.36) - x * x;
  m.regions.emplace(RegionName::G, SemialgebraicSet(RegionName::G, {g}));
  m.regions.emplace(RegionName::SminusG,
                    SemialgebraicSet(RegionName::SminusG, {(Polynomial::constant(m.space, 1.0) - x * x) * (g * -1.0)}));
  m.regions.emplace(RegionName::XminusG, SemialgebraicSet(RegionName::XminusG, {g * -1.0}));
  m.initial_points = {{-0.9}};
  return m;
}

SystemModel example2_model() {
  SystemModel m = interval_model("example2", 1);
  const Polynomial x = x_poly(m.space);
  m.dynamics = {x + Polynomial::variable(m.space, 1)};
  m.noise = NoiseVector({NoiseComponent::normal(0.1)});
  m.horizon = 20;
  m.regions.emplace(RegionName::X0,
                    SemialgebraicSet(RegionName::X0, {Polynomial::constant(m.space, 0.01) - x * x}));
  m.initial_points = {{-0.1}, {0.0}, {0.1}};
  return m;
}

SystemModel resolve_model(const std::string& name_or_path) {
  if (name_or_path == "example1") return example1_model();
  if (name_or_path == "example2") return example2_model();
  return load_model(name_or_path);
}

}  // namespace dpbc
