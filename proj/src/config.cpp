#include "fbqo/config.hpp"

#include <json.hpp>

#include "fbqo/error.hpp"
#include "fbqo/flatband.hpp"
#include "fbqo/giant.hpp"

namespace fbqo {

using nlohmann::json;

namespace {

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::Config, std::string("invalid JSON: ") + e.what());
  }
}

template <class T>
T get(const json& j, const char* key, const T& fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    fail(ErrorCode::Config, std::string("bad value for '") + key + "'");
  }
}

Cell cell_from(const json& j, int dim) {
  Cell c = {0, 0};
  if (j.is_number_integer()) {
    c[0] = j.get<int>();
  } else if (j.is_array() && !j.empty() && j.size() <= 2) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (!j[i].is_number_integer()) fail(ErrorCode::Config, "cell entries must be integers");
      c[i] = j[i].get<int>();
    }
  } else {
    fail(ErrorCode::Config, "cell must be an integer or an array of one or two integers");
  }
  if (dim == 1 && j.is_array() && j.size() == 2 && c[1] != 0) fail(ErrorCode::Config, "2D cell for a 1D lattice");
  if (dim == 1) c[1] = 0;
  return c;
}

Cell checked_cell(const LatticeModel& m, const json& j) {
  const Cell c = cell_from(j, m.dim());
  for (int d = 0; d < m.dim(); ++d)
    if (c[d] < 0 || c[d] >= m.cells()[d]) fail(ErrorCode::Config, "cell outside the lattice");
  return c;
}

}  // namespace

LatticeModel lattice_from_json(const std::string& text) {
  const json j = parse(text);
  if (!j.is_object()) fail(ErrorCode::Config, "lattice spec must be a JSON object");
  if (!j.contains("model")) fail(ErrorCode::Config, "lattice spec needs 'model'");
  const ModelKind kind = parse_model_name(get<std::string>(j, "model", ""));
  if (!j.contains("N")) fail(ErrorCode::Config, "lattice spec needs 'N'");
  Cell cells = {0, 1};
  const json& n = j.at("N");
  if (n.is_number_integer()) {
    cells[0] = n.get<int>();
    cells[1] = kind == ModelKind::Checkerboard ? cells[0] : 1;
  } else if (n.is_array() && n.size() == 2 && n[0].is_number_integer() && n[1].is_number_integer()) {
    cells = {n[0].get<int>(), n[1].get<int>()};
    if (kind != ModelKind::Checkerboard && cells[1] != 1) fail(ErrorCode::Config, "2D N for a 1D model");
  } else {
    fail(ErrorCode::Config, "'N' must be an integer or [Nx, Ny]");
  }
  ModelParams p;
  p.J = get<double>(j, "J", 1.0);
  if (j.contains("params")) {
    const json& q = j.at("params");
    if (!q.is_object()) fail(ErrorCode::Config, "'params' must be an object");
    p.Delta = get<double>(q, "Delta", 0.0);
    p.t = get<double>(q, "t", 0.0);
    p.omega_c = get<double>(q, "omega_c", 0.0);
  }
  if (kind == ModelKind::DoubleComb && p.t == 0.0) p.t = p.J;
  LatticeModel m = [&] {
    try {
      return build_model(kind, cells, p);
    } catch (const Error& e) {
      fail(ErrorCode::Config, e.what());
    }
  }();
  if (j.contains("disorder") && !j.at("disorder").is_null()) {
    const json& d = j.at("disorder");
    DisorderSpec spec;
    const std::string kind_name = get<std::string>(d, "kind", "diagonal");
    if (kind_name == "diagonal") {
      spec.kind = DisorderKind::Diagonal;
    } else if (kind_name == "off-diagonal" || kind_name == "offdiagonal") {
      spec.kind = DisorderKind::OffDiagonal;
    } else {
      fail(ErrorCode::Config, "disorder kind must be 'diagonal' or 'off-diagonal'");
    }
    spec.strength = get<double>(d, "strength", 0.0);
    if (spec.strength < 0.0) fail(ErrorCode::Config, "disorder strength must be non-negative");
    spec.seed = get<std::uint64_t>(d, "seed", 0);
    m = apply_disorder(m, spec);
  }
  return m;
}

std::vector<EmitterSpec> emitters_from_json(const LatticeModel& m, const std::string& text) {
  json j = parse(text);
  if (j.is_object()) j = json::array({j});
  if (!j.is_array() || j.empty()) fail(ErrorCode::Config, "emitters must be a nonempty JSON array");
  std::vector<EmitterSpec> out;
  for (const json& e : j) {
    if (!e.is_object() || !e.contains("omega0")) fail(ErrorCode::Config, "each emitter needs 'omega0'");
    const double w0 = get<double>(e, "omega0", 0.0);
    const int generators = int(e.contains("couplings")) + int(e.contains("cls")) + int(e.contains("envelope"));
    if (generators != 1) fail(ErrorCode::Config, "each emitter needs exactly one of couplings, cls, envelope");
    try {
      if (e.contains("couplings")) {
        EmitterSpec spec;
        spec.omega0 = w0;
        const json& cs = e.at("couplings");
        if (!cs.is_array() || cs.empty()) fail(ErrorCode::Config, "'couplings' must be a nonempty array");
        for (const json& c : cs) {
          if (!c.contains("cell")) fail(ErrorCode::Config, "coupling needs 'cell'");
          const Cell cell = checked_cell(m, c.at("cell"));
          const int sub = sublattice_from_name(m, get<std::string>(c, "sublattice", "a"));
          spec.couplings.push_back({m.site(cell, sub), cplx(get<double>(c, "g_re", 0.0), get<double>(c, "g_im", 0.0))});
        }
        if (spec.gbar() == 0.0) fail(ErrorCode::Config, "emitter couplings are all zero");
        out.push_back(spec);
        continue;
      }
      if (!e.contains("g")) fail(ErrorCode::Config, "generated emitters need 'g'");
      const double g = get<double>(e, "g", 0.0);
      if (!(g > 0.0)) fail(ErrorCode::Config, "'g' must be positive");
      if (e.contains("cls")) {
        const json& c = e.at("cls");
        const ClsSet cls = cls_set(m);
        if (c.contains("cells")) {
          const json& cells = c.at("cells");
          const json coeffs = c.contains("coeffs") ? c.at("coeffs") : json::array();
          if (!cells.is_array() || cells.empty()) fail(ErrorCode::Config, "'cls.cells' must be a nonempty array");
          std::vector<std::pair<Cell, cplx>> terms;
          for (std::size_t i = 0; i < cells.size(); ++i) {
            const double coef = i < coeffs.size() ? coeffs[i].get<double>() : 1.0;
            terms.push_back({checked_cell(m, cells[i]), coef});
          }
          out.push_back(cls_superposition_emitter(m, cls, terms, g, w0));
        } else {
          if (!c.contains("cell")) fail(ErrorCode::Config, "'cls' needs 'cell' or 'cells'");
          out.push_back(cls_emitter(m, cls, checked_cell(m, c.at("cell")), g, w0));
        }
      } else {
        const json& v = e.at("envelope");
        if (!v.contains("ell") || !v.contains("center")) fail(ErrorCode::Config, "'envelope' needs 'ell' and 'center'");
        const int sub = sublattice_from_name(m, get<std::string>(v, "sublattice", "a"));
        out.push_back(envelope_emitter(m, sub, checked_cell(m, v.at("center")), get<double>(v, "ell", 1.0), g, w0));
      }
    } catch (const json::exception& ex) {
      fail(ErrorCode::Config, std::string("bad emitter entry: ") + ex.what());
    } catch (const Error& ex) {
      if (ex.code() == ErrorCode::Config) throw;
      fail(ErrorCode::Config, ex.what());
    }
  }
  return out;
}

Index parse_site(const LatticeModel& m, const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) fail(ErrorCode::Config, "site must look like 'a:50' or 'a:3,7'");
  const int sub = sublattice_from_name(m, spec.substr(0, colon));
  const std::string rest = spec.substr(colon + 1);
  Cell c = {0, 0};
  try {
    const auto comma = rest.find(',');
    std::size_t used = 0;
    if (comma == std::string::npos) {
      c[0] = std::stoi(rest, &used);
      if (used != rest.size()) throw std::invalid_argument(rest);
    } else {
      c[0] = std::stoi(rest.substr(0, comma), &used);
      if (used != comma) throw std::invalid_argument(rest);
      const std::string second = rest.substr(comma + 1);
      c[1] = std::stoi(second, &used);
      if (used != second.size()) throw std::invalid_argument(rest);
    }
  } catch (const std::exception&) {
    fail(ErrorCode::Config, "cannot parse site '" + spec + "'");
  }
  if (m.dim() == 1 && c[1] != 0) fail(ErrorCode::Config, "2D site for a 1D lattice");
  for (int d = 0; d < m.dim(); ++d)
    if (c[d] < 0 || c[d] >= m.cells()[d]) fail(ErrorCode::Config, "site cell outside the lattice");
  return m.site(c, sub);
}

}  // namespace fbqo
