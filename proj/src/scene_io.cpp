#include "ehh/scene_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace ehh {

using nlohmann::json;

namespace {

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw SceneError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw SceneError(path, "must be finite");
  return v;
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw SceneError(path, "expected an integer");
  return j.get<int>();
}

const json& member(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw SceneError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SceneError(path.empty() ? std::string(key) : path + "." + key, "missing");
  return *it;
}

std::vector<double> numbers(const json& j, const std::string& path, std::size_t want = 0) {
  if (!j.is_array()) throw SceneError(path, "expected an array");
  if (want && j.size() != want)
    throw SceneError(path, "expected " + std::to_string(want) + " entries");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& path) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw SceneError(path.empty() ? it.key() : path + "." + it.key(), "unknown field");
  }
}

liealg::ColoredRep color(const json& j, const std::string& path) {
  if (!j.is_object()) throw SceneError(path, "expected {jplus2, jminus2}");
  check_keys(j, {"jplus2", "jminus2"}, path);
  liealg::ColoredRep c;
  c.jplus2 = integer(member(j, "jplus2", path), path + ".jplus2");
  c.jminus2 = integer(member(j, "jminus2", path), path + ".jminus2");
  for (int v : {c.jplus2, c.jminus2}) {
    if (v < 0 || v > liealg::kMaxTwoJ)
      throw SceneError(path, "doubled spins must be in 0.." + std::to_string(liealg::kMaxTwoJ));
  }
  return c;
}

geometry::FourierLoop loop(const json& j, const std::string& path) {
  if (!j.is_object()) throw SceneError(path, "expected an object");
  check_keys(j, {"coords", "circle", "orientation", "color"}, path);
  int orientation = 1;
  if (j.contains("orientation")) {
    orientation = integer(j["orientation"], path + ".orientation");
    if (orientation != 1 && orientation != -1)
      throw SceneError(path + ".orientation", "must be 1 or -1");
  }
  if (j.contains("coords") == j.contains("circle"))
    throw SceneError(path, "give exactly one of 'coords' or 'circle'");

  if (j.contains("circle")) {
    const std::string cp = path + ".circle";
    const json& c = j["circle"];
    if (!c.is_object()) throw SceneError(cp, "expected an object");
    check_keys(c, {"center", "radius", "axes"}, cp);
    const auto center = numbers(member(c, "center", cp), cp + ".center", 4);
    const double radius = number(member(c, "radius", cp), cp + ".radius");
    if (!(radius > 0)) throw SceneError(cp + ".radius", "must be positive");
    const json& axes = member(c, "axes", cp);
    if (!axes.is_array() || axes.size() != 2) throw SceneError(cp + ".axes", "expected [a, b]");
    const int a = integer(axes[0], cp + ".axes[0]");
    const int b = integer(axes[1], cp + ".axes[1]");
    if (a == b || a < 0 || a > 3 || b < 0 || b > 3)
      throw SceneError(cp + ".axes", "two distinct axes in 0..3");
    return geometry::FourierLoop::circle({center[0], center[1], center[2], center[3]}, radius, a,
                                         b, orientation);
  }

  const std::string cp = path + ".coords";
  const json& cs = j["coords"];
  if (!cs.is_array() || cs.size() != 4) throw SceneError(cp, "expected 4 coordinate series");
  std::array<geometry::FourierSeries, 4> series;
  for (std::size_t a = 0; a < 4; ++a) {
    const std::string ap = cp + "[" + std::to_string(a) + "]";
    const json& e = cs[a];
    if (!e.is_object()) throw SceneError(ap, "expected {const, cos, sin}");
    check_keys(e, {"const", "cos", "sin"}, ap);
    if (e.contains("const")) series[a].constant = number(e["const"], ap + ".const");
    if (e.contains("cos")) series[a].cos = numbers(e["cos"], ap + ".cos");
    if (e.contains("sin")) series[a].sin = numbers(e["sin"], ap + ".sin");
  }
  geometry::FourierLoop out(std::move(series), orientation);
  // immersion check on a coarse grid
  for (int k = 0; k < 256; ++k) {
    const auto v = out.eval(k / 256.0).velocity;
    if (std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]) < 1e-9)
      throw SceneError(cp, "velocity vanishes at s=" + std::to_string(k / 256.0));
  }
  return out;
}

geometry::Affine4x3 affine4x3(const json& j, const std::string& path) {
  check_keys(j, {"matrix", "offset"}, path);
  geometry::Affine4x3 a;
  const json& m = member(j, "matrix", path);
  if (!m.is_array() || m.size() != 4) throw SceneError(path + ".matrix", "expected 4 rows of 3");
  for (std::size_t r = 0; r < 4; ++r) {
    const auto row = numbers(m[r], path + ".matrix[" + std::to_string(r) + "]", 3);
    for (std::size_t c = 0; c < 3; ++c) a.matrix[r][c] = row[c];
  }
  const auto off = numbers(member(j, "offset", path), path + ".offset", 4);
  for (std::size_t r = 0; r < 4; ++r) a.offset[r] = off[r];
  return a;
}

geometry::Surface surface(const json& j, const std::string& path) {
  if (!j.is_object()) throw SceneError(path, "expected an object");
  check_keys(j, {"kind", "params", "affine", "partition"}, path);
  const json& kind = member(j, "kind", path);
  if (!kind.is_string()) throw SceneError(path + ".kind", "expected a string");
  geometry::Surface::Kind k;
  try {
    k = geometry::surface_kind_from_string(kind.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw SceneError(path + ".kind", e.what());
  }
  geometry::Surface::Params p;
  if (j.contains("params")) {
    const json& pj = j["params"];
    const std::string pp = path + ".params";
    if (!pj.is_object()) throw SceneError(pp, "expected an object");
    check_keys(pj, {"width", "height", "radius", "major_radius", "minor_radius", "theta0",
                    "theta1", "phi0", "phi1"},
               pp);
    auto get = [&](const char* key, double& dst) {
      if (pj.contains(key)) dst = number(pj[key], pp + "." + key);
    };
    get("width", p.width);
    get("height", p.height);
    get("radius", p.radius);
    get("major_radius", p.major_radius);
    get("minor_radius", p.minor_radius);
    get("theta0", p.theta0);
    get("theta1", p.theta1);
    get("phi0", p.phi0);
    get("phi1", p.phi1);
  }
  const auto aff = affine4x3(member(j, "affine", path), path + ".affine");
  std::vector<geometry::SurfaceCell> cells;
  if (j.contains("partition")) {
    const json& pj = j["partition"];
    if (!pj.is_array()) throw SceneError(path + ".partition", "expected an array");
    for (std::size_t i = 0; i < pj.size(); ++i) {
      const std::string cp = path + ".partition[" + std::to_string(i) + "]";
      if (!pj[i].is_object()) throw SceneError(cp, "expected an object");
      check_keys(pj[i], {"cell", "label"}, cp);
      const auto c = numbers(member(pj[i], "cell", cp), cp + ".cell", 4);
      geometry::SurfaceCell cell;
      cell.box.lo = {c[0], c[2]};
      cell.box.hi = {c[1], c[3]};
      if (pj[i].contains("label") && !pj[i]["label"].is_null())
        cell.label = color(pj[i]["label"], cp + ".label");
      cells.push_back(cell);
    }
  }
  try {
    return geometry::Surface(k, p, aff, std::move(cells));
  } catch (const std::invalid_argument& e) {
    throw SceneError(path, e.what());
  }
}

geometry::Region region(const json& j, const std::string& path) {
  if (!j.is_object()) throw SceneError(path, "expected an object");
  check_keys(j, {"affine", "partition"}, path);
  const std::string ap = path + ".affine";
  const json& aj = member(j, "affine", path);
  if (!aj.is_object()) throw SceneError(ap, "expected an object");
  check_keys(aj, {"matrix", "offset"}, ap);
  const json& m = member(aj, "matrix", ap);
  if (!m.is_array() || m.size() != 3) throw SceneError(ap + ".matrix", "expected 3 rows of 3");
  std::array<std::array<double, 3>, 3> mat{};
  for (std::size_t r = 0; r < 3; ++r) {
    const auto row = numbers(m[r], ap + ".matrix[" + std::to_string(r) + "]", 3);
    for (std::size_t c = 0; c < 3; ++c) mat[r][c] = row[c];
  }
  const auto off = numbers(member(aj, "offset", ap), ap + ".offset", 3);
  std::vector<geometry::Box<3>> cells;
  if (j.contains("partition")) {
    const json& pj = j["partition"];
    if (!pj.is_array()) throw SceneError(path + ".partition", "expected an array");
    for (std::size_t i = 0; i < pj.size(); ++i) {
      const std::string cp = path + ".partition[" + std::to_string(i) + "]";
      if (!pj[i].is_object()) throw SceneError(cp, "expected an object");
      check_keys(pj[i], {"cell"}, cp);
      const auto c = numbers(member(pj[i], "cell", cp), cp + ".cell", 6);
      geometry::Box<3> b;
      b.lo = {c[0], c[2], c[4]};
      b.hi = {c[1], c[3], c[5]};
      cells.push_back(b);
    }
  }
  try {
    return geometry::Region(mat, {off[0], off[1], off[2]}, std::move(cells));
  } catch (const std::invalid_argument& e) {
    throw SceneError(path, e.what());
  }
}

json series_json(const geometry::FourierSeries& s) {
  return {{"const", s.constant}, {"cos", s.cos}, {"sin", s.sin}};
}

json loop_json(const geometry::FourierLoop& l) {
  json coords = json::array();
  for (const auto& s : l.coords()) coords.push_back(series_json(s));
  return {{"coords", coords}, {"orientation", l.orientation()}};
}

json color_json(const liealg::ColoredRep& c) {
  return {{"jplus2", c.jplus2}, {"jminus2", c.jminus2}};
}

}  // namespace

Scene scene_from_json(const json& j) {
  if (!j.is_object()) throw SceneError("", "scene must be a JSON object");
  check_keys(j, {"charge", "matter", "geometric", "surface", "region", "comment"}, "");
  Scene s;
  if (j.contains("charge")) s.charge = number(j["charge"], "charge");
  if (j.contains("matter")) {
    const json& m = j["matter"];
    if (!m.is_array()) throw SceneError("matter", "expected an array");
    for (std::size_t i = 0; i < m.size(); ++i) {
      const std::string p = "matter[" + std::to_string(i) + "]";
      s.matter.loops.push_back(loop(m[i], p));
      s.matter.colors.push_back(color(member(m[i], "color", p), p + ".color"));
    }
  }
  if (j.contains("geometric")) {
    const json& g = j["geometric"];
    if (!g.is_array()) throw SceneError("geometric", "expected an array");
    for (std::size_t i = 0; i < g.size(); ++i) {
      const std::string p = "geometric[" + std::to_string(i) + "]";
      if (g[i].is_object() && g[i].contains("color"))
        throw SceneError(p + ".color", "geometric loops carry no color");
      s.geometric.loops.push_back(loop(g[i], p));
    }
  }
  if (j.contains("surface") && !j["surface"].is_null()) s.surface = surface(j["surface"], "surface");
  if (j.contains("region") && !j["region"].is_null()) s.region = region(j["region"], "region");
  return s;
}

Scene load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SceneError("", "cannot open scene file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SceneError("", std::string("malformed JSON in '") + path + "': " + e.what());
  }
  return scene_from_json(j);
}

json scene_to_json(const Scene& scene) {
  json out;
  out["charge"] = scene.charge;
  out["matter"] = json::array();
  for (std::size_t u = 0; u < scene.matter.size(); ++u) {
    json l = loop_json(scene.matter.loops[u]);
    l["color"] = color_json(scene.matter.colors[u]);
    out["matter"].push_back(l);
  }
  out["geometric"] = json::array();
  for (const auto& l : scene.geometric.loops) out["geometric"].push_back(loop_json(l));
  if (scene.surface) {
    const auto& s = *scene.surface;
    const auto& p = s.params();
    json part = json::array();
    for (const auto& c : s.partition()) {
      json e = {{"cell", {c.box.lo[0], c.box.hi[0], c.box.lo[1], c.box.hi[1]}}};
      if (c.label) e["label"] = color_json(*c.label);
      part.push_back(e);
    }
    out["surface"] = {
        {"kind", geometry::to_string(s.kind())},
        {"params",
         {{"width", p.width}, {"height", p.height}, {"radius", p.radius},
          {"major_radius", p.major_radius}, {"minor_radius", p.minor_radius},
          {"theta0", p.theta0}, {"theta1", p.theta1}, {"phi0", p.phi0}, {"phi1", p.phi1}}},
        {"affine", {{"matrix", s.placement().matrix}, {"offset", s.placement().offset}}},
        {"partition", part}};
  }
  if (scene.region) {
    const auto& r = *scene.region;
    json part = json::array();
    for (const auto& b : r.partition())
      part.push_back({{"cell", {b.lo[0], b.hi[0], b.lo[1], b.hi[1], b.lo[2], b.hi[2]}}});
    out["region"] = {{"affine", {{"matrix", r.matrix()}, {"offset", r.offset()}}},
                     {"partition", part}};
  }
  return out;
}

}  // namespace ehh
