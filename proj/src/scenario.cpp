#include "coopsafe/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "coopsafe/errors.hpp"

namespace coopsafe {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string index(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

// Field access with the JSON path kept for error messages.
class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  const json& value() const { return j_; }
  const std::string& path() const { return path_; }

  void expect_object(std::initializer_list<const char*> allowed) const {
    if (!j_.is_object()) fail("expected an object");
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& item : j_.items()) {
      if (!keys.count(item.key())) throw ValidationError(join(path_, item.key()), "unknown field");
    }
  }

  bool has(const char* key) const { return j_.contains(key); }
  Node at(const char* key) const {
    if (!has(key)) throw ValidationError(join(path_, key), "required field is missing");
    return {j_.at(key), join(path_, key)};
  }
  Node item(std::size_t i) const { return {j_.at(i), index(path_, i)}; }

  double number() const {
    if (!j_.is_number()) fail("expected a number");
    const double v = j_.get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }
  double number(const char* key, double fallback) const {
    return has(key) ? at(key).number() : fallback;
  }
  std::string string() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }
  std::size_t size() const {
    if (!j_.is_array()) fail("expected an array");
    return j_.size();
  }
  Eigen::VectorXd vector() const {
    const std::size_t n = size();
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) v(static_cast<Eigen::Index>(i)) = item(i).number();
    return v;
  }
  Eigen::Vector3d vec3() const {
    const Eigen::VectorXd v = vector();
    if (v.size() != 3) fail("expected 3 numbers");
    return v;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ValidationError(path_, what); }

 private:
  const json& j_;
  std::string path_;
};

Pose parse_pose(const Node& n) {
  n.expect_object({"xyz", "rpy"});
  Pose p;
  if (n.has("xyz")) p.xyz = n.at("xyz").vec3();
  if (n.has("rpy")) p.rpy = n.at("rpy").vec3();
  return p;
}

JointSpec parse_joint(const Node& n) {
  n.expect_object({"type", "axis", "offset", "limits", "segment"});
  JointSpec j;
  const std::string type = n.at("type").string();
  if (type == "revolute") {
    j.type = JointType::kRevolute;
  } else if (type == "prismatic") {
    j.type = JointType::kPrismatic;
  } else {
    n.at("type").fail("expected \"revolute\" or \"prismatic\"");
  }
  if (n.has("axis")) j.axis = n.at("axis").vec3();
  if (n.has("offset")) j.offset = parse_pose(n.at("offset"));
  if (n.has("limits")) {
    const Node lim = n.at("limits");
    if (lim.size() != 2) lim.fail("expected [min, max]");
    j.min = lim.item(0).number();
    j.max = lim.item(1).number();
  }
  if (n.has("segment")) {
    const Node seg = n.at("segment");
    seg.expect_object({"start", "end"});
    if (seg.has("start")) j.segment.start = seg.at("start").vec3();
    if (seg.has("end")) j.segment.end = seg.at("end").vec3();
  }
  return j;
}

void parse_robot(const Node& n, Scenario& sc) {
  n.expect_object({"name", "base", "joints", "tool", "q0"});
  RobotModel m;
  m.name = n.has("name") ? n.at("name").string() : "robot" + std::to_string(sc.robots.size());
  if (n.has("base")) {
    const Node b = n.at("base");
    b.expect_object({"kind", "pose"});
    const std::string kind = b.has("kind") ? b.at("kind").string() : "fixed";
    if (kind == "fixed") {
      m.base_kind = BaseKind::kFixed;
    } else if (kind == "planarHolonomic") {
      m.base_kind = BaseKind::kPlanarHolonomic;
    } else {
      b.at("kind").fail("expected \"fixed\" or \"planarHolonomic\"");
    }
    if (b.has("pose")) m.base_pose = parse_pose(b.at("pose"));
  }
  const Node joints = n.at("joints");
  for (std::size_t k = 0; k < joints.size(); ++k) m.joints.push_back(parse_joint(joints.item(k)));
  if (n.has("tool")) m.tool_offset = parse_pose(n.at("tool"));
  sc.q0.push_back(n.has("q0") ? n.at("q0").vector()
                              : Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.dof())).eval());
  sc.robots.push_back(std::move(m));
}

Eigen::MatrixXd parse_matrix(const Node& n) {
  const json& j = n.value();
  if (j.is_number()) {
    // Scalar multiple of the identity; sized during validation.
    Eigen::MatrixXd a(1, 1);
    a(0, 0) = n.number();
    return a;
  }
  const std::size_t rows = n.size();
  if (rows == 0) n.fail("expected a scalar, a diagonal or a square matrix");
  if (j.at(0).is_number()) {
    return n.vector().asDiagonal();
  }
  Eigen::MatrixXd a(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(rows));
  for (std::size_t r = 0; r < rows; ++r) {
    const Eigen::VectorXd row = n.item(r).vector();
    if (static_cast<std::size_t>(row.size()) != rows) n.item(r).fail("matrix must be square");
    a.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return a;
}

void parse_gains(const Node& n, Scenario& sc) {
  n.expect_object({"kSigma", "lambdaSigma", "kN", "kDamp", "lambdaDls", "kD", "kP", "impedance"});
  GainsConfig& g = sc.gains;
  g.k_sigma = n.number("kSigma", g.k_sigma);
  g.lambda_sigma = n.number("lambdaSigma", g.lambda_sigma);
  g.k_n = n.number("kN", g.k_n);
  g.k_damp = n.number("kDamp", g.k_damp);
  g.lambda_dls = n.number("lambdaDls", g.lambda_dls);
  sc.scaling.k_d = n.number("kD", sc.scaling.k_d);
  sc.scaling.k_p = n.number("kP", sc.scaling.k_p);
  if (n.has("impedance")) {
    const Node imp = n.at("impedance");
    imp.expect_object({"M", "D", "K", "kR", "deltaF", "epsRecPos", "epsRecVel"});
    ImpedanceParams& p = sc.impedance;
    if (imp.has("M")) p.M = parse_matrix(imp.at("M"));
    if (imp.has("D")) p.D = parse_matrix(imp.at("D"));
    if (imp.has("K")) p.K = parse_matrix(imp.at("K"));
    p.k_r = imp.number("kR", p.k_r);
    p.delta_f = imp.number("deltaF", p.delta_f);
    p.eps_rec_pos = imp.number("epsRecPos", p.eps_rec_pos);
    p.eps_rec_vel = imp.number("epsRecVel", p.eps_rec_vel);
  }
}

void parse_safety(const Node& n, Scenario& sc) {
  n.expect_object({"k1", "k2", "quadratureNodes", "epsD", "fMin", "dMin", "deriveFMin", "epsFRel",
                   "epsMu"});
  SafetyFunctionParams& p = sc.safety_params;
  p.k1 = n.number("k1", p.k1);
  p.k2 = n.number("k2", p.k2);
  if (n.has("quadratureNodes")) {
    const Node q = n.at("quadratureNodes");
    if (!q.value().is_number_integer()) q.fail("expected an integer");
    p.quadrature_nodes = q.value().get<int>();
  }
  p.eps_d = n.number("epsD", p.eps_d);
  sc.safety.eps_f_rel = n.number("epsFRel", sc.safety.eps_f_rel);
  sc.safety.eps_mu = n.number("epsMu", sc.safety.eps_mu);

  const bool derive = n.has("deriveFMin") && n.at("deriveFMin").value().is_boolean() &&
                      n.at("deriveFMin").value().get<bool>();
  if (n.has("deriveFMin") && !n.at("deriveFMin").value().is_boolean()) {
    n.at("deriveFMin").fail("expected a boolean");
  }
  if (n.has("fMin") && (n.has("dMin") || derive)) {
    n.fail("give either fMin or dMin with deriveFMin, not both");
  }
  if (n.has("fMin")) {
    sc.safety.f_min = n.at("fMin").number();
    sc.derive_f_min = false;
  } else if (n.has("dMin")) {
    if (!derive) n.at("dMin").fail("dMin needs deriveFMin: true");
    sc.safety.d_min = n.at("dMin").number();
    sc.derive_f_min = true;
  } else {
    n.fail("one of fMin or dMin with deriveFMin is required");
  }
}

void parse_task(const Node& n, Scenario& sc) {
  n.expect_object({"p", "nominalPath", "interpolation", "timing"});
  const Node pn = n.at("p");
  if (!pn.value().is_number_integer()) pn.fail("expected 3 or 6");
  const int p = pn.value().get<int>();
  if (p == 3) {
    sc.task.space = TaskSpace::kPlanar;
  } else if (p == 6) {
    sc.task.space = TaskSpace::kSpatial;
  } else {
    pn.fail("expected 3 or 6");
  }
  const Node path = n.at("nominalPath");
  for (std::size_t k = 0; k < path.size(); ++k) sc.task.nominal_path.push_back(path.item(k).vector());
  if (n.has("interpolation")) {
    const std::string kind = n.at("interpolation").string();
    if (kind == "linear") {
      sc.task.interpolation = Interpolation::kLinear;
    } else if (kind == "cubic") {
      sc.task.interpolation = Interpolation::kCubic;
    } else {
      n.at("interpolation").fail("expected \"linear\" or \"cubic\"");
    }
  }
  const Node tn = n.at("timing");
  tn.expect_object({"profile", "t0", "tf", "vMax", "aMax"});
  TimingSpec& t = sc.task.timing;
  const std::string profile = tn.has("profile") ? tn.at("profile").string() : "cubic";
  if (profile == "cubic") {
    t.profile = TimingProfile::kCubic;
  } else if (profile == "trapezoidal") {
    t.profile = TimingProfile::kTrapezoidal;
    t.v_max = tn.at("vMax").number();
    t.a_max = tn.at("aMax").number();
  } else {
    tn.at("profile").fail("expected \"cubic\" or \"trapezoidal\"");
  }
  t.t0 = tn.number("t0", 0.0);
  t.tf = tn.at("tf").number();
}

void parse_operator(const Node& n, Scenario& sc) {
  n.expect_object({"mode", "spawn", "waypoints"});
  OperatorConfig& op = sc.op;
  const std::string mode = n.has("mode") ? n.at("mode").string() : "scripted";
  if (mode == "scripted") {
    op.mode = OperatorMode::kScripted;
  } else if (mode == "external") {
    op.mode = OperatorMode::kExternal;
  } else {
    n.at("mode").fail("expected \"scripted\" or \"external\"");
  }
  if (n.has("spawn")) op.spawn = n.at("spawn").vec3();
  if (n.has("waypoints")) {
    const Node w = n.at("waypoints");
    for (std::size_t k = 0; k < w.size(); ++k) {
      const Node item = w.item(k);
      item.expect_object({"t", "p"});
      op.waypoints.push_back({item.at("t").number(), item.at("p").vec3()});
    }
  }
}

void parse_sim(const Node& n, Scenario& sc) {
  n.expect_object({"dt", "duration", "seed", "realtimeFactor"});
  SimConfig& s = sc.sim;
  s.dt = n.number("dt", s.dt);
  s.duration = n.number("duration", s.duration);
  if (n.has("seed")) {
    const Node seed = n.at("seed");
    if (!seed.value().is_number_unsigned()) seed.fail("expected a non-negative integer");
    s.seed = seed.value().get<std::uint64_t>();
  }
  s.realtime_factor = n.number("realtimeFactor", s.realtime_factor);
}

void resolve_square(Eigen::MatrixXd& a, std::size_t m) {
  if (a.rows() == 1 && a.cols() == 1 && m != 1) {
    a = a(0, 0) * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  }
}

bool same(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

bool same(const std::vector<Eigen::VectorXd>& a, const std::vector<Eigen::VectorXd>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!same(Eigen::MatrixXd(a[i]), Eigen::MatrixXd(b[i]))) return false;
  }
  return true;
}

ordered_json vec_json(const Eigen::VectorXd& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v(k));
  return a;
}

ordered_json pose_json(const Pose& p) {
  return ordered_json{{"xyz", vec_json(p.xyz)}, {"rpy", vec_json(p.rpy)}};
}

ordered_json matrix_json(const Eigen::MatrixXd& a) {
  if (a.isDiagonal(0.0)) {
    const Eigen::VectorXd d = a.diagonal();
    if ((d.array() == d(0)).all()) return d(0);
    return vec_json(d);
  }
  ordered_json rows = ordered_json::array();
  for (Eigen::Index r = 0; r < a.rows(); ++r) rows.push_back(vec_json(a.row(r).transpose()));
  return rows;
}

}  // namespace

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw ValidationError("sim.dt", "must be positive");
  if (!(duration >= 0.0) || !std::isfinite(duration)) {
    throw ValidationError("sim.duration", "must be finite and non-negative");
  }
  if (!(realtime_factor >= 0.0)) throw ValidationError("sim.realtimeFactor", "must be >= 0");
}

TimingLaw TimingSpec::build() const {
  if (profile == TimingProfile::kTrapezoidal) return TimingLaw::trapezoidal(t0, tf, 1.0, v_max, a_max);
  return TimingLaw::cubic(t0, tf, 1.0);
}

void validate_scenario(Scenario& sc) {
  if (sc.version != 1) throw ValidationError("version", "only version 1 is supported");
  if (sc.robots.empty()) throw ValidationError("robots", "at least one robot is required");
  if (sc.q0.size() != sc.robots.size()) throw ValidationError("robots", "one q0 per robot is required");
  const TaskLayout layout = sc.layout();
  const std::size_t p = layout.p();
  for (std::size_t i = 0; i < sc.robots.size(); ++i) {
    const std::string where = index("robots", i);
    const RobotModel& m = sc.robots[i];
    try {
      m.validate(sc.task.space);
    } catch (const ContractViolation& e) {
      throw ValidationError(where, e.what());
    }
    if (m.dof() < p) {
      throw ValidationError(where, "has " + std::to_string(m.dof()) +
                                       " DOFs, fewer than the task dimension " + std::to_string(p));
    }
    if (static_cast<std::size_t>(sc.q0[i].size()) != m.dof()) {
      throw ValidationError(join(where, "q0"), "expected " + std::to_string(m.dof()) + " values");
    }
  }

  const std::size_t m = layout.m();
  if (sc.task.nominal_path.size() < 2) {
    throw ValidationError("task.nominalPath", "at least two waypoints are required");
  }
  for (std::size_t k = 0; k < sc.task.nominal_path.size(); ++k) {
    if (static_cast<std::size_t>(sc.task.nominal_path[k].size()) != m) {
      throw ValidationError(index("task.nominalPath", k),
                            "has " + std::to_string(sc.task.nominal_path[k].size()) +
                                " entries, expected N * p = " + std::to_string(m));
    }
  }
  try {
    NominalPath check(sc.task.nominal_path, sc.task.interpolation);
  } catch (const ContractViolation& e) {
    throw ValidationError("task.nominalPath", e.what());
  }
  try {
    sc.task.timing.build();
  } catch (const ConfigurationError& e) {
    throw ValidationError("task.timing", e.what());
  }

  const GainsConfig& g = sc.gains;
  if (!(g.k_sigma > 0.0)) throw ValidationError("gains.kSigma", "must be positive");
  if (!(g.lambda_sigma > 0.0)) throw ValidationError("gains.lambdaSigma", "must be positive");
  if (!(g.k_n >= 0.0)) throw ValidationError("gains.kN", "must be non-negative");
  if (!(g.k_damp >= 0.0)) throw ValidationError("gains.kDamp", "must be non-negative");
  if (!(g.lambda_dls >= 0.0)) throw ValidationError("gains.lambdaDls", "must be non-negative");
  if (!(sc.scaling.k_d > 0.0)) throw ValidationError("gains.kD", "must be positive");
  if (!(sc.scaling.k_p > 0.0)) throw ValidationError("gains.kP", "must be positive");
  resolve_square(sc.impedance.M, m);
  resolve_square(sc.impedance.D, m);
  resolve_square(sc.impedance.K, m);
  try {
    sc.impedance.resolve(m);
  } catch (const ContractViolation& e) {
    throw ValidationError("gains.impedance", e.what());
  }

  try {
    sc.safety_params.validate();
  } catch (const ContractViolation& e) {
    throw ValidationError("safety", e.what());
  }
  if (!(sc.safety.eps_f_rel >= 0.0)) throw ValidationError("safety.epsFRel", "must be >= 0");
  if (!(sc.safety.eps_mu >= 0.0)) throw ValidationError("safety.epsMu", "must be >= 0");
  if (sc.derive_f_min) {
    if (!sc.safety.d_min || !(*sc.safety.d_min > 0.0)) {
      throw ValidationError("safety.dMin", "must be positive");
    }
    sc.safety.f_min = compute_f_min(sc.robots, sc.safety_params, *sc.safety.d_min);
  } else {
    sc.safety.d_min.reset();
  }
  if (!(sc.safety.f_min > 0.0)) throw ValidationError("safety.fMin", "must be positive");

  for (std::size_t k = 1; k < sc.op.waypoints.size(); ++k) {
    if (!(sc.op.waypoints[k].t > sc.op.waypoints[k - 1].t)) {
      throw ValidationError(index("operator.waypoints", k), "times must be strictly increasing");
    }
  }
  if (!sc.op.spawn.allFinite()) throw ValidationError("operator.spawn", "must be finite");
  if (!(sc.supervisor.t_dwell >= 0.0)) throw ValidationError("supervisor.tDwell", "must be >= 0");
  if (!(sc.supervisor.home_tol > 0.0)) throw ValidationError("supervisor.homeTol", "must be positive");
  sc.sim.validate();
}

Scenario parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("$", std::string("malformed JSON: ") + e.what());
  }
  const Node root(doc, "");
  root.expect_object({"version", "name", "robots", "task", "operator", "gains", "safety",
                      "supervisor", "sim"});
  Scenario sc;
  if (root.has("version")) {
    const Node v = root.at("version");
    if (!v.value().is_number_integer()) v.fail("expected an integer");
    sc.version = v.value().get<int>();
  }
  if (root.has("name")) sc.name = root.at("name").string();
  const Node robots = root.at("robots");
  for (std::size_t i = 0; i < robots.size(); ++i) parse_robot(robots.item(i), sc);
  parse_task(root.at("task"), sc);
  if (root.has("operator")) parse_operator(root.at("operator"), sc);
  if (root.has("gains")) parse_gains(root.at("gains"), sc);
  parse_safety(root.at("safety"), sc);
  if (root.has("supervisor")) {
    const Node s = root.at("supervisor");
    s.expect_object({"tDwell", "homeTol"});
    sc.supervisor.t_dwell = s.number("tDwell", sc.supervisor.t_dwell);
    sc.supervisor.home_tol = s.number("homeTol", sc.supervisor.home_tol);
  }
  if (root.has("sim")) parse_sim(root.at("sim"), sc);
  validate_scenario(sc);
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("$", "cannot open scenario file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str());
}

std::string serialize_scenario(const Scenario& sc, int indent) {
  ordered_json doc;
  doc["version"] = sc.version;
  if (!sc.name.empty()) doc["name"] = sc.name;
  ordered_json robots = ordered_json::array();
  for (std::size_t i = 0; i < sc.robots.size(); ++i) {
    const RobotModel& m = sc.robots[i];
    ordered_json r;
    r["name"] = m.name;
    r["base"] = {{"kind", m.base_kind == BaseKind::kFixed ? "fixed" : "planarHolonomic"},
                 {"pose", pose_json(m.base_pose)}};
    ordered_json joints = ordered_json::array();
    for (const JointSpec& j : m.joints) {
      ordered_json jj;
      jj["type"] = j.type == JointType::kRevolute ? "revolute" : "prismatic";
      jj["axis"] = vec_json(j.axis);
      jj["offset"] = pose_json(j.offset);
      if (std::isfinite(j.min) && std::isfinite(j.max)) jj["limits"] = {j.min, j.max};
      jj["segment"] = {{"start", vec_json(j.segment.start)}, {"end", vec_json(j.segment.end)}};
      joints.push_back(jj);
    }
    r["joints"] = joints;
    r["tool"] = pose_json(m.tool_offset);
    r["q0"] = vec_json(sc.q0[i]);
    robots.push_back(r);
  }
  doc["robots"] = robots;

  ordered_json path = ordered_json::array();
  for (const Eigen::VectorXd& w : sc.task.nominal_path) path.push_back(vec_json(w));
  ordered_json timing;
  const TimingSpec& t = sc.task.timing;
  timing["profile"] = t.profile == TimingProfile::kCubic ? "cubic" : "trapezoidal";
  timing["t0"] = t.t0;
  timing["tf"] = t.tf;
  if (t.profile == TimingProfile::kTrapezoidal) {
    timing["vMax"] = t.v_max;
    timing["aMax"] = t.a_max;
  }
  doc["task"] = {{"p", task_dimension(sc.task.space)},
                 {"nominalPath", path},
                 {"interpolation", sc.task.interpolation == Interpolation::kLinear ? "linear" : "cubic"},
                 {"timing", timing}};

  ordered_json waypoints = ordered_json::array();
  for (const OperatorWaypoint& w : sc.op.waypoints) waypoints.push_back({{"t", w.t}, {"p", vec_json(w.p)}});
  doc["operator"] = {{"mode", sc.op.mode == OperatorMode::kScripted ? "scripted" : "external"},
                     {"spawn", vec_json(sc.op.spawn)},
                     {"waypoints", waypoints}};

  const GainsConfig& g = sc.gains;
  const ImpedanceParams& imp = sc.impedance;
  ordered_json impedance;
  if (imp.M.size()) impedance["M"] = matrix_json(imp.M);
  if (imp.D.size()) impedance["D"] = matrix_json(imp.D);
  if (imp.K.size()) impedance["K"] = matrix_json(imp.K);
  impedance["kR"] = imp.k_r;
  impedance["deltaF"] = imp.delta_f;
  impedance["epsRecPos"] = imp.eps_rec_pos;
  impedance["epsRecVel"] = imp.eps_rec_vel;
  doc["gains"] = {{"kSigma", g.k_sigma},     {"lambdaSigma", g.lambda_sigma}, {"kN", g.k_n},
                  {"kDamp", g.k_damp},       {"lambdaDls", g.lambda_dls},     {"kD", sc.scaling.k_d},
                  {"kP", sc.scaling.k_p},    {"impedance", impedance}};

  ordered_json safety;
  safety["k1"] = sc.safety_params.k1;
  safety["k2"] = sc.safety_params.k2;
  safety["quadratureNodes"] = sc.safety_params.quadrature_nodes;
  safety["epsD"] = sc.safety_params.eps_d;
  if (sc.derive_f_min && sc.safety.d_min) {
    safety["dMin"] = *sc.safety.d_min;
    safety["deriveFMin"] = true;
  } else {
    safety["fMin"] = sc.safety.f_min;
  }
  safety["epsFRel"] = sc.safety.eps_f_rel;
  safety["epsMu"] = sc.safety.eps_mu;
  doc["safety"] = safety;
  doc["supervisor"] = {{"tDwell", sc.supervisor.t_dwell}, {"homeTol", sc.supervisor.home_tol}};
  doc["sim"] = {{"dt", sc.sim.dt},
                {"duration", sc.sim.duration},
                {"seed", sc.sim.seed},
                {"realtimeFactor", sc.sim.realtime_factor}};
  return doc.dump(indent);
}

bool operator==(const Scenario& a, const Scenario& b) {
  if (a.op.waypoints.size() != b.op.waypoints.size()) return false;
  for (std::size_t k = 0; k < a.op.waypoints.size(); ++k) {
    if (!(a.op.waypoints[k] == b.op.waypoints[k])) return false;
  }
  return a.version == b.version && a.name == b.name && a.robots == b.robots && same(a.q0, b.q0) &&
         a.task.space == b.task.space && same(a.task.nominal_path, b.task.nominal_path) &&
         a.task.interpolation == b.task.interpolation &&
         a.task.timing.profile == b.task.timing.profile && a.task.timing.t0 == b.task.timing.t0 &&
         a.task.timing.tf == b.task.timing.tf && a.task.timing.v_max == b.task.timing.v_max &&
         a.task.timing.a_max == b.task.timing.a_max && a.op.mode == b.op.mode &&
         a.op.spawn == b.op.spawn && a.gains == b.gains && a.scaling == b.scaling &&
         same(a.impedance.M, b.impedance.M) && same(a.impedance.D, b.impedance.D) &&
         same(a.impedance.K, b.impedance.K) && a.impedance.k_r == b.impedance.k_r &&
         a.impedance.delta_f == b.impedance.delta_f &&
         a.impedance.eps_rec_pos == b.impedance.eps_rec_pos &&
         a.impedance.eps_rec_vel == b.impedance.eps_rec_vel && a.supervisor == b.supervisor &&
         a.safety_params == b.safety_params && a.safety == b.safety &&
         a.derive_f_min == b.derive_f_min && a.sim == b.sim;
}

}  // namespace coopsafe
