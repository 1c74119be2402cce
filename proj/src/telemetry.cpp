#include "coopsafe/telemetry.hpp"

#include <cmath>

#include <json.hpp>

namespace coopsafe {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json vec_json(const Eigen::VectorXd& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v(k));
  return a;
}

Eigen::VectorXd json_vec(const json& a) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t k = 0; k < a.size(); ++k) v(static_cast<Eigen::Index>(k)) = a.at(k).get<double>();
  return v;
}

// The wire never carries null: non-finite values are sent as large finite
// sentinels of the same sign.
double wire(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return 0.0;
  return v > 0 ? 1e300 : -1e300;
}

}  // namespace

TelemetryMessage make_telemetry(const TraceRecord& rec, const Simulator& sim) {
  TelemetryMessage msg;
  msg.t = rec.t;
  msg.phase = rec.phase;
  msg.F = rec.F;
  msg.F_min = rec.F_min;
  msg.d_actual = rec.d_actual;
  msg.s_n = rec.s_n;
  msg.s_r = rec.s_r;
  msg.delta_s = rec.delta_s;
  msg.f_r_norm = rec.f_r_norm;
  const Scenario& sc = sim.scenario();
  for (std::size_t i = 0; i < sc.robots.size(); ++i) {
    const RobotModel& model = sc.robots[i];
    RobotTelemetry r;
    r.name = model.name;
    r.q = rec.q[i];
    const ForwardKinematics fk = forward_kinematics(model, r.q, sc.task.space);
    r.ee = fk.x;
    for (std::size_t l = 0; l < model.segment_count(); ++l) {
      const Segment seg = segment_in_world(model, fk, l);
      r.links.emplace_back(seg.start, seg.end);
    }
    msg.robots.push_back(std::move(r));
  }
  msg.op_p = sim.world().op.p;
  msg.op_p_dot = sim.world().op.p_dot;
  return msg;
}

std::string to_json(const TelemetryMessage& m) {
  ordered_json robots = ordered_json::array();
  for (const RobotTelemetry& r : m.robots) {
    ordered_json links = ordered_json::array();
    for (const auto& [a, b] : r.links) links.push_back({vec_json(a), vec_json(b)});
    robots.push_back({{"name", r.name}, {"q", vec_json(r.q)}, {"ee", vec_json(r.ee)}, {"links", links}});
  }
  ordered_json j;
  j["type"] = "tick";
  j["t"] = m.t;
  j["phase"] = std::string(phase_name(m.phase));
  j["F"] = wire(m.F);
  j["F_min"] = wire(m.F_min);
  j["d_actual"] = wire(m.d_actual);
  j["s_n"] = m.s_n;
  j["s_r"] = m.s_r;
  j["deltaS"] = m.delta_s;
  j["fRNorm"] = m.f_r_norm;
  j["robots"] = robots;
  j["operator"] = {{"p", vec_json(m.op_p)}, {"pDot", vec_json(m.op_p_dot)}};
  return j.dump();
}

TelemetryMessage telemetry_from_json(const std::string& text) {
  const json j = json::parse(text);
  TelemetryMessage m;
  m.t = j.at("t").get<double>();
  m.phase = parse_phase(j.at("phase").get<std::string>()).value_or(Phase::kNominalTracking);
  m.F = j.at("F").get<double>();
  m.F_min = j.at("F_min").get<double>();
  m.d_actual = j.at("d_actual").get<double>();
  m.s_n = j.at("s_n").get<double>();
  m.s_r = j.at("s_r").get<double>();
  m.delta_s = j.at("deltaS").get<double>();
  m.f_r_norm = j.at("fRNorm").get<double>();
  for (const json& r : j.at("robots")) {
    RobotTelemetry rt;
    rt.name = r.at("name").get<std::string>();
    rt.q = json_vec(r.at("q"));
    rt.ee = json_vec(r.at("ee"));
    for (const json& l : r.at("links")) rt.links.emplace_back(json_vec(l.at(0)), json_vec(l.at(1)));
    m.robots.push_back(std::move(rt));
  }
  m.op_p = json_vec(j.at("operator").at("p"));
  m.op_p_dot = json_vec(j.at("operator").at("pDot"));
  return m;
}

CommandParse parse_command(const std::string& text) {
  CommandParse out;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error&) {
    out.error = "message is not valid JSON";
    return out;
  }
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    out.error = "message needs a string field \"type\"";
    return out;
  }
  const std::string type = j.at("type").get<std::string>();
  ClientCommand cmd;
  if (type == "operator") {
    const json* p = j.contains("p") ? &j.at("p") : nullptr;
    if (!p || !p->is_array() || p->size() != 3) {
      out.error = "operator command needs p: [x, y, z]";
      return out;
    }
    for (std::size_t k = 0; k < 3; ++k) {
      if (!p->at(k).is_number() || !std::isfinite(p->at(k).get<double>())) {
        out.error = "operator position must be three finite numbers";
        return out;
      }
      cmd.p(static_cast<Eigen::Index>(k)) = p->at(k).get<double>();
    }
    cmd.kind = ClientCommand::Kind::kOperator;
    out.command = cmd;
    return out;
  }
  if (type == "control") {
    cmd.kind = ClientCommand::Kind::kControl;
    const std::string action =
        j.contains("action") && j.at("action").is_string() ? j.at("action").get<std::string>() : "";
    if (action == "start") {
      cmd.action = ControlAction::kStart;
    } else if (action == "pause") {
      cmd.action = ControlAction::kPause;
    } else if (action == "reset") {
      cmd.action = ControlAction::kReset;
    } else if (action == "set_speed") {
      cmd.action = ControlAction::kSetSpeed;
      if (!j.contains("value") || !j.at("value").is_number() || !(j.at("value").get<double>() > 0.0) ||
          !std::isfinite(j.at("value").get<double>())) {
        out.error = "set_speed needs a positive numeric value";
        return out;
      }
      cmd.value = j.at("value").get<double>();
    } else {
      out.error = "unknown control action \"" + action + "\"";
      return out;
    }
    out.command = cmd;
    return out;
  }
  out.error = "unknown message type \"" + type + "\"";
  return out;
}

std::string to_json(const ClientCommand& cmd) {
  ordered_json j;
  if (cmd.kind == ClientCommand::Kind::kOperator) {
    j["type"] = "operator";
    j["p"] = vec_json(cmd.p);
    return j.dump();
  }
  j["type"] = "control";
  switch (cmd.action) {
    case ControlAction::kStart:
      j["action"] = "start";
      break;
    case ControlAction::kPause:
      j["action"] = "pause";
      break;
    case ControlAction::kReset:
      j["action"] = "reset";
      break;
    case ControlAction::kSetSpeed:
      j["action"] = "set_speed";
      j["value"] = cmd.value;
      break;
  }
  return j.dump();
}

std::string error_json(const std::string& detail) {
  return ordered_json{{"type", "error"}, {"detail", detail}}.dump();
}

}  // namespace coopsafe
