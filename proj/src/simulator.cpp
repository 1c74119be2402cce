#include "coopsafe/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "coopsafe/errors.hpp"

namespace coopsafe {

Simulator::Simulator(Scenario scenario) : scenario_(std::move(scenario)) {
  validate_scenario(scenario_);
  layout_ = scenario_.layout();
  geometry_ = build_task_geometry(layout_.robots, layout_.p());
  path_ = NominalPath(scenario_.task.nominal_path, scenario_.task.interpolation);
  law_ = scenario_.task.timing.build();
  reset();
}

void Simulator::reset() {
  const OperatorConfig& op = scenario_.op;
  if (op.mode == OperatorMode::kScripted) {
    script_ = op.waypoints.empty() ? ScriptedOperator({{0.0, op.spawn}}) : ScriptedOperator(op.waypoints);
    external_.reset();
  } else {
    external_.emplace(op.spawn);
  }
  mailbox_.drain();
  supervisor_ = Supervisor(scenario_.supervisor);
  world_ = WorldState{};
  for (const Eigen::VectorXd& q : scenario_.q0) {
    world_.joints.push_back({q, Eigen::VectorXd::Zero(q.size())});
  }
  world_.f_r = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(layout_.m()));
  switches_.clear();
  ticks_ = 0;
  evaluated_ = false;
}

void Simulator::update_operator() {
  const std::vector<Eigen::Vector3d> samples = mailbox_.drain();
  if (!samples.empty() && !external_) external_.emplace(script_.eval(world_.t).p);
  if (external_) {
    std::optional<Eigen::Vector3d> latest;
    if (!samples.empty()) latest = samples.back();
    world_.op = external_->update(latest, scenario_.sim.dt);
  } else {
    world_.op = script_.eval(world_.t);
  }
}

ReferenceSample Simulator::path_reference(double s_r, double s_r_dot, double s_r_ddot) const {
  const PathSample ps = path_.eval(s_r);
  ReferenceSample ref;
  ref.sigma = ps.sigma;
  ref.dsigma_ds = ps.d1;
  ref.d2sigma_ds2 = ps.d2;
  ref.sigma_dot = ps.d1 * s_r_dot;
  ref.accel_offset = ps.d2 * (s_r_dot * s_r_dot);
  ref.sigma_ddot = ps.d1 * s_r_ddot + ref.accel_offset;
  ref.s_r = s_r;
  ref.s_r_dot = s_r_dot;
  ref.clamped = ps.clamped;
  return ref;
}

ReferenceSample Simulator::deformation_reference() const {
  const DeformedReference dr = deformed_reference(*world_.deformation);
  ReferenceSample ref;
  ref.sigma = dr.sigma;
  ref.sigma_dot = dr.sigma_dot;
  ref.sigma_ddot = dr.sigma_ddot;
  ref.dsigma_ds = Eigen::VectorXd::Zero(dr.sigma.size());
  ref.d2sigma_ds2 = Eigen::VectorXd::Zero(dr.sigma.size());
  ref.accel_offset = dr.sigma_ddot;
  ref.s_r = world_.timing.s + world_.scaling.delta_s;
  ref.s_r_dot = 0.0;
  return ref;
}

TraceRecord Simulator::evaluate() {
  if (evaluated_) return last_record_;
  const Scenario& sc = scenario_;
  const std::vector<RobotModel>& models = sc.robots;
  const std::size_t n_robots = models.size();
  const double t = world_.t;

  update_operator();
  world_.timing = law_.eval(world_.clock);
  const TimingSample& timing = world_.timing;

  std::vector<RobotTerms> terms;
  terms.reserve(n_robots);
  const auto p = static_cast<Eigen::Index>(layout_.p());
  Eigen::VectorXd x(static_cast<Eigen::Index>(layout_.m()));
  Eigen::VectorXd x_dot(x.size());
  for (std::size_t i = 0; i < n_robots; ++i) {
    terms.push_back(robot_terms(models[i], world_.joints[i], sc.task.space, sc.gains.lambda_dls));
    x.segment(static_cast<Eigen::Index>(i) * p, p) = terms.back().x;
    x_dot.segment(static_cast<Eigen::Index>(i) * p, p) = terms.back().x_dot;
  }

  SafetyReport report = team_safety(models, world_.joints, world_.op, sc.safety_params);
  const OperatorGradient grad =
      safety_gradient_operator(models, world_.joints, world_.op, sc.safety_params);
  report.grad_F_po = grad.gradient;
  report.grad_degenerate = grad.degenerate;

  std::vector<Eigen::VectorXd> qdd_null(n_robots);
  for (std::size_t i = 0; i < n_robots; ++i) {
    const JointState& js = world_.joints[i];
    const Eigen::VectorXd g = sc.gains.k_n != 0.0
                                  ? safety_gradient_joints(models[i], js, world_.op, sc.safety_params)
                                  : Eigen::VectorXd::Zero(js.q.size()).eval();
    qdd_null[i] = nullspace_acceleration(terms[i], js.q_dot, g, sc.gains);
  }

  std::vector<AffineCommand> commands(n_robots);
  auto build_commands = [&](const ReferenceSample& ref) {
    TaskState ts = make_task_state(layout_, geometry_, x, x_dot, ref);
    for (std::size_t i = 0; i < n_robots; ++i) {
      commands[i] = clik_affine(geometry_, i, terms[i], ts, sc.gains, ref, qdd_null[i]);
    }
    return ts;
  };
  auto store_mu = [&](double s_ddot_n) {
    const DerivativeCoefficients dc = derivative_coefficients(models, world_.joints, world_.op,
                                                              commands, s_ddot_n, sc.safety_params);
    report.mu1 = dc.mu1;
    report.mu2 = dc.mu2;
    report.mu1_i = dc.mu1_i;
    report.mu2_i = dc.mu2_i;
  };

  const Phase before = supervisor_.phase();
  SupervisorInputs in;
  in.F = report.F;
  in.f_min = sc.safety.f_min;
  in.eps_f = sc.safety.eps_f();

  ReferenceSample ref;
  TaskState task;
  Eigen::VectorXd f_r = Eigen::VectorXd::Zero(x.size());
  double s_ddot_r = 0.0;
  Phase after = before;
  std::optional<SwitchEvent> event;

  if (before == Phase::kPathDeformation) {
    f_r = repulsive_force(layout_, report, sc.safety.f_min, sc.impedance);
    in.recovered = recovery_check(*world_.deformation, f_r, sc.impedance);
    after = supervisor_.transition(in, t);
    if (after == Phase::kScaledTracking) {
      const ReferenceSample old = deformation_reference();
      event = SwitchEvent{t, before, after, supervisor_.last_reason(), old.sigma, old.sigma_dot, {}, {}};
      // Resume on the path at rest, where the deformation started.
      world_.deformation.reset();
      ScalingState& st = world_.scaling;
      st.delta_s_dot = -timing.s_dot;
      st.delta_s_ddot = 0.0;
      st.velocity_floor_active = true;
      st.endpoint_active = timing.s + st.delta_s >= law_.s_end() - kEndpointTol;
    } else {
      impedance_acceleration(*world_.deformation, f_r, sc.impedance);
      ref = deformation_reference();
      task = build_commands(ref);
      store_mu(0.0);
      world_.feasible = false;
    }
  }

  if (after != Phase::kPathDeformation) {
    ScalingState& st = world_.scaling;
    ref = path_reference(timing.s + st.delta_s, timing.s_dot + st.delta_s_dot, timing.s_ddot);
    task = build_commands(ref);
    store_mu(timing.s_ddot);
    const ScalingBounds bounds = scaling_bounds(report.mu1, report.mu2, report.F, sc.safety);
    ScalingState candidate = st;
    scaling_acceleration(candidate, bounds, sc.scaling, timing);
    const Feasibility feas =
        check_constraints(candidate, bounds, timing.s_ddot, report.F, sc.safety);
    world_.feasible = feas.feasible;
    if (before != Phase::kPathDeformation) {
      in.bounds_active = bounds.active() || bounds.mu_degenerate;
      in.clamp_engaged = candidate.clamp_engaged;
      in.feasible = feas.feasible;
      in.delta_s = candidate.delta_s;
      in.delta_s_dot = candidate.delta_s_dot;
      after = supervisor_.transition(in, t);
    }
    if (after == Phase::kPathDeformation) {
      event = SwitchEvent{t, before, after, supervisor_.last_reason(), ref.sigma, ref.sigma_dot, {}, {}};
      world_.deformation = begin_deformation(t, ref.sigma, ref.sigma_dot);
      f_r = repulsive_force(layout_, report, sc.safety.f_min, sc.impedance);
      impedance_acceleration(*world_.deformation, f_r, sc.impedance);
      ref = deformation_reference();
      task = build_commands(ref);
      store_mu(0.0);
      st.delta_s_ddot = 0.0;
    } else {
      st = candidate;
      s_ddot_r = timing.s_ddot + st.delta_s_ddot;
      ref.sigma_ddot = ref.dsigma_ds * s_ddot_r + ref.accel_offset;
      task.sigma_r_ddot = ref.sigma_ddot;
    }
  } else if (before == Phase::kPathDeformation) {
    world_.scaling.delta_s_ddot = 0.0;
  }

  if (!event && after != before) {
    event = SwitchEvent{t, before, after, supervisor_.last_reason(), ref.sigma, ref.sigma_dot, {}, {}};
  }
  if (event) {
    event->sigma_r_after = ref.sigma;
    event->sigma_r_dot_after = ref.sigma_dot;
    switches_.push_back(*event);
  }

  world_.commands.resize(n_robots);
  for (std::size_t i = 0; i < n_robots; ++i) world_.commands[i] = commands[i].at(s_ddot_r);
  world_.phase = after;
  world_.reference = ref;
  world_.task = task;
  world_.f_r = f_r;
  world_.safety = report;
  evaluated_ = true;

  TraceRecord rec;
  rec.t = t;
  rec.phase = after;
  rec.F = report.F;
  rec.F_min = sc.safety.f_min;
  rec.d_actual = report.d_actual;
  rec.s_n = timing.s;
  rec.s_r = timing.s + world_.scaling.delta_s;
  rec.delta_s = world_.scaling.delta_s;
  rec.delta_s_dot = world_.scaling.delta_s_dot;
  rec.delta_s_ddot = world_.scaling.delta_s_ddot;
  rec.mu1 = report.mu1;
  rec.mu2 = report.mu2;
  rec.f_r_norm = f_r.norm();
  rec.sigma = task.sigma;
  rec.sigma_r = ref.sigma;
  rec.sigma_n = path_.eval(timing.s).sigma;
  for (const JointState& js : world_.joints) {
    rec.q.push_back(js.q);
    rec.q_dot.push_back(js.q_dot);
  }
  last_record_ = rec;
  return rec;
}

void Simulator::integrate() {
  const double dt = scenario_.sim.dt;
  for (std::size_t i = 0; i < world_.joints.size(); ++i) {
    JointState& js = world_.joints[i];
    js.q_dot += world_.commands[i] * dt;
    js.q += js.q_dot * dt;
  }
  if (world_.phase == Phase::kPathDeformation) {
    integrate_deformation(*world_.deformation, dt);
  } else {
    const TimingSample next = law_.eval(world_.clock + dt);
    integrate_scaling(world_.scaling, world_.timing, next, law_.s_end(), dt);
    world_.clock += dt;
  }
  ++ticks_;
  world_.t = static_cast<double>(ticks_) * dt;
  evaluated_ = false;
}

TraceRecord Simulator::tick() {
  TraceRecord rec = evaluate();
  integrate();
  return rec;
}

RunSummary run(const Scenario& scenario, const TraceObserver& observer) {
  Simulator sim(scenario);
  const SimConfig& cfg = sim.scenario().sim;
  const auto steps = static_cast<std::size_t>(std::llround(cfg.duration / cfg.dt));
  RunSummary summary;
  summary.min_F = std::numeric_limits<double>::infinity();
  const double eps_f = sim.scenario().safety.eps_f();
  const double f_min = sim.scenario().safety.f_min;
  const auto start = std::chrono::steady_clock::now();

  auto account = [&](const TraceRecord& rec) {
    ++summary.records;
    summary.min_F = std::min(summary.min_F, rec.F);
    if (summary.phases_visited.empty() || summary.phases_visited.back() != rec.phase) {
      summary.phases_visited.push_back(rec.phase);
    }
    if (rec.F < f_min - eps_f) ++summary.constraint_violations;
    if (observer) observer(rec, sim);
  };

  for (std::size_t k = 0; k <= steps; ++k) {
    if (cfg.realtime_factor > 0.0) {
      const auto due = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                   std::chrono::duration<double>(sim.world().t / cfg.realtime_factor));
      std::this_thread::sleep_until(due);
    }
    try {
      // The observer sees the world as evaluated, before integration.
      account(sim.evaluate());
      if (k < steps) sim.tick();
    } catch (const std::exception& e) {
      throw std::runtime_error("simulation aborted at t = " + format_double(sim.world().t) +
                               " s: " + e.what());
    }
  }
  summary.switches = sim.switches();
  return summary;
}

}  // namespace coopsafe
