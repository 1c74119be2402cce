#pragma once

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "coopsafe/scenario.hpp"

namespace coopsafe {

struct WorldState {
  double t = 0.0;
  double clock = 0.0;  // time fed to the timing law; frozen during deformation
  std::vector<JointState> joints;
  OperatorState op;
  TimingSample timing;
  ReferenceSample reference;
  TaskState task;
  Phase phase = Phase::kNominalTracking;
  ScalingState scaling;
  std::optional<DeformationState> deformation;
  Eigen::VectorXd f_r;
  SafetyReport safety;
  bool feasible = true;
  std::vector<Eigen::VectorXd> commands;  // y_i applied this tick
};

struct TraceRecord {
  double t = 0.0;
  Phase phase = Phase::kNominalTracking;
  double F = 0.0;
  double F_min = 0.0;
  double d_actual = 0.0;
  double s_n = 0.0;
  double s_r = 0.0;
  double delta_s = 0.0;
  double delta_s_dot = 0.0;
  double delta_s_ddot = 0.0;
  double mu1 = 0.0;
  double mu2 = 0.0;
  double f_r_norm = 0.0;
  Eigen::VectorXd sigma;
  Eigen::VectorXd sigma_r;
  Eigen::VectorXd sigma_n;  // nominal sigma_n(s_n(t))
  std::vector<Eigen::VectorXd> q;
  std::vector<Eigen::VectorXd> q_dot;
};

struct SwitchEvent {
  double t = 0.0;
  Phase from = Phase::kNominalTracking;
  Phase to = Phase::kNominalTracking;
  SwitchReason reason = SwitchReason::kNone;
  Eigen::VectorXd sigma_r_before;  // reference the old phase would have used
  Eigen::VectorXd sigma_r_dot_before;
  Eigen::VectorXd sigma_r_after;  // reference actually used this tick
  Eigen::VectorXd sigma_r_dot_after;
};

struct RunSummary {
  std::size_t records = 0;
  double min_F = 0.0;
  std::vector<Phase> phases_visited;  // consecutive distinct phases
  std::size_t constraint_violations = 0;  // ticks with F < F_min - eps_F
  std::vector<SwitchEvent> switches;
};

// Fixed-step simulation of one scenario. Each call to tick() evaluates the
// control pipeline at the current time and then integrates to t + dt.
class Simulator {
 public:
  explicit Simulator(Scenario scenario);

  // Evaluates the current time and returns its trace record without
  // advancing. Repeated calls at the same time return the same record.
  TraceRecord evaluate();
  // evaluate() followed by integration over dt.
  TraceRecord tick();

  void reset();

  // Thread-safe: positions queued here are applied at the next tick. The
  // first injection switches a scripted operator to the injected source.
  void inject_operator(const Eigen::Vector3d& p) { mailbox_.push(p); }

  const WorldState& world() const { return world_; }
  const Scenario& scenario() const { return scenario_; }
  const NominalPath& path() const { return path_; }
  const TimingLaw& timing_law() const { return law_; }
  const TaskGeometry& geometry() const { return geometry_; }
  const std::vector<SwitchEvent>& switches() const { return switches_; }
  std::size_t tick_count() const { return ticks_; }

 private:
  void update_operator();
  ReferenceSample path_reference(double s_r, double s_r_dot, double s_r_ddot) const;
  ReferenceSample deformation_reference() const;
  void integrate();

  Scenario scenario_;
  TaskLayout layout_;
  TaskGeometry geometry_;
  NominalPath path_;
  TimingLaw law_;
  ScriptedOperator script_;
  std::optional<ExternalOperatorEstimator> external_;
  OperatorMailbox mailbox_;
  Supervisor supervisor_;
  WorldState world_;
  std::vector<SwitchEvent> switches_;
  std::size_t ticks_ = 0;
  bool evaluated_ = false;
  TraceRecord last_record_;
};

using TraceObserver = std::function<void(const TraceRecord&, const Simulator&)>;

// Runs duration / dt steps and evaluates the final state, emitting
// duration / dt + 1 records.
RunSummary run(const Scenario& scenario, const TraceObserver& observer = {});

// Trace output.
enum class TraceFormat { kCsv, kJsonl };

std::vector<std::string> trace_columns(const TaskLayout& layout,
                                       const std::vector<RobotModel>& robots);

class TraceWriter {
 public:
  TraceWriter(std::ostream& out, TraceFormat format, std::vector<std::string> columns);
  void write(const TraceRecord& record);

 private:
  std::ostream& out_;
  TraceFormat format_;
  std::vector<std::string> columns_;
  bool header_done_ = false;
};

// Shortest text that parses back to the same double.
std::string format_double(double v);

struct TraceTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;  // raw cells, phase kept as text
};

TraceTable read_trace(std::istream& in);

}  // namespace coopsafe
