#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "coopsafe/errors.hpp"
#include "coopsafe/simulator.hpp"

namespace coopsafe {
namespace {

const char* const kScalarColumns[] = {"t",       "phase",       "F",            "F_min",
                                      "d_actual", "s_n",        "s_r",          "delta_s",
                                      "delta_s_dot", "delta_s_ddot", "mu1",     "mu2",
                                      "f_r_norm"};

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> trace_columns(const TaskLayout& layout,
                                       const std::vector<RobotModel>& robots) {
  std::vector<std::string> cols(std::begin(kScalarColumns), std::end(kScalarColumns));
  for (const char* prefix : {"sigma_", "sigma_r_", "sigma_n_"}) {
    for (std::size_t k = 0; k < layout.m(); ++k) cols.push_back(prefix + std::to_string(k));
  }
  for (std::size_t i = 0; i < robots.size(); ++i) {
    for (const char* prefix : {"q_", "q_dot_"}) {
      for (std::size_t k = 0; k < robots[i].dof(); ++k) {
        cols.push_back(prefix + std::to_string(i) + "_" + std::to_string(k));
      }
    }
  }
  return cols;
}

TraceWriter::TraceWriter(std::ostream& out, TraceFormat format, std::vector<std::string> columns)
    : out_(out), format_(format), columns_(std::move(columns)) {}

void TraceWriter::write(const TraceRecord& r) {
  std::vector<std::string> cells;
  cells.reserve(columns_.size());
  for (double v : {r.t}) cells.push_back(format_double(v));
  cells.emplace_back(phase_name(r.phase));
  for (double v : {r.F, r.F_min, r.d_actual, r.s_n, r.s_r, r.delta_s, r.delta_s_dot,
                   r.delta_s_ddot, r.mu1, r.mu2, r.f_r_norm}) {
    cells.push_back(format_double(v));
  }
  for (const Eigen::VectorXd* v : {&r.sigma, &r.sigma_r, &r.sigma_n}) {
    for (Eigen::Index k = 0; k < v->size(); ++k) cells.push_back(format_double((*v)(k)));
  }
  for (std::size_t i = 0; i < r.q.size(); ++i) {
    for (const Eigen::VectorXd* v : {&r.q[i], &r.q_dot[i]}) {
      for (Eigen::Index k = 0; k < v->size(); ++k) cells.push_back(format_double((*v)(k)));
    }
  }
  if (cells.size() != columns_.size()) {
    throw ContractViolation("trace record has " + std::to_string(cells.size()) +
                            " values for " + std::to_string(columns_.size()) + " columns");
  }

  if (format_ == TraceFormat::kCsv) {
    if (!header_done_) {
      for (std::size_t k = 0; k < columns_.size(); ++k) out_ << (k ? "," : "") << columns_[k];
      out_ << '\n';
      header_done_ = true;
    }
    for (std::size_t k = 0; k < cells.size(); ++k) out_ << (k ? "," : "") << cells[k];
    out_ << '\n';
    return;
  }
  // Numbers are written verbatim so JSON-lines and CSV carry identical digits.
  out_ << '{';
  for (std::size_t k = 0; k < cells.size(); ++k) {
    out_ << (k ? "," : "") << nlohmann::json(columns_[k]).dump() << ':';
    if (k == 1) {
      out_ << nlohmann::json(cells[k]).dump();
    } else {
      out_ << cells[k];
    }
  }
  out_ << "}\n";
}

TraceTable read_trace(std::istream& in) {
  TraceTable table;
  std::string line;
  bool first = true;
  bool jsonl = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      jsonl = line.front() == '{';
      if (!jsonl) {
        table.columns = split_csv(line);
        continue;
      }
    }
    if (!jsonl) {
      std::vector<std::string> cells = split_csv(line);
      if (cells.size() != table.columns.size()) {
        throw ContractViolation("trace row " + std::to_string(table.rows.size() + 1) + " has " +
                                std::to_string(cells.size()) + " cells, expected " +
                                std::to_string(table.columns.size()));
      }
      table.rows.push_back(std::move(cells));
      continue;
    }
    const nlohmann::ordered_json obj = nlohmann::ordered_json::parse(line);
    if (table.columns.empty()) {
      for (const auto& item : obj.items()) table.columns.push_back(item.key());
    }
    std::vector<std::string> cells;
    cells.reserve(table.columns.size());
    for (const std::string& col : table.columns) {
      const auto it = obj.find(col);
      if (it == obj.end()) throw ContractViolation("trace line lacks column " + col);
      cells.push_back(it->is_string() ? it->get<std::string>() : format_double(it->get<double>()));
    }
    table.rows.push_back(std::move(cells));
  }
  return table;
}

}  // namespace coopsafe
