#include "nashnewton/trace.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace nashnewton {

const char* to_string(SolverStatus status) {
  switch (status) {
    case SolverStatus::Converged: return "Converged";
    case SolverStatus::MaxIterations: return "MaxIterations";
    case SolverStatus::InnerSolveFailed: return "InnerSolveFailed";
    case SolverStatus::Diverged: return "Diverged";
    case SolverStatus::SingularJacobian: return "SingularJacobian";
    case SolverStatus::OuterCycleDetected: return "OuterCycleDetected";
    case SolverStatus::BudgetExhausted: return "BudgetExhausted";
  }
  return "Unknown";
}

int BranchRecord::tie_count() const {
  int n = 0;
  for (bool t : tied) n += t ? 1 : 0;
  return n;
}

std::string BranchRecord::to_string() const {
  std::string s;
  s.reserve(side.size());
  for (std::size_t r = 0; r < side.size(); ++r) {
    char c = side[r] == Branch::Constraint ? 'g' : 'l';
    if (r < tied.size() && tied[r]) c = static_cast<char>(c - 'a' + 'A');
    s.push_back(c);
  }
  return s;
}

double IterateTrace::perturbation_norm(int k) const {
  if (k < 0 || k >= static_cast<int>(perturbations.size())) return 0.0;
  return perturbations[k].size() ? perturbations[k].norm() : 0.0;
}

void IterateTrace::set_reference(const Vector& ref) {
  std::vector<double> err;
  err.reserve(iterates.size());
  for (const auto& z : iterates) {
    if (z.size() < ref.size())
      throw InputError("reference is longer than the trace iterates");
    err.push_back((z.head(ref.size()) - ref).norm());
  }
  error_to_ref = std::move(err);
}

void IterateTrace::validate() const {
  const std::size_t n = iterates.size();
  if (n == 0) throw InputError("trace has no iterates");
  if (residuals.size() != n || step_norms.size() != n || wall_seconds.size() != n)
    throw InputError("trace column lengths differ");
  if (perturbations.size() + 1 != n && !perturbations.empty())
    throw InputError("trace perturbation list has the wrong length");
  if (error_to_ref && error_to_ref->size() != n)
    throw InputError("trace error list has the wrong length");
  if (!branches.empty() && branches.size() != n)
    throw InputError("trace branch list has the wrong length");
  for (double r : residuals)
    if (!(r >= 0.0)) throw InputError("trace residuals must be nonnegative");
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double x = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto res = std::from_chars(first, last, x);
  if (res.ec != std::errc() || res.ptr != last)
    throw InputError("not a number: '" + text + "'");
  return x;
}

void write_trace_csv(const IterateTrace& trace, std::ostream& out) {
  out << "k,residual,step_norm,err_to_ref,pert_norm\n";
  for (std::size_t k = 0; k < trace.iterates.size(); ++k) {
    out << k << ',' << format_double(trace.residuals[k]) << ','
        << format_double(trace.step_norms[k]) << ',';
    if (trace.error_to_ref) out << format_double((*trace.error_to_ref)[k]);
    out << ',' << format_double(trace.perturbation_norm(static_cast<int>(k)))
        << '\n';
  }
}

std::vector<TraceRow> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) ||
      line != "k,residual,step_norm,err_to_ref,pert_norm")
    throw InputError("trace CSV header missing or malformed");
  std::vector<TraceRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    if (fields.size() != 5)
      throw InputError("trace CSV line " + std::to_string(lineno) +
                       ": expected 5 fields");
    TraceRow row;
    row.k = std::stoi(fields[0]);
    row.residual = parse_double(fields[1]);
    row.step_norm = parse_double(fields[2]);
    if (!fields[3].empty()) row.err_to_ref = parse_double(fields[3]);
    row.pert_norm = parse_double(fields[4]);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace nashnewton
