#include "nashnewton/harness/csv.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

namespace nashnewton::harness {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

void write_trace_file(const IterateTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  write_trace_csv(trace, out);
}

void write_gne_solution_csv(const GameProblem& game, const Vector& z, TieRule rule,
                            std::ostream& out) {
  const auto pd = PrimalDualPoint::split(z, game.dimension());
  const BranchRecord rec = branch_record(game, pd, rule);
  out << "field,index,value,branch\n";
  for (Eigen::Index k = 0; k < pd.a.size(); ++k)
    out << "a," << k << ',' << format_double(pd.a(k)) << ",\n";
  for (Eigen::Index k = 0; k < pd.lambda.size(); ++k) {
    char b = rec.side[k] == Branch::Constraint ? 'C' : 'M';
    if (rec.tied[k]) b = static_cast<char>(b - 'A' + 'a');
    out << "lambda," << k << ',' << format_double(pd.lambda(k)) << ',' << b << '\n';
  }
  out << "phi_norm,0," << format_double(assemble_phi(game, pd).norm()) << ",\n";
}

void write_closed_loop_csv(const ClosedLoopLog& log, std::ostream& out) {
  const Eigen::Index nx = log.steps.empty() ? 0 : log.steps.front().x.size();
  const Eigen::Index nu = log.steps.empty() ? 0 : log.steps.front().u.size();
  out << 't';
  for (Eigen::Index k = 0; k < nx; ++k) out << ",x_" << k;
  for (Eigen::Index k = 0; k < nu; ++k) out << ",u_" << k;
  out << ",e,dx,residual\n";
  for (const auto& s : log.steps) {
    out << s.t;
    for (Eigen::Index k = 0; k < nx; ++k) out << ',' << format_double(s.x(k));
    for (Eigen::Index k = 0; k < nu; ++k) out << ',' << format_double(s.u(k));
    out << ',' << format_double(s.e) << ',' << format_double(s.dx) << ','
        << format_double(s.residual) << '\n';
  }
}

void write_contraction_summary_csv(const ContractionTable& table, std::ostream& out) {
  out << "K,sup_e,alpha_hat,theta_hat,violations,required_slack\n";
  for (const auto& f : table.fits)
    out << f.K << ',' << format_double(f.sup_e) << ',' << format_double(f.alpha) << ','
        << format_double(f.theta) << ',' << f.violations << ','
        << format_double(f.required_slack) << '\n';
}

}  // namespace nashnewton::harness
