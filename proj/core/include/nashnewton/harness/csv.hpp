#pragma once

#include "nashnewton/kkt.hpp"
#include "nashnewton/mpc.hpp"
#include "nashnewton/trace.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace nashnewton::harness {

/// Splits one CSV line on commas. Fields are never quoted in our files.
std::vector<std::string> split_csv_line(const std::string& line);

void write_trace_file(const IterateTrace& trace, const std::filesystem::path& path);

/// Long format, header `field,index,value,branch`: one row per entry of a,
/// one per entry of lambda (branch = C or M, lowercase when tied), and a
/// final `phi_norm` row.
void write_gne_solution_csv(const GameProblem& game, const Vector& z, TieRule rule,
                            std::ostream& out);

/// Header `t,x_0..x_{n-1},u_0..u_{m-1},e,dx,residual`.
void write_closed_loop_csv(const ClosedLoopLog& log, std::ostream& out);

/// Header `K,sup_e,alpha_hat,theta_hat,violations,required_slack`.
void write_contraction_summary_csv(const ContractionTable& table, std::ostream& out);

}  // namespace nashnewton::harness
