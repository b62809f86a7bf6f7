#include "biharm/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "biharm/error.hpp"

namespace biharm {
namespace {

using nlohmann::json;

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// JSON has no NaN/inf; emit null for them.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json point(const Point& p, int d) {
  json a = json::array();
  for (int i = 0; i < d; ++i) a.push_back(p[i]);
  return a;
}

json to_json(const SolveDiagnostics& s) {
  return {{"mesh_id", s.mesh_id},           {"free_dofs", s.free_dofs},    {"method", s.method},
          {"iterations", s.iterations},     {"max_residual", s.max_residual}, {"trailing_gap", num(s.trailing_gap)},
          {"seconds", s.seconds}};
}

std::string sci(double v, int prec = 3) {
  std::ostringstream o;
  o << std::scientific << std::setprecision(prec) << v;
  return o.str();
}

std::string fixed(double v, int prec = 6) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(prec) << v;
  return o.str();
}

std::string frequency_text(const TrigMember& m, int d) {
  std::ostringstream o;
  o << (m.phase == Phase::Sine ? "sin" : "cos") << " w=(";
  for (int a = 0; a < d; ++a) o << (a ? ", " : "") << fixed(m.frequency[a], 9);
  o << ")";
  return o.str();
}

}  // namespace

json to_json(const DomainDescription& d) {
  json cells = json::array();
  for (const auto& c : d.cells) {
    json cell = json::array();
    for (int a = 0; a < d.dimension; ++a) cell.push_back(c[a]);
    cells.push_back(cell);
  }
  return {{"name", d.name},
          {"dimension", d.dimension},
          {"cell_size", d.cell_size},
          {"offset", point(d.offset, d.dimension)},
          {"cells", cells}};
}

json to_json(const SpectrumResult& s, bool with_vectors) {
  json j = {{"bc", to_string(s.bc)},
            {"mesh_id", s.mesh_id},
            {"eigenvalues", s.eigenvalues},
            {"residual_norms", s.residual_norms},
            {"method", s.method},
            {"iterations", s.iterations},
            {"kernel_dimension", s.kernel_dimension},
            {"shift", s.shift},
            {"trailing_gap", num(s.trailing_gap)}};
  if (with_vectors) {
    json vs = json::array();
    for (const auto& v : s.eigenvectors) vs.push_back(std::vector<double>(v.data(), v.data() + v.size()));
    j["eigenvectors"] = vs;
  }
  return j;
}

json to_json(const KernelSummary& s) {
  json j = {{"mesh_id", s.mesh_id},
            {"dimension", s.dimension},
            {"stiffness_norms", s.stiffness_norms},
            {"stiffness_tolerance", s.stiffness_tolerance},
            {"pass", s.pass}};
  if (!s.undeflated.empty()) j["undeflated_eigenvalues"] = s.undeflated;
  if (s.ratio) {
    j["ratio"] = num(*s.ratio);
    j["ratio_tolerance"] = s.ratio_tolerance;
  }
  return j;
}

json to_json(const TrialFamily& f) {
  json members = json::array();
  for (const auto& m : f.members) {
    members.push_back({{"phase", m.phase == Phase::Sine ? "sin" : "cos"},
                       {"frequency", point(m.frequency, f.dimension)},
                       {"origin", point(m.origin, f.dimension)}});
  }
  json gram = json::array();
  for (Eigen::Index i = 0; i < f.gram.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < f.gram.cols(); ++j) row.push_back(f.gram(i, j));
    gram.push_back(row);
  }
  json pairs = json::array();
  for (const auto& [i, j] : f.required_pairs)
    pairs.push_back({{"i", i}, {"j", j}, {"residual", f.orthogonality_residual(i, j)}});
  json out = {{"kind", to_string(f.kind)},
              {"dimension", f.dimension},
              {"lambda", f.lambda},
              {"members", members},
              {"gram", gram},
              {"required_pairs", pairs},
              {"max_orthogonality_residual", f.max_orthogonality_residual()}};
  if (f.distinguished_axis >= 0) out["distinguished_axis"] = f.distinguished_axis + 1;
  if (!f.root_residuals.empty()) out["root_residuals"] = f.root_residuals;
  return out;
}

json to_json(const IdentityReport& r) {
  return {{"pointwise_residual", r.pointwise_residual},
          {"hessian_residual", r.hessian_residual},
          {"sample_points", r.sample_points},
          {"combinations", r.combinations}};
}

json to_json(const InequalityReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"k", row.k},
                    {"lambda_k", row.lambda},
                    {"mu_k_plus_shift", row.mu},
                    {"margin", row.margin},
                    {"tol_margin", row.tol_margin},
                    {"verdict", row.pass ? "pass" : "fail"},
                    {"lambda_residual", row.lambda_residual},
                    {"mu_residual", row.mu_residual}});
  }
  json frame = json::array();
  for (const auto& m : r.symmetry_frame) frame.push_back({{"axis", m.axis + 1}, {"plane_offset", m.plane_offset}});
  json replays = json::array();
  for (const auto& rr : r.replays) {
    json members = json::array();
    for (const auto& m : rr.members) {
      members.push_back({{"phase", m.phase == Phase::Sine ? "sin" : "cos"},
                         {"frequency", point(m.frequency, r.domain.dimension)},
                         {"origin", point(m.origin, r.domain.dimension)}});
    }
    replays.push_back({{"k", rr.k},
                       {"family", to_string(rr.family)},
                       {"lambda", rr.lambda},
                       {"sup_rayleigh", num(rr.sup)},
                       {"excess", num(rr.excess)},
                       {"gram_rank", rr.gram_rank},
                       {"expected_rank", rr.expected_rank},
                       {"orthogonality_residual", rr.orthogonality_residual},
                       {"cross_term_residual", rr.cross_term_residual},
                       {"members", members},
                       {"verdict", rr.pass ? "pass" : "fail"}});
  }
  return {{"caveat", kDiscreteCaveat},
          {"domain", to_json(r.domain)},
          {"refinement", r.refinement},
          {"theorem", theorem_label(r.theorem)},
          {"shift", r.shift},
          {"k_max", r.k_max},
          {"verdict", r.verdicts_pass() ? "pass" : "fail"},
          {"rows", rows},
          {"symmetry_frame", frame},
          {"kernel", to_json(r.kernel)},
          {"nesting", {{"max_relative_violation", num(r.nesting_violation)},
                       {"tolerance", r.nesting_tolerance},
                       {"ok", r.nesting_ok()}}},
          {"replays", replays},
          {"tolerances", {{"margin_relative", r.tol_margin_relative},
                          {"replay", r.replay_tolerance},
                          {"solver", r.solver_tolerance}}},
          {"solves", {{"dirichlet", to_json(r.dirichlet)}, {"neumann", to_json(r.neumann)}}},
          {"timings", {{"dirichlet_seconds", r.dirichlet.seconds},
                       {"neumann_seconds", r.neumann.seconds},
                       {"replay_seconds", r.replay_seconds}}}};
}

json to_json(const ConvergenceRecord& r) {
  return {{"domain", r.domain_name},
          {"bc", to_string(r.bc)},
          {"index", r.index},
          {"ladder", r.ladder},
          {"values", r.values},
          {"residual_norms", r.residuals},
          {"orders", r.orders},
          {"order", num(r.order)},
          {"fit_residual", num(r.fit_residual)},
          {"nominal_order", r.nominal_order},
          {"richardson", r.richardson},
          {"limit", num(r.limit)},
          {"limit_change", num(r.limit_change)},
          {"monotone", r.monotone}};
}

std::string format_text(const SpectrumResult& s) {
  std::ostringstream o;
  o << "# spectrum " << s.mesh_id << " (" << to_string(s.bc) << ", " << s.method << ", " << s.iterations
    << " iterations)\n";
  o << std::setw(4) << "j" << std::setw(26) << "eigenvalue" << std::setw(12) << "residual" << '\n';
  for (std::size_t j = 0; j < s.eigenvalues.size(); ++j) {
    o << std::setw(4) << j + 1 << std::setw(26) << g17(s.eigenvalues[j]) << std::setw(12)
      << sci(s.residual_norms[j], 2) << '\n';
  }
  return o.str();
}

std::string format_text(const KernelSummary& s) {
  std::ostringstream o;
  o << "# kernel " << s.mesh_id << ": " << (s.pass ? "pass" : "fail") << '\n';
  o << "stiffness norms of 1, x_1..x_d interpolants:";
  for (double v : s.stiffness_norms) o << ' ' << sci(v, 2);
  o << " (limit " << sci(s.stiffness_tolerance, 0) << ")\n";
  if (!s.undeflated.empty()) {
    o << "undeflated lowest eigenvalues:";
    for (double v : s.undeflated) o << ' ' << g17(v);
    o << '\n';
  }
  if (s.ratio) o << "max |mu_j| / mu_" << s.dimension + 2 << ": " << sci(*s.ratio, 2) << " (limit "
                 << sci(s.ratio_tolerance, 0) << ")\n";
  return o.str();
}

std::string format_text(const TrialFamily& f, const IdentityReport* identities) {
  std::ostringstream o;
  o << "# " << to_string(f.kind) << " family at lambda = " << g17(f.lambda) << '\n';
  for (std::size_t l = 0; l < f.members.size(); ++l) {
    o << "  v" << l + 1 << ": " << frequency_text(f.members[l], f.dimension) << "  |v| = " << fixed(f.norm(int(l)), 9)
      << '\n';
  }
  o << "max orthogonality residual: " << sci(f.max_orthogonality_residual(), 2) << '\n';
  if (identities) {
    o << "pointwise bilaplacian residual: " << sci(identities->pointwise_residual, 2) << '\n';
    o << "Hessian identity residual: " << sci(identities->hessian_residual, 2) << '\n';
  }
  return o.str();
}

std::string format_text(const InequalityReport& r) {
  std::ostringstream o;
  o << "# " << kDiscreteCaveat << '\n';
  o << "domain " << r.domain.name << " (d=" << r.domain.dimension << "), refinement " << r.refinement << ", "
    << theorem_label(r.theorem) << ": mu_{k+" << r.shift << "} <= lambda_k\n";
  if (!r.symmetry_frame.empty()) {
    o << "symmetry frame:";
    for (const auto& m : r.symmetry_frame) o << " x" << m.axis + 1 << '=' << g17(m.plane_offset);
    o << '\n';
  }
  o << std::setw(4) << "k" << std::setw(22) << "lambda_k" << std::setw(22) << "mu_{k+shift}" << std::setw(22)
    << "margin" << std::setw(10) << "res_l" << std::setw(10) << "res_m" << std::setw(9) << "verdict" << '\n';
  for (const auto& row : r.rows) {
    o << std::setw(4) << row.k << std::setw(22) << fixed(row.lambda) << std::setw(22) << fixed(row.mu)
      << std::setw(22) << fixed(row.margin) << std::setw(10) << sci(row.lambda_residual, 1) << std::setw(10)
      << sci(row.mu_residual, 1) << std::setw(9) << (row.pass ? "pass" : "FAIL") << '\n';
  }
  o << "verdict: " << (r.verdicts_pass() ? "pass" : "FAIL") << '\n';
  o << "nesting mu_k <= lambda_k: " << (r.nesting_ok() ? "ok" : "VIOLATED") << " (max relative "
    << sci(r.nesting_violation, 2) << ")\n";
  o << "kernel stiffness norms:";
  for (double v : r.kernel.stiffness_norms) o << ' ' << sci(v, 2);
  o << '\n';
  if (!r.replays.empty()) {
    o << "trial-subspace replay:\n";
    o << std::setw(4) << "k" << std::setw(16) << "family" << std::setw(22) << "sup Rayleigh" << std::setw(12)
      << "excess" << std::setw(6) << "rank" << std::setw(10) << "ortho" << std::setw(10) << "cross" << std::setw(9)
      << "verdict" << '\n';
    for (const auto& rr : r.replays) {
      o << std::setw(4) << rr.k << std::setw(16) << to_string(rr.family) << std::setw(22) << fixed(rr.sup)
        << std::setw(12) << sci(rr.excess, 2) << std::setw(6)
        << (std::to_string(rr.gram_rank) + "/" + std::to_string(rr.expected_rank)) << std::setw(10)
        << sci(rr.orthogonality_residual, 1) << std::setw(10) << sci(rr.cross_term_residual, 1) << std::setw(9)
        << (rr.pass ? "pass" : "FAIL") << '\n';
    }
  }
  o << "solves: dirichlet " << r.dirichlet.free_dofs << " dofs " << r.dirichlet.method << " max residual "
    << sci(r.dirichlet.max_residual, 2) << " (" << fixed(r.dirichlet.seconds, 2) << " s); neumann "
    << r.neumann.free_dofs << " dofs " << r.neumann.method << " max residual " << sci(r.neumann.max_residual, 2)
    << " (" << fixed(r.neumann.seconds, 2) << " s)\n";
  return o.str();
}

std::string format_text(const ConvergenceRecord& r) {
  std::ostringstream o;
  o << "# convergence " << r.domain_name << ' ' << to_string(r.bc) << " eigenvalue " << r.index << '\n';
  o << std::setw(6) << "r" << std::setw(26) << "theta" << std::setw(12) << "residual" << '\n';
  for (std::size_t i = 0; i < r.ladder.size(); ++i) {
    o << std::setw(6) << r.ladder[i] << std::setw(26) << g17(r.values[i]) << std::setw(12) << sci(r.residuals[i], 2)
      << '\n';
  }
  o << "observed order: " << fixed(r.order, 3) << " (fit residual " << sci(r.fit_residual, 2) << ")\n";
  o << "Richardson estimates (order " << fixed(r.nominal_order, 1) << "):";
  for (double v : r.richardson) o << ' ' << g17(v);
  o << "\nlimit: " << g17(r.limit) << " (relative change " << sci(r.limit_change, 2) << ")\n";
  o << "monotone from above: " << (r.monotone ? "yes" : "NO") << '\n';
  return o.str();
}

std::string csv_string(const InequalityReport& r) {
  std::string s = "k,lambda_k,mu_k_plus_shift,margin\n";
  for (const auto& row : r.rows) {
    s += std::to_string(row.k) + ',' + g17(row.lambda) + ',' + g17(row.mu) + ',' + g17(row.margin) + '\n';
  }
  return s;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write '" + path.string() + "'");
  out << content;
  out.close();
  if (!out) throw Error(ErrorCode::IoFailure, "write to '" + path.string() + "' failed");
}

void emit_csv(const InequalityReport& r, const std::filesystem::path& path) { write_file(path, csv_string(r)); }

}  // namespace biharm
