// One line per acceptance criterion; exit status is non-zero if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "biharm/domain_io.hpp"
#include "biharm/error.hpp"
#include "biharm/trial_family.hpp"
#include "biharm/verify.hpp"

using namespace biharm;

namespace {

const std::filesystem::path kData = BIHARM_DATA_DIR;
const std::string kCli = BIHARM_CLI;

// Tolerances.
constexpr double kKernelRatio = 1e-8;
constexpr double kKernelStiffness = 1e-10;
constexpr double kNesting = 1e-10;
constexpr double kFrequency = 1e-12;
constexpr double kOrthogonality = 1e-10;
constexpr double kPointwise = 1e-12;
constexpr double kHessianIdentity = 1e-9;
constexpr double kRank = 1e-8;
constexpr double kReplayExcess = 1e-5;
constexpr double kExcessFloor = 1e-12;
constexpr double kMinOrder = 3.5;
constexpr double kLimitDigits = 1e-4;

RectilinearDomain load(const char* file) { return build_domain(read_domain_file(kData / file)); }

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const char* title, double budget_seconds, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.require(secs <= budget_seconds, "runtime over " + std::to_string(static_cast<int>(budget_seconds)) + " s");
  if (!o.pass) ++failures;
  char head[160];
  std::snprintf(head, sizeof head, "%s %2d %-28s %8.2f s ", o.pass ? "PASS" : "FAIL", id, title, secs);
  std::cout << head << o.detail.str() << std::endl;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

void check_margins(Outcome& o, const InequalityReport& rep, bool strict) {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& row : rep.rows) {
    lo = std::min(lo, row.margin);
    o.require(strict ? row.margin > 0.0 : row.margin >= 0.0, "k=" + std::to_string(row.k) + " margin " + sci(row.margin));
  }
  o.detail << rep.domain.name << " " << theorem_label(rep.theorem) << " min margin " << sci(lo) << "; ";
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

int main() {
  criterion(1, "kernel facts", 20.0, [](Outcome& o) {
    for (const char* f : {"square.dom", "rectangle_2x1.dom"}) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto k = kernel_stiffness_summary(build_mesh(load(f), 16, BoundaryCondition::Neumann), kKernelStiffness);
      const auto full = kernel_check(load(f), 16, {}, kKernelStiffness);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      double top = 0.0;
      for (double v : full.stiffness_norms) top = std::max(top, v);
      o.require(full.ratio && *full.ratio <= kKernelRatio, std::string(f) + " ratio");
      o.require(top <= kKernelStiffness && k.pass, std::string(f) + " stiffness");
      o.require(secs <= 10.0, std::string(f) + " runtime");
      o.detail << f << " ratio " << sci(full.ratio.value_or(NAN)) << " stiffness " << sci(top) << "; ";
    }
  });

  criterion(2, "discrete nesting", 60.0, [](Outcome& o) {
    for (const char* f : {"square.dom", "l_shape.dom"}) {
      const auto dom = load(f);
      const auto pair = compute_pair(dom, 16, 20, 0);
      double worst = -std::numeric_limits<double>::infinity();
      for (int k = 0; k < 20; ++k) {
        const double lam = pair.dirichlet.eigenvalues[k];
        worst = std::max(worst, (pair.neumann.eigenvalues[k] - lam) / lam);
      }
      o.require(worst <= kNesting, std::string(f) + " nesting");
      o.detail << f << " max (mu-lambda)/lambda " << sci(worst) << "; ";
    }
  });

  criterion(3, "shift d+1 in the plane", 300.0, [](Outcome& o) {
    for (const char* f : {"square.dom", "rectangle_2x1.dom"}) {
      const auto rep = check_inequality(load(f), 32, 10, Theorem::Thm2);
      o.require(rep.verdicts_pass() && rep.replays_pass(), std::string(f) + " verdict");
      check_margins(o, rep, false);
    }
  });

  criterion(4, "shift 2 on the L-shape", 300.0, [](Outcome& o) {
    const auto rep = check_inequality(load("l_shape.dom"), 32, 8, Theorem::Provenzano);
    o.require(rep.verdicts_pass() && rep.replays_pass(), "verdict");
    check_margins(o, rep, true);
  });

  criterion(5, "shifts d and d+1 on the cube", 600.0, [](Outcome& o) {
    const auto cube = load("cube_centered.dom");
    const auto pair = compute_pair(cube, 6, 4, 4);
    for (Theorem t : {Theorem::Thm1, Theorem::Thm2}) {
      const auto rep = evaluate_inequality(cube, pair, 4, t);
      o.require(rep.verdicts_pass() && rep.replays_pass(), theorem_label(t) + " verdict");
      check_margins(o, rep, false);
    }
  });

  // Families reused by criterion 7.
  std::vector<std::pair<RectilinearDomain, TrialFamily>> families;

  criterion(6, "odd-map frequency families", 30.0, [&](Outcome& o) {
    const std::vector<std::pair<const char*, int>> cases{
        {"square.dom", 16}, {"square_centered.dom", 16}, {"l_shape.dom", 16}, {"cube_centered.dom", 4}};
    for (const auto& [f, r] : cases) {
      const auto dom = load(f);
      const double lambda = compute_spectrum(dom, r, BoundaryCondition::Dirichlet, 1).eigenvalues[0];
      const auto fam = borsuk_family(dom, lambda);
      double freq = 0.0;
      for (const auto& m : fam.members) freq = std::max(freq, std::abs(m.bilaplacian_factor() - lambda) / lambda);
      const double ortho = fam.max_orthogonality_residual();
      o.require(static_cast<int>(fam.size()) == dom.dimension(), std::string(f) + " size");
      o.require(freq <= kFrequency, std::string(f) + " |w|^4");
      o.require(ortho <= kOrthogonality, std::string(f) + " orthogonality");
      if (std::string(f) == "square_centered.dom") {
        const auto& w2 = fam.members[1].frequency;
        o.require(std::abs(fam.members[0].frequency[1]) <= 1e-12 && std::abs(w2[0]) <= 1e-9 * std::abs(w2[1]),
                  "centered square axes");
      }
      o.detail << f << " ortho " << sci(ortho) << "; ";
      families.emplace_back(dom, fam);
    }
    for (const char* f : {"square_centered.dom", "cube_centered.dom"}) {
      const auto dom = load(f);
      const int r = dom.dimension() == 2 ? 16 : 4;
      const double lambda = compute_spectrum(dom, r, BoundaryCondition::Dirichlet, 1).eigenvalues[0];
      families.emplace_back(dom, symmetric_family(dom, lambda, detect_symmetry_frame(dom)));
    }
  });

  criterion(7, "trial identities", 30.0, [&](Outcome& o) {
    o.require(families.size() == 6, "families from criterion 6");
    double pw = 0.0, hs = 0.0;
    for (const auto& [dom, fam] : families) {
      const auto ids = check_identities(fam, dom);
      o.require(ids.sample_points == 100 && ids.combinations == 20, "sample counts");
      pw = std::max(pw, ids.pointwise_residual);
      hs = std::max(hs, ids.hessian_residual);
    }
    o.require(pw <= kPointwise, "pointwise");
    o.require(hs <= kHessianIdentity, "Hessian identity");
    o.detail << "pointwise " << sci(pw) << " Hessian " << sci(hs);
  });

  criterion(8, "trial-subspace replay", 600.0, [](Outcome& o) {
    const auto dom = load("square_centered.dom");
    const std::vector<int> ks{1, 2, 5};
    std::vector<double> prev(6, std::numeric_limits<double>::infinity());
    for (int r : {8, 16, 32}) {
      const auto pair = compute_pair(dom, r, 5, 3);
      double worst = 0.0;
      for (Theorem t : {Theorem::Thm1, Theorem::Thm2}) {
        InequalityOptions opt;
        opt.replay_ks = ks;
        opt.replay_tolerance = kReplayExcess;
        opt.rank_tolerance = kRank;
        const auto rep = evaluate_inequality(dom, pair, 5, t, opt);
        o.require(rep.replays.size() == ks.size(), "replay count");
        for (std::size_t i = 0; i < rep.replays.size(); ++i) {
          const auto& rr = rep.replays[i];
          const std::size_t slot = (t == Theorem::Thm1 ? 0 : 3) + i;
          const std::size_t expect = static_cast<std::size_t>(rr.k + 2 + (t == Theorem::Thm2 ? 1 : 0));
          const std::string tag = "r=" + std::to_string(r) + " k=" + std::to_string(rr.k) + " " + to_string(rr.family);
          o.require(rr.gram_rank == expect, tag + " rank");
          o.require(rr.sup <= rr.lambda * (1 + kReplayExcess), tag + " sup");
          o.require(rr.excess <= std::max(prev[slot], kExcessFloor), tag + " excess grew");
          prev[slot] = rr.excess;
          worst = std::max(worst, rr.excess);
        }
      }
      o.detail << "r=" << r << " max excess " << sci(worst) << "; ";
    }
  });

  criterion(9, "convergence oracle", 300.0, [](Outcome& o) {
    const auto rec = convergence_study(load("square.dom"), BoundaryCondition::Dirichlet, 1, {8, 16, 32});
    o.require(rec.order >= kMinOrder, "order");
    o.require(rec.limit_change <= kLimitDigits, "limit stability");
    o.require(rec.monotone, "monotone");
    char buf[160];
    std::snprintf(buf, sizeof buf, "order %.3f limit %.10g change %.2e", rec.order, rec.limit, rec.limit_change);
    o.detail << buf;
  });

  criterion(10, "deterministic CSV", 120.0, [](Outcome& o) {
    const auto dir = std::filesystem::temp_directory_path() / "biharm_acceptance";
    std::filesystem::create_directories(dir);
    std::vector<std::string> outputs;
    for (const char* threads : {"1", "1", "4"}) {
      const auto csv = dir / ("run" + std::to_string(outputs.size()) + ".csv");
      std::filesystem::remove(csv);
      const std::string cmd = "BIHARM_THREADS=" + std::string(threads) + " \"" + kCli + "\" inequality --domain \"" +
                              (kData / "l_shape.dom").string() +
                              "\" --theorem provenzano --kmax 8 --refine 16 --csv \"" + csv.string() +
                              "\" > /dev/null";
      o.require(std::system(cmd.c_str()) == 0, "cli exit status");
      outputs.push_back(slurp(csv));
    }
    o.require(!outputs[0].empty(), "csv written");
    o.require(outputs[0] == outputs[1], "repeat differs");
    o.require(outputs[0] == outputs[2], "thread count changes bytes");
    o.detail << outputs[0].size() << " bytes identical across 3 runs";
  });

  return failures == 0 ? 0 : 1;
}
