// Command-line driver: verify / certify / solve / sff / immerse /
// linear-problem over the family catalog. Exit codes: 0 success, 1
// mathematical or verification failure, 2 usage/config error.

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>

#include "pss/csvio.hpp"
#include "pss/immersion.hpp"
#include "pss/jetspace.hpp"
#include "pss/pdesolver.hpp"
#include "pss/verifier.hpp"

using namespace pss;

namespace {

struct CommonArgs {
  std::string family;
  std::uint64_t seed = 1;
};

FamilySpec load_or_die(const std::string& family) {
  if (family.empty()) throw ConfigError("--family is required");
  return load_family(family);
}

std::pair<double, double> parse_pair(const std::string& text, const char* what) {
  const auto comma = text.find(',');
  if (comma == std::string::npos)
    throw ConfigError(std::string(what) + " expects lo,hi");
  try {
    return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
  } catch (const std::exception&) {
    throw ConfigError(std::string("bad numbers in ") + what + ": " + text);
  }
}

struct Window {
  double x0 = -0.3, x1 = 0.3, t0 = 0.0, t1 = 0.3;
};

Window parse_window(const std::string& text) {
  Window w;
  if (text.empty()) return w;
  std::stringstream ss(text);
  std::string tok;
  std::vector<double> vals;
  while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
  if (vals.size() != 4) throw ConfigError("--window expects x0,x1,t0,t1");
  w.x0 = vals[0];
  w.x1 = vals[1];
  w.t0 = vals[2];
  w.t1 = vals[3];
  return w;
}

Sign parse_sign_flag(const std::string& s) {
  if (s == "+" || s == "+1") return Sign::kPlus;
  if (s == "-" || s == "-1") return Sign::kMinus;
  throw ConfigError("--sign expects + or -");
}

// ---------------------------------------------------------------------------

int cmd_verify(const CommonArgs& common, int samples, double tol,
               const std::string& mode, const std::string& box_arg,
               const std::string& report_path) {
  const FamilySpec spec = load_or_die(common.family);
  const auto vrep = validate(spec);
  for (const auto& w : vrep.warnings)
    std::cerr << "warning: " << w.what << "\n";

  JetBox box;
  if (!box_arg.empty()) {
    auto [lo, hi] = parse_pair(box_arg, "--box");
    box = {lo, hi};
  }
  const PartialMode pm = mode == "fd" ? PartialMode::kFiniteDifference
                                      : PartialMode::kAnalytic;
  const auto rep = theorem1_conditions(spec, samples, box, tol, pm, common.seed);

  Provenance prov;
  prov.family_config = family_to_config(spec);
  prov.seed = common.seed;
  prov.tol = tol;
  prov.extra.push_back(std::string("mode=") + (pm == PartialMode::kAnalytic ? "analytic" : "fd"));
  prov.extra.push_back("delta=" + std::to_string(rep.delta));
  if (!report_path.empty()) write_text_file(report_path, prov.header() + rep.to_csv());

  for (const auto& row : rep.rows) {
    std::cout << (row.pass ? "  ok  " : " FAIL ") << row.identity
              << (row.lower_bound ? "  min=" : "  max=") << row.residual << "\n";
  }
  std::cout << "delta resolved to " << (rep.delta > 0 ? "+1" : "-1") << "\n";
  std::cout << (rep.pass ? "PASS" : "FAIL") << "\n";
  return rep.pass ? 0 : 1;
}

// ---------------------------------------------------------------------------

int cmd_certify(const CommonArgs& common, const std::string& window_arg,
                int samples, double sigma, double beta, double b0,
                const std::string& out_path) {
  const FamilySpec spec = load_or_die(common.family);
  validate(spec);
  const auto rep = classify_existence(spec);
  std::cout << rep.branch << ": " << rep.to_string() << "\n";
  if (rep.verdict == Verdict::kNonexistent || out_path.empty())
    return 0;

  // Emit the universal coefficients over the requested window.
  double lo = -0.25, hi = 0.25;
  if (!window_arg.empty()) std::tie(lo, hi) = parse_pair(window_arg, "--window");
  std::ostringstream os;
  os.precision(17);
  Provenance prov;
  prov.family_config = family_to_config(spec);
  prov.seed = common.seed;
  prov.extra.push_back("case=" + rep.proposition_case);
  os << prov.header() << "x,t,a,b,c,gauss_residual,masked\n";

  auto emit = [&os](double x, double t, std::optional<SecondFundamentalForm> s) {
    if (s) {
      os << x << "," << t << "," << s->a << "," << s->b << "," << s->c << ","
         << gauss_check(*s) << ",0\n";
    } else {
      os << x << "," << t << ",nan,nan,nan,nan,1\n";
    }
  };

  const int n = std::max(2, samples);
  if (std::holds_alternative<BranchT2>(spec)) {
    const auto& b = std::get<BranchT2>(spec);
    if (b.mu == 0.0) {
      Prop1i p{std::abs(b.m), sigma, beta, b.m >= 0 ? Sign::kPlus : Sign::kMinus};
      for (int k = 0; k < n; ++k) {
        const double x = lo + (hi - lo) * k / (n - 1);
        try {
          emit(x, 0.0, sff_prop1_i(p, x));
        } catch (const OutsideStrip&) {
          emit(x, 0.0, std::nullopt);
        }
      }
    } else {
      Prop1ii p{b.mu, std::abs(b.m), beta, b.m >= 0 ? Sign::kPlus : Sign::kMinus,
                b0, 0.5 * (lo + hi)};
      const auto curve = sff_prop1_ii(p, lo, hi, n);
      for (const auto& s : curve.samples) emit(s.s, 0.0, s.sff);
      if (curve.stopped_by_event)
        std::cerr << "note: integration stopped by " << curve.event_name << "\n";
    }
  } else if (std::holds_alternative<BranchT4>(spec)) {
    const auto& b = std::get<BranchT4>(spec);
    if (b.mu == 0.0 && b.m1 == 0.0) {
      Prop3i p{b.m2, sigma, beta, Sign::kPlus};
      for (int k = 0; k < n; ++k) {
        const double t = lo + (hi - lo) * k / (n - 1);
        try {
          emit(0.0, t, sff_prop3_i(p, t));
        } catch (const OutsideStrip&) {
          emit(0.0, t, std::nullopt);
        }
      }
    } else if (b.mu == 0.0) {
      Prop3ii p{b.m1, b.m2, sigma, beta, Sign::kPlus};
      for (int k = 0; k < n; ++k) {
        const double x = lo + (hi - lo) * k / (n - 1);  // sampled along t = 0
        try {
          emit(x, 0.0, sff_prop3_ii(p, x, 0.0));
        } catch (const OutsideStrip&) {
          emit(x, 0.0, std::nullopt);
        }
      }
    } else {
      Prop3iii p{b.mu, b.m1, b.m2, beta, Sign::kPlus, b0, 0.5 * (lo + hi)};
      const auto curve = sff_prop3_iii(p, lo, hi, n);
      for (const auto& s : curve.samples) emit(s.s, 0.0, s.sff);
    }
  }
  write_text_file(out_path, os.str());
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_solve(const CommonArgs& common, const std::string& ic, int n,
              double length, double dt, double tmax, int snap_every,
              const std::string& jets_mode, const std::string& out_path) {
  const FamilySpec spec = load_or_die(common.family);
  validate(spec);
  Grid1D grid{n, length};
  SolverOptions opts;
  opts.jets = jets_mode == "fd" ? JetMode::kFiniteDifference : JetMode::kSpectral;
  PdeSolver solver(spec, grid, opts);
  const auto u0 = initial_condition(ic, grid);
  const auto field = solver.solve(u0, dt, tmax, snap_every);

  Provenance prov;
  prov.family_config = family_to_config(spec);
  prov.seed = common.seed;
  std::vector<std::string> comments;
  {
    std::stringstream hs(prov.header());
    std::string line;
    while (std::getline(hs, line))
      comments.push_back(line.size() > 2 ? line.substr(2) : "");
  }
  comments.push_back("ic=" + ic);
  comments.push_back("dt=" + std::to_string(dt));
  if (out_path.empty()) throw ConfigError("--out is required for solve");
  write_text_file(out_path, solution_to_csv(field, comments));
  std::cout << "wrote " << out_path << " (" << field.snapshots() << " snapshots, max|u|="
            << solver.diagnostics().max_abs_u << ")\n";
  if (solver.diagnostics().underresolved)
    std::cerr << "warning: spectral tail indicates under-resolution\n";
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_sff(const CommonArgs& common, const std::string& prop,
            const std::string& range_arg, int n, double eta, double sigma,
            double beta, const std::string& sign_arg, double mu, double m1,
            double m2, double b0, double anchor, const std::string& out_path) {
  double lo = -0.4, hi = 0.4;
  if (!range_arg.empty()) std::tie(lo, hi) = parse_pair(range_arg, "--range");
  const Sign sign = parse_sign_flag(sign_arg);

  std::ostringstream os;
  os.precision(17);
  Provenance prov;
  prov.seed = common.seed;
  prov.extra.push_back("prop=" + prop);
  os << prov.header() << "x,t,a,b,c,gauss_residual,masked\n";

  auto emit_closed = [&](double x, double t, auto&& fn) {
    try {
      const SecondFundamentalForm s = fn();
      os << x << "," << t << "," << s.a << "," << s.b << "," << s.c << ","
         << gauss_check(s) << ",0\n";
    } catch (const OutsideStrip&) {
      os << x << "," << t << ",nan,nan,nan,nan,1\n";
    }
  };

  if (prop == "1i") {
    Prop1i p{eta, sigma, beta, sign};
    for (int k = 0; k < n; ++k) {
      const double x = lo + (hi - lo) * k / (n - 1);
      emit_closed(x, 0.0, [&] { return sff_prop1_i(p, x); });
    }
  } else if (prop == "3i") {
    Prop3i p{m2, sigma, beta, sign};
    for (int k = 0; k < n; ++k) {
      const double t = lo + (hi - lo) * k / (n - 1);
      emit_closed(0.0, t, [&] { return sff_prop3_i(p, t); });
    }
  } else if (prop == "3ii") {
    Prop3ii p{m1, m2, sigma, beta, sign};
    for (int k = 0; k < n; ++k) {
      const double x = lo + (hi - lo) * k / (n - 1);
      emit_closed(x, 0.0, [&] { return sff_prop3_ii(p, x, 0.0); });
    }
  } else if (prop == "1ii" || prop == "3iii") {
    SffCurve curve;
    if (prop == "1ii") {
      Prop1ii p{mu, eta, beta, sign, b0, anchor};
      curve = sff_prop1_ii(p, lo, hi, n);
    } else {
      Prop3iii p{mu, m1, m2, beta, sign, b0, anchor};
      curve = sff_prop3_iii(p, lo, hi, n);
    }
    for (const auto& s : curve.samples)
      os << s.s << ",0," << s.sff.a << "," << s.sff.b << "," << s.sff.c << ","
         << gauss_check(s.sff) << ",0\n";
    std::cout << "ode plug-back residual max = " << curve.max_ode_residual() << "\n";
    if (curve.stopped_by_event)
      std::cerr << "note: integration stopped by " << curve.event_name << "\n";
  } else {
    throw ConfigError("--prop must be one of 1i, 1ii, 3i, 3ii, 3iii");
  }
  if (out_path.empty()) throw ConfigError("--out is required for sff");
  write_text_file(out_path, os.str());
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct GeometryBundle {
  Field2D<FrameCoeffs> frames;
  Field2D<SecondFundamentalForm> sff;
  Mask2D mask;
  bool has_mask = false;
};

Jet kink_jet(double x, double t) {
  const double X = x + t;
  Jet j;
  j.x = x;
  j.t = t;
  const double sech = 1.0 / std::cosh(X);
  const double tanh = std::tanh(X);
  j.z = {4.0 * std::atan(std::exp(X)), 2.0 * sech, -2.0 * sech * tanh};
  j.zt0 = 2.0 * sech;
  j.zt1 = -2.0 * sech * tanh;
  return j;
}

GeometryBundle build_geometry(const FamilySpec& spec, Window w, int nx, int nt,
                              bool have_window, double solution_length,
                              const std::string& preset_exact,
                              const std::string& solution_path, bool kink,
                              double sigma, double beta, double ndg_threshold) {
  GeometryBundle g;
  const FrameBundle fb = build_frame(spec);

  // Jets first: a solved field dictates its own grid, optionally sliced to
  // the requested window (the universal strips are local by nature).
  Field2D<Jet> jets;
  if (!solution_path.empty()) {
    const SolutionField sol =
        solution_from_csv(read_text_file(solution_path), solution_length);
    const JetGrid jg = extract_jets(sol, 3, Stencil::kOrder4);
    const auto& full = jg.jets;
    int i0 = 0, i1 = full.nx() - 1, j0 = 0, j1 = full.nt() - 1;
    if (have_window) {
      i0 = std::max(i0, static_cast<int>(std::ceil((w.x0 - full.x0) / full.dx - 1e-9)));
      i1 = std::min(i1, static_cast<int>(std::floor((w.x1 - full.x0) / full.dx + 1e-9)));
      j0 = std::max(j0, static_cast<int>(std::ceil((w.t0 - full.t0) / full.dt - 1e-9)));
      j1 = std::min(j1, static_cast<int>(std::floor((w.t1 - full.t0) / full.dt + 1e-9)));
      if (i1 - i0 < 2 || j1 - j0 < 2)
        throw ConfigError("--window leaves fewer than 3x3 solution samples");
    }
    jets = Field2D<Jet>(i1 - i0 + 1, j1 - j0 + 1);
    jets.dx = full.dx;
    jets.dt = full.dt;
    jets.x0 = full.xval(i0);
    jets.t0 = full.tval(j0);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) jets.at(i - i0, j - j0) = full.at(i, j);
    nx = jets.nx();
    nt = jets.nt();
    w.x0 = jets.x0;
    w.x1 = jets.x0 + (nx - 1) * jets.dx;
    w.t0 = jets.t0;
    w.t1 = jets.t0 + (nt - 1) * jets.dt;
  }

  g.frames = Field2D<FrameCoeffs>(nx, nt);
  g.sff = Field2D<SecondFundamentalForm>(nx, nt);
  g.mask = Mask2D(nx, nt, 0);
  g.frames.x0 = g.sff.x0 = g.mask.x0 = w.x0;
  g.frames.t0 = g.sff.t0 = g.mask.t0 = w.t0;
  g.frames.dx = g.sff.dx = g.mask.dx = (w.x1 - w.x0) / (nx - 1);
  g.frames.dt = g.sff.dt = g.mask.dt = (w.t1 - w.t0) / (nt - 1);

  if (kink) {
    if (!std::holds_alternative<ExplicitFrame>(spec))
      throw ConfigError("--kink applies to the sg-lightcone frame");
    for (int j = 0; j < nt; ++j)
      for (int i = 0; i < nx; ++i) {
        const double x = g.frames.xval(i), t = g.frames.tval(j);
        const double sh = std::sinh(x + t);
        g.frames.at(i, j) = eval_frame(fb, kink_jet(x, t));
        if (std::abs(sh) < 0.3) {
          g.mask.at(i, j) = 1;
          g.has_mask = true;
        } else {
          g.sff.at(i, j) = SecondFundamentalForm{-1.0 / sh, 0.0, sh};
        }
      }
    return g;
  }

  if (!preset_exact.empty()) {
    double m = 1.0, A = 1.0;
    int k = 1;
    std::stringstream ss(preset_exact);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) throw ConfigError("--preset-exact expects k=..[,m=..,A=..]");
      const std::string key = tok.substr(0, eq);
      const double val = std::stod(tok.substr(eq + 1));
      if (key == "k") k = static_cast<int>(val);
      else if (key == "m") m = val;
      else if (key == "A") A = val;
      else throw ConfigError("unknown --preset-exact key " + key);
    }
    // The closed form solves the member with h = identity, psi = z0 only.
    const CubicTarget t = target_from_expr(fb.F);
    if (std::abs(t.z1 - 1.0) > 1e-12 || std::abs(t.z0 - m) > 1e-12 ||
        std::abs(t.z0z3) > 1e-12)
      throw ConfigError("--preset-exact needs the linear member with matching m");
    const auto sol = exact_linear_solution(m, k, A);
    jets = Field2D<Jet>(nx, nt);
    for (int j = 0; j < nt; ++j)
      for (int i = 0; i < nx; ++i)
        jets.at(i, j) = sol.jet(g.frames.xval(i), g.frames.tval(j));
  } else if (solution_path.empty()) {
    throw ConfigError("immerse needs --preset-exact, --solution, or --kink");
  }

  for (int j = 0; j < nt; ++j)
    for (int i = 0; i < nx; ++i) g.frames.at(i, j) = eval_frame(fb, jets.at(i, j));

  // Universal coefficients per the existence classification.
  const auto rep = classify_existence(spec);
  if (rep.verdict != Verdict::kUniversalExists)
    throw Error("no finite-jet second fundamental form exists for this branch (" +
                rep.to_string() + "); immersion is not defined");

  auto fill_sff = [&](auto&& fn) {
    for (int j = 0; j < nt; ++j)
      for (int i = 0; i < nx; ++i) {
        if (g.mask.at(i, j)) continue;
        try {
          g.sff.at(i, j) = fn(g.frames.xval(i), g.frames.tval(j));
        } catch (const OutsideStrip&) {
          g.mask.at(i, j) = 1;
          g.has_mask = true;
        }
      }
  };

  if (rep.proposition_case == "1(i)") {
    const auto& b = std::get<BranchT2>(spec);
    Prop1i p{std::abs(b.m), sigma, beta, b.m >= 0 ? Sign::kPlus : Sign::kMinus};
    fill_sff([&](double x, double) { return sff_prop1_i(p, x); });
  } else if (rep.proposition_case == "3(i)") {
    const auto& b = std::get<BranchT4>(spec);
    Prop3i p{b.m2, sigma, beta, Sign::kPlus};
    fill_sff([&](double, double t) { return sff_prop3_i(p, t); });
  } else if (rep.proposition_case == "3(ii)") {
    const auto& b = std::get<BranchT4>(spec);
    Prop3ii p{b.m1, b.m2, sigma, beta, Sign::kPlus};
    fill_sff([&](double x, double t) { return sff_prop3_ii(p, x, t); });
  } else {
    throw Error("ODE-backed universal coefficients: use the sff command and "
                "feed the sampled curve to a custom pipeline");
  }

  // Nondegeneracy mask from the wedge quantities.
  const auto ndg = nondegeneracy(g.frames, ndg_threshold);
  for (int j = 0; j < nt; ++j)
    for (int i = 0; i < nx; ++i)
      if (ndg.mask.at(i, j)) {
        g.mask.at(i, j) = 1;
        g.has_mask = true;
      }
  return g;
}

int cmd_immerse(const CommonArgs& common, const Window& w, bool have_window,
                double solution_length, int n, const std::string& preset_exact,
                const std::string& solution_path, bool kink, double sigma,
                double beta, double ndg_threshold, const std::string& out_path,
                const std::string& metrics_path, bool holonomy_only,
                const std::string& holonomy_path) {
  const FamilySpec spec = load_or_die(common.family);
  validate(spec);

  GeometryBundle g = build_geometry(
      spec, w, n,
      std::max(9, static_cast<int>(std::lround(n * (w.t1 - w.t0) / (w.x1 - w.x0)))),
      have_window, solution_length, preset_exact, solution_path, kink, sigma,
      beta, ndg_threshold);
  const int nx = g.frames.nx(), nt = g.frames.nt();
  const Mask2D* mask = g.has_mask ? &g.mask : nullptr;

  const auto sres = structure_residual(g.frames);
  std::cout << "structure residual max = " << sres.max_abs << "\n";

  if (holonomy_only) {
    const auto lp = linear_problem_integrate(g.frames, mask);
    std::cout << "holonomy defect max = " << lp.max_holonomy << "\n";
    if (!holonomy_path.empty()) {
      std::ostringstream os;
      os.precision(17);
      Provenance prov;
      prov.family_config = family_to_config(spec);
      prov.seed = common.seed;
      os << prov.header() << "x,t,v1,v2,holonomy\n";
      for (int j = 0; j < lp.v1.nt(); ++j)
        for (int i = 0; i < lp.v1.nx(); ++i)
          os << lp.v1.xval(i) << "," << lp.v1.tval(j) << "," << lp.v1.at(i, j)
             << "," << lp.v2.at(i, j) << "," << lp.holonomy.at(i, j) << "\n";
      write_text_file(holonomy_path, os.str());
      std::cout << "wrote " << holonomy_path << "\n";
    }
    return 0;
  }

  const auto cres = codazzi_residual(g.frames, g.sff, mask);
  std::cout << "codazzi residual max = " << cres.max_abs << "\n";

  const Mesh mesh = integrate_frame(g.frames, g.sff, mask);
  std::cout << "closure defect max = " << mesh.max_closure << "\n";

  const auto metric = induced_metric(mesh);
  const auto K = gaussian_curvature(metric);
  const auto rec = second_form_recover(mesh, g.frames);

  double ksum = 0.0;
  int kcount = 0;
  for (int j = 2; j < nt - 2; ++j)
    for (int i = 2; i < nx - 2; ++i)
      if (std::isfinite(K.at(i, j))) {
        ksum += K.at(i, j);
        ++kcount;
      }
  const double kmean = kcount ? ksum / kcount : std::nan("");
  std::cout << "mean curvature K over unmasked interior = " << kmean << "\n";

  if (!out_path.empty()) {
    const int faces = export_obj(mesh, out_path);
    std::cout << "wrote " << out_path << " (" << faces << " faces)\n";
  }
  if (!metrics_path.empty()) {
    std::ostringstream os;
    os.precision(17);
    Provenance prov;
    prov.family_config = family_to_config(spec);
    prov.seed = common.seed;
    prov.extra.push_back("anchor=origin-standard-frame");
    os << prov.header() << "x,t,E,F,G,K,a_rec,b_rec,c_rec,closure_defect\n";
    for (int j = 0; j < nt; ++j)
      for (int i = 0; i < nx; ++i) {
        if (!metric.at(i, j).valid) continue;
        os << metric.xval(i) << "," << metric.tval(j) << "," << metric.at(i, j).E
           << "," << metric.at(i, j).F << "," << metric.at(i, j).G << ","
           << K.at(i, j) << "," << rec.at(i, j).a << "," << rec.at(i, j).b << ","
           << rec.at(i, j).c << "," << mesh.closure.at(i, j) << "\n";
      }
    write_text_file(metrics_path, os.str());
    std::cout << "wrote " << metrics_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pseudospherical-surface toolkit for third-order members"};
  app.require_subcommand(1);

  CommonArgs common;

  // verify
  auto* verify = app.add_subcommand("verify", "check the characterization identities");
  int v_samples = 1000;
  double v_tol = 1e-9;
  std::string v_mode = "analytic", v_box, v_report;
  verify->add_option("--family", common.family)->required();
  verify->add_option("--samples", v_samples);
  verify->add_option("--tol", v_tol);
  verify->add_option("--mode", v_mode)->check(CLI::IsMember({"analytic", "fd"}));
  verify->add_option("--box", v_box);
  verify->add_option("--report", v_report);
  verify->add_option("--seed", common.seed);

  // certify
  auto* certify = app.add_subcommand("certify", "existence classification and universal coefficients");
  std::string c_window, c_out;
  int c_samples = 101;
  double c_sigma = 3.0, c_beta = 1.0, c_b0 = 2.0;
  certify->add_option("--family", common.family)->required();
  certify->add_option("--window", c_window);
  certify->add_option("--samples", c_samples);
  certify->add_option("--sigma", c_sigma);
  certify->add_option("--beta", c_beta);
  certify->add_option("--b0", c_b0);
  certify->add_option("--out", c_out);
  certify->add_option("--seed", common.seed);

  // solve
  auto* solve = app.add_subcommand("solve", "method-of-lines time integration");
  std::string s_ic = "cos", s_jets = "spectral", s_out;
  int s_n = 256, s_snap = 10;
  double s_len = 2.0 * M_PI, s_dt = 1e-3, s_tmax = 1.0;
  solve->add_option("--family", common.family)->required();
  solve->add_option("--ic", s_ic);
  solve->add_option("--n", s_n);
  solve->add_option("--length", s_len);
  solve->add_option("--dt", s_dt);
  solve->add_option("--tmax", s_tmax);
  solve->add_option("--snap-every", s_snap);
  solve->add_option("--jets", s_jets)->check(CLI::IsMember({"spectral", "fd"}));
  solve->add_option("--out", s_out);
  solve->add_option("--seed", common.seed);

  // sff
  auto* sff = app.add_subcommand("sff", "universal second-fundamental-form samples");
  std::string f_prop, f_range, f_sign = "+", f_out;
  int f_n = 101;
  double f_eta = 1.0, f_sigma = 3.0, f_beta = 1.0, f_mu = 1.0, f_m1 = 1.0,
         f_m2 = 1.0, f_b0 = 2.0, f_anchor = 0.0;
  sff->add_option("--prop", f_prop)->required();
  sff->add_option("--range", f_range);
  sff->add_option("--n", f_n);
  sff->add_option("--eta", f_eta);
  sff->add_option("--sigma", f_sigma);
  sff->add_option("--beta", f_beta);
  sff->add_option("--sign", f_sign);
  sff->add_option("--mu", f_mu);
  sff->add_option("--m1", f_m1);
  sff->add_option("--m2", f_m2);
  sff->add_option("--b0", f_b0);
  sff->add_option("--anchor", f_anchor);
  sff->add_option("--out", f_out);
  sff->add_option("--seed", common.seed);

  // immerse and linear-problem share most flags
  std::string i_window, i_preset_exact, i_solution, i_out, i_metrics, i_holonomy;
  bool i_kink = false;
  int i_n = 129;
  double i_sigma = 3.0, i_beta = 1.0, i_ndg = 1e-8, i_length = 2.0 * M_PI;

  auto add_geometry_flags = [&](CLI::App* cmd) {
    cmd->add_option("--family", common.family)->required();
    cmd->add_option("--window", i_window);
    cmd->add_option("--n", i_n);
    cmd->add_option("--preset-exact", i_preset_exact);
    cmd->add_option("--solution", i_solution);
    cmd->add_option("--length", i_length);
    cmd->add_flag("--kink", i_kink);
    cmd->add_option("--sigma", i_sigma);
    cmd->add_option("--beta", i_beta);
    cmd->add_option("--ndg-threshold", i_ndg);
    cmd->add_option("--seed", common.seed);
  };

  auto* immerse = app.add_subcommand("immerse", "frame integration and surface export");
  add_geometry_flags(immerse);
  immerse->add_option("--out", i_out);
  immerse->add_option("--metrics", i_metrics);

  auto* linprob = app.add_subcommand("linear-problem", "two-component transport and holonomy");
  add_geometry_flags(linprob);
  linprob->add_option("--out", i_holonomy);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (verify->parsed())
      return cmd_verify(common, v_samples, v_tol, v_mode, v_box, v_report);
    if (certify->parsed())
      return cmd_certify(common, c_window, c_samples, c_sigma, c_beta, c_b0, c_out);
    if (solve->parsed())
      return cmd_solve(common, s_ic, s_n, s_len, s_dt, s_tmax, s_snap, s_jets, s_out);
    if (sff->parsed())
      return cmd_sff(common, f_prop, f_range, f_n, f_eta, f_sigma, f_beta, f_sign,
                     f_mu, f_m1, f_m2, f_b0, f_anchor, f_out);
    Window w;
    const bool have_window = !i_window.empty();
    if (immerse->parsed()) {
      if (!have_window && i_kink) w = Window{0.25, 1.45, 0.25, 1.05};
      else w = parse_window(i_window);
      return cmd_immerse(common, w, have_window, i_length, i_n, i_preset_exact,
                         i_solution, i_kink, i_sigma, i_beta, i_ndg, i_out,
                         i_metrics, false, "");
    }
    if (linprob->parsed()) {
      if (!have_window && i_kink) w = Window{0.25, 1.45, 0.25, 1.05};
      else w = parse_window(i_window);
      return cmd_immerse(common, w, have_window, i_length, i_n, i_preset_exact,
                         i_solution, i_kink, i_sigma, i_beta, i_ndg, "", "",
                         true, i_holonomy);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
