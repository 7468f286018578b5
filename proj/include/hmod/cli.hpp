#pragma once

// Command-line front end. Exit codes: 0 pass/solved, 1 predicate false or
// unsolvable, 2 usage or I/O error.

#include "hmod/io.hpp"
#include "hmod/verify.hpp"

#include <CLI11.hpp>

#include <iomanip>
#include <optional>
#include <ostream>

namespace hmod::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFalse = 1;
inline constexpr int kExitUsage = 2;

namespace detail {

struct Options {
  std::string in, t, l, k, frame, frame2, out, witness, report, suite = "all", mode = "sum";
  double tol = default_tolerance();
  std::uint64_t seed = 0;
  int count = 1;
};

inline std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

inline void require(const std::string& value, const char* flag) {
  if (value.empty()) throw CLI::RequiredError(flag);
}

inline void maybe_save_report(const Options& o, const VerificationReport& r) {
  if (!o.report.empty()) io::write_text(o.report, io::dump(io::reports_to_json({r})));
}

inline int from_verdict(Verdict v) { return v == Verdict::pass ? kExitPass : kExitFalse; }

inline void save_witness(const Options& o, const std::optional<ModuleVector>& w) {
  if (!o.witness.empty() && w) io::save(o.witness, *w);
}

inline int pinv(const Options& o, std::ostream& out) {
  require(o.in, "--in");
  const ModuleOperator t = io::load<ModuleOperator>(o.in);
  const ModuleOperator g = pseudoinverse(t);
  VerificationReport r = mp_conditions_report(t, g, o.tol);
  if (!o.out.empty()) io::save(o.out, g);
  maybe_save_report(o, r);
  double worst = 0;
  for (const auto& [_, v] : r.residuals) worst = std::max(worst, v);
  out << "pinv: " << to_string(r.verdict) << " max_residual=" << fmt(worst) << "\n";
  return from_verdict(r.verdict);
}

inline int douglas(const Options& o, std::ostream& out, std::ostream& err) {
  require(o.t, "--T");
  require(o.l, "--L");
  const ModuleOperator t = io::load<ModuleOperator>(o.t), l = io::load<ModuleOperator>(o.l);
  try {
    const DouglasSolution s = douglas_solve(t, l, o.tol);
    if (!o.out.empty()) io::save(o.out, s.factor);
    out << "douglas: solved alpha=" << fmt(s.majorization_constant) << " residual=" << fmt(s.residual) << "\n";
    return kExitPass;
  } catch (const UnsolvableError& e) {
    if (!o.witness.empty()) {
      io::write_text(o.witness, io::dump({{"column", e.column()},
                                          {"residual", range_inclusion_residual(t, l, o.tol).residual}}));
    }
    out << "douglas: unsolvable\n";
    err << "range inclusion fails at column " << e.column() << "\n";
    return kExitFalse;
  }
}

inline int range_sum(const Options& o, std::ostream& out) {
  require(o.t, "--T");
  require(o.l, "--L");
  const ModuleOperator t = io::load<ModuleOperator>(o.t), l = io::load<ModuleOperator>(o.l);
  const VerificationReport r = range_sum_check(t, l, o.tol < 1e-8 ? 1e-8 : o.tol);
  if (!o.out.empty()) io::save(o.out, range_sum_root(t, l));
  maybe_save_report(o, r);
  out << "range-sum: " << to_string(r.verdict) << "\n";
  return from_verdict(r.verdict);
}

inline int kframe(const Options& o, std::ostream& out, std::ostream& err) {
  require(o.frame, "--frame");
  require(o.k, "--K");
  const FrameSystem f = io::load<FrameSystem>(o.frame);
  const ModuleOperator k = io::load<ModuleOperator>(o.k);
  const KFrameResult r = kframe_check(f, k, o.tol);
  if (r.success) {
    out << "kframe-check: pass lower=" << fmt(r.bounds.lower) << " upper=" << fmt(r.bounds.upper) << "\n";
    return kExitPass;
  }
  save_witness(o, r.witness);
  out << "kframe-check: fail\n";
  err << "no positive lower bound; " << (r.witness ? "witness vector written" : "no witness") << "\n";
  return kExitFalse;
}

inline int atomic(const Options& o, std::ostream& out, std::ostream& err) {
  require(o.frame, "--frame");
  require(o.k, "--K");
  const FrameSystem f = io::load<FrameSystem>(o.frame);
  const ModuleOperator k = io::load<ModuleOperator>(o.k);
  const AtomicResult r = atomic_system_check(f, k, o.tol, o.seed);
  if (r.success) {
    if (!o.out.empty()) io::save(o.out, r.certificate->coefficient_map);
    out << "atomic-check: pass bound=" << fmt(r.certificate->bound) << "\n";
    return kExitPass;
  }
  save_witness(o, r.witness);
  out << "atomic-check: fail\n";
  err << "range inclusion fails at column " << r.column << "\n";
  return kExitFalse;
}

inline int frame_bounds_cmd(const Options& o, std::ostream& out) {
  require(o.frame, "--frame");
  const FrameSystem f = io::load<FrameSystem>(o.frame);
  const FrameBounds b = frame_bounds(f, o.tol);
  if (!o.out.empty()) {
    io::write_text(o.out, io::dump({{"lower", io::real_to_json(b.lower)},
                                    {"upper", io::real_to_json(b.upper)},
                                    {"frame", b.frame},
                                    {"tight", b.tight},
                                    {"parseval", b.parseval}}));
  }
  out << "frame-bounds: " << (b.frame ? "frame" : "not a frame") << " lower=" << fmt(b.lower)
      << " upper=" << fmt(b.upper) << (b.parseval ? " parseval" : b.tight ? " tight" : "") << "\n";
  return b.frame ? kExitPass : kExitFalse;
}

inline int sum_check(const Options& o, std::ostream& out) {
  require(o.frame, "--frame");
  require(o.frame2, "--frame2");
  require(o.k, "--K");
  const FrameSystem f = io::load<FrameSystem>(o.frame), g = io::load<FrameSystem>(o.frame2);
  const ModuleOperator k = io::load<ModuleOperator>(o.k);
  VerificationReport r;
  if (o.mode == "sum") {
    r = sum_kframe_check(f, g, k, o.tol);
  } else if (o.mode == "parseval") {
    r = parseval_orthogonal_sum_check(f, g, k, o.tol);
  } else {
    throw CLI::ValidationError("--mode", "expected sum or parseval");
  }
  maybe_save_report(o, r);
  out << "sum-check: " << to_string(r.verdict) << "\n";
  return from_verdict(r.verdict);
}

inline int verify(const Options& o, std::ostream& out) {
  const std::vector<std::string> tags = verify::parse_suite(o.suite);
  const auto reports = verify::verify_suite(tags, o.seed, o.count);
  if (!o.report.empty()) io::write_text(o.report, io::dump(io::reports_to_json(reports)));
  std::size_t pass = 0, fail = 0, skipped = 0;
  for (const auto& r : reports) {
    if (r.verdict == Verdict::pass) ++pass;
    else if (r.verdict == Verdict::fail) ++fail;
    else ++skipped;
  }
  out << "verify: " << reports.size() << " entries, " << pass << " pass, " << fail << " fail, " << skipped
      << " hypotheses-not-met\n";
  return fail == 0 ? kExitPass : kExitFalse;
}

}  // namespace detail

/// Runs one command; `args` excludes the program name.
inline int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  detail::Options o;
  CLI::App app{"Numerical toolkit for operators and K-frames on finite Hilbert modules", "hmod"};
  app.require_subcommand(1);

  auto add_tol = [&](CLI::App* s) { s->add_option("--tol", o.tol, "Tolerance (default from MF_DEFAULT_TOL or 1e-9)")->check(CLI::PositiveNumber); };

  CLI::App* pinv = app.add_subcommand("pinv", "Moore-Penrose inverse with condition report");
  pinv->add_option("--in", o.in, "Operator JSON");
  pinv->add_option("--out", o.out, "Write the inverse here");
  pinv->add_option("--report", o.report, "Write the report here");
  add_tol(pinv);

  CLI::App* doug = app.add_subcommand("douglas", "Solve T = L U");
  doug->add_option("--T", o.t, "Operator T");
  doug->add_option("--L", o.l, "Operator L");
  doug->add_option("--out", o.out, "Write U here");
  doug->add_option("--witness", o.witness, "Write the failing column here");
  add_tol(doug);

  CLI::App* rs = app.add_subcommand("range-sum", "Check Ran[T L] = Ran sqrt(TT* + LL*)");
  rs->add_option("--T", o.t, "Operator T");
  rs->add_option("--L", o.l, "Operator L");
  rs->add_option("--out", o.out, "Write the square root here");
  rs->add_option("--report", o.report, "Write the report here");
  add_tol(rs);

  CLI::App* kf = app.add_subcommand("kframe-check", "Optimal K-frame bounds");
  kf->add_option("--frame", o.frame, "Frame JSON");
  kf->add_option("--K", o.k, "Operator K");
  kf->add_option("--witness", o.witness, "Write a failing vector here");
  add_tol(kf);

  CLI::App* at = app.add_subcommand("atomic-check", "Atomic-system certificate");
  at->add_option("--frame", o.frame, "Frame JSON");
  at->add_option("--K", o.k, "Operator K");
  at->add_option("--out", o.out, "Write the coefficient map here");
  at->add_option("--witness", o.witness, "Write a refuting vector here");
  at->add_option("--seed", o.seed, "Sampling seed");
  add_tol(at);

  CLI::App* fb = app.add_subcommand("frame-bounds", "Optimal frame bounds");
  fb->add_option("--frame", o.frame, "Frame JSON");
  fb->add_option("--out", o.out, "Write bounds JSON here");
  add_tol(fb);

  CLI::App* sc = app.add_subcommand("sum-check", "Sum of two K-frames");
  sc->add_option("--frame", o.frame, "First frame");
  sc->add_option("--frame2,--G", o.frame2, "Second frame");
  sc->add_option("--K", o.k, "Operator K");
  sc->add_option("--mode", o.mode, "sum or parseval")->check(CLI::IsMember({"sum", "parseval"}));
  sc->add_option("--report", o.report, "Write the report here");
  add_tol(sc);

  CLI::App* ver = app.add_subcommand("verify", "Run the theorem-verification suite");
  ver->add_option("--suite", o.suite, "'all' or comma-separated tags");
  ver->add_option("--seed", o.seed, "Master seed");
  ver->add_option("--count", o.count, "Instances per tag")->check(CLI::PositiveNumber);
  ver->add_option("--report", o.report, "Write the report here");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
    if (pinv->parsed()) return detail::pinv(o, out);
    if (doug->parsed()) return detail::douglas(o, out, err);
    if (rs->parsed()) return detail::range_sum(o, out);
    if (kf->parsed()) return detail::kframe(o, out, err);
    if (at->parsed()) return detail::atomic(o, out, err);
    if (fb->parsed()) return detail::frame_bounds_cmd(o, out);
    if (sc->parsed()) return detail::sum_check(o, out);
    if (ver->parsed()) return detail::verify(o, out);
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  } catch (const io::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const io::IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ShapeError& e) {
    err << "shape error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace hmod::cli
