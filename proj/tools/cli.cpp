#include "cli.hpp"

#include "thorin/analysis.hpp"
#include "thorin/errors.hpp"
#include "thorin/levy.hpp"
#include "thorin/model_io.hpp"
#include "thorin/simulate.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace thorin::cli {

namespace {

using model_io::json;

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json num(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

std::vector<double> parse_grid(const std::string& spec) {
  const auto a = spec.find(':');
  const auto b = a == std::string::npos ? a : spec.find(':', a + 1);
  if (b == std::string::npos) throw ParameterError("grid must read lo:hi:n");
  double lo = 0.0, hi = 0.0;
  long long n = 0;
  try {
    std::size_t used = 0;
    lo = std::stod(spec.substr(0, a), &used);
    if (used != a) throw std::invalid_argument("lo");
    const std::string hs = spec.substr(a + 1, b - a - 1);
    hi = std::stod(hs, &used);
    if (used != hs.size()) throw std::invalid_argument("hi");
    const std::string ns = spec.substr(b + 1);
    n = std::stoll(ns, &used);
    if (used != ns.size()) throw std::invalid_argument("n");
  } catch (const std::exception&) {
    throw ParameterError("grid must read lo:hi:n with numbers lo, hi and a count n");
  }
  if (n < 1 || !(hi >= lo)) throw ParameterError("grid needs n >= 1 and hi >= lo");
  std::vector<double> x(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) x[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return x;
}

const catalog::Model& need_model(const model_io::Document& d) {
  if (!d.model) throw PreconditionError("thorin_triplet_required", "this command needs a family or triplet document");
  return *d.model;
}

json report_json(const catalog::Model& m) {
  const auto& t = m.triplet;
  const auto r = analysis::report(t);
  json j;
  j["model"] = model_io::to_json(m);
  j["model_hash"] = simulate::model_hash_hex(m);
  j["bg_index"] = num(r.bg.value);
  j["bg_method"] = r.bg.method;
  j["gaussian"] = r.bg.gaussian;
  const bool fv = t.gaussian_var == 0.0 &&
                  (t.tau_plus.empty() || measure::moment_integral(t.tau_plus, 1.0, measure::Region::outer).finite) &&
                  (t.tau_minus.empty() || measure::moment_integral(t.tau_minus, 1.0, measure::Region::outer).finite);
  j["variation"] = fv ? "finite" : "infinite";
  j["activity_zeta"] = r.zeta ? num(*r.zeta) : json(nullptr);
  j["cumulants"] = json::array();
  for (std::size_t n = 0; n < r.cumulants.size(); ++n) {
    const auto& c = r.cumulants[n];
    j["cumulants"].push_back({{"order", n + 1}, {"exists", c.exists}, {"value", c.exists ? num(c.value) : json(nullptr)}});
  }
  j["critical_exp"] = num(std::min(r.critical.gamma_plus, r.critical.gamma_minus));
  j["critical_exponents"] = {{"plus", num(r.critical.gamma_plus)},
                             {"minus", num(r.critical.gamma_minus)},
                             {"mgf_plus", r.critical.mgf_plus},
                             {"mgf_minus", r.critical.mgf_minus}};
  j["analytic"] = r.critical.analytic;
  j["entire"] = r.critical.entire;
  j["analyticity_strip"] = {{"lower", num(r.strip.lower)},
                            {"upper", num(r.strip.upper)},
                            {"lower_closed", r.strip.lower_closed},
                            {"upper_closed", r.strip.upper_closed}};
  const auto verdict = [](analysis::Verdict v) -> json {
    if (v == analysis::Verdict::unknown) return "unknown";
    return v == analysis::Verdict::yes;
  };
  j["convolution_equiv"] = verdict(r.ce.overall);
  const auto side = [&](const analysis::CeSide& s) {
    return json{{"verdict", verdict(s.verdict)}, {"gamma", num(s.gamma)}, {"reason", s.reason}};
  };
  j["convolution_equiv_sides"] = {{"plus", side(r.ce.plus)}, {"minus", side(r.ce.minus)}};
  j["regularity"] = {{"label", r.regularity.label},
                     {"smooth", r.regularity.smooth},
                     {"order", r.regularity.order},
                     {"continuous_except_b_star", r.regularity.continuous_except_b_star},
                     {"b_star", r.regularity.b_star ? num(*r.regularity.b_star) : json(nullptr)},
                     {"unimodal", r.regularity.unimodal}};
  return j;
}

void eval(const std::string& what, const catalog::Model& m, const std::vector<double>& grid, double t_len,
          std::ostream& out) {
  if (!(t_len > 0.0)) throw ParameterError("--t must be positive");
  if (what == "psi") {
    out << "x,value,im_value\n";
    for (double z : grid) {
      const auto v = exponent::char_exponent(m.triplet, z) * t_len;
      out << g17(z) << ',' << g17(v.real()) << ',' << g17(v.imag()) << '\n';
    }
  } else if (what == "k") {
    const levy::LevyView view(m.triplet);
    out << "x,value\n";
    for (double x : grid) out << g17(x) << ',' << g17(x == 0.0 ? NAN : t_len * levy::canonical_function(view, x)) << '\n';
  } else if (what == "pdf") {
    auto g = analysis::pdf(m.triplet, t_len);
    const double last = g.x.back();
    if (grid.front() < g.x.front() || grid.back() > last) {
      // widen the window to the requested grid, keeping the resolution request explicit
      analysis::FftOptions opt;
      opt.lo = std::min(g.x.front(), grid.front() - 1e-9 * std::max(1.0, std::abs(grid.front())));
      opt.hi = std::max(last, grid.back() + 1e-9 * std::max(1.0, std::abs(grid.back()))) + g.dx;
      g = analysis::pdf(m.triplet, t_len, opt);
    }
    out << "x,value\n";
    for (double x : grid) out << g17(x) << ',' << g17(analysis::density_at(g, x)) << '\n';
  } else {
    throw ParameterError("eval needs psi, k or pdf");
  }
}

json validate_json(const model_io::Document& d) {
  json j{{"valid", true}};
  if (d.canonical) {
    const auto cm = levy::complete_monotonicity(d.canonical->k, levy::default_cm_starts());
    j["complete_monotonicity"] = {{"passed", cm.passed}, {"grids_checked", cm.grids_checked}};
    if (!cm.passed) {
      std::ostringstream msg;
      msg << "k is not a Laplace transform: (-1)^n times the order-" << cm.witness->order << " difference on grid x0 = "
          << g17(cm.witness->grid.front()) << " is " << g17(cm.witness->difference);
      throw PreconditionError("complete_monotonicity", msg.str());
    }
    return j;
  }
  if (d.lgnbc) return j;
  const auto& t = d.model->triplet;
  const auto report = measure::validate_thorin(t.tau_plus, t.tau_minus);
  j["checks"] = json::array();
  for (const auto& c : report.checks)
    j["checks"].push_back({{"side", c.side}, {"condition", c.condition}, {"passed", c.passed}, {"method", c.method},
                           {"detail", c.detail}});
  const auto cm = levy::complete_monotonicity(levy::LevyView(t));
  j["complete_monotonicity"] = {{"passed", cm.passed}, {"grids_checked", cm.grids_checked}};
  if (!cm.passed) throw NumericalError("canonical function of a Thorin triplet failed the complete-monotonicity screen", 0.0);
  return j;
}

void write_doc(std::ostream& out, const model_io::Document& d) { out << model_io::to_json(d).dump(2) << '\n'; }

void report_error(std::ostream& err, bool as_json, const std::string& kind, const std::string& message, int code,
                  const json& extra = json::object()) {
  if (as_json) {
    json j{{"error", kind}, {"message", message}, {"exit_code", code}};
    j.update(extra);
    err << j.dump() << '\n';
  } else {
    err << "thorin: " << kind << ": " << message << '\n';
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Calculus engine for Thorin Levy processes", "thorin"};
  app.require_subcommand(1);
  bool quiet = false, json_errors = false;
  app.add_flag("--quiet", quiet, "Suppress informational output");
  app.add_flag("--json-errors", json_errors, "Print errors as one JSON object on stderr");

  std::string file;
  auto* report = app.add_subcommand("report", "Property report as JSON");
  report->add_option("model", file, "Model document")->required();

  std::string what, grid = "-5:5:11";
  double t_len = 1.0;
  auto* ev = app.add_subcommand("eval", "Evaluate psi, k or pdf on a grid (CSV)");
  ev->add_option("what", what, "psi | k | pdf")->required()->check(CLI::IsMember({"psi", "k", "pdf"}));
  ev->add_option("model", file, "Model document")->required();
  ev->add_option("--grid", grid, "lo:hi:n");
  ev->add_option("--t", t_len, "Time");

  auto* sub = app.add_subcommand("subordinate", "Subordination transforms");
  sub->require_subcommand(1);
  double sigma = 1.0, theta = 0.0;
  auto* sub_bm = sub->add_subcommand("brownian", "Brownian motion run on a GGC subordinator");
  sub_bm->add_option("subordinator", file, "Subordinator document")->required();
  sub_bm->add_option("--sigma", sigma, "Brownian volatility");
  sub_bm->add_option("--theta", theta, "Brownian drift");
  std::vector<double> gamma_params, bil_params;
  auto* sub_lg = sub->add_subcommand("lgnbc", "Gamma or bilateral gamma run on an LGNBC subordinator");
  sub_lg->add_option("quadruplet", file, "LGNBC document")->required();
  auto* og = sub_lg->add_option("--gamma", gamma_params, "alpha,beta")->delimiter(',')->expected(2);
  auto* ob = sub_lg->add_option("--bilgamma", bil_params, "alpha,beta_plus,beta_minus")->delimiter(',')->expected(3);
  og->excludes(ob);

  auto* inv = app.add_subcommand("invert-brownian", "Subordinator behind a Brownian-subordinated model");
  inv->add_option("model", file, "Model document")->required();
  inv->add_option("--theta", theta, "Brownian drift")->required();

  std::size_t n = 1000;
  std::uint64_t seed = 0;
  std::string out_path;
  auto* sim = app.add_subcommand("simulate", "Draws of X_t as CSV");
  sim->add_option("model", file, "Model document")->required();
  sim->add_option("--n", n, "Number of draws");
  sim->add_option("--t", t_len, "Time");
  sim->add_option("--seed", seed, "Seed");
  sim->add_option("--out", out_path, "Write to a file instead of stdout");

  auto* val = app.add_subcommand("validate", "Check a document");
  val->add_option("model", file, "Model document")->required();

  // CLI11 wants argv order reversed
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    report_error(err, json_errors, "usage", e.what(), 2);
    return 2;
  }

  try {
    const auto doc = model_io::load(file);
    if (report->parsed()) {
      out << report_json(need_model(doc)).dump(2) << '\n';
    } else if (ev->parsed()) {
      eval(what, need_model(doc), parse_grid(grid), t_len, out);
    } else if (sub_bm->parsed()) {
      const auto s = model_io::as_subordinator(need_model(doc));
      const auto t = subordinate::brownian_forward(s, {sigma, theta});
      write_doc(out, model_io::triplet_document(t, "Brownian motion (sigma " + g17(sigma) + ", theta " + g17(theta) +
                                                       ") run on a GGC subordinator"));
    } else if (sub_lg->parsed()) {
      if (!doc.lgnbc) throw PreconditionError("lgnbc_quadruplet", "subordinate lgnbc needs an lgnbc document");
      if (gamma_params.empty() == bil_params.empty()) throw ParameterError("give exactly one of --gamma, --bilgamma");
      const auto img = gamma_params.empty()
                           ? subordinate::lgnbc_sub_bilateral(*doc.lgnbc, bil_params[0], bil_params[1], bil_params[2])
                           : subordinate::lgnbc_sub_gamma(*doc.lgnbc, gamma_params[0], gamma_params[1]);
      write_doc(out, model_io::triplet_document(img.triplet, "gamma process run on an LGNBC subordinator"));
    } else if (inv->parsed()) {
      const auto s = subordinate::brownian_inverse(need_model(doc).triplet, theta);
      write_doc(out, model_io::triplet_document(subordinate::as_triplet(s), "GGC subordinator"));
    } else if (sim->parsed()) {
      const auto s = simulate::sample_increments({need_model(doc), t_len, n, seed});
      if (!quiet) {
        err << "thorin: route " << s.route;
        if (s.route == "inverse_cdf") err << ", knot spacing " << g17(s.knot_spacing) << ", tail mass " << g17(s.tail_mass);
        err << '\n';
      }
      if (out_path.empty()) {
        simulate::write_csv(out, *doc.model, s.values);
      } else {
        std::ofstream f(out_path);
        if (!f) throw ParameterError("cannot write '" + out_path + "'");
        simulate::write_csv(f, *doc.model, s.values);
      }
    } else if (val->parsed()) {
      const auto j = validate_json(doc);
      if (!quiet) out << j.dump(2) << '\n';
    }
    return 0;
  } catch (const json::parse_error& e) {
    report_error(err, json_errors, "malformed_json", "byte " + std::to_string(e.byte) + ": " + e.what(), 1,
                 {{"byte", e.byte}});
    return 1;
  } catch (const SchemaError& e) {
    report_error(err, json_errors, "schema", e.what(), 2, {{"issues", e.issues()}});
    return 2;
  } catch (const PreconditionError& e) {
    report_error(err, json_errors, "precondition", e.what(), 2, {{"condition", e.condition()}});
    return 2;
  } catch (const ParameterError& e) {
    report_error(err, json_errors, "parameter", e.what(), 2);
    return 2;
  } catch (const UnsupportedError& e) {
    report_error(err, json_errors, "unsupported", e.what(), 2);
    return 2;
  } catch (const NumericalError& e) {
    report_error(err, json_errors, "numerical", e.what() + std::string(" (achieved error ") + g17(e.achieved_error()) + ")",
                 3, {{"achieved_error", num(e.achieved_error())}});
    return 3;
  }
}

}  // namespace thorin::cli
