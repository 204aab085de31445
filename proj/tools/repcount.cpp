#include "repcount/harness/experiment.hpp"
#include "repcount/repcount.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace repcount;
using harness::Json;

namespace {

enum Exit { kOk = 0, kInput = 2, kBudget = 3, kInternal = 4 };

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

std::vector<double> parse_reals(const std::string& text) {
  std::vector<double> out;
  for (auto& t : split(text, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(t, &used));
      if (used != t.size() && t.find_first_not_of(' ', used) != std::string::npos) throw std::invalid_argument(t);
    } catch (const std::exception&) {
      throw InputError("not a number: '" + t + "'");
    }
  }
  if (out.empty()) throw InputError("empty number list");
  return out;
}

/// "a,b;c,d" row-major.
IntMatrix parse_matrix(const std::string& text) {
  auto rows = split(text, ';');
  const std::size_t n = rows.size();
  IntMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    auto cells = split(rows[i], ',');
    if (cells.size() != n) throw InputError("matrix must be square: \"" + text + "\"");
    for (std::size_t j = 0; j < n; ++j) {
      std::string c = cells[j];
      c.erase(0, c.find_first_not_of(' '));
      c.erase(c.find_last_not_of(' ') + 1);
      if (c.empty() || c.find_first_not_of("+-0123456789") != std::string::npos || c.find_first_of("0123456789") == std::string::npos)
        throw InputError("not an integer: '" + cells[j] + "'");
      if (c[0] == '+') c.erase(0, 1);
      a(i, j) = BigInt(c);
    }
  }
  return a;
}

std::string matrix_text(const IntMatrix& a) {
  std::string out;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    if (i) out += ";";
    for (std::size_t j = 0; j < a.cols(); ++j) out += (j ? "," : "") + a(i, j).str();
  }
  return out;
}

struct Common {
  std::string form, psi, gram, box, format = "text", out;
  std::size_t s = 0;
  int m = 0;
  unsigned threads = 1;
  double max_candidates = 1e8;
  std::optional<std::uint64_t> seed;

  Form parsed_form() const {
    if (form.empty()) throw InputError("--form is required");
    return parse_form(form, s ? s : harness::infer_variable_count(form));
  }
  int blocks() const {
    if (m > 0) return m;
    if (!gram.empty()) return static_cast<int>(parse_matrix(gram).rows());
    throw InputError("--m is required");
  }
  TargetForm target() const {
    if (!gram.empty() && !psi.empty()) throw InputError("give either --psi or --gram, not both");
    if (!gram.empty()) return TargetForm::from_gram(parse_matrix(gram));
    if (psi.empty()) throw InputError("--psi or --gram is required");
    return parse_psi(psi, blocks());
  }
  Box parsed_box(int mm) const {
    if (box.empty()) throw InputError("--box is required");
    auto v = parse_reals(box);
    if (v.size() == 1) v.assign(mm, v[0]);
    if (static_cast<int>(v.size()) != mm) throw InputError("--box needs 1 or m values");
    return Box(v);
  }
  std::uint64_t required_seed() const {
    if (!seed) throw InputError("--seed is required for randomized commands");
    return *seed;
  }
  std::ostream& sink(std::ofstream& file) const {
    if (out.empty()) return std::cout;
    file.open(out);
    if (!file) throw InputError("cannot open output file " + out);
    return file;
  }
};

void add_form(CLI::App* c, Common& o) {
  c->add_option("--form", o.form, "form, e.g. \"x1^2 + x2^2\"");
  c->add_option("--s", o.s, "number of variables (default: largest index in --form)");
}
void add_target(CLI::App* c, Common& o) {
  c->add_option("--psi", o.psi, "target coefficients, e.g. 11:2,12:1,22:2");
  c->add_option("--gram", o.gram, "target as a Gram matrix \"b11,b12;b21,b22\"");
  c->add_option("--m", o.m, "number of parameters m");
}
void add_runtime(CLI::App* c, Common& o) {
  c->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
  c->add_option("--max-candidates", o.max_candidates, "enumeration limit");
}
void add_format(CLI::App* c, Common& o, const std::vector<std::string>& allowed) {
  c->add_option("--format", o.format, "output format")->check(CLI::IsMember(allowed));
  c->add_option("--out", o.out, "output file (default stdout)");
}

Json estimate_json(const DensityEstimate& d) {
  Json j;
  j["value"] = d.value;
  j["method"] = to_string(d.method);
  j["level"] = d.level;
  j["eps"] = d.eps;
  j["samples"] = d.samples;
  j["stderr"] = d.std_error;
  if (d.exact) j["exact"] = d.exact->str();
  return j;
}

void emit(const Common& o, const Json& j, const std::vector<std::pair<std::string, std::string>>& fields) {
  std::ofstream file;
  std::ostream& out = o.sink(file);
  if (o.format == "json") {
    out << j.dump(2) << "\n";
  } else if (o.format == "csv") {
    std::vector<std::string> h, v;
    for (auto& [k, val] : fields) {
      h.push_back(k);
      v.push_back(val);
    }
    harness::write_csv_row(out, h);
    harness::write_csv_row(out, v);
  } else {
    for (auto& [k, val] : fields) out << k << ": " << val << "\n";
  }
}

std::string num(double v) { return harness::format_double(v); }

int run(int argc, char** argv) {
  CLI::App app{"Identical representations of forms: exact counts and circle-method predictions"};
  app.require_subcommand(1);
  Common o;

  auto* expand = app.add_subcommand("expand", "print the coefficient polynomials Phi_j");
  add_form(expand, o);
  expand->add_option("--m", o.m, "number of parameters")->required();
  add_format(expand, o, {"text", "json"});

  auto* analyze = app.add_subcommand("analyze-psi", "magnitude, eccentricity, pseudo-diagonality");
  add_target(analyze, o);
  add_form(analyze, o);
  long long dim_sing = -1;
  analyze->add_option("--dim-sing", dim_sing, "dim sing F for the hypothesis check (exact for quadratics if omitted)");
  add_format(analyze, o, {"text", "json", "csv"});

  auto* count = app.add_subcommand("count", "N(F; psi) for positive definite F");
  add_form(count, o);
  add_target(count, o);
  add_runtime(count, o);
  std::string record_path;
  count->add_option("--record", record_path, "write a result record (JSON) here");

  auto* boxed = app.add_subcommand("count-boxed", "solutions with x_i in [-P_i, P_i]^s");
  add_form(boxed, o);
  add_target(boxed, o);
  boxed->add_option("--box", o.box, "P or P_1,...,P_m")->required();
  add_runtime(boxed, o);
  boxed->add_option("--record", record_path, "write a result record (JSON) here");

  auto* lattice = app.add_subcommand("count-lattice", "N_C(P): X in Z^{s x m} C of height <= P with F(Xt) = 0");
  add_form(lattice, o);
  std::string matrix;
  double height = 0;
  lattice->add_option("--matrix", matrix, "C as \"c11,c12;c21,c22\"")->required();
  lattice->add_option("--P", height, "height bound")->required();
  add_runtime(lattice, o);
  lattice->add_option("--record", record_path, "write a result record (JSON) here");

  auto* snf = app.add_subcommand("snf", "Smith normal form U C V = D");
  snf->add_option("--matrix", matrix, "C as \"c11,c12;c21,c22\"")->required();
  add_format(snf, o, {"text", "json", "csv"});

  auto* arcs = app.add_subcommand("arcs", "|T(alpha)| and arc classification on a grid");
  add_form(arcs, o);
  arcs->add_option("--m", o.m, "number of parameters")->required();
  arcs->add_option("--box", o.box, "P or P_1,...,P_m")->required();
  int grid = 4;
  ArcParams params;
  std::optional<double> arc_p;
  arcs->add_option("--grid", grid, "grid points per coordinate")->check(CLI::PositiveNumber);
  arcs->add_option("--theta", params.theta, "theta in (0, 1]");
  arcs->add_option("--c", params.c, "arc width constant");
  arcs->add_option("--P", arc_p, "scale P (default: largest box bound)");
  add_runtime(arcs, o);
  add_format(arcs, o, {"csv", "json"});

  auto* chip = app.add_subcommand("chi-p", "p-adic density chi_p");
  add_form(chip, o);
  add_target(chip, o);
  std::int64_t prime = 2;
  int level = 1;
  std::uint64_t samples = 0;
  chip->add_option("--p", prime, "prime")->required();
  chip->add_option("--l", level, "level l");
  chip->add_option("--samples", samples, "sample instead of counting exactly");
  chip->add_option("--seed", o.seed, "seed (required with --samples)");
  add_runtime(chip, o);
  add_format(chip, o, {"text", "json", "csv"});

  auto* chiinf = app.add_subcommand("chi-inf", "real density by slab Monte Carlo");
  add_form(chiinf, o);
  add_target(chiinf, o);
  double eps = 0.05;
  std::uint64_t slab_samples = 1000000;
  chiinf->add_option("--eps", eps, "slab half-width");
  chiinf->add_option("--samples", slab_samples, "samples");
  chiinf->add_option("--seed", o.seed, "seed")->required();
  bool half = false;
  chiinf->add_flag("--check-half-eps", half, "also estimate at eps/2");
  add_runtime(chiinf, o);
  add_format(chiinf, o, {"text", "json", "csv"});

  auto* series = app.add_subcommand("series", "truncated singular series");
  add_form(series, o);
  add_target(series, o);
  int q_max = 4;
  series->add_option("--qmax", q_max, "largest modulus")->required();
  add_runtime(series, o);
  add_format(series, o, {"text", "json", "csv"});

  auto* main_cmd = app.add_subcommand("main-term", "<psi>^{(ms-rd)/(md)} chi_inf prod chi_p");
  add_form(main_cmd, o);
  add_target(main_cmd, o);
  DensityConfig cfg;
  main_cmd->add_option("--p-max", cfg.p_max, "largest prime in the Euler product");
  main_cmd->add_option("--eps", cfg.eps, "slab half-width");
  main_cmd->add_option("--samples", cfg.samples, "slab samples");
  main_cmd->add_option("--seed", o.seed, "seed")->required();
  main_cmd->add_flag("--check-half-eps", cfg.check_half_eps, "also estimate chi_inf at eps/2");
  add_runtime(main_cmd, o);
  add_format(main_cmd, o, {"text", "json", "csv"});

  auto* verify = app.add_subcommand("verify", "exact counts versus predictions over a family");
  std::string spec_path;
  verify->add_option("--spec", spec_path, "experiment spec (JSON)")->required();
  add_runtime(verify, o);
  add_format(verify, o, {"csv", "json"});

  auto* weyl = app.add_subcommand("weyl-check", "Cauchy-Schwarz step of Weyl differencing");
  add_form(weyl, o);
  weyl->add_option("--m", o.m, "number of parameters")->required();
  weyl->add_option("--box", o.box, "P or P_1,...,P_m")->required();
  std::string alpha_text;
  int block = 1;
  weyl->add_option("--alpha", alpha_text, "alpha_1,...,alpha_r")->required();
  weyl->add_option("--block", block, "differenced block (1-based)");
  add_runtime(weyl, o);
  add_format(weyl, o, {"text", "json", "csv"});

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  if (expand->parsed()) {
    const Form f = o.parsed_form();
    const auto sys = expand_system(f, o.m);
    std::ofstream file;
    std::ostream& out = o.sink(file);
    if (o.format == "json") {
      Json j;
      j["form"] = to_string(f);
      j["m"] = o.m;
      for (std::size_t k = 0; k < sys.r(); ++k) j["phi"][to_string(sys.indices()[k])] = to_string(sys.polys()[k]);
      out << j.dump(2) << "\n";
    } else {
      for (std::size_t k = 0; k < sys.r(); ++k)
        out << "Phi_" << to_string(sys.indices()[k]) << " = " << to_string(sys.polys()[k]) << "\n";
    }
    return kOk;
  }

  if (analyze->parsed()) {
    const TargetForm psi = o.target();
    const auto prof = analyze_psi(psi);
    Json j;
    std::vector<std::pair<std::string, std::string>> f;
    j["magnitude"] = prof.magnitude.str();
    f.emplace_back("magnitude", prof.magnitude.str());
    j["eccentricity"] = prof.eccentricity ? Json(*prof.eccentricity) : Json(nullptr);
    f.emplace_back("eccentricity", prof.eccentricity ? num(*prof.eccentricity) : "undefined");
    j["pseudo_diagonal"] = prof.pseudo_diagonal;
    f.emplace_back("pseudo_diagonal", prof.pseudo_diagonal ? "true" : "false");
    for (auto& [idx, v] : prof.normalized) {
      j["normalized"][to_string(idx)] = v;
      f.emplace_back("normalized_" + to_string(idx), num(v));
    }
    if (!o.form.empty()) {
      const Form form = o.parsed_form();
      if (dim_sing < 0) {
        if (form.d() != 2) throw InputError("--dim-sing is required for forms of degree >= 3");
        dim_sing = static_cast<long long>(quadratic_singular_dim(form));
      }
      const auto h = check_hypotheses(form, psi, dim_sing);
      j["hypothesis"] = {{"lhs", h.lhs}, {"rhs", h.rhs}, {"satisfied", h.satisfied}};
      f.emplace_back("hypothesis_lhs", std::to_string(h.lhs));
      f.emplace_back("hypothesis_rhs", num(h.rhs));
      f.emplace_back("hypothesis_satisfied", h.satisfied ? "true" : "false");
    }
    emit(o, j, f);
    return kOk;
  }

  auto write_record = [&](const Form& f, const std::string& what, const std::string& params, Count n) {
    if (record_path.empty()) return;
    harness::ResultRecord rec;
    rec.digest = harness::sha256_hex("repcount-" + what + "-v1\nform=" + to_string(f) + "\n" + params);
    rec.label = what;
    rec.psi = params;
    rec.exact_count = n;
    std::ofstream file(record_path);
    if (!file) throw InputError("cannot open record file " + record_path);
    file << rec.to_json().dump(2) << "\n";
  };

  if (count->parsed()) {
    const Form f = o.parsed_form();
    const TargetForm psi = o.target();
    const Count n = count_representations(f, psi, EnumerationOptions{o.threads, o.max_candidates});
    std::cout << n << "\n";
    write_record(f, "count", "psi=" + to_string(psi), n);
    return kOk;
  }

  if (boxed->parsed()) {
    const Form f = o.parsed_form();
    const TargetForm psi = o.target();
    const Box b = o.parsed_box(psi.m());
    const Count n = count_boxed(f, psi, b, EnumerationOptions{o.threads, o.max_candidates});
    std::cout << n << "\n";
    write_record(f, "count-boxed", "psi=" + to_string(psi) + "\nbox=" + o.box, n);
    return kOk;
  }

  if (lattice->parsed()) {
    const Form f = o.parsed_form();
    const IntMatrix c = parse_matrix(matrix);
    const Count n = count_lattice(f, c, height, EnumerationOptions{o.threads, o.max_candidates});
    std::cout << n << "\n";
    write_record(f, "count-lattice", "C=" + matrix_text(c) + "\nP=" + num(height), n);
    return kOk;
  }

  if (snf->parsed()) {
    const auto res = smith_normal_form(parse_matrix(matrix));
    Json j;
    j["U"] = matrix_text(res.U);
    j["V"] = matrix_text(res.V);
    j["D"] = matrix_text(res.D);
    std::string inv;
    for (auto& g : res.invariants()) inv += (inv.empty() ? "" : ",") + g.str();
    j["invariants"] = inv;
    emit(o, j, {{"U", matrix_text(res.U)}, {"V", matrix_text(res.V)}, {"D", matrix_text(res.D)}, {"invariants", inv}});
    return kOk;
  }

  if (arcs->parsed()) {
    if (o.format == "text") o.format = "csv";
    const Form f = o.parsed_form();
    const auto sys = expand_system(f, o.m);
    const Box b = o.parsed_box(o.m);
    params.d = f.d();
    params.P = arc_p ? *arc_p : *std::max_element(b.bounds.begin(), b.bounds.end());
    const std::size_t r = sys.r();
    const double points = std::pow(static_cast<double>(grid), static_cast<double>(r));
    if (points * b.lattice_points(sys.s()) * static_cast<double>(r) > o.max_candidates)
      throw BudgetExceeded("arc grid exceeds the evaluation limit", points * b.lattice_points(sys.s()));
    std::ofstream file;
    std::ostream& out = o.sink(file);
    std::vector<std::string> header;
    for (std::size_t j = 0; j < r; ++j) header.push_back("alpha_" + to_string(sys.indices()[j]));
    for (auto h : {"abs_T", "class", "q"}) header.push_back(h);
    Json rows = Json::array();
    if (o.format == "csv") harness::write_csv_row(out, header);
    std::vector<int> idx(r, 0);
    for (;;) {
      std::vector<double> alpha(r);
      for (std::size_t j = 0; j < r; ++j) alpha[j] = static_cast<double>(idx[j]) / grid;
      const double mag = std::abs(exponential_sum(sys, alpha, b, SumOptions{o.threads, o.max_candidates}));
      const auto cls = classify_arc(alpha, params);
      std::vector<std::string> row;
      for (double a : alpha) row.push_back(num(a));
      row.push_back(num(mag));
      row.push_back(cls.major ? "major" : "minor");
      row.push_back(cls.major ? std::to_string(cls.point.homogenized->q) : "");
      if (o.format == "csv") {
        harness::write_csv_row(out, row);
      } else {
        Json jr;
        for (std::size_t k = 0; k < header.size(); ++k) jr[header[k]] = row[k];
        rows.push_back(jr);
      }
      std::size_t k = r;
      while (k > 0 && idx[k - 1] == grid - 1) idx[--k] = 0;
      if (k == 0) break;
      ++idx[k - 1];
    }
    if (o.format == "json") out << Json{{"schema_version", harness::kSchemaVersion}, {"rows", rows}}.dump(2) << "\n";
    return kOk;
  }

  if (chip->parsed()) {
    const Form f = o.parsed_form();
    const TargetForm psi = o.target();
    const auto sys = expand_system(f, psi.m());
    const LocalOptions lo{o.threads, o.max_candidates};
    const DensityEstimate d = samples ? chi_p_sampled(sys, psi, prime, level, samples, o.required_seed(), lo)
                                      : chi_p_exact(sys, psi, prime, level, lo);
    std::vector<std::pair<std::string, std::string>> fields{
        {"p", std::to_string(prime)}, {"l", std::to_string(level)}, {"chi_p", num(d.value)},
        {"method", to_string(d.method)}, {"stderr", num(d.std_error)}};
    if (d.exact) fields.emplace_back("exact", d.exact->str());
    Json j = estimate_json(d);
    j["p"] = prime;
    emit(o, j, fields);
    return kOk;
  }

  if (chiinf->parsed()) {
    const Form f = o.parsed_form();
    const TargetForm psi = o.target();
    const auto sys = expand_system(f, psi.m());
    const auto nt = normalized_targets(sys, psi);
    const std::uint64_t seed = o.required_seed();
    const auto d = chi_inf_slab(sys, nt, eps, slab_samples, seed, SlabOptions{o.threads});
    Json j;
    j["chi_inf"] = estimate_json(d);
    std::vector<std::pair<std::string, std::string>> fields{
        {"chi_inf", num(d.value)}, {"stderr", num(d.std_error)}, {"eps", num(eps)}, {"samples", std::to_string(slab_samples)}};
    if (half) {
      const auto h = chi_inf_slab(sys, nt, eps / 2, slab_samples, seed + 1, SlabOptions{o.threads});
      j["chi_inf_half_eps"] = estimate_json(h);
      fields.emplace_back("chi_inf_half_eps", num(h.value));
      fields.emplace_back("stderr_half_eps", num(h.std_error));
    }
    emit(o, j, fields);
    return kOk;
  }

  if (series->parsed()) {
    const Form f = o.parsed_form();
    const TargetForm psi = o.target();
    const auto sys = expand_system(f, psi.m());
    const auto d = singular_series_truncated(sys, psi, q_max, LocalOptions{o.threads, o.max_candidates});
    emit(o, estimate_json(d), {{"series", num(d.value)}, {"q_max", std::to_string(q_max)}});
    return kOk;
  }

  if (main_cmd->parsed()) {
    const Form f = o.parsed_form();
    const TargetForm psi = o.target();
    cfg.seed = o.required_seed();
    cfg.threads = o.threads;
    cfg.max_evaluations = o.max_candidates;
    const auto rep = main_term(f, psi, cfg);
    Json j;
    j["magnitude_factor"] = rep.magnitude_factor;
    j["boxed_factor"] = rep.boxed_factor;
    j["chi_inf"] = estimate_json(rep.chi_inf);
    if (rep.chi_inf_half) j["chi_inf_half_eps"] = estimate_json(*rep.chi_inf_half);
    j["euler_product"] = estimate_json(rep.euler.total);
    j["local_obstruction"] = rep.euler.local_obstruction;
    for (auto& [p, d] : rep.euler.factors) j["chi_p"][std::to_string(p)] = estimate_json(d);
    j["prediction"] = rep.prediction;
    j["prediction_stderr"] = rep.prediction_std_error;
    std::vector<std::pair<std::string, std::string>> fields{
        {"magnitude_factor", num(rep.magnitude_factor)}, {"chi_inf", num(rep.chi_inf.value)},
        {"chi_inf_stderr", num(rep.chi_inf.std_error)}, {"euler_product", num(rep.euler.total.value)},
        {"local_obstruction", rep.euler.local_obstruction ? "true" : "false"},
        {"prediction", num(rep.prediction)}, {"prediction_stderr", num(rep.prediction_std_error)}};
    emit(o, j, fields);
    return kOk;
  }

  if (verify->parsed()) {
    auto spec = harness::ExperimentSpec::from_file(spec_path);
    spec.density.threads = o.threads;
    const auto rows = harness::run_experiment(spec, harness::ResultCache::from_environment());
    if (spec.csv_path) {
      std::ofstream f(*spec.csv_path, std::ios::binary);
      harness::write_records_csv(f, rows);
    }
    if (spec.json_path) std::ofstream(*spec.json_path) << harness::records_json(rows).dump(2) << "\n";
    std::ofstream file;
    std::ostream& out = o.sink(file);
    if (o.format == "json") out << harness::records_json(rows).dump(2) << "\n";
    else harness::write_records_csv(out, rows);
    return kOk;
  }

  if (weyl->parsed()) {
    const Form f = o.parsed_form();
    const auto sys = expand_system(f, o.m);
    const auto alpha = parse_reals(alpha_text);
    const auto res = weyl_cs_check(sys, alpha, o.parsed_box(o.m), block - 1, SumOptions{o.threads, o.max_candidates});
    Json j{{"lhs_squared", res.lhs_squared}, {"rhs_bound", res.rhs_bound}, {"holds", res.holds}};
    emit(o, j, {{"lhs_squared", num(res.lhs_squared)}, {"rhs_bound", num(res.rhs_bound)},
                {"holds", res.holds ? "true" : "false"}});
    return kOk;
  }
  return kInternal;
}

} // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const BudgetExceeded& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kBudget;
  } catch (const ParseError& e) {
    std::cerr << "input error at position " << e.position() << ": " << e.what() << "\n";
    return kInput;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}
