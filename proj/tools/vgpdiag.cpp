#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "vgp/diagnostics.hpp"
#include "vgp/errors.hpp"
#include "vgp/models.hpp"
#include "vgp/pauli.hpp"
#include "vgp/pmr.hpp"
#include "vgp/qmc.hpp"
#include "vgp/random_basis.hpp"
#include "vgp/report_io.hpp"
#include "vgp/state_graph.hpp"
#include "vgp/vgp_check.hpp"
#include "vgp/vgp_search.hpp"

using nlohmann::json;
using namespace vgp;

namespace {

struct Options {
  std::string model;
  std::string hamiltonian;
  std::string lattice;
  int n_spins = 0;
  int defects = 0;
  bool periodic = false;
  std::vector<std::string> params;

  double beta = 1.0;
  double eta = 1.0;
  int qmax = 200;
  int Q = 0;
  double tol = kDefaultVgpTol;
  std::int64_t sweeps = 10000;
  std::int64_t thermalization = 1000;
  std::uint64_t seed = 0;
  int samples = 30;
  int chains = 1;
  std::string out = "-";
  std::string format;

  std::string method = "auto";
  std::vector<int> sizes;
  std::vector<double> betas;
  std::vector<int> defect_list;
  bool cycle_counts = false;
  int terms = 0;
  std::vector<double> coeffs;
  int instances = 50;
  int max_attempts = 200;
  double conjecture_tol = 1e-8;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(fmt::format("cannot read '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::pair<int, int> parse_lattice(const std::string& s) {
  int w = 0, h = 0;
  char x = 0, extra = 0;
  if (std::sscanf(s.c_str(), "%d%c%d%c", &w, &x, &h, &extra) != 3 || (x != 'x' && x != 'X') ||
      w < 1 || h < 1)
    throw ValidationError(fmt::format("lattice must look like WxH, got '{}'", s));
  return {w, h};
}

ModelSpec model_spec(const Options& o) {
  ModelSpec m;
  m.name = o.model;
  m.n_spins = o.n_spins;
  m.defects = o.defects;
  m.periodic = o.periodic;
  if (!o.lattice.empty()) std::tie(m.width, m.height) = parse_lattice(o.lattice);
  for (const auto& kv : o.params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ValidationError(fmt::format("--param expects key=value, got '{}'", kv));
    try {
      std::size_t used = 0;
      const std::string value = kv.substr(eq + 1);
      m.params[kv.substr(0, eq)] = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument("trailing text");
    } catch (const std::logic_error&) {
      throw ValidationError(fmt::format("--param value in '{}' is not a number", kv));
    }
  }
  return m;
}

PauliSum load_input(const Options& o) {
  if (o.model.empty() == o.hamiltonian.empty())
    throw ValidationError("give exactly one of --model or --hamiltonian");
  if (!o.hamiltonian.empty()) return parse_hamiltonian(read_file(o.hamiltonian));
  return build_model(model_spec(o));
}

std::string input_label(const Options& o) { return o.model.empty() ? o.hamiltonian : o.model; }

OutputFormat format_for(const Options& o, OutputFormat fallback) {
  return o.format.empty() ? fallback : parse_format(o.format);
}

// One-row table holding the scalar fields of a JSON object.
Table flat_table(const json& j) {
  Table t;
  std::vector<std::string> row;
  for (const auto& [key, value] : j.items()) {
    if (value.is_structured()) continue;
    t.header.push_back(key);
    if (value.is_number_float()) row.push_back(format_number(value.get<double>()));
    else if (value.is_string()) row.push_back(value.get<std::string>());
    else if (value.is_null()) row.push_back("");
    else row.push_back(value.dump());
  }
  t.rows.push_back(std::move(row));
  return t;
}

void emit(const json& j, const Options& o) {
  if (format_for(o, OutputFormat::json) == OutputFormat::json) emit_report(j, o.out);
  else emit_report(flat_table(j), OutputFormat::csv, o.out);
}

QmcConfig qmc_config(const Options& o) {
  QmcConfig c;
  c.beta = o.beta;
  c.sweeps = o.sweeps;
  c.thermalization = o.thermalization;
  c.seed = o.seed;
  c.q_max = o.qmax;
  return c;
}

int cmd_describe(const Options& o) {
  const PauliSum h = load_input(o);
  const PMRForm p = pmr_decompose(h);
  json j = {{"input", input_label(o)},
            {"n_spins", h.n_spins()},
            {"terms", h.terms().size()},
            {"hamiltonian", serialize(h)},
            {"pmr", to_json(p)}};
  const int max_len = o.Q > 0 ? o.Q : 4;
  json gens = json::array();
  for (const auto& g : fundamental_generators(p, max_len)) gens.push_back(g);
  j["generators"] = gens;
  j["generator_max_len"] = max_len;
  if (h.n_spins() <= 16) {
    const auto comps = all_components(p);
    std::size_t largest = 0;
    int diameter = 0;
    for (const auto& c : comps) {
      largest = std::max(largest, c.size());
      diameter = std::max(diameter, graph_diameter(c));
    }
    j["components"] = comps.size();
    j["largest_component"] = largest;
    j["diameter"] = diameter;
  }
  emit(j, o);
  return 0;
}

int cmd_diagnose(const Options& o) {
  const PauliSum h = load_input(o);
  DiagnoseOptions d;
  d.eta = o.eta;
  d.beta = o.beta;
  d.Q = o.Q;
  d.tol = o.tol;
  json j = to_json(diagnose(h, d));
  j["input"] = input_label(o);
  j["n_spins"] = h.n_spins();
  emit(j, o);
  return 0;
}

bool independent(std::vector<Mask> masks) {
  for (std::size_t r = 0; r < masks.size(); ++r) {
    const auto pivot = std::max_element(masks.begin() + r, masks.end());
    if (*pivot == 0) return false;
    std::swap(masks[r], *pivot);
    const Mask top = Mask{1} << (31 - __builtin_clz(masks[r]));
    for (std::size_t k = r + 1; k < masks.size(); ++k)
      if (masks[k] & top) masks[k] ^= masks[r];
  }
  return true;
}

// Reads the three bonds of a 3-spin Hamiltonian built only from D_ij X_iX_j pair terms.
std::vector<TwoLocalBond> triangle_bonds(const PMRForm& p) {
  if (p.n_spins != 3) throw ValidationError("triangle check needs a 3-spin Hamiltonian");
  std::vector<TwoLocalBond> out;
  for (const auto& t : p.offdiag) {
    if (popcount(t.x_mask) != 2)
      throw ValidationError("triangle check needs X_iX_j permutation terms only");
    TwoLocalBond b;
    b.i = __builtin_ctz(t.x_mask);
    b.j = 31 - __builtin_clz(t.x_mask);
    const Mask zi = Mask{1} << b.i, zj = Mask{1} << b.j;
    for (const auto& [m, c] : t.d.terms) {
      if (m == 0) b.h0 = c.real();
      else if (m == zi) b.h1 = c.imag();
      else if (m == zj) b.h2 = c.imag();
      else if (m == (zi | zj)) b.h3 = c.real();
      else throw ValidationError("triangle check: diagonal factor reaches outside its bond");
    }
    out.push_back(b);
  }
  for (const Mask m : {Mask{0b011}, Mask{0b101}, Mask{0b110}})
    if (std::none_of(out.begin(), out.end(),
                     [m](const TwoLocalBond& b) { return ((Mask{1} << b.i) | (Mask{1} << b.j)) == m; })) {
      TwoLocalBond b;
      b.i = __builtin_ctz(m);
      b.j = 31 - __builtin_clz(m);
      out.push_back(b);
    }
  return out;
}

int cmd_check(const Options& o) {
  const PauliSum h = load_input(o);
  const PMRForm p = pmr_decompose(h);
  std::string method = o.method;
  if (method == "auto") {
    if (o.model == "tilde_heis") method = "tilde";
    else if (independent(p.x_masks())) method = "dx";
    else method = "gauge";
  }
  json j;
  if (method == "dx") {
    int k = 0;
    for (const auto& t : p.offdiag) k = std::max(k, popcount(t.d.support()));
    j = to_json(check_dx_vgp(p, k));
  } else if (method == "triangle") {
    j = to_json(check_2local_triangle(triangle_bonds(p)));
  } else if (method == "gauge") {
    j = to_json(check_gauge_consistency(p, o.tol));
  } else if (method == "tilde") {
    if (o.model != "tilde_heis") throw ValidationError("--method tilde needs --model tilde_heis");
    const ModelSpec m = model_spec(o);
    std::vector<TildeHeisBond> bonds;
    for (const auto& b : TriangularLadder{m.n_spins, m.periodic}.bonds())
      bonds.push_back({b.i, b.j, m.param("h0", 1.0), m.param("h1", 0.5)});
    const auto r = check_tilde_heis(m.n_spins, bonds, 8, o.tol);
    j = to_json(r.verdict);
    j["cross_checked"] = r.cross_checked;
    j["f_eta_relative"] = r.f_eta_relative;
  } else {
    throw ValidationError(fmt::format("unknown method '{}'", method));
  }
  j["input"] = input_label(o);
  emit(j, o);
  return 0;
}

int cmd_qmc(const Options& o) {
  const PauliSum h = load_input(o);
  ScanRow row;
  row.model = input_label(o);
  row.n_spins = h.n_spins();
  row.beta = o.beta;
  row.defects = o.defects;
  row.stats = run_qmc_chains(pmr_decompose(h), qmc_config(o), o.chains);
  if (h.n_spins() <= kDefaultDenseCap) row.exact_avg_sign = exact_avg_sign(to_dense(h), o.beta);
  emit_report(scan_table({row}), format_for(o, OutputFormat::csv), o.out);
  return 0;
}

int cmd_scan(const Options& o) {
  if (o.model.empty()) throw ValidationError("scan needs --model");
  ScanSpec s;
  s.base = model_spec(o);
  s.sizes = o.sizes.empty() ? std::vector<int>{o.n_spins} : o.sizes;
  s.betas = o.betas.empty() ? std::vector<double>{o.beta} : o.betas;
  s.defects = o.defect_list;
  s.cycle_counts = o.cycle_counts;
  s.Q = o.Q;
  s.chains = o.chains;
  emit_report(scan_table(scan(s, qmc_config(o))), format_for(o, OutputFormat::csv), o.out);
  return 0;
}

int cmd_random_basis(const Options& o) {
  const OutputFormat fmt_out = format_for(o, OutputFormat::csv);
  if (o.terms > 0 || !o.coeffs.empty()) {
    const std::vector<double> coeffs =
        o.coeffs.empty() ? std::vector<double>(static_cast<std::size_t>(o.terms), 1.0) : o.coeffs;
    Table t;
    t.header = {"N", "terms", "trials", "formula", "empirical", "stderr", "rel_error"};
    for (int n : o.sizes.empty() ? std::vector<int>{o.n_spins} : o.sizes) {
      Rng rng = Rng::stream(o.seed, static_cast<std::uint64_t>(n));
      const auto r = random_pauli_experiment(n, coeffs, o.samples, rng);
      t.rows.push_back({std::to_string(r.n_spins), std::to_string(r.terms), std::to_string(r.trials),
                        format_number(r.formula_value), format_number(r.empirical_mean),
                        format_number(r.empirical_stderr), format_number(r.rel_error)});
    }
    emit_report(t, fmt_out, o.out);
    return 0;
  }
  std::vector<RandomBasisReport> rows;
  if (!o.model.empty() || !o.hamiltonian.empty()) {
    Rng rng(o.seed);
    rows.push_back(compare_calF(to_dense(load_input(o)), o.samples, rng));
  } else {
    for (int n : o.sizes.empty() ? std::vector<int>{o.n_spins} : o.sizes) {
      Rng rng = Rng::stream(o.seed, static_cast<std::uint64_t>(n));
      rows.push_back(compare_calF(to_dense(heisenberg_chain(n, o.periodic)), o.samples, rng));
    }
  }
  emit_report(random_basis_table(rows), fmt_out, o.out);
  return 0;
}

int cmd_conjecture(const Options& o) {
  ConjectureOptions c;
  c.instances = o.instances;
  c.max_attempts = o.max_attempts;
  c.tol = o.conjecture_tol;
  const auto r = verify_conjecture(c, o.seed);
  emit(to_json(r), o);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sign-problem diagnostics for spin Hamiltonians via vanishing geometric phase"};
  app.require_subcommand(1);
  Options o;

  auto add_input = [&](CLI::App* c) {
    auto* model = c->add_option("--model", o.model, "Built-in model")
                      ->check(CLI::IsMember(model_names()));
    auto* file = c->add_option("--hamiltonian", o.hamiltonian, "Hamiltonian text file");
    model->excludes(file);
    c->add_option("--lattice", o.lattice, "Square lattice (or cell tiling) as WxH");
    c->add_option("--N", o.n_spins, "Spin count for ladders and chains");
    c->add_option("--defects", o.defects, "Defect plaquettes on the ladder");
    c->add_flag("--periodic", o.periodic, "Periodic boundary conditions");
    c->add_option("--param", o.params, "Model parameter key=value (repeatable)");
  };
  auto add_output = [&](CLI::App* c) {
    c->add_option("--out", o.out, "Output path, '-' for standard output");
    c->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  };
  auto add_seed = [&](CLI::App* c) {
    c->add_option("--seed", o.seed, "Random seed")->required();
  };
  auto add_qmc = [&](CLI::App* c) {
    c->add_option("--beta", o.beta, "Inverse temperature");
    c->add_option("--sweeps", o.sweeps, "Measurement sweeps");
    c->add_option("--thermalization", o.thermalization, "Discarded sweeps");
    c->add_option("--qmax", o.qmax, "Largest expansion order");
    c->add_option("--chains", o.chains, "Independent chains run concurrently");
    add_seed(c);
  };

  auto* describe = app.add_subcommand("describe", "Terms, PMR form, generators and graph size");
  add_input(describe);
  add_output(describe);
  describe->add_option("--Q", o.Q, "Longest generator listed (default 4)");

  auto* diag = app.add_subcommand("diagnose", "f_stoq, f_vgp, f_eta and the exact average sign");
  add_input(diag);
  add_output(diag);
  diag->add_option("--eta", o.eta, "f_eta scale");
  diag->add_option("--beta", o.beta, "Inverse temperature for the average sign");
  diag->add_option("--Q", o.Q, "Cycle length bound");
  diag->add_option("--tol", o.tol, "VGP tolerance on relative f_eta");

  auto* check = app.add_subcommand("check", "Structural VGP classifiers");
  add_input(check);
  add_output(check);
  check->add_option("--method", o.method, "auto, dx, triangle, gauge or tilde")
      ->check(CLI::IsMember({"auto", "dx", "triangle", "gauge", "tilde"}));
  check->add_option("--tol", o.tol, "Violation tolerance");

  auto* qmc = app.add_subcommand("qmc", "Sample the average sign");
  add_input(qmc);
  add_output(qmc);
  add_qmc(qmc);

  auto* scan_cmd = app.add_subcommand("scan", "QMC over sizes, temperatures and defect counts");
  add_input(scan_cmd);
  add_output(scan_cmd);
  add_qmc(scan_cmd);
  scan_cmd->add_option("--sizes", o.sizes, "Spin counts")->delimiter(',');
  scan_cmd->add_option("--betas", o.betas, "Inverse temperatures")->delimiter(',');
  scan_cmd->add_option("--defect-list", o.defect_list, "Defect counts")->delimiter(',');
  scan_cmd->add_flag("--cycle-counts", o.cycle_counts, "Add VGP and non-VGP cycle counts");
  scan_cmd->add_option("--Q", o.Q, "Cycle length bound for the counts");

  auto* rb = app.add_subcommand("random-basis", "Haar or random-Pauli basis experiments");
  add_input(rb);
  add_output(rb);
  add_seed(rb);
  rb->add_option("--samples", o.samples, "Haar samples or Pauli tuples");
  rb->add_option("--sizes", o.sizes, "Spin counts for the chain fixture")->delimiter(',');
  rb->add_option("--terms", o.terms, "Random-Pauli mode with this many unit terms");
  rb->add_option("--coeffs", o.coeffs, "Random-Pauli mode with these coefficients")
      ->delimiter(',');

  auto* conj = app.add_subcommand("conjecture", "Optimize, rotate and tile 2x2 unit cells");
  add_output(conj);
  add_seed(conj);
  conj->add_option("--samples", o.instances, "Converged instances to test");
  conj->add_option("--attempts", o.max_attempts, "Optimizer runs allowed");
  conj->add_option("--tol", o.conjecture_tol, "Pass threshold on relative f_eta");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (describe->parsed()) return cmd_describe(o);
    if (diag->parsed()) return cmd_diagnose(o);
    if (check->parsed()) return cmd_check(o);
    if (qmc->parsed()) return cmd_qmc(o);
    if (scan_cmd->parsed()) return cmd_scan(o);
    if (rb->parsed()) return cmd_random_basis(o);
    if (conj->parsed()) return cmd_conjecture(o);
  } catch (const GuardError& e) {
    std::fputs((json{{"error", "guard"}, {"reason", e.reason()}, {"message", e.what()}}.dump() + "\n")
                   .c_str(),
               stderr);
    return 2;
  } catch (const std::exception& e) {
    std::fputs((json{{"error", "validation"}, {"message", e.what()}}.dump() + "\n").c_str(), stderr);
    return 1;
  }
  return 1;
}
