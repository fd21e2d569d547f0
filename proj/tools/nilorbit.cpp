#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "nilorbit/factorize.hpp"
#include "nilorbit/hostkra.hpp"
#include "nilorbit/io.hpp"
#include "nilorbit/presets.hpp"

namespace {

using namespace nilorbit;

constexpr const char* kVersion = "0.1.0";

struct CommonArgs {
  std::string group = "heisenberg";
  std::string seq_file;
  std::string out_file;
  std::string csv_file;
  long N = 1000;
  long K = 5;
  double delta = 0.1;
  double M0 = 2, A = 1;
  long q_max = 20;
  int radius = 3;
  unsigned long seed = 0;
  int threads = 1;
  long stride = 1;
  int kmax = 3;
  int samples = 100;
  long h = 1;
};

Json make_envelope(const std::string& command, const CommonArgs& a) {
  Json j;
  j["schema_version"] = 1;
  j["tool"] = "nilorbit";
  j["version"] = kVersion;
  j["command"] = command;
  Json in;
  in["group"] = a.group;
  if (!a.seq_file.empty()) in["seq"] = a.seq_file;
  in["N"] = a.N;
  in["K"] = a.K;
  in["delta"] = a.delta;
  in["M0"] = a.M0;
  in["A"] = a.A;
  in["q_max"] = a.q_max;
  in["radius"] = a.radius;
  in["seed"] = a.seed;
  in["threads"] = a.threads;
  j["input"] = in;
  return j;
}

void emit(const Json& j, const std::string& out_file) {
  std::string text = j.dump(2);
  text.push_back('\n');
  if (out_file.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_file, std::ios::binary);
    if (!out) throw parse_error("cannot open output file: " + out_file);
    out << text;
  }
}

PolySeq load_seq(const CommonArgs& a, const GroupPtr& g) {
  if (a.seq_file.empty()) throw parse_error("--seq is required");
  std::ifstream in(a.seq_file);
  if (!in) throw parse_error("cannot open sequence file: " + a.seq_file);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw parse_error("sequence file is not valid JSON: " +
                      std::string(e.what()));
  }
  return seq_from_json(j, g);
}

int run_orbit(const CommonArgs& a) {
  GroupPtr g = load_group(a.group);
  PolySeq s = load_seq(a, g);
  std::ofstream csv;
  if (!a.csv_file.empty()) {
    csv.open(a.csv_file, std::ios::binary);
    if (!csv) throw parse_error("cannot open csv file: " + a.csv_file);
    csv << "n";
    for (int i = 1; i <= g->dim(); ++i) csv << ",psi_" << i;
    csv << "\n";
  }
  long count = 0;
  orbit_sample(s, a.N, a.stride, 1,
               [&](long n, const std::vector<Scalar>& frac) {
                 ++count;
                 if (csv.is_open()) {
                   csv << n;
                   for (const auto& x : frac) csv << "," << x.to_double();
                   csv << "\n";
                 }
               });
  Json j = make_envelope("orbit", a);
  j["result"] = Json{{"points", count}, {"stride", a.stride}};
  if (!a.csv_file.empty()) j["result"]["csv"] = a.csv_file;
  emit(j, a.out_file);
  return 0;
}

int run_spectrum(const CommonArgs& a) {
  GroupPtr g = load_group(a.group);
  PolySeq s = load_seq(a, g);
  SpectrumReport rep = character_spectrum(s, a.N, a.K, a.threads);
  Json j = make_envelope("spectrum", a);
  Json entries = Json::array();
  for (const auto& e : rep.entries) {
    Json row;
    Json k = Json::array();
    for (const auto& x : e.k) k.push_back((long)x.get_si());
    row["k"] = k;
    row["re"] = e.S.real();
    row["im"] = e.S.imag();
    row["abs"] = e.abs_S;
    entries.push_back(row);
  }
  j["result"] =
      Json{{"N", rep.N}, {"K", rep.K}, {"max_abs_S", rep.max_abs},
           {"characters", entries.size()}, {"entries", entries}};
  emit(j, a.out_file);
  return 0;
}

int run_certify(const CommonArgs& a, bool total) {
  GroupPtr g = load_group(a.group);
  PolySeq s = load_seq(a, g);
  Json j = make_envelope(total ? "certify-total" : "certify", a);
  if (total) {
    TotalCertificate c = certify_total_equidistribution(
        s, a.N, a.delta, a.K, a.q_max, 0, a.threads);
    j["result"] = certificate_to_json(c.worst);
    j["result"]["progression"] =
        Json{{"offset", c.progression_offset},
             {"step", c.progression_step},
             {"length", c.progression_length}};
  } else {
    Certificate c =
        certify_equidistribution(s, a.N, a.delta, a.K, 0, a.threads);
    j["result"] = certificate_to_json(c);
  }
  emit(j, a.out_file);
  return 0;
}

int run_factorize(const CommonArgs& a) {
  GroupPtr g = load_group(a.group);
  PolySeq s = load_seq(a, g);
  FactorizationOptions opts;
  opts.M0 = a.M0;
  opts.A = a.A;
  opts.q_max = a.q_max;
  opts.K_cap = a.K;
  opts.threads = a.threads;
  FactorizationResult f = factorize_full(s, a.N, opts);
  Json j = make_envelope("factorize", a);
  Json r;
  r["M"] = f.M.get_str();
  r["iterations"] = f.iterations;
  r["eps"] = seq_to_json(f.eps);
  r["gprime_ambient"] = seq_to_json(f.gprime_ambient);
  r["gprime_subgroup"] = seq_to_json(f.gprime);
  r["gamma"] = seq_to_json(f.gamma);
  Json basis = Json::array();
  for (const auto& row : f.subgroup.vectors) {
    Json v = Json::array();
    for (const auto& q : row) v.push_back(q.get_str());
    basis.push_back(v);
  }
  r["subgroup_basis"] = basis;
  r["subgroup_dim"] = f.subgroup.group->dim();
  r["subgroup_height"] = f.subgroup.height.get_str();
  r["certificates"] =
      Json{{"equidistribution", certificate_to_json(f.cert.worst)},
           {"eps_sup", f.eps_sup.to_double()},
           {"eps_increment", f.eps_increment.to_double()},
           {"gamma_period", f.gamma_period},
           {"gamma_denominator", f.gamma_denominator.get_str()}};
  Json log = Json::array();
  for (const auto& it : f.log) {
    Json row;
    row["group_dim"] = it.group_dim;
    Json k = Json::array();
    for (const auto& x : it.eta) k.push_back((long)x.get_si());
    row["eta"] = k;
    row["abs_S"] = it.abs_S;
    row["eta_smoothness"] = it.eta_smoothness.to_double();
    row["eta_q"] = it.eta_q;
    row["gamma_denominator"] = it.gamma_denominator.get_str();
    row["gamma_period"] = it.gamma_period;
    row["subgroup_height"] = it.subgroup_height.get_str();
    log.push_back(row);
  }
  r["iterations_log"] = log;
  j["result"] = r;
  emit(j, a.out_file);
  return 0;
}

int run_hk_check(const CommonArgs& a) {
  GroupPtr g = load_group(a.group);
  PolySeq s = load_seq(a, g);
  std::optional<MembershipFailure> fail;
  bool ok = polynomial_membership_test(
      g, [&](long n) { return s.eval1(n); }, a.kmax, a.samples, a.seed, &fail);
  Json j = make_envelope("hk-check", a);
  Json r;
  r["member"] = ok;
  r["kmax"] = a.kmax;
  r["samples_per_k"] = a.samples;
  if (!ok && fail) {
    r["failing"] = Json{{"k", fail->k},
                        {"x", fail->x},
                        {"h", fail->h},
                        {"vertex", fail->failing_vertex}};
  }
  j["result"] = r;
  emit(j, a.out_file);
  return 0;
}

int run_square(const CommonArgs& a) {
  GroupPtr g = load_group(a.group);
  RelativeSquare sq = relative_square(g);
  Json j = make_envelope("square", a);
  Json r;
  r["base_dim"] = g->dim();
  r["box_dim"] = sq.box.group->dim();
  r["box_filtration"] = sq.box.filt.dims;
  r["box_height"] = sq.box.height.get_str();
  Json basis = Json::array();
  for (const auto& row : sq.box.vectors) {
    Json v = Json::array();
    for (const auto& q : row) v.push_back(q.get_str());
    basis.push_back(v);
  }
  r["box_basis_in_product"] = basis;
  if (!a.seq_file.empty()) {
    PolySeq s = load_seq(a, g);
    PolySeq sh = vdc_square_sequence(sq, s, a.h);
    r["vdc_sequence"] = seq_to_json(sh);
    std::optional<MembershipFailure> fail;
    bool ok = polynomial_membership_test(
        sq.box.group, [&](long n) { return sh.eval1(n); }, a.kmax, a.samples,
        a.seed, &fail);
    r["vdc_membership"] = ok;
  }
  j["result"] = r;
  emit(j, a.out_file);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polynomial orbits on nilmanifolds: orbits, spectra, "
               "equidistribution certificates, factorization"};
  app.require_subcommand(1);
  CommonArgs a;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--group", a.group, "preset name or group JSON file");
    cmd->add_option("--seq", a.seq_file, "sequence JSON file");
    cmd->add_option("--N", a.N, "orbit length");
    cmd->add_option("--K", a.K, "character modulus bound");
    cmd->add_option("--delta", a.delta, "equidistribution tolerance");
    cmd->add_option("--M0", a.M0, "initial complexity bound");
    cmd->add_option("--A", a.A, "equidistribution exponent");
    cmd->add_option("--q-max", a.q_max, "progression step bound");
    cmd->add_option("--radius", a.radius, "lattice search radius");
    cmd->add_option("--seed", a.seed, "sampling seed");
    cmd->add_option("--threads", a.threads, "worker threads");
    cmd->add_option("--out", a.out_file, "report JSON path (default stdout)");
    cmd->add_option("--csv", a.csv_file, "CSV output path (orbit data)");
  };

  CLI::App* orbit = app.add_subcommand("orbit", "dump a reduced orbit");
  add_common(orbit);
  orbit->add_option("--stride", a.stride, "sampling stride");
  CLI::App* spectrum =
      app.add_subcommand("spectrum", "character spectrum of an orbit");
  add_common(spectrum);
  CLI::App* certify =
      app.add_subcommand("certify", "equidistribution certificate");
  add_common(certify);
  bool total = false;
  certify->add_flag("--total", total, "certify along all progressions");
  CLI::App* factorize =
      app.add_subcommand("factorize", "smooth * equidistributed * periodic");
  add_common(factorize);
  CLI::App* hk = app.add_subcommand("hk-check", "cube membership sampling");
  add_common(hk);
  hk->add_option("--kmax", a.kmax, "maximum cube dimension");
  hk->add_option("--samples", a.samples, "samples per dimension");
  CLI::App* square = app.add_subcommand("square", "relative square report");
  add_common(square);
  square->add_option("--shift", a.h, "shift for the square sequence");
  square->add_option("--kmax", a.kmax, "maximum cube dimension");
  square->add_option("--samples", a.samples, "samples per dimension");

  CLI11_PARSE(app, argc, argv);
  try {
    if (orbit->parsed()) return run_orbit(a);
    if (spectrum->parsed()) return run_spectrum(a);
    if (certify->parsed()) return run_certify(a, total);
    if (factorize->parsed()) return run_factorize(a);
    if (hk->parsed()) return run_hk_check(a);
    if (square->parsed()) return run_square(a);
  } catch (const nilorbit::parse_error& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const nilorbit::invariant_error& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 3;
  } catch (const nilorbit::numeric_error& e) {
    std::cerr << "numeric overflow: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
