#include "wmq/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "wmq/designs.hpp"
#include "wmq/field.hpp"
#include "wmq/protocols.hpp"

namespace wmq {
namespace {

using nlohmann::ordered_json;

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::pair<std::int64_t, std::int64_t> require_prime_power(std::int64_t q) {
  if (q < 3 || q % 2 == 0) throw std::invalid_argument("q must be an odd prime power");
  std::int64_t p = q;
  for (std::int64_t d = 3; d * d <= q; d += 2) {
    if (q % d == 0) {
      p = d;
      break;
    }
  }
  std::int64_t k = 0, r = q;
  while (r % p == 0) {
    r /= p;
    ++k;
  }
  if (r != 1) throw std::invalid_argument("q must be an odd prime power");
  return {p, k};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write file: " + path);
  out << text;
}

std::string run_text(const RunReport& r) {
  std::ostringstream os;
  os << r.protocol;
  for (const auto& [key, value] : r.parameters) os << ' ' << key << '=' << value;
  os << " s=" << r.hidden_s << " recovered=" << r.recovered_s << " queries=" << r.queries_used
     << "/" << r.query_budget << " success=" << fmt_double(r.success_probability)
     << " branch=" << r.branch_taken;
  if (r.seed) os << " seed=" << *r.seed;
  return os.str();
}

std::string run_csv_header() {
  return "protocol,n,k,q,t,hidden_s,recovered_s,queries_used,query_budget,success_probability,"
         "branch_taken,seed";
}

std::string run_csv_row(const RunReport& r) {
  auto param = [&](const char* key) -> std::string {
    const auto it = r.parameters.find(key);
    return it == r.parameters.end() ? std::string() : std::to_string(it->second);
  };
  std::ostringstream os;
  os << r.protocol << ',' << param("n") << ',' << param("k") << ',' << param("q") << ','
     << param("t") << ',' << r.hidden_s << ',' << r.recovered_s << ',' << r.queries_used << ','
     << r.query_budget << ',' << fmt_double(r.success_probability) << ',' << r.branch_taken << ','
     << (r.seed ? std::to_string(*r.seed) : std::string());
  return os.str();
}

void emit_runs(const std::vector<RunReport>& runs, const std::string& format, std::ostream& out) {
  if (format == "json") {
    if (runs.size() == 1) {
      out << ordered_json(runs.front()).dump(2) << '\n';
    } else {
      ordered_json arr = ordered_json::array();
      for (const auto& r : runs) arr.push_back(r);
      out << arr.dump(2) << '\n';
    }
  } else if (format == "csv") {
    out << run_csv_header() << '\n';
    for (const auto& r : runs) out << run_csv_row(r) << '\n';
  } else {
    for (const auto& r : runs) out << run_text(r) << '\n';
  }
}

void emit_matrix(const TernaryMatrix& m, const std::string& format, const std::string& out_path,
                 std::ostream& out) {
  const std::string text = serialize_matrix(m);
  if (!out_path.empty()) {
    write_file(out_path, text);
    return;
  }
  if (format == "json") {
    ordered_json j;
    j["n"] = m.n();
    j["k"] = m.claimed_weight ? *m.claimed_weight : -1;
    ordered_json rows = ordered_json::array();
    std::istringstream lines(text);
    std::string line;
    std::getline(lines, line);  // header
    while (std::getline(lines, line)) rows.push_back(line);
    j["rows"] = rows;
    out << j.dump(2) << '\n';
  } else {
    out << text;
  }
}

const char* kAsympto[3][3] = {
    {"o(n)", "pi/4 sqrt(n/k) + 2", "(1-eps) n/k - O(1)"},
    {"Theta(n)", "O(1)", "log3 n + log3(1-eps)"},
    {"n", "1", "log n + log(1-eps)"},
};

struct ConcreteRow {
  std::string family;
  std::int64_t n, k;
  std::int64_t quantum;
  BoundsReport bounds;
};

std::vector<ConcreteRow> concrete_table_rows() {
  std::vector<ConcreteRow> rows;
  auto push = [&](std::string name, std::int64_t n, std::int64_t k) {
    const BoundsReport b = classical_bounds(n, k, 0.0);
    const std::int64_t quantum = k == n ? 1 : b.quantum_upper;
    rows.push_back(ConcreteRow{std::move(name), n, k, quantum, b});
  };
  for (std::int64_t n : {4, 8, 16}) push("identity", n, 1);
  std::int64_t big_n = 1, big_k = 1;
  for (int t = 1; t <= 3; ++t) {
    big_n *= 4;
    big_k *= 3;
    push("w43 t=" + std::to_string(t), big_n, big_k);
  }
  for (int t = 1; t <= 6; ++t) push("sylvester t=" + std::to_string(t), std::int64_t{1} << t,
                                    std::int64_t{1} << t);
  return rows;
}

struct CliOptions {
  std::string format = "text";
  std::uint64_t seed = 0;
};

int dispatch(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"query-complexity laboratory for weighing-matrix and shifted-character oracles"};
  app.require_subcommand(1);

  CliOptions opts;
  app.add_option("--format", opts.format, "output format")
      ->check(CLI::IsMember({"text", "json", "csv"}))
      ->capture_default_str();
  app.add_option("--seed", opts.seed, "seed for sample-mode runs")->capture_default_str();

  std::function<void()> action;

  // field info
  auto* field_cmd = app.add_subcommand("field", "finite field inspection");
  field_cmd->require_subcommand(1);
  auto* info_cmd = field_cmd->add_subcommand("info", "modulus and generator of F_{p^k}");
  {
    auto p = std::make_shared<std::int64_t>(0);
    auto k = std::make_shared<std::int64_t>(1);
    info_cmd->add_option("--p", *p, "odd prime")->required();
    info_cmd->add_option("--k", *k, "extension degree")->capture_default_str();
    info_cmd->callback([&, p, k] {
      action = [&, p, k] {
        const FieldSpec f = make_field(*p, *k);
        if (opts.format == "json") {
          ordered_json j;
          j["p"] = f.p;
          j["k"] = f.k;
          j["q"] = f.q;
          j["modulus"] = f.modulus;
          j["generator"] = {{"coeffs", f.generator.coeffs}, {"rank", elem_rank(f, f.generator)}};
          out << j.dump(2) << '\n';
        } else {
          out << "p=" << f.p << " k=" << f.k << " q=" << f.q << '\n'
              << "modulus: " << poly_to_string(f.modulus) << '\n'
              << "generator: " << poly_to_string(f.generator.coeffs) << " (rank "
              << elem_rank(f, f.generator) << ")\n";
        }
      };
    });
  }

  // chi
  auto* chi_cmd = app.add_subcommand("chi", "quadratic character values");
  {
    auto p = std::make_shared<std::int64_t>(0);
    auto k = std::make_shared<std::int64_t>(1);
    auto x = std::make_shared<std::int64_t>(-1);
    chi_cmd->add_option("--p", *p, "odd prime")->required();
    chi_cmd->add_option("--k", *k, "extension degree")->capture_default_str();
    chi_cmd->add_option("--x", *x, "element rank; all elements when omitted");
    chi_cmd->callback([&, p, k, x] {
      action = [&, p, k, x] {
        const FieldSpec f = make_field(*p, *k);
        if (*x >= 0) {
          const int value = legendre(f, elem_from_rank(f, *x));
          if (opts.format == "json") {
            out << ordered_json{{"q", f.q}, {"x", *x}, {"chi", value}}.dump(2) << '\n';
          } else {
            out << "chi(" << *x << ") = " << value << '\n';
          }
          return;
        }
        const auto table = chi_table(f);
        if (opts.format == "json") {
          out << ordered_json{{"q", f.q}, {"chi", table}}.dump(2) << '\n';
        } else if (opts.format == "csv") {
          out << "rank,chi\n";
          for (std::int64_t r = 0; r < f.q; ++r) out << r << ',' << table[r] << '\n';
        } else {
          for (std::int64_t r = 0; r < f.q; ++r) out << r << ' ' << table[r] << '\n';
        }
      };
    });
  }

  // matrix constructors and verification
  auto* matrix_cmd = app.add_subcommand("matrix", "weighing matrix constructions");
  matrix_cmd->require_subcommand(1);
  auto out_path = std::make_shared<std::string>();
  {
    auto add_out = [&](CLI::App* sub) {
      sub->add_option("--out", *out_path, "write the matrix file here instead of stdout");
    };
    auto* syl = matrix_cmd->add_subcommand("sylvester", "2^t x 2^t Hadamard matrix");
    auto syl_t = std::make_shared<int>(1);
    syl->add_option("--t", *syl_t, "tensor power")->required();
    add_out(syl);
    syl->callback([&, syl_t] {
      action = [&, syl_t] { emit_matrix(sylvester(*syl_t), opts.format, *out_path, out); };
    });

    auto* p1 = matrix_cmd->add_subcommand("paley1", "(q+1)-dim Hadamard, q = 3 mod 4");
    auto p1_q = std::make_shared<std::int64_t>(0);
    p1->add_option("--q", *p1_q, "odd prime power")->required();
    add_out(p1);
    p1->callback([&, p1_q] {
      action = [&, p1_q] { emit_matrix(paley_one(*p1_q), opts.format, *out_path, out); };
    });

    auto* p2 = matrix_cmd->add_subcommand("paley2", "(2q+2)-dim Hadamard, q = 1 mod 4");
    auto p2_q = std::make_shared<std::int64_t>(0);
    p2->add_option("--q", *p2_q, "odd prime power")->required();
    add_out(p2);
    p2->callback([&, p2_q] {
      action = [&, p2_q] { emit_matrix(paley_two(*p2_q), opts.format, *out_path, out); };
    });

    auto* w43 = matrix_cmd->add_subcommand("w43", "tensor power of the 4x4 weight-3 matrix");
    auto w43_t = std::make_shared<int>(1);
    w43->add_option("--t", *w43_t, "tensor power")->capture_default_str();
    add_out(w43);
    w43->callback([&, w43_t] {
      action = [&, w43_t] { emit_matrix(w43_power(*w43_t), opts.format, *out_path, out); };
    });

    auto* ident = matrix_cmd->add_subcommand("identity", "identity matrix, weight 1");
    auto ident_n = std::make_shared<std::int64_t>(0);
    ident->add_option("--n", *ident_n, "dimension")->required();
    add_out(ident);
    ident->callback([&, ident_n] {
      action = [&, ident_n] { emit_matrix(identity_matrix(*ident_n), opts.format, *out_path, out); };
    });

    auto* legendre_sub = matrix_cmd->add_subcommand("legendre", "q x q shifted-character matrix");
    auto leg_q = std::make_shared<std::int64_t>(0);
    legendre_sub->add_option("--q", *leg_q, "odd prime power")->required();
    add_out(legendre_sub);
    legendre_sub->callback([&, leg_q] {
      action = [&, leg_q] {
        const auto [p, k] = require_prime_power(*leg_q);
        emit_matrix(legendre_matrix(make_field(p, k)), opts.format, *out_path, out);
      };
    });

    auto* tens = matrix_cmd->add_subcommand("tensor", "Kronecker product of two matrix files");
    auto left = std::make_shared<std::string>();
    auto right = std::make_shared<std::string>();
    tens->add_option("--left", *left, "matrix file")->required();
    tens->add_option("--right", *right, "matrix file")->required();
    add_out(tens);
    tens->callback([&, left, right] {
      action = [&, left, right] {
        TernaryMatrix a = parse_matrix(read_file(*left));
        TernaryMatrix b = parse_matrix(read_file(*right));
        if (!a.claimed_weight) a = certify(std::move(a));
        if (!b.claimed_weight) b = certify(std::move(b));
        emit_matrix(tensor(a, b), opts.format, *out_path, out);
      };
    });

    auto* verify = matrix_cmd->add_subcommand("verify", "certify a matrix file");
    auto vfile = std::make_shared<std::string>();
    verify->add_option("--file", *vfile, "matrix file")->required();
    verify->callback([&, vfile] {
      action = [&, vfile] {
        const TernaryMatrix m = parse_matrix(read_file(*vfile));
        const WeighingCertificate cert = verify_weighing(m);
        if (opts.format == "json") {
          out << ordered_json{{"n", cert.n}, {"k", cert.k}, {"hadamard", cert.hadamard}}.dump(2)
              << '\n';
        } else if (opts.format == "csv") {
          out << "n,k,hadamard\n" << cert.n << ',' << cert.k << ',' << cert.hadamard << '\n';
        } else {
          out << "W(" << cert.n << "," << cert.k << ") verified"
              << (cert.hadamard ? " (Hadamard)" : "") << '\n';
        }
      };
    });
  }

  // protocol runs
  auto* run_cmd = app.add_subcommand("run", "execute a query protocol");
  run_cmd->require_subcommand(1);
  {
    auto* wm = run_cmd->add_subcommand("wm", "recover a hidden weighing-matrix row");
    auto file = std::make_shared<std::string>();
    auto s = std::make_shared<std::int64_t>(-1);
    auto all_s = std::make_shared<bool>(false);
    auto mode = std::make_shared<std::string>("full");
    wm->add_option("--file", *file, "matrix file")->required();
    wm->add_option("--s", *s, "hidden row index");
    wm->add_flag("--all-s", *all_s, "run every hidden row in rank order");
    wm->add_option("--mode", *mode)->check(CLI::IsMember({"full", "sample"}));
    wm->callback([&, file, s, all_s, mode] {
      action = [&, file, s, all_s, mode] {
        TernaryMatrix m = parse_matrix(read_file(*file));
        if (!m.claimed_weight) m = certify(std::move(m));
        const RunMode rm = *mode == "sample" ? RunMode::kSample : RunMode::kFull;
        std::vector<RunReport> runs;
        if (*all_s) {
          for (std::int64_t row = 0; row < m.n(); ++row)
            runs.push_back(wm_recover(m, row, rm, opts.seed));
        } else {
          if (*s < 0) throw std::invalid_argument("provide --s or --all-s");
          runs.push_back(wm_recover(m, *s, rm, opts.seed));
        }
        emit_runs(runs, opts.format, out);
      };
    });

    auto* bv = run_cmd->add_subcommand("bv", "recover a hidden parity mask");
    auto bits = std::make_shared<int>(0);
    auto bv_s = std::make_shared<std::int64_t>(-1);
    auto bv_all = std::make_shared<bool>(false);
    bv->add_option("--n", *bits, "mask length in bits")->required();
    bv->add_option("--s", *bv_s, "hidden mask as an integer");
    bv->add_flag("--all-s", *bv_all, "run every mask");
    bv->callback([&, bits, bv_s, bv_all] {
      action = [&, bits, bv_s, bv_all] {
        std::vector<RunReport> runs;
        if (*bv_all) {
          for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << *bits); ++mask)
            runs.push_back(bv_recover(*bits, mask));
        } else {
          if (*bv_s < 0) throw std::invalid_argument("provide --s or --all-s");
          runs.push_back(bv_recover(*bits, static_cast<std::uint64_t>(*bv_s)));
        }
        emit_runs(runs, opts.format, out);
      };
    });

    auto add_field_run = [&](const char* name, const char* desc, bool quantum) {
      auto* sub = run_cmd->add_subcommand(name, desc);
      auto p = std::make_shared<std::int64_t>(0);
      auto k = std::make_shared<std::int64_t>(1);
      auto shift = std::make_shared<std::int64_t>(-1);
      auto all = std::make_shared<bool>(false);
      auto mode = std::make_shared<std::string>("full");
      sub->add_option("--p", *p, "odd prime")->required();
      sub->add_option("--k", *k, "extension degree")->capture_default_str();
      sub->add_option("--s", *shift, "hidden shift rank");
      sub->add_flag("--all-s", *all, "run every shift in rank order");
      if (quantum) sub->add_option("--mode", *mode)->check(CLI::IsMember({"full", "sample"}));
      sub->callback([&, p, k, shift, all, mode, quantum] {
        action = [&, p, k, shift, all, mode, quantum] {
          const FieldSpec f = make_field(*p, *k);
          const RunMode rm = *mode == "sample" ? RunMode::kSample : RunMode::kFull;
          auto one = [&](std::int64_t hidden) {
            return quantum ? sls_quantum(f, hidden, rm, opts.seed) : sls_classical(f, hidden);
          };
          std::vector<RunReport> runs;
          if (*all) {
            for (std::int64_t hidden = 0; hidden < f.q; ++hidden) runs.push_back(one(hidden));
          } else {
            if (*shift < 0) throw std::invalid_argument("provide --s or --all-s");
            runs.push_back(one(*shift));
          }
          emit_runs(runs, opts.format, out);
        };
      });
    };
    add_field_run("sls-quantum", "two-query shifted-character recovery", true);
    add_field_run("sls-classical", "deterministic halving shifted-character recovery", false);
  }

  // bounds
  auto* bounds_cmd = app.add_subcommand("bounds", "classical lower bounds and quantum budgets");
  {
    auto n = std::make_shared<std::int64_t>(0);
    auto k = std::make_shared<std::int64_t>(0);
    auto q = std::make_shared<std::int64_t>(0);
    auto eps = std::make_shared<double>(0.0);
    auto* n_opt = bounds_cmd->add_option("--n", *n, "matrix dimension");
    auto* k_opt = bounds_cmd->add_option("--k", *k, "matrix weight");
    auto* q_opt = bounds_cmd->add_option("--sls-q", *q, "field size for the shifted-character task");
    bounds_cmd->add_option("--eps", *eps, "allowed error probability")->capture_default_str();
    n_opt->excludes(q_opt);
    q_opt->excludes(n_opt)->excludes(k_opt);
    bounds_cmd->callback([&, n, k, q, eps] {
      action = [&, n, k, q, eps] {
        if (*q > 0) {
          const SlsBoundsReport r = sls_bounds(*q, *eps);
          if (opts.format == "json") {
            out << ordered_json(r).dump(2) << '\n';
          } else if (opts.format == "csv") {
            out << "q,eps,bound_statement,bound_proof_form,quantum_upper,classical_upper,min_depth\n"
                << r.q << ',' << fmt_double(r.eps) << ',' << fmt_double(r.bound_statement) << ','
                << fmt_double(r.bound_proof_form) << ',' << r.quantum_upper << ','
                << r.classical_upper << ',' << r.min_depth << '\n';
          } else {
            out << "q=" << r.q << " eps=" << fmt_double(r.eps) << '\n'
                << "bound_statement=" << fmt_double(r.bound_statement) << '\n'
                << "bound_proof_form=" << fmt_double(r.bound_proof_form) << '\n'
                << "quantum_upper=" << r.quantum_upper << '\n'
                << "classical_upper=" << r.classical_upper << '\n'
                << "min_depth=" << r.min_depth << '\n';
          }
          return;
        }
        if (*n <= 0 || *k <= 0) throw std::invalid_argument("provide --n and --k, or --sls-q");
        const BoundsReport r = classical_bounds(*n, *k, *eps);
        if (opts.format == "json") {
          out << ordered_json(r).dump(2) << '\n';
        } else if (opts.format == "csv") {
          out << "n,k,eps,bound_log3,bound_nk,bound_log2,quantum_upper,min_depth\n"
              << r.n << ',' << r.k << ',' << fmt_double(r.eps) << ',' << fmt_double(r.bound_log3)
              << ',' << fmt_double(r.bound_nk) << ',' << fmt_double(r.bound_log2) << ','
              << r.quantum_upper << ',' << r.min_depth << '\n';
        } else {
          out << "n=" << r.n << " k=" << r.k << " eps=" << fmt_double(r.eps) << '\n'
              << "bound_log3=" << fmt_double(r.bound_log3) << '\n'
              << "bound_nk=" << fmt_double(r.bound_nk) << '\n'
              << "bound_log2=" << fmt_double(r.bound_log2) << '\n'
              << "quantum_upper=" << r.quantum_upper << '\n'
              << "min_depth=" << r.min_depth << '\n';
        }
      };
    });
  }

  // family
  auto* family_cmd = app.add_subcommand("family", "tensor-power family of a base W(n, k)");
  {
    auto n = std::make_shared<std::int64_t>(0);
    auto k = std::make_shared<std::int64_t>(0);
    auto file = std::make_shared<std::string>();
    auto tmax = std::make_shared<int>(1);
    auto eps = std::make_shared<double>(0.0);
    auto* n_opt = family_cmd->add_option("--n", *n, "base dimension");
    family_cmd->add_option("--k", *k, "base weight");
    family_cmd->add_option("--file", *file, "base matrix file (verified)")->excludes(n_opt);
    family_cmd->add_option("--tmax", *tmax, "largest tensor power")->capture_default_str();
    family_cmd->add_option("--eps", *eps, "allowed error probability")->capture_default_str();
    family_cmd->callback([&, n, k, file, tmax, eps] {
      action = [&, n, k, file, tmax, eps] {
        std::int64_t base_n = *n, base_k = *k;
        if (!file->empty()) {
          const TernaryMatrix m = parse_matrix(read_file(*file));
          const WeighingCertificate cert = verify_weighing(m);
          base_n = cert.n;
          base_k = cert.k;
        }
        if (base_n <= 0 || base_k <= 0)
          throw std::invalid_argument("provide --n and --k, or --file");
        const auto rows = tensor_family(base_n, base_k, *tmax, *eps);
        if (opts.format == "json") {
          ordered_json arr = ordered_json::array();
          for (const auto& row : rows)
            arr.push_back(ordered_json{{"t", row.t},
                                       {"n", row.big_n},
                                       {"k", row.big_k},
                                       {"gamma", row.gamma},
                                       {"quantum", row.quantum},
                                       {"classical_lower", row.classical_lower}});
          out << arr.dump(2) << '\n';
        } else if (opts.format == "csv") {
          out << "t,n,k,gamma,quantum,classical_lower\n";
          for (const auto& row : rows)
            out << row.t << ',' << row.big_n << ',' << row.big_k << ',' << fmt_double(row.gamma)
                << ',' << row.quantum << ',' << fmt_double(row.classical_lower) << '\n';
        } else {
          for (const auto& row : rows)
            out << "t=" << row.t << " N=" << row.big_n << " K=" << row.big_k
                << " gamma=" << fmt_double(row.gamma) << " quantum=" << row.quantum
                << " classical_lower=" << fmt_double(row.classical_lower) << '\n';
        }
      };
    });
  }

  // tree
  auto* tree_cmd = app.add_subcommand("tree", "optimal ternary decision tree for a family");
  {
    auto family = std::make_shared<std::string>();
    auto file = std::make_shared<std::string>();
    auto n = std::make_shared<std::int64_t>(4);
    auto t = std::make_shared<int>(1);
    auto p = std::make_shared<std::int64_t>(3);
    auto k = std::make_shared<std::int64_t>(1);
    tree_cmd->add_option("--family", *family, "identity | w43 | sylvester | sls")
        ->check(CLI::IsMember({"identity", "w43", "sylvester", "sls"}));
    tree_cmd->add_option("--file", *file, "matrix file; rows form the family");
    tree_cmd->add_option("--n", *n, "identity dimension")->capture_default_str();
    tree_cmd->add_option("--t", *t, "sylvester power")->capture_default_str();
    tree_cmd->add_option("--p", *p, "field prime for sls")->capture_default_str();
    tree_cmd->add_option("--k", *k, "field degree for sls")->capture_default_str();
    tree_cmd->callback([&, family, file, n, t, p, k] {
      action = [&, family, file, n, t, p, k] {
        std::string label;
        std::vector<std::vector<int>> tables;
        if (!file->empty()) {
          tables = matrix_rows_family(parse_matrix(read_file(*file)));
          label = "file";
        } else if (*family == "identity") {
          tables = matrix_rows_family(identity_matrix(*n));
          label = "identity";
        } else if (*family == "w43") {
          tables = matrix_rows_family(w43_power(1));
          label = "w43";
        } else if (*family == "sylvester") {
          tables = matrix_rows_family(sylvester(*t));
          label = "sylvester";
        } else if (*family == "sls") {
          tables = sls_family(make_field(*p, *k));
          label = "sls";
        } else {
          throw std::invalid_argument("provide --family or --file");
        }
        const DecisionTree tree = optimal_tree(tables);
        if (opts.format == "json") {
          out << ordered_json{{"family", label},
                              {"size", tables.size()},
                              {"table_len", tables[0].size()},
                              {"depth", tree.depth}}
                     .dump(2)
              << '\n';
        } else if (opts.format == "csv") {
          out << "family,size,table_len,depth\n"
              << label << ',' << tables.size() << ',' << tables[0].size() << ',' << tree.depth
              << '\n';
        } else {
          out << "family=" << label << " size=" << tables.size()
              << " table_len=" << tables[0].size() << " depth=" << tree.depth << '\n';
        }
      };
    });
  }

  // table
  auto* table_cmd = app.add_subcommand("table", "bound table by weight class, with concrete rows");
  table_cmd->callback([&] {
    action = [&] {
      const auto rows = concrete_table_rows();
      if (opts.format == "json") {
        ordered_json j;
        ordered_json asym = ordered_json::array();
        for (const auto& r : kAsympto)
          asym.push_back(ordered_json{{"k", r[0]}, {"quantum", r[1]}, {"classical", r[2]}});
        ordered_json conc = ordered_json::array();
        for (const auto& r : rows)
          conc.push_back(ordered_json{{"family", r.family},
                                      {"n", r.n},
                                      {"k", r.k},
                                      {"quantum", r.quantum},
                                      {"bound_log3", r.bounds.bound_log3},
                                      {"bound_nk", r.bounds.bound_nk},
                                      {"bound_log2", r.bounds.bound_log2}});
        j["asymptotic"] = asym;
        j["concrete"] = conc;
        out << j.dump(2) << '\n';
      } else if (opts.format == "csv") {
        out << "family,n,k,quantum,bound_log3,bound_nk,bound_log2\n";
        for (const auto& r : rows)
          out << r.family << ',' << r.n << ',' << r.k << ',' << r.quantum << ','
              << fmt_double(r.bounds.bound_log3) << ',' << fmt_double(r.bounds.bound_nk) << ','
              << fmt_double(r.bounds.bound_log2) << '\n';
      } else {
        out << "k class   quantum upper         classical lower\n";
        for (const auto& r : kAsympto) {
          char line[96];
          std::snprintf(line, sizeof(line), "%-9s %-21s %s\n", r[0], r[1], r[2]);
          out << line;
        }
        out << "\nconcrete families (eps = 0)\n";
        out << "family          n     k     quantum  bound_log3  bound_nk  bound_log2\n";
        for (const auto& r : rows) {
          char line[128];
          std::snprintf(line, sizeof(line), "%-15s %-5lld %-5lld %-8lld %-11.4f %-9.4f %.4f\n",
                        r.family.c_str(), static_cast<long long>(r.n),
                        static_cast<long long>(r.k), static_cast<long long>(r.quantum),
                        r.bounds.bound_log3, r.bounds.bound_nk, r.bounds.bound_log2);
          out << line;
        }
      }
    };
  });

  // Global flags may trail a subcommand (e.g. `run wm ... --format json`).
  std::function<void(CLI::App*)> enable_fallthrough = [&](CLI::App* cmd) {
    for (CLI::App* sub : cmd->get_subcommands({})) {
      sub->fallthrough();
      enable_fallthrough(sub);
    }
  };
  enable_fallthrough(&app);

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  if (action) action();
  return 0;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(std::move(args), out, err);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace wmq
