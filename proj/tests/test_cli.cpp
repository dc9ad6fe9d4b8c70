#include "commands.hpp"

#include "uflow/apps.hpp"
#include "uflow/io.hpp"
#include "uflow/liealg.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace uflow;
namespace fs = std::filesystem;
using io::json;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("uflow_cli_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int counter() {
    static int c = 0;
    return c++;
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ComplexMatrix diag2(double a, double b) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m.diagonal() << a, b;
  return m;
}

} // namespace

TEST_CASE("flow command: Hermitian demo, determinism, exit codes") {
  TempDir dir;
  io::write_matrix_file(dir.file("a.json"), diag2(2, 1));
  io::write_matrix_file(dir.file("c.json"), diag2(3, 1));

  json cfg{{"kind", "U1K"},
           {"A", "a.json"},
           {"C", "c.json"},
           {"restriction", {{"kind", "full"}}},
           {"rule", {{"analytic", json::object()}}},
           {"restarts", 8},
           {"seed", 3}};
  io::write_json_file(dir.file("cfg.json"), cfg);

  const std::string out = dir.file("result.json");
  const std::string trace = dir.file("trace.csv");
  CHECK(cli::run({"flow", "--config", dir.file("cfg.json"), "--out", out,
                  "--trace", trace}) == 0);
  const json res = io::read_json_file(out);
  CHECK(std::abs(res.at("final_f").get<double>() - 7.0) <= 1e-6);
  CHECK(res.at("converged").get<bool>());

  // Byte-identical re-run, also under parallel restarts.
  const std::string first = slurp(trace);
  CHECK(cli::run({"flow", "--config", dir.file("cfg.json"), "--out", out,
                  "--trace", trace}) == 0);
  CHECK(slurp(trace) == first);
  CHECK(cli::run({"--jobs", "2", "flow", "--config", dir.file("cfg.json"),
                  "--out", out, "--trace", trace}) == 0);
  CHECK(slurp(trace) == first);

  // Header per the trace contract.
  CHECK(first.rfind("k,f,grad_norm,alpha,unitarity_defect\n", 0) == 0);
}

TEST_CASE("flow command rejects bad configs with exit 1") {
  TempDir dir;
  io::write_matrix_file(dir.file("a.json"), diag2(2, 1));
  io::write_matrix_file(dir.file("c.json"), diag2(3, 1));

  // U3 with an explicit first init but no second one.
  io::write_matrix_file(dir.file("u0.json"), ComplexMatrix::Identity(2, 2));
  json cfg{{"kind", "U3"},
           {"A", "a.json"},
           {"C", "c.json"},
           {"init", "u0.json"}};
  io::write_json_file(dir.file("cfg.json"), cfg);
  CHECK(cli::run({"flow", "--config", dir.file("cfg.json"), "--out",
                  dir.file("r.json"), "--trace", dir.file("t.csv")}) == 1);

  // Unknown kind.
  cfg["kind"] = "U9";
  io::write_json_file(dir.file("cfg2.json"), cfg);
  CHECK(cli::run({"flow", "--config", dir.file("cfg2.json"), "--out",
                  dir.file("r.json"), "--trace", dir.file("t.csv")}) == 1);

  // Missing A.
  json cfg3{{"kind", "U1"}, {"C", "c.json"}};
  io::write_json_file(dir.file("cfg3.json"), cfg3);
  CHECK(cli::run({"flow", "--config", dir.file("cfg3.json"), "--out",
                  dir.file("r.json"), "--trace", dir.file("t.csv")}) == 1);
}

TEST_CASE("flow command returns 2 when the iteration budget is exhausted") {
  TempDir dir;
  io::write_matrix_file(dir.file("a.json"), diag2(2, 1));
  io::write_matrix_file(dir.file("c.json"), diag2(3, 1));
  json cfg{{"kind", "U1"},    {"A", "a.json"},  {"C", "c.json"},
           {"max_iter", 2},   {"restarts", 2},  {"seed", 4}};
  io::write_json_file(dir.file("cfg.json"), cfg);
  CHECK(cli::run({"flow", "--config", dir.file("cfg.json"), "--out",
                  dir.file("r.json"), "--trace", dir.file("t.csv")}) == 2);
}

TEST_CASE("sweep command: endpoint values, determinism, bad range") {
  TempDir dir;
  const std::string out = dir.file("sweep.csv");
  CHECK(cli::run({"sweep", "--family", "3q", "--smin", "0", "--smax", "1",
                  "--steps", "2", "--restarts", "20", "--seed", "7", "--out",
                  out}) == 0);
  const std::string body = slurp(out);
  CHECK(body.rfind("s,overlap,delta,measureI_value,restarts_used,converged\n",
                   0) == 0);
  std::stringstream ss(body);
  std::string line;
  std::getline(ss, line); // header
  std::getline(ss, line);
  double s, overlap, delta;
  char comma;
  std::stringstream row(line);
  row >> s >> comma >> overlap >> comma >> delta;
  CHECK(s == 0.0);
  CHECK(std::abs(delta - 5.0 / 9.0) <= 1e-3);

  CHECK(cli::run({"sweep", "--family", "3q", "--smin", "0", "--smax", "1",
                  "--steps", "2", "--restarts", "20", "--seed", "7", "--out",
                  dir.file("sweep2.csv")}) == 0);
  CHECK(slurp(dir.file("sweep2.csv")) == body);

  CHECK(cli::run({"sweep", "--family", "3q", "--smin", "0.8", "--smax", "0.2",
                  "--out", out}) == 1);
  CHECK(cli::run({"sweep", "--family", "5q", "--out", out}) == 1);
}

TEST_CASE("sweep command: 4q product-limit sanity row") {
  TempDir dir;
  const std::string out = dir.file("sweep4.csv");
  CHECK(cli::run({"sweep", "--family", "4q", "--smin", "0", "--smax", "0",
                  "--steps", "1", "--restarts", "12", "--seed", "5", "--out",
                  out}) == 0);
  std::stringstream ss(slurp(out));
  std::string line;
  std::getline(ss, line);
  std::getline(ss, line);
  std::stringstream row(line);
  double s, overlap, delta;
  char comma;
  row >> s >> comma >> overlap >> comma >> delta;
  CHECK(std::abs(delta - 0.75) <= 1e-3);
}

TEST_CASE("reversibility command: pointwise tau handling and verdicts") {
  TempDir dir;
  json spec{{"n", 2},
            {"terms", json::array({{{"type", "ZZ"}, {"k", 1}, {"l", 2},
                                    {"J", 1.0}}})}};
  io::write_json_file(dir.file("h.json"), spec);

  const std::string out = dir.file("rev.json");
  CHECK(cli::run({"reversibility", "--spec", dir.file("h.json"), "--mode",
                  "pointwise", "--tau", "0", "--restarts", "8", "--seed", "2",
                  "--out", out}) == 0);
  json res = io::read_json_file(out);
  CHECK(res.at("reversible").get<bool>());
  CHECK(std::abs(res.at("min_value").get<double>() + 1.0) <= 1e-6);
  CHECK(res.contains("K1"));
  CHECK(res.contains("K2"));

  // pointwise without tau is an input error
  CHECK(cli::run({"reversibility", "--spec", dir.file("h.json"), "--mode",
                  "pointwise", "--out", out}) == 1);

  CHECK(cli::run({"reversibility", "--spec", dir.file("h.json"), "--mode",
                  "joint", "--restarts", "8", "--seed", "2", "--out", out}) ==
        0);
  res = io::read_json_file(out);
  CHECK(res.at("reversible").get<bool>());
  CHECK(res.contains("K"));
}

TEST_CASE("rank1 command: W residual, rank-1 file, oracle flag") {
  TempDir dir;
  const Tensor w = tensor_unvec(apps::build_state(apps::NamedState::W),
                                {2, 2, 2});
  io::write_tensor_file(dir.file("w.json"), w);
  const std::string out = dir.file("r1.json");
  CHECK(cli::run({"rank1", "--tensor", dir.file("w.json"), "--restarts", "20",
                  "--seed", "9", "--out", out}) == 0);
  json res = io::read_json_file(out);
  CHECK(std::abs(res.at("residual_sq").get<double>() - 5.0 / 9.0) <= 1e-4);

  // Exactly representable tensor.
  ComplexVector e1 = ComplexVector::Zero(2);
  e1(0) = 1.0;
  Tensor prod = rank1_tensor({e1, e1, e1});
  io::write_tensor_file(dir.file("prod.json"), prod);
  CHECK(cli::run({"rank1", "--tensor", dir.file("prod.json"), "--restarts",
                  "4", "--seed", "1", "--out", out}) == 0);
  res = io::read_json_file(out);
  CHECK(std::abs(res.at("residual_sq").get<double>()) <= 1e-8);

  // Oracle cross-check on a random tensor.
  std::mt19937_64 rng(12);
  Tensor t = make_tensor({2, 2, 2});
  t.data = ginibre(8, 1, rng).col(0);
  io::write_tensor_file(dir.file("t.json"), t);
  CHECK(cli::run({"rank1", "--tensor", dir.file("t.json"), "--restarts", "12",
                  "--seed", "3", "--out", out, "--oracle"}) == 0);
  res = io::read_json_file(out);
  CHECK(res.contains("oracle"));
  CHECK(res.at("oracle").at("abs_diff").get<double>() <= 1e-4);

  // Malformed tensor file.
  io::write_json_file(dir.file("bad.json"), json{{"dims", {2, 2}}});
  CHECK(cli::run({"rank1", "--tensor", dir.file("bad.json"), "--out", out}) ==
        1);
}

TEST_CASE("controllability command: Ising chains and an abelian generator") {
  TempDir dir;
  // sigma_z alone: dimension 1, not full.
  json gens{{"generators",
             json::array({io::matrix_to_json(
                 lie::pauli_skew(lie::PauliAxis::Z))})}};
  io::write_json_file(dir.file("gz.json"), gens);
  const std::string out = dir.file("ctrl.json");
  CHECK(cli::run({"controllability", "--generators", dir.file("gz.json"),
                  "--out", out}) == 0);
  json res = io::read_json_file(out);
  CHECK(res.at("dimension").get<int>() == 1);
  CHECK_FALSE(res.at("full").get<bool>());

  // Two-qubit Ising drift plus local x/y controls: su(4).
  ComplexMatrix z = ComplexMatrix::Zero(2, 2);
  z.diagonal() << 1, -1;
  json g2 = json::array();
  g2.push_back(io::matrix_to_json(Complex(0, 1) * kron(z, z)));
  for (int k = 1; k <= 2; ++k) {
    g2.push_back(io::matrix_to_json(
        lie::embed_single_site(k, 2, lie::pauli_skew(lie::PauliAxis::X))));
    g2.push_back(io::matrix_to_json(
        lie::embed_single_site(k, 2, lie::pauli_skew(lie::PauliAxis::Y))));
  }
  io::write_json_file(dir.file("g2.json"), json{{"generators", g2}});
  CHECK(cli::run({"controllability", "--generators", dir.file("g2.json"),
                  "--out", out}) == 0);
  res = io::read_json_file(out);
  CHECK(res.at("dimension").get<int>() == 15);
  CHECK(res.at("full").get<bool>());

  io::write_json_file(dir.file("empty.json"),
                      json{{"generators", json::array()}});
  CHECK(cli::run({"controllability", "--generators", dir.file("empty.json"),
                  "--out", out}) == 1);
}

TEST_CASE("dbflow command: sorted value, drift column, determinism") {
  TempDir dir;
  ComplexMatrix a = ComplexMatrix::Zero(3, 3), c = ComplexMatrix::Zero(3, 3);
  a.diagonal() << 1.2, 0.4, 2.5;
  c.diagonal() << 3, 2, 1;
  io::write_matrix_file(dir.file("a.json"), a);
  io::write_matrix_file(dir.file("c.json"), c);
  json cfg{{"kind", "U1P"}, {"A", "a.json"}, {"C", "c.json"},
           {"restarts", 6}, {"seed", 11}};
  io::write_json_file(dir.file("cfg.json"), cfg);

  const std::string out = dir.file("db.json");
  const std::string trace = dir.file("db.csv");
  const int code =
      cli::run({"dbflow", "--config", dir.file("cfg.json"), "--out", out,
                "--trace", trace});
  CHECK((code == 0 || code == 2));
  const json res = io::read_json_file(out);
  // Sorted-spectrum optimum: 2.5*3 + 1.2*2 + 0.4*1 = 10.3.
  CHECK(std::abs(res.at("final_f").get<double>() - 10.3) <= 1e-6);
  CHECK(res.at("max_spectrum_drift").get<double>() <= 1e-8);
  const std::string body = slurp(trace);
  CHECK(body.rfind("k,f,grad_norm,alpha,unitarity_defect,spectrum_drift\n",
                   0) == 0);

  cli::run({"dbflow", "--config", dir.file("cfg.json"), "--out", out,
            "--trace", dir.file("db2.csv")});
  CHECK(slurp(dir.file("db2.csv")) == body);
}
