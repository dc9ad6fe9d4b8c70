#include "uflow/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace uflow::io {

namespace {

[[noreturn]] void bad_field(const std::string& what) {
  throw std::invalid_argument("malformed input: " + what);
}

} // namespace

json matrix_to_json(const ComplexMatrix& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json rrow = json::array(), irow = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      rrow.push_back(m(i, j).real());
      irow.push_back(m(i, j).imag());
    }
    re.push_back(std::move(rrow));
    im.push_back(std::move(irow));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

ComplexMatrix matrix_from_json(const json& j) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols"))
    bad_field("matrix object needs \"rows\" and \"cols\"");
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  if (rows < 1 || cols < 1) bad_field("matrix dimensions must be positive");
  if (!j.contains("re") || !j.at("re").is_array())
    bad_field("matrix object needs row-major \"re\" array");
  const json& re = j.at("re");
  const json* im = j.contains("im") ? &j.at("im") : nullptr;
  if (re.size() != static_cast<std::size_t>(rows) ||
      (im && im->size() != static_cast<std::size_t>(rows)))
    bad_field("matrix \"re\"/\"im\" row count mismatch");
  ComplexMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& rrow = re.at(i);
    if (rrow.size() != static_cast<std::size_t>(cols))
      bad_field("matrix \"re\" column count mismatch");
    for (Eigen::Index k = 0; k < cols; ++k) {
      const double imval = im ? im->at(i).at(k).get<double>() : 0.0;
      m(i, k) = Complex(rrow.at(k).get<double>(), imval);
    }
  }
  return m;
}

json tensor_to_json(const Tensor& t) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < t.data.size(); ++i) {
    re.push_back(t.data(i).real());
    im.push_back(t.data(i).imag());
  }
  return json{{"dims", t.dims}, {"re", re}, {"im", im}};
}

Tensor tensor_from_json(const json& j) {
  if (!j.is_object() || !j.contains("dims") || !j.at("dims").is_array())
    bad_field("tensor object needs \"dims\"");
  std::vector<Eigen::Index> dims;
  for (const auto& d : j.at("dims")) dims.push_back(d.get<Eigen::Index>());
  Tensor t = make_tensor(dims);
  if (!j.contains("re") || j.at("re").size() != static_cast<std::size_t>(t.size()))
    bad_field("tensor \"re\" length must equal the product of dims");
  const json& re = j.at("re");
  const json* im = j.contains("im") ? &j.at("im") : nullptr;
  if (im && im->size() != static_cast<std::size_t>(t.size()))
    bad_field("tensor \"im\" length must equal the product of dims");
  for (Eigen::Index i = 0; i < t.size(); ++i)
    t.data(i) = Complex(re.at(i).get<double>(),
                        im ? im->at(i).get<double>() : 0.0);
  return t;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path.string());
  json j;
  in >> j;
  return j;
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  out << j.dump(2) << "\n";
}

ComplexMatrix read_matrix_file(const std::filesystem::path& path) {
  return matrix_from_json(read_json_file(path));
}

void write_matrix_file(const std::filesystem::path& path,
                       const ComplexMatrix& m) {
  write_json_file(path, matrix_to_json(m));
}

Tensor read_tensor_file(const std::filesystem::path& path) {
  return tensor_from_json(read_json_file(path));
}

void write_tensor_file(const std::filesystem::path& path, const Tensor& t) {
  write_json_file(path, tensor_to_json(t));
}

lie::SubalgebraBasis subalgebra_from_json(const json& j, Eigen::Index ambient_dim,
                                          const std::filesystem::path& base_dir) {
  if (!j.is_object() || !j.contains("kind"))
    bad_field("restriction needs a \"kind\"");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "local") {
    if (!j.contains("n")) bad_field("restriction kind \"local\" needs \"n\"");
    return lie::local_subalgebra_basis(j.at("n").get<int>());
  }
  if (kind == "partition") {
    if (!j.contains("dims"))
      bad_field("restriction kind \"partition\" needs \"dims\"");
    std::vector<Eigen::Index> dims;
    for (const auto& d : j.at("dims")) dims.push_back(d.get<Eigen::Index>());
    return lie::partition_subalgebra_basis(dims);
  }
  if (kind == "stabilizer") {
    if (!j.contains("E"))
      bad_field("restriction kind \"stabilizer\" needs \"E\"");
    const ComplexMatrix e =
        j.at("E").is_string()
            ? read_matrix_file(base_dir / j.at("E").get<std::string>())
            : matrix_from_json(j.at("E"));
    return lie::stabilizer_subalgebra(e);
  }
  if (kind == "full") return lie::full_su_basis(ambient_dim);
  bad_field("unknown restriction kind \"" + kind + "\"");
}

apps::HamiltonianSpec hamiltonian_from_json(const json& j) {
  if (!j.is_object() || !j.contains("n"))
    bad_field("hamiltonian spec needs qubit count \"n\"");
  apps::HamiltonianSpec spec;
  spec.n = j.at("n").get<int>();
  if (j.contains("terms"))
    for (const auto& t : j.at("terms")) {
      apps::CouplingTerm term;
      term.type = apps::coupling_from_name(t.at("type").get<std::string>());
      term.k = t.at("k").get<int>();
      term.l = t.at("l").get<int>();
      term.weight = t.value("J", 1.0);
      spec.terms.push_back(term);
    }
  if (j.contains("fields"))
    for (const auto& f : j.at("fields")) {
      apps::LocalField field;
      field.site = f.at("site").get<int>();
      const std::string axis = f.at("axis").get<std::string>();
      if (axis != "x" && axis != "y" && axis != "z")
        bad_field("field axis must be x, y or z");
      field.axis = axis[0];
      field.weight = f.value("h", 1.0);
      spec.fields.push_back(field);
    }
  return spec;
}

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i)
    out << header[i] << (i + 1 < header.size() ? "," : "");
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << row[i] << (i + 1 < row.size() ? "," : "");
    out << "\n";
  }
}

} // namespace uflow::io
