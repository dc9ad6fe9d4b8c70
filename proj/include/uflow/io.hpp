#pragma once

// Shared file formats: the JSON matrix/vector/tensor schemas, subalgebra
// and Hamiltonian specs, and deterministic CSV emission (17 significant
// digits, '.' decimal, LF endings).

#include "uflow/apps.hpp"
#include "uflow/liealg.hpp"
#include "uflow/matcore.hpp"
#include "uflow/tensor.hpp"

#include <filesystem>
#include <string>
#include <vector>

// vendored single-header nlohmann/json
#include <json.hpp>

namespace uflow::io {

using json = nlohmann::json;

/// {"rows":N,"cols":M,"re":[[...]],"im":[[...]]}, row-major.
json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const json& j);

/// {"dims":[...],"re":[...],"im":[...]}, flat lexicographic entries.
json tensor_to_json(const Tensor& t);
Tensor tensor_from_json(const json& j);

json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);

ComplexMatrix read_matrix_file(const std::filesystem::path& path);
void write_matrix_file(const std::filesystem::path& path,
                       const ComplexMatrix& m);
Tensor read_tensor_file(const std::filesystem::path& path);
void write_tensor_file(const std::filesystem::path& path, const Tensor& t);

/// {"kind":"local","n":3} | {"kind":"partition","dims":[2,4]} |
/// {"kind":"stabilizer","E":<matrix file ref>} | {"kind":"full"}.
/// Matrix refs are resolved relative to base_dir.
lie::SubalgebraBasis subalgebra_from_json(const json& j, Eigen::Index ambient_dim,
                                          const std::filesystem::path& base_dir);

/// {"n":4,"terms":[{"type":"ZZ","k":1,"l":2,"J":1.0}],
///  "fields":[{"site":1,"axis":"z","h":0.5}]}
apps::HamiltonianSpec hamiltonian_from_json(const json& j);

/// Format a double with 17 significant digits.
std::string format_g17(double v);

/// Write rows of preformatted cells as CSV with a header, LF endings.
void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

} // namespace uflow::io
