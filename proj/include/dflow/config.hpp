#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dflow/disc_function.hpp"
#include "dflow/halfplane.hpp"
#include "dflow/laplace.hpp"
#include "dflow/measure.hpp"

namespace dflow {

using Json = nlohmann::json;

/// Bad configuration input. Every problem carries the JSON pointer of the
/// offending value, e.g. "/checks/2/inputs/measure/atoms/0/mass: must be >= 0".
class SchemaError : public std::runtime_error {
 public:
  explicit SchemaError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Complex numbers are written as a number or as [re, im].
cplx parse_complex(const Json& j, const std::string& path);
double parse_real(const Json& j, const std::string& path);
int parse_int(const Json& j, const std::string& path);
std::vector<double> parse_reals(const Json& j, const std::string& path);
std::vector<cplx> parse_complexes(const Json& j, const std::string& path);

/// {"type": "lebesgue", "c": 1} | {"type": "dirac", "theta": t, "mass": m} |
/// {"atoms": [{"theta", "mass"}], "density": {"grid", "values"}} |
/// {"type": "sum", "terms": [...]}
CircleMeasure parse_circle_measure(const Json& j, const std::string& path);

/// {"rho": r, "nu": {"atoms": [{"tau", "mass"}], "density": {"grid", "values"}}}
HalfPlaneWeightSpec parse_weight(const Json& j, const std::string& path);

/// {"type": "polynomial", "coeffs": [...]} | {"type": "monomial", "n", "c"} |
/// {"type": "inner_exp", "t"} | {"type": "cayley_exp", "c"} |
/// {"type": "sum" | "product", "terms": [...]}
DiscFunction parse_disc_function(const Json& j, const std::string& path);

/// {"type": "rational", "p", "q"} | {"type": "exp_line", "t"} |
/// {"type": "laplace", "of": <time function>} | {"type": "sum" | "product", "terms"}
HalfPlaneFunction parse_halfplane_function(const Json& j, const std::string& path);

/// {"type": "exp_poly", "terms": [{"k", "a", "coeff"}], "shift"} |
/// {"type": "samples", "grid", "values", "tail": {"type": "exp", "a"}} |
/// {"type": "sum", "terms": [...]} | {"type": "zero"}
TimeFunction parse_time_function(const Json& j, const std::string& path);

/// List of coefficient lists.
std::vector<std::vector<cplx>> parse_polynomials(const Json& j, const std::string& path);

}  // namespace dflow
