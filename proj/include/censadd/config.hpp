#pragma once

#include "censadd/pipeline.hpp"
#include "censadd/simulate.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace censadd {

//! Reads a JSON document; parse errors become std::invalid_argument.
nlohmann::json load_json_file(const std::string& path);

//! Throws std::invalid_argument if `object` is not an object or has a key
//! outside `allowed`.
void require_keys(const nlohmann::json& object,
                  const std::vector<std::string>& allowed,
                  const std::string& context);

PsiSpec parse_psi(const nlohmann::json& j);
KernelSpec parse_kernel_spec(const nlohmann::json& j);
IntegrationDensity parse_integration_density(const nlohmann::json& j);

//! Applies a fit configuration on top of `base` for data of dimension d.
//! Unknown keys and a q or grid count different from d are errors.
FitSettings parse_fit_settings(const nlohmann::json& j, std::size_t d, FitSettings base = {});

DgpSpec parse_dgp(const nlohmann::json& j);

struct StudyConfig
{
  DgpSpec dgp = DgpSpec::paper();
  StudySettings settings;
  std::size_t n = 1000;
  std::size_t replicates = 500;
  std::vector<Probe> probes;
};

//! Fit defaults for studies on the reference model: Epanechnikov kernels of
//! order 2, h = 0.2 at n = 1000 for both rules, q uniform on [-1, 1].
FitSettings study_default_fit();

//! Probes are written with 1-based axes.
StudyConfig parse_study_config(const nlohmann::json& j);

nlohmann::json fit_to_json(const FitResult& result);
nlohmann::json study_to_json(const StudyResult& result);

} // namespace censadd
