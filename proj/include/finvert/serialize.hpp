#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "finvert/charpoly.hpp"
#include "finvert/deconv1d.hpp"
#include "finvert/elementary.hpp"
#include "finvert/rl_baseline.hpp"
#include "finvert/separable2d.hpp"

namespace finvert {

using Json = nlohmann::json;

/// Deterministic rendering: sorted keys, two-space indent, reals with 17
/// significant digits, non-finite reals as null.
std::string dump_json(const Json& j);

Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);

/// {"coefficients": [c(-N) ... c(N)]} or {"half": [c(0) ... c(N)]}.
Filter filter_from_json(const Json& j);
Json filter_to_json(const Filter& f);

/// {"matrix": [[row], ...]} or {"cs": [...], "ct": [...]} (full coefficient lists).
Kernel2D kernel_from_json(const Json& j);
Json kernel_to_json(const Kernel2D& k);

/// Filter layout plus {"metadata": {pseudo, truncationBound, p}}.
Json inverse_to_json(const InverseFilter& inv, const std::vector<std::complex<double>>& params);

Json factor_to_json(const ElementaryFactor& f);
Json decomposition_to_json(const Decomposition& d);
Json report_to_json(const DeconvReport& r);
Json report_to_json(const Deconv2DReport& r);
Json comparison_to_json(const ComparisonRecord& r, bool include_runtimes);

}  // namespace finvert
