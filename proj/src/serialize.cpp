#include "finvert/serialize.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "finvert/error.hpp"
#include "finvert/imaging_io.hpp"

namespace finvert {

namespace {

void dump_into(std::string& out, const Json& j, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
  switch (j.type()) {
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_real(v) : "null";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        out += pad;
        dump_into(out, j[i], depth + 1);
        out += (i + 1 < j.size()) ? ",\n" : "\n";
      }
      out += close_pad + "]";
      return;
    }
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      std::size_t i = 0;
      for (auto it = j.begin(); it != j.end(); ++it, ++i) {
        out += pad + Json(it.key()).dump() + ": ";
        dump_into(out, it.value(), depth + 1);
        out += (i + 1 < j.size()) ? ",\n" : "\n";
      }
      out += close_pad + "}";
      return;
    }
    default:
      out += j.dump();
  }
}

std::vector<double> real_list(const Json& j, const char* what) {
  if (!j.is_array()) throw Error(ErrorCode::Parse, std::string(what) + " must be an array of numbers");
  std::vector<double> v;
  for (const auto& x : j) {
    if (!x.is_number()) throw Error(ErrorCode::Parse, std::string(what) + " must contain only numbers");
    v.push_back(x.get<double>());
  }
  return v;
}

Json complex_to_json(std::complex<double> p) {
  if (p.imag() == 0.0) return p.real();
  return Json{{"re", p.real()}, {"im", p.imag()}};
}

Json rational_to_json(const Rational& r) {
  if (!r.defined()) return nullptr;
  return Json{{"num", r.num}, {"den", r.den}, {"value", r.value()}};
}

}  // namespace

std::string dump_json(const Json& j) {
  std::string out;
  dump_into(out, j, 0);
  out += "\n";
  return out;
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Parse, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::Parse, path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidInput, "cannot open " + path.string() + " for writing");
  out << dump_json(j);
}

Filter filter_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::Parse, "filter: expected a JSON object");
  if (j.contains("coefficients")) return Filter(real_list(j.at("coefficients"), "filter coefficients"));
  if (j.contains("half")) return Filter::from_half(real_list(j.at("half"), "filter half"));
  throw Error(ErrorCode::Parse, "filter: expected \"coefficients\" or \"half\"");
}

Json filter_to_json(const Filter& f) { return Json{{"coefficients", f.coefficients()}}; }

Kernel2D kernel_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::Parse, "kernel: expected a JSON object");
  if (j.contains("matrix")) {
    const Json& m = j.at("matrix");
    if (!m.is_array() || m.empty()) throw Error(ErrorCode::Parse, "kernel: matrix must be a non-empty array");
    std::vector<double> values;
    std::size_t width = 0;
    for (const auto& row : m) {
      auto r = real_list(row, "kernel row");
      if (width == 0) width = r.size();
      if (r.size() != width) throw Error(ErrorCode::Parse, "kernel: ragged matrix");
      values.insert(values.end(), r.begin(), r.end());
    }
    return Kernel2D(width, m.size(), std::move(values));
  }
  if (j.contains("cs") && j.contains("ct")) {
    return Kernel2D::outer(Filter(real_list(j.at("cs"), "cs")), Filter(real_list(j.at("ct"), "ct")));
  }
  throw Error(ErrorCode::Parse, "kernel: expected \"matrix\" or \"cs\"/\"ct\"");
}

Json kernel_to_json(const Kernel2D& k) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < k.height(); ++r) {
    auto begin = k.values().begin() + static_cast<std::ptrdiff_t>(r * k.width());
    rows.push_back(std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(k.width())));
  }
  return Json{{"matrix", rows}};
}

Json inverse_to_json(const InverseFilter& inv, const std::vector<std::complex<double>>& params) {
  Json p = Json::array();
  for (const auto& x : params) p.push_back(complex_to_json(x));
  return Json{{"coefficients", inv.z.values()},
              {"metadata", {{"pseudo", inv.pseudo}, {"truncationBound", inv.truncationBound}, {"p", p}}}};
}

Json factor_to_json(const ElementaryFactor& f) {
  Json j{{"p", complex_to_json(f.p)}, {"class", to_string(f.klass)}};
  if (f.conjugatePartner) j["conjugatePartner"] = *f.conjugatePartner;
  return j;
}

Json decomposition_to_json(const Decomposition& d) {
  Json factors = Json::array();
  for (const auto& f : d.factors) factors.push_back(factor_to_json(f));
  return Json{{"gain", d.gain}, {"factors", factors}, {"residual", d.residual}};
}

Json report_to_json(const DeconvReport& r) {
  Json j{{"decomposition", decomposition_to_json(r.factors)},
         {"invertibleCount", r.invertibleCount},
         {"noninvertibleCount", r.noninvertibleCount},
         {"lengthLoss", r.lengthLoss},
         {"nyquistBefore", rational_to_json(r.nyquistBefore)},
         {"nyquistAfter", rational_to_json(r.nyquistAfter)},
         {"degenerate", r.degenerate},
         {"partiallyRestored", r.partiallyRestored},
         {"inverseHalfSupport", r.inverseHalfSupport},
         {"boundaryGuard", r.boundaryGuard}};
  j["interiorRms"] = r.interiorRms ? Json(*r.interiorRms) : Json(nullptr);
  return j;
}

Json report_to_json(const Deconv2DReport& r) {
  Json j{{"rows", report_to_json(r.rows)},
         {"columns", report_to_json(r.columns)},
         {"widthLoss", r.widthLoss},
         {"heightLoss", r.heightLoss},
         {"partiallyRestored", r.partiallyRestored}};
  j["interiorRms"] = r.interiorRms ? Json(*r.interiorRms) : Json(nullptr);
  return j;
}

Json comparison_to_json(const ComparisonRecord& r, bool include_runtimes) {
  Json j{{"rmsBlurred", r.rmsBlurred},
         {"rmsDirect", r.rmsDirect},
         {"rmsRL", r.rmsRL},
         {"rmsDirectFactorSpace", r.rmsDirectFactorSpace},
         {"iterations", r.iterations},
         {"window", {{"x0", r.x0}, {"y0", r.y0}, {"width", r.width}, {"height", r.height}}},
         {"direct", report_to_json(r.directReport)}};
  if (include_runtimes) j["runtimesMs"] = {{"direct", r.runtimeDirectMs}, {"rl", r.runtimeRLMs}};
  return j;
}

}  // namespace finvert
