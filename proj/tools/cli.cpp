#include "cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "finvert/deconv1d.hpp"
#include "finvert/error.hpp"
#include "finvert/imaging_io.hpp"
#include "finvert/rl_baseline.hpp"
#include "finvert/separable2d.hpp"
#include "finvert/serialize.hpp"

namespace finvert::cli {

namespace {

namespace fs = std::filesystem;

const std::map<std::string, BoundaryPolicy> kBoundaries{
    {"reflect", BoundaryPolicy::Reflect}, {"zero", BoundaryPolicy::Zero}, {"periodic", BoundaryPolicy::Periodic}};

// Blur used by the demos: invertible [1, 2.3, 1] per axis, and a sampled
// Gaussian wide enough for its factors to be oscillatory.
constexpr double kDemoInvertibleP = 2.3;
constexpr std::size_t kDemoGaussianRadius = 2;
constexpr double kDemoGaussianSigma = 1.5;

struct Common {
  double epsTrunc = kDefaultEpsTrunc;
  BoundaryPolicy boundary = BoundaryPolicy::Reflect;
  std::size_t trim = 1;
  std::size_t iterations = 50;
  std::uint64_t seed = 1;
  double noiseSigma = -1.0;  // negative: use the demo's default
  std::string out;
  bool json = false;
  bool timings = false;
  bool boundaryMatched = false;
};

DeconvOptions deconv_options(const Common& c) {
  DeconvOptions o;
  o.epsTrunc = c.epsTrunc;
  o.boundary = c.boundary;
  o.trimPerNoninvertibleFactor = c.trim;
  o.boundaryMatched = c.boundaryMatched;
  return o;
}

std::string complex_text(std::complex<double> p) {
  std::ostringstream os;
  os << std::setprecision(10) << p.real();
  if (p.imag() != 0.0) os << (p.imag() < 0 ? " - " : " + ") << std::abs(p.imag()) << "i";
  return os.str();
}

std::string rational_text(const Rational& r) {
  if (!r.defined()) return "undefined";
  return std::to_string(r.num) + "/" + std::to_string(r.den);
}

void print_decomposition(std::ostream& out, const Decomposition& d) {
  out << "gain: " << format_real(d.gain) << "\n";
  out << "factors: " << d.factors.size() << "\n";
  for (std::size_t i = 0; i < d.factors.size(); ++i) {
    const auto& f = d.factors[i];
    out << "  [" << i << "] p = " << complex_text(f.p) << "  " << to_string(f.klass) << "\n";
  }
  out << "residual: " << d.residual << "\n";
}

void print_resolution(std::ostream& out, const DeconvReport& r) {
  out << "invertible: " << r.invertibleCount << ", non-invertible: " << r.noninvertibleCount
      << ", lengthLoss: " << r.lengthLoss << "\n";
  out << "nyquist interval: " << rational_text(r.nyquistBefore) << " -> " << rational_text(r.nyquistAfter)
      << (r.degenerate ? " (degenerate)" : "") << "\n";
}

fs::path report_path_for(const std::string& out, const std::string& explicit_path) {
  if (!explicit_path.empty()) return explicit_path;
  fs::path p(out);
  p.replace_extension(".report.json");
  return p;
}

int cmd_analyze(const std::string& filter_path, std::size_t length, const Common& c, std::ostream& out) {
  const Filter f = filter_from_json(read_json(filter_path));
  const Decomposition d = decompose(f);
  const DeconvReport r = resolution_report(d, length);
  if (c.json) {
    out << dump_json(Json{{"order", f.order()}, {"signalLength", length}, {"report", report_to_json(r)}});
    return kOk;
  }
  out << "order: " << f.order() << "\n";
  print_decomposition(out, d);
  out << "signal length: " << length << "\n";
  print_resolution(out, r);
  return kOk;
}

int cmd_invert(const std::string& filter_path, std::size_t pseudo_half, const Common& c, std::ostream& out) {
  const Filter f = filter_from_json(read_json(filter_path));
  const Decomposition d = decompose(f);
  std::vector<std::complex<double>> params;
  for (const auto& fac : d.factors) params.push_back(fac.p);

  InverseFilter inv{Sequence::unitary()};
  const bool all_invertible =
      std::all_of(d.factors.begin(), d.factors.end(), [](const auto& x) { return is_invertible(x.klass); });
  if (all_invertible) {
    inv = build_inverse(d, c.epsTrunc);
  } else if (pseudo_half > 0 && d.factors.size() == 1 && d.factors[0].klass == FactorClass::Oscillatory) {
    inv = pseudo_inverse(d.factors[0].p.real(), pseudo_half);
    std::vector<double> z = inv.z.values();
    for (double& v : z) v /= d.gain;
    inv.z = Sequence(std::move(z), inv.z.origin());
  } else {
    return build_inverse(d, c.epsTrunc), kOk;  // throws NotInvertible naming the factors
  }

  const Json j = inverse_to_json(inv, params);
  if (c.out.empty()) {
    out << dump_json(j);
    return kOk;
  }
  write_json(c.out, j);
  if (c.json) {
    out << dump_json(Json{{"out", c.out}, {"length", inv.z.size()}, {"z0", inv.z.at(0)},
                          {"truncationBound", inv.truncationBound}, {"pseudo", inv.pseudo}});
  } else {
    out << "wrote " << c.out << ": " << inv.z.size() << " taps, z(0) = " << format_real(inv.z.at(0))
        << ", truncation bound " << inv.truncationBound << (inv.pseudo ? " (pseudo-inverse)" : "") << "\n";
  }
  return kOk;
}

int cmd_deconv(const std::string& filter_path, const std::string& signal_path, long origin,
               const std::string& truth_path, long truth_origin, const std::string& report_path, const Common& c,
               std::ostream& out) {
  if (c.out.empty()) throw Error(ErrorCode::InvalidInput, "deconv: --out is required");
  const Filter f = filter_from_json(read_json(filter_path));
  const Sequence y = read_csv_signal(signal_path, origin);
  const DeconvResult r = truth_path.empty()
                             ? deconvolve(y, f, deconv_options(c))
                             : deconvolve(y, f, deconv_options(c), read_csv_signal(truth_path, truth_origin));
  write_csv_signal(c.out, r.signal);
  const Json j{{"outputFirst", r.signal.first()},
               {"outputLast", r.signal.last()},
               {"interior", {r.interiorFirst, r.interiorLast}},
               {"report", report_to_json(r.report)}};
  const fs::path rp = report_path_for(c.out, report_path);
  write_json(rp, j);
  if (c.json) {
    out << dump_json(j);
  } else {
    print_decomposition(out, r.report.factors);
    print_resolution(out, r.report);
    out << "output: " << c.out << " (" << r.signal.size() << " samples, t = " << r.signal.first() << ".."
        << r.signal.last() << "), report: " << rp.string() << "\n";
    if (r.report.interiorRms) out << "interior rms: " << *r.report.interiorRms << "\n";
  }
  return kOk;
}

Kernel2D load_kernel(const std::string& kernel_path, const std::string& cs_path, const std::string& ct_path) {
  if (!kernel_path.empty()) return kernel_from_json(read_json(kernel_path));
  if (cs_path.empty() || ct_path.empty()) {
    throw Error(ErrorCode::InvalidInput, "need --kernel, or both --cs and --ct");
  }
  return Kernel2D::outer(filter_from_json(read_json(cs_path)), filter_from_json(read_json(ct_path)));
}

int cmd_deconv2d(const std::string& kernel_path, const std::string& cs_path, const std::string& ct_path,
                 const std::string& image_path, const std::string& truth_path, const std::string& report_path,
                 const Common& c, std::ostream& out) {
  if (c.out.empty()) throw Error(ErrorCode::InvalidInput, "deconv2d: --out is required");
  const Kernel2D k = load_kernel(kernel_path, cs_path, ct_path);
  const Image img = read_pgm(fs::path(image_path));
  const Deconv2DResult r = truth_path.empty() ? deconvolve2d(img, k, deconv_options(c))
                                              : deconvolve2d(img, k, deconv_options(c), read_pgm(fs::path(truth_path)));
  write_pgm(fs::path(c.out), r.image);
  const Json j{{"offset", {r.offsetX, r.offsetY}},
               {"size", {r.image.width(), r.image.height()}},
               {"interior", {r.interiorX0, r.interiorY0, r.interiorX1, r.interiorY1}},
               {"report", report_to_json(r.report)}};
  const fs::path rp = report_path_for(c.out, report_path);
  write_json(rp, j);
  if (c.json) {
    out << dump_json(j);
  } else {
    out << "output: " << c.out << " (" << r.image.width() << "x" << r.image.height() << ", offset " << r.offsetX
        << "," << r.offsetY << "), report: " << rp.string() << "\n";
    if (r.report.interiorRms) out << "interior rms: " << *r.report.interiorRms << "\n";
  }
  return kOk;
}

int cmd_rl(const std::string& psf_path, const std::string& image_path, const Common& c, std::ostream& out) {
  if (c.out.empty()) throw Error(ErrorCode::InvalidInput, "rl: --out is required");
  const Kernel2D psf = kernel_from_json(read_json(psf_path));
  RLOptions o;
  o.iterations = c.iterations;
  o.boundary = c.boundary;
  const Image restored = richardson_lucy(read_pgm(fs::path(image_path)), psf, o);
  write_pgm(fs::path(c.out), restored);
  if (c.json)
    out << dump_json(Json{{"out", c.out}, {"iterations", c.iterations}});
  else
    out << "output: " << c.out << " after " << c.iterations << " iterations\n";
  return kOk;
}

int cmd_demo(const std::string& name, std::size_t size, std::size_t tile, const Common& c, std::ostream& out) {
  if (c.out.empty()) throw Error(ErrorCode::InvalidInput, "demo: --out directory is required");
  Kernel2D psf = Kernel2D::unitary();
  double sigma = 0.0;
  if (name == "checkerboard-invertible" || name == "checkerboard-noise") {
    const Filter e({1.0, kDemoInvertibleP, 1.0});
    psf = Kernel2D::outer(e, e).normalized();
    sigma = name == "checkerboard-noise" ? 0.05 : 0.0;
  } else if (name == "checkerboard-gaussian") {
    psf = Kernel2D::gaussian(kDemoGaussianRadius, kDemoGaussianSigma);
  } else {
    throw Error(ErrorCode::InvalidInput, "demo: unknown demo '" + name + "'");
  }
  if (c.noiseSigma >= 0.0) sigma = c.noiseSigma;

  const Image truth = checkerboard(size, size, tile);
  Image observed = filter_image(truth, psf, BoundaryPolicy::Reflect);
  // Sensor counts cannot go negative.
  if (sigma > 0.0) observed = clamp(add_gaussian_noise(observed, {sigma, c.seed}), 0.0, 1e300);

  CompareOptions opts;
  opts.direct = deconv_options(c);
  opts.direct.boundaryMatched = true;  // the demo blurs with filter_image under Reflect
  opts.rl.iterations = c.iterations;
  const Comparison cmp = compare_methods(truth, observed, psf, opts);

  const fs::path dir(c.out);
  fs::create_directories(dir);
  write_pgm(dir / "original.pgm", truth);
  write_pgm(dir / "blurred.pgm", observed);
  write_pgm(dir / "direct.pgm", cmp.direct);
  write_pgm(dir / "rl.pgm", cmp.rl);
  Json record = comparison_to_json(cmp.record, c.timings);
  record["demo"] = name;
  record["noiseSigma"] = sigma;
  record["seed"] = c.seed;
  record["size"] = size;
  record["tile"] = tile;
  write_json(dir / "comparison.json", record);

  if (c.json) {
    out << dump_json(record);
  } else {
    const auto& r = cmp.record;
    out << "demo " << name << " -> " << dir.string() << "\n"
        << "  rms blurred: " << r.rmsBlurred << "\n"
        << "  rms direct:  " << r.rmsDirect << " (factor space " << r.rmsDirectFactorSpace << ")\n"
        << "  rms RL:      " << r.rmsRL << " (" << r.iterations << " iterations)\n"
        << "  window: " << r.width << "x" << r.height << " at " << r.x0 << "," << r.y0 << "\n"
        << "  runtime ms: direct " << r.runtimeDirectMs << ", RL " << r.runtimeRLMs << "\n";
  }
  return kOk;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotInvertible: return kNotInvertible;
    case ErrorCode::ConvergenceFailure:
    case ErrorCode::DegenerateBasis:
    case ErrorCode::UseKernelPath:
    case ErrorCode::TrivialKernel: return kNumericalFailure;
    default: return kInputError;
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Direct deconvolution with finite symmetric filters"};
  app.require_subcommand(1);
  Common c;

  auto add_eps = [&](CLI::App* sub) {
    sub->add_option("--eps-trunc", c.epsTrunc, "Truncation threshold of exact inverses")->check(CLI::PositiveNumber);
  };
  auto add_boundary = [&](CLI::App* sub) {
    sub->add_option("--boundary", c.boundary, "Boundary extension: reflect, zero, periodic")
        ->transform(CLI::CheckedTransformer(kBoundaries, CLI::ignore_case));
  };
  auto add_matched = [&](CLI::App* sub) {
    sub->add_flag("--boundary-matched", c.boundaryMatched,
                  "Input was blurred under the same boundary rule; measure up to the edges");
  };
  auto add_common = [&](CLI::App* sub) {
    sub->add_flag("--json", c.json, "Print a JSON report instead of text");
  };

  std::string filter_path, signal_path, truth_path, report_path, kernel_path, cs_path, ct_path, image_path,
      demo_name;
  std::size_t length = 256, pseudo_half = 0, size = 64, tile = 8;
  long origin = 0, truth_origin = 0;

  auto* analyze = app.add_subcommand("analyze", "Decompose a filter and classify its factors");
  analyze->add_option("filter", filter_path, "Filter JSON")->required();
  analyze->add_option("--length", length, "Signal length for the resolution summary");
  add_common(analyze);

  auto* invert = app.add_subcommand("invert", "Write the inverse (or pseudo-inverse) of a filter");
  invert->add_option("filter", filter_path, "Filter JSON")->required();
  invert->add_option("--out", c.out, "Output JSON (stdout when omitted)");
  invert->add_option("--pseudo", pseudo_half, "Half-length of a pseudo-inverse for an oscillatory elementary filter");
  add_eps(invert);
  add_common(invert);

  auto* deconv = app.add_subcommand("deconv", "Deconvolve a 1D signal");
  deconv->add_option("--filter", filter_path, "Filter JSON")->required();
  deconv->add_option("--signal", signal_path, "Observed signal CSV")->required();
  deconv->add_option("--origin", origin, "Lattice index of the first signal sample is -origin");
  deconv->add_option("--truth", truth_path, "Ground-truth CSV for the interior RMS");
  deconv->add_option("--truth-origin", truth_origin, "Origin of the ground-truth CSV");
  deconv->add_option("--report", report_path, "Report JSON (default: next to --out)");
  deconv->add_option("--trim", c.trim, "Samples trimmed per side per non-invertible factor");
  deconv->add_option("--out", c.out, "Output CSV")->required();
  add_eps(deconv);
  add_boundary(deconv);
  add_matched(deconv);
  add_common(deconv);

  auto* deconv2d = app.add_subcommand("deconv2d", "Deconvolve a PGM image with a separable kernel");
  deconv2d->add_option("--kernel", kernel_path, "Kernel JSON");
  deconv2d->add_option("--cs", cs_path, "Column-direction filter JSON");
  deconv2d->add_option("--ct", ct_path, "Row-direction filter JSON");
  deconv2d->add_option("--image", image_path, "Observed PGM")->required();
  deconv2d->add_option("--truth", truth_path, "Ground-truth PGM for the interior RMS");
  deconv2d->add_option("--report", report_path, "Report JSON (default: next to --out)");
  deconv2d->add_option("--trim", c.trim, "Samples trimmed per side per non-invertible factor");
  deconv2d->add_option("--out", c.out, "Output PGM")->required();
  add_eps(deconv2d);
  add_boundary(deconv2d);
  add_matched(deconv2d);
  add_common(deconv2d);

  auto* rl = app.add_subcommand("rl", "Richardson-Lucy deconvolution of a PGM image");
  rl->add_option("--psf", kernel_path, "PSF kernel JSON")->required();
  rl->add_option("--image", image_path, "Observed PGM")->required();
  rl->add_option("--iterations", c.iterations, "Iteration count")->check(CLI::PositiveNumber);
  rl->add_option("--out", c.out, "Output PGM")->required();
  add_boundary(rl);
  add_common(rl);

  auto* demo = app.add_subcommand("demo", "Checkerboard experiments comparing direct inversion with RL");
  demo->add_option("name", demo_name, "checkerboard-invertible | checkerboard-noise | checkerboard-gaussian")
      ->required()
      ->check(CLI::IsMember({"checkerboard-invertible", "checkerboard-noise", "checkerboard-gaussian"}));
  demo->add_option("--out", c.out, "Output directory")->required();
  demo->add_option("--size", size, "Image side length")->check(CLI::PositiveNumber);
  demo->add_option("--tile", tile, "Checkerboard tile size")->check(CLI::PositiveNumber);
  demo->add_option("--seed", c.seed, "Noise seed");
  demo->add_option("--noise-sigma", c.noiseSigma, "Noise standard deviation")->check(CLI::NonNegativeNumber);
  demo->add_option("--iterations", c.iterations, "RL iteration count")->check(CLI::PositiveNumber);
  demo->add_flag("--timings", c.timings, "Include runtimes in comparison.json");
  add_eps(demo);
  add_common(demo);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(filter_path, length, c, out);
    if (invert->parsed()) return cmd_invert(filter_path, pseudo_half, c, out);
    if (deconv->parsed())
      return cmd_deconv(filter_path, signal_path, origin, truth_path, truth_origin, report_path, c, out);
    if (deconv2d->parsed())
      return cmd_deconv2d(kernel_path, cs_path, ct_path, image_path, truth_path, report_path, c, out);
    if (rl->parsed()) return cmd_rl(kernel_path, image_path, c, out);
    if (demo->parsed()) return cmd_demo(demo_name, size, tile, c, out);
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

}  // namespace finvert::cli
