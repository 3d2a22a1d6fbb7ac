// Fits declared free parameters of a line config to aggregate targets with
// the Nelder-Mead simplex minimiser from GSL, then writes the fitted config
// with its targets recorded in the calibration block.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <algorithm>
#include <fstream>
#include <iostream>
#include <string>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <CLI11.hpp>

#include "leangreen/calibration.hpp"

using namespace leangreen;

namespace {

struct Problem {
  LineConfig base;
  CalibrationSpec spec;
  std::size_t evaluations = 0;
};

// The optimiser works in unbounded coordinates; each parameter is mapped
// into its [min, max] box through a logistic transform.
double to_box(double x, const FreeParam& p) { return p.lower + (p.upper - p.lower) / (1.0 + std::exp(-x)); }

double from_box(double v, const FreeParam& p) {
  const double t = std::clamp((v - p.lower) / (p.upper - p.lower), 1e-9, 1.0 - 1e-9);
  return std::log(t / (1.0 - t));
}

LineConfig materialise(const Problem& pr, const gsl_vector* x) {
  LineConfig c = pr.base;
  for (std::size_t i = 0; i < pr.spec.params.size(); ++i)
    set_param(c, pr.spec.params[i], to_box(gsl_vector_get(x, i), pr.spec.params[i]));
  return c;
}

double objective(const gsl_vector* x, void* data) {
  auto* pr = static_cast<Problem*>(data);
  ++pr->evaluations;
  try {
    return calibration_loss(materialise(*pr, x), pr->spec);
  } catch (const Error&) {
    return GSL_POSINF;
  }
}

// Rounds through decimal text so the written config holds short literals.
double round_to(double v, double step) {
  if (!(step > 0)) return v;
  const int decimals = std::max(0, static_cast<int>(std::ceil(-std::log10(step) - 1e-9)));
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, std::round(v / step) * step);
  return std::strtod(buf, nullptr);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fit line-config parameters to aggregate targets"};
  std::string config_path, spec_path, out_path;
  app.add_option("--config", config_path, "line config to start from")->required();
  app.add_option("--spec", spec_path, "calibration spec (free parameters and targets)")->required();
  app.add_option("--out", out_path, "where to write the fitted config")->required();
  CLI11_PARSE(app, argc, argv);

  try {
    Problem pr{load_config_file(config_path), calibration_spec_from_json(parse_json_text(read_text_file(spec_path))),
               0};
    const std::size_t n = pr.spec.params.size();
    std::printf("initial loss %.6g\n", calibration_loss(pr.base, pr.spec));

    gsl_vector* x = gsl_vector_alloc(n);
    gsl_vector* step = gsl_vector_alloc(n);
    for (std::size_t i = 0; i < n; ++i) {
      const FreeParam& p = pr.spec.params[i];
      const double v = get_param(pr.base, p);
      if (v < p.lower || v > p.upper) throw SchemaError(p.id, "starting value outside [min, max]");
      gsl_vector_set(x, i, from_box(v, p));
      gsl_vector_set(step, i, pr.spec.initial_step);
    }

    gsl_multimin_function f{&objective, n, &pr};
    gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
    gsl_multimin_fminimizer_set(s, &f, x, step);
    int status = GSL_CONTINUE;
    std::size_t iter = 0;
    while (status == GSL_CONTINUE && iter < pr.spec.max_iterations) {
      ++iter;
      if (gsl_multimin_fminimizer_iterate(s)) break;
      status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), 1e-7);
    }
    LineConfig fitted = materialise(pr, s->x);
    for (const auto& p : pr.spec.params) set_param(fitted, p, round_to(get_param(fitted, p), pr.spec.round_to));
    gsl_multimin_fminimizer_free(s);
    gsl_vector_free(x);
    gsl_vector_free(step);

    fitted.calibration_targets = pr.spec.targets;
    if (!pr.spec.note.empty()) fitted.calibration_note = pr.spec.note;
    for (const auto& p : pr.spec.params) {
      if (p.kind == ParamKind::LinkDuration || p.kind == ParamKind::LinkPower) detail::find_link(fitted, p.id).provenance = "calibrated";
      else detail::find_station(fitted, p.id).provenance = "calibrated";
    }

    const RunReport r = simulate(fitted, pr.spec.seed, pr.spec.replications, {FactorMode::Derived, 0.95, "-"}, 1);
    std::printf("iterations %zu, evaluations %zu, final loss %.6g\n", iter, pr.evaluations,
                calibration_loss(fitted, pr.spec));
    for (const auto& p : pr.spec.params) std::printf("  %-22s %g\n", p.id.c_str(), get_param(fitted, p));
    for (const auto& t : pr.spec.targets)
      std::printf("  %-22s target %10.3f  simulated %10.3f\n", t.quantity.c_str(), t.value,
                  report_quantity(r, t.quantity));

    std::ofstream out(out_path, std::ios::binary);
    out << serialize_config(fitted);
    if (!out) throw InputError("cannot write " + out_path);
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
