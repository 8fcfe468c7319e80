#include "twomode/mode_models.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "twomode/error.hpp"

namespace twomode {

ModeKernel::ModeKernel(Evaluator evaluator, bool lattice, std::string name)
    : eval_(std::move(evaluator)), lattice_(lattice), name_(std::move(name)) {}

double PlaneWaveModel::fringe_half_wavenumber() const {
  return 2.0 * std::numbers::pi * k0_momentum().norm();
}

PlaneWaveModel make_plane_wave(std::array<int, 3> k0, int dims) {
  if (dims < 1 || dims > 3) throw ParameterError("dims", "plane waves support 1 to 3 dimensions");
  for (int i = dims; i < 3; ++i)
    if (k0[static_cast<std::size_t>(i)] != 0)
      throw ParameterError("k0", "k0 has components beyond the model dimension");
  if (k0[0] == 0 && k0[1] == 0 && k0[2] == 0) throw ParameterError("k0", "k0 must be nonzero");
  return PlaneWaveModel{k0, dims};
}

ModeKernel plane_wave_kernel(const PlaneWaveModel& model) {
  PlaneWaveModel m = make_plane_wave(model.k0, model.dims);
  const Momentum two_k0 = 2.0 * m.k0_momentum();
  auto eval = [two_k0](Mode x, Mode y, const Momentum& q) -> std::complex<double> {
    // q is compared exactly; off-lattice arguments simply miss every delta.
    Momentum target;
    if (x == Mode::a && y == Mode::b) target = -two_k0;
    if (x == Mode::b && y == Mode::a) target = two_k0;
    return q == target ? 1.0 : 0.0;
  };
  return ModeKernel(eval, true, "plane-wave");
}

namespace {

void check_gaussian(const GaussianModel& model) {
  if (!(model.alpha > 0.0) || !std::isfinite(model.alpha)) throw ParameterError("alpha", "alpha must be positive");
  if (!(model.t >= 0.0) || !std::isfinite(model.t)) throw ParameterError("t", "t must be non-negative");
}

}  // namespace

double k0_of_t(const GaussianModel& model) { return model.alpha * model.t / (1.0 + model.t * model.t); }

ModeKernel gaussian_kernel(const GaussianModel& model) {
  check_gaussian(model);
  const double alpha = model.alpha;
  const double w = 1.0 + model.t * model.t;
  const double k0 = k0_of_t(model);
  const double overlap = std::exp(-alpha * alpha / w);
  auto eval = [=](Mode x, Mode y, const Momentum& q) -> std::complex<double> {
    const double k = q.x();
    if (x == y) {
      double s = (x == Mode::a) ? k : -k;
      return std::polar(std::exp(-w * s * s / 4.0), s * alpha);
    }
    double s = (x == Mode::a) ? k : -k;
    return overlap * std::exp(-w * (s + 2.0 * k0) * (s + 2.0 * k0) / 4.0);
  };
  return ModeKernel(eval, false, "gaussian");
}

double orthogonality_report(const GaussianModel& model) { return std::exp(-model.alpha * model.alpha); }

bool is_quasi_orthogonal(const GaussianModel& model, double tolerance) {
  return orthogonality_report(model) <= tolerance;
}

std::complex<double> gaussian_mode(const GaussianModel& model, Mode mode, double x) {
  check_gaussian(model);
  const std::complex<double> z(1.0, model.t);
  const double centre = (mode == Mode::a) ? -model.alpha : model.alpha;
  const double d = x - centre;
  return std::pow(std::numbers::pi, -0.25) / std::sqrt(z) * std::exp(-d * d / (2.0 * z));
}

ModeKernel kernel_for(const ModeModel& model) {
  return std::visit(
      [](const auto& m) -> ModeKernel {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, PlaneWaveModel>)
          return plane_wave_kernel(m);
        else
          return gaussian_kernel(m);
      },
      model);
}

Momentum fringe_wavevector(const ModeModel& model) {
  if (const auto* pw = std::get_if<PlaneWaveModel>(&model)) return 2.0 * pw->k0_momentum();
  return Momentum(2.0 * k0_of_t(std::get<GaussianModel>(model)));
}

double fringe_half_wavenumber(const ModeModel& model) {
  if (const auto* pw = std::get_if<PlaneWaveModel>(&model)) return pw->fringe_half_wavenumber();
  return k0_of_t(std::get<GaussianModel>(model));
}

double mode_density(const ModeModel& model, Mode mode, double x) {
  if (std::holds_alternative<PlaneWaveModel>(model)) return 1.0;
  return std::norm(gaussian_mode(std::get<GaussianModel>(model), mode, x));
}

std::string describe(const ModeModel& model) {
  std::ostringstream os;
  if (const auto* pw = std::get_if<PlaneWaveModel>(&model)) {
    os << "plane-wave k0=(" << pw->k0[0] << "," << pw->k0[1] << "," << pw->k0[2] << ") dims=" << pw->dims;
  } else {
    const auto& g = std::get<GaussianModel>(model);
    os << "gaussian alpha=" << g.alpha << " t=" << g.t;
  }
  return os.str();
}

}  // namespace twomode
