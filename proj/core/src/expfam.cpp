#include "epca/expfam.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "epca/errors.hpp"

namespace epca {

namespace {

std::string format_number(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double parse_param(std::string_view text, std::string_view spec) {
  double value = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw InvalidArgument("invalid family parameter in '" + std::string(spec) + "'");
  }
  return value;
}

}  // namespace

ExponentialFamily ExponentialFamily::poisson() noexcept { return {FamilyKind::poisson, 0.0}; }

ExponentialFamily ExponentialFamily::gaussian(double variance) {
  if (!(variance >= 0.0) || !std::isfinite(variance)) {
    throw InvalidArgument("gaussian variance must be finite and nonnegative");
  }
  return {FamilyKind::gaussian, variance};
}

ExponentialFamily ExponentialFamily::binomial(int trials) {
  if (trials < 1) throw InvalidArgument("binomial trial count must be positive");
  return {FamilyKind::binomial, static_cast<double>(trials)};
}

ExponentialFamily ExponentialFamily::negative_binomial(double dispersion) {
  if (!(dispersion > 0.0) || !std::isfinite(dispersion)) {
    throw InvalidArgument("negative binomial dispersion must be finite and positive");
  }
  return {FamilyKind::negative_binomial, dispersion};
}

ExponentialFamily ExponentialFamily::parse(std::string_view spec) {
  const auto colon = spec.find(':');
  const std::string_view name = spec.substr(0, colon);
  const bool has_param = colon != std::string_view::npos;
  const std::string_view param = has_param ? spec.substr(colon + 1) : std::string_view{};

  if (name == "poisson") {
    if (has_param) throw InvalidArgument("poisson takes no parameter: '" + std::string(spec) + "'");
    return poisson();
  }
  if (!has_param) {
    throw InvalidArgument("family '" + std::string(spec) + "' requires a parameter");
  }
  if (name == "gaussian") return gaussian(parse_param(param, spec));
  if (name == "negbin") return negative_binomial(parse_param(param, spec));
  if (name == "binomial") {
    const double k = parse_param(param, spec);
    if (k != std::floor(k) || k < 1 || k > 1e9) {
      throw InvalidArgument("binomial trial count must be a positive integer: '" +
                            std::string(spec) + "'");
    }
    return binomial(static_cast<int>(k));
  }
  throw InvalidArgument("unknown family '" + std::string(spec) + "'");
}

MeanDomain ExponentialFamily::mean_domain() const noexcept {
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (kind_) {
    case FamilyKind::gaussian:
      return {-inf, inf};
    case FamilyKind::binomial:
      return {0.0, param_};
    case FamilyKind::poisson:
    case FamilyKind::negative_binomial:
      break;
  }
  return {0.0, inf};
}

std::string ExponentialFamily::to_string() const {
  switch (kind_) {
    case FamilyKind::poisson:
      return "poisson";
    case FamilyKind::gaussian:
      return "gaussian:" + format_number(param_);
    case FamilyKind::binomial:
      return "binomial:" + format_number(param_);
    case FamilyKind::negative_binomial:
      return "negbin:" + format_number(param_);
  }
  return "poisson";
}

bool validate_mean(const ExponentialFamily& family, double m) noexcept {
  return family.mean_domain().contains(m);
}

double variance_map(const ExponentialFamily& family, double m, bool clamp_means) {
  const MeanDomain dom = family.mean_domain();
  if (!dom.contains(m)) {
    if (!clamp_means || std::isnan(m)) {
      std::ostringstream msg;
      msg << "mean " << m << " outside the domain of family " << family.to_string();
      throw DomainError(msg.str());
    }
    m = dom.clamp(m);
  }
  const double q = family.parameter();
  switch (family.kind()) {
    case FamilyKind::poisson:
      return m;
    case FamilyKind::gaussian:
      return q;
    case FamilyKind::binomial:
      return m * (1.0 - m / q);
    case FamilyKind::negative_binomial:
      return m + m * m / q;
  }
  return m;
}

}  // namespace epca
