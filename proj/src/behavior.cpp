#include "ncbm/behavior.hpp"

#include <cmath>
#include <sstream>

namespace ncbm {

namespace {

bool in_unit_interval(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

}  // namespace

std::optional<BehaviorState> parse_state(std::string_view token) {
  for (int i = 0; i < 4; ++i)
    if (token == kStateNames[i]) return BehaviorState(i);
  return std::nullopt;
}

BehaviorParams validate_params(double a, double b, double c, double d, double e, double eta) {
  const struct {
    const char* name;
    double value;
  } probs[] = {{"a", a}, {"b", b}, {"c", c}, {"d", d}, {"e", e}};
  for (const auto& p : probs) {
    if (!in_unit_interval(p.value)) {
      std::ostringstream msg;
      msg << "OutOfRange: parameter " << p.name << " = " << p.value << " must lie in [0,1]";
      throw ValidationError(msg.str());
    }
  }
  if (!(std::isfinite(eta) && eta > 1.0)) {
    std::ostringstream msg;
    msg << "OutOfRange: parameter eta = " << eta << " must exceed 1";
    throw ValidationError(msg.str());
  }
  // Small tolerance so exact grid endpoints like a = 1 - c - d survive rounding.
  constexpr double kRowTol = 1e-12;
  if (a + c + d > 1.0 + kRowTol) {
    std::ostringstream msg;
    msg << "RowOverflow: row W requires a + c + d <= 1, got " << a + c + d;
    throw ValidationError(msg.str());
  }
  if (b + c + d > 1.0 + kRowTol) {
    std::ostringstream msg;
    msg << "RowOverflow: row D requires b + c + d <= 1, got " << b + c + d;
    throw ValidationError(msg.str());
  }
  return BehaviorParams{a, b, c, d, e, eta};
}

EmbeddedTpm build_tpm(const BehaviorParams& params) {
  const double a = params.a, b = params.b, c = params.c, d = params.d, e = params.e;
  // max() absorbs the -1e-16 that 1-(a+c+d) can produce at row-sum boundaries.
  const double w_diag = std::max(0.0, 1.0 - (a + c + d));
  const double d_diag = std::max(0.0, 1.0 - (b + c + d));
  EmbeddedTpm tpm;
  tpm.p = Mat4{Vec4{w_diag, a, c, d},
               Vec4{b, d_diag, c, d},
               Vec4{0.0, 0.0, 1.0 - d, d},
               Vec4{e, 0.0, 0.0, 1.0 - e}};
  return tpm;
}

StatusThresholds validate_thresholds(double drop, double forward, double inject) {
  const struct {
    const char* name;
    double value;
  } ts[] = {{"theta_drop", drop}, {"theta_forward", forward}, {"theta_inject", inject}};
  for (const auto& t : ts) {
    if (!in_unit_interval(t.value)) {
      std::ostringstream msg;
      msg << "OutOfRange: threshold " << t.name << " = " << t.value << " must lie in [0,1]";
      throw ValidationError(msg.str());
    }
  }
  return StatusThresholds{drop, forward, inject};
}

std::optional<BehaviorState> classify_status(const ObservedLevels& obs,
                                             const StatusThresholds& thresholds) {
  if (obs.d == 1.0) return BehaviorState::Loss;
  if (obs.c > thresholds.inject && obs.b < thresholds.forward) return BehaviorState::Inject;
  if (obs.a > thresholds.drop) return BehaviorState::Drop;
  if (obs.a < thresholds.drop && obs.b > thresholds.forward && obs.e == 1.0)
    return BehaviorState::Forward;
  return std::nullopt;
}

}  // namespace ncbm
