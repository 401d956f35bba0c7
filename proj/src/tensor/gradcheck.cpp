#include "lsamarl/tensor/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lsamarl {

GradCheckResult finite_diff_check(const std::function<Var(Graph&, const ParamSet&)>& loss, ParamSet params,
                                  double h, double scale_floor) {
  auto evaluate = [&](const ParamSet& ps) {
    Graph g;
    return loss(g, ps).value()[0];
  };

  GradientMap grads;
  {
    Graph g;
    Var out = loss(g, params);
    grads = g.backward(out);
  }

  GradCheckResult result;
  for (ParamId id = 0; id < params.size(); ++id) {
    auto it = grads.find(id);
    for (std::size_t k = 0; k < params.value(id).size(); ++k) {
      double& x = params.value(id)[k];
      const double saved = x;
      // Use the steps actually taken after rounding, not the nominal h.
      const volatile double hi = saved + h;
      const volatile double lo = saved - h;
      x = hi;
      const double up = evaluate(params);
      x = lo;
      const double down = evaluate(params);
      x = saved;
      const double numeric = (up - down) / (hi - lo);
      const double autodiff = it == grads.end() ? 0.0 : it->second[k];
      const double abs_err = std::abs(autodiff - numeric);
      const double denom = std::max({std::abs(autodiff), std::abs(numeric), scale_floor});
      result.max_abs_error = std::max(result.max_abs_error, abs_err);
      result.max_rel_error = std::max(result.max_rel_error, abs_err / denom);
      ++result.coordinates;
    }
  }
  return result;
}

GradCheckResult finite_diff_check(const LossBuilder& loss, std::vector<Tensor> point, double h,
                                  double scale_floor) {
  ParamSet params;
  for (std::size_t i = 0; i < point.size(); ++i) params.add("x" + std::to_string(i), std::move(point[i]));
  return finite_diff_check(
      [&loss](Graph& g, const ParamSet& ps) {
        std::vector<Var> leaves;
        for (ParamId id = 0; id < ps.size(); ++id) leaves.push_back(g.param(ps, id));
        return loss(g, leaves);
      },
      std::move(params), h, scale_floor);
}

}  // namespace lsamarl
