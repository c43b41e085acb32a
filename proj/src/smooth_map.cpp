#include "algpois/smooth_map.hpp"

namespace algpois {

SmoothMap compose(const SmoothMap& g, const SmoothMap& f) {
  if (g.in_dim() != f.out_dim()) throw Error(ErrorCode::DimensionMismatch, "compose");
  return SmoothMap(f.in_dim(), g.out_dim(), [g, f](auto in, auto out) {
    using S = typename decltype(out)::value_type;
    std::vector<S> mid(f.out_dim(), S(0.0));
    f.eval<S>(in, mid);
    g.eval<S>(mid, out);
  });
}

SmoothMap constant_map(int in, std::vector<double> values) {
  const int q = static_cast<int>(values.size());
  return SmoothMap(in, q, [values](auto, auto out) {
    for (size_t i = 0; i < values.size(); ++i) out[i] = values[i];
  });
}

SmoothMap coordinate(int in, int index) {
  return SmoothMap(in, 1, [index](auto x, auto out) { out[0] = x[index]; });
}

}  // namespace algpois
