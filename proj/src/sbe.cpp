#include "kpzlab/sbe.hpp"

namespace kpzlab {

void SimConfig::validate() const {
  if (K < 1) throw std::invalid_argument("SimConfig: K must be >= 1");
  if (!(dt > 0)) throw std::invalid_argument("SimConfig: dt must be > 0");
  if (!(T >= dt)) throw std::invalid_argument("SimConfig: T must be >= dt");
  if (!(nu > 0) || !(D > 0)) throw std::invalid_argument("SimConfig: nu and D must be > 0");
  if (N < 1 || L_noise < 1) throw std::invalid_argument("SimConfig: mollification levels must be >= 1");
  if (drift != "symmetric" && drift != "plain") throw std::invalid_argument("SimConfig: drift must be symmetric|plain");
  if (she != "lognormal" && she != "euler") throw std::invalid_argument("SimConfig: she must be lognormal|euler");
}

StandardForm normalize_parameters(double nu, double D, double lambda) {
  if (!(nu > 0) || !(D > 0)) throw std::invalid_argument("normalize_parameters: nu and D must be > 0");
  StandardForm f;
  f.lambda = lambda * std::sqrt(D / (2 * nu * nu * nu));
  f.time_factor = 1.0 / nu;
  f.amplitude = std::sqrt(2 * nu / D);
  return f;
}

// explicit instantiations for the scalar type used by the tools
template struct Workspace<double>;
template class CoupledSbe<double>;

}  // namespace kpzlab
