#include "caravan/samplers.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace caravan {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::vector<double> parse_params(std::string_view text) {
  std::vector<double> out;
  std::string buf(text);
  std::stringstream ss(buf);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad law parameter '" + item + "'");
    }
  }
  return out;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t counter) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(counter + 0x632be59bd9b4e019ULL));
}

double open_uniform(Rng& rng) {
  // 53 random bits shifted to the midpoints of the dyadic grid.
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

CaravanLaw CaravanLaw::pareto(double alpha, double xm) {
  CaravanLaw law;
  law.family = Family::Pareto;
  law.alpha = alpha;
  law.xm = xm;
  law.validate();
  return law;
}

CaravanLaw CaravanLaw::exponential(double rate) {
  CaravanLaw law;
  law.family = Family::Exponential;
  law.rate = rate;
  law.validate();
  return law;
}

CaravanLaw CaravanLaw::deterministic(double value) {
  CaravanLaw law;
  law.family = Family::Deterministic;
  law.value = value;
  law.validate();
  return law;
}

CaravanLaw CaravanLaw::geometric(double q) {
  CaravanLaw law;
  law.family = Family::Geometric;
  law.q = q;
  law.validate();
  return law;
}

CaravanLaw CaravanLaw::parse(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view name = text.substr(0, colon);
  const std::vector<double> params =
      colon == std::string_view::npos ? std::vector<double>{} : parse_params(text.substr(colon + 1));
  auto need = [&](std::size_t n) {
    if (params.size() != n) {
      throw std::invalid_argument("law '" + std::string(name) + "' takes " + std::to_string(n) +
                                  " parameter(s)");
    }
  };
  if (name == "pareto") {
    need(2);
    return pareto(params[0], params[1]);
  }
  if (name == "exponential") {
    need(1);
    return exponential(params[0]);
  }
  if (name == "deterministic") {
    need(1);
    return deterministic(params[0]);
  }
  if (name == "geometric") {
    need(1);
    return geometric(params[0]);
  }
  throw std::invalid_argument("unknown law family '" + std::string(name) + "'");
}

std::string CaravanLaw::describe() const {
  std::ostringstream os;
  os.precision(std::numeric_limits<double>::max_digits10);
  switch (family) {
    case Family::Pareto: os << "pareto:" << alpha << ',' << xm; break;
    case Family::Exponential: os << "exponential:" << rate; break;
    case Family::Deterministic: os << "deterministic:" << value; break;
    case Family::Geometric: os << "geometric:" << q; break;
  }
  return os.str();
}

void CaravanLaw::validate() const {
  switch (family) {
    case Family::Pareto:
      if (!(alpha > 1.0) || !(xm > 0.0)) throw std::invalid_argument("pareto needs alpha > 1, xm > 0");
      break;
    case Family::Exponential:
      if (!(rate > 0.0)) throw std::invalid_argument("exponential needs rate > 0");
      break;
    case Family::Deterministic:
      if (!(value > 0.0)) throw std::invalid_argument("deterministic needs value > 0");
      break;
    case Family::Geometric:
      if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("geometric needs q in (0, 1]");
      break;
  }
}

double CaravanLaw::mean() const {
  switch (family) {
    case Family::Pareto: return alpha * xm / (alpha - 1.0);
    case Family::Exponential: return 1.0 / rate;
    case Family::Deterministic: return value;
    case Family::Geometric: return 1.0 / q;
  }
  return 0.0;
}

double CaravanLaw::second_moment() const {
  switch (family) {
    case Family::Pareto:
      return alpha > 2.0 ? alpha * xm * xm / (alpha - 2.0) : std::numeric_limits<double>::infinity();
    case Family::Exponential: return 2.0 / (rate * rate);
    case Family::Deterministic: return value * value;
    case Family::Geometric: return (2.0 - q) / (q * q);
  }
  return 0.0;
}

double CaravanLaw::index() const {
  return family == Family::Pareto && alpha < 2.0 ? alpha : 2.0;
}

double CaravanLaw::tail_constant() const {
  if (family != Family::Pareto) throw std::logic_error("tail constant is defined for pareto laws");
  return std::pow(xm, alpha);
}

bool CaravanLaw::integer_valued() const {
  return family == Family::Geometric ||
         (family == Family::Deterministic && value == std::floor(value));
}

double CaravanLaw::sample(Rng& rng) const {
  switch (family) {
    case Family::Pareto: return xm * std::pow(open_uniform(rng), -1.0 / alpha);
    case Family::Exponential: return -std::log(open_uniform(rng)) / rate;
    case Family::Deterministic: return value;
    case Family::Geometric: {
      std::geometric_distribution<long long> g(q);
      return static_cast<double>(g(rng) + 1);
    }
  }
  return 0.0;
}

std::vector<double> sample_lengths(const CaravanLaw& law, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample_lengths needs n >= 1");
  law.validate();
  Rng rng(seed);
  std::vector<double> out(n);
  for (double& l : out) l = law.sample(rng);
  return out;
}

TruncatedLengths truncate_to_budget(std::span<const double> lengths, double budget) {
  if (!(budget > 0.0)) throw std::invalid_argument("budget must be positive");
  std::size_t k = 0;
  return truncate_to_budget_stream(
      [&] {
        if (k == lengths.size()) throw std::invalid_argument("lengths exhausted before the budget");
        return lengths[k++];
      },
      budget);
}

CaravanInstance make_instance(const CaravanLaw& law, double eps, std::uint64_t seed) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
  law.validate();
  Rng length_rng(derive_seed(seed, 0));
  Rng arrival_rng(derive_seed(seed, 1));
  const TruncatedLengths lt = truncate_to_budget_stream([&] { return law.sample(length_rng); }, 1.0 / eps);

  CaravanInstance inst;
  inst.masses.reserve(lt.count);
  inst.arrivals.reserve(lt.count);
  for (double l : lt.lengths) {
    inst.masses.push_back(eps * l);
    inst.arrivals.push_back(CirclePoint::wrap(std::generate_canonical<double, 53>(arrival_rng)));
  }
  return inst;
}

GridPath brownian_bridge(std::size_t grid, Rng& rng) {
  if (grid < 2) throw std::invalid_argument("brownian_bridge needs G >= 2");
  std::normal_distribution<double> step(0.0, 1.0 / std::sqrt(static_cast<double>(grid)));
  GridPath path;
  path.values.resize(grid + 1);
  path.values[0] = 0.0;
  for (std::size_t k = 1; k <= grid; ++k) path.values[k] = path.values[k - 1] + step(rng);
  const double end = path.values[grid];
  const double g = static_cast<double>(grid);
  for (std::size_t k = 1; k <= grid; ++k) path.values[k] -= (static_cast<double>(k) / g) * end;
  path.values[grid] = 0.0;
  return path;
}

GridPath brownian_bridge(std::size_t grid, std::uint64_t seed) {
  Rng rng(seed);
  return brownian_bridge(grid, rng);
}

double sample_stable(double alpha, Rng& rng) {
  if (!(alpha > 1.0 && alpha < 2.0)) throw std::invalid_argument("stable index must lie in (1, 2)");
  using std::numbers::pi;
  const double v = pi * (open_uniform(rng) - 0.5);
  const double w = -std::log(open_uniform(rng));
  const double tan_pa = std::tan(pi * alpha / 2.0);
  const double b = std::atan(tan_pa) / alpha;
  const double s = std::pow(1.0 + tan_pa * tan_pa, 1.0 / (2.0 * alpha));
  const double x = s * std::sin(alpha * (v + b)) / std::pow(std::cos(v), 1.0 / alpha) *
                   std::pow(std::cos(v - alpha * (v + b)) / w, (1.0 - alpha) / alpha);
  // S_α(σ, 1, 0) has E exp(-λX) = exp(σ^α λ^α / |cos(πα/2)|).
  return x * std::pow(std::abs(std::cos(pi * alpha / 2.0)), 1.0 / alpha);
}

std::vector<double> stable_spectrally_positive(double alpha, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out(n);
  for (double& x : out) x = sample_stable(alpha, rng);
  return out;
}

std::vector<double> poisson_atoms_tail(double alpha, double tail_constant, double delta, Rng& rng,
                                       double max_expected) {
  if (!(delta > 0.0)) throw std::invalid_argument("atom threshold must be positive");
  if (!(alpha > 0.0) || !(tail_constant > 0.0)) throw std::invalid_argument("bad atom intensity");
  const double expected = tail_constant * std::pow(delta, -alpha);
  if (expected > max_expected) throw std::invalid_argument("truncation too fine");

  // Ranked atoms are (Γ_k / C)^{-1/α} over the arrival times Γ_k of a unit
  // Poisson process.
  std::vector<double> atoms;
  atoms.reserve(static_cast<std::size_t>(expected + 4.0 * std::sqrt(expected) + 8.0));
  double gamma = 0.0;
  for (;;) {
    gamma -= std::log(open_uniform(rng));
    const double x = std::pow(gamma / tail_constant, -1.0 / alpha);
    if (!(x > delta)) break;
    atoms.push_back(x);
  }
  return atoms;
}

std::vector<double> poisson_atoms(double alpha, double c, double mu1, double delta,
                                  std::uint64_t seed, double max_expected) {
  if (!(alpha > 1.0 && alpha < 2.0)) throw std::invalid_argument("atom index must lie in (1, 2)");
  if (!(c > 0.0) || !(mu1 > 0.0)) throw std::invalid_argument("need c > 0 and mu1 > 0");
  Rng rng(seed);
  return poisson_atoms_tail(alpha, c / mu1, delta, rng, max_expected);
}

double default_atom_threshold(double alpha, double tail_constant, double atom_budget) {
  // ∫_0^δ x^2 α C x^{-1-α} dx = α C δ^{2-α} / (2 - α) <= 1e-6.
  const double variance_bound =
      std::pow(1e-6 * (2.0 - alpha) / (alpha * tail_constant), 1.0 / (2.0 - alpha));
  const double count_bound = std::pow(tail_constant / atom_budget, 1.0 / alpha);
  return std::max(variance_bound, count_bound);
}

ThetaStar theta_star(std::span<const double> atoms) {
  if (atoms.empty()) throw std::invalid_argument("theta_star needs at least one atom");
  double sq = 0.0;
  for (double d : atoms) {
    if (!(d > 0.0)) throw std::invalid_argument("atoms must be positive");
    sq += d * d;
  }
  ThetaStar out;
  const double scale = std::sqrt(sq);
  out.t_star = 0.5 * std::log(sq);
  out.theta.theta0 = 0.0;
  out.theta.truncated = true;
  out.theta.atoms.reserve(atoms.size());
  for (double d : atoms) out.theta.atoms.push_back(d / scale);
  return out;
}

}  // namespace caravan
