#include "levylab/intensity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "levylab/errors.hpp"
#include "levylab/quadrature.hpp"

namespace levylab {

std::uint64_t Rng::poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw Error("Poisson mean must be finite and non-negative");
  }
  std::uint64_t count = 0;
  while (mean > 0.0) {
    const double chunk = std::min(mean, 16.0);
    mean -= chunk;
    double p = std::exp(-chunk);
    double cdf = p;
    const double u = uniform();
    std::uint64_t k = 0;
    while (u > cdf && p > 0.0) {
      ++k;
      p *= chunk / static_cast<double>(k);
      cdf += p;
    }
    count += k;
  }
  return count;
}

LevyIntensity LevyIntensity::none() {
  LevyIntensity out;
  out.size_kind_ = SizeKind::none;
  out.build_nodes();
  return out;
}

LevyIntensity LevyIntensity::atoms(std::vector<double> sizes,
                                   std::vector<double> masses) {
  if (sizes.size() != masses.size() || sizes.empty()) {
    throw Error("atom intensity needs matching, non-empty sizes and masses");
  }
  LevyIntensity out;
  out.size_kind_ = SizeKind::atoms;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] == 0.0) throw Error("jump size atoms must be nonzero");
    if (!(masses[i] >= 0.0) || !std::isfinite(masses[i])) {
      throw Error("jump size masses must be finite and non-negative");
    }
  }
  out.sizes_ = std::move(sizes);
  out.masses_ = std::move(masses);
  out.cumulative_.resize(out.masses_.size());
  std::partial_sum(out.masses_.begin(), out.masses_.end(),
                   out.cumulative_.begin());
  out.build_nodes();
  return out;
}

LevyIntensity LevyIntensity::uniform_sizes(double lo, double hi,
                                           double density) {
  if (!(hi > lo) || !(density >= 0.0)) {
    throw Error("uniform size measure needs lo < hi and density >= 0");
  }
  LevyIntensity out;
  out.size_kind_ = SizeKind::uniform;
  out.size_params_[0] = lo;
  out.size_params_[1] = hi;
  out.size_params_[2] = density;
  out.build_nodes();
  return out;
}

LevyIntensity LevyIntensity::stable(double alpha, double scale, double z_min,
                                    double z_max) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw Error("stable alpha must be in (0,2)");
  if (!(scale >= 0.0)) throw Error("stable scale must be non-negative");
  if (!(z_max > 0.0) || !std::isfinite(z_max) || !(z_max > z_min)) {
    throw Error("stable size measure needs finite z_max > z_min");
  }
  LevyIntensity out;
  out.size_kind_ = SizeKind::stable;
  out.size_params_[0] = alpha;
  out.size_params_[1] = scale;
  out.size_params_[2] = z_min;
  out.size_params_[3] = z_max;
  out.build_nodes();
  return out;
}

LevyIntensity LevyIntensity::with_atom_position(double y0, double mass) const {
  if (!(mass >= 0.0)) throw Error("position mass must be non-negative");
  LevyIntensity out = *this;
  out.position_kind_ = PositionKind::atom;
  out.position_params_[0] = y0;
  out.position_params_[1] = mass;
  out.position_params_[2] = 0.0;
  out.build_nodes();
  return out;
}

LevyIntensity LevyIntensity::with_uniform_position(double lo, double hi,
                                                   double density) const {
  if (!(hi > lo) || !(density >= 0.0)) {
    throw Error("uniform position measure needs lo < hi and density >= 0");
  }
  LevyIntensity out = *this;
  out.position_kind_ = PositionKind::uniform;
  out.position_params_[0] = lo;
  out.position_params_[1] = hi;
  out.position_params_[2] = density;
  out.build_nodes();
  return out;
}

double LevyIntensity::position_mass() const {
  if (position_kind_ == PositionKind::atom) return position_params_[1];
  return position_params_[2] * (position_params_[1] - position_params_[0]);
}

double LevyIntensity::total_mass() const {
  const double lambda = position_mass();
  switch (size_kind_) {
    case SizeKind::none:
      return 0.0;
    case SizeKind::atoms:
      return lambda * cumulative_.back();
    case SizeKind::uniform:
      return lambda * size_params_[2] * (size_params_[1] - size_params_[0]);
    case SizeKind::stable: {
      const double alpha = size_params_[0], c = size_params_[1];
      const double z_min = size_params_[2], z_max = size_params_[3];
      if (!(z_min > 0.0)) {
        throw TruncationRequired(
            "infinite-activity size measure needs z_min > 0");
      }
      return lambda * 2.0 * c *
             (std::pow(z_min, -alpha) - std::pow(z_max, -alpha)) / alpha;
    }
  }
  return 0.0;
}

Mark LevyIntensity::sample_mark(Rng& rng) const {
  Mark z;
  if (position_kind_ == PositionKind::atom) {
    z.position = position_params_[0];
  } else {
    z.position = position_params_[0] +
                 (position_params_[1] - position_params_[0]) * rng.uniform();
  }
  switch (size_kind_) {
    case SizeKind::none:
      break;
    case SizeKind::atoms: {
      const double target = rng.uniform() * cumulative_.back();
      auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
      if (it == cumulative_.end()) --it;
      z.size = sizes_[static_cast<std::size_t>(it - cumulative_.begin())];
      break;
    }
    case SizeKind::uniform:
      z.size = size_params_[0] +
               (size_params_[1] - size_params_[0]) * rng.uniform();
      break;
    case SizeKind::stable: {
      const double alpha = size_params_[0];
      const double z_min = size_params_[2], z_max = size_params_[3];
      const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
      const double a = std::pow(z_min, -alpha), b = std::pow(z_max, -alpha);
      const double u = rng.uniform();
      z.size = sign * std::pow(a - u * (a - b), -1.0 / alpha);
      break;
    }
  }
  return z;
}

void LevyIntensity::build_nodes() {
  nodes_.clear();
  const double lambda = position_mass();
  // eta never depends on the jump position, so a single position node at
  // the mean carries the whole position mass.
  const double y = position_kind_ == PositionKind::atom
                       ? position_params_[0]
                       : 0.5 * (position_params_[0] + position_params_[1]);
  auto gauss_panel = [&](double lo, double hi, auto density) {
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    for (std::size_t i = 0; i < GaussLegendre16::kNodes.size(); ++i) {
      for (double s : {-1.0, 1.0}) {
        const double v = mid + s * half * GaussLegendre16::kNodes[i];
        nodes_.push_back(
            {{y, v}, lambda * half * GaussLegendre16::kWeights[i] * density(v)});
      }
    }
  };
  switch (size_kind_) {
    case SizeKind::none:
      break;
    case SizeKind::atoms:
      for (std::size_t i = 0; i < sizes_.size(); ++i) {
        nodes_.push_back({{y, sizes_[i]}, lambda * masses_[i]});
      }
      break;
    case SizeKind::uniform: {
      const double lo = size_params_[0], hi = size_params_[1];
      const double rho = size_params_[2];
      auto density = [rho](double) { return rho; };
      if (lo < 0.0 && hi > 0.0) {
        gauss_panel(lo, 0.0, density);
        gauss_panel(0.0, hi, density);
      } else {
        gauss_panel(lo, hi, density);
      }
      break;
    }
    case SizeKind::stable: {
      const double alpha = size_params_[0], c = size_params_[1];
      const double z_min = size_params_[2], z_max = size_params_[3];
      if (!(z_min > 0.0)) break;
      auto density = [alpha, c](double v) {
        return c * std::pow(std::abs(v), -1.0 - alpha);
      };
      constexpr int kPanels = 24;
      const double ratio = std::log(z_max / z_min);
      for (int p = 0; p < kPanels; ++p) {
        const double lo = z_min * std::exp(ratio * p / kPanels);
        const double hi = z_min * std::exp(ratio * (p + 1) / kPanels);
        gauss_panel(lo, hi, density);
        gauss_panel(-hi, -lo, density);
      }
      break;
    }
  }
}

double LevyIntensity::size_moment(int k) const {
  const double lambda = position_mass();
  switch (size_kind_) {
    case SizeKind::none:
      return 0.0;
    case SizeKind::atoms: {
      double s = 0.0;
      for (std::size_t i = 0; i < sizes_.size(); ++i) {
        s += masses_[i] * std::pow(sizes_[i], k);
      }
      return lambda * s;
    }
    case SizeKind::uniform: {
      const double lo = size_params_[0], hi = size_params_[1];
      return lambda * size_params_[2] *
             (std::pow(hi, k + 1) - std::pow(lo, k + 1)) / (k + 1);
    }
    case SizeKind::stable: {
      if (k % 2 == 1) return 0.0;
      const double alpha = size_params_[0], c = size_params_[1];
      const double z_min = size_params_[2], z_max = size_params_[3];
      if (k == 0) return total_mass();
      const double e = k - alpha;
      return lambda * 2.0 * c * (std::pow(z_max, e) - std::pow(z_min, e)) / e;
    }
  }
  return 0.0;
}

double LevyIntensity::small_jump_first_moment() const {
  // The only truncated family is symmetric.
  return 0.0;
}

double LevyIntensity::truncation_error() const {
  if (size_kind_ != SizeKind::stable) return 0.0;
  const double alpha = size_params_[0], c = size_params_[1];
  const double z_min = std::max(size_params_[2], 0.0);
  return position_mass() * 2.0 * c * std::pow(z_min, 2.0 - alpha) /
         (2.0 - alpha);
}

double LevyIntensity::max_jump_size() const {
  switch (size_kind_) {
    case SizeKind::none:
      return 0.0;
    case SizeKind::atoms: {
      double m = 0.0;
      for (double v : sizes_) m = std::max(m, std::abs(v));
      return m;
    }
    case SizeKind::uniform:
      return std::max(std::abs(size_params_[0]), std::abs(size_params_[1]));
    case SizeKind::stable:
      return size_params_[3];
  }
  return 0.0;
}

std::string LevyIntensity::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (position_kind_ == PositionKind::atom) {
    os << "position=atom(" << position_params_[0] << "," << position_params_[1]
       << ")";
  } else {
    os << "position=uniform(" << position_params_[0] << ","
       << position_params_[1] << "," << position_params_[2] << ")";
  }
  switch (size_kind_) {
    case SizeKind::none:
      os << " size=none";
      break;
    case SizeKind::atoms:
      os << " size=atoms(";
      for (std::size_t i = 0; i < sizes_.size(); ++i) {
        os << (i ? ";" : "") << sizes_[i] << ":" << masses_[i];
      }
      os << ")";
      break;
    case SizeKind::uniform:
      os << " size=uniform(" << size_params_[0] << "," << size_params_[1] << ","
         << size_params_[2] << ")";
      break;
    case SizeKind::stable:
      os << " size=stable(" << size_params_[0] << "," << size_params_[1] << ","
         << size_params_[2] << "," << size_params_[3] << ")";
      break;
  }
  return os.str();
}

}  // namespace levylab
