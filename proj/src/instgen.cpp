#include "teamform/instgen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "teamform/linopt.hpp"

namespace teamform {

void GenConfig::validate() const {
  if (n <= 0 || m <= 0 || s <= 0 || n != m * s) {
    throw std::invalid_argument("gen config: need n = m*s with positive sizes");
  }
  if (u_max < 1) throw std::invalid_argument("gen config: u_max must be >= 1");
  if (scheme != "g1" && scheme != "g2" && scheme != "g3" && scheme != "g4") {
    throw std::invalid_argument("gen config: unknown scheme " + scheme);
  }
  if (q_count != 0 && q_count != 3) {
    throw std::invalid_argument("gen config: q_count must be 0 or 3");
  }
  if (scheme == "g4" && q_count == 0) {
    throw std::invalid_argument("gen config: g4 needs characteristics (q_count = 3)");
  }
}

namespace {

// Redraw noise until common + noise lands strictly positive.
double positive_entry(double common, double sd, Sampler& rng) {
  double v;
  do {
    v = common + rng.normal(0.0, sd);
  } while (v <= 0.0);
  return v;
}

Eigen::MatrixXd common_value_matrix(int n, const std::vector<double>& common, Sampler& rng) {
  double sd = n / 5.0;
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      u(i, j) = positive_entry(common[j], sd, rng);
    }
  }
  return u;
}

}  // namespace

Eigen::MatrixXd gen_raw_g1(const GenConfig& cfg, Sampler& rng) {
  std::vector<double> common(cfg.n);
  for (int j = 0; j < cfg.n; ++j) common[j] = j + 1;  // 1-based common worth
  return common_value_matrix(cfg.n, common, rng);
}

std::vector<double> g2_levels(int n) {
  // near-equal quartiles, the larger ones first when 4 does not divide n
  std::vector<double> levels(n);
  int base = n / 4, extra = n % 4;
  int j = 0;
  for (int q = 0; q < 4; ++q) {
    int size = base + (q < extra ? 1 : 0);
    for (int k = 0; k < size; ++k) levels[j++] = q * (n / 4.0);
  }
  return levels;
}

Eigen::MatrixXd gen_raw_g2(const GenConfig& cfg, Sampler& rng) {
  return common_value_matrix(cfg.n, g2_levels(cfg.n), rng);
}

Eigen::MatrixXd gen_raw_g3(const GenConfig& cfg, Sampler& rng) {
  int n = cfg.n;
  if (n < 3) throw std::invalid_argument("g3 needs n >= 3");
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n, n);
  std::vector<std::int64_t> cuts(n);
  for (int i = 0; i < n; ++i) {
    cuts.assign(1, 0);
    for (int k = 0; k < n - 2; ++k) cuts.push_back(rng.uniform_int(0, 100));
    cuts.push_back(100);
    std::sort(cuts.begin(), cuts.end());
    int pos = 0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      u(i, j) = double(cuts[pos + 1] - cuts[pos]);
      ++pos;
    }
  }
  return u;
}

Eigen::MatrixXd gen_raw_g4(const GenConfig& cfg, const CharacteristicSet& chars, Sampler& rng) {
  if (chars.q_count != 3) throw std::invalid_argument("g4 needs exactly 3 characteristics");
  int n = cfg.n;
  std::vector<double> b1(n), b2(n), b3(n);
  for (int i = 0; i < n; ++i) {
    b1[i] = rng.uniform_real(-1.0, 2.0);
    b2[i] = rng.uniform_real(-1.0, 2.0);
    b3[i] = rng.uniform_real(0.0, 2.0);
  }
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      double v = 0.0;
      if (chars.delta(i, 0) == chars.delta(j, 0)) v += b1[i];
      if (chars.delta(i, 1) == chars.delta(j, 1)) v += b2[i];
      v += b3[i] * chars.delta(j, 2);
      u(i, j) = v + rng.normal(0.0, 1.0);
    }
  }
  return u;
}

UtilityMatrix ipsative_normalize(const Eigen::MatrixXd& raw, int u_max) {
  int n = (int)raw.rows();
  UtilityMatrix u = UtilityMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    double lo = kInfinity, hi = -kInfinity;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      lo = std::min(lo, raw(i, j));
      hi = std::max(hi, raw(i, j));
    }
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      if (hi - lo <= 0.0) {
        u(i, j) = (u_max + 1) / 2;  // constant row: midpoint, ceil for odd u_max
      } else {
        // z-scoring is affine, so mapping raw min/max directly is the same map
        double v = 1.0 + (raw(i, j) - lo) * (u_max - 1) / (hi - lo);
        u(i, j) = (Utility)std::floor(v + 0.5);
        u(i, j) = std::clamp<Utility>(u(i, j), 1, u_max);
      }
    }
  }
  return u;
}

CharacteristicSet assign_characteristics(const GenConfig& cfg, Sampler& rng) {
  int n = cfg.n, q = cfg.q_count;
  std::vector<int> qmin = cfg.q_min.empty() ? std::vector<int>(q, 1) : cfg.q_min;
  std::vector<int> qmax = cfg.q_max.empty() ? std::vector<int>(q, cfg.s - 1) : cfg.q_max;
  if ((int)qmin.size() != q || (int)qmax.size() != q) {
    throw std::invalid_argument("characteristic quota vectors must have q_count entries");
  }

  MipProblem mip;
  mip.lp.maximize = true;
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < q; ++k) {
      mip.lp.add_var(0.0, 1.0, rng.uniform_real(-1.0, 1.0));
    }
  }
  mip.is_integer.assign(n * q, 1);
  for (int t = 0; t < cfg.m; ++t) {
    for (int k = 0; k < q; ++k) {
      int rlo = mip.lp.add_row('G', (double)qmin[k]);
      int rhi = mip.lp.add_row('L', (double)qmax[k]);
      for (int i = t * cfg.s; i < (t + 1) * cfg.s; ++i) {
        mip.lp.add_term(rlo, i * q + k, 1.0);
        mip.lp.add_term(rhi, i * q + k, 1.0);
      }
    }
  }
  MipResult res = solve_mip(mip);
  if (res.status != MipStatus::Optimal) {
    throw std::runtime_error("characteristic quotas admit no assignment");
  }

  CharacteristicSet chars;
  chars.q_count = q;
  chars.delta = Eigen::MatrixXi::Zero(n, q);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < q; ++k) chars.delta(i, k) = res.x[i * q + k] > 0.5 ? 1 : 0;
  }
  chars.q_min = qmin;
  chars.q_max = qmax;
  return chars;
}

Instance generate(const GenConfig& cfg) {
  cfg.validate();
  Mt64Sampler rng(cfg.seed);

  Instance inst;
  inst.n = cfg.n;
  inst.m = cfg.m;
  inst.s = cfg.s;
  inst.u_max = cfg.u_max;
  inst.scheme = cfg.scheme;
  inst.seed = cfg.seed;
  if (cfg.q_count > 0) inst.chars = assign_characteristics(cfg, rng);

  Eigen::MatrixXd raw;
  if (cfg.scheme == "g1") {
    raw = gen_raw_g1(cfg, rng);
  } else if (cfg.scheme == "g2") {
    raw = gen_raw_g2(cfg, rng);
  } else if (cfg.scheme == "g3") {
    raw = gen_raw_g3(cfg, rng);
  } else {
    raw = gen_raw_g4(cfg, *inst.chars, rng);
  }
  inst.u = ipsative_normalize(raw, cfg.u_max);
  inst.validate();
  return inst;
}

}  // namespace teamform
