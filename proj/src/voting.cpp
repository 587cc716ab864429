#include "rdlab/voting.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <string>

#include "rdlab/errors.hpp"

namespace rdlab {

namespace {

// Binomial coefficients C(n, k) as exact doubles (n stays small here).
std::vector<double> binomial_row(int n) {
  std::vector<double> c(static_cast<std::size_t>(n) + 1, 1.0);
  for (int k = 1; k <= n; ++k)
    c[static_cast<std::size_t>(k)] =
        c[static_cast<std::size_t>(k) - 1] * (n - k + 1) / k;
  return c;
}

}  // namespace

void VotingRules::validate() const {
  if (n < 1) throw ConfigError("VotingRules: fanout must be at least 1");
  if (mu.size() != static_cast<std::size_t>(n) + 1)
    throw ConfigError("VotingRules: vote table must have n + 1 entries");
  for (double m : mu)
    if (!(m >= 0.0 && m <= 1.0))
      throw ConfigError("VotingRules: vote probabilities must lie in [0, 1]");
  if (!(beta >= 0.0))
    throw ConfigError("VotingRules: branching rate must be nonnegative");
}

VotingRules tilted_rules(int n, double gamma, double beta) {
  if (n < 2) throw ConfigError("tilted_rules: fanout must be at least 2");
  if (!(gamma > 0.0 && gamma <= 1.0 / (n - 1) + 1e-15))
    throw ConfigError("tilted_rules: tilt must lie in (0, 1/(n-1)]");
  if (!(beta >= 0.0))
    throw ConfigError("tilted_rules: branching rate must be nonnegative");
  VotingRules r;
  r.n = n;
  r.beta = beta;
  r.gamma = gamma;
  r.mu.resize(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k < n; ++k)
    r.mu[static_cast<std::size_t>(k)] =
        std::min(1.0, (1.0 + gamma) * k / n);
  r.mu[static_cast<std::size_t>(n)] = 1.0;
  return r;
}

VoteTree simulate_tree(const VotingRules& rules, double t, double x,
                       RngStream& rng, std::size_t cap) {
  rules.validate();
  if (!(t >= 0.0)) throw ConfigError("simulate_tree: horizon must be >= 0");
  if (cap < 1) throw ConfigError("simulate_tree: particle cap must be >= 1");

  VoteTree tree;
  tree.horizon = t;
  tree.origin = x;
  tree.fanout = rules.n;
  tree.nodes.emplace_back();

  struct Pending {
    std::size_t idx;
    double born_t, born_x;
  };
  std::deque<Pending> queue{{0, 0.0, x}};

  while (!queue.empty()) {
    const Pending p = queue.front();
    queue.pop_front();
    const double tau = rules.beta > 0.0
                           ? rng.exponential(rules.beta)
                           : std::numeric_limits<double>::infinity();
    const double remaining = t - p.born_t;
    if (tau >= remaining) {
      tree.nodes[p.idx].x_end =
          p.born_x + rng.normal() * std::sqrt(2.0 * remaining);
      tree.nodes[p.idx].first_child = -1;
      ++tree.leaf_count;
      continue;
    }
    const double branch_t = p.born_t + tau;
    const double branch_x = p.born_x + rng.normal() * std::sqrt(2.0 * tau);
    if (tree.nodes.size() + static_cast<std::size_t>(rules.n) > cap)
      throw NumericError("simulate_tree: particle cap (" +
                         std::to_string(cap) + ") exceeded at t = " +
                         std::to_string(branch_t));
    tree.nodes[p.idx].x_end = branch_x;
    tree.nodes[p.idx].first_child =
        static_cast<std::int64_t>(tree.nodes.size());
    for (int c = 0; c < rules.n; ++c) {
      queue.push_back({tree.nodes.size(), branch_t, branch_x});
      tree.nodes.emplace_back();
    }
  }
  return tree;
}

int vote_propagate(const VoteTree& tree,
                   const std::function<double(double)>& g,
                   const VotingRules& rules, RngStream& rng) {
  if (tree.nodes.empty())
    throw ConfigError("vote_propagate: tree holds no nodes");
  if (tree.fanout != rules.n)
    throw ConfigError("vote_propagate: tree fanout does not match the rules");

  std::vector<unsigned char> vote(tree.nodes.size());
  for (std::size_t r = tree.nodes.size(); r-- > 0;) {
    const VoteTree::Node& node = tree.nodes[r];
    double p1;
    if (node.first_child < 0) {
      p1 = g(node.x_end);
    } else {
      int k = 0;
      for (int c = 0; c < tree.fanout; ++c)
        k += vote[static_cast<std::size_t>(node.first_child) +
                  static_cast<std::size_t>(c)];
      p1 = rules.mu[static_cast<std::size_t>(k)];
    }
    vote[r] = rng.uniform01() <= p1 ? 1 : 0;
  }
  return vote[0];
}

VoteEstimate estimate_u(const VotingRules& rules,
                        const std::function<double(double)>& g, double t,
                        const std::vector<double>& xs, std::size_t n_paths,
                        std::uint64_t seed, std::size_t cap) {
  rules.validate();
  if (n_paths < 100)
    throw ConfigError("estimate_u: need at least 100 paths");
  if (xs.empty()) throw ConfigError("estimate_u: no probe positions");
  if (xs.size() > (std::size_t{1} << 31))
    throw ConfigError("estimate_u: too many probe positions");

  VoteEstimate est;
  est.t = t;
  est.xs = xs;
  est.n_paths = n_paths;
  est.seed = seed;
  est.mean.resize(xs.size());
  est.se.resize(xs.size());

  if (t == 0.0) {
    // The root is its own leaf: u(0, x) = g(x) with zero variance.
    for (std::size_t j = 0; j < xs.size(); ++j) {
      est.mean[j] = std::clamp(g(xs[j]), 0.0, 1.0);
      est.se[j] = 0.0;
    }
    return est;
  }

  for (std::size_t j = 0; j < xs.size(); ++j) {
    long long ones = 0;
#pragma omp parallel for schedule(static) reduction(+ : ones)
    for (long long p = 0; p < static_cast<long long>(n_paths); ++p) {
      RngStream rng(seed, (static_cast<std::uint64_t>(j) << 32) |
                              static_cast<std::uint64_t>(p));
      VoteTree tree = simulate_tree(rules, t, xs[j], rng, cap);
      ones += vote_propagate(tree, g, rules, rng);
    }
    const double n = static_cast<double>(n_paths);
    const double p_hat = static_cast<double>(ones) / n;
    est.mean[j] = p_hat;
    est.se[j] = std::sqrt(std::max(0.0, p_hat * (1.0 - p_hat) / (n - 1.0)));
  }
  return est;
}

VotingNonlinearity voting_nonlinearity(int n, const std::vector<double>& mu,
                                       double beta) {
  if (n < 1)
    throw ConfigError("voting_nonlinearity: fanout must be at least 1");
  if (mu.size() != static_cast<std::size_t>(n) + 1)
    throw ConfigError("voting_nonlinearity: vote table must have n + 1 "
                      "entries");
  const std::vector<double> choose = binomial_row(n);
  const Poly u = Poly::monomial(1);
  const Poly one_minus_u(std::vector<double>{1.0, -1.0});

  // Powers of u and (1 - u) up to n.
  std::vector<Poly> up(static_cast<std::size_t>(n) + 1),
      qp(static_cast<std::size_t>(n) + 1);
  up[0] = Poly::constant(1.0);
  qp[0] = Poly::constant(1.0);
  for (int k = 1; k <= n; ++k) {
    up[static_cast<std::size_t>(k)] = up[static_cast<std::size_t>(k) - 1] * u;
    qp[static_cast<std::size_t>(k)] =
        qp[static_cast<std::size_t>(k) - 1] * one_minus_u;
  }

  Poly f = Poly::constant(0.0);
  for (int k = 0; k <= n; ++k) {
    const double w = choose[static_cast<std::size_t>(k)] *
                     mu[static_cast<std::size_t>(k)];
    if (w != 0.0)
      f = f + up[static_cast<std::size_t>(k)] *
                  qp[static_cast<std::size_t>(n - k)] * w;
  }
  f = (f - u) * beta;
  f.trim(0.0);

  VotingNonlinearity out;
  out.f = f;
  const bool ends = std::abs(f(0.0)) <= 1e-12 && std::abs(f(1.0)) <= 1e-12;
  bool interior_positive = true;
  for (int i = 1; i < 4096 && interior_positive; ++i)
    interior_positive = f(i / 4096.0) > 0.0;
  out.monostable = ends && interior_positive;
  return out;
}

IdentityCheck identity_check(int n, double gamma, double u) {
  if (n < 2) throw ConfigError("identity_check: fanout must be at least 2");
  if (!(gamma > 0.0 && gamma <= 1.0 / (n - 1) + 1e-15))
    throw ConfigError("identity_check: tilt must lie in (0, 1/(n-1)]");
  if (!(u >= 0.0 && u <= 1.0))
    throw ConfigError("identity_check: u must lie in [0, 1]");
  const std::vector<double> choose = binomial_row(n);
  IdentityCheck out;
  out.lhs = gamma * (u - std::pow(u, n));
  double sum = 0.0;
  for (int k = 0; k < n; ++k)
    sum += choose[static_cast<std::size_t>(k)] * (1.0 + gamma) * k / n *
           std::pow(u, k) * std::pow(1.0 - u, n - k);
  out.rhs = sum + std::pow(u, n) - u;
  out.difference = out.rhs - out.lhs;
  return out;
}

Poly mckean_nonlinearity(double gamma, const std::vector<double>& p) {
  if (p.empty())
    throw ConfigError("mckean_nonlinearity: empty offspring distribution");
  double total = 0.0;
  for (double q : p) {
    if (!(q >= 0.0))
      throw ConfigError(
          "mckean_nonlinearity: offspring probabilities must be >= 0");
    total += q;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw ConfigError(
        "mckean_nonlinearity: offspring probabilities must sum to 1");
  if (p[0] != 0.0)
    throw ConfigError(
        "mckean_nonlinearity: zero-offspring mass is not supported (it "
        "breaks f(1) = 0)");

  const Poly one_minus_u(std::vector<double>{1.0, -1.0});
  Poly sum = Poly::constant(0.0);
  Poly power = Poly::constant(1.0);
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (k > 0) power = power * one_minus_u;
    if (p[k] != 0.0) sum = sum + power * p[k];
  }
  Poly f = (one_minus_u - sum) * gamma;
  f.trim(0.0);
  return f;
}

}  // namespace rdlab
