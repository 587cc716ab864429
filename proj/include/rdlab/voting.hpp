#pragma once
// Branching Brownian motion with voting: exact-in-law genealogical trees,
// vote cascades from leaves to root, Monte Carlo estimates of
// u(t,x) = P_x(root votes 1), and symbolic construction of the reaction
// polynomials induced by a vote table or an offspring distribution.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "rdlab/philox.hpp"
#include "rdlab/poly.hpp"

namespace rdlab {

// A fixed fanout n, a vote table mu[k] = P(parent votes 1 | k of its n
// children voted 1), and the branching rate beta.
struct VotingRules {
  int n = 2;
  std::vector<double> mu;  // size n + 1, entries in [0, 1]
  double beta = 1.0;
  double gamma = 0.0;  // tilt parameter when built by tilted_rules; else 0

  void validate() const;  // throws ConfigError on a malformed table
};

// The tilted-proportional family: mu_k = (1 + gamma) k / n for k < n and
// mu_n = 1. Requires n >= 2 and 0 < gamma <= 1/(n-1), which is exactly the
// range keeping every entry inside [0, 1]. The induced reaction polynomial
// is beta * gamma * (u - u^n).
VotingRules tilted_rules(int n, double gamma, double beta = 1.0);

// Genealogical tree of one branching-Brownian path up to the horizon.
// Nodes are stored in creation (breadth-first) order, node 0 is the root,
// and the n children of an internal node are contiguous, so children always
// carry larger indices than their parent. x_end is the branch point for
// internal nodes and the terminal position for leaves. Positions are exact
// in law: each branch segment adds one Gaussian increment of variance
// 2 * (segment duration); there is no time discretization.
struct VoteTree {
  struct Node {
    double x_end = 0.0;
    std::int64_t first_child = -1;  // -1 marks a leaf
  };
  std::vector<Node> nodes;
  double horizon = 0.0;
  double origin = 0.0;
  int fanout = 0;
  std::size_t leaf_count = 0;
};

inline constexpr std::size_t kDefaultParticleCap = 1'000'000;

// Grow one tree: exponential branching clocks of rate beta (beta == 0 gives
// a single Brownian path), n children per event, Brownian increments of
// variance 2s over elapsed time s. Throws NumericError if the node count
// would exceed `cap`, reporting the branching time that overflowed.
VoteTree simulate_tree(const VotingRules& rules, double t, double x,
                       RngStream& rng,
                       std::size_t cap = kDefaultParticleCap);

// Cascade votes from the leaves to the root: each leaf votes 1 with
// probability g(position), each internal node votes 1 with probability
// mu[k] given k children voted 1. One uniform is consumed per node, in
// decreasing node-index order. Returns the root's vote.
int vote_propagate(const VoteTree& tree,
                   const std::function<double(double)>& g,
                   const VotingRules& rules, RngStream& rng);

struct VoteEstimate {
  double t = 0.0;
  std::vector<double> xs;
  std::vector<double> mean;  // P(root votes 1) per probe, in [0, 1]
  std::vector<double> se;    // sample standard deviation / sqrt(paths)
  std::size_t n_paths = 0;
  std::uint64_t seed = 0;
};

// Monte Carlo estimate of u(t, x) = P_x(root votes 1) at every probe in
// `xs`. Path p of probe j draws from the dedicated stream
// (seed, (j << 32) | p), so results are bit-reproducible for a fixed seed
// regardless of worker count. Requires n_paths >= 100. At t = 0 the root is
// its own leaf and the estimate is exactly g(x) with zero standard error;
// no paths are sampled.
VoteEstimate estimate_u(const VotingRules& rules,
                        const std::function<double(double)>& g, double t,
                        const std::vector<double>& xs, std::size_t n_paths,
                        std::uint64_t seed,
                        std::size_t cap = kDefaultParticleCap);

// Reaction polynomial induced by a vote table:
//   f(u) = beta * (sum_k C(n,k) mu_k u^k (1-u)^{n-k} - u),
// expanded to coefficients. `monostable` records whether f vanishes at both
// endpoints and is strictly positive on (0, 1) (dense sampling); majority
// tables, for instance, produce a bistable sign pattern and report false.
struct VotingNonlinearity {
  Poly f;
  bool monostable = false;
};
VotingNonlinearity voting_nonlinearity(int n, const std::vector<double>& mu,
                                       double beta);

// Both sides of the closed-form identity behind the tilted family:
//   gamma (u - u^n) = sum_{k<n} C(n,k) (1+gamma) k/n u^k (1-u)^{n-k}
//                     + u^n - u.
struct IdentityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double difference = 0.0;
};
IdentityCheck identity_check(int n, double gamma, double u);

// Reaction polynomial of the McKean representation for an offspring
// distribution p (p[k] = probability of k children):
//   f(u) = gamma (1 - u - sum_k p_k (1-u)^k).
// Requires p_k >= 0 summing to 1 with p_0 = 0, so that f(0) = f(1) = 0;
// f'(0) = gamma (sum_k k p_k - 1).
Poly mckean_nonlinearity(double gamma, const std::vector<double>& p);

}  // namespace rdlab
