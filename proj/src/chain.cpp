#include "totp/chain.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "totp/kernel.hpp"

namespace totp {

namespace {

// Lazy-kernel move encoded in 3 random bits: 0-3 stay, 4-5 parent, 6 left
// child, 7 right child.
constexpr unsigned kMoveBits = 3;
constexpr unsigned kMovesPerWord = 64 / kMoveBits;

// Runs `steps` lazy moves through a per-node transition table from the root.
std::uint32_t walk_table(const std::uint32_t* next, std::uint64_t steps, Rng& rng) {
  std::uint32_t u = 0;
  std::uint64_t left = steps;
  while (left >= kMovesPerWord) {
    std::uint64_t bits = rng();
    for (unsigned k = 0; k < kMovesPerWord; ++k) {
      u = next[(static_cast<std::size_t>(u) << 3) | (bits & 7U)];
      bits >>= kMoveBits;
    }
    left -= kMovesPerWord;
  }
  if (left > 0) {
    std::uint64_t bits = rng();
    for (std::uint64_t k = 0; k < left; ++k) {
      u = next[(static_cast<std::size_t>(u) << 3) | (bits & 7U)];
      bits >>= kMoveBits;
    }
  }
  return u;
}

void check_open_unit(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0)) {
    throw ParameterError(std::string(name) + " must lie in (0,1), got " + std::to_string(v));
  }
}

// Splits [0, samples) into contiguous chunks, one per worker, and sums the
// per-chunk counts. The sum does not depend on the split.
template <typename Count>
std::uint64_t parallel_count(std::uint64_t samples, unsigned workers, Count count) {
  workers = std::max(1U, workers);
  if (workers == 1 || samples < 2 * workers) {
    return count(0, samples);
  }
  std::vector<std::uint64_t> partial(workers, 0);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    const std::uint64_t chunk = (samples + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::uint64_t lo = std::min<std::uint64_t>(samples, w * chunk);
      const std::uint64_t hi = std::min<std::uint64_t>(samples, lo + chunk);
      pool.emplace_back([&partial, &count, w, lo, hi] { partial[w] = count(lo, hi); });
    }
  }
  std::uint64_t total = 0;
  for (std::uint64_t p : partial) {
    total += p;
  }
  return total;
}

}  // namespace

Backend parse_backend(const std::string& name) {
  if (name == "simulate") return Backend::kSimulate;
  if (name == "propagate") return Backend::kPropagate;
  if (name == "auto") return Backend::kAuto;
  throw ParameterError("unknown backend '" + name + "' (expected simulate, propagate or auto)");
}

std::string to_string(Backend backend) {
  switch (backend) {
    case Backend::kSimulate:
      return "simulate";
    case Backend::kPropagate:
      return "propagate";
    case Backend::kAuto:
      break;
  }
  return "auto";
}

void ChainParams::validate() const {
  if (tv_tolerance) {
    check_open_unit(*tv_tolerance, "tv_tolerance");
  }
  if (!(burn_in_constant > 0.0) || !std::isfinite(burn_in_constant)) {
    throw ParameterError("burn_in_constant must be positive");
  }
  if (workers == 0) {
    throw ParameterError("workers must be at least 1");
  }
}

NodePath lazy_step(const BranchingTree& tree, const NodePath& node, Rng& rng) {
  const ChildMask mask = tree.children(node);
  const auto move = static_cast<unsigned>(rng() >> (64 - kMoveBits));
  if (move < 4) {
    return node;
  }
  if (move < 6) {
    return node.is_root() ? node : node.parent();
  }
  const unsigned b = move - 6;
  return mask.has(b) ? node.child(b) : node;
}

std::uint64_t burn_in_steps(std::size_t height, double tv_tolerance, double burn_in_constant) {
  check_open_unit(tv_tolerance, "tv_tolerance");
  if (!(burn_in_constant > 0.0)) {
    throw ParameterError("burn_in_constant must be positive");
  }
  if (height == 0) {
    return 0;
  }
  const double h = static_cast<double>(height) + 1.0;
  const double t = burn_in_constant * 16.0 * h * h * (std::log(h) + std::log(1.0 / tv_tolerance));
  return static_cast<std::uint64_t>(std::ceil(t));
}

std::uint64_t alpha_samples(std::size_t height, double zeta) {
  check_open_unit(zeta, "zeta");
  return static_cast<std::uint64_t>(std::ceil(4.0 * (static_cast<double>(height) + 1.0) / (zeta * zeta)));
}

std::uint64_t alpha_repetitions(double delta) {
  check_open_unit(delta, "delta");
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(8.0 * std::log(1.0 / delta))));
}

double default_tv_tolerance(std::size_t height, double zeta) {
  return zeta / (8.0 * (static_cast<double>(height) + 1.0));
}

NodePath sample_stationary(const BranchingTree& tree, const ChainParams& params, Rng& rng) {
  params.validate();
  if (tree.empty()) {
    throw ParameterError("cannot sample from the empty tree");
  }
  const std::uint64_t steps = burn_in_steps(tree.height(), params.tv_tolerance.value_or(0.01), params.burn_in_constant);
  if (const auto* explicit_tree = dynamic_cast<const ExplicitTree*>(&tree)) {
    ExplicitChainSampler sampler(*explicit_tree);
    return explicit_tree->path(sampler.run(tree.height(), steps, rng));
  }
  return OracleChainSampler(tree).run(tree.height(), steps, rng);
}

// --- explicit simulation -------------------------------------------------------

ExplicitChainSampler::ExplicitChainSampler(const ExplicitTree& tree) : tree_(&tree) {
  if (tree.empty()) {
    throw ParameterError("cannot run the chain on the empty tree");
  }
}

const std::vector<std::uint32_t>& ExplicitChainSampler::table(std::size_t depth) {
  auto it = tables_.find(depth);
  if (it != tables_.end()) {
    return it->second;
  }
  const ExplicitTree& t = *tree_;
  std::vector<std::uint32_t> next(8 * t.size());
  for (ExplicitTree::Index u = 0; u < t.size(); ++u) {
    std::uint32_t* row = &next[8 * static_cast<std::size_t>(u)];
    const ExplicitTree::Index up = t.parent(u) == ExplicitTree::kNone ? u : t.parent(u);
    const bool can_descend = t.depth(u) < depth;
    const ExplicitTree::Index left = can_descend && t.child(u, 0) != ExplicitTree::kNone ? t.child(u, 0) : u;
    const ExplicitTree::Index right = can_descend && t.child(u, 1) != ExplicitTree::kNone ? t.child(u, 1) : u;
    row[0] = row[1] = row[2] = row[3] = u;
    row[4] = row[5] = up;
    row[6] = left;
    row[7] = right;
  }
  return tables_.emplace(depth, std::move(next)).first->second;
}

ExplicitTree::Index ExplicitChainSampler::run(std::size_t depth, std::uint64_t steps, Rng& rng) {
  const ExplicitTree::Index u = walk_table(table(depth).data(), steps, rng);
  executed_ += steps;
  return u;
}

std::uint64_t ExplicitChainSampler::root_hits(std::size_t depth, std::uint64_t steps, std::uint64_t samples,
                                              std::uint64_t stream, unsigned workers) {
  if (depth > tree_->height()) {
    throw std::out_of_range("sampling depth exceeds tree height");
  }
  const std::uint32_t* next = table(depth).data();
  const std::uint64_t hits = parallel_count(samples, workers, [next, steps, stream](std::uint64_t lo, std::uint64_t hi) {
    std::uint64_t count = 0;
    for (std::uint64_t j = lo; j < hi; ++j) {
      Rng rng = Rng::stream(stream, {j});
      count += walk_table(next, steps, rng) == 0 ? 1 : 0;
    }
    return count;
  });
  executed_ += steps * samples;
  return hits;
}

// --- oracle simulation -----------------------------------------------------------

NodePath OracleChainSampler::run(std::size_t depth, std::uint64_t steps, Rng& rng) const {
  const BranchingTree& tree = *tree_;
  auto children_at = [&](const NodePath& p) { return p.depth() >= depth ? ChildMask{} : tree.children(p); };
  NodePath path;
  ChildMask mask = children_at(path);
  std::uint64_t bits = 0;
  unsigned avail = 0;
  for (std::uint64_t t = 0; t < steps; ++t) {
    if (avail == 0) {
      bits = rng();
      avail = kMovesPerWord;
    }
    const auto move = static_cast<unsigned>(bits & 7U);
    bits >>= kMoveBits;
    --avail;
    if (move < 4) {
      continue;
    }
    if (move < 6) {
      if (!path.is_root()) {
        path.pop_back();
        mask = children_at(path);
      }
      continue;
    }
    const unsigned b = move - 6;
    if (mask.has(b)) {
      path.push_back(b);
      mask = children_at(path);
    }
  }
  return path;
}

std::uint64_t OracleChainSampler::root_hits(std::size_t depth, std::uint64_t steps, std::uint64_t samples,
                                            std::uint64_t stream, unsigned workers) {
  if (depth > tree_->height()) {
    throw std::out_of_range("sampling depth exceeds tree height");
  }
  if (tree_->empty()) {
    throw ParameterError("cannot run the chain on the empty tree");
  }
  const std::uint64_t hits = parallel_count(samples, workers, [this, depth, steps, stream](std::uint64_t lo, std::uint64_t hi) {
    std::uint64_t count = 0;
    for (std::uint64_t j = lo; j < hi; ++j) {
      Rng rng = Rng::stream(stream, {j});
      count += run(depth, steps, rng).is_root() ? 1 : 0;
    }
    return count;
  });
  executed_ += steps * samples;
  return hits;
}

// --- exact propagation -------------------------------------------------------------

PropagatedSampler::PropagatedSampler(ExplicitTree tree) : tree_(std::move(tree)) {
  if (tree_.empty()) {
    throw ParameterError("cannot run the chain on the empty tree");
  }
}

double PropagatedSampler::root_probability(std::size_t depth, std::uint64_t steps) {
  if (depth > tree_.height()) {
    throw std::out_of_range("sampling depth exceeds tree height");
  }
  const auto key = std::make_pair(depth, steps);
  if (auto it = cache_.find(key); it != cache_.end()) {
    return it->second;
  }
  const Eigen::SparseMatrix<double> kernel_t = lazy_kernel_transpose(tree_, depth);
  Eigen::VectorXd law = Eigen::VectorXd::Zero(kernel_t.rows());
  Eigen::VectorXd next(kernel_t.rows());
  law(0) = 1.0;
  for (std::uint64_t t = 0; t < steps; ++t) {
    next.noalias() = kernel_t * law;
    law.swap(next);
  }
  const double p = std::clamp(law(0), 0.0, 1.0);
  cache_.emplace(key, p);
  return p;
}

std::uint64_t PropagatedSampler::root_hits(std::size_t depth, std::uint64_t steps, std::uint64_t samples,
                                           std::uint64_t stream, unsigned /*workers*/) {
  const double p = root_probability(depth, steps);
  Rng rng(stream);
  std::binomial_distribution<std::uint64_t> draw(samples, p);
  return draw(rng);
}

Eigen::SparseMatrix<double> lazy_kernel_transpose(const ExplicitTree& tree, std::size_t max_depth) {
  std::size_t count = 0;
  while (count < tree.size() && tree.depth(static_cast<ExplicitTree::Index>(count)) <= max_depth) {
    ++count;
  }
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(4 * count);
  for (ExplicitTree::Index u = 0; u < count; ++u) {
    double stay = 1.0;
    if (tree.parent(u) != ExplicitTree::kNone) {
      entries.emplace_back(tree.parent(u), u, 0.25);
      stay -= 0.25;
    }
    if (tree.depth(u) < max_depth) {
      for (unsigned b = 0; b < 2; ++b) {
        if (tree.child(u, b) != ExplicitTree::kNone) {
          entries.emplace_back(tree.child(u, b), u, 0.125);
          stay -= 0.125;
        }
      }
    }
    entries.emplace_back(u, u, stay);
  }
  const auto n = static_cast<Eigen::Index>(count);
  Eigen::SparseMatrix<double> kt(n, n);
  kt.setFromTriplets(entries.begin(), entries.end());
  return kt;
}

std::unique_ptr<RootHitSampler> make_sampler(const BranchingTree& tree, Backend backend, std::size_t node_guard) {
  const BranchingTree* base = &tree;
  if (const auto* view = dynamic_cast<const TruncatedTree*>(&tree)) {
    base = &view->base();
  }
  const auto* explicit_tree = dynamic_cast<const ExplicitTree*>(base);
  if (backend == Backend::kAuto) {
    if (explicit_tree != nullptr) {
      if (explicit_tree->size() <= kAutoPropagateNodes) {
        return std::make_unique<PropagatedSampler>(*explicit_tree);
      }
      return std::make_unique<ExplicitChainSampler>(*explicit_tree);
    }
    try {
      return std::make_unique<PropagatedSampler>(materialize(*base, kAutoPropagateNodes));
    } catch (const GuardError&) {
      return std::make_unique<OracleChainSampler>(*base);
    }
  }
  if (backend == Backend::kPropagate) {
    if (explicit_tree != nullptr) {
      return std::make_unique<PropagatedSampler>(*explicit_tree);
    }
    return std::make_unique<PropagatedSampler>(materialize(*base, node_guard));
  }
  if (explicit_tree != nullptr) {
    return std::make_unique<ExplicitChainSampler>(*explicit_tree);
  }
  return std::make_unique<OracleChainSampler>(*base);
}

// --- alpha estimation ---------------------------------------------------------------

AlphaEstimate estimate_alpha(RootHitSampler& sampler, std::size_t depth, double zeta, double delta,
                             const ChainParams& params, std::uint64_t seed) {
  check_open_unit(zeta, "zeta");
  check_open_unit(delta, "delta");
  params.validate();
  if (depth > sampler.height()) {
    throw std::out_of_range("alpha depth exceeds tree height");
  }
  AlphaEstimate est;
  est.height = depth;
  est.zeta = zeta;
  est.confidence = 1.0 - delta;
  if (depth == 0) {
    // A height-0 tree is the root alone: pi(root) = 1 = alpha.
    return est;
  }
  est.samples = alpha_samples(depth, zeta);
  est.repetitions = alpha_repetitions(delta);
  est.burn_in =
      burn_in_steps(depth, params.tv_tolerance.value_or(default_tv_tolerance(depth, zeta)), params.burn_in_constant);

  std::vector<double> fractions(est.repetitions);
  for (std::uint64_t r = 0; r < est.repetitions; ++r) {
    const std::uint64_t stream = derive_seed(seed, {depth, r});
    const std::uint64_t hits = sampler.root_hits(depth, est.burn_in, est.samples, stream, params.workers);
    fractions[r] = static_cast<double>(hits) / static_cast<double>(est.samples);
  }
  std::sort(fractions.begin(), fractions.end());
  const std::size_t mid = fractions.size() / 2;
  double median = fractions.size() % 2 == 1 ? fractions[mid] : 0.5 * (fractions[mid - 1] + fractions[mid]);
  // pi(root) >= 1/(n+1) on every tree of height n.
  median = std::clamp(median, 1.0 / (static_cast<double>(depth) + 1.0), 1.0);

  est.root_hit_fraction = median;
  est.value = std::ldexp(median, -static_cast<int>(depth));
  est.chain_steps = est.samples * est.repetitions * est.burn_in;
  return est;
}

AlphaEstimate estimate_alpha(const BranchingTree& tree, double zeta, double delta, const ChainParams& params,
                             std::uint64_t seed) {
  if (tree.empty()) {
    throw ParameterError("alpha is undefined on the empty tree");
  }
  auto sampler = make_sampler(tree, params.backend);
  return estimate_alpha(*sampler, tree.height(), zeta, delta, params, seed);
}

std::map<NodePath, Rational> stationary_exact(const ExplicitTree& tree) {
  if (tree.empty()) {
    throw ParameterError("the empty tree has no stationary distribution");
  }
  const RowVector<Rational> pi = stationary_row<Rational>(tree);
  std::map<NodePath, Rational> out;
  for (std::size_t i = 0; i < tree.size(); ++i) {
    out.emplace(tree.path(static_cast<ExplicitTree::Index>(i)), pi(static_cast<Eigen::Index>(i)));
  }
  return out;
}

}  // namespace totp
