#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "totp/common.hpp"
#include "totp/node_path.hpp"

namespace totp {

/// Which children of a node are present in the tree.
struct ChildMask {
  bool left = false;
  bool right = false;

  bool has(unsigned bit) const noexcept { return bit == 0 ? left : right; }
  unsigned count() const noexcept { return static_cast<unsigned>(left) + static_cast<unsigned>(right); }
  friend bool operator==(ChildMask, ChildMask) = default;
};

/// A (not necessarily full) binary tree S of height <= n inside the full
/// binary tree T, seen through a children oracle. Implementations must be pure
/// and deterministic so they can be queried concurrently.
class BranchingTree {
 public:
  virtual ~BranchingTree() = default;

  /// Height bound n; every node has depth <= n.
  virtual std::size_t height() const = 0;
  virtual bool empty() const = 0;
  /// Children of `node` that belong to S. Throws NotInTreeError if `node`
  /// itself is not in S.
  virtual ChildMask children(const NodePath& node) const = 0;
};

/// Children of `node` as paths.
std::vector<NodePath> child_paths(const BranchingTree& tree, const NodePath& node);

/// S_i: the nodes of a tree up to depth i, with height attribute i.
/// Holds a reference to the underlying tree, which must outlive the view.
class TruncatedTree final : public BranchingTree {
 public:
  TruncatedTree(const BranchingTree& base, std::size_t depth);

  std::size_t height() const override { return depth_; }
  bool empty() const override { return base_->empty(); }
  ChildMask children(const NodePath& node) const override;

  const BranchingTree& base() const noexcept { return *base_; }

 private:
  const BranchingTree* base_;
  std::size_t depth_;
};

/// Throws std::out_of_range unless depth <= tree.height(). Truncating a
/// truncated view re-truncates its base, so views never nest.
TruncatedTree truncate(const BranchingTree& tree, std::size_t depth);

/// Materialized prefix-closed node set. Nodes are indexed in (depth, path)
/// order, so the root is index 0 and every parent precedes its children.
class ExplicitTree final : public BranchingTree {
 public:
  using Index = std::uint32_t;
  static constexpr Index kNone = 0xffffffffU;

  /// The empty tree (height 0).
  ExplicitTree() = default;
  /// Validates prefix closure and the height bound. Without an explicit
  /// height the maximum node depth is used. Duplicates are ignored.
  explicit ExplicitTree(std::vector<NodePath> nodes, std::optional<std::size_t> height = std::nullopt);

  static ExplicitTree full_binary(std::size_t height);

  std::size_t height() const override { return height_; }
  bool empty() const override { return paths_.empty(); }
  ChildMask children(const NodePath& node) const override;

  std::size_t size() const noexcept { return paths_.size(); }
  std::optional<Index> find(const NodePath& node) const;
  const NodePath& path(Index i) const { return paths_.at(i); }
  const std::vector<NodePath>& paths() const noexcept { return paths_; }
  Index parent(Index i) const { return parent_[i]; }
  Index child(Index i, unsigned bit) const { return child_[2 * static_cast<std::size_t>(i) + (bit & 1U)]; }
  std::size_t depth(Index i) const { return paths_[i].depth(); }

  /// Number of nodes at each depth 0..height (r_0..r_n).
  std::vector<std::size_t> level_counts() const;
  /// Copy restricted to depth <= depth, with height attribute `depth`.
  ExplicitTree truncated(std::size_t depth) const;

  friend bool operator==(const ExplicitTree& a, const ExplicitTree& b) {
    return a.height_ == b.height_ && a.paths_ == b.paths_;
  }

 private:
  std::vector<NodePath> paths_;
  std::vector<Index> parent_;
  std::vector<Index> child_;
  std::unordered_map<NodePath, Index> index_;
  std::size_t height_ = 0;
};

/// |S|.
std::size_t exact_size(const ExplicitTree& tree);

/// Explicit copy of any branching tree by exhaustive DFS over its children
/// oracle. Throws GuardError past `node_guard` nodes.
ExplicitTree materialize(const BranchingTree& tree, std::size_t node_guard = 1'000'000);

/// Reads the text tree format: one node per line as a {0,1} string, "-" for
/// the root, blank lines and '#' comments ignored, optional "h N" line fixing
/// the height.
ExplicitTree read_tree(std::istream& in);
ExplicitTree load_tree_file(const std::string& path);
void write_tree(std::ostream& out, const ExplicitTree& tree);

}  // namespace totp
