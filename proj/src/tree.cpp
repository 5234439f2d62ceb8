#include "totp/tree.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace totp {

std::vector<NodePath> child_paths(const BranchingTree& tree, const NodePath& node) {
  const ChildMask mask = tree.children(node);
  std::vector<NodePath> out;
  for (unsigned b = 0; b < 2; ++b) {
    if (mask.has(b)) {
      out.push_back(node.child(b));
    }
  }
  return out;
}

TruncatedTree::TruncatedTree(const BranchingTree& base, std::size_t depth) : base_(&base), depth_(depth) {
  if (depth > base.height()) {
    throw std::out_of_range("truncation depth " + std::to_string(depth) + " exceeds tree height " +
                            std::to_string(base.height()));
  }
}

ChildMask TruncatedTree::children(const NodePath& node) const {
  if (node.depth() > depth_) {
    throw NotInTreeError("node " + node.to_string() + " lies below truncation depth " + std::to_string(depth_));
  }
  ChildMask mask = base_->children(node);
  if (node.depth() == depth_) {
    return {};
  }
  return mask;
}

TruncatedTree truncate(const BranchingTree& tree, std::size_t depth) {
  if (const auto* view = dynamic_cast<const TruncatedTree*>(&tree)) {
    if (depth > view->height()) {
      throw std::out_of_range("truncation depth " + std::to_string(depth) + " exceeds tree height " +
                              std::to_string(view->height()));
    }
    return TruncatedTree(view->base(), depth);
  }
  return TruncatedTree(tree, depth);
}

ExplicitTree::ExplicitTree(std::vector<NodePath> nodes, std::optional<std::size_t> height) {
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  const std::size_t max_depth = nodes.empty() ? 0 : nodes.back().depth();
  height_ = height.value_or(max_depth);
  if (max_depth > height_) {
    throw ParseError("node at depth " + std::to_string(max_depth) + " exceeds declared height " +
                     std::to_string(height_));
  }
  if (nodes.size() >= kNone) {
    throw GuardError("explicit tree too large");
  }
  paths_ = std::move(nodes);
  parent_.assign(paths_.size(), kNone);
  child_.assign(2 * paths_.size(), kNone);
  index_.reserve(paths_.size());
  for (Index i = 0; i < paths_.size(); ++i) {
    index_.emplace(paths_[i], i);
  }
  if (!paths_.empty() && !paths_.front().is_root()) {
    throw ParseError("tree is nonempty but does not contain the root");
  }
  for (Index i = 1; i < paths_.size(); ++i) {
    const NodePath& p = paths_[i];
    auto it = index_.find(p.parent());
    if (it == index_.end()) {
      throw ParseError("tree is not prefix-closed: parent of " + p.to_string() + " missing");
    }
    parent_[i] = it->second;
    child_[2 * static_cast<std::size_t>(it->second) + p[p.depth() - 1]] = i;
  }
}

ExplicitTree ExplicitTree::full_binary(std::size_t height) {
  if (height > 24) {
    throw GuardError("full binary tree of height " + std::to_string(height) + " is too large to materialize");
  }
  std::vector<NodePath> nodes{NodePath{}};
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].depth() < height) {
      nodes.push_back(nodes[i].child(0));
      nodes.push_back(nodes[i].child(1));
    }
  }
  return ExplicitTree(std::move(nodes), height);
}

ChildMask ExplicitTree::children(const NodePath& node) const {
  const auto i = find(node);
  if (!i) {
    throw NotInTreeError("node " + node.to_string() + " is not in the tree");
  }
  return {child(*i, 0) != kNone, child(*i, 1) != kNone};
}

std::optional<ExplicitTree::Index> ExplicitTree::find(const NodePath& node) const {
  auto it = index_.find(node);
  if (it == index_.end()) {
    return std::nullopt;
  }
  return it->second;
}

std::vector<std::size_t> ExplicitTree::level_counts() const {
  std::vector<std::size_t> r(height_ + 1, 0);
  for (const NodePath& p : paths_) {
    ++r[p.depth()];
  }
  return r;
}

ExplicitTree ExplicitTree::truncated(std::size_t depth) const {
  if (depth > height_) {
    throw std::out_of_range("truncation depth " + std::to_string(depth) + " exceeds tree height " +
                            std::to_string(height_));
  }
  std::vector<NodePath> kept;
  for (const NodePath& p : paths_) {
    if (p.depth() <= depth) {
      kept.push_back(p);
    }
  }
  return ExplicitTree(std::move(kept), depth);
}

std::size_t exact_size(const ExplicitTree& tree) { return tree.size(); }

ExplicitTree materialize(const BranchingTree& tree, std::size_t node_guard) {
  if (tree.empty()) {
    return ExplicitTree({}, tree.height());
  }
  std::vector<NodePath> nodes;
  std::vector<NodePath> stack{NodePath{}};
  while (!stack.empty()) {
    NodePath node = std::move(stack.back());
    stack.pop_back();
    const ChildMask mask = tree.children(node);
    for (unsigned b = 0; b < 2; ++b) {
      if (mask.has(b)) {
        stack.push_back(node.child(b));
      }
    }
    nodes.push_back(std::move(node));
    if (nodes.size() > node_guard) {
      throw GuardError("tree has more than " + std::to_string(node_guard) + " nodes");
    }
  }
  return ExplicitTree(std::move(nodes), tree.height());
}

ExplicitTree read_tree(std::istream& in) {
  std::vector<NodePath> nodes;
  std::optional<std::size_t> height;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') {
      continue;
    }
    const auto last = line.find_last_not_of(" \t");
    const std::string token = line.substr(first, last - first + 1);
    if (token[0] == 'h') {
      std::istringstream ss(token.substr(1));
      long long h = -1;
      std::string rest;
      if (!(ss >> h) || h < 0 || (ss >> rest) || height) {
        throw ParseError("line " + std::to_string(lineno) + ": bad height directive '" + token + "'");
      }
      height = static_cast<std::size_t>(h);
      continue;
    }
    try {
      nodes.push_back(NodePath::parse(token));
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return ExplicitTree(std::move(nodes), height);
}

ExplicitTree load_tree_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open tree file '" + path + "'");
  }
  return read_tree(in);
}

void write_tree(std::ostream& out, const ExplicitTree& tree) {
  out << "h " << tree.height() << '\n';
  for (const NodePath& p : tree.paths()) {
    out << p.to_string() << '\n';
  }
}

}  // namespace totp
