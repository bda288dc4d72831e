#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stutterfuzz/mutation.hpp"

namespace stutterfuzz {

/// A seed and its objectives, both minimized: f1 = M1, f2 = -M2.
struct ScoredSeed {
  std::string test_case_id;
  MutationChain chain;
  double f1 = 0.0;
  double f2 = 0.0;

  friend bool operator==(const ScoredSeed&, const ScoredSeed&) = default;
};

/// Strict in both objectives.
bool dominates(const ScoredSeed& a, const ScoredSeed& b);

/// Members not dominated by any other member, in input order. Throws EmptyInput.
std::vector<ScoredSeed> pareto_frontier(const std::vector<ScoredSeed>& seeds);

struct PoolEvent {
  enum class Kind { Added, Rejected, Dominated, Capacity, Duplicate };
  Kind kind = Kind::Added;
  std::string test_case_id;
};

class SeedPool {
 public:
  static constexpr std::size_t kDefaultCapacity = 64;
  static constexpr double kCrowdingRadius = 0.01;

  /// Starts with the unmutated benign seed as a permanent member.
  SeedPool(std::string benign_ref, double benign_m1, std::size_t capacity = kDefaultCapacity);

  const std::string& benign_ref() const { return benign_ref_; }
  const std::vector<ScoredSeed>& members() const { return members_; }
  const ScoredSeed& sentinel() const { return members_.front(); }
  std::size_t capacity() const { return capacity_; }
  const std::vector<PoolEvent>& history() const { return history_; }

  /// Keeps the Pareto frontier of members plus candidate (the sentinel always
  /// stays), then evicts by crowding down to capacity. Throws WrongPool.
  void update(const ScoredSeed& candidate);

  nlohmann::json to_json() const;
  static SeedPool from_json(const nlohmann::json& j);

 private:
  SeedPool() = default;

  std::string benign_ref_;
  std::vector<ScoredSeed> members_;  // members_[0] is the sentinel
  std::size_t capacity_ = kDefaultCapacity;
  std::vector<PoolEvent> history_;
};

SeedPool update_pool(SeedPool pool, const ScoredSeed& candidate);

/// Uniform draw over pool members.
const ScoredSeed& select_seed(const SeedPool& pool, Rng& rng);

}  // namespace stutterfuzz
