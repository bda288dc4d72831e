#include "stutterfuzz/selection.hpp"

#include <algorithm>
#include <cmath>

#include "stutterfuzz/error.hpp"
#include "stutterfuzz/serialization.hpp"

namespace stutterfuzz {

bool dominates(const ScoredSeed& a, const ScoredSeed& b) { return a.f1 < b.f1 && a.f2 < b.f2; }

std::vector<ScoredSeed> pareto_frontier(const std::vector<ScoredSeed>& seeds) {
  if (seeds.empty()) throw Error(ErrorCode::EmptyInput, "pareto_frontier of an empty set");
  std::vector<ScoredSeed> out;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < seeds.size() && !dominated; ++j) {
      dominated = j != i && dominates(seeds[j], seeds[i]);
    }
    if (!dominated) out.push_back(seeds[i]);
  }
  return out;
}

SeedPool::SeedPool(std::string benign_ref, double benign_m1, std::size_t capacity)
    : benign_ref_(std::move(benign_ref)), capacity_(std::max<std::size_t>(capacity, 1)) {
  ScoredSeed sentinel;
  sentinel.chain.benign_ref = benign_ref_;
  sentinel.test_case_id = chain_id(sentinel.chain);
  sentinel.f1 = benign_m1;
  sentinel.f2 = -1.0;
  members_.push_back(std::move(sentinel));
}

void SeedPool::update(const ScoredSeed& candidate) {
  if (candidate.chain.benign_ref != benign_ref_) {
    throw Error(ErrorCode::WrongPool, "candidate for '" + candidate.chain.benign_ref +
                                          "' offered to pool of '" + benign_ref_ + "'");
  }
  const auto same_id = [&](const ScoredSeed& s) { return s.test_case_id == candidate.test_case_id; };
  if (std::any_of(members_.begin(), members_.end(), same_id)) {
    history_.push_back({PoolEvent::Kind::Duplicate, candidate.test_case_id});
    return;
  }

  std::vector<ScoredSeed> all = members_;
  all.push_back(candidate);
  const auto frontier = pareto_frontier(all);
  const auto on_frontier = [&](const ScoredSeed& s) {
    return std::any_of(frontier.begin(), frontier.end(),
                       [&](const ScoredSeed& f) { return f.test_case_id == s.test_case_id; });
  };

  std::vector<ScoredSeed> kept{members_.front()};
  for (std::size_t i = 1; i < all.size(); ++i) {
    if (on_frontier(all[i])) {
      kept.push_back(all[i]);
    } else {
      const bool is_candidate = i + 1 == all.size();
      history_.push_back({is_candidate ? PoolEvent::Kind::Rejected : PoolEvent::Kind::Dominated,
                          all[i].test_case_id});
    }
  }
  if (on_frontier(candidate)) history_.push_back({PoolEvent::Kind::Added, candidate.test_case_id});

  while (kept.size() > capacity_) {
    // Evict the most crowded non-sentinel member; ties go to the worse point.
    std::size_t victim = 1;
    std::size_t victim_crowd = 0;
    for (std::size_t i = 1; i < kept.size(); ++i) {
      std::size_t crowd = 0;
      for (std::size_t j = 0; j < kept.size(); ++j) {
        if (j != i && std::max(std::abs(kept[i].f1 - kept[j].f1), std::abs(kept[i].f2 - kept[j].f2)) <=
                          kCrowdingRadius) {
          ++crowd;
        }
      }
      const bool worse = std::tie(kept[i].f1, kept[i].f2) > std::tie(kept[victim].f1, kept[victim].f2);
      if (i == 1 || crowd > victim_crowd || (crowd == victim_crowd && worse)) {
        victim = i;
        victim_crowd = crowd;
      }
    }
    history_.push_back({PoolEvent::Kind::Capacity, kept[victim].test_case_id});
    kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(victim));
  }
  members_ = std::move(kept);
}

nlohmann::json SeedPool::to_json() const {
  nlohmann::json members = nlohmann::json::array();
  for (const auto& m : members_) {
    members.push_back({{"id", m.test_case_id}, {"f1", m.f1}, {"f2", m.f2}, {"chain", chain_to_json(m.chain)}});
  }
  return {{"schema_version", kSchemaVersion},
          {"benign_ref", benign_ref_},
          {"capacity", capacity_},
          {"members", std::move(members)}};
}

SeedPool SeedPool::from_json(const nlohmann::json& j) {
  try {
    SeedPool pool;
    pool.benign_ref_ = j.at("benign_ref").get<std::string>();
    pool.capacity_ = j.value("capacity", kDefaultCapacity);
    for (const auto& m : j.at("members")) {
      ScoredSeed s;
      s.test_case_id = m.at("id").get<std::string>();
      s.f1 = m.at("f1").get<double>();
      s.f2 = m.at("f2").get<double>();
      s.chain = chain_from_json(m.at("chain"));
      pool.members_.push_back(std::move(s));
    }
    if (pool.members_.empty() || !pool.members_.front().chain.records.empty()) {
      throw Error(ErrorCode::ConfigError, "pool snapshot must start with the benign seed");
    }
    return pool;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("malformed pool snapshot: ") + e.what());
  }
}

SeedPool update_pool(SeedPool pool, const ScoredSeed& candidate) {
  pool.update(candidate);
  return pool;
}

const ScoredSeed& select_seed(const SeedPool& pool, Rng& rng) {
  std::uniform_int_distribution<std::size_t> dist(0, pool.members().size() - 1);
  return pool.members()[dist(rng)];
}

}  // namespace stutterfuzz
