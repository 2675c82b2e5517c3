#pragma once

#include <cstddef>
#include <vector>

#include "radae/types.hpp"

namespace radae {

/// The recent pool (B_r) and the fine-tune pool (B_ft). Capacity is a frame budget shared
/// by both pools; each pool keeps its batches in insertion order.
struct Pools {
  std::size_t capacity_frames = 10000;
  std::vector<EpisodeBatch> recent;
  std::vector<EpisodeBatch> finetune;

  explicit Pools(std::size_t tau = 10000) : capacity_frames(tau) {}

  std::size_t recent_frames() const;
  std::size_t finetune_frames() const;
};

std::size_t frame_count(const std::vector<EpisodeBatch>& pool);

/// Appends to the recent pool and evicts the oldest batches while over budget.
void push_recent(Pools& pools, EpisodeBatch batch);

/// Fine-tune pool update. A batch joins when it is all-safe right after an all-collided
/// batch, or when it is all-collided. Afterwards the batch with the smallest episode index
/// is evicted while the pool is over budget. Returns true when `d_i` was added.
bool update_finetune(Pools& pools, const EpisodeBatch& d_i, const EpisodeBatch* d_prev);

}  // namespace radae
