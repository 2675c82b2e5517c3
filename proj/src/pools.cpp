#include "radae/pools.hpp"

#include <algorithm>

#include "radae/errors.hpp"

namespace radae {

std::size_t frame_count(const std::vector<EpisodeBatch>& pool) {
  std::size_t n = 0;
  for (const auto& b : pool) n += b.size();
  return n;
}

std::size_t Pools::recent_frames() const { return frame_count(recent); }
std::size_t Pools::finetune_frames() const { return frame_count(finetune); }

namespace {

bool all_labels(const EpisodeBatch& b, int label) { return b.label == label; }

}  // namespace

void push_recent(Pools& pools, EpisodeBatch batch) {
  if (batch.frames.empty()) throw ContractError("push_recent: empty batch");
  pools.recent.push_back(std::move(batch));
  std::size_t frames = pools.recent_frames();
  while (frames > pools.capacity_frames) {
    frames -= pools.recent.front().size();
    pools.recent.erase(pools.recent.begin());
  }
}

bool update_finetune(Pools& pools, const EpisodeBatch& d_i, const EpisodeBatch* d_prev) {
  if (d_i.frames.empty()) throw ContractError("update_finetune: empty batch");
  const bool recovered = all_labels(d_i, 1) && d_prev != nullptr && all_labels(*d_prev, 0);
  const bool collided = all_labels(d_i, 0);
  if (!recovered && !collided) return false;

  auto& pool = pools.finetune;
  const bool duplicate = std::any_of(pool.begin(), pool.end(), [&](const EpisodeBatch& b) {
    return b.episode == d_i.episode;
  });
  if (duplicate) return false;
  pool.push_back(d_i);

  std::size_t frames = frame_count(pool);
  while (frames > pools.capacity_frames) {
    auto oldest = std::min_element(pool.begin(), pool.end(), [](const auto& a, const auto& b) {
      return a.episode < b.episode;
    });
    frames -= oldest->size();
    pool.erase(oldest);
  }
  return true;
}

}  // namespace radae
