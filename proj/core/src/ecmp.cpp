// Copyright 2026 The Prism Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "prism/ecmp.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "prism/error.hpp"

namespace prism {
namespace {

bool is_pow2(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

std::string dip_name(DipId d) { return "DIP " + std::to_string(d.value); }

struct Bounds {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
};

// floor/ceil of the normalized weight times the length for each pool member.
std::map<DipId, Bounds> bounds_for(const DipPool& pool, std::size_t length) {
  const Rational total = pool.total();
  std::map<DipId, Bounds> out;
  for (const auto& [dip, w] : pool.weights()) {
    if (total.is_zero()) {
      out[dip] = {0, 0};
      continue;
    }
    const Rational share = w / total;
    out[dip] = {share.floor_times(static_cast<std::int64_t>(length)),
                share.ceil_times(static_cast<std::int64_t>(length))};
  }
  return out;
}

// Final per-DIP counts closest to the current ones that stay within one bin
// of the weighted share and sum to the table length.
std::map<DipId, std::int64_t> settle_counts(const std::map<DipId, std::size_t>& current,
                                            const DipPool& pool_after, std::size_t length) {
  const auto bounds = bounds_for(pool_after, length);
  std::map<DipId, std::int64_t> next;
  std::int64_t sum = 0;
  for (const auto& [dip, b] : bounds) {
    auto it = current.find(dip);
    const std::int64_t c = it == current.end() ? 0 : static_cast<std::int64_t>(it->second);
    next[dip] = std::clamp(c, b.lo, b.hi);
    sum += next[dip];
  }
  auto cur = [&current](DipId d) {
    auto it = current.find(d);
    return it == current.end() ? std::int64_t{0} : static_cast<std::int64_t>(it->second);
  };
  const auto len = static_cast<std::int64_t>(length);
  while (sum < len) {
    // Prefer a DIP that would otherwise donate, then the lowest id.
    DipId pick{};
    bool found = false;
    bool pick_saves = false;
    for (const auto& [dip, b] : bounds) {
      if (next[dip] >= b.hi) continue;
      const bool saves = next[dip] < cur(dip);
      if (!found || (saves && !pick_saves)) {
        pick = dip;
        pick_saves = saves;
        found = true;
      }
    }
    if (!found) break;
    ++next[pick];
    ++sum;
  }
  while (sum > len) {
    DipId pick{};
    bool found = false;
    bool pick_saves = false;
    for (const auto& [dip, b] : bounds) {
      if (next[dip] <= b.lo) continue;
      const bool saves = next[dip] > cur(dip);
      if (!found || (saves && !pick_saves)) {
        pick = dip;
        pick_saves = saves;
        found = true;
      }
    }
    if (!found) break;
    --next[pick];
    --sum;
  }
  return next;
}

// Deals each donor unit to receivers in round-robin order, skipping receivers
// whose need is met. Calls emit(donor, receiver) per unit.
template <class Emit>
void deal(const std::vector<std::pair<DipId, std::int64_t>>& donors,
          std::vector<std::pair<DipId, std::int64_t>> receivers, Emit&& emit) {
  std::size_t cursor = 0;
  for (const auto& [donor, units] : donors) {
    for (std::int64_t u = 0; u < units; ++u) {
      std::size_t tries = 0;
      while (receivers[cursor].second == 0 && tries < receivers.size()) {
        cursor = (cursor + 1) % receivers.size();
        ++tries;
      }
      if (receivers[cursor].second == 0) return;
      emit(donor, receivers[cursor].first);
      --receivers[cursor].second;
      cursor = (cursor + 1) % receivers.size();
    }
  }
}

// Compares current counts against settled targets and emits transfers.
std::vector<BinTransfer> plan_transfers(const std::map<DipId, std::size_t>& current,
                                        const std::map<DipId, std::int64_t>& next) {
  std::vector<std::pair<DipId, std::int64_t>> donors;
  std::vector<std::pair<DipId, std::int64_t>> receivers;
  std::set<DipId> all;
  for (const auto& [d, c] : current) all.insert(d);
  for (const auto& [d, n] : next) all.insert(d);
  for (DipId d : all) {
    auto ci = current.find(d);
    auto ni = next.find(d);
    const std::int64_t c = ci == current.end() ? 0 : static_cast<std::int64_t>(ci->second);
    const std::int64_t n = ni == next.end() ? 0 : ni->second;
    if (c > n) donors.emplace_back(d, c - n);
    if (n > c) receivers.emplace_back(d, n - c);
  }
  std::vector<BinTransfer> out;
  if (receivers.empty()) return out;
  deal(donors, receivers, [&out](DipId from, DipId to) {
    for (auto& t : out) {
      if (t.from == from && t.to == to) {
        ++t.count;
        return;
      }
    }
    out.push_back(BinTransfer{from, to, 1});
  });
  return out;
}

DipPool normalized(DipPool pool) {
  pool.normalize();
  return pool;
}

void require_member(const DipPool& pool, DipId dip) {
  if (!pool.contains(dip)) throw Error(ErrorCode::kNotInPool, dip_name(dip) + " not in pool");
}

UpdatePlan plan_removal(const EcmpTable& table, const DipPool& pool, DipId dip,
                        UpdateReason reason) {
  require_member(pool, dip);
  if (pool.size() < 2) {
    throw Error(ErrorCode::kPoolWouldBeEmpty, "cannot remove the last DIP");
  }
  UpdatePlan plan;
  plan.reason = reason;
  DipPool after = pool;
  after.erase(dip);
  plan.pool_after = normalized(after);

  const auto current = table.counts();
  const auto next = settle_counts(current, plan.pool_after, table.size());
  std::vector<std::pair<DipId, std::int64_t>> receivers;
  for (const auto& [d, n] : next) {
    auto it = current.find(d);
    const std::int64_t c = it == current.end() ? 0 : static_cast<std::int64_t>(it->second);
    if (n > c) receivers.emplace_back(d, n - c);
  }
  const auto donor_bins = table.bins_of(dip);
  std::size_t k = 0;
  deal({{dip, static_cast<std::int64_t>(donor_bins.size())}}, receivers,
       [&](DipId from, DipId to) {
         plan.assignments.push_back(BinAssignment{donor_bins[k++], from, to});
       });
  return plan;
}

}  // namespace

DipPool DipPool::equal(const std::vector<DipId>& dips) {
  DipPool pool;
  for (DipId d : dips) pool.set(d, Rational(1, static_cast<std::int64_t>(dips.size())));
  return pool;
}

Rational DipPool::weight(DipId dip) const {
  auto it = weights_.find(dip);
  return it == weights_.end() ? Rational() : it->second;
}

Rational DipPool::total() const {
  Rational t;
  for (const auto& [d, w] : weights_) t = t + w;
  return t;
}

std::vector<DipId> DipPool::dips() const {
  std::vector<DipId> out;
  out.reserve(weights_.size());
  for (const auto& [d, w] : weights_) out.push_back(d);
  return out;
}

void DipPool::normalize() {
  const Rational t = total();
  if (t.is_zero()) return;
  for (auto& [d, w] : weights_) w = w / t;
}

const char* to_string(UpdateReason reason) {
  switch (reason) {
    case UpdateReason::kTakeDown: return "take_down";
    case UpdateReason::kAddDip: return "add_dip";
    case UpdateReason::kReweight: return "reweight";
    case UpdateReason::kExpand: return "expand";
    case UpdateReason::kReplace: return "replace";
    case UpdateReason::kFail: return "fail";
    case UpdateReason::kRebin: return "rebin";
  }
  return "unknown";
}

std::size_t UpdatePlan::affected_count() const {
  std::size_t n = assignments.size();
  for (const auto& t : transfers) n += t.count;
  return n;
}

std::vector<BinIndex> UpdatePlan::affected_bins() const {
  std::vector<BinIndex> out;
  out.reserve(assignments.size());
  for (const auto& a : assignments) out.push_back(a.bin);
  std::sort(out.begin(), out.end());
  return out;
}

std::map<DipId, std::size_t> UpdatePlan::donations() const {
  std::map<DipId, std::size_t> out;
  for (const auto& a : assignments) ++out[a.from];
  for (const auto& t : transfers) out[t.from] += t.count;
  return out;
}

EcmpTable::EcmpTable(VipId vip, std::vector<DipId> bins, std::uint64_t generation)
    : vip_(vip), bins_(std::move(bins)), generation_(generation) {}

std::vector<BinIndex> EcmpTable::bins_of(DipId dip) const {
  std::vector<BinIndex> out;
  for (std::size_t i = 0; i < bins_.size(); ++i) {
    if (bins_[i] == dip) out.push_back(static_cast<BinIndex>(i));
  }
  return out;
}

std::map<DipId, std::size_t> EcmpTable::counts() const {
  std::map<DipId, std::size_t> out;
  for (DipId d : bins_) ++out[d];
  return out;
}

void EcmpTable::apply(const UpdatePlan& plan) {
  if (!plan.resolved()) {
    throw Error(ErrorCode::kInvalidArgument, "plan has unresolved transfers");
  }
  for (const auto& a : plan.assignments) {
    if (a.bin >= bins_.size() || bins_[a.bin] != a.from) {
      throw Error(ErrorCode::kInvalidArgument,
                  "plan does not match table at bin " + std::to_string(a.bin));
    }
  }
  for (const auto& a : plan.assignments) bins_[a.bin] = a.to;
  ++generation_;
}

void EcmpTable::set_bin(BinIndex bin, DipId dip) {
  bins_.at(bin) = dip;
  ++generation_;
}

std::map<DipId, std::size_t> target_counts(const DipPool& pool, std::size_t length) {
  const Rational total = pool.total();
  std::map<DipId, std::size_t> out;
  if (total.is_zero()) return out;
  std::int64_t assigned = 0;
  std::vector<std::pair<Rational, DipId>> remainders;
  for (const auto& [dip, w] : pool.weights()) {
    const Rational share = w / total;
    const std::int64_t base = share.floor_times(static_cast<std::int64_t>(length));
    out[dip] = static_cast<std::size_t>(base);
    assigned += base;
    remainders.emplace_back(share * Rational(static_cast<std::int64_t>(length)) - Rational(base),
                            dip);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < static_cast<std::int64_t>(length); ++i, ++assigned) {
    ++out[remainders[i % remainders.size()].second];
  }
  return out;
}

EcmpTable build_table(VipId vip, const DipPool& pool, std::size_t length) {
  if (!is_pow2(length)) {
    throw Error(ErrorCode::kInvalidArgument, "ECMP length must be a power of two");
  }
  if (pool.empty()) throw Error(ErrorCode::kEmptyTable, "pool is empty");
  if (length < pool.size()) {
    throw Error(ErrorCode::kTooSmall, "ECMP length smaller than pool size");
  }
  auto quota = target_counts(pool, length);
  std::vector<DipId> order = pool.dips();
  std::vector<DipId> bins;
  bins.reserve(length);
  std::size_t cursor = 0;
  while (bins.size() < length) {
    DipId d = order[cursor % order.size()];
    ++cursor;
    if (quota[d] == 0) continue;
    --quota[d];
    bins.push_back(d);
  }
  return EcmpTable(vip, std::move(bins));
}

UpdatePlan plan_take_down(const EcmpTable& table, const DipPool& pool, DipId dip) {
  return plan_removal(table, pool, dip, UpdateReason::kTakeDown);
}

UpdatePlan plan_fail(const EcmpTable& table, const DipPool& pool, DipId dip) {
  return plan_removal(table, pool, dip, UpdateReason::kFail);
}

UpdatePlan plan_add_dip(const EcmpTable& table, const DipPool& pool, DipId dip,
                        Rational weight) {
  if (pool.contains(dip)) {
    throw Error(ErrorCode::kAlreadyPresent, dip_name(dip) + " already in pool");
  }
  if (weight >= Rational(1)) {
    throw Error(ErrorCode::kDomainError, "new DIP weight must be below 1");
  }
  UpdatePlan plan;
  plan.reason = UpdateReason::kAddDip;
  if (weight.is_zero()) {
    plan.pool_after = pool;
    return plan;
  }
  if (table.size() < pool.size() + 1) {
    throw Error(ErrorCode::kTooSmall, "ECMP table too small for another DIP");
  }
  DipPool after = normalized(pool);
  const Rational keep = Rational(1) - weight;
  for (const auto& [d, w] : pool.weights()) after.set(d, after.weight(d) * keep);
  after.set(dip, weight);
  plan.pool_after = normalized(after);
  const auto current = table.counts();
  plan.transfers = plan_transfers(current, settle_counts(current, plan.pool_after, table.size()));
  return plan;
}

UpdatePlan plan_reweight(const EcmpTable& table, const DipPool& pool,
                         const DipPool& new_weights) {
  if (new_weights.size() != pool.size()) {
    throw Error(ErrorCode::kInvalidArgument, "reweight must cover the current pool");
  }
  for (const auto& [d, w] : new_weights.weights()) {
    require_member(pool, d);
    if (w.is_zero() || w < Rational(0)) {
      throw Error(ErrorCode::kDomainError, "weights must be positive");
    }
  }
  UpdatePlan plan;
  plan.reason = UpdateReason::kReweight;
  plan.pool_after = normalized(new_weights);
  const auto current = table.counts();
  plan.transfers = plan_transfers(current, settle_counts(current, plan.pool_after, table.size()));
  return plan;
}

UpdatePlan plan_replace(const EcmpTable& table, const DipPool& pool, DipId old_dip,
                        DipId new_dip) {
  require_member(pool, old_dip);
  if (pool.contains(new_dip)) {
    throw Error(ErrorCode::kAlreadyPresent, dip_name(new_dip) + " already in pool");
  }
  UpdatePlan plan;
  plan.reason = UpdateReason::kReplace;
  DipPool after = pool;
  after.erase(old_dip);
  after.set(new_dip, pool.weight(old_dip));
  plan.pool_after = normalized(after);
  for (BinIndex b : table.bins_of(old_dip)) {
    plan.assignments.push_back(BinAssignment{b, old_dip, new_dip});
  }
  return plan;
}

UpdatePlan plan_rebin(const EcmpTable& table, const DipPool& pool,
                      const std::vector<BinIndex>& bins, const std::vector<DipId>& fresh) {
  if (bins.size() != fresh.size()) {
    throw Error(ErrorCode::kInvalidArgument, "one fresh DIP per bin required");
  }
  UpdatePlan plan;
  plan.reason = UpdateReason::kRebin;
  std::set<BinIndex> seen;
  auto counts = table.counts();
  for (std::size_t i = 0; i < bins.size(); ++i) {
    if (bins[i] >= table.size() || !seen.insert(bins[i]).second) {
      throw Error(ErrorCode::kInvalidArgument, "bad or duplicate bin in rebin");
    }
    if (pool.contains(fresh[i]) || counts.count(fresh[i]) != 0) {
      throw Error(ErrorCode::kAlreadyPresent, dip_name(fresh[i]) + " already in pool");
    }
    const DipId from = table.dip_at(bins[i]);
    plan.assignments.push_back(BinAssignment{bins[i], from, fresh[i]});
    --counts[from];
    ++counts[fresh[i]];
  }
  std::sort(plan.assignments.begin(), plan.assignments.end(),
            [](const auto& a, const auto& b) { return a.bin < b.bin; });
  const auto len = static_cast<std::int64_t>(table.size());
  for (const auto& [d, c] : counts) {
    if (c > 0) plan.pool_after.set(d, Rational(static_cast<std::int64_t>(c), len));
  }
  return plan;
}

std::pair<EcmpTable, UpdatePlan> expand_table(const EcmpTable& table, const DipPool& pool,
                                              std::size_t max_length) {
  const std::size_t len = table.size() * 2;
  if (len > max_length) {
    throw Error(ErrorCode::kCapacityExceeded,
                "ECMP length " + std::to_string(len) + " exceeds maximum");
  }
  std::vector<DipId> bins = table.bins();
  bins.insert(bins.end(), table.bins().begin(), table.bins().end());
  EcmpTable grown(table.vip_id(), std::move(bins), table.generation() + 1);
  UpdatePlan plan;
  plan.reason = UpdateReason::kExpand;
  plan.pool_after = normalized(pool);
  const auto current = grown.counts();
  plan.transfers = plan_transfers(current, settle_counts(current, plan.pool_after, len));
  return {std::move(grown), std::move(plan)};
}

UpdatePlan resolve_plan(const EcmpTable& table, UpdatePlan plan, const DonorChooser& choose) {
  if (plan.transfers.empty()) return plan;
  std::map<DipId, std::vector<BinTransfer*>> by_donor;
  std::map<DipId, std::size_t> out_count;
  for (auto& t : plan.transfers) {
    by_donor[t.from].push_back(&t);
    out_count[t.from] += t.count;
  }
  for (auto& [donor, list] : by_donor) {
    const auto donor_bins = table.bins_of(donor);
    const std::size_t n = out_count[donor];
    if (n > donor_bins.size()) {
      throw Error(ErrorCode::kInsufficientBins, dip_name(donor) + " lacks bins to donate");
    }
    std::vector<BinIndex> chosen = choose(donor, donor_bins, n);
    if (chosen.size() != n) {
      throw Error(ErrorCode::kInsufficientBins, "bin selection returned wrong count");
    }
    std::sort(chosen.begin(), chosen.end());
    std::vector<std::size_t> left;
    for (auto* t : list) left.push_back(t->count);
    std::size_t cursor = 0;
    for (BinIndex b : chosen) {
      while (left[cursor] == 0) cursor = (cursor + 1) % left.size();
      plan.assignments.push_back(BinAssignment{b, donor, list[cursor]->to});
      --left[cursor];
      cursor = (cursor + 1) % left.size();
    }
  }
  plan.transfers.clear();
  std::sort(plan.assignments.begin(), plan.assignments.end(),
            [](const auto& a, const auto& b) { return a.bin < b.bin; });
  return plan;
}

}  // namespace prism
