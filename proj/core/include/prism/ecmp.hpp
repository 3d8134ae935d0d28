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

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "prism/hashing.hpp"
#include "prism/rational.hpp"
#include "prism/types.hpp"

namespace prism {

// DIP identities with exact weights. Weights are kept normalized to sum 1.
class DipPool {
 public:
  DipPool() = default;
  static DipPool equal(const std::vector<DipId>& dips);

  void set(DipId dip, Rational weight) { weights_[dip] = weight; }
  void erase(DipId dip) { weights_.erase(dip); }
  bool contains(DipId dip) const { return weights_.count(dip) != 0; }
  Rational weight(DipId dip) const;
  std::size_t size() const { return weights_.size(); }
  bool empty() const { return weights_.empty(); }
  Rational total() const;
  std::vector<DipId> dips() const;
  const std::map<DipId, Rational>& weights() const { return weights_; }

  // Rescales all weights so they sum to 1. No-op on an empty or all-zero pool.
  void normalize();

  friend bool operator==(const DipPool&, const DipPool&) = default;

 private:
  std::map<DipId, Rational> weights_;
};

enum class UpdateReason { kTakeDown, kAddDip, kReweight, kExpand, kReplace, kFail, kRebin };

const char* to_string(UpdateReason reason);

struct BinAssignment {
  BinIndex bin = 0;
  DipId from;
  DipId to;
  friend bool operator==(const BinAssignment&, const BinAssignment&) = default;
};

// A number of bins that must move from one DIP to another. Which bins move
// is left to a bin-selection policy.
struct BinTransfer {
  DipId from;
  DipId to;
  std::size_t count = 0;
  friend bool operator==(const BinTransfer&, const BinTransfer&) = default;
};

struct UpdatePlan {
  UpdateReason reason = UpdateReason::kReweight;
  std::vector<BinAssignment> assignments;  // ascending bin order once resolved
  std::vector<BinTransfer> transfers;
  DipPool pool_after;

  bool resolved() const { return transfers.empty(); }
  bool empty() const { return assignments.empty() && transfers.empty(); }
  std::size_t affected_count() const;
  std::vector<BinIndex> affected_bins() const;
  // Bins each DIP gives up, summed over assignments and transfers.
  std::map<DipId, std::size_t> donations() const;
};

class EcmpTable {
 public:
  EcmpTable() = default;
  EcmpTable(VipId vip, std::vector<DipId> bins, std::uint64_t generation = 0);

  VipId vip_id() const { return vip_; }
  std::size_t size() const { return bins_.size(); }
  std::uint64_t generation() const { return generation_; }
  const std::vector<DipId>& bins() const { return bins_; }
  DipId dip_at(BinIndex bin) const { return bins_.at(bin); }
  BinIndex bin_of(const Signature& sig) const { return ecmp_hash(sig, bins_.size()); }
  DipId lookup(const Signature& sig) const { return bins_[bin_of(sig)]; }

  std::vector<BinIndex> bins_of(DipId dip) const;
  std::map<DipId, std::size_t> counts() const;

  // Rewrites exactly the plan's bins and bumps the generation once.
  // The plan must be resolved and consistent with the current contents.
  void apply(const UpdatePlan& plan);
  // Single-bin rewrite used by the migration loop. Bumps the generation.
  void set_bin(BinIndex bin, DipId dip);

 private:
  friend std::pair<EcmpTable, UpdatePlan> expand_table(const EcmpTable&, const DipPool&,
                                                       std::size_t);
  VipId vip_;
  std::vector<DipId> bins_;
  std::uint64_t generation_ = 0;
};

// Largest-remainder bin counts for `length` bins. Ties go to the lowest DIP.
std::map<DipId, std::size_t> target_counts(const DipPool& pool, std::size_t length);

// Throws kTooSmall when length < |pool|, kInvalidArgument when length is not
// a power of two.
EcmpTable build_table(VipId vip, const DipPool& pool, std::size_t length);

UpdatePlan plan_take_down(const EcmpTable& table, const DipPool& pool, DipId dip);
UpdatePlan plan_fail(const EcmpTable& table, const DipPool& pool, DipId dip);
UpdatePlan plan_add_dip(const EcmpTable& table, const DipPool& pool, DipId dip,
                        Rational weight);
UpdatePlan plan_reweight(const EcmpTable& table, const DipPool& pool,
                         const DipPool& new_weights);
UpdatePlan plan_replace(const EcmpTable& table, const DipPool& pool, DipId old_dip,
                        DipId new_dip);
// Moves each listed bin to the matching fresh DIP. The resulting pool weights
// follow the resulting bin counts.
UpdatePlan plan_rebin(const EcmpTable& table, const DipPool& pool,
                      const std::vector<BinIndex>& bins, const std::vector<DipId>& fresh);

// Doubles the table (bin i + L mirrors bin i) and plans the rebalance needed
// for the doubled length. Throws kCapacityExceeded beyond max_length.
std::pair<EcmpTable, UpdatePlan> expand_table(const EcmpTable& table, const DipPool& pool,
                                              std::size_t max_length);

// Picks `n` of `donor_bins` to give up.
using DonorChooser = std::function<std::vector<BinIndex>(
    DipId donor, const std::vector<BinIndex>& donor_bins, std::size_t n)>;

// Turns the plan's transfers into concrete assignments.
UpdatePlan resolve_plan(const EcmpTable& table, UpdatePlan plan, const DonorChooser& choose);

}  // namespace prism
