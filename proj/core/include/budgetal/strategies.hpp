#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "budgetal/dataset.hpp"
#include "budgetal/learner.hpp"

namespace budgetal::strategies {

enum class StrategyKind {
    Random,
    MinMargin,
    MaxEntropy,
    LeastConfidence,
    CoreSet,
    Badge,
    Typicality,
    InverseTypicality,
    ProbCover,
};

/// Kinds that score candidates through a trained model.
bool requires_model(StrategyKind kind);

/// Kinds that read only feature vectors: permuting labels of the unlabeled
/// pool must not change their output.
bool is_label_blind(StrategyKind kind);

std::string kind_name(StrategyKind kind);
StrategyKind parse_kind(const std::string& name);

struct StrategyParams {
    std::optional<double> delta;  // coverage radius; default = distance quantile
    std::size_t knn_k = 20;       // typicality neighborhood, clamped to |U| - 1
    std::uint64_t seed = 0;
};

struct QueryContext {
    const Dataset& dataset;
    PoolState pool;
    const learn::SoftmaxModel* model = nullptr;  // required by some kinds
    StrategyParams params;
};

/// Query batch selection: returns a sorted set A of min(batch, |U|) distinct
/// unlabeled indices, deterministic per seed.
IndexSet select(StrategyKind kind, const QueryContext& ctx, std::size_t batch);

/// Raw uncertainty scores aligned with `unlabeled`:
///   MinMargin       p(1st) - p(2nd), selected ascending
///   MaxEntropy      -sum p ln p,      selected descending
///   LeastConfidence 1 - max p,        selected descending
std::vector<double> uncertainty_scores(StrategyKind kind,
                                       const learn::SoftmaxModel& model,
                                       const Dataset& dataset,
                                       const IndexSet& unlabeled);

/// Farthest-first traversal: repeatedly adds the candidate whose distance to
/// the nearest chosen center is largest (ties to the lowest index). With no
/// centers the first pick is the lowest candidate index. Returns picks in
/// selection order.
IndexSet k_center_greedy(const Dataset& dataset, const IndexSet& centers,
                         const IndexSet& candidates, std::size_t k);

/// k-means++ seeding over gradient embeddings: first center with probability
/// proportional to squared norm, then D^2 sampling. Falls back to Random
/// (same seed) when every embedding is zero.
IndexSet badge_select(const learn::SoftmaxModel& model, const Dataset& dataset,
                      const IndexSet& unlabeled, std::size_t batch,
                      std::uint64_t seed);

/// Inverse mean distance to the knn_k nearest neighbors inside `unlabeled`;
/// duplicates (zero mean distance) are capped at 1e12.
std::vector<double> typicality(const Dataset& dataset, const IndexSet& unlabeled,
                               std::size_t knn_k);

/// Cluster the pool into |labeled| + batch k-means clusters and take, from
/// each of the `batch` largest clusters free of labeled points, its most
/// typical member (least typical when `inverse`). Falls back to the largest
/// covered clusters when too few are uncovered.
IndexSet typicality_cluster_select(const Dataset& dataset, const PoolState& pool,
                                   std::size_t batch, std::size_t knn_k,
                                   std::uint64_t seed, bool inverse);

/// Greedy maximum coverage with balls of radius delta; points within delta
/// of a labeled point are pre-covered. When everything is covered before the
/// batch is full, the remaining picks take the most typical uncovered-degree
/// candidates.
IndexSet probcover_select(const Dataset& dataset, const PoolState& pool,
                          std::size_t batch, double delta);

/// Every unlabeled point in the order probcover_select would pick it
/// (greedy phase first, then the typicality fallback).
IndexSet probcover_rank_order(const Dataset& dataset, const PoolState& pool,
                              double delta);

/// 5th percentile of pairwise distances among the unlabeled pool.
double default_probcover_delta(const Dataset& dataset, const IndexSet& unlabeled);

}  // namespace budgetal::strategies
