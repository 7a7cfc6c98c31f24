#include "budgetal/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "budgetal/rng.hpp"

namespace budgetal::strategies {

namespace {

constexpr double kDuplicateTypicalityCap = 1e12;

double sq_dist(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double u = a[j] - b[j];
        s += u * u;
    }
    return s;
}

IndexSet random_select(const IndexSet& unlabeled, std::size_t batch,
                       std::uint64_t seed) {
    auto rng = make_engine(seed, 2);
    auto picked = sample_without_replacement(unlabeled, batch, rng);
    std::sort(picked.begin(), picked.end());
    return picked;
}

// Indices of the `batch` best scores; ties resolve to the lower pool index.
IndexSet pick_extreme(const IndexSet& unlabeled, const std::vector<double>& scores,
                      std::size_t batch, bool ascending) {
    std::vector<std::size_t> order(unlabeled.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b])
            return ascending ? scores[a] < scores[b] : scores[a] > scores[b];
        return unlabeled[a] < unlabeled[b];
    });
    IndexSet out;
    out.reserve(batch);
    for (std::size_t k = 0; k < batch; ++k) out.push_back(unlabeled[order[k]]);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

bool requires_model(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::MinMargin:
        case StrategyKind::MaxEntropy:
        case StrategyKind::LeastConfidence:
        case StrategyKind::Badge:
            return true;
        default:
            return false;
    }
}

bool is_label_blind(StrategyKind kind) { return !requires_model(kind); }

std::string kind_name(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::Random: return "random";
        case StrategyKind::MinMargin: return "min-margin";
        case StrategyKind::MaxEntropy: return "max-entropy";
        case StrategyKind::LeastConfidence: return "least-confidence";
        case StrategyKind::CoreSet: return "coreset";
        case StrategyKind::Badge: return "badge";
        case StrategyKind::Typicality: return "typicality";
        case StrategyKind::InverseTypicality: return "inverse-typicality";
        case StrategyKind::ProbCover: return "probcover";
    }
    return "unknown";
}

StrategyKind parse_kind(const std::string& name) {
    for (StrategyKind k : {StrategyKind::Random, StrategyKind::MinMargin,
                           StrategyKind::MaxEntropy, StrategyKind::LeastConfidence,
                           StrategyKind::CoreSet, StrategyKind::Badge,
                           StrategyKind::Typicality, StrategyKind::InverseTypicality,
                           StrategyKind::ProbCover})
        if (kind_name(k) == name) return k;
    throw std::invalid_argument("unknown strategy '" + name + "'");
}

std::vector<double> uncertainty_scores(StrategyKind kind,
                                       const learn::SoftmaxModel& model,
                                       const Dataset& dataset,
                                       const IndexSet& unlabeled) {
    std::vector<double> scores;
    scores.reserve(unlabeled.size());
    for (std::size_t idx : unlabeled) {
        auto probs = learn::predict_proba(model, dataset.row(idx));
        switch (kind) {
            case StrategyKind::MinMargin: {
                std::partial_sort(probs.begin(), probs.begin() + 2, probs.end(),
                                  std::greater<>());
                scores.push_back(probs[0] - probs[1]);
                break;
            }
            case StrategyKind::MaxEntropy: {
                double h = 0.0;
                for (double p : probs)
                    if (p > 0.0) h -= p * std::log(p);
                scores.push_back(h);
                break;
            }
            case StrategyKind::LeastConfidence: {
                scores.push_back(1.0 - *std::max_element(probs.begin(), probs.end()));
                break;
            }
            default:
                throw std::invalid_argument(
                    "uncertainty_scores: not an uncertainty kind");
        }
    }
    return scores;
}

IndexSet k_center_greedy(const Dataset& dataset, const IndexSet& centers,
                         const IndexSet& candidates, std::size_t k) {
    if (candidates.empty())
        throw std::invalid_argument("k_center_greedy: candidates are empty");
    k = std::min(k, candidates.size());

    std::vector<double> nearest(candidates.size(),
                                std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < candidates.size(); ++i)
        for (std::size_t c : centers)
            nearest[i] = std::min(nearest[i], sq_dist(dataset.row(candidates[i]),
                                                      dataset.row(c)));

    std::vector<bool> taken(candidates.size(), false);
    IndexSet picks;
    picks.reserve(k);
    for (std::size_t round = 0; round < k; ++round) {
        std::size_t best = candidates.size();
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (taken[i]) continue;
            if (best == candidates.size() || nearest[i] > nearest[best] ||
                (nearest[i] == nearest[best] && candidates[i] < candidates[best]))
                best = i;
        }
        taken[best] = true;
        picks.push_back(candidates[best]);
        for (std::size_t i = 0; i < candidates.size(); ++i)
            if (!taken[i])
                nearest[i] = std::min(nearest[i], sq_dist(dataset.row(candidates[i]),
                                                          dataset.row(candidates[best])));
    }
    return picks;
}

IndexSet badge_select(const learn::SoftmaxModel& model, const Dataset& dataset,
                      const IndexSet& unlabeled, std::size_t batch,
                      std::uint64_t seed) {
    batch = std::min(batch, unlabeled.size());
    std::vector<std::vector<double>> embeddings;
    embeddings.reserve(unlabeled.size());
    double total_norm = 0.0;
    std::vector<double> weight(unlabeled.size());
    for (std::size_t i = 0; i < unlabeled.size(); ++i) {
        embeddings.push_back(
            learn::gradient_embedding(model, dataset.row(unlabeled[i])));
        double n2 = 0.0;
        for (double v : embeddings.back()) n2 += v * v;
        weight[i] = n2;
        total_norm += n2;
    }
    if (total_norm <= 1e-24) return random_select(unlabeled, batch, seed);

    auto rng = make_engine(seed, 3);
    std::vector<bool> taken(unlabeled.size(), false);
    IndexSet picks;
    picks.reserve(batch);

    auto emb_dist2 = [&](std::size_t a, std::size_t b) {
        double s = 0.0;
        for (std::size_t j = 0; j < embeddings[a].size(); ++j) {
            const double u = embeddings[a][j] - embeddings[b][j];
            s += u * u;
        }
        return s;
    };

    // First center ~ norm^2, later centers ~ distance^2 to the chosen set.
    std::vector<double> d2 = weight;
    for (std::size_t round = 0; round < batch; ++round) {
        double total = 0.0;
        for (std::size_t i = 0; i < unlabeled.size(); ++i)
            if (!taken[i]) total += d2[i];
        std::size_t chosen;
        if (total <= 0.0) {
            // Everything left duplicates a chosen embedding: uniform draw.
            std::vector<std::size_t> rest;
            for (std::size_t i = 0; i < unlabeled.size(); ++i)
                if (!taken[i]) rest.push_back(i);
            std::uniform_int_distribution<std::size_t> pick(0, rest.size() - 1);
            chosen = rest[pick(rng)];
        } else {
            std::uniform_real_distribution<double> unif(0.0, total);
            double target = unif(rng);
            chosen = unlabeled.size();
            for (std::size_t i = 0; i < unlabeled.size(); ++i) {
                if (taken[i]) continue;
                target -= d2[i];
                if (target <= 0.0) {
                    chosen = i;
                    break;
                }
            }
            if (chosen == unlabeled.size()) {  // numeric tail
                for (std::size_t i = unlabeled.size(); i-- > 0;)
                    if (!taken[i]) {
                        chosen = i;
                        break;
                    }
            }
        }
        taken[chosen] = true;
        picks.push_back(unlabeled[chosen]);
        for (std::size_t i = 0; i < unlabeled.size(); ++i)
            if (!taken[i]) d2[i] = std::min(d2[i], emb_dist2(i, chosen));
    }
    std::sort(picks.begin(), picks.end());
    return picks;
}

std::vector<double> typicality(const Dataset& dataset, const IndexSet& unlabeled,
                               std::size_t knn_k) {
    if (unlabeled.size() < 2)
        throw std::invalid_argument("typicality: need at least 2 unlabeled points");
    const std::size_t k = std::min(knn_k, unlabeled.size() - 1);
    std::vector<double> scores(unlabeled.size());
    std::vector<double> dist(unlabeled.size());
    for (std::size_t i = 0; i < unlabeled.size(); ++i) {
        for (std::size_t j = 0; j < unlabeled.size(); ++j)
            dist[j] = (j == i) ? std::numeric_limits<double>::infinity()
                               : std::sqrt(sq_dist(dataset.row(unlabeled[i]),
                                                   dataset.row(unlabeled[j])));
        std::nth_element(dist.begin(), dist.begin() + (k - 1), dist.end());
        double mean = 0.0;
        for (std::size_t j = 0; j < k; ++j) mean += dist[j];
        mean /= static_cast<double>(k);
        scores[i] = (mean < 1e-12) ? kDuplicateTypicalityCap : 1.0 / mean;
    }
    return scores;
}

namespace {

// Lloyd's algorithm with k-means++ seeding, fixed iteration budget, and
// deterministic tie-breaks. Returns the per-point cluster assignment.
std::vector<std::size_t> kmeans_assign(const Dataset& dataset,
                                       const IndexSet& points, std::size_t k,
                                       std::uint64_t seed, std::size_t iters = 50) {
    const std::size_t n = points.size();
    const std::size_t d = dataset.dim();
    k = std::clamp<std::size_t>(k, 1, n);
    auto rng = make_engine(seed, 4);

    std::vector<double> centers;
    centers.reserve(k * d);
    {
        std::uniform_int_distribution<std::size_t> first(0, n - 1);
        const auto row = dataset.row(points[first(rng)]);
        centers.insert(centers.end(), row.begin(), row.end());
        std::vector<double> d2(n);
        for (std::size_t c = 1; c < k; ++c) {
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double best = std::numeric_limits<double>::infinity();
                for (std::size_t cc = 0; cc < c; ++cc)
                    best = std::min(best,
                                    sq_dist(dataset.row(points[i]),
                                            {centers.data() + cc * d, d}));
                d2[i] = best;
                total += best;
            }
            std::size_t chosen = 0;
            if (total <= 0.0) {
                std::uniform_int_distribution<std::size_t> any(0, n - 1);
                chosen = any(rng);
            } else {
                std::uniform_real_distribution<double> unif(0.0, total);
                double target = unif(rng);
                for (std::size_t i = 0; i < n; ++i) {
                    target -= d2[i];
                    if (target <= 0.0) {
                        chosen = i;
                        break;
                    }
                }
            }
            const auto row2 = dataset.row(points[chosen]);
            centers.insert(centers.end(), row2.begin(), row2.end());
        }
    }

    std::vector<std::size_t> assign(n, 0);
    std::vector<double> sums(k * d);
    std::vector<std::size_t> counts(k);
    for (std::size_t it = 0; it < iters; ++it) {
        bool moved = false;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < k; ++c) {
                const double dd =
                    sq_dist(dataset.row(points[i]), {centers.data() + c * d, d});
                if (dd < best_d) {
                    best_d = dd;
                    best = c;
                }
            }
            if (assign[i] != best) {
                assign[i] = best;
                moved = true;
            }
        }
        if (!moved && it > 0) break;
        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            counts[assign[i]]++;
            const auto row = dataset.row(points[i]);
            for (std::size_t j = 0; j < d; ++j) sums[assign[i] * d + j] += row[j];
        }
        for (std::size_t c = 0; c < k; ++c)
            if (counts[c] > 0)
                for (std::size_t j = 0; j < d; ++j)
                    centers[c * d + j] =
                        sums[c * d + j] / static_cast<double>(counts[c]);
    }
    return assign;
}

}  // namespace

IndexSet typicality_cluster_select(const Dataset& dataset, const PoolState& pool,
                                   std::size_t batch, std::size_t knn_k,
                                   std::uint64_t seed, bool inverse) {
    const IndexSet& unlabeled = pool.unlabeled;
    if (unlabeled.size() < batch)
        throw std::invalid_argument("typicality_cluster_select: batch exceeds |U|");
    if (batch == 0) return {};

    IndexSet all = pool.labeled;
    all.insert(all.end(), unlabeled.begin(), unlabeled.end());
    std::sort(all.begin(), all.end());

    const std::size_t k = pool.labeled.size() + batch;
    const auto assign = kmeans_assign(dataset, all, k, seed);
    const std::size_t clusters = *std::max_element(assign.begin(), assign.end()) + 1;

    std::vector<double> typ;
    if (unlabeled.size() >= 2)
        typ = typicality(dataset, unlabeled, knn_k);
    else
        typ.assign(unlabeled.size(), 1.0);
    std::vector<double> typ_of(dataset.size(), 0.0);
    for (std::size_t i = 0; i < unlabeled.size(); ++i) typ_of[unlabeled[i]] = typ[i];

    std::vector<bool> is_labeled(dataset.size(), false);
    for (std::size_t i : pool.labeled) is_labeled[i] = true;

    struct ClusterInfo {
        std::size_t size = 0;
        bool covered = false;
        IndexSet members;  // unlabeled members only
    };
    std::vector<ClusterInfo> info(clusters);
    for (std::size_t i = 0; i < all.size(); ++i) {
        auto& ci = info[assign[i]];
        ci.size++;
        if (is_labeled[all[i]])
            ci.covered = true;
        else
            ci.members.push_back(all[i]);
    }

    auto best_member = [&](const ClusterInfo& ci) {
        std::size_t best = ci.members.front();
        for (std::size_t idx : ci.members) {
            const bool better = inverse ? typ_of[idx] < typ_of[best]
                                        : typ_of[idx] > typ_of[best];
            if (better || (typ_of[idx] == typ_of[best] && idx < best)) best = idx;
        }
        return best;
    };

    // Largest clusters first; uncovered before covered; stable by id.
    std::vector<std::size_t> order;
    for (std::size_t c = 0; c < clusters; ++c)
        if (!info[c].members.empty()) order.push_back(c);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (info[a].covered != info[b].covered) return !info[a].covered;
        if (info[a].size != info[b].size) return info[a].size > info[b].size;
        return a < b;
    });

    IndexSet picks;
    for (std::size_t c : order) {
        if (picks.size() == batch) break;
        picks.push_back(best_member(info[c]));
    }
    if (picks.size() < batch) {
        // One pick per cluster was not enough; fill by typicality.
        std::vector<bool> chosen(dataset.size(), false);
        for (std::size_t i : picks) chosen[i] = true;
        IndexSet rest;
        for (std::size_t idx : unlabeled)
            if (!chosen[idx]) rest.push_back(idx);
        std::stable_sort(rest.begin(), rest.end(), [&](std::size_t a, std::size_t b) {
            const double ta = inverse ? -typ_of[a] : typ_of[a];
            const double tb = inverse ? -typ_of[b] : typ_of[b];
            if (ta != tb) return ta > tb;
            return a < b;
        });
        for (std::size_t idx : rest) {
            if (picks.size() == batch) break;
            picks.push_back(idx);
        }
    }
    std::sort(picks.begin(), picks.end());
    return picks;
}

namespace {

IndexSet probcover_ordered(const Dataset& dataset, const PoolState& pool,
                           std::size_t batch, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("probcover_select: delta > 0");
    const IndexSet& unlabeled = pool.unlabeled;
    if (unlabeled.empty())
        throw std::invalid_argument("probcover_select: no unlabeled points");
    batch = std::min(batch, unlabeled.size());

    IndexSet universe = pool.labeled;
    universe.insert(universe.end(), unlabeled.begin(), unlabeled.end());
    const double delta2 = delta * delta;

    std::vector<bool> covered(universe.size(), false);
    for (std::size_t u = 0; u < universe.size(); ++u)
        for (std::size_t l : pool.labeled)
            if (sq_dist(dataset.row(universe[u]), dataset.row(l)) <= delta2) {
                covered[u] = true;
                break;
            }

    std::vector<bool> taken(unlabeled.size(), false);
    IndexSet picks;
    picks.reserve(batch);
    while (picks.size() < batch) {
        std::size_t best = unlabeled.size();
        std::size_t best_degree = 0;
        for (std::size_t i = 0; i < unlabeled.size(); ++i) {
            if (taken[i]) continue;
            std::size_t degree = 0;
            for (std::size_t u = 0; u < universe.size(); ++u)
                if (!covered[u] && sq_dist(dataset.row(unlabeled[i]),
                                           dataset.row(universe[u])) <= delta2)
                    ++degree;
            if (degree > best_degree ||
                (degree == best_degree && degree > 0 &&
                 (best == unlabeled.size() || unlabeled[i] < unlabeled[best]))) {
                best_degree = degree;
                best = i;
            }
        }
        if (best == unlabeled.size()) break;  // everything covered
        taken[best] = true;
        picks.push_back(unlabeled[best]);
        for (std::size_t u = 0; u < universe.size(); ++u)
            if (!covered[u] && sq_dist(dataset.row(unlabeled[best]),
                                       dataset.row(universe[u])) <= delta2)
                covered[u] = true;
    }

    if (picks.size() < batch) {
        // Fully covered: fill with the most typical remaining candidates.
        IndexSet rest;
        for (std::size_t i = 0; i < unlabeled.size(); ++i)
            if (!taken[i]) rest.push_back(unlabeled[i]);
        std::vector<double> typ(rest.size(), 1.0);
        if (unlabeled.size() >= 2) {
            const auto all_typ = typicality(dataset, unlabeled, 20);
            std::vector<double> typ_of(dataset.size(), 0.0);
            for (std::size_t i = 0; i < unlabeled.size(); ++i)
                typ_of[unlabeled[i]] = all_typ[i];
            for (std::size_t i = 0; i < rest.size(); ++i) typ[i] = typ_of[rest[i]];
        }
        std::vector<std::size_t> order(rest.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) {
                             if (typ[a] != typ[b]) return typ[a] > typ[b];
                             return rest[a] < rest[b];
                         });
        for (std::size_t k = 0; k < order.size() && picks.size() < batch; ++k)
            picks.push_back(rest[order[k]]);
    }
    return picks;
}

}  // namespace

IndexSet probcover_select(const Dataset& dataset, const PoolState& pool,
                          std::size_t batch, double delta) {
    auto picks = probcover_ordered(dataset, pool, batch, delta);
    std::sort(picks.begin(), picks.end());
    return picks;
}

IndexSet probcover_rank_order(const Dataset& dataset, const PoolState& pool,
                              double delta) {
    return probcover_ordered(dataset, pool, pool.unlabeled.size(), delta);
}

double default_probcover_delta(const Dataset& dataset, const IndexSet& unlabeled) {
    if (unlabeled.size() < 2)
        throw std::invalid_argument("default_probcover_delta: need >= 2 points");
    std::vector<double> dists;
    dists.reserve(unlabeled.size() * (unlabeled.size() - 1) / 2);
    for (std::size_t i = 0; i < unlabeled.size(); ++i)
        for (std::size_t j = i + 1; j < unlabeled.size(); ++j)
            dists.push_back(std::sqrt(
                sq_dist(dataset.row(unlabeled[i]), dataset.row(unlabeled[j]))));
    std::sort(dists.begin(), dists.end());
    const auto at = static_cast<std::size_t>(0.05 * static_cast<double>(dists.size() - 1));
    return std::max(dists[at], 1e-12);
}

IndexSet select(StrategyKind kind, const QueryContext& ctx, std::size_t batch) {
    if (batch < 1) throw std::invalid_argument("select: batch must be >= 1");
    const IndexSet& unlabeled = ctx.pool.unlabeled;
    if (unlabeled.empty()) throw std::invalid_argument("select: unlabeled pool is empty");
    if (requires_model(kind) && ctx.model == nullptr)
        throw std::invalid_argument("select: strategy '" + kind_name(kind) +
                                    "' needs a trained model");
    const std::size_t take = std::min(batch, unlabeled.size());

    switch (kind) {
        case StrategyKind::Random:
            return random_select(unlabeled, take, ctx.params.seed);
        case StrategyKind::MinMargin:
        case StrategyKind::MaxEntropy:
        case StrategyKind::LeastConfidence: {
            const auto scores =
                uncertainty_scores(kind, *ctx.model, ctx.dataset, unlabeled);
            const bool ascending = (kind == StrategyKind::MinMargin);
            return pick_extreme(unlabeled, scores, take, ascending);
        }
        case StrategyKind::CoreSet: {
            auto picks =
                k_center_greedy(ctx.dataset, ctx.pool.labeled, unlabeled, take);
            std::sort(picks.begin(), picks.end());
            return picks;
        }
        case StrategyKind::Badge:
            return badge_select(*ctx.model, ctx.dataset, unlabeled, take,
                                ctx.params.seed);
        case StrategyKind::Typicality:
        case StrategyKind::InverseTypicality:
            return typicality_cluster_select(ctx.dataset, ctx.pool, take,
                                             ctx.params.knn_k, ctx.params.seed,
                                             kind == StrategyKind::InverseTypicality);
        case StrategyKind::ProbCover: {
            const double delta =
                ctx.params.delta
                    ? *ctx.params.delta
                    : (unlabeled.size() >= 2
                           ? default_probcover_delta(ctx.dataset, unlabeled)
                           : 1.0);
            return probcover_select(ctx.dataset, ctx.pool, take, delta);
        }
    }
    throw std::logic_error("select: unhandled strategy kind");
}

}  // namespace budgetal::strategies
