#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace budgetal {

using IndexSet = std::vector<std::size_t>;  // kept sorted unless stated otherwise

/// Immutable feature matrix (row major) plus class labels in [0, C).
/// Copies are cheap to reason about and safe to share across threads.
class Dataset {
  public:
    Dataset(std::size_t n, std::size_t d, std::size_t num_classes,
            std::vector<double> features, std::vector<int> labels,
            std::vector<int> regime_tags = {});

    std::size_t size() const { return n_; }
    std::size_t dim() const { return d_; }
    std::size_t num_classes() const { return num_classes_; }

    std::span<const double> row(std::size_t i) const {
        return {features_.data() + i * d_, d_};
    }
    const std::vector<double>& features() const { return features_; }

    int label(std::size_t i) const;
    const std::vector<int>& labels_unchecked() const { return labels_; }

    // Diagnostic metadata from the two-regime generator (0 = easy, 1 = hard).
    const std::vector<int>& regime_tags() const { return regime_tags_; }

    /// Copy of this dataset whose label() calls go through `guard` first.
    /// Tests use this to prove procedures never read labels they should not
    /// see; the guard throws on a forbidden index.
    Dataset with_label_guard(std::function<void(std::size_t)> guard) const;

  private:
    std::size_t n_, d_, num_classes_;
    std::vector<double> features_;
    std::vector<int> labels_;
    std::vector<int> regime_tags_;
    std::shared_ptr<const std::function<void(std::size_t)>> label_guard_;
};

/// Disjoint labeled/unlabeled index sets over a dataset.
struct PoolState {
    IndexSet labeled;
    IndexSet unlabeled;

    static PoolState make(const Dataset& dataset, IndexSet labeled,
                          IndexSet unlabeled);
};

}  // namespace budgetal
