#include "budgetal/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace budgetal {

Dataset::Dataset(std::size_t n, std::size_t d, std::size_t num_classes,
                 std::vector<double> features, std::vector<int> labels,
                 std::vector<int> regime_tags)
    : n_(n), d_(d), num_classes_(num_classes), features_(std::move(features)),
      labels_(std::move(labels)), regime_tags_(std::move(regime_tags)) {
    if (n_ == 0 || d_ == 0 || num_classes_ == 0)
        throw std::invalid_argument("Dataset: empty dimensions");
    if (features_.size() != n_ * d_)
        throw std::invalid_argument("Dataset: feature buffer size mismatch");
    if (labels_.size() != n_)
        throw std::invalid_argument("Dataset: label count mismatch");
    if (!regime_tags_.empty() && regime_tags_.size() != n_)
        throw std::invalid_argument("Dataset: regime tag count mismatch");

    std::vector<bool> seen(num_classes_, false);
    for (std::size_t i = 0; i < n_; ++i) {
        const int y = labels_[i];
        if (y < 0 || static_cast<std::size_t>(y) >= num_classes_)
            throw std::invalid_argument("Dataset: label " + std::to_string(y) +
                                        " outside [0, " +
                                        std::to_string(num_classes_) + ")");
        seen[static_cast<std::size_t>(y)] = true;
    }
    for (std::size_t c = 0; c < num_classes_; ++c)
        if (!seen[c])
            throw std::invalid_argument("Dataset: class " + std::to_string(c) +
                                        " has no examples");
    for (double v : features_)
        if (!std::isfinite(v))
            throw std::invalid_argument("Dataset: non-finite feature value");
}

int Dataset::label(std::size_t i) const {
    if (i >= n_) throw std::out_of_range("Dataset::label: index out of range");
    if (label_guard_ && *label_guard_) (*label_guard_)(i);
    return labels_[i];
}

Dataset Dataset::with_label_guard(std::function<void(std::size_t)> guard) const {
    Dataset copy = *this;
    copy.label_guard_ =
        std::make_shared<const std::function<void(std::size_t)>>(std::move(guard));
    return copy;
}

PoolState PoolState::make(const Dataset& dataset, IndexSet labeled,
                          IndexSet unlabeled) {
    std::sort(labeled.begin(), labeled.end());
    std::sort(unlabeled.begin(), unlabeled.end());
    auto check = [&](const IndexSet& s, const char* name) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] >= dataset.size())
                throw std::invalid_argument(std::string("PoolState: ") + name +
                                            " index out of range");
            if (i > 0 && s[i] == s[i - 1])
                throw std::invalid_argument(std::string("PoolState: duplicate in ") +
                                            name);
        }
    };
    check(labeled, "labeled");
    check(unlabeled, "unlabeled");
    IndexSet overlap;
    std::set_intersection(labeled.begin(), labeled.end(), unlabeled.begin(),
                          unlabeled.end(), std::back_inserter(overlap));
    if (!overlap.empty())
        throw std::invalid_argument("PoolState: labeled and unlabeled sets overlap");
    return PoolState{std::move(labeled), std::move(unlabeled)};
}

}  // namespace budgetal
