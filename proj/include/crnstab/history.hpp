#pragma once

#include <memory>
#include <string>
#include <vector>

#include "crnstab/network.hpp"

namespace crnstab {

/// Tiny analytic expression in one variable `s`: constants, sin, cos and
/// affine/product combinations. Used for non-constant initial data so that
/// histories like (sin(s)+1, cos(s)+1) are evaluated exactly, not tabulated.
class Expression {
public:
    struct Node;

    static Expression parse(std::string_view text);
    double eval(double s) const;
    const std::string& text() const { return text_; }

private:
    std::shared_ptr<const Node> root_;
    std::string text_;
};

/// Initial data on [-tau_max, 0]: either a constant vector or one analytic
/// expression per species.
class HistoryFunction {
public:
    HistoryFunction() = default;
    static HistoryFunction constant(Vec values);
    static HistoryFunction expressions(const std::vector<std::string>& exprs);

    bool is_constant() const { return constant_; }
    std::size_t size() const { return constant_ ? values_.size() : exprs_.size(); }
    const Vec& constant_value() const;

    Vec eval(double s) const;

    /// Initial data must be non-negative on [-tau_max, 0] and strictly
    /// positive at s = 0 (checked on a sample grid for expression histories).
    void validate_positive(double tau_max) const;

    std::string describe() const;

private:
    bool constant_ = true;
    Vec values_;
    std::vector<Expression> exprs_;
};

}  // namespace crnstab
