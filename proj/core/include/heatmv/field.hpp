#pragma once

#include <functional>
#include <memory>
#include <string>

#include "heatmv/types.hpp"

namespace heatmv {

enum class FieldKind { closed_form, grid };

/// An evaluatable space-time function u(x, t) on an axis-aligned box.
///
/// The equation tag is metadata only. Nothing in the library treats it as
/// evidence that the field solves that equation; `classify_point` decides.
/// Evaluators must be thread-safe and immutable after construction.
class ScalarField {
public:
    using Evaluator = std::function<double(const SpaceTimePoint&)>;

    ScalarField(std::string id, std::size_t n, Equation equation, FieldKind kind, DomainBox domain,
                Evaluator evaluator);

    /// Evaluates at p; throws DomainError when p is outside the domain box.
    double operator()(const SpaceTimePoint& p) const;
    /// Evaluates without the domain check (hot loops that already validated a region).
    double evaluate_unchecked(const SpaceTimePoint& p) const { return (*eval_)(p); }

    [[nodiscard]] const std::string& id() const noexcept { return id_; }
    [[nodiscard]] std::size_t dim() const noexcept { return n_; }
    [[nodiscard]] Equation equation() const noexcept { return equation_; }
    [[nodiscard]] FieldKind kind() const noexcept { return kind_; }
    [[nodiscard]] const DomainBox& domain() const noexcept { return domain_; }

    /// Same evaluator and domain, different id/tag.
    [[nodiscard]] ScalarField relabeled(std::string id, Equation equation) const;
    /// Same evaluator, domain shrunk to `box` (must lie inside the current domain).
    [[nodiscard]] ScalarField restricted(const DomainBox& box) const;

private:
    std::string id_;
    std::size_t n_;
    Equation equation_;
    FieldKind kind_;
    DomainBox domain_;
    std::shared_ptr<const Evaluator> eval_;
};

/// Closed-form field on the default box (|x_i| <= 8, |t| <= 4) unless a box is given.
[[nodiscard]] ScalarField make_field(std::string id, std::size_t n, Equation equation,
                                     ScalarField::Evaluator f);
[[nodiscard]] ScalarField make_field(std::string id, std::size_t n, Equation equation, DomainBox box,
                                     ScalarField::Evaluator f);

}  // namespace heatmv
