#include "heatmv/field.hpp"

#include <utility>

namespace heatmv {

ScalarField::ScalarField(std::string id, std::size_t n, Equation equation, FieldKind kind, DomainBox domain,
                         Evaluator evaluator)
    : id_(std::move(id)),
      n_(n),
      equation_(equation),
      kind_(kind),
      domain_(std::move(domain)),
      eval_(std::make_shared<const Evaluator>(std::move(evaluator))) {
    if (n_ == 0 || n_ > kMaxDim) throw PreconditionError("ScalarField: unsupported dimension");
    if (domain_.dim() != n_ || domain_.empty()) throw PreconditionError("ScalarField: bad domain box");
    if (!*eval_) throw PreconditionError("ScalarField: empty evaluator");
}

double ScalarField::operator()(const SpaceTimePoint& p) const {
    if (!domain_.contains(p))
        throw DomainError("field '" + id_ + "' evaluated outside its domain");
    return (*eval_)(p);
}

ScalarField ScalarField::relabeled(std::string id, Equation equation) const {
    ScalarField f = *this;
    f.id_ = std::move(id);
    f.equation_ = equation;
    return f;
}

ScalarField ScalarField::restricted(const DomainBox& box) const {
    if (!domain_.contains(box)) throw DomainError("restricted: box not inside field domain");
    ScalarField f = *this;
    f.domain_ = box;
    return f;
}

ScalarField make_field(std::string id, std::size_t n, Equation equation, ScalarField::Evaluator f) {
    return ScalarField(std::move(id), n, equation, FieldKind::closed_form, default_field_box(n), std::move(f));
}

ScalarField make_field(std::string id, std::size_t n, Equation equation, DomainBox box,
                       ScalarField::Evaluator f) {
    return ScalarField(std::move(id), n, equation, FieldKind::closed_form, std::move(box), std::move(f));
}

}  // namespace heatmv
