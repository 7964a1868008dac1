#pragma once

#include <stdexcept>
#include <string>

namespace ltml {

struct ShapeMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DegenerateClass : std::domain_error {
    using std::domain_error::domain_error;
};

struct EmptyClass : std::domain_error {
    using std::domain_error::domain_error;
};

struct SelectionOnPositive : std::logic_error {
    using std::logic_error::logic_error;
};

struct InfeasiblePrevalence : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NonFiniteLoss : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UndefinedMetric : std::domain_error {
    using std::domain_error::domain_error;
};

}  // namespace ltml
