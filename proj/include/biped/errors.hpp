// Copyright 2026 The biped-kit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BIPED_ERRORS_HPP
#define BIPED_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace biped {

/// Bad input: parameters, commands, contexts or files that violate a contract.
/// The CLI maps this to exit code 1.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical failure at run time (singularity, pivot breakdown, non-finite
/// values). The CLI maps this to exit code 2.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Guard violation on g + z'' at a specific sample.
class SingularityError : public NumericError {
public:
    SingularityError(std::size_t index, double denom)
        : NumericError("singularity guard violated at sample " + std::to_string(index) +
                       ": g + az = " + std::to_string(denom)),
          index_(index) {}
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// Wraps an error raised inside the walk pipeline with the failing stage.
class PipelineError : public NumericError {
public:
    PipelineError(std::string stage, const std::string &what)
        : NumericError(stage + ": " + what), stage_(std::move(stage)) {}
    const std::string &stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

} // namespace biped

#endif
