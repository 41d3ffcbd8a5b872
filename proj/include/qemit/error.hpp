// Copyright 2026 The qemit Authors
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

#include <stdexcept>
#include <string>

namespace qemit {

/// A channel whose Pauli transfer matrix has a (near) zero eigenvalue.
struct SingularChannel : std::domain_error {
    using std::domain_error::domain_error;
};

/// Two-point exponential extrapolation was given data of mixed sign or zeros.
struct NonExponentialData : std::domain_error {
    using std::domain_error::domain_error;
};

/// The hyperbolic recombination produced a negative radicand; the observable
/// does not follow a single-exponential decay closely enough.
struct NonHyperbolicDecay : std::domain_error {
    using std::domain_error::domain_error;
};

/// Every restart of the multi-exponential fit failed to produce a finite model.
struct FitDivergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace qemit
