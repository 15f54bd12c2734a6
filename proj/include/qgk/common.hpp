// Copyright 2026 The QGK Authors
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

#ifndef QGK_COMMON_HPP
#define QGK_COMMON_HPP

#include <stdexcept>
#include <string>

namespace qgk {

inline constexpr const char* kVersion = "0.1.0";

/// Malformed or inconsistent input data (files, schemas, value ranges).
struct data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Numerical failure (non-finite values, solver breakdown).
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace qgk

#endif  // QGK_COMMON_HPP
