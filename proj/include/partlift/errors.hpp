/* Copyright 2026 The Partlift Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef PARTLIFT_ERRORS_HPP_
#define PARTLIFT_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace partlift {

// Bad input or a violated precondition. The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A segmenter or detector failed to answer. `retryable` distinguishes
// transient conditions (transport failure, HTTP 503) from rejected requests.
// The CLI maps this to exit code 3.
class BackendError : public std::runtime_error {
 public:
  BackendError(const std::string& what, bool retryable)
      : std::runtime_error(what), retryable_(retryable) {}
  bool retryable() const { return retryable_; }

 private:
  bool retryable_;
};

}  // namespace partlift

#endif  // PARTLIFT_ERRORS_HPP_
