// Copyright 2026 The stepopt Authors
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

#ifndef STEPOPT_MAILBOX_H_
#define STEPOPT_MAILBOX_H_

#include <cstdint>
#include <memory>
#include <mutex>

namespace stepopt {

// Single-slot mailbox with atomic-replace semantics. A writer publishes a
// complete value; readers get an immutable snapshot that stays valid however
// many times the slot is replaced afterwards. The lock only guards the
// pointer swap, never user code.
template <typename T>
class SnapshotMailbox {
 public:
  void publish(T value) {
    auto next = std::make_shared<const T>(std::move(value));
    std::lock_guard<std::mutex> lock(mutex_);
    slot_ = std::move(next);
    ++version_;
  }

  std::shared_ptr<const T> read() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return slot_;
  }

  // Number of publishes so far.
  std::uint64_t version() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return version_;
  }

 private:
  mutable std::mutex mutex_;
  std::shared_ptr<const T> slot_;
  std::uint64_t version_ = 0;
};

}  // namespace stepopt

#endif  // STEPOPT_MAILBOX_H_
