// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace swrls {

/// Fixed-capacity FIFO; pushing into a full buffer drops the oldest value.
template <class T>
class RingBuffer {
 public:
  explicit RingBuffer(std::size_t capacity) : data_(capacity) {}

  std::size_t capacity() const noexcept { return data_.size(); }
  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  void push(const T& v) {
    data_[head_] = v;
    head_ = (head_ + 1) % data_.size();
    if (size_ < data_.size()) ++size_;
  }

  /// lag 0 is the most recent value.
  const T& newest(std::size_t lag) const noexcept {
    assert(lag < size_);
    return data_[(head_ + data_.size() - 1 - lag) % data_.size()];
  }

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t lag = size_; lag-- > 0;) f(newest(lag));
  }

 private:
  std::vector<T> data_;
  std::size_t head_ = 0;
  std::size_t size_ = 0;
};

}  // namespace swrls
