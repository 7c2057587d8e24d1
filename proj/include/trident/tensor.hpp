#pragma once

#include <cstddef>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace trident {

namespace detail {

// Allocator that leaves scalars default-initialized, so hot-path tensors
// that are fully overwritten skip the zero fill.
template <typename T, typename A = std::allocator<T>>
class default_init_alloc : public A {
    using traits = std::allocator_traits<A>;

public:
    template <typename U>
    struct rebind {
        using other = default_init_alloc<U, typename traits::template rebind_alloc<U>>;
    };
    using A::A;

    template <typename U>
    void construct(U* p) noexcept(std::is_nothrow_default_constructible_v<U>) {
        ::new (static_cast<void*>(p)) U;
    }
    template <typename U, typename... Args>
    void construct(U* p, Args&&... args) {
        traits::construct(static_cast<A&>(*this), p, std::forward<Args>(args)...);
    }
};

}  // namespace detail

// Dense row-major float tensor with a small dynamic shape.
// Model activations use the layout (batch, channels, time, height, width);
// 2D feature maps are carried with time == 1.
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
        data_.resize(count(shape_));
        fill(0.0f);
    }

    Tensor(std::vector<int> shape, float value) : shape_(std::move(shape)) {
        data_.resize(count(shape_));
        fill(value);
    }

    // Contents are unspecified; every element must be written before use.
    static Tensor uninitialized(std::vector<int> shape) {
        Tensor t;
        t.shape_ = std::move(shape);
        t.data_.resize(count(t.shape_));
        return t;
    }

    static std::size_t count(const std::vector<int>& shape) {
        std::size_t n = 1;
        for (int d : shape) {
            if (d < 0) throw std::invalid_argument("negative tensor dimension");
            n *= static_cast<std::size_t>(d);
        }
        return n;
    }

    const std::vector<int>& shape() const { return shape_; }
    int dim(std::size_t i) const { return shape_.at(i); }
    int ndim() const { return static_cast<int>(shape_.size()); }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    float* data() { return data_.data(); }
    const float* data() const { return data_.data(); }

    float& operator[](std::size_t i) { return data_[i]; }
    float operator[](std::size_t i) const { return data_[i]; }

    void fill(float v) { std::fill(data_.begin(), data_.end(), v); }

    // Lossless view with a new shape; element count must match.
    Tensor reshaped(std::vector<int> shape) const {
        if (count(shape) != size())
            throw std::invalid_argument("reshape changes element count");
        Tensor t;
        t.shape_ = std::move(shape);
        t.data_ = data_;
        return t;
    }

    bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

    static std::string shape_str(const std::vector<int>& s) {
        std::string r = "(";
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (i) r += ",";
            r += std::to_string(s[i]);
        }
        return r + ")";
    }

private:
    std::vector<int> shape_;
    std::vector<float, detail::default_init_alloc<float>> data_;
};

}  // namespace trident
