#include "eigenflow/permutation.hpp"

#include <stdexcept>

namespace eigenflow {

Permutation::Permutation(std::vector<int> images) : images_(std::move(images)) {
    std::vector<bool> seen(images_.size(), false);
    for (int v : images_) {
        if (v < 0 || v >= size() || seen[static_cast<std::size_t>(v)]) {
            throw std::invalid_argument("Permutation: images do not form a bijection");
        }
        seen[static_cast<std::size_t>(v)] = true;
    }
}

Permutation Permutation::identity(int n) {
    std::vector<int> img(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) img[static_cast<std::size_t>(k)] = k;
    return Permutation(std::move(img));
}

Permutation Permutation::from_cycles(int n, const std::vector<std::vector<int>>& cycles) {
    std::vector<int> img = identity(n).images_;
    for (const auto& c : cycles) {
        for (std::size_t k = 0; k < c.size(); ++k) {
            img[static_cast<std::size_t>(c[k] - 1)] = c[(k + 1) % c.size()] - 1;
        }
    }
    return Permutation(std::move(img));
}

Permutation Permutation::inverse() const {
    std::vector<int> inv(images_.size());
    for (int k = 0; k < size(); ++k) inv[static_cast<std::size_t>((*this)(k))] = k;
    return Permutation(std::move(inv));
}

bool Permutation::is_identity() const {
    for (int k = 0; k < size(); ++k) {
        if ((*this)(k) != k) return false;
    }
    return true;
}

std::vector<std::vector<int>> Permutation::all_cycles() const {
    std::vector<std::vector<int>> out;
    std::vector<bool> seen(images_.size(), false);
    for (int start = 0; start < size(); ++start) {
        if (seen[static_cast<std::size_t>(start)]) continue;
        std::vector<int> cyc;
        for (int k = start; !seen[static_cast<std::size_t>(k)]; k = (*this)(k)) {
            seen[static_cast<std::size_t>(k)] = true;
            cyc.push_back(k);
        }
        out.push_back(std::move(cyc));
    }
    return out;
}

std::vector<std::vector<int>> Permutation::cycles() const {
    std::vector<std::vector<int>> out;
    for (auto& c : all_cycles()) {
        if (c.size() > 1) out.push_back(std::move(c));
    }
    return out;
}

std::string Permutation::cycle_string() const {
    const auto cyc = cycles();
    if (cyc.empty()) return "id";
    std::string s;
    for (const auto& c : cyc) {
        s += "(";
        for (std::size_t k = 0; k < c.size(); ++k) {
            if (k != 0) s += " ";
            s += std::to_string(c[k] + 1);
        }
        s += ")";
    }
    return s;
}

std::vector<int> Permutation::one_line() const {
    std::vector<int> out;
    out.reserve(images_.size());
    for (int v : images_) out.push_back(v + 1);
    return out;
}

Permutation operator*(const Permutation& a, const Permutation& b) {
    if (a.size() != b.size()) throw std::invalid_argument("Permutation: size mismatch in composition");
    std::vector<int> img(a.images_.size());
    for (int k = 0; k < a.size(); ++k) img[static_cast<std::size_t>(k)] = a(b(k));
    return Permutation(std::move(img));
}

}  // namespace eigenflow
