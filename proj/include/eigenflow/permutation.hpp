// Permutations of n slots, 0-based internally.
//
// Composition follows function composition: (a * b)(k) = a(b(k)).
// Acting on a tuple moves the entry at slot k to slot σ(k):
// (σ·x)_j = x_{σ⁻¹(j)}.

#pragma once

#include <string>
#include <vector>

namespace eigenflow {

class Permutation {
public:
    Permutation() = default;
    explicit Permutation(std::vector<int> images);  // images[k] = σ(k); validated

    static Permutation identity(int n);
    // From 1-based cycle lists, e.g. {{1, 3}} for (1 3) in S_n.
    static Permutation from_cycles(int n, const std::vector<std::vector<int>>& cycles);

    int size() const noexcept { return static_cast<int>(images_.size()); }
    int operator()(int k) const { return images_[static_cast<std::size_t>(k)]; }
    const std::vector<int>& images() const noexcept { return images_; }

    Permutation inverse() const;
    bool is_identity() const;

    // Cycles of length ≥ 2 (0-based), each starting at its smallest element.
    std::vector<std::vector<int>> cycles() const;
    // All cycles including fixed points.
    std::vector<std::vector<int>> all_cycles() const;

    // "(1 2)(3 4)" with 1-based slots, or "id".
    std::string cycle_string() const;
    // 1-based one-line form [σ(1), ..., σ(n)].
    std::vector<int> one_line() const;

    template <typename Tuple>
    Tuple act(const Tuple& x) const {
        Tuple out = x;
        for (int k = 0; k < size(); ++k) out[(*this)(k)] = x[k];
        return out;
    }

    friend Permutation operator*(const Permutation& a, const Permutation& b);
    friend bool operator==(const Permutation& a, const Permutation& b) { return a.images_ == b.images_; }

private:
    std::vector<int> images_;
};

}  // namespace eigenflow
