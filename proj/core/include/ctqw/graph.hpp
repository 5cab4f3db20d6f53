#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace ctqw {

enum class GraphFamily { Cycle, Path, Complete, Star, Torus };

/// Largest Hamiltonian dimension build_hamiltonian will materialize.
inline constexpr std::size_t kMaxDenseDimension = 4096;

/**
 * Declarative description of one of the supported walk graphs.
 *
 * Vertex 0 is always the walk origin. Torus vertices are indexed row-major
 * over their coordinate vector, so coordinate (c0, ..., c_{d-1}) maps to
 * sum_i c_i * L^{d-1-i}.
 */
class GraphSpec {
public:
    static GraphSpec cycle(int n);
    static GraphSpec path(int n);
    static GraphSpec complete(int n);
    /// Center vertex 0 plus n-1 leaves.
    static GraphSpec star(int n);
    static GraphSpec torus(int d, int l);

    GraphFamily family() const noexcept { return family_; }
    int n() const noexcept { return n_; }
    int d() const noexcept { return d_; }
    int l() const noexcept { return l_; }

    std::size_t vertex_count() const noexcept;
    std::string name() const;

    std::vector<std::size_t> coordinates(std::size_t vertex) const;
    std::size_t index_of(const std::vector<std::size_t>& coords) const;

    friend bool operator==(const GraphSpec&, const GraphSpec&) = default;

private:
    GraphSpec(GraphFamily family, int n, int d, int l);

    GraphFamily family_;
    int n_ = 0;
    int d_ = 0;
    int l_ = 0;
};

/// Sorted neighbor list of `vertex`; throws std::out_of_range for a bad index.
std::vector<std::size_t> neighbors(const GraphSpec& spec, std::size_t vertex);

/// Dense real symmetric walk Hamiltonian, stored row-major.
class Hamiltonian {
public:
    Hamiltonian(std::size_t dimension, std::vector<double> entries, double gamma);

    std::size_t dimension() const noexcept { return dim_; }
    double gamma() const noexcept { return gamma_; }
    double operator()(std::size_t row, std::size_t col) const { return entries_[row * dim_ + col]; }
    const std::vector<double>& entries() const noexcept { return entries_; }

    /// Largest absolute row sum (infinity norm).
    double norm_inf() const;

private:
    std::size_t dim_;
    std::vector<double> entries_;
    double gamma_;
};

/// H[a][a] = deg(a) * gamma, H[a][b] = -gamma for neighbors, 0 otherwise.
Hamiltonian build_hamiltonian(const GraphSpec& spec, double gamma = 1.0);

nlohmann::json to_json(const GraphSpec& spec);
GraphSpec graph_spec_from_json(const nlohmann::json& j);

} // namespace ctqw
