#include "ctqw/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

#include "ctqw/errors.hpp"

namespace ctqw {

namespace {

std::size_t checked_power(int base, int exponent)
{
    std::size_t result = 1;
    for (int i = 0; i < exponent; ++i) {
        if (result > std::numeric_limits<std::size_t>::max() / static_cast<std::size_t>(base)) {
            throw ValidationError(fmt::format("torus size {}^{} overflows", base, exponent));
        }
        result *= static_cast<std::size_t>(base);
    }
    return result;
}

const char* family_key(GraphFamily family)
{
    switch (family) {
    case GraphFamily::Cycle: return "cycle";
    case GraphFamily::Path: return "path";
    case GraphFamily::Complete: return "complete";
    case GraphFamily::Star: return "star";
    case GraphFamily::Torus: return "torus";
    }
    return "?";
}

} // namespace

GraphSpec::GraphSpec(GraphFamily family, int n, int d, int l)
    : family_(family)
    , n_(n)
    , d_(d)
    , l_(l)
{
}

GraphSpec GraphSpec::cycle(int n)
{
    if (n < 2) throw ValidationError(fmt::format("cycle needs n >= 2, got {}", n));
    return {GraphFamily::Cycle, n, 0, 0};
}

GraphSpec GraphSpec::path(int n)
{
    if (n < 2) throw ValidationError(fmt::format("path needs n >= 2, got {}", n));
    return {GraphFamily::Path, n, 0, 0};
}

GraphSpec GraphSpec::complete(int n)
{
    if (n < 2) throw ValidationError(fmt::format("complete graph needs n >= 2, got {}", n));
    return {GraphFamily::Complete, n, 0, 0};
}

GraphSpec GraphSpec::star(int n)
{
    if (n < 2) throw ValidationError(fmt::format("star needs n >= 2 (center plus leaves), got {}", n));
    return {GraphFamily::Star, n, 0, 0};
}

GraphSpec GraphSpec::torus(int d, int l)
{
    if (d < 1) throw ValidationError(fmt::format("torus needs d >= 1, got {}", d));
    if (l < 3) throw ValidationError(fmt::format("torus needs l >= 3, got {}", l));
    checked_power(l, d);
    return {GraphFamily::Torus, 0, d, l};
}

std::size_t GraphSpec::vertex_count() const noexcept
{
    if (family_ == GraphFamily::Torus) {
        std::size_t count = 1;
        for (int i = 0; i < d_; ++i) count *= static_cast<std::size_t>(l_);
        return count;
    }
    return static_cast<std::size_t>(n_);
}

std::string GraphSpec::name() const
{
    if (family_ == GraphFamily::Torus) return fmt::format("torus(d={}, l={})", d_, l_);
    return fmt::format("{}({})", family_key(family_), n_);
}

std::vector<std::size_t> GraphSpec::coordinates(std::size_t vertex) const
{
    if (vertex >= vertex_count()) throw std::out_of_range(fmt::format("vertex {} out of range for {}", vertex, name()));
    if (family_ != GraphFamily::Torus) return {vertex};
    std::vector<std::size_t> coords(static_cast<std::size_t>(d_));
    const auto l = static_cast<std::size_t>(l_);
    for (int i = d_ - 1; i >= 0; --i) {
        coords[static_cast<std::size_t>(i)] = vertex % l;
        vertex /= l;
    }
    return coords;
}

std::size_t GraphSpec::index_of(const std::vector<std::size_t>& coords) const
{
    if (family_ != GraphFamily::Torus) {
        if (coords.size() != 1 || coords[0] >= vertex_count()) throw std::out_of_range("bad vertex coordinates");
        return coords[0];
    }
    if (coords.size() != static_cast<std::size_t>(d_)) throw std::out_of_range("coordinate rank mismatch");
    std::size_t index = 0;
    for (auto c : coords) {
        if (c >= static_cast<std::size_t>(l_)) throw std::out_of_range("coordinate out of range");
        index = index * static_cast<std::size_t>(l_) + c;
    }
    return index;
}

std::vector<std::size_t> neighbors(const GraphSpec& spec, std::size_t vertex)
{
    const std::size_t count = spec.vertex_count();
    if (vertex >= count) throw std::out_of_range(fmt::format("vertex {} out of range for {}", vertex, spec.name()));

    std::vector<std::size_t> result;
    switch (spec.family()) {
    case GraphFamily::Cycle:
        result = {(vertex + 1) % count, (vertex + count - 1) % count};
        break;
    case GraphFamily::Path:
        if (vertex > 0) result.push_back(vertex - 1);
        if (vertex + 1 < count) result.push_back(vertex + 1);
        break;
    case GraphFamily::Complete:
        for (std::size_t b = 0; b < count; ++b)
            if (b != vertex) result.push_back(b);
        break;
    case GraphFamily::Star:
        if (vertex == 0) {
            for (std::size_t b = 1; b < count; ++b) result.push_back(b);
        } else {
            result.push_back(0);
        }
        break;
    case GraphFamily::Torus: {
        auto coords = spec.coordinates(vertex);
        const auto l = static_cast<std::size_t>(spec.l());
        for (std::size_t axis = 0; axis < coords.size(); ++axis) {
            const std::size_t c = coords[axis];
            coords[axis] = (c + 1) % l;
            result.push_back(spec.index_of(coords));
            coords[axis] = (c + l - 1) % l;
            result.push_back(spec.index_of(coords));
            coords[axis] = c;
        }
        break;
    }
    }
    std::sort(result.begin(), result.end());
    result.erase(std::unique(result.begin(), result.end()), result.end());
    return result;
}

Hamiltonian::Hamiltonian(std::size_t dimension, std::vector<double> entries, double gamma)
    : dim_(dimension)
    , entries_(std::move(entries))
    , gamma_(gamma)
{
    if (dim_ == 0) throw ValidationError("Hamiltonian dimension must be positive");
    if (entries_.size() != dim_ * dim_) throw ValidationError("Hamiltonian entry count does not match dimension");
    if (!(gamma_ > 0.0)) throw ValidationError("gamma must be positive");
    for (std::size_t a = 0; a < dim_; ++a)
        for (std::size_t b = a + 1; b < dim_; ++b)
            if (entries_[a * dim_ + b] != entries_[b * dim_ + a]) throw ValidationError("Hamiltonian is not symmetric");
}

double Hamiltonian::norm_inf() const
{
    double best = 0.0;
    for (std::size_t a = 0; a < dim_; ++a) {
        double row = 0.0;
        for (std::size_t b = 0; b < dim_; ++b) row += std::abs(entries_[a * dim_ + b]);
        best = std::max(best, row);
    }
    return best;
}

Hamiltonian build_hamiltonian(const GraphSpec& spec, double gamma)
{
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ValidationError(fmt::format("gamma must be positive, got {}", gamma));
    const std::size_t dim = spec.vertex_count();
    if (dim > kMaxDenseDimension) {
        throw ResourceError(fmt::format("{} has dimension {}, above the dense cap {}", spec.name(), dim, kMaxDenseDimension));
    }
    std::vector<double> entries(dim * dim, 0.0);
    for (std::size_t a = 0; a < dim; ++a) {
        const auto adjacent = neighbors(spec, a);
        entries[a * dim + a] = static_cast<double>(adjacent.size()) * gamma;
        for (auto b : adjacent) entries[a * dim + b] = -gamma;
    }
    return Hamiltonian(dim, std::move(entries), gamma);
}

nlohmann::json to_json(const GraphSpec& spec)
{
    nlohmann::json j;
    j["family"] = family_key(spec.family());
    if (spec.family() == GraphFamily::Torus) {
        j["d"] = spec.d();
        j["l"] = spec.l();
    } else {
        j["n"] = spec.n();
    }
    return j;
}

GraphSpec graph_spec_from_json(const nlohmann::json& j)
{
    if (!j.is_object() || !j.contains("family")) throw ValidationError("graph spec must be an object with a family");
    const auto family = j.at("family").get<std::string>();
    auto field = [&](const char* key) {
        if (!j.contains(key)) throw ValidationError(fmt::format("graph spec '{}' is missing '{}'", family, key));
        return j.at(key).get<int>();
    };
    if (family == "cycle") return GraphSpec::cycle(field("n"));
    if (family == "path") return GraphSpec::path(field("n"));
    if (family == "complete") return GraphSpec::complete(field("n"));
    if (family == "star") return GraphSpec::star(field("n"));
    if (family == "torus") return GraphSpec::torus(field("d"), field("l"));
    throw ValidationError(fmt::format("unknown graph family '{}'", family));
}

} // namespace ctqw
