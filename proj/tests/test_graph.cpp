#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "ctqw/errors.hpp"
#include "ctqw/graph.hpp"

using namespace ctqw;

namespace {

std::vector<GraphSpec> sample_specs()
{
    return {GraphSpec::cycle(2),    GraphSpec::cycle(3),    GraphSpec::cycle(17),   GraphSpec::path(2),
            GraphSpec::path(9),     GraphSpec::complete(2), GraphSpec::complete(6), GraphSpec::star(2),
            GraphSpec::star(7),     GraphSpec::torus(1, 5), GraphSpec::torus(2, 3), GraphSpec::torus(3, 4)};
}

} // namespace

TEST(Hamiltonian, Cycle3)
{
    const auto h = build_hamiltonian(GraphSpec::cycle(3));
    ASSERT_EQ(h.dimension(), 3u);
    for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 3; ++b) EXPECT_EQ(h(a, b), a == b ? 2.0 : -1.0);
}

TEST(Hamiltonian, Cycle4AntiDiagonalIsZero)
{
    const auto h = build_hamiltonian(GraphSpec::cycle(4));
    for (std::size_t a = 0; a < 4; ++a) {
        EXPECT_EQ(h(a, a), 2.0);
        EXPECT_EQ(h(a, (a + 1) % 4), -1.0);
        EXPECT_EQ(h(a, (a + 3) % 4), -1.0);
        EXPECT_EQ(h(a, (a + 2) % 4), 0.0);
    }
}

TEST(Hamiltonian, Star4)
{
    const auto h = build_hamiltonian(GraphSpec::star(4));
    EXPECT_EQ(h(0, 0), 3.0);
    for (std::size_t i = 1; i < 4; ++i) {
        EXPECT_EQ(h(i, i), 1.0);
        EXPECT_EQ(h(0, i), -1.0);
        EXPECT_EQ(h(i, 0), -1.0);
    }
    EXPECT_EQ(h(1, 2), 0.0);
}

TEST(Hamiltonian, LaplacianStructureForEveryFamily)
{
    for (const auto& spec : sample_specs()) {
        SCOPED_TRACE(spec.name());
        const auto h = build_hamiltonian(spec, 0.7);
        ASSERT_EQ(h.dimension(), spec.vertex_count());
        for (std::size_t a = 0; a < h.dimension(); ++a) {
            double row = 0.0;
            const auto nb = neighbors(spec, a);
            for (std::size_t b = 0; b < h.dimension(); ++b) {
                EXPECT_EQ(h(a, b), h(b, a));
                row += h(a, b);
                if (a == b) continue;
                const bool adjacent = std::binary_search(nb.begin(), nb.end(), b);
                EXPECT_EQ(h(a, b), adjacent ? -0.7 : 0.0);
            }
            EXPECT_NEAR(row, 0.0, 1e-12);
            EXPECT_DOUBLE_EQ(h(a, a), 0.7 * static_cast<double>(nb.size()));
        }
    }
}

TEST(Hamiltonian, GammaScalesExactly)
{
    for (const auto& spec : sample_specs()) {
        const auto unit = build_hamiltonian(spec, 1.0);
        const auto scaled = build_hamiltonian(spec, 2.5);
        for (std::size_t i = 0; i < unit.entries().size(); ++i) EXPECT_EQ(scaled.entries()[i], 2.5 * unit.entries()[i]);
    }
}

TEST(Hamiltonian, RejectsBadInput)
{
    EXPECT_THROW(build_hamiltonian(GraphSpec::cycle(4), 0.0), ValidationError);
    EXPECT_THROW(build_hamiltonian(GraphSpec::cycle(4), -1.0), ValidationError);
    EXPECT_THROW(build_hamiltonian(GraphSpec::cycle(4), std::nan("")), ValidationError);
    EXPECT_THROW(build_hamiltonian(GraphSpec::torus(2, 65)), ResourceError);
    EXPECT_NO_THROW(build_hamiltonian(GraphSpec::torus(2, 64)));
}

TEST(GraphSpec, RejectsInvalidParameters)
{
    EXPECT_THROW(GraphSpec::cycle(1), ValidationError);
    EXPECT_THROW(GraphSpec::path(1), ValidationError);
    EXPECT_THROW(GraphSpec::complete(1), ValidationError);
    EXPECT_THROW(GraphSpec::star(1), ValidationError);
    EXPECT_THROW(GraphSpec::torus(0, 5), ValidationError);
    EXPECT_THROW(GraphSpec::torus(2, 2), ValidationError);
}

TEST(Neighbors, Examples)
{
    EXPECT_EQ(neighbors(GraphSpec::cycle(5), 0), (std::vector<std::size_t>{1, 4}));
    EXPECT_EQ(neighbors(GraphSpec::complete(4), 2), (std::vector<std::size_t>{0, 1, 3}));

    const auto torus = GraphSpec::torus(2, 3);
    std::vector<std::size_t> expected{torus.index_of({0, 1}), torus.index_of({0, 2}), torus.index_of({1, 0}),
                                      torus.index_of({2, 0})};
    std::sort(expected.begin(), expected.end());
    EXPECT_EQ(neighbors(torus, 0), expected);
}

TEST(Neighbors, SymmetricWithoutSelfLoops)
{
    for (const auto& spec : sample_specs()) {
        SCOPED_TRACE(spec.name());
        for (std::size_t a = 0; a < spec.vertex_count(); ++a) {
            for (auto b : neighbors(spec, a)) {
                EXPECT_NE(a, b);
                const auto back = neighbors(spec, b);
                EXPECT_TRUE(std::binary_search(back.begin(), back.end(), a));
            }
        }
    }
}

TEST(Neighbors, OutOfRange)
{
    EXPECT_THROW(neighbors(GraphSpec::cycle(5), 5), std::out_of_range);
}

TEST(Torus, DimensionAndDegree)
{
    for (int d = 1; d <= 3; ++d) {
        for (int l = 3; l <= 5; ++l) {
            const auto spec = GraphSpec::torus(d, l);
            ASSERT_EQ(spec.vertex_count(), static_cast<std::size_t>(std::pow(l, d)));
            for (std::size_t v = 0; v < spec.vertex_count(); ++v) EXPECT_EQ(neighbors(spec, v).size(), 2u * d);
        }
    }
}

TEST(Torus, RowMajorIndexing)
{
    const auto spec = GraphSpec::torus(3, 4);
    EXPECT_EQ(spec.index_of({0, 0, 0}), 0u);
    EXPECT_EQ(spec.index_of({0, 0, 1}), 1u);
    EXPECT_EQ(spec.index_of({1, 2, 3}), 16u + 8u + 3u);
    for (std::size_t v = 0; v < spec.vertex_count(); ++v) EXPECT_EQ(spec.index_of(spec.coordinates(v)), v);
}

TEST(GraphSpec, JsonRoundTrip)
{
    for (const auto& spec : sample_specs()) EXPECT_EQ(graph_spec_from_json(to_json(spec)), spec);
    EXPECT_EQ(to_json(GraphSpec::cycle(5)), (nlohmann::json{{"family", "cycle"}, {"n", 5}}));
    EXPECT_EQ(to_json(GraphSpec::torus(2, 7)), (nlohmann::json{{"family", "torus"}, {"d", 2}, {"l", 7}}));
    EXPECT_THROW(graph_spec_from_json({{"family", "hypercube"}, {"n", 3}}), ValidationError);
}
