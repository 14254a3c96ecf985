#include <doctest.h>

#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "cohesion/backend.hpp"
#include "cohesion/scorer.hpp"
#include "support/backends.hpp"

using namespace cohesion;
using cohesion::testing::LambdaBackend;
using cohesion::testing::TableBackend;

namespace {

ExtractedFunction only(const std::string& src) {
    auto fns = extract_functions(src, "t.cpp");
    REQUIRE(fns.size() == 1);
    return fns[0];
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Independent restatement of the mock's closed form.
std::uint64_t ref_mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t ref_fnv(const std::string& s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) h = (h ^ c) * 1099511628211ULL;
    return h;
}

double ref_mock_p(const std::string& text, int index, int count, std::uint64_t seed) {
    auto s = ref_mix(ref_fnv(text) ^ ref_mix(seed));
    s = ref_mix(s ^ static_cast<std::uint64_t>(count));
    s = ref_mix(s ^ static_cast<std::uint64_t>(index));
    return 0.01 + 0.98 * ((static_cast<double>(s >> 11) + 0.5) / 9007199254740992.0);
}

FillMaskResult constant_result(int n, double p) {
    FillMaskResult r;
    r.probabilities.assign(static_cast<std::size_t>(n), p);
    r.tokens.assign(static_cast<std::size_t>(n), "x");
    return r;
}

}  // namespace

TEST_CASE("masking replaces only the declaration-site name") {
    const auto add = only("int add(int a,int b){return a+b;}");
    CHECK(mask_function_name(add, 1).text == "int <mask>(int a,int b){return a+b;}");
    CHECK(mask_function_name(add, 3).text == "int <mask><mask><mask>(int a,int b){return a+b;}");
    CHECK(mask_function_name(add, 3).mask_count == 3);
    CHECK(mask_function_name(add, 1, "[MASK]").text == "int [MASK](int a,int b){return a+b;}");

    const auto fact = only("int fact(int n){return n<2?1:n*fact(n-1);}");
    CHECK(mask_function_name(fact, 1).text == "int <mask>(int n){return n<2?1:n*fact(n-1);}");
    CHECK(mask_function_name(fact, 1, "<mask>", MaskScope::AllOccurrences).text ==
          "int <mask>(int n){return n<2?1:n*fn(n-1);}");

    const auto member = only("bool Widget::ready() const { return state_ == 3; }");
    CHECK(mask_function_name(member, 2).text == "bool Widget::<mask><mask>() const { return state_ == 3; }");

    CHECK_THROWS_AS(mask_function_name(add, 0), std::invalid_argument);
    CHECK_THROWS_AS(mask_function_name(add, 9), std::invalid_argument);
    auto corrupt = add;
    corrupt.name_offset = 0;
    CHECK_THROWS_AS(mask_function_name(corrupt, 1), MaskError);
    CHECK_THROWS_AS(mask_function_name(only("const char* tag(){ return \"<mask>\"; }"), 1), MaskError);
}

TEST_CASE("masking is reversible on the fixture corpus") {
    const auto fns = extract_functions(read_file(std::string(COHESION_TEST_DATA) + "/fixture_functions.cpp"),
                                       "fixture_functions.cpp");
    REQUIRE(fns.size() == 50);
    for (const auto& f : fns) {
        for (int n = 1; n <= kMaxMaskCount; ++n) {
            const auto m = mask_function_name(f, n);
            std::string restored = m.text;
            restored.replace(m.site_offset, static_cast<std::size_t>(n) * m.mask_token.size(),
                             f.full_text.substr(f.name_offset, f.name_length));
            CHECK(restored == f.full_text);
        }
    }
}

TEST_CASE("confidence is the harmonic mean") {
    const std::vector<double> half{0.5, 0.5}, one{1.0}, mixed{0.2, 0.8};
    CHECK(confidence(half) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(confidence(one) == 1.0);
    CHECK(confidence(mixed) == doctest::Approx(2.0 / (5.0 + 1.25)).epsilon(1e-15));
    CHECK(std::abs(confidence(mixed) - 0.32) < 1e-12);

    CHECK_THROWS_AS(confidence(std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(confidence(std::vector<double>{0.5, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(confidence(std::vector<double>{-0.1}), std::invalid_argument);
    CHECK_THROWS_AS(confidence(std::vector<double>{1.5}), std::invalid_argument);
    CHECK_THROWS_AS(confidence(std::vector<double>{std::nan("")}), std::invalid_argument);
    // tiny probabilities are floored rather than blowing up
    CHECK(confidence(std::vector<double>{1e-300}) == doctest::Approx(1e-9));
}

TEST_CASE("confidence properties on random vectors") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(1e-6, 1.0);
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<double> p(1 + rng() % 8);
        for (auto& x : p) x = unit(rng);
        const double h = confidence(p);
        const double mean = std::accumulate(p.begin(), p.end(), 0.0) / static_cast<double>(p.size());
        CHECK(h <= mean + 1e-15);
        auto lowered = p;
        const auto i = rng() % lowered.size();
        lowered[i] *= 0.5;
        CHECK(confidence(lowered) < h);
    }
}

TEST_CASE("npc and otc from the confidence table") {
    const auto s = make_score({0.1, 0.3, 0.25, 0.2, 0.1, 0.05, 0.05, 0.05});
    CHECK(s.npc == 0.3);
    CHECK(s.otc == 2);
    CHECK(s.confidence_at(s.otc) == s.npc);
    CHECK(make_score({1, 1, 1, 1, 1, 1, 1, 1}).otc == 1);
    CHECK(make_score({0.1, 0.2, 0.2, 0.1, 0.1, 0.1, 0.1, 0.2}).otc == 2);
}

TEST_CASE("score queries n = 1..8 and derives npc/otc") {
    const auto f = only("int add(int a,int b){return a+b;}");
    TableBackend table({0.1, 0.3, 0.25, 0.2, 0.1, 0.05, 0.05, 0.05});
    const auto s = score(f, table);
    CHECK(table.calls == 8);
    CHECK(s.npc == doctest::Approx(0.3));
    CHECK(s.otc == 2);

    LambdaBackend certain([](const MaskedCode& m) { return constant_result(m.mask_count, 1.0); });
    const auto c = score(f, certain);
    CHECK(c.npc == 1.0);
    CHECK(c.otc == 1);
}

TEST_CASE("any backend failure fails the whole score") {
    const auto f = only("int add(int a,int b){return a+b;}");
    LambdaBackend flaky([](const MaskedCode& m) {
        if (m.mask_count == 5) throw BackendError(BackendError::Kind::Status, "boom");
        return constant_result(m.mask_count, 0.5);
    });
    CHECK_THROWS_AS(score(f, flaky), BackendError);
    LambdaBackend short_answer([](const MaskedCode& m) { return constant_result(m.mask_count - 1 + (m.mask_count == 1), 0.5); });
    try {
        score(f, short_answer);
        FAIL("expected length mismatch");
    } catch (const BackendError& e) {
        CHECK(e.kind() == BackendError::Kind::LengthMismatch);
    }
}

TEST_CASE("mock backend is deterministic and matches its closed form") {
    const auto f = only("int add(int a, int b) {\n    return a + b;\n}");
    MockBackend mock(42);
    const auto m3 = mask_function_name(f, 3);
    const auto r1 = mock.fill_mask(m3);
    const auto r2 = mock.fill_mask(m3);
    CHECK(r1.probabilities == r2.probabilities);
    CHECK(r1.tokens == r2.tokens);
    CHECK(r1.probabilities.size() == 3);

    const auto s = score(f, mock);
    double best = 0;
    int best_n = 0;
    for (int n = 1; n <= 8; ++n) {
        const auto text = mask_function_name(f, n).text;
        double inv = 0;
        for (int i = 0; i < n; ++i) {
            const double p = ref_mock_p(text, i, n, 42);
            CHECK(p > 0.01);
            CHECK(p < 0.99);
            inv += 1.0 / p;
        }
        const double c = n / inv;
        CHECK(std::abs(s.confidence_at(n) - c) < 1e-12);
        if (c > best) {
            best = c;
            best_n = n;
        }
    }
    CHECK(std::abs(s.npc - best) < 1e-12);
    CHECK(s.otc == best_n);
    CHECK(score(f, mock) == s);
    MockBackend other(43);
    CHECK(score(f, other) != s);
}

TEST_CASE("mock backend separates one-character perturbations") {
    const std::string base =
        "int accumulate_values(const int* data, int n) {\n    int total = 0;\n    for (int i = 0; i < n; ++i) {\n"
        "        total += data[i];\n    }\n    return total;\n}";
    MockBackend mock(1);
    const auto reference = mock.fill_mask(mask_function_name(only(base), 1)).probabilities;
    std::mt19937_64 rng(99);
    const auto body_start = base.find('{') + 1;
    const auto body_end = base.rfind('}');
    int differing = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::string changed = base;
        std::size_t pos;
        char c;
        do {
            pos = body_start + rng() % (body_end - body_start);
            c = "abcdefghijklmnopqrstuvwxyz0123456789 "[rng() % 37];
        } while (changed[pos] == c || changed[pos] == '\n' || changed[pos] == '{' || changed[pos] == '}');
        changed[pos] = c;
        MaskedCode m = mask_function_name(only(base), 1);
        m.text.replace(m.text.size() - (base.size() - body_start), base.size() - body_start, changed.substr(body_start));
        if (mock.fill_mask(m).probabilities != reference) ++differing;
    }
    CHECK(differing == 1000);
}

TEST_CASE("body truncation keeps signature and leading lines") {
    const auto f = only("int f(int x) {\n    int a = x;\n    int b = a;\n    return b;\n}");
    const auto t = truncate_body(f, 1);
    CHECK(t.full_text == "int f(int x) {\n    int a = x;\n}");
    CHECK(t.body_line_count() == 1);
    CHECK(truncate_body(f, 10).full_text == f.full_text);
    CHECK(truncate_body(f, 0).full_text == "int f(int x) {\n}");

    // A context window that only fits the signature plus a little body.
    std::vector<std::size_t> seen_sizes;
    LambdaBackend small(
        [&](const MaskedCode& m) {
            seen_sizes.push_back(m.text.size());
            return constant_result(m.mask_count, 0.5);
        },
        20);
    score(f, small);
    for (auto sz : seen_sizes) CHECK(sz < f.full_text.size() + 48);
    CHECK(seen_sizes.front() < f.full_text.size());

    int overflow_budget = 2;
    LambdaBackend picky([&](const MaskedCode& m) {
        if (m.text.find("int b") != std::string::npos && overflow_budget-- > 0)
            throw BackendError(BackendError::Kind::ContextOverflow, "413");
        return constant_result(m.mask_count, 0.5);
    });
    CHECK(score(f, picky).npc == doctest::Approx(0.5));
}

TEST_CASE("gold-token mode sends name pieces") {
    CHECK(split_name_tokens("getValue", 2) == std::vector<std::string>{"get", "Value"});
    CHECK(split_name_tokens("read_all_lines", 3) == std::vector<std::string>{"read", "_all", "_lines"});
    CHECK(split_name_tokens("read_all_lines", 1) == std::vector<std::string>{"read_all_lines"});
    CHECK(split_name_tokens("HTTPServer", 2) == std::vector<std::string>{"HTTP", "Server"});
    CHECK(split_name_tokens("run", 2) == std::vector<std::string>{"r", "un"});
    CHECK(split_name_tokens("f", 3).size() == 3);

    const auto f = only("int getValue(){ return 1; }");
    std::vector<std::vector<std::string>> golds;
    LambdaBackend spy([&](const MaskedCode& m) {
        golds.push_back(m.gold_tokens);
        return constant_result(m.mask_count, 0.5);
    });
    ScoreOptions gold;
    gold.mode = ProbabilityMode::GoldTokens;
    score(f, spy, gold);
    REQUIRE(golds.size() == 8);
    for (std::size_t n = 0; n < 8; ++n) {
        CHECK(golds[n].size() == n + 1);
        CHECK(std::accumulate(golds[n].begin(), golds[n].end(), std::string()) == "getValue");
    }
}

TEST_CASE("score_all preserves order and isolates failures") {
    std::vector<ExtractedFunction> fns;
    for (int i = 0; i < 40; ++i) fns.push_back(only("int f" + std::to_string(i) + "() { return " + std::to_string(i) + "; }"));
    fns.push_back(fns[0]);
    fns.back().name_offset = 0;  // unmaskable
    MockBackend mock(5);
    const auto outcomes = score_all(fns, mock, {}, 8);
    REQUIRE(outcomes.size() == fns.size());
    for (std::size_t i = 0; i + 1 < fns.size(); ++i) {
        REQUIRE(outcomes[i].score);
        CHECK(*outcomes[i].score == score(fns[i], mock));
    }
    CHECK_FALSE(outcomes.back().score);
    CHECK_FALSE(outcomes.back().error.empty());
}
