#include <doctest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "cohesion/injector.hpp"
#include "support/git_fixture.hpp"

using namespace cohesion;

namespace {

ExtractedFunction only(const std::string& src) {
    auto fns = extract_functions(src, "t.cpp");
    REQUIRE(fns.size() == 1);
    return fns[0];
}

std::vector<ExtractedFunction> fixture_functions() {
    std::ifstream in(std::string(COHESION_TEST_DATA) + "/fixture_functions.cpp");
    std::stringstream ss;
    ss << in.rdbuf();
    return extract_functions(ss.str(), "fixture_functions.cpp");
}

const MaliciousSnippet kTwoLines{"two", {"int leak = 1;", "send(leak);"}, "test"};

}  // namespace

TEST_CASE("insertion line follows the placement rule") {
    CHECK(insertion_line(4, InjectionPosition::Mid) == 2);
    CHECK(insertion_line(5, InjectionPosition::Mid) == 3);
    CHECK(insertion_line(1, InjectionPosition::Mid) == 1);
    CHECK(insertion_line(7, InjectionPosition::Beginning) == 0);
    CHECK(insertion_line(7, InjectionPosition::End) == 7);
    for (auto p : {InjectionPosition::Beginning, InjectionPosition::Mid, InjectionPosition::End})
        CHECK(insertion_line(0, p) == 0);
}

TEST_CASE("injection at the three positions") {
    const auto f = only("int sum(int a, int b) {\n    int s = a;\n    s += b;\n    s *= 1;\n    return s;\n}");
    const auto begin = inject(f, kTwoLines, InjectionPosition::Beginning);
    CHECK(begin.full_text ==
          "int sum(int a, int b) {\n    int leak = 1;\n    send(leak);\n    int s = a;\n    s += b;\n    s *= 1;\n"
          "    return s;\n}");
    const auto mid = inject(f, kTwoLines, InjectionPosition::Mid);
    CHECK(mid.full_text ==
          "int sum(int a, int b) {\n    int s = a;\n    s += b;\n    int leak = 1;\n    send(leak);\n    s *= 1;\n"
          "    return s;\n}");
    CHECK(mid.record.insert_line_index == 2);
    const auto end = inject(f, kTwoLines, InjectionPosition::End);
    CHECK(end.full_text ==
          "int sum(int a, int b) {\n    int s = a;\n    s += b;\n    s *= 1;\n    return s;\n    int leak = 1;\n"
          "    send(leak);\n}");
    CHECK(end.record.position == InjectionPosition::End);
    for (const auto* r : {&begin, &mid, &end}) CHECK(remove_injection(r->full_text, r->record) == f.full_text);
}

TEST_CASE("an empty body becomes the snippet") {
    for (const std::string src : {"void noop() {}", "void noop() {\n}", "  void noop()\n  {\n  }"}) {
        const auto f = only(src);
        for (auto p : {InjectionPosition::Beginning, InjectionPosition::Mid, InjectionPosition::End}) {
            const auto r = inject(f, kTwoLines, p);
            const auto g = only(r.full_text);
            REQUIRE(g.body_lines.size() == 2);
            CHECK(normalize_whitespace(g.body_lines[0]) == "int leak = 1;");
            CHECK(normalize_whitespace(g.body_lines[1]) == "send(leak);");
            CHECK(remove_injection(r.full_text, r.record) == f.full_text);
        }
    }
}

TEST_CASE("single-line bodies") {
    const auto f = only("int add(int a,int b){return a+b;}");
    CHECK(inject(f, kTwoLines, InjectionPosition::Beginning).full_text ==
          "int add(int a,int b){int leak = 1;\nsend(leak);\nreturn a+b;}");
    CHECK(inject(f, kTwoLines, InjectionPosition::Mid).full_text ==
          "int add(int a,int b){return a+b;\nint leak = 1;\nsend(leak);}");
}

TEST_CASE("snippet indentation follows the preceding line") {
    const auto f = only("void f() {\n\tif (x) {\n\t\ty();\n\t}\n\tz();\n}");
    const MaliciousSnippet indented{"i", {"    if (a) {", "        b();", "    }"}, ""};
    const auto r = inject(f, indented, InjectionPosition::End);
    CHECK(r.full_text == "void f() {\n\tif (x) {\n\t\ty();\n\t}\n\tz();\n\tif (a) {\n\t    b();\n\t}\n}");
}

TEST_CASE("unsafe insertion points are refused") {
    SUBCASE("between } and else") {
        const auto f = only("void f(bool x) {\n    if (x) {\n        a();\n    }\n    else {\n        b();\n    }\n}");
        CHECK_THROWS_AS(inject(f, kTwoLines, InjectionPosition::Mid), InjectionError);
        CHECK_NOTHROW(inject(f, kTwoLines, InjectionPosition::End));
    }
    SUBCASE("inside a multi-line for header") {
        const auto f = only("void f(int n) {\n    for (int i = 0;\n         i < n;\n         ++i) {\n    }\n}");
        CHECK_THROWS_AS(inject(f, kTwoLines, InjectionPosition::Mid), InjectionError);
    }
    SUBCASE("inside a raw string") {
        const auto f = only("const char* f() {\n    return R\"(\nline\nmore\n)\";\n}");
        CHECK_THROWS_AS(inject(f, kTwoLines, InjectionPosition::Mid), InjectionError);
    }
    SUBCASE("inside a block comment") {
        const auto f = only("int f() {\n    /* a\n       b\n       c */\n    return 0;\n}");
        CHECK_THROWS_AS(inject(f, kTwoLines, InjectionPosition::Mid), InjectionError);
    }
    SUBCASE("inside a brace initializer") {
        const auto f = only("int f() {\n    int v[] = {\n        1,\n        2,\n    };\n    return v[0];\n}");
        CHECK_THROWS_AS(inject(f, kTwoLines, InjectionPosition::Mid), InjectionError);
    }
    SUBCASE("after a ternary colon") {
        const auto f = only("int f(bool c) {\n    return c ? 1 :\n        2;\n}");
        CHECK_THROWS_AS(inject(f, kTwoLines, InjectionPosition::Mid), InjectionError);
    }
    SUBCASE("after a case label") {
        const auto f = only("int f(int c) {\n    switch (c) {\n    case 1:\n        return 2;\n    }\n    return 0;\n}");
        CHECK_NOTHROW(inject(f, kTwoLines, InjectionPosition::Mid));
    }
}

TEST_CASE("shipped corpus loads nine snippets") {
    const auto corpus = load_snippets(COHESION_SNIPPETS);
    CHECK(corpus.snippets.size() == 9);
    CHECK(corpus.rejected.empty());
    std::size_t lines = 0;
    for (const auto& s : corpus.snippets) {
        CHECK_FALSE(validate_snippet(s));
        CHECK_FALSE(s.description.empty());
        lines += s.code_lines.size();
    }
    const double mean = static_cast<double>(lines) / 9.0;
    CHECK(mean > 5.5);
    CHECK(mean < 7.5);
    CHECK(load_snippets(std::filesystem::path(COHESION_SNIPPETS) / "manifest.json").snippets.size() == 9);
}

TEST_CASE("snippet loading isolates bad files") {
    cohesion::testing::TempDir dir;
    CHECK_THROWS_AS(load_snippets(dir.path()), SnippetError);
    CHECK_THROWS_AS(load_snippets(dir.path() / "missing"), SnippetError);

    std::ofstream(dir.path() / "good.cpp") << "int x = 1;\nuse(x);\n";
    std::ofstream(dir.path() / "bad_string.cpp") << "const char* s = \"oops;\n";
    std::ofstream(dir.path() / "unbalanced.cpp") << "if (x) {\n  y();\n";
    std::ofstream(dir.path() / "notes.txt") << "ignored\n";
    const auto corpus = load_snippets(dir.path());
    REQUIRE(corpus.snippets.size() == 1);
    CHECK(corpus.snippets[0].id == "good");
    CHECK(corpus.snippets[0].code_lines == std::vector<std::string>{"int x = 1;", "use(x);"});
    CHECK(corpus.rejected.size() == 2);

    std::ofstream(dir.path() / "manifest.json") << R"([{"id":"g","file":"good.cpp","description":"d"},
        {"id":"g","file":"good.cpp"},{"id":"m","file":"missing.cpp"}])";
    const auto via_manifest = load_snippets(dir.path());
    CHECK(via_manifest.snippets.size() == 1);
    CHECK(via_manifest.rejected.size() == 2);
}

TEST_CASE("fixture corpus: validity, line-count law and recovery") {
    const auto fns = fixture_functions();
    REQUIRE(fns.size() == 50);
    const auto corpus = load_snippets(COHESION_SNIPPETS).snippets;
    for (const auto& f : fns) {
        CHECK(is_syntactically_valid(f.full_text));
        for (const auto& s : corpus) {
            for (auto p : {InjectionPosition::Beginning, InjectionPosition::Mid, InjectionPosition::End}) {
                CAPTURE(f.name);
                CAPTURE(s.id);
                const auto r = inject(f, s, p);
                CHECK(is_syntactically_valid(r.full_text));
                const auto g = only(r.full_text);
                CHECK(g.body_line_count() == f.body_line_count() + s.code_lines.size());
                CHECK(r.record.insert_line_index == insertion_line(f.body_line_count(), p));
                CHECK(remove_injection(r.full_text, r.record) == f.full_text);
            }
        }
    }
}

TEST_CASE("random injection is seeded and uniform") {
    const auto f = only("int add(int a, int b) {\n    return a + b;\n}");
    const auto corpus = load_snippets(COHESION_SNIPPETS).snippets;
    std::mt19937_64 a(7), b(7);
    for (int i = 0; i < 20; ++i) {
        const auto x = inject_random(f, corpus, a);
        const auto y = inject_random(f, corpus, b);
        CHECK(x.full_text == y.full_text);
        CHECK(x.record.snippet_id == y.record.snippet_id);
        CHECK(x.record.position == y.record.position);
    }

    std::mt19937_64 rng(2024);
    std::map<InjectionPosition, int> positions;
    std::map<std::string, int> snippets;
    const int draws = 90000;
    for (int i = 0; i < draws; ++i) {
        const auto r = inject_random(f, corpus, rng);
        ++positions[r.record.position];
        ++snippets[r.record.snippet_id];
    }
    const double pos_sigma = std::sqrt(draws * (1.0 / 3) * (2.0 / 3));
    for (const auto& [p, n] : positions) CHECK(std::abs(n - draws / 3.0) < 3 * pos_sigma);
    const double snip_sigma = std::sqrt(draws * (1.0 / 9) * (8.0 / 9));
    REQUIRE(snippets.size() == 9);
    for (const auto& [id, n] : snippets) CHECK(std::abs(n - draws / 9.0) < 3 * snip_sigma);
    CHECK_THROWS_AS(inject_random(f, std::span<const MaliciousSnippet>{}, rng), InjectionError);
}
