// Fixture corpus: fifty ordinary functions of varied size and style.
#include <algorithm>
#include <cstdint>
#include <cstring>
#include <map>
#include <string>
#include <vector>

namespace fixture {

int add(int a, int b) { return a + b; }

int subtract(int a, int b) {
    return a - b;
}

void noop() {}

void empty_block() {
}

bool is_even(int value) {
    return value % 2 == 0;
}

int factorial(int n) {
    if (n < 2) {
        return 1;
    }
    return n * factorial(n - 1);
}

int fibonacci(int n) {
    int a = 0;
    int b = 1;
    for (int i = 0; i < n; ++i) {
        int next = a + b;
        a = b;
        b = next;
    }
    return a;
}

std::string trim_left(const std::string& text) {
    std::size_t pos = 0;
    while (pos < text.size() && text[pos] == ' ') {
        ++pos;
    }
    return text.substr(pos);
}

std::string trim_right(const std::string& text) {
    std::size_t end = text.size();
    while (end > 0 && text[end - 1] == ' ') {
        --end;
    }
    return text.substr(0, end);
}

std::string to_upper(std::string text) {
    for (auto& c : text) {
        if (c >= 'a' && c <= 'z') {
            c = static_cast<char>(c - 'a' + 'A');
        }
    }
    return text;
}

int count_words(const std::string& text) {
    int words = 0;
    bool in_word = false;
    for (char c : text) {
        if (c == ' ' || c == '\t' || c == '\n') {
            in_word = false;
        } else if (!in_word) {
            in_word = true;
            ++words;
        }
    }
    return words;
}

double mean(const std::vector<double>& values) {
    if (values.empty()) {
        return 0.0;
    }
    double total = 0.0;
    for (double v : values) {
        total += v;
    }
    return total / static_cast<double>(values.size());
}

double variance(const std::vector<double>& values) {
    const double m = mean(values);
    double acc = 0.0;
    for (double v : values) {
        acc += (v - m) * (v - m);
    }
    return values.empty() ? 0.0 : acc / static_cast<double>(values.size());
}

int max_element_index(const std::vector<int>& values) {
    int best = -1;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (best < 0 || values[i] > values[static_cast<std::size_t>(best)]) {
            best = static_cast<int>(i);
        }
    }
    return best;
}

void swap_ints(int& a, int& b) {
    int tmp = a;
    a = b;
    b = tmp;
}

void reverse_in_place(std::vector<int>& values) {
    std::size_t i = 0;
    std::size_t j = values.empty() ? 0 : values.size() - 1;
    while (i < j) {
        swap_ints(values[i], values[j]);
        ++i;
        --j;
    }
}

bool starts_with(const std::string& text, const std::string& prefix) {
    if (prefix.size() > text.size()) {
        return false;
    }
    return text.compare(0, prefix.size(), prefix) == 0;
}

bool ends_with(const std::string& text, const std::string& suffix) {
    if (suffix.size() > text.size()) {
        return false;
    }
    return text.compare(text.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string current;
    for (char c : text) {
        if (c == sep) {
            parts.push_back(current);
            current.clear();
        } else {
            current += c;
        }
    }
    parts.push_back(current);
    return parts;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) {
            out += sep;
        }
        out += parts[i];
    }
    return out;
}

std::uint32_t crc_step(std::uint32_t crc, std::uint8_t byte) {
    crc ^= byte;
    for (int k = 0; k < 8; ++k) {
        const std::uint32_t mask = -(crc & 1u);
        crc = (crc >> 1) ^ (0xEDB88320u & mask);
    }
    return crc;
}

std::uint32_t crc32(const std::uint8_t* data, std::size_t size) {
    std::uint32_t crc = 0xFFFFFFFFu;
    for (std::size_t i = 0; i < size; ++i) {
        crc = crc_step(crc, data[i]);
    }
    return ~crc;
}

int binary_search(const std::vector<int>& sorted, int key) {
    int lo = 0;
    int hi = static_cast<int>(sorted.size()) - 1;
    while (lo <= hi) {
        const int mid = lo + (hi - lo) / 2;
        if (sorted[static_cast<std::size_t>(mid)] == key) {
            return mid;
        }
        if (sorted[static_cast<std::size_t>(mid)] < key) {
            lo = mid + 1;
        } else {
            hi = mid - 1;
        }
    }
    return -1;
}

void insertion_sort(std::vector<int>& values) {
    for (std::size_t i = 1; i < values.size(); ++i) {
        const int key = values[i];
        std::size_t j = i;
        while (j > 0 && values[j - 1] > key) {
            values[j] = values[j - 1];
            --j;
        }
        values[j] = key;
    }
}

int gcd(int a, int b) {
    while (b != 0) {
        const int t = a % b;
        a = b;
        b = t;
    }
    return a;
}

int lcm(int a, int b) {
    if (a == 0 || b == 0) {
        return 0;
    }
    return a / gcd(a, b) * b;
}

bool is_prime(int n) {
    if (n < 2) {
        return false;
    }
    for (int d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            return false;
        }
    }
    return true;
}

int digit_sum(int n) {
    int sum = 0;
    n = n < 0 ? -n : n;
    while (n > 0) {
        sum += n % 10;
        n /= 10;
    }
    return sum;
}

std::string repeat(const std::string& unit, int times) {
    std::string out;
    out.reserve(unit.size() * static_cast<std::size_t>(times > 0 ? times : 0));
    for (int i = 0; i < times; ++i) {
        out += unit;
    }
    return out;
}

std::map<char, int> letter_histogram(const std::string& text) {
    std::map<char, int> counts;
    for (char c : text) {
        if (c != ' ') {
            ++counts[c];
        }
    }
    return counts;
}

int clamp_int(int value, int lo, int hi) {
    // keep within range
    if (value < lo) {
        return lo;
    }
    if (value > hi) {
        return hi;
    }
    return value;
}

int parse_digit(char c) {
    switch (c) {
    case '0':
        return 0;
    case '1':
        return 1;
    default:
        return -1;
    }
}

int parse_uint(const std::string& text) {
    int value = 0;
    for (char c : text) {
        if (c < '0' || c > '9') {
            return -1;
        }
        value = value * 10 + (c - '0');
    }
    return value;
}

std::string escape_quotes(const std::string& text) {
    std::string out;
    for (char c : text) {
        if (c == '"') {
            out += "\\\"";
        } else {
            out += c;
        }
    }
    return out;
}

bool is_palindrome(const std::string& text) {
    std::size_t i = 0;
    std::size_t j = text.empty() ? 0 : text.size() - 1;
    while (i < j) {
        if (text[i] != text[j]) {
            return false;
        }
        ++i;
        --j;
    }
    return true;
}

int sum_of_squares(const std::vector<int>& values) {
    int total = 0;
    for (int v : values) {
        total += v * v;
    }
    return total;
}

std::vector<int> prefix_sums(const std::vector<int>& values) {
    std::vector<int> out(values.size() + 1, 0);
    for (std::size_t i = 0; i < values.size(); ++i) {
        out[i + 1] = out[i] + values[i];
    }
    return out;
}

std::vector<int> unique_sorted(std::vector<int> values) {
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    return values;
}

int popcount(std::uint32_t bits) {
    int count = 0;
    while (bits != 0) {
        bits &= bits - 1;
        ++count;
    }
    return count;
}

std::size_t copy_bounded(char* dst, const char* src, std::size_t capacity) {
    std::size_t n = 0;
    while (n + 1 < capacity && src[n] != '\0') {
        dst[n] = src[n];
        ++n;
    }
    if (capacity > 0) {
        dst[n] = '\0';
    }
    return n;
}

struct Counter {
    int hits = 0;
    int misses = 0;

    void record(bool hit) {
        if (hit) {
            ++hits;
        } else {
            ++misses;
        }
    }

    double hit_rate() const {
        const int total = hits + misses;
        return total == 0 ? 0.0 : static_cast<double>(hits) / total;
    }

    void reset() {
        hits = 0;
        misses = 0;
    }
};

class RingBuffer {
public:
    explicit RingBuffer(std::size_t capacity) : data_(capacity, 0) {}

    bool push(int value);
    bool pop(int& value);

    std::size_t size() const {
        return count_;
    }

private:
    std::vector<int> data_;
    std::size_t head_ = 0;
    std::size_t count_ = 0;
};

bool RingBuffer::push(int value) {
    if (count_ == data_.size()) {
        return false;
    }
    data_[(head_ + count_) % data_.size()] = value;
    ++count_;
    return true;
}

bool RingBuffer::pop(int& value) {
    if (count_ == 0) {
        return false;
    }
    value = data_[head_];
    head_ = (head_ + 1) % data_.size();
    --count_;
    return true;
}

template <typename T>
T max_of(const std::vector<T>& values, T fallback) {
    if (values.empty()) {
        return fallback;
    }
    T best = values.front();
    for (const T& v : values) {
        best = std::max(best, v);
    }
    return best;
}

std::string file_extension(const std::string& path) {
    const auto dot = path.find_last_of('.');
    const auto slash = path.find_last_of('/');
    if (dot == std::string::npos) {
        return "";
    }
    if (slash != std::string::npos && slash > dot) {
        return "";
    }
    return path.substr(dot + 1);
}

int levenshtein(const std::string& a, const std::string& b) {
    std::vector<int> prev(b.size() + 1);
    std::vector<int> cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) {
        prev[j] = static_cast<int>(j);
    }
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = static_cast<int>(i);
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const int cost = a[i - 1] == b[j - 1] ? 0 : 1;
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost});
        }
        prev.swap(cur);
    }
    return prev[b.size()];
}

}  // namespace fixture
