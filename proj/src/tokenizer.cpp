#include "veritab/tokenizer.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>

#include "veritab/errors.hpp"

namespace veritab {

namespace {

enum class CharClass { kSpace, kLetter, kDigit, kPunct };

CharClass classify(unsigned char c) {
    if (c >= 0x80) return CharClass::kLetter;  // UTF-8 continuation/lead bytes
    if (std::isspace(c)) return CharClass::kSpace;
    if (std::isdigit(c)) return CharClass::kDigit;
    if (std::isalpha(c)) return CharClass::kLetter;
    return CharClass::kPunct;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    CharClass cur_class = CharClass::kSpace;
    const auto flush = [&]() {
        if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    };
    for (char raw : text) {
        const auto c = static_cast<unsigned char>(raw);
        const CharClass cls = classify(c);
        switch (cls) {
            case CharClass::kSpace:
                flush();
                break;
            case CharClass::kPunct:
                flush();
                out.push_back(std::string(1, raw));
                break;
            case CharClass::kLetter:
            case CharClass::kDigit:
                if (!cur.empty() && cls != cur_class) flush();
                cur.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : raw);
                break;
        }
        cur_class = cls;
    }
    flush();
    return out;
}

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
    for (size_t i = 0; i < tokens_.size(); ++i) {
        if (!index_.emplace(tokens_[i], kReservedIds + static_cast<int>(i)).second)
            throw ConfigError("Vocabulary: duplicate token '" + tokens_[i] + "'");
    }
}

Vocabulary Vocabulary::build(const std::vector<std::string>& corpus_texts, int max_size) {
    if (max_size <= kReservedIds)
        throw ConfigError("Vocabulary::build: max_size must exceed the reserved block");
    std::map<std::string, int64_t> counts;
    for (const std::string& text : corpus_texts)
        for (const std::string& tok : tokenize(text)) ++counts[tok];

    std::vector<std::pair<std::string, int64_t>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    const size_t cap = static_cast<size_t>(max_size - kReservedIds);
    std::vector<std::string> tokens;
    tokens.reserve(std::min(cap, ranked.size()));
    for (const auto& [tok, n] : ranked) {
        if (tokens.size() >= cap) break;
        tokens.push_back(tok);
    }
    return Vocabulary(std::move(tokens));
}

Vocabulary Vocabulary::load(const std::string& path) {
    if (!std::filesystem::exists(path)) throw FileNotFound("Vocabulary::load: " + path);
    std::ifstream in(path);
    if (!in) throw FileNotFound("Vocabulary::load: cannot open " + path);
    std::vector<std::string> tokens;
    std::string line;
    while (std::getline(in, line)) tokens.push_back(line);
    return Vocabulary(std::move(tokens));
}

void Vocabulary::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw FileNotFound("Vocabulary::save: cannot open " + path);
    for (const std::string& tok : tokens_) out << tok << '\n';
}

int Vocabulary::id(const std::string& token) const {
    auto it = index_.find(token);
    return it == index_.end() ? kUnk : it->second;
}

std::vector<int> Vocabulary::encode(std::string_view text) const {
    std::vector<int> ids;
    for (const std::string& tok : tokenize(text)) ids.push_back(id(tok));
    return ids;
}

}  // namespace veritab
