#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace veritab {

// Lowercased, punctuation-split whitespace tokenization. Letter runs, digit
// runs and individual punctuation marks each form one token; bytes >= 0x80
// are treated as letters, so UTF-8 words survive intact. Deterministic;
// empty text yields no tokens.
std::vector<std::string> tokenize(std::string_view text);

// Token -> id map with a fixed reserved block. Ids from the vocabulary file
// start right after the reserved block: id = kReservedIds + line_number
// (0-based). Unknown tokens map to kUnk.
class Vocabulary {
public:
    static constexpr int kPad = 0;
    static constexpr int kCls = 1;
    static constexpr int kSep = 2;
    static constexpr int kUnk = 3;
    static constexpr int kReservedIds = 4;

    Vocabulary() = default;
    explicit Vocabulary(std::vector<std::string> tokens);

    // Frequency-ranked vocabulary capped at max_size total ids (reserved
    // block included). Ties break lexicographically for determinism.
    static Vocabulary build(const std::vector<std::string>& corpus_texts, int max_size);

    static Vocabulary load(const std::string& path);  // FileNotFound
    void save(const std::string& path) const;

    int id(const std::string& token) const;
    int size() const { return kReservedIds + static_cast<int>(tokens_.size()); }
    const std::vector<std::string>& tokens() const { return tokens_; }

    std::vector<int> encode(std::string_view text) const;  // tokenize + lookup

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, int> index_;
};

}  // namespace veritab
