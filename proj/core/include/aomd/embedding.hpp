#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace aomd {

// Word-embedding table read from the whitespace-separated text format
// (`word v1 ... vn`, one word per line). Out-of-vocabulary words map to the
// arithmetic mean of all rows.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  // Throws LoadError on duplicate words, ragged rows, non-finite entries or an
  // empty vocabulary.
  EmbeddingTable(std::vector<std::string> words, std::vector<double> matrix, std::size_t dim);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return words_.size(); }
  bool contains(const std::string& word) const { return index_.count(word) != 0; }

  // Row for `word`: exact match, then its ASCII-lowercased form, then the
  // unknown-word vector.
  std::span<const double> lookup(const std::string& word) const;
  std::span<const double> row(std::size_t i) const {
    return {matrix_.data() + i * dim_, dim_};
  }
  std::span<const double> unk() const { return unk_; }
  const std::vector<std::string>& words() const { return words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<double> matrix_;
  std::vector<double> unk_;
  std::size_t dim_ = 0;
};

EmbeddingTable load_embeddings(const std::filesystem::path& path);
void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path);

}  // namespace aomd
