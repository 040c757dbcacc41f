#include "aomd/embedding.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "aomd/error.hpp"

namespace aomd {

EmbeddingTable::EmbeddingTable(std::vector<std::string> words, std::vector<double> matrix,
                               std::size_t dim)
    : words_(std::move(words)), matrix_(std::move(matrix)), dim_(dim) {
  if (words_.empty()) throw LoadError("embedding table has an empty vocabulary");
  if (dim_ == 0) throw LoadError("embedding dimension must be positive");
  if (matrix_.size() != words_.size() * dim_) {
    throw LoadError("embedding matrix size does not match vocabulary x dimension");
  }
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!index_.emplace(words_[i], i).second) {
      throw LoadError("duplicate embedding word '" + words_[i] + "'");
    }
  }
  unk_.assign(dim_, 0.0);
  for (std::size_t i = 0; i < words_.size(); ++i) {
    for (std::size_t j = 0; j < dim_; ++j) {
      const double v = matrix_[i * dim_ + j];
      if (!std::isfinite(v)) throw LoadError("non-finite embedding for '" + words_[i] + "'");
      unk_[j] += v;
    }
  }
  for (double& v : unk_) v /= static_cast<double>(words_.size());
}

std::span<const double> EmbeddingTable::lookup(const std::string& word) const {
  if (auto it = index_.find(word); it != index_.end()) return row(it->second);
  std::string lower = word;
  for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (auto it = index_.find(lower); it != index_.end()) return row(it->second);
  return unk_;
}

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open embedding table " + path.string());
  std::vector<std::string> words;
  std::vector<double> matrix;
  std::size_t dim = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream fields(line);
    std::string word;
    if (!(fields >> word)) continue;
    std::vector<double> row;
    std::string tok;
    while (fields >> tok) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        throw LoadError(path.string() + ":" + std::to_string(line_no) + ": bad number '" + tok +
                        "'");
      }
      row.push_back(v);
    }
    if (row.empty()) {
      throw LoadError(path.string() + ":" + std::to_string(line_no) + ": row has no values");
    }
    if (dim == 0) dim = row.size();
    if (row.size() != dim) {
      throw LoadError(path.string() + ":" + std::to_string(line_no) + ": row has " +
                      std::to_string(row.size()) + " values, expected " + std::to_string(dim));
    }
    words.push_back(std::move(word));
    matrix.insert(matrix.end(), row.begin(), row.end());
  }
  if (words.empty()) throw LoadError("embedding table " + path.string() + " is empty");
  try {
    return EmbeddingTable(std::move(words), std::move(matrix), dim);
  } catch (const LoadError& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
}

void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write embedding table " + path.string());
  char buf[64];
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.words()[i];
    for (double v : table.row(i)) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
      out << ' ' << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
    }
    out << '\n';
  }
  if (!out) throw LoadError("failed writing embedding table " + path.string());
}

}  // namespace aomd
