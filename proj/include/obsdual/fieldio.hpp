#pragma once

#include <string>
#include <vector>

#include "obsdual/grid.hpp"

namespace obsdual {

/// 15-significant-digit text form used for every emitted number.
std::string format_g15(double x);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

void write_scalar_csv(const std::string& path, const ScalarField& f);
ScalarField read_scalar_csv(const std::string& path, const Grid& grid);

void write_vector_csv(const std::string& path, const VectorField& f);
VectorField read_vector_csv(const std::string& path, const Grid& grid);

void write_weights_csv(const std::string& path, const DivergenceWeights& w);

/// Append-only JSON builder with deterministic formatting: doubles at 15
/// significant digits, non-finite values as the strings "inf"/"-inf"/"nan".
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(const std::string& k);
  JsonWriter& value(double x);
  JsonWriter& value(int x);
  JsonWriter& value(long long x);
  JsonWriter& value(unsigned long long x);
  JsonWriter& value(bool x);
  JsonWriter& value(const std::string& s);
  JsonWriter& value(const char* s);
  const std::string& str() const { return out_; }

 private:
  void separate();
  std::string out_;
  std::vector<bool> first_;
  bool pending_key_ = false;
};

} // namespace obsdual
