#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

namespace qp {

// Minimal ordered JSON writer. Numbers are emitted with 17 significant
// digits so every double round-trips and outputs are byte-stable; non-finite
// values are emitted as null.
class JsonWriter {
 public:
  JsonWriter& begin_object() {
    separator();
    out_ << '{';
    fresh_ = true;
    return *this;
  }
  JsonWriter& end_object() {
    out_ << '}';
    fresh_ = false;
    return *this;
  }
  JsonWriter& begin_array() {
    separator();
    out_ << '[';
    fresh_ = true;
    return *this;
  }
  JsonWriter& end_array() {
    out_ << ']';
    fresh_ = false;
    return *this;
  }

  JsonWriter& key(const std::string& name) {
    separator();
    write_string(name);
    out_ << ':';
    fresh_ = true;
    return *this;
  }

  JsonWriter& value(double v) {
    separator();
    if (!std::isfinite(v)) {
      out_ << "null";
    } else {
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out_ << buf;
    }
    return *this;
  }
  JsonWriter& value(int v) { return value(static_cast<long long>(v)); }
  JsonWriter& value(long v) { return value(static_cast<long long>(v)); }
  JsonWriter& value(long long v) {
    separator();
    out_ << v;
    return *this;
  }
  JsonWriter& value(unsigned long long v) {
    separator();
    out_ << v;
    return *this;
  }
  JsonWriter& value(bool v) {
    separator();
    out_ << (v ? "true" : "false");
    return *this;
  }
  JsonWriter& value(const std::string& v) {
    separator();
    write_string(v);
    return *this;
  }
  JsonWriter& value(const char* v) { return value(std::string(v)); }
  JsonWriter& null() {
    separator();
    out_ << "null";
    return *this;
  }

  JsonWriter& value(const Eigen::VectorXd& v) {
    begin_array();
    for (Eigen::Index i = 0; i < v.size(); ++i) value(v[i]);
    return end_array();
  }
  JsonWriter& value(const Eigen::MatrixXd& m) {
    begin_array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      value(Eigen::VectorXd(m.row(i)));
    }
    return end_array();
  }

  std::string str() const { return out_.str(); }

 private:
  void separator() {
    if (!fresh_) out_ << ',';
    fresh_ = false;
  }
  void write_string(const std::string& s) {
    out_ << '"';
    for (char c : s) {
      switch (c) {
        case '"': out_ << "\\\""; break;
        case '\\': out_ << "\\\\"; break;
        case '\n': out_ << "\\n"; break;
        case '\t': out_ << "\\t"; break;
        default: out_ << c;
      }
    }
    out_ << '"';
  }

  std::ostringstream out_;
  bool fresh_ = true;
};

}  // namespace qp
