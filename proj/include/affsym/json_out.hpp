#pragma once

#include <string>

/* deterministic text output helpers.  every float the tool writes goes
   through format_double so that identical inputs give byte-identical
   reports: fixed 17-significant-digit formatting, which also round-trips
   exactly through a double. */

namespace affsym {

std::string format_double(double v);

/* json string escaping for the characters that matter in practice */
std::string json_escape(const std::string& s);

/* tiny append-only json builder.  the caller opens and closes containers
   in order; keys keep insertion order, commas are managed internally.
   no validation beyond what the writing pattern enforces. */
class JsonWriter {
 public:
  void begin_object();
  void end_object();
  void begin_array();
  void end_array();
  void key(const std::string& k);
  void value(double v);
  void value(int v);
  void value(long long v);
  void value(bool v);
  void value(const std::string& s);
  void value(const char* s);
  void raw(const std::string& text);

  const std::string& str() const { return out_; }

 private:
  void comma();
  std::string out_;
  bool need_comma_ = false;
};

}  // namespace affsym
