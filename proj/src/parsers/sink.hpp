#pragma once

#include "latprof/parsers.hpp"

namespace latprof::detail {

template <typename T>
class Sink {
  public:
    explicit Sink(ParseMode mode) : mode_(mode) {}

    void add(T item) { out_.items.push_back(std::move(item)); }

    void fail(ParseErrorKind kind, std::size_t line, std::string reason) {
        LineError e{kind, line, std::move(reason)};
        if (mode_ == ParseMode::strict) throw ParseError(std::move(e));
        out_.errors.push_back(std::move(e));
    }

    ParseOutcome<T> finish() { return std::move(out_); }

  private:
    ParseMode mode_;
    ParseOutcome<T> out_;
};

} // namespace latprof::detail
