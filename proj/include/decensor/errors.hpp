#pragma once

#include <stdexcept>
#include <string>

namespace decensor {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input file (bad JSON, bad schema). Carries the 1-based line number
// when the failure is tied to a specific line, 0 otherwise.
struct ParseError : Error {
    ParseError(std::string msg, std::size_t line_no = 0)
        : Error(line_no ? "line " + std::to_string(line_no) + ": " + std::move(msg)
                        : std::move(msg)),
          line(line_no) {}
    std::size_t line;
};

struct DuplicateId : Error {
    explicit DuplicateId(const std::string& id) : Error("duplicate document id: " + id), doc_id(id) {}
    std::string doc_id;
};

struct DanglingParent : Error {
    explicit DanglingParent(const std::string& id)
        : Error("comment references missing post: " + id), doc_id(id) {}
    std::string doc_id;
};

struct UnknownDocument : Error {
    explicit UnknownDocument(const std::string& id) : Error("unknown document: " + id), doc_id(id) {}
    std::string doc_id;
};

struct InvalidSpec : Error {
    using Error::Error;
};

struct NameNotFound : Error {
    explicit NameNotFound(const std::string& name) : Error("name not found in any post: " + name) {}
};

struct FairnessViolation : Error {
    explicit FairnessViolation(const std::string& name)
        : Error("true name absent from scoped comments: " + name) {}
};

struct EmptyTrainingSet : Error {
    using Error::Error;
};

struct MissingAnswer : Error {
    explicit MissingAnswer(const std::string& post_id)
        : Error("no ground-truth answer for post: " + post_id) {}
};

struct ConfigError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace decensor
