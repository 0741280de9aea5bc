#pragma once

#include <stdexcept>
#include <string>

namespace blicket {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

class InvalidConfig : public Error {
public:
    using Error::Error;
};

class EpisodeFinished : public Error {
public:
    EpisodeFinished() : Error("episode already finished") {}
};

// Evidence that no supported hypothesis can explain.
class Contradiction : public Error {
public:
    using Error::Error;
};

class NothingToLearn : public Error {
public:
    NothingToLearn() : Error("belief is a point mass; no informative check exists") {}
};

class IoError : public Error {
public:
    using Error::Error;
};

class TransportError : public Error {
public:
    using Error::Error;
};

class EmptyReply : public Error {
public:
    EmptyReply() : Error("language model returned an empty completion") {}
};

}  // namespace blicket
