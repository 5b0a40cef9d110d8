// src/subprocess_tokenizer.cc

// Copyright 2026  The stab authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "stab/subprocess_tokenizer.h"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <thread>

#include "json.hpp"
#include "stab/base64.h"

namespace stab {
using nlohmann::json;
using Clock = std::chrono::steady_clock;

class SubprocessTokenizer::Child {
 public:
  explicit Child(const std::string& command) {
    int to_child[2], from_child[2];
    if (pipe2(to_child, O_CLOEXEC) != 0 || pipe2(from_child, O_CLOEXEC) != 0)
      throw Error(std::string("subprocess: pipe failed: ") + std::strerror(errno));
    pid_ = fork();
    if (pid_ < 0) throw Error(std::string("subprocess: fork failed: ") + std::strerror(errno));
    if (pid_ == 0) {
      dup2(to_child[0], STDIN_FILENO);
      dup2(from_child[1], STDOUT_FILENO);
      execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    in_fd_ = to_child[1];
    out_fd_ = from_child[0];
  }

  ~Child() {
    if (in_fd_ >= 0) close(in_fd_);
    if (out_fd_ >= 0) close(out_fd_);
    if (pid_ <= 0) return;
    // Closing stdin asks the child to exit; give it a moment, then kill.
    for (int i = 0; i < 100; ++i) {
      if (waitpid(pid_, nullptr, WNOHANG) == pid_) return;
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    kill(pid_, SIGKILL);
    waitpid(pid_, nullptr, 0);
  }

  Child(const Child&) = delete;
  Child& operator=(const Child&) = delete;

  void WriteLine(const std::string& line) {
    std::string data = line + "\n";
    std::size_t off = 0;
    while (off < data.size()) {
      const ssize_t n = write(in_fd_, data.data() + off, data.size() - off);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw Error(std::string("subprocess: write to adapter failed: ") + std::strerror(errno));
      }
      off += static_cast<std::size_t>(n);
    }
  }

  std::string ReadLine(std::chrono::milliseconds timeout) {
    const auto deadline = Clock::now() + timeout;
    for (;;) {
      const auto nl = buffer_.find('\n');
      if (nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        return line;
      }
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
      if (left.count() <= 0) throw Error("subprocess: adapter timed out");
      pollfd pfd{out_fd_, POLLIN, 0};
      const int r = poll(&pfd, 1, static_cast<int>(left.count()));
      if (r < 0) {
        if (errno == EINTR) continue;
        throw Error(std::string("subprocess: poll failed: ") + std::strerror(errno));
      }
      if (r == 0) throw Error("subprocess: adapter timed out");
      char chunk[65536];
      const ssize_t n = read(out_fd_, chunk, sizeof chunk);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw Error(std::string("subprocess: read failed: ") + std::strerror(errno));
      }
      if (n == 0) throw Error("subprocess: adapter closed its output");
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

  TokenizerDescriptor handshake;

 private:
  pid_t pid_ = -1;
  int in_fd_ = -1;
  int out_fd_ = -1;
  std::string buffer_;
};

namespace {

TokenizerDescriptor ParseHandshake(const std::string& line) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::exception&) {
    throw Error("subprocess: handshake is not JSON: " + line.substr(0, 200));
  }
  try {
    if (obj.at("protocol").get<int>() != 1) throw Error("subprocess: unsupported protocol version");
    TokenizerDescriptor d;
    d.tokenizer_id = obj.at("tokenizer_id").get<std::string>();
    const auto vocab = obj.at("vocab_size").get<std::int64_t>();
    if (vocab < 2) throw Error("subprocess: handshake vocab_size must be >= 2");
    d.vocab_size = static_cast<std::size_t>(vocab);
    d.frame_rate_hz = obj.at("frame_rate_hz").get<double>();
    d.adapter = AdapterKind::kSubprocess;
    d.Validate();
    return d;
  } catch (const json::exception& e) {
    throw Error(std::string("subprocess: malformed handshake (") + e.what() + ")");
  }
}

}  // namespace

SubprocessTokenizer::SubprocessTokenizer(SubprocessOptions options)
    : options_(std::move(options)) {
  if (options_.command.empty()) throw Error("subprocess: empty command");
  if (options_.lanes < 1) throw Error("subprocess: lanes must be >= 1");
  // Ignore SIGPIPE; a closed pipe shows up as a write error.
  signal(SIGPIPE, SIG_IGN);
  auto first = Spawn();
  desc_ = first->handshake;
  desc_.config_hash = Hasher()
                          .Str("subprocess")
                          .Str(options_.command)
                          .Str(desc_.tokenizer_id)
                          .U64(desc_.vocab_size)
                          .F64(desc_.frame_rate_hz)
                          .digest();
  live_ = 1;
  idle_.push_back(std::move(first));
}

SubprocessTokenizer::~SubprocessTokenizer() = default;

std::unique_ptr<SubprocessTokenizer::Child> SubprocessTokenizer::Spawn() {
  auto child = std::make_unique<Child>(options_.command);
  child->handshake = ParseHandshake(child->ReadLine(options_.timeout));
  return child;
}

std::unique_ptr<SubprocessTokenizer::Child> SubprocessTokenizer::Acquire() {
  std::unique_lock lock(mu_);
  for (;;) {
    if (!idle_.empty()) {
      auto child = std::move(idle_.back());
      idle_.pop_back();
      return child;
    }
    if (live_ < options_.lanes) {
      ++live_;
      lock.unlock();
      try {
        auto child = Spawn();
        const auto& h = child->handshake;
        if (h.tokenizer_id != desc_.tokenizer_id || h.vocab_size != desc_.vocab_size ||
            h.frame_rate_hz != desc_.frame_rate_hz) {
          throw Error("subprocess: adapter lanes disagree in their handshakes");
        }
        return child;
      } catch (...) {
        lock.lock();
        --live_;
        cv_.notify_one();
        throw;
      }
    }
    cv_.wait(lock);
  }
}

void SubprocessTokenizer::Release(std::unique_ptr<Child> child, bool healthy) {
  std::lock_guard lock(mu_);
  if (healthy) {
    idle_.push_back(std::move(child));
  } else {
    --live_;
    child.reset();
  }
  cv_.notify_one();
}

TokenSequence SubprocessTokenizer::Tokenize(const AudioInput& input) {
  std::string id;
  {
    std::lock_guard lock(mu_);
    id = std::string(input.utterance_id) + "|" + std::string(input.perturbation) + "|" +
         std::to_string(next_request_++);
  }
  json request = {{"id", id}, {"sample_rate_hz", input.rate_hz}};
  if (input.path && input.perturbation == "clean") {
    request["audio_path"] = input.path->string();
  } else {
    std::vector<std::uint8_t> pcm(input.samples.size() * 2);
    for (std::size_t i = 0; i < input.samples.size(); ++i) {
      const float x = std::clamp(input.samples[i], -1.0f, 1.0f);
      const auto q = static_cast<std::int16_t>(std::clamp(std::lround(x * 32768.0f), -32768L, 32767L));
      pcm[2 * i] = static_cast<std::uint8_t>(q & 0xFF);
      pcm[2 * i + 1] = static_cast<std::uint8_t>((q >> 8) & 0xFF);
    }
    request["pcm16_b64"] = Base64Encode(pcm);
  }

  auto child = Acquire();
  json response;
  try {
    child->WriteLine(request.dump());
    const std::string line = child->ReadLine(options_.timeout);
    try {
      response = json::parse(line);
    } catch (const json::exception&) {
      throw Error("subprocess: response is not JSON: " + line.substr(0, 200));
    }
    if (!response.is_object() || !response.contains("id") || response["id"] != id)
      throw Error("subprocess: response id does not match request " + id);
  } catch (...) {
    Release(std::move(child), false);
    throw;
  }
  Release(std::move(child), true);

  if (response.contains("error")) {
    throw Error("subprocess adapter failed on " + std::string(input.utterance_id) + ": " +
                response["error"].dump());
  }
  TokenSequence seq;
  seq.frame_rate_hz = desc_.frame_rate_hz;
  seq.source_utterance = std::string(input.utterance_id);
  seq.perturbation = std::string(input.perturbation);
  try {
    const auto& arr = response.at("tokens");
    if (!arr.is_array()) throw Error("subprocess: \"tokens\" must be an array");
    seq.tokens.reserve(arr.size());
    for (const auto& v : arr) {
      if (!v.is_number_integer()) throw Error("subprocess: token ids must be integers");
      const auto t = v.get<std::int64_t>();
      if (t < 0 || static_cast<std::uint64_t>(t) >= desc_.vocab_size) {
        throw Error("subprocess: token id " + std::to_string(t) + " outside vocabulary of size " +
                    std::to_string(desc_.vocab_size) + " for " + std::string(input.utterance_id));
      }
      seq.tokens.push_back(static_cast<TokenId>(t));
    }
  } catch (const json::exception& e) {
    throw Error(std::string("subprocess: malformed response (") + e.what() + ")");
  }
  return seq;
}

}  // namespace stab
