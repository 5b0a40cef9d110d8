// tests/unit/fake_adapter.cc

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

// A minimal external tokenizer speaking the line protocol, with switches that
// make it misbehave in controlled ways.

#include <chrono>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "stab/base64.h"
#include "stab/wav.h"

using nlohmann::json;

int main(int argc, char* argv[]) {
  std::string id = "fake", error_on, log_path;
  int vocab = 16, sleep_ms = 0, exit_after = -1;
  double rate = 25.0;
  bool bad_id = false, out_of_range = false, skip_handshake = false;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    auto next = [&] { return std::string(argv[++i]); };
    if (a == "--id") id = next();
    else if (a == "--vocab") vocab = std::stoi(next());
    else if (a == "--rate") rate = std::stod(next());
    else if (a == "--error-on") error_on = next();
    else if (a == "--sleep-ms") sleep_ms = std::stoi(next());
    else if (a == "--exit-after") exit_after = std::stoi(next());
    else if (a == "--log") log_path = next();
    else if (a == "--bad-id") bad_id = true;
    else if (a == "--out-of-range") out_of_range = true;
    else if (a == "--no-handshake") skip_handshake = true;
  }
  if (skip_handshake) {
    std::cout << "hello\n" << std::flush;
    return 0;
  }
  std::cout << json{{"protocol", 1}, {"tokenizer_id", id}, {"vocab_size", vocab}, {"frame_rate_hz", rate}}.dump()
            << "\n"
            << std::flush;
  std::ofstream log;
  if (!log_path.empty()) log.open(log_path, std::ios::app);
  std::string line;
  int served = 0;
  while (std::getline(std::cin, line)) {
    if (exit_after >= 0 && served >= exit_after) return 3;
    ++served;
    json req;
    try {
      req = json::parse(line);
    } catch (...) {
      std::cout << json{{"id", nullptr}, {"error", "malformed request"}}.dump() << "\n" << std::flush;
      continue;
    }
    const std::string rid = req.value("id", "");
    if (log.is_open()) log << rid << (req.contains("audio_path") ? " path" : " inline") << "\n" << std::flush;
    if (sleep_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(sleep_ms));
    json resp = {{"id", bad_id ? rid + "-x" : rid}};
    try {
      if (!req.contains("sample_rate_hz")) throw std::runtime_error("missing sample_rate_hz");
      if (!error_on.empty() && rid.find(error_on) != std::string::npos) throw std::runtime_error("refused");
      const int sr = req.at("sample_rate_hz").get<int>();
      std::vector<float> x;
      if (req.contains("audio_path")) {
        x = stab::ReadWav(req.at("audio_path").get<std::string>(), sr);
      } else {
        const auto bytes = stab::Base64Decode(req.at("pcm16_b64").get<std::string>());
        for (std::size_t i = 0; i + 1 < bytes.size(); i += 2) {
          const auto v = static_cast<std::int16_t>(bytes[i] | (bytes[i + 1] << 8));
          x.push_back(static_cast<float>(v) / 32768.0f);
        }
      }
      const auto hop = static_cast<std::size_t>(sr / rate);
      std::vector<int> tokens;
      for (std::size_t s = 0; s + hop <= x.size(); s += hop) {
        double e = 0.0;
        for (std::size_t j = s; j < s + hop; ++j) e += std::abs(x[j]);
        tokens.push_back(static_cast<int>(e * 97.0) % vocab);
      }
      if (out_of_range && !tokens.empty()) tokens[0] = vocab;
      resp["tokens"] = tokens;
    } catch (const std::exception& e) {
      resp["error"] = e.what();
    }
    std::cout << resp.dump() << "\n" << std::flush;
  }
  return 0;
}
