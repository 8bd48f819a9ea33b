/*
 * Copyright (c) 2026 The y1jamlab Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace y1jam {

class PortBindError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Owned TCP connection with newline framing helpers.
class TcpStream {
 public:
  TcpStream() = default;
  explicit TcpStream(int fd) : fd_(fd) {}
  TcpStream(TcpStream&& other) noexcept;
  TcpStream& operator=(TcpStream&& other) noexcept;
  TcpStream(const TcpStream&) = delete;
  TcpStream& operator=(const TcpStream&) = delete;
  ~TcpStream();

  static std::optional<TcpStream> connect(const std::string& host, int port,
                                          std::chrono::milliseconds timeout);

  bool valid() const { return fd_ >= 0; }
  /// Writes `line` followed by '\n'. False once the peer is gone.
  bool write_line(std::string_view line);
  /// Next '\n'-terminated line without the terminator; nullopt on timeout,
  /// EOF or error (check valid() to tell them apart: EOF/error closes).
  std::optional<std::string> read_line(std::chrono::milliseconds timeout);
  void close();

 private:
  int fd_ = -1;
  std::string buffer_;
};

class TcpListener {
 public:
  TcpListener() = default;
  TcpListener(TcpListener&& other) noexcept;
  TcpListener& operator=(TcpListener&& other) noexcept;
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;
  ~TcpListener();

  /// Binds and listens; port 0 picks an ephemeral port. Throws PortBindError.
  static TcpListener bind(const std::string& host, int port);

  int port() const { return port_; }
  bool valid() const { return fd_ >= 0; }
  std::optional<TcpStream> accept(std::chrono::milliseconds timeout);
  void close();

 private:
  int fd_ = -1;
  int port_ = 0;
};

/// Splits "host:port"; throws std::invalid_argument when malformed.
std::pair<std::string, int> parse_endpoint(const std::string& endpoint);

}  // namespace y1jam
