// Copyright 2026 The searchspace Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include "searchspace/util.hpp"

// Sandboxed execution of generated programs: separate process group, an
// isolated scratch working directory, a minimal environment, and a hard
// wall-clock timeout. Generated code is untrusted.
namespace searchspace::exec {

struct ExecResult {
  std::string out;
  std::string err;
  int exit_code = -1;    // 128+signal when signalled; -1 on timeout
  bool timed_out = false;
};

class CodeExecutor {
 public:
  virtual ~CodeExecutor() = default;
  virtual ExecResult run(const std::string& source, double timeout_seconds) = 0;
};

class PythonSubprocessExecutor : public CodeExecutor {
 public:
  explicit PythonSubprocessExecutor(std::string interpreter = "python3")
      : interpreter_(std::move(interpreter)) {}

  ExecResult run(const std::string& source, double timeout_seconds) override {
    namespace fs = std::filesystem;
    std::string dir_template =
        (fs::temp_directory_path() / "searchspace-exec-XXXXXX").string();
    std::vector<char> dir_buf(dir_template.begin(), dir_template.end());
    dir_buf.push_back('\0');
    if (mkdtemp(dir_buf.data()) == nullptr) {
      throw RuntimeError("mkdtemp failed: " + std::string(std::strerror(errno)));
    }
    fs::path workdir(dir_buf.data());
    ExecResult result;
    try {
      fs::path script = workdir / "main.py";
      util::write_text_file(script, source);
      result = spawn(script, workdir, timeout_seconds);
    } catch (...) {
      std::error_code ec;
      fs::remove_all(workdir, ec);
      throw;
    }
    std::error_code ec;
    fs::remove_all(workdir, ec);
    return result;
  }

 private:
  ExecResult spawn(const std::filesystem::path& script,
                   const std::filesystem::path& workdir, double timeout_seconds) {
    int out_pipe[2], err_pipe[2];
    if (pipe(out_pipe) != 0 || pipe(err_pipe) != 0) {
      throw RuntimeError("pipe failed: " + std::string(std::strerror(errno)));
    }
    pid_t pid = fork();
    if (pid < 0) {
      throw RuntimeError("fork failed: " + std::string(std::strerror(errno)));
    }
    if (pid == 0) {
      // child: own process group so a timeout can kill the whole tree
      setsid();
      if (chdir(workdir.c_str()) != 0) _exit(126);
      dup2(out_pipe[1], STDOUT_FILENO);
      dup2(err_pipe[1], STDERR_FILENO);
      close(out_pipe[0]); close(out_pipe[1]);
      close(err_pipe[0]); close(err_pipe[1]);
      const char* path_env = "PATH=/usr/local/bin:/usr/bin:/bin";
      char* envp[] = {const_cast<char*>(path_env),
                      const_cast<char*>("PYTHONDONTWRITEBYTECODE=1"), nullptr};
      char* argv[] = {const_cast<char*>(interpreter_.c_str()),
                      const_cast<char*>(script.c_str()), nullptr};
      execvpe(interpreter_.c_str(), argv, envp);
      _exit(127);
    }
    close(out_pipe[1]);
    close(err_pipe[1]);
    fcntl(out_pipe[0], F_SETFL, O_NONBLOCK);
    fcntl(err_pipe[0], F_SETFL, O_NONBLOCK);

    ExecResult result;
    auto deadline = std::chrono::steady_clock::now() +
                    std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                        std::chrono::duration<double>(timeout_seconds));
    bool out_open = true, err_open = true;
    bool killed = false;
    constexpr std::size_t kMaxCapture = 1 << 20;
    while (out_open || err_open) {
      auto now = std::chrono::steady_clock::now();
      if (!killed && now >= deadline) {
        kill(-pid, SIGKILL);
        killed = true;
        result.timed_out = true;
      }
      int wait_ms = 50;
      if (!killed) {
        auto remaining =
            std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
        wait_ms = static_cast<int>(std::clamp<long long>(remaining, 1, 100));
      }
      pollfd fds[2] = {{out_pipe[0], POLLIN, 0}, {err_pipe[0], POLLIN, 0}};
      fds[0].fd = out_open ? out_pipe[0] : -1;
      fds[1].fd = err_open ? err_pipe[0] : -1;
      poll(fds, 2, wait_ms);
      char buf[4096];
      auto drain = [&](int fd, bool& open, std::string& sink) {
        while (open) {
          ssize_t n = read(fd, buf, sizeof buf);
          if (n > 0) {
            if (sink.size() < kMaxCapture) {
              sink.append(buf, static_cast<std::size_t>(
                                   std::min<ssize_t>(n, static_cast<ssize_t>(
                                                            kMaxCapture - sink.size()))));
            }
            continue;
          }
          if (n == 0) {
            open = false;
            close(fd);
          }
          break;  // EOF or EAGAIN
        }
      };
      drain(out_pipe[0], out_open, result.out);
      drain(err_pipe[0], err_open, result.err);
    }
    // The pipes may hit EOF while the child is still alive (e.g. it closed
    // its streams and kept sleeping); keep enforcing the deadline here too.
    int status = 0;
    while (true) {
      pid_t reaped = waitpid(pid, &status, killed ? 0 : WNOHANG);
      if (reaped == pid || reaped < 0) break;
      if (std::chrono::steady_clock::now() >= deadline) {
        kill(-pid, SIGKILL);
        killed = true;
        result.timed_out = true;
        continue;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    if (result.timed_out) {
      result.exit_code = -1;
    } else if (WIFEXITED(status)) {
      result.exit_code = WEXITSTATUS(status);
    } else if (WIFSIGNALED(status)) {
      result.exit_code = 128 + WTERMSIG(status);
    }
    return result;
  }

  std::string interpreter_;
};

}  // namespace searchspace::exec
