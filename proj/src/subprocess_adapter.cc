// JSONL transport: one child process per concurrency slot, one request line
// on stdin answered by one response line on stdout. stderr is inherited.

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <mutex>

#include "xqa/adapter.h"
#include "xqa/errors.h"

namespace xqa {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

AdapterError transport_error(const std::string &what) {
  return AdapterError(AdapterError::Kind::kTransport, what);
}

int remaining_ms(Clock::time_point deadline) {
  auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
  return left < 0 ? 0 : static_cast<int>(left);
}

class ChildProcess {
 public:
  explicit ChildProcess(const std::vector<std::string> &argv) {
    int to_child[2], from_child[2], exec_status[2];
    if (pipe2(to_child, O_CLOEXEC) != 0 || pipe2(from_child, O_CLOEXEC) != 0 ||
        pipe2(exec_status, O_CLOEXEC) != 0) {
      throw transport_error(std::string("pipe: ") + std::strerror(errno));
    }
    std::vector<char *> args;
    for (const auto &a : argv) args.push_back(const_cast<char *>(a.c_str()));
    args.push_back(nullptr);
    pid_ = fork();
    if (pid_ < 0) throw transport_error(std::string("fork: ") + std::strerror(errno));
    if (pid_ == 0) {
      dup2(to_child[0], STDIN_FILENO);
      dup2(from_child[1], STDOUT_FILENO);
      execvp(args[0], args.data());
      int err = errno;
      ssize_t ignored = write(exec_status[1], &err, sizeof(err));
      (void)ignored;
      _exit(127);
    }
    close(to_child[0]);
    close(from_child[1]);
    close(exec_status[1]);
    stdin_fd_ = to_child[1];
    stdout_fd_ = from_child[0];

    int err = 0;
    ssize_t n = read(exec_status[0], &err, sizeof(err));
    close(exec_status[0]);
    if (n == sizeof(err)) {
      reap(true);
      throw transport_error("cannot execute '" + argv[0] + "': " + std::strerror(err));
    }
    fcntl(stdin_fd_, F_SETFL, fcntl(stdin_fd_, F_GETFL) | O_NONBLOCK);
    fcntl(stdout_fd_, F_SETFL, fcntl(stdout_fd_, F_GETFL) | O_NONBLOCK);
  }

  ~ChildProcess() { reap(false); }

  ChildProcess(const ChildProcess &) = delete;
  ChildProcess &operator=(const ChildProcess &) = delete;

  std::string exchange(const std::string &line, Clock::time_point deadline) {
    write_all(line + "\n", deadline);
    return read_line(deadline);
  }

 private:
  void write_all(const std::string &data, Clock::time_point deadline) {
    std::size_t off = 0;
    while (off < data.size()) {
      ssize_t n = write(stdin_fd_, data.data() + off, data.size() - off);
      if (n > 0) {
        off += static_cast<std::size_t>(n);
        continue;
      }
      if (n < 0 && errno != EAGAIN && errno != EINTR) {
        throw transport_error(std::string("write to model process: ") + std::strerror(errno));
      }
      wait_fd(stdin_fd_, POLLOUT, deadline);
    }
  }

  std::string read_line(Clock::time_point deadline) {
    for (;;) {
      if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        return line;
      }
      char chunk[65536];
      ssize_t n = read(stdout_fd_, chunk, sizeof(chunk));
      if (n > 0) {
        buffer_.append(chunk, static_cast<std::size_t>(n));
      } else if (n == 0) {
        throw transport_error("model process closed its stdout");
      } else if (errno != EAGAIN && errno != EINTR) {
        throw transport_error(std::string("read from model process: ") + std::strerror(errno));
      } else {
        wait_fd(stdout_fd_, POLLIN, deadline);
      }
    }
  }

  void wait_fd(int fd, short events, Clock::time_point deadline) {
    pollfd p{fd, events, 0};
    int rc = poll(&p, 1, remaining_ms(deadline));
    if (rc == 0) throw AdapterError(AdapterError::Kind::kTimeout, "model process timed out");
    if (rc < 0 && errno != EINTR) throw transport_error(std::string("poll: ") + std::strerror(errno));
  }

  void reap(bool exited) {
    if (stdin_fd_ >= 0) close(stdin_fd_);
    if (stdout_fd_ >= 0) close(stdout_fd_);
    stdin_fd_ = stdout_fd_ = -1;
    if (pid_ > 0) {
      if (!exited) kill(pid_, SIGKILL);
      int status = 0;
      waitpid(pid_, &status, 0);
      pid_ = -1;
    }
  }

  pid_t pid_ = -1;
  int stdin_fd_ = -1;
  int stdout_fd_ = -1;
  std::string buffer_;
};

class SubprocessAdapter : public Adapter {
 public:
  explicit SubprocessAdapter(const AdapterDescriptor &d)
      : descriptor_(d), argv_(split_command(d.endpoint)) {
    if (argv_.empty()) throw InputError("subprocess adapter: empty command");
    static std::once_flag sigpipe_once;
    std::call_once(sigpipe_once, [] { signal(SIGPIPE, SIG_IGN); });
    int slots = d.max_concurrency < 1 ? 1 : d.max_concurrency;
    children_.resize(slots);
    for (int i = 0; i < slots; ++i) free_.push_back(i);
  }

  ModelPrediction predict(std::string_view question, const Context &context) override {
    int slot = acquire();
    struct Release {
      SubprocessAdapter *self;
      int slot;
      ~Release() { self->release(slot); }
    } release{this, slot};

    auto &child = children_[slot];
    std::string request = wire::encode_request(question, context, descriptor_.seed).dump();
    std::string line;
    try {
      if (!child) child = std::make_unique<ChildProcess>(argv_);
      line = child->exchange(request, Clock::now() + descriptor_.timeout);
    } catch (const AdapterError &) {
      child.reset();
      throw;
    }
    json response;
    try {
      response = json::parse(line);
    } catch (const json::parse_error &) {
      child.reset();
      std::string excerpt = line.substr(0, 200);
      throw AdapterError(AdapterError::Kind::kProtocol, "model process wrote a non-JSON line: " + excerpt);
    }
    return wire::decode_prediction(response, context, descriptor_.threshold);
  }

  int max_concurrency() const override { return static_cast<int>(children_.size()); }

 private:
  int acquire() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return !free_.empty(); });
    int slot = free_.back();
    free_.pop_back();
    return slot;
  }

  void release(int slot) {
    {
      std::lock_guard lock(mu_);
      free_.push_back(slot);
    }
    cv_.notify_one();
  }

  AdapterDescriptor descriptor_;
  std::vector<std::string> argv_;
  std::vector<std::unique_ptr<ChildProcess>> children_;
  std::vector<int> free_;
  std::mutex mu_;
  std::condition_variable cv_;
};

}  // namespace

std::unique_ptr<Adapter> make_subprocess_adapter(const AdapterDescriptor &descriptor) {
  return std::make_unique<SubprocessAdapter>(descriptor);
}

}  // namespace xqa
