#ifndef XQA_TESTS_TEST_UTIL_H_
#define XQA_TESTS_TEST_UTIL_H_

#include <array>
#include <cstdio>
#include <filesystem>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <utility>
#include <vector>

#include "xqa/corpus.h"

namespace xqa::testing {

inline std::filesystem::path data_path(const std::string &name) {
  return std::filesystem::path(XQA_TEST_DATA_DIR) / name;
}

inline Context make_context(std::vector<std::pair<std::string, std::vector<std::string>>> articles) {
  Context out;
  for (auto &[title, sentences] : articles) out.push_back({title, sentences});
  return out;
}

inline Instance make_instance(std::string id, std::string question, Context context) {
  Instance inst;
  inst.id = std::move(id);
  inst.question = std::move(question);
  inst.context = std::move(context);
  inst.gold_answer = Answer::span("x");
  return inst;
}

struct CommandResult {
  int exit_code = -1;
  std::string out;
};

// Runs a shell command and captures stdout.
inline CommandResult run_command(const std::string &command) {
  CommandResult result;
  FILE *pipe = popen(command.c_str(), "r");
  if (!pipe) return result;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) result.out.append(buf.data(), n);
  int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

inline std::filesystem::path temp_path(const std::string &name) {
  auto dir = std::filesystem::temp_directory_path() / ("xqa_test_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace xqa::testing

#endif  // XQA_TESTS_TEST_UTIL_H_
