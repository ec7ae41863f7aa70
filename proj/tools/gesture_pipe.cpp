#include <iostream>

#include "commands.hpp"
#include "gesture/error.hpp"

int main(int argc, char** argv) {
  using namespace gesture::cli;
  CLI::App app{"Arm-gesture recognition pipeline over OpenPose BODY-25 keypoints.", "gesture_pipe"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.footer(
      "Environment:\n"
      "  GESTURE_PIPE_THREADS  cap on worker threads (0 or unset = all cores)\n"
      "Exit codes: 0 ok, 2 bad flags, 3 data error, 4 numeric failure during training.");
  register_commands(app);
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kBadFlags;
  } catch (const gesture::Error& e) {
    std::cerr << "error [" << gesture::to_string(e.code()) << "]: " << e.message() << '\n';
    return e.code() == gesture::ErrorCode::NonFiniteGradient ? kNumericFailure : kDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kOk;
}
