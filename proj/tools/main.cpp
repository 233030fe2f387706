#include <cstdio>

#include "cli_common.hpp"
#include "io/pgm.hpp"

namespace cli {

void register_cmd_phantom(CLI::App& app) {
  struct Args {
    int width = 128;
    int height = 128;
    std::string out;
  };
  auto args = std::make_shared<Args>();
  CLI::App* sub =
      app.add_subcommand("phantom", "Write the built-in grayscale test image as PGM");
  sub->add_option("--width", args->width, "Image width")->capture_default_str();
  sub->add_option("--height", args->height, "Image height")->capture_default_str();
  sub->add_option("-o,--out", args->out, "Output PGM path")->required();
  sub->callback([args]() {
    std::vector<double> data(static_cast<size_t>(args->width) * args->height);
    check(oemdec_phantom_image(args->width, args->height, data.data()), "phantom");
    oemdec::io::PgmImage img;
    img.width = args->width;
    img.height = args->height;
    img.maxval = 255;
    img.samples.resize(data.size());
    for (size_t i = 0; i < data.size(); ++i)
      img.samples[i] = static_cast<uint16_t>(std::lround(data[i]));
    oemdec::io::write_pgm(args->out, img);
  });
}

}  // namespace cli

int main(int argc, char** argv) {
  CLI::App app{"oemdec — deconvolution and restoration of fiber-bundle images"};
  app.require_subcommand(1);
  app.set_version_flag("--version", oemdec_version());

  cli::register_cmd_simulate(app);
  cli::register_cmd_deconvolve(app);
  cli::register_cmd_interpolate(app);
  cli::register_cmd_calibrate(app);
  cli::register_cmd_sweep(app);
  cli::register_cmd_phantom(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const cli::UsageError& e) {
    std::fprintf(stderr, "oemdec: %s\n", e.what());
    return 2;
  } catch (const oemdec::io::IoError& e) {
    std::fprintf(stderr, "oemdec: %s\n", e.what());
    return 2;
  } catch (const cli::RunError& e) {
    std::fprintf(stderr, "oemdec: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "oemdec: unexpected error: %s\n", e.what());
    return 3;
  }
  return 0;
}
