fn main() {
    std::process::exit(sphere_dpp::cli::run(std::env::args_os()));
}
