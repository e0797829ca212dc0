fn main() {
    std::process::exit(pinchlab::cli::run(std::env::args_os()));
}
