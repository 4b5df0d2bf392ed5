fn main() {
    std::process::exit(wsskit::cli::run(std::env::args_os()));
}
