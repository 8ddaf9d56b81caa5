fn main() {
    std::process::exit(freestyle::cli::run(std::env::args_os()));
}
